"""Tests for the difference decomposition, enumeration, twin, and certificate."""
import math

import numpy as np
import pytest

from twobasis import (
    PrecisionSpec,
    certify_zero_phase,
    delta_q_decompose,
    exhaustive_match,
    explicit_angles,
    fidelity,
    from_polar,
    gen_geometric,
    gen_sqrt_prime,
    ghz_like,
    ghz_twin,
    phase_grid_membership,
    prob_computational,
    prob_plain_hadamard,
    prob_qubit_second,
    prob_qudit_second,
    quantize,
    random_state,
    w_like,
)
from twobasis import reflection_twin
from twobasis.bases import QUBIT_LOCAL
from twobasis.state import _canonical

ALPHA3 = gen_sqrt_prime(3, mode=QUBIT_LOCAL)


def _same_moduli_pair(seed, d=8):
    rng = np.random.default_rng(seed)
    r = rng.uniform(0.2, 1.0, d)
    r /= np.linalg.norm(r)
    phi_a = np.concatenate([[0.0], rng.uniform(0, 2 * math.pi, d - 1)])
    phi_b = np.concatenate([[0.0], rng.uniform(0, 2 * math.pi, d - 1)])
    return _canonical(r.copy(), phi_a), _canonical(r.copy(), phi_b)


class TestDeltaDecomposition:
    def test_identical_states_zero(self):
        psi, _ = _same_moduli_pair(0)
        dec = delta_q_decompose(psi, psi, ALPHA3, 2)
        assert np.max(np.abs(dec.c_coeffs)) == 0.0
        assert np.max(np.abs(dec.s_coeffs)) == 0.0
        assert dec.reassemble() == 0.0

    @pytest.mark.parametrize("j", range(8))
    def test_reassembly_matches_direct_difference_local(self, j):
        psi, phi = _same_moduli_pair(1)
        q_a = prob_qubit_second(psi, ALPHA3)
        q_b = prob_qubit_second(phi, ALPHA3)
        dec = delta_q_decompose(psi, phi, ALPHA3, j)
        direct = q_a.values[j] - q_b.values[j]
        assert dec.reassemble() == pytest.approx(direct, abs=1e-12)
        assert dec.reassemble_merged() == pytest.approx(direct, abs=1e-12)

    @pytest.mark.parametrize("j", [0, 2, 5])
    def test_reassembly_matches_direct_difference_qudit(self, j):
        psi, phi = _same_moduli_pair(2, d=6)
        theta = gen_sqrt_prime(6)
        dec = delta_q_decompose(psi, phi, theta, j)
        direct = (prob_qudit_second(psi, theta).values[j]
                  - prob_qudit_second(phi, theta).values[j])
        assert dec.reassemble() == pytest.approx(direct, abs=1e-12)
        assert dec.reassemble_merged() == pytest.approx(direct, abs=1e-12)

    def test_some_outcome_sees_difference(self):
        psi, phi = _same_moduli_pair(3)
        diffs = [abs(delta_q_decompose(psi, phi, ALPHA3, j).reassemble()) for j in range(8)]
        assert max(diffs) > 1e-6

    def test_amplitude_mismatch_rejected(self):
        a = random_state(8, 1)
        b = random_state(8, 2)
        with pytest.raises(ValueError, match="amplitude"):
            delta_q_decompose(a, b, ALPHA3, 0)


class TestGhzTwin:
    def test_twin_phase_formula(self):
        psi = ghz_like(3, 1.0, 1.0, 0.7)
        twin = ghz_twin(psi, ALPHA3)
        expected = (-0.7 + 2 * float(np.sum(ALPHA3.angles))) % (2 * math.pi)
        assert twin.phi[7] == pytest.approx(expected, abs=1e-12)

    def test_distributions_match(self):
        psi = ghz_like(3, 0.8, 1.1, 0.7)
        twin = ghz_twin(psi, ALPHA3)
        np.testing.assert_allclose(prob_computational(psi).values,
                                   prob_computational(twin).values, atol=1e-12)
        np.testing.assert_allclose(prob_qubit_second(psi, ALPHA3).values,
                                   prob_qubit_second(twin, ALPHA3).values, atol=1e-12)

    def test_twin_differs(self):
        psi = ghz_like(3, 1.0, 1.0, 0.7)
        twin = ghz_twin(psi, ALPHA3)
        assert fidelity(psi, twin) < 0.999

    def test_fixed_point(self):
        phase = float(np.sum(ALPHA3.angles)) % (2 * math.pi)
        psi = ghz_like(3, 1.0, 1.0, phase)
        twin = ghz_twin(psi, ALPHA3)
        assert fidelity(psi, twin) == pytest.approx(1.0, abs=1e-12)

    def test_fidelity_formula(self):
        psi = ghz_like(3, 0.6, 1.3, 0.7)
        twin = ghz_twin(psi, ALPHA3)
        delta = twin.phi[7] - psi.phi[7]
        r0, r1 = psi.r[0], psi.r[7]
        expected = abs(r0 ** 2 + r1 ** 2 * np.exp(1j * delta)) ** 2
        assert fidelity(psi, twin) == pytest.approx(expected, abs=1e-12)

    def test_non_ghz_rejected(self):
        psi = w_like(3, np.ones(3), np.zeros(3))
        with pytest.raises(ValueError, match="GHZ"):
            ghz_twin(psi, ALPHA3)


class TestReflectionTwin:
    def test_matches_ghz_twin_on_two_components(self):
        psi = ghz_like(3, 1.0, 1.0, 0.7)
        a = ghz_twin(psi, ALPHA3)
        b = reflection_twin(psi, ALPHA3)
        assert fidelity(a, b) == pytest.approx(1.0, abs=1e-12)

    def test_full_support_distributions_match(self):
        psi = random_state(8, 31, PrecisionSpec())
        twin = reflection_twin(psi, ALPHA3)
        np.testing.assert_allclose(prob_computational(psi).values,
                                   prob_computational(twin).values, atol=1e-12)
        np.testing.assert_allclose(prob_qubit_second(psi, ALPHA3).values,
                                   prob_qubit_second(twin, ALPHA3).values, atol=1e-12)

    def test_generally_a_different_state(self):
        psi = random_state(8, 31, PrecisionSpec())
        twin = reflection_twin(psi, ALPHA3)
        assert fidelity(psi, twin) < 0.9

    def test_third_basis_separates_the_twin(self):
        psi = random_state(8, 31, PrecisionSpec())
        twin = reflection_twin(psi, ALPHA3)
        gap = np.max(np.abs(prob_plain_hadamard(psi).values
                            - prob_plain_hadamard(twin).values))
        assert gap > 1e-3


class TestPhaseGrid:
    def test_quantized_phases_on_grid(self):
        spec = PrecisionSpec()
        q = random_state(8, 5, spec)
        for k in q.support():
            assert phase_grid_membership(float(q.phi[k]), spec.c2, spec.n2)

    def test_twin_phase_off_grid(self):
        psi = ghz_like(3, 1.0, 1.0, 0.7)
        twin = ghz_twin(psi, ALPHA3)
        spec = PrecisionSpec()
        assert not phase_grid_membership(float(twin.phi[7]), spec.c2, spec.n2)

    def test_axis_phases_on_grid(self):
        spec = PrecisionSpec()
        for phi in (0.0, math.pi / 2, math.pi, 3 * math.pi / 2):
            assert phase_grid_membership(phi, spec.c2, spec.n2)


class TestZeroPhaseCertificate:
    def test_uniform_w_like_certified(self):
        psi = w_like(2, [1.0, 1.0], [0.0, 0.0])
        cert = certify_zero_phase(prob_computational(psi), prob_plain_hadamard(psi))
        assert cert.certified
        assert cert.t0_expected == pytest.approx(0.5, abs=1e-14)

    def test_phase_refuted_with_positive_deficit(self):
        psi = w_like(2, [1.0, 1.0], [0.0, math.pi / 2])
        cert = certify_zero_phase(prob_computational(psi), prob_plain_hadamard(psi))
        assert not cert.certified
        assert cert.deficit > 0.0
        # deficit = (1/2^(n-1)) * r_s * r_l * (1 - cos dphi) over the single support pair
        expected = 0.5 * 0.5 * (1 - math.cos(math.pi / 2))
        assert cert.deficit == pytest.approx(expected, abs=1e-12)

    def test_ground_state_certified(self):
        psi = from_polar([1, 0, 0, 0], np.zeros(4))
        cert = certify_zero_phase(prob_computational(psi), prob_plain_hadamard(psi))
        assert cert.certified
        assert cert.t0_expected == pytest.approx(0.25, abs=1e-14)

    def test_deficit_nonnegative_randomized(self):
        for seed in range(300):
            psi = random_state(8, seed)
            cert = certify_zero_phase(prob_computational(psi), prob_plain_hadamard(psi))
            assert cert.deficit >= -1e-12


class TestExhaustiveMatch:
    def test_unique_match_valid_angles(self):
        rng = np.random.default_rng(4)
        grid = 90
        theta = gen_geometric(3, 1.0)
        r = rng.uniform(0.3, 1.0, 3)
        r /= np.linalg.norm(r)
        phi = 2 * math.pi * rng.integers(0, grid, 3) / grid
        psi = from_polar(r, phi)
        matches = exhaustive_match(prob_computational(psi), prob_qudit_second(psi, theta),
                                   theta, grid, 1e-8)
        assert len(matches) == 1
        assert fidelity(matches[0], psi) == pytest.approx(1.0, abs=1e-10)

    def test_ambiguity_under_arithmetic_angles(self):
        grid = 36
        theta = explicit_angles([0.0, 1.0, 2.0])
        r = np.full(3, 1.0 / math.sqrt(3.0))
        # swap-symmetric target family: phases (0, a, b) and (0, b-a, b) coincide
        a, b = 2 * math.pi * 5 / grid, 2 * math.pi * 14 / grid
        psi = from_polar(r, [0.0, a, b])
        matches = exhaustive_match(prob_computational(psi), prob_qudit_second(psi, theta),
                                   theta, grid, 1e-8)
        assert len(matches) >= 2
        swapped = from_polar(r, [0.0, b - a, b])
        assert any(fidelity(m, swapped) > 1.0 - 1e-9 for m in matches)

    def test_budget_guard(self):
        p = prob_computational(random_state(16, 1))
        q = prob_qudit_second(random_state(16, 1), gen_sqrt_prime(16))
        with pytest.raises(ValueError, match="budget"):
            exhaustive_match(p, q, gen_sqrt_prime(16), 720, 1e-8)

    def test_zero_phase_fourier_target_collapses(self):
        theta = explicit_angles([0.0, 0.0, 0.0, 0.0])
        r = np.array([0.7, 0.5, 0.4, 0.32111156])
        r /= np.linalg.norm(r)
        psi = from_polar(r, np.zeros(4))
        matches = exhaustive_match(prob_computational(psi), prob_qudit_second(psi, theta),
                                   theta, 36, 1e-8)
        assert len(matches) == 1
        cert = certify_zero_phase(prob_computational(psi), prob_plain_hadamard(psi))
        assert cert.certified
