"""Tests for state construction, quantization, and metrics."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twobasis import (
    PrecisionSpec,
    QuantizationError,
    fidelity,
    from_amplitudes,
    from_polar,
    ghz_like,
    quantize,
    random_state,
    support_of,
    w_like,
)
from twobasis.state import state_from_dict, state_to_dict


class TestFromPolar:
    def test_basis_state(self):
        s = from_polar([1.0, 0.0], [0.0, 0.0])
        np.testing.assert_allclose(s.amplitudes, [1.0, 0.0])

    def test_normalizes_and_keeps_sign_in_phase(self):
        s = from_polar([1.0, 1.0], [0.0, math.pi])
        np.testing.assert_allclose(s.amplitudes, [1 / math.sqrt(2), -1 / math.sqrt(2)], atol=1e-15)

    def test_global_phase_removed(self):
        s = from_polar([0.6, 0.8], [0.7, 0.7])
        assert s.phi[0] == 0.0
        assert abs(s.phi[1]) < 1e-15

    def test_zero_vector_rejected(self):
        with pytest.raises(ValueError, match="degenerate"):
            from_polar([0.0, 0.0], [0.0, 0.0])

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            from_polar([1.0, 0.0], [0.0])

    def test_negative_modulus_rejected(self):
        with pytest.raises(ValueError, match="non-negative"):
            from_polar([1.0, -0.5], [0.0, 0.0])

    def test_reference_skips_dead_indices(self):
        s = from_polar([0.0, 1.0, 1.0], [0.0, 1.2, 2.0])
        assert s.reference == 1
        assert s.phi[1] == 0.0


class TestRandomState:
    def test_deterministic(self):
        spec = PrecisionSpec()
        a = random_state(8, 5, spec)
        b = random_state(8, 5, spec)
        np.testing.assert_array_equal(a.r, b.r)
        np.testing.assert_array_equal(a.phi, b.phi)

    def test_quantized_digit_budget(self):
        s = random_state(8, 3, PrecisionSpec())
        for rk in s.r:
            assert abs(rk * 1000 - round(rk * 1000)) < 1e-9
        assert abs(s.norm_squared() - 1.0) < 0.5e-2

    def test_self_fidelity_one(self):
        s = random_state(2, 11, PrecisionSpec())
        assert fidelity(s, s) == pytest.approx(1.0, abs=1e-12)

    def test_unquantized_normalized(self):
        s = random_state(16, 2)
        assert abs(s.norm_squared() - 1.0) < 1e-12


class TestSpecialStates:
    def test_w_like_two_qubits(self):
        s = w_like(2, [1.0, 1.0], [0.0, 0.0])
        np.testing.assert_allclose(s.amplitudes, [0, 1 / math.sqrt(2), 1 / math.sqrt(2), 0],
                                   atol=1e-15)

    def test_ghz_like_three_qubits(self):
        s = ghz_like(3, 1.0, 1.0, 0.0)
        expected = np.zeros(8)
        expected[0] = expected[7] = 1 / math.sqrt(2)
        np.testing.assert_allclose(s.amplitudes, expected, atol=1e-15)

    def test_w_like_support_size(self):
        rng = np.random.default_rng(0)
        s = w_like(20, np.ones(20), rng.uniform(0, 2 * math.pi, 20))
        assert s.support().size == 20

    def test_all_zero_weights_rejected(self):
        with pytest.raises(ValueError):
            w_like(2, [0.0, 0.0], [0.0, 0.0])


class TestQuantize:
    def test_exact_basis_state_unchanged(self):
        s = from_polar([1.0, 0.0], [0.0, 0.0])
        q = quantize(s, PrecisionSpec())
        np.testing.assert_array_equal(q.r, s.r)
        np.testing.assert_array_equal(q.phi, s.phi)

    def test_uniform_pair_rounding(self):
        s = from_polar([1.0, 1.0], [0.0, 0.0])
        q = quantize(s, PrecisionSpec())
        np.testing.assert_array_equal(q.r, [0.707, 0.707])
        # |0.707^2 * 2 - 1| = 3.02e-4 < 0.5e-2
        assert abs(q.norm_squared() - 1.0) == pytest.approx(3.02e-4, rel=1e-6)

    def test_idempotent(self):
        spec = PrecisionSpec()
        s = random_state(8, 9)
        q1 = quantize(s, spec)
        q2 = quantize(q1, spec)
        np.testing.assert_array_equal(q1.r, q2.r)
        np.testing.assert_array_equal(q1.phi, q2.phi)

    def test_polar_cartesian_agreement(self):
        q = random_state(8, 21, PrecisionSpec())
        amps = q.amplitudes
        np.testing.assert_allclose(amps.real, q.r * np.cos(q.phi), atol=1e-12)
        np.testing.assert_allclose(amps.imag, q.r * np.sin(q.phi), atol=1e-12)

    def test_phase_pair_tolerance(self):
        spec = PrecisionSpec()
        q = random_state(8, 33, spec)
        for k in q.support():
            c, s = round(math.cos(q.phi[k]), 4), round(math.sin(q.phi[k]), 4)
            # the rounded pair defining each phase sits near the unit circle
            assert abs(c * c + s * s - 1.0) < 0.5e-2 + 1e-6

    def test_infeasible_quantization_raises(self):
        # one decimal place cannot normalise a 32-dimensional state
        s = random_state(32, 4)
        with pytest.raises(QuantizationError):
            quantize(s, PrecisionSpec(c1=1, c2=3, c3=3, n1=4))

    def test_candidate_side(self):
        spec = PrecisionSpec(c1p=4, c2p=4, c3p=4)
        s = random_state(4, 8)
        q = quantize(s, spec, side="candidate")
        for rk in q.r:
            assert abs(rk * 1e4 - round(rk * 1e4)) < 1e-8


class TestFidelity:
    def test_identical(self):
        s = random_state(4, 1)
        assert fidelity(s, s) == pytest.approx(1.0, abs=1e-14)

    def test_orthogonal(self):
        a = from_polar([1.0, 0.0], [0.0, 0.0])
        b = from_polar([0.0, 1.0], [0.0, 0.0])
        assert fidelity(a, b) == 0.0

    def test_half_overlap(self):
        a = from_polar([1.0, 0.0], [0.0, 0.0])
        b = from_polar([1.0, 1.0], [0.0, 0.0])
        assert fidelity(a, b) == pytest.approx(0.5, abs=1e-14)

    def test_global_phase_invariant(self):
        s = random_state(8, 14)
        rotated = from_amplitudes(s.amplitudes * np.exp(1j * 1.234))
        assert fidelity(s, rotated) == pytest.approx(1.0, abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            fidelity(random_state(4, 1), random_state(8, 1))


class TestSupport:
    def test_single_support(self):
        sup = support_of(np.array([1.0, 0.0, 0.0]), 1e-9)
        assert sup.indices == (0,)
        assert sup.reference == 0

    def test_w_like_support(self):
        s = w_like(3, np.ones(3), np.zeros(3))
        sup = support_of(s.r ** 2, 1e-9)
        assert sup.indices == (1, 2, 4)
        assert sup.reference == 1

    def test_threshold_semantics(self):
        p = np.array([0.5, 1e-12, 0.5 - 1e-12])
        sup = support_of(p, 1e-6)
        assert 1 not in sup.indices

    def test_empty_support_rejected(self):
        with pytest.raises(ValueError, match="empty support"):
            support_of(np.array([1e-12, 1e-12]), 1e-6)


class TestSerialization:
    def test_round_trip(self):
        s = random_state(8, 77, PrecisionSpec())
        loaded = state_from_dict(state_to_dict(s))
        assert fidelity(s, loaded) == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(loaded.r, s.r, atol=1e-15)
        assert loaded.quantized == s.quantized


class TestPrecisionSpec:
    def test_defaults_valid(self):
        spec = PrecisionSpec()
        assert spec.side("target") == (3, 3, 2, 2)
        assert spec.side("candidate") == (3, 3, 2, 2)

    def test_cos_sin_split_rejected(self):
        with pytest.raises(ValueError):
            PrecisionSpec(c2=3, c3=4)

    def test_phase_factor_budget_floor(self):
        with pytest.raises(ValueError):
            PrecisionSpec(x=5)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000), d=st.sampled_from([2, 3, 4, 8, 16]))
def test_constructor_invariants(seed, d):
    s = random_state(d, seed)
    assert abs(s.norm_squared() - 1.0) < 1e-12
    g = s.reference
    assert s.phi[g] == 0.0
    assert np.all(s.r >= 0.0)
    assert np.all((0.0 <= s.phi) & (s.phi < 2 * math.pi))


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_quantize_preserves_tolerances(seed):
    spec = PrecisionSpec()
    q = random_state(8, seed, spec)
    assert abs(q.norm_squared() - 1.0) < 0.5e-2
    assert fidelity(q, q) == pytest.approx(1.0, abs=1e-12)
