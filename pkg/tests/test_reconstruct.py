"""Tests for the distance objective, proposal kernel, and annealing driver."""
import math

import numpy as np
import pytest

from twobasis import (
    PrecisionSpec,
    ProbDist,
    amplitudes_from_P,
    anneal,
    candidate_distributions,
    computational_basis,
    epsilon_prob,
    fidelity,
    from_polar,
    gen_sqrt_prime,
    multi_restart,
    prob_computational,
    prob_qubit_second,
    propose,
    qubit_local_basis,
    random_state,
    support_of,
    w_like,
)
from twobasis.bases import QUBIT_LOCAL
from twobasis.reconstruct import ReconstructionConfig, derive_seed, result_to_dict

SPEC = PrecisionSpec()
ALPHA = gen_sqrt_prime(3, mode=QUBIT_LOCAL)


def _problem(state_seed, d=8):
    n = d.bit_length() - 1
    alpha = ALPHA if n == 3 else gen_sqrt_prime(n, mode=QUBIT_LOCAL)
    psi = random_state(d, state_seed, SPEC)
    bases = [computational_basis(d), qubit_local_basis(alpha)]
    targets = [prob_computational(psi), prob_qubit_second(psi, alpha.rounded(SPEC.x))]
    return psi, bases, targets


class TestEpsilonProb:
    def test_identical_lists(self):
        psi, bases, targets = _problem(1)
        assert epsilon_prob(targets, targets) == 0.0

    def test_single_norm(self):
        a = [ProbDist(values=np.array([1.0, 0.0])), ProbDist(values=np.array([0.5, 0.5]))]
        b = [ProbDist(values=np.array([0.0, 1.0])), ProbDist(values=np.array([0.5, 0.5]))]
        assert epsilon_prob(a, b) == pytest.approx(math.sqrt(2.0), abs=1e-15)

    def test_mismatch_rejected(self):
        a = [ProbDist(values=np.array([1.0, 0.0]))]
        with pytest.raises(ValueError):
            epsilon_prob(a, a)


class TestAmplitudesFromP:
    def test_square_roots(self):
        p = ProbDist(values=np.array([0.36, 0.64]))
        r, sup = amplitudes_from_P(p)
        np.testing.assert_allclose(r, [0.6, 0.8], atol=1e-15)
        assert sup.indices == (0, 1)

    def test_w_like_support_count(self):
        rng = np.random.default_rng(0)
        psi = w_like(20, np.ones(20), rng.uniform(0, 2 * math.pi, 20))
        r, sup = amplitudes_from_P(prob_computational(psi))
        assert len(sup.indices) == 20
        assert np.count_nonzero(r) == 20

    def test_point_mass_trivial(self):
        p = ProbDist(values=np.array([1.0, 0.0, 0.0, 0.0]))
        r, sup = amplitudes_from_P(p)
        assert sup.indices == (0,)
        np.testing.assert_array_equal(r, [1.0, 0.0, 0.0, 0.0])


class TestPropose:
    def test_zero_steps_identity(self):
        psi, _, targets = _problem(2)
        sup = support_of(targets[0], 1e-9)
        rng = np.random.default_rng(0)
        out = propose(psi, sup, rng, 0.0, 0.0, True, SPEC)
        np.testing.assert_array_equal(out.r, psi.r)
        np.testing.assert_allclose(out.phi, psi.phi, atol=1e-12)

    def test_sparse_amplitudes_untouched(self):
        psi, _, targets = _problem(3)
        sup = support_of(targets[0], 1e-9)
        rng = np.random.default_rng(1)
        out = propose(psi, sup, rng, 1.0, 0.5, True, SPEC)
        np.testing.assert_array_equal(out.r, psi.r)

    def test_reference_phase_fixed(self):
        psi, _, targets = _problem(4)
        sup = support_of(targets[0], 1e-9)
        rng = np.random.default_rng(2)
        for _ in range(20):
            out = propose(psi, sup, rng, 2.0, 0.1, False, SPEC)
            assert out.phi[out.reference] == 0.0
            psi = out

    def test_dense_moves_stay_on_decimal_grid(self):
        psi, _, targets = _problem(5)
        sup = support_of(targets[0], 1e-9)
        rng = np.random.default_rng(3)
        out = psi
        for _ in range(30):
            out = propose(out, sup, rng, 1.0, 0.1, False, SPEC)
        for rk in out.r:
            assert abs(rk * 1000 - round(rk * 1000)) < 1e-9
        assert abs(out.norm_squared() - 1.0) < 0.5e-2

    def test_single_support_returns_current(self):
        psi = from_polar([1.0, 0.0], [0.0, 0.0])
        sup = support_of(np.array([1.0, 0.0]), 1e-9)
        out = propose(psi, sup, np.random.default_rng(0), 1.0, 0.1, True, SPEC)
        assert out is psi


class TestAnneal:
    def test_single_support_zero_epsilon(self):
        psi = from_polar([1.0, 0.0, 0.0, 0.0], np.zeros(4))
        alpha = gen_sqrt_prime(2, mode=QUBIT_LOCAL)
        bases = [computational_basis(4), qubit_local_basis(alpha)]
        targets = [prob_computational(psi), prob_qubit_second(psi, alpha)]
        res = anneal(targets, bases, ReconstructionConfig(iterations=10, seed=0))
        assert res.trace[0] == (0, pytest.approx(0.0, abs=1e-12))
        assert res.epsilon < 1e-12

    def test_trace_monotone(self):
        _, bases, targets = _problem(6)
        res = anneal(targets, bases, ReconstructionConfig(iterations=800, seed=4))
        eps_values = [e for _, e in res.trace]
        assert all(a >= b - 1e-15 for a, b in zip(eps_values, eps_values[1:]))

    def test_deterministic(self):
        _, bases, targets = _problem(7)
        cfg = ReconstructionConfig(iterations=500, seed=11)
        a = anneal(targets, bases, cfg)
        b = anneal(targets, bases, cfg)
        assert a.epsilon == b.epsilon
        np.testing.assert_array_equal(a.state.phi, b.state.phi)
        assert a.trace == b.trace

    def test_engine_epsilon_matches_public(self):
        psi, bases, targets = _problem(8)
        res = anneal(targets, bases, ReconstructionConfig(iterations=400, seed=2))
        cands = candidate_distributions(res.state, bases, xp=SPEC.xp)
        assert epsilon_prob(targets, cands) == pytest.approx(res.epsilon, abs=1e-9)

    def test_consistency_exact_recovery_small(self):
        # 4-dimensional grid-aligned target: some restart recovers it exactly
        psi, bases, targets = _problem(21, d=4)
        cfg = ReconstructionConfig(iterations=1500, restarts=12, seed=5)
        best, _, _ = multi_restart(targets, bases, cfg, true_state=psi)
        assert best.epsilon < 1e-10
        assert best.fidelity > 0.999999

    def test_gauge_invariance(self):
        from twobasis import from_amplitudes

        psi, bases, _ = _problem(9)
        rotated = from_amplitudes(psi.amplitudes * np.exp(1j * 0.42))
        alpha_r = ALPHA.rounded(SPEC.x)
        t1 = [prob_computational(psi), prob_qubit_second(psi, alpha_r)]
        t2 = [prob_computational(rotated), prob_qubit_second(rotated, alpha_r)]
        cfg = ReconstructionConfig(iterations=600, seed=3)
        r1 = anneal(t1, bases, cfg, true_state=psi)
        r2 = anneal(t2, bases, cfg, true_state=rotated)
        assert r1.epsilon == pytest.approx(r2.epsilon, abs=1e-12)
        assert r1.fidelity == pytest.approx(r2.fidelity, abs=1e-12)

    def test_sparse_amplitudes_equal_sqrt_p(self):
        psi, bases, targets = _problem(10)
        res = anneal(targets, bases, ReconstructionConfig(iterations=300, seed=6))
        np.testing.assert_allclose(res.state.r, np.sqrt(targets[0].values), atol=1e-12)

    def test_first_target_must_be_computational(self):
        _, bases, targets = _problem(11)
        with pytest.raises(ValueError, match="computational"):
            anneal(targets[::-1], bases[::-1], ReconstructionConfig(iterations=10, seed=0))


class TestMultiRestart:
    def test_single_restart_matches_anneal(self):
        _, bases, targets = _problem(12)
        cfg = ReconstructionConfig(iterations=300, restarts=1, seed=8)
        single = anneal(targets, bases,
                        ReconstructionConfig(iterations=300, seed=derive_seed(8, 0)))
        best, results, _ = multi_restart(targets, bases, cfg)
        assert len(results) == 1
        assert best.epsilon == single.epsilon

    def test_deterministic_stats(self):
        psi, bases, targets = _problem(13)
        cfg = ReconstructionConfig(iterations=200, restarts=6, seed=21)
        _, _, s1 = multi_restart(targets, bases, cfg, true_state=psi)
        _, _, s2 = multi_restart(targets, bases, cfg, true_state=psi)
        assert s1 == s2

    def test_workers_match_serial(self):
        psi, bases, targets = _problem(14)
        cfg = ReconstructionConfig(iterations=150, restarts=4, seed=5)
        _, serial, _ = multi_restart(targets, bases, cfg, true_state=psi)
        _, parallel, _ = multi_restart(targets, bases, cfg, true_state=psi, workers=2)
        for a, b in zip(serial, parallel):
            assert a.epsilon == b.epsilon
            assert a.fidelity == b.fidelity

    def test_band_stats_structure(self):
        psi, bases, targets = _problem(15)
        cfg = ReconstructionConfig(iterations=200, restarts=5, seed=2)
        _, _, stats = multi_restart(targets, bases, cfg, true_state=psi)
        assert set(stats.bands) == {"eps<1e-05", "1e-02<eps<1e-01"}
        assert stats.epsilon_mean >= 0.0


class TestResultSerialization:
    def test_payload_shape(self):
        _, bases, targets = _problem(16)
        cfg = ReconstructionConfig(iterations=100, seed=1)
        res = anneal(targets, bases, cfg)
        payload = result_to_dict(res, cfg)
        assert set(payload) == {"epsilon", "fidelity", "state", "trace", "config"}
        assert payload["trace"][0][0] == 0
