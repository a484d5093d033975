"""Reconstruction by Metropolis annealing on the probability-distance objective.

The objective is the sum over measured bases of the Euclidean distance
between target and candidate outcome distributions.  Amplitudes come
directly from the first-basis distribution (square roots), so the search
runs over the support phases; dense mode additionally proposes amplitude
moves for targets whose first-basis distribution is biased (noise studies).

Each restart is a Metropolis chain with geometric cooling and annealed
single-coordinate phase moves, followed by a zero-temperature polish:
coordinate scans with shrinking windows, then a snap onto the candidate
decimal grid with a greedy neighbourhood pass.  The polish is plain greedy
descent, i.e. the zero-temperature limit of the same chain; it decides
whether the basin the chain settled in actually reaches the target.

For qubit-local and plain-Hadamard bases the distance is evaluated in
Walsh-Hadamard coefficient space: the characters are orthogonal, so the
Euclidean distance over 2**n outcomes equals, exactly, sqrt(2**n) times the
coefficient distance over the achievable XOR masks plus a constant residue.
That identity keeps 20-qubit sparse reconstruction cheap.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import minimize

from ._numeric import TWO_PI, quantize_phase, quantize_phase_array, walsh_hadamard
from .bases import MeasurementBasis
from .measure import ProbDist, prob_in_basis
from .state import (
    PrecisionSpec,
    PureState,
    SparseSupport,
    _canonical,
    _quantize_moduli,
    default_support_threshold,
    state_to_dict,
    support_of,
)

EPS_STOP = 1e-13

#: Shrinking scan windows (half-width, points) for the zero-temperature polish.
POLISH_WINDOWS = ((math.pi, 64), (0.2, 33), (0.02, 33), (0.002, 33), (2e-4, 33), (2e-5, 33))

_GROUP_MATRIX_CAP = 4_000_000


@dataclass(frozen=True)
class ReconstructionConfig:
    iterations: int = 1500
    restarts: int = 1
    t0: float = 0.1
    cooling: float | None = None       # geometric factor; None derives it from t_final
    phase_step: float = math.pi
    amp_step: float = 0.02
    sparse_mode: bool = True
    precision: PrecisionSpec = field(default_factory=PrecisionSpec)
    seed: int = 0
    bases: str = "two_basis"           # "two_basis" | "three_basis"
    support_threshold: float | None = None
    t_final: float = 1e-6
    checkpoint_every: int | None = None
    polish: bool = True

    def __post_init__(self):
        if self.iterations < 1 or self.restarts < 1:
            raise ValueError("iterations and restarts must be positive")
        if self.t0 <= 0.0:
            raise ValueError("t0 must be positive")
        if self.cooling is not None and not 0.0 < self.cooling < 1.0:
            raise ValueError("cooling factor must lie in (0, 1)")
        if self.phase_step < 0.0 or self.amp_step < 0.0:
            raise ValueError("step widths must be non-negative")
        if self.bases not in ("two_basis", "three_basis"):
            raise ValueError(f"unknown bases mode {self.bases!r}")

    @property
    def basis_count(self) -> int:
        return 2 if self.bases == "two_basis" else 3

    def gamma(self) -> float:
        if self.cooling is not None:
            return self.cooling
        return (self.t_final / self.t0) ** (1.0 / self.iterations)

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations, "restarts": self.restarts, "t0": self.t0,
            "cooling": self.gamma(), "phase_step": self.phase_step, "amp_step": self.amp_step,
            "sparse_mode": self.sparse_mode, "precision": self.precision.to_dict(),
            "seed": self.seed, "bases": self.bases, "polish": self.polish,
        }


@dataclass
class ReconstructionResult:
    state: PureState
    epsilon: float
    trace: list[tuple[int, float]]
    fidelity: float | None = None
    accepted_moves: int = 0
    fidelity_trace: list[tuple[int, float]] | None = None


@dataclass(frozen=True)
class BandStat:
    lo: float
    hi: float
    count: int
    fidelity_mean: float | None
    fidelity_std: float | None


@dataclass(frozen=True)
class RestartStats:
    epsilon_mean: float
    epsilon_std: float
    fidelity_mean: float | None
    fidelity_std: float | None
    bands: dict[str, BandStat]


DEFAULT_BANDS = (("eps<1e-05", 0.0, 1e-5), ("1e-02<eps<1e-01", 1e-2, 1e-1))


def epsilon_prob(target: list[ProbDist], candidate: list[ProbDist]) -> float:
    """Sum over bases of Euclidean distances between distributions."""
    if len(target) != len(candidate) or len(target) not in (2, 3):
        raise ValueError("need matching lists of 2 or 3 distributions")
    total = 0.0
    for t, c in zip(target, candidate):
        if t.dim != c.dim:
            raise ValueError(f"dimension mismatch: {t.dim} vs {c.dim}")
        total += float(np.linalg.norm(t.values - c.values))
    return total


def amplitudes_from_P(P: ProbDist, threshold: float | None = None):
    """Moduli fixed by the first basis: r = sqrt(P) on the support, 0 elsewhere."""
    if threshold is None:
        threshold = default_support_threshold(P)
    sup = support_of(P, threshold)
    r = np.zeros(P.dim)
    idx = np.asarray(sup.indices)
    r[idx] = np.sqrt(P.values[idx])
    return r, sup


def propose(current: PureState, support: SparseSupport, rng, phase_step: float,
            amp_step: float, sparse_mode: bool, precision: PrecisionSpec) -> PureState:
    """One proposal move: a single support phase, plus an optional amplitude move.

    The perturbed phase is snapped back to the candidate decimal grid and the
    reference phase stays zero.  In sparse mode amplitudes are untouched.
    """
    idx = [k for k in support.indices if k != support.reference]
    if not idx:
        return current
    c1p, c2p, n3, _ = precision.side("candidate")
    k = idx[int(rng.integers(len(idx)))]
    r = current.r.copy()
    phi = current.phi.copy()
    phi[k] = quantize_phase(float(phi[k]) + float(rng.uniform(-phase_step, phase_step)), c2p)
    if not sparse_mode and rng.random() < 0.5:
        r[k] = max(0.0, r[k] + float(rng.uniform(-amp_step, amp_step)))
        norm = math.sqrt(float(r @ r))
        if norm == 0.0:
            return current
        r = _quantize_moduli(r / norm, c1p, n3)
        if r[support.reference] == 0.0:
            return current
    return _canonical(r, phi)


def _group_matrix(inv: np.ndarray, groups: int) -> np.ndarray | None:
    if inv.size * max(groups, 1) > _GROUP_MATRIX_CAP:
        return None
    g = np.zeros((inv.size, groups))
    g[np.arange(inv.size), inv] = 1.0
    return g


class _CompEval:
    """Distance to the first-basis target; depends only on the moduli."""

    def __init__(self, target: ProbDist, support: np.ndarray):
        self.p_sup = target.values[support]
        mask = np.ones(target.dim, dtype=bool)
        mask[support] = False
        self.off2 = float(np.sum(target.values[mask] ** 2))
        self.value = 0.0

    def set_amplitudes(self, r: np.ndarray) -> None:
        self.value = math.sqrt(float(np.sum((r * r - self.p_sup) ** 2)) + self.off2)


class _QubitSecondEval:
    """Coefficient-space distance for the local (or plain Hadamard) basis."""

    def __init__(self, target: ProbDist, alpha: np.ndarray, support: np.ndarray, n: int):
        d = 1 << n
        if target.dim != d:
            raise ValueError("target length does not match qubit count")
        bits = (support[:, None] >> np.arange(n)) & 1
        ap = bits.astype(float) @ alpha
        self.s_pos, self.l_pos = np.triu_indices(support.size, 1)
        self.dap = ap[self.s_pos] - ap[self.l_pos]
        masks = support[self.s_pos] ^ support[self.l_pos]
        umasks, self.inv = np.unique(masks, return_inverse=True)
        tq = walsh_hadamard(target.values) / d
        self.t0 = float(tq[0])
        self.tm = tq[umasks]
        known = np.zeros(d, dtype=bool)
        known[umasks] = True
        known[0] = True
        self.residue2 = float(np.sum(tq[~known] ** 2))
        self.d = d
        self.scale = 2.0 / d
        self.group = _group_matrix(self.inv, self.tm.size)
        self.pair_r = np.zeros(self.s_pos.size)
        self.q0 = 0.0

    def set_amplitudes(self, r: np.ndarray) -> None:
        self.pair_r = r[self.s_pos] * r[self.l_pos]
        self.q0 = float(r @ r) / self.d

    def distance(self, phi: np.ndarray) -> float:
        w = self.pair_r * np.cos(phi[self.s_pos] - phi[self.l_pos] - self.dap)
        qm = np.bincount(self.inv, weights=w, minlength=self.tm.size) * self.scale
        dev = qm - self.tm
        return math.sqrt(self.d * ((self.q0 - self.t0) ** 2 + float(dev @ dev) + self.residue2))

    def distance_batch(self, phis: np.ndarray) -> np.ndarray:
        w = self.pair_r * np.cos(phis[:, self.s_pos] - phis[:, self.l_pos] - self.dap)
        if self.group is not None:
            qm = w @ self.group
        else:
            qm = np.stack([np.bincount(self.inv, weights=row, minlength=self.tm.size)
                           for row in w])
        qm *= self.scale
        dev = qm - self.tm
        base = (self.q0 - self.t0) ** 2 + self.residue2
        return np.sqrt(self.d * (base + np.sum(dev * dev, axis=1)))


class _QuditSecondEval:
    """Materialised distance for the Fourier-plus-phase basis (moderate dimensions)."""

    def __init__(self, target: ProbDist, theta: np.ndarray, support: np.ndarray, d: int):
        if target.dim != d:
            raise ValueError("target length does not match dimension")
        self.target = target.values
        self.theta_v = theta[support]
        self.s_pos, self.l_pos = np.triu_indices(support.size, 1)
        gaps = support[self.l_pos] - support[self.s_pos]
        self.ugaps, self.inv = np.unique(gaps, return_inverse=True)
        ang = (TWO_PI / d) * np.outer(np.arange(d), self.ugaps)
        self.cos_t = np.cos(ang)
        self.sin_t = np.sin(ang)
        self.d = d
        self.group = _group_matrix(self.inv, self.ugaps.size)
        self.pair_r = np.zeros(self.s_pos.size)
        self.norm = 0.0

    def set_amplitudes(self, r: np.ndarray) -> None:
        self.pair_r = r[self.s_pos] * r[self.l_pos]
        self.norm = float(r @ r)

    def distance(self, phi: np.ndarray) -> float:
        beta = phi - self.theta_v
        db = beta[self.s_pos] - beta[self.l_pos]
        cr = np.bincount(self.inv, weights=self.pair_r * np.cos(db), minlength=self.ugaps.size)
        ci = np.bincount(self.inv, weights=self.pair_r * np.sin(db), minlength=self.ugaps.size)
        q = self.norm / self.d + (2.0 / self.d) * (self.cos_t @ cr - self.sin_t @ ci)
        return float(np.linalg.norm(q - self.target))

    def distance_batch(self, phis: np.ndarray) -> np.ndarray:
        beta = phis - self.theta_v
        db = beta[:, self.s_pos] - beta[:, self.l_pos]
        wc = self.pair_r * np.cos(db)
        ws = self.pair_r * np.sin(db)
        if self.group is not None:
            cr, ci = wc @ self.group, ws @ self.group
        else:
            cr = np.stack([np.bincount(self.inv, weights=row, minlength=self.ugaps.size)
                           for row in wc])
            ci = np.stack([np.bincount(self.inv, weights=row, minlength=self.ugaps.size)
                           for row in ws])
        q = self.norm / self.d + (2.0 / self.d) * (cr @ self.cos_t.T - ci @ self.sin_t.T)
        return np.linalg.norm(q - self.target, axis=1)


def _make_evaluator(basis: MeasurementBasis, target: ProbDist, support: np.ndarray,
                    xp: int):
    if basis.kind == "qubit_local_phase":
        alpha = basis.angles.rounded(xp).angles
        return _QubitSecondEval(target, alpha, support, basis.dim.bit_length() - 1)
    if basis.kind == "plain_hadamard":
        n = basis.dim.bit_length() - 1
        return _QubitSecondEval(target, np.zeros(n), support, n)
    if basis.kind == "qudit_fourier_phase":
        theta = basis.angles.rounded(xp).angles
        return _QuditSecondEval(target, theta, support, basis.dim)
    raise ValueError(f"unsupported secondary basis kind {basis.kind!r}")


class _Engine:
    """Precomputed annealing machinery shared by all restarts of one problem."""

    def __init__(self, targets: list[ProbDist], bases: list[MeasurementBasis],
                 config: ReconstructionConfig):
        if len(targets) != len(bases):
            raise ValueError("targets and bases must align")
        if len(targets) != config.basis_count:
            raise ValueError(f"config expects {config.basis_count} bases, got {len(targets)}")
        if bases[0].kind != "computational" or targets[0].basis != "computational":
            raise ValueError("first target must be the computational-basis distribution")
        dims = {t.dim for t in targets} | {b.dim for b in bases}
        if len(dims) != 1:
            raise ValueError(f"inconsistent dimensions {sorted(dims)}")
        self.config = config
        self.dim = targets[0].dim
        threshold = config.support_threshold
        if threshold is None:
            threshold = default_support_threshold(targets[0])
        r_full, self.support = amplitudes_from_P(targets[0], threshold)
        self.v = np.asarray(self.support.indices)
        self.r0 = r_full[self.v]
        self.pos_g = int(np.flatnonzero(self.v == self.support.reference)[0])
        self.comp = _CompEval(targets[0], self.v)
        self.evals = [_make_evaluator(b, t, self.v, config.precision.xp)
                      for b, t in zip(bases[1:], targets[1:])]
        self.free = np.array([i for i in range(self.v.size) if i != self.pos_g])
        _, self.c2p, self.n3, _ = config.precision.side("candidate")
        self.c1p = config.precision.c1p
        self.step_floor = 2.0 * 10.0 ** (-self.c2p)

    def _epsilon(self, phi: np.ndarray) -> float:
        return self.comp.value + sum(e.distance(phi) for e in self.evals)

    def _epsilon_batch(self, phis: np.ndarray) -> np.ndarray:
        out = np.full(phis.shape[0], self.comp.value)
        for e in self.evals:
            out += e.distance_batch(phis)
        return out

    def _set_amplitudes(self, r: np.ndarray) -> None:
        self.comp.set_amplitudes(r)
        for e in self.evals:
            e.set_amplitudes(r)

    def _scan_ladder(self, phi: np.ndarray, eps: float) -> float:
        for window, points in POLISH_WINDOWS:
            for _ in range(12):
                improved = False
                for pos in self.free:
                    cands = phi[pos] + np.linspace(-window, window, points)
                    batch = np.repeat(phi[None, :], points, axis=0)
                    batch[:, pos] = cands
                    vals = self._epsilon_batch(batch)
                    j = int(vals.argmin())
                    if vals[j] < eps - 1e-16:
                        phi[pos] = cands[j]
                        eps = float(vals[j])
                        improved = True
                if not improved:
                    break
            if eps < EPS_STOP:
                break
        return eps

    def _polish(self, phi: np.ndarray, eps: float) -> float:
        """Greedy descent (zero-temperature limit): coordinate scans, then a
        deterministic direction-set refinement for the coupled tail."""
        for _ in range(4):
            before = eps
            eps = self._scan_ladder(phi, eps)
            if eps < EPS_STOP or eps > before - 1e-15:
                break
        if eps >= EPS_STOP and self.free.size:
            free = self.free

            def objective(x):
                trial = phi.copy()
                trial[free] = x
                return self._epsilon(trial)

            res = minimize(objective, phi[free], method="Powell",
                           options={"xtol": 1e-12, "ftol": 1e-14,
                                    "maxfev": 400 * free.size})
            if res.fun < eps:
                phi[free] = res.x
                eps = float(res.fun)
        return eps

    def _snap_to_grid(self, phi: np.ndarray) -> float:
        """Quantize phases to the candidate grid, then greedy neighbourhood moves."""
        for pos in range(phi.size):
            phi[pos] = quantize_phase(float(phi[pos]), self.c2p)
        phi[self.pos_g] = 0.0
        eps = self._epsilon(phi)
        h = 10.0 ** (-self.c2p)
        offsets = (-2.5 * h, -1.5 * h, -0.6 * h, 0.6 * h, 1.5 * h, 2.5 * h)
        for _ in range(10):
            improved = False
            for pos in self.free:
                cands = {quantize_phase(float(phi[pos]) + o, self.c2p) for o in offsets}
                cands.discard(float(phi[pos]))
                if not cands:
                    continue
                arr = np.array(sorted(cands))
                batch = np.repeat(phi[None, :], arr.size, axis=0)
                batch[:, pos] = arr
                vals = self._epsilon_batch(batch)
                j = int(vals.argmin())
                if vals[j] < eps - 1e-16:
                    phi[pos] = arr[j]
                    eps = float(vals[j])
                    improved = True
            if not improved:
                break
        return eps

    def _embed(self, r: np.ndarray, phi: np.ndarray) -> PureState:
        r_full = np.zeros(self.dim)
        phi_full = np.zeros(self.dim)
        r_full[self.v] = r
        phi_full[self.v] = phi
        return _canonical(r_full, phi_full)

    def _true_view(self, true_state: PureState):
        """Support-restricted amplitudes of the reference state, computed once."""
        amps = true_state.r[self.v] * np.exp(1j * true_state.phi[self.v])
        return amps, true_state.norm_squared()

    @staticmethod
    def _fidelity_view(view, r: np.ndarray, phi: np.ndarray) -> float:
        true_v, true_norm = view
        overlap = np.vdot(true_v, r * np.exp(1j * phi))
        return float(abs(overlap) ** 2 / (true_norm * float(r @ r)))

    def run(self, seed: int, true_state: PureState | None = None) -> ReconstructionResult:
        cfg = self.config
        rng = np.random.default_rng(seed)
        r = self.r0.copy()
        phi = quantize_phase_array(rng.uniform(0.0, TWO_PI, self.v.size), self.c2p)
        phi[self.pos_g] = 0.0
        self._set_amplitudes(r)
        eps = self._epsilon(phi)
        best_eps, best_r, best_phi = eps, r.copy(), phi.copy()
        cadence = cfg.checkpoint_every or max(1, cfg.iterations // 300)
        trace = [(0, best_eps)]
        fid_trace = None
        true_view = None
        if true_state is not None:
            true_view = self._true_view(true_state)
            fid_trace = [(0, self._fidelity_view(true_view, best_r, best_phi))]
        accepted = 0
        gamma = cfg.gamma()
        temperature = cfg.t0
        dense = not cfg.sparse_mode
        last_iter = 0
        if self.free.size:
            for it in range(1, cfg.iterations + 1):
                last_iter = it
                temperature *= gamma
                step = max(cfg.phase_step * temperature / cfg.t0, self.step_floor)
                pos = int(self.free[rng.integers(self.free.size)])
                old_phi = phi[pos]
                phi[pos] = quantize_phase(old_phi + float(rng.uniform(-step, step)), self.c2p)
                old_r = None
                if dense and rng.random() < 0.5:
                    trial_r = r.copy()
                    trial_r[pos] = max(0.0, trial_r[pos]
                                       + float(rng.uniform(-cfg.amp_step, cfg.amp_step)))
                    norm = math.sqrt(float(trial_r @ trial_r))
                    if norm > 0.0:
                        trial_r = _quantize_moduli(trial_r / norm, self.c1p, self.n3)
                        if trial_r[self.pos_g] > 0.0:
                            old_r = r
                            r = trial_r
                            self._set_amplitudes(r)
                new_eps = self._epsilon(phi)
                delta = new_eps - eps
                if delta < 0.0 or rng.random() < math.exp(-delta / temperature):
                    eps = new_eps
                    accepted += 1
                    if eps < best_eps:
                        best_eps, best_r, best_phi = eps, r.copy(), phi.copy()
                else:
                    phi[pos] = old_phi
                    if old_r is not None:
                        r = old_r
                        self._set_amplitudes(r)
                if it % cadence == 0:
                    trace.append((it, best_eps))
                    if fid_trace is not None:
                        fid_trace.append((it, self._fidelity_view(true_view, best_r, best_phi)))
                if best_eps < EPS_STOP:
                    break
            if cfg.polish and best_eps >= EPS_STOP:
                self._set_amplitudes(best_r)
                polish_phi = best_phi.copy()
                polish_eps = self._polish(polish_phi, best_eps)
                polish_eps = self._snap_to_grid(polish_phi)
                if polish_eps < best_eps:
                    best_eps, best_phi = polish_eps, polish_phi
                r = best_r
                trace.append((last_iter, best_eps))
                if fid_trace is not None:
                    fid_trace.append((last_iter, self._fidelity_view(true_view, best_r, best_phi)))
        state = self._embed(best_r, best_phi)
        fid = None
        if true_state is not None:
            fid = self._fidelity_view(true_view, best_r, best_phi)
        return ReconstructionResult(state=state, epsilon=best_eps, trace=trace,
                                    fidelity=fid, accepted_moves=accepted,
                                    fidelity_trace=fid_trace)


def anneal(targets: list[ProbDist], bases: list[MeasurementBasis],
           config: ReconstructionConfig, true_state: PureState | None = None) -> ReconstructionResult:
    """One annealing run; deterministic per config.seed."""
    return _Engine(targets, bases, config).run(config.seed, true_state)


def derive_seed(root: int, *indices: int) -> int:
    """Documented seed derivation: SeedSequence over (root, *indices)."""
    return int(np.random.SeedSequence([root, *indices]).generate_state(1, np.uint64)[0])


def _restart_worker(payload):
    targets, bases, config, true_state, seeds = payload
    engine = _Engine(targets, bases, config)
    return [(idx, engine.run(seed, true_state)) for idx, seed in seeds]


def compute_band_stats(epsilons, fidelities, bands=DEFAULT_BANDS) -> dict[str, BandStat]:
    eps = np.asarray(epsilons, dtype=float)
    fids = None if fidelities is None else np.asarray(fidelities, dtype=float)
    out = {}
    for label, lo, hi in bands:
        mask = (eps > lo) & (eps < hi) if lo > 0.0 else eps < hi
        count = int(mask.sum())
        fm = fs = None
        if fids is not None and count:
            fm, fs = float(fids[mask].mean()), float(fids[mask].std())
        out[label] = BandStat(lo=lo, hi=hi, count=count, fidelity_mean=fm, fidelity_std=fs)
    return out


def multi_restart(targets: list[ProbDist], bases: list[MeasurementBasis],
                  config: ReconstructionConfig, true_state: PureState | None = None,
                  workers: int = 1, bands=DEFAULT_BANDS):
    """Independent annealing restarts with derived seeds.

    Returns (best result, all results in trial order, aggregate statistics).
    Trials are independent, so the worker count changes nothing but wall time.
    """
    seeds = [(t, derive_seed(config.seed, t)) for t in range(config.restarts)]
    results: list[ReconstructionResult | None] = [None] * config.restarts
    if workers > 1 and config.restarts > 1:
        chunks = [seeds[i::workers] for i in range(workers)]
        payloads = [(targets, bases, config, true_state, chunk)
                    for chunk in chunks if chunk]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for chunk_result in pool.map(_restart_worker, payloads):
                for idx, res in chunk_result:
                    results[idx] = res
    else:
        engine = _Engine(targets, bases, config)
        for idx, seed in seeds:
            results[idx] = engine.run(seed, true_state)
    best_idx = min(range(len(results)), key=lambda i: (results[i].epsilon, i))
    eps = [res.epsilon for res in results]
    fids = None
    if true_state is not None:
        fids = [res.fidelity for res in results]
    stats = RestartStats(
        epsilon_mean=float(np.mean(eps)),
        epsilon_std=float(np.std(eps)),
        fidelity_mean=None if fids is None else float(np.mean(fids)),
        fidelity_std=None if fids is None else float(np.std(fids)),
        bands=compute_band_stats(eps, fids, bands),
    )
    return results[best_idx], results, stats


def candidate_distributions(state: PureState, bases: list[MeasurementBasis],
                            xp: int | None = None) -> list[ProbDist]:
    """Distributions of a candidate state under the given bases (candidate-side angles)."""
    out = []
    for basis in bases:
        if basis.angles is not None and xp is not None:
            basis = MeasurementBasis(kind=basis.kind, dim=basis.dim,
                                     angles=basis.angles.rounded(xp))
        out.append(prob_in_basis(state, basis))
    return out


def result_to_dict(result: ReconstructionResult, config: ReconstructionConfig) -> dict:
    return {
        "epsilon": result.epsilon,
        "fidelity": result.fidelity,
        "state": state_to_dict(result.state),
        "trace": [[it, eps] for it, eps in result.trace],
        "config": config.to_dict(),
    }


def save_result(result: ReconstructionResult, config: ReconstructionConfig, path) -> None:
    Path(path).write_text(json.dumps(result_to_dict(result, config), indent=2))
