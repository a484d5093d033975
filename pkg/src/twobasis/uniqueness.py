"""Empirical certification of uniqueness claims.

Four tools: the outcome-difference decomposition over support pairs (whose
reassembly must match the direct probability difference), brute-force
enumeration of phase assignments matching a target distribution pair, the
twin construction that defeats two local bases on two-component states, and
the zero-phase certificate from the plain-Hadamard basis.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._numeric import TWO_PI, mod_2pi, phase_on_grid
from .bases import QUBIT_LOCAL, QUDIT, AngleSet
from .measure import ProbDist
from .state import PureState, _canonical, from_polar, state_to_dict, support_of

ENUM_BUDGET = 100_000_000
PAIR_GROUP_TOL = 1e-9


@dataclass(frozen=True)
class DeltaDecomposition:
    """Pairwise cosine/sine coefficients of an outcome-probability difference."""

    j: int
    mode: str
    pairs: tuple[tuple[int, int], ...]
    c_coeffs: np.ndarray
    s_coeffs: np.ndarray
    basis_deltas: np.ndarray           # relative basis phase of each pair
    merged: tuple[tuple[float, float, float], ...]  # (|delta|, f1, f2)

    def reassemble(self) -> float:
        return float(np.sum(self.c_coeffs * np.cos(self.basis_deltas)
                            + self.s_coeffs * np.sin(self.basis_deltas)))

    def reassemble_merged(self) -> float:
        return float(sum(f1 * math.cos(delta) + f2 * math.sin(delta)
                         for delta, f1, f2 in self.merged))


def _merge_by_delta(deltas: np.ndarray, c: np.ndarray, s: np.ndarray):
    """Group pair terms whose basis phases agree up to sign.

    cos is even and sin odd, so a pair at -delta folds onto +delta with its
    sine coefficient negated; the grouped form reassembles exactly.
    """
    keys = np.abs(deltas)
    signs = np.where(deltas < 0.0, -1.0, 1.0)
    order = np.argsort(keys, kind="stable")
    merged = []
    i = 0
    while i < order.size:
        block = [order[i]]
        while i + 1 < order.size and keys[order[i + 1]] - keys[block[0]] <= PAIR_GROUP_TOL:
            i += 1
            block.append(order[i])
        idx = np.asarray(block)
        merged.append((float(keys[idx[0]]),
                       float(np.sum(c[idx])),
                       float(np.sum(s[idx] * signs[idx]))))
        i += 1
    return tuple(merged)


def delta_q_decompose(psi: PureState, psi_prime: PureState, angles: AngleSet,
                      j: int) -> DeltaDecomposition:
    """Coefficients of Q_j(psi) - Q_j(psi') on the equal-amplitude manifold."""
    if psi.dim != psi_prime.dim:
        raise ValueError("dimension mismatch")
    if np.max(np.abs(psi.r - psi_prime.r)) > 1e-10:
        raise ValueError("amplitude profiles differ; decomposition needs equal moduli")
    d = psi.dim
    if not 0 <= j < d:
        raise ValueError(f"outcome {j} out of range")
    support = psi.support()
    s_pos, l_pos = np.triu_indices(support.size, 1)
    s_idx, l_idx = support[s_pos], support[l_pos]
    rr = psi.r[s_idx] * psi.r[l_idx]
    dphi = psi.phi[s_idx] - psi.phi[l_idx]
    dphi_p = psi_prime.phi[s_idx] - psi_prime.phi[l_idx]
    if angles.mode == QUDIT:
        if len(angles) != d:
            raise ValueError("angle count does not match dimension")
        offs = TWO_PI * j * (s_idx - l_idx) / d
        c = (2.0 / d) * rr * (np.cos(dphi - offs) - np.cos(dphi_p - offs))
        s = (2.0 / d) * rr * (np.sin(dphi - offs) - np.sin(dphi_p - offs))
        deltas = angles.angles[s_idx] - angles.angles[l_idx]
    else:
        n = psi.qubit_count
        if n is None or len(angles) != n:
            raise ValueError("angle count does not match qubit count")
        bits_s = (s_idx[:, None] >> np.arange(n)) & 1
        bits_l = (l_idx[:, None] >> np.arange(n)) & 1
        ap_s = bits_s.astype(float) @ angles.angles
        ap_l = bits_l.astype(float) @ angles.angles
        parity = np.array([bin(int(j) & int(m)).count("1") & 1 for m in (s_idx ^ l_idx)])
        sign = np.where(parity, -1.0, 1.0)
        c = (2.0 / d) * sign * rr * (np.cos(dphi) - np.cos(dphi_p))
        s = (2.0 / d) * sign * rr * (np.sin(dphi) - np.sin(dphi_p))
        deltas = ap_s - ap_l
    return DeltaDecomposition(
        j=j, mode=angles.mode,
        pairs=tuple((int(a), int(b)) for a, b in zip(s_idx, l_idx)),
        c_coeffs=c, s_coeffs=s, basis_deltas=deltas,
        merged=_merge_by_delta(deltas, c, s))


def _pair_expansion(r: np.ndarray, support: np.ndarray, angles: AngleSet, d: int):
    """Per-(pair, outcome) gain K and offset O with Q'_j = base_j + sum K*cos(dphi - O)."""
    s_pos, l_pos = np.triu_indices(support.size, 1)
    s_idx, l_idx = support[s_pos], support[l_pos]
    rr = r[s_idx] * r[l_idx]
    outcomes = np.arange(d)
    if angles.mode == QUDIT:
        gain = np.repeat((2.0 / d) * rr[:, None], d, axis=1)
        offs = ((angles.angles[s_idx] - angles.angles[l_idx])[:, None]
                + TWO_PI * np.outer(s_idx - l_idx, outcomes) / d)
    else:
        n = d.bit_length() - 1
        bits = (support[:, None] >> np.arange(n)) & 1
        ap = bits.astype(float) @ angles.angles
        masks = s_idx ^ l_idx
        parity = (np.bitwise_count(np.bitwise_and(masks[:, None], outcomes[None, :])) & 1)
        gain = (2.0 / d) * rr[:, None] * np.where(parity, -1.0, 1.0)
        offs = np.repeat((ap[s_pos] - ap[l_pos])[:, None], d, axis=1)
    return s_pos, l_pos, gain, offs


def exhaustive_match(P: ProbDist, Q: ProbDist, angles: AngleSet, grid: int,
                     tol: float) -> list[PureState]:
    """Every phase assignment on the uniform grid whose second-basis distance is <= tol.

    Moduli are fixed to sqrt(P); the reference phase is zero, the remaining
    support phases range over {2*pi*t/grid}.  Exact enumeration, so it is its
    own oracle for desk-scale uniqueness checks.
    """
    if grid < 1 or grid > 720:
        raise ValueError("grid must lie in 1..720")
    if P.dim != Q.dim:
        raise ValueError("distribution dimensions differ")
    d = P.dim
    sup = support_of(P, 1e-9)
    v = np.asarray(sup.indices)
    free = v[v != sup.reference]
    n_free = free.size
    total = grid ** n_free
    if total > ENUM_BUDGET:
        raise ValueError(f"enumeration budget exceeded: {grid}**{n_free} > {ENUM_BUDGET}")
    r = np.zeros(d)
    r[v] = np.sqrt(P.values[v])
    if angles.mode == QUDIT and len(angles) != d:
        raise ValueError("angle count does not match dimension")
    s_pos, l_pos, gain, offs = _pair_expansion(r, v, angles, d)
    base = float(r @ r) / d
    grid_phases = TWO_PI * np.arange(grid) / grid

    pos_of = {int(k): i for i, k in enumerate(v)}
    free_pos = np.array([pos_of[int(k)] for k in free], dtype=int)
    matches: list[PureState] = []
    # chunk over the leading free phase to bound memory at (total/grid) x d
    lead = grid if n_free >= 1 else 1
    rest = total // lead
    for lead_idx in range(lead):
        phases = np.zeros((rest, v.size))
        if n_free:
            phases[:, free_pos[0]] = grid_phases[lead_idx]
            if n_free > 1:
                tail = np.unravel_index(np.arange(rest), (grid,) * (n_free - 1))
                for col, t in enumerate(tail):
                    phases[:, free_pos[col + 1]] = grid_phases[t]
        dphi = phases[:, s_pos] - phases[:, l_pos]
        acc = np.full((rest, d), base)
        for p in range(s_pos.size):
            acc += gain[p][None, :] * np.cos(dphi[:, p][:, None] - offs[p][None, :])
        dist2 = np.sum((acc - Q.values[None, :]) ** 2, axis=1)
        for h in np.flatnonzero(dist2 <= tol * tol):
            full_phi = np.zeros(d)
            full_phi[v] = phases[h]
            matches.append(from_polar(r, full_phi))
        if n_free == 0:
            break
    return matches


def reflection_twin(psi: PureState, angles: AngleSet) -> PureState:
    """The mirror state phi'_k = -phi_k + 2*alpha'_k (gauged at the reference).

    Under two local bases this state reproduces both outcome distributions of
    ``psi`` exactly, for any support: the rotated-frame relative phases flip
    sign, and the closed form only sees their cosines.  Its phases involve
    doubled basis angles, so it generally lies outside the decimal-grid
    family; it coincides with the GHZ twin on two-component states.
    """
    if angles.mode != QUBIT_LOCAL:
        raise ValueError("reflection twin needs a qubit-local angle set")
    n = psi.qubit_count
    if n is None or len(angles) != n:
        raise ValueError("angle count does not match qubit count")
    support = psi.support()
    bits = (support[:, None] >> np.arange(n)) & 1
    ap = bits.astype(float) @ angles.angles
    phi = np.zeros(psi.dim)
    phi[support] = -psi.phi[support] + 2.0 * ap
    return _canonical(psi.r.copy(), phi)


def ghz_twin(psi: PureState, angles: AngleSet) -> PureState:
    """The second state matching both distributions of a two-component state.

    For support {0, d-1} with phase f on the top index, the twin carries
    -f + 2 * sum(alpha) there; it reproduces P and Q exactly yet generally
    lies off the decimal grid.
    """
    if angles.mode != QUBIT_LOCAL:
        raise ValueError("twin construction needs a qubit-local angle set")
    n = psi.qubit_count
    if n is None or len(angles) != n:
        raise ValueError("angle count does not match qubit count")
    d = psi.dim
    support = psi.support()
    if support.size != 2 or support[0] != 0 or support[1] != d - 1:
        raise ValueError("state is not GHZ-like (support must be {0, d-1})")
    phase = float(psi.phi[d - 1])
    twin_phase = mod_2pi(-phase + 2.0 * float(np.sum(angles.angles)))
    phi = np.zeros(d)
    phi[d - 1] = twin_phase
    return _canonical(psi.r.copy(), phi)


def phase_grid_membership(phi: float, decimals: int, norm_exponent: int) -> bool:
    """Whether a phase lies on the decimal (cos, sin) grid at the given tolerance."""
    return phase_on_grid(phi, decimals, 0.5 * 10.0 ** (-norm_exponent))


@dataclass(frozen=True)
class ZeroPhaseCertificate:
    certified: bool
    t0_observed: float
    t0_expected: float
    deficit: float


def certify_zero_phase(P: ProbDist, T: ProbDist, tol: float = 1e-10) -> ZeroPhaseCertificate:
    """Compare the all-zeros Hadamard outcome against its zero-phase ceiling.

    A state whose support phases all vanish saturates
    T_0 = (sum_k sqrt(P_k))**2 / 2**n; any phase structure produces a
    positive deficit.
    """
    if P.dim != T.dim:
        raise ValueError("distribution dimensions differ")
    d = P.dim
    if d & (d - 1):
        raise ValueError("zero-phase certificate needs a power-of-two dimension")
    expected = float(np.sum(np.sqrt(P.values))) ** 2 / d
    observed = float(T.values[0])
    deficit = expected - observed
    return ZeroPhaseCertificate(certified=abs(deficit) <= tol,
                                t0_observed=observed, t0_expected=expected,
                                deficit=deficit)


def witness_report(angles: AngleSet, matches: list[PureState], tol: float,
                   grid: int) -> dict:
    return {
        "angle_set": {"mode": angles.mode, "angles": [float(a) for a in angles.angles]},
        "matches": [state_to_dict(m) for m in matches],
        "tol": tol,
        "grid": grid,
    }


def save_witness_report(report: dict, path) -> None:
    Path(path).write_text(json.dumps(report, indent=2))
