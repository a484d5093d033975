"""Outcome distributions: closed forms, a dense-unitary oracle, noise, sampling.

The two closed forms evaluate second-basis probabilities from the state's
support pairs only:

* qudit basis: pair (s, l) contributes through the index gap l - s, so the
  pair masses are grouped by gap and expanded against a cos/sin table over
  outcomes;
* local qubit basis: pair (s, l) contributes through the XOR mask s ^ l with
  a parity sign over outcomes, so grouped pair masses are expanded by a
  Walsh-Hadamard butterfly.

Both are exact rearrangements of the pair-sum formulas and are verified
against the independent oracle path (dense basis matrix applied to the
amplitude vector).
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from ._numeric import bitflip_mix, walsh_hadamard
from .bases import QUBIT_LOCAL, QUDIT, AngleSet, MeasurementBasis, build_unitary
from .state import PureState

#: Cancellation in the closed forms may leave tiny negative values; anything
#: below this is a bug, anything above is clipped to zero.
NEGATIVE_CLIP = 1e-14

#: Sanity corridor for total mass; quantized states sit near but not at 1.
MASS_SLACK = 0.02


@dataclass(frozen=True)
class NoiseModel:
    kind: str = "none"             # "none" | "depolarizing" | "measurement_bitflip"
    p: float = 0.0

    def __post_init__(self):
        if self.kind not in ("none", "depolarizing", "measurement_bitflip"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"noise rate must lie in [0, 1], got {self.p}")


@dataclass(frozen=True)
class ProbDist:
    values: np.ndarray
    kind: str = "exact"            # "exact" | "sampled"
    shots: int | None = None
    basis: str = "computational"

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1:
            raise ValueError("distribution must be a 1-d vector")
        low = float(vals.min(initial=0.0))
        if low < -NEGATIVE_CLIP:
            raise ValueError(f"negative probability {low:.3e} beyond clipping range")
        if low < 0.0:
            vals = np.where(vals < 0.0, 0.0, vals)
        total = float(vals.sum())
        if abs(total - 1.0) > MASS_SLACK:
            raise ValueError(f"total mass {total!r} too far from 1")
        if self.kind not in ("exact", "sampled"):
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        object.__setattr__(self, "values", vals)
        self.values.flags.writeable = False

    @property
    def dim(self) -> int:
        return self.values.size


def prob_computational(state: PureState) -> ProbDist:
    """First-basis distribution: P_j = r_j**2."""
    return ProbDist(values=state.r ** 2, basis="computational")


def _qudit_gap_coefficients(state: PureState, theta: np.ndarray):
    """Complex pair masses grouped by index gap; gaps and coefficients only for the support."""
    support = state.support()
    if support.size < 2:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=complex)
    z = state.r[support] * np.exp(1j * (state.phi[support] - theta[support]))
    s_pos, l_pos = np.triu_indices(support.size, 1)
    prods = z[s_pos] * np.conj(z[l_pos])
    gaps = support[l_pos] - support[s_pos]
    ugaps, inverse = np.unique(gaps, return_inverse=True)
    coeff = (np.bincount(inverse, weights=prods.real, minlength=ugaps.size)
             + 1j * np.bincount(inverse, weights=prods.imag, minlength=ugaps.size))
    return ugaps, coeff


def prob_qudit_second(state: PureState, angles: AngleSet) -> ProbDist:
    """Closed-form distribution under the qudit Fourier-plus-phase basis."""
    if angles.mode != QUDIT:
        raise ValueError("qudit closed form needs a qudit-mode angle set")
    d = state.dim
    if len(angles) != d:
        raise ValueError(f"angle count {len(angles)} does not match dimension {d}")
    ugaps, coeff = _qudit_gap_coefficients(state, angles.angles)
    q = np.full(d, state.norm_squared() / d)
    if ugaps.size:
        ang = (2.0 * np.pi / d) * np.outer(np.arange(d), ugaps)
        q += (2.0 / d) * (np.cos(ang) @ coeff.real - np.sin(ang) @ coeff.imag)
    return ProbDist(values=q, basis="qudit_fourier_phase")


def _alpha_prime(indices: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    """Accumulated local phase of each computational index: sum of alpha over set bits."""
    bits = (indices[:, None] >> np.arange(alpha.size)) & 1
    return bits.astype(float) @ alpha


def _qubit_mask_coefficients(state: PureState, alpha: np.ndarray) -> np.ndarray:
    """Length-d vector of pair masses grouped by XOR mask (mask 0 unused)."""
    d = state.dim
    support = state.support()
    coeff = np.zeros(d)
    if support.size < 2:
        return coeff
    chi = state.phi[support] - _alpha_prime(support, alpha)
    s_pos, l_pos = np.triu_indices(support.size, 1)
    w = state.r[support][s_pos] * state.r[support][l_pos] * np.cos(chi[s_pos] - chi[l_pos])
    masks = support[s_pos] ^ support[l_pos]
    return np.bincount(masks, weights=w, minlength=d)


def prob_qubit_second(state: PureState, angles: AngleSet) -> ProbDist:
    """Closed-form distribution under the local (phase rotation + Hadamard) basis."""
    if angles.mode != QUBIT_LOCAL:
        raise ValueError("qubit closed form needs a qubit_local-mode angle set")
    n = state.qubit_count
    if n is None:
        raise ValueError(f"dimension {state.dim} is not a power of two")
    if len(angles) != n:
        raise ValueError(f"need {n} local angles, got {len(angles)}")
    d = state.dim
    qcoef = _qubit_mask_coefficients(state, angles.angles) * (2.0 / d)
    qcoef[0] = state.norm_squared() / d
    return ProbDist(values=walsh_hadamard(qcoef), basis="qubit_local_phase")


def prob_plain_hadamard(state: PureState) -> ProbDist:
    """Distribution under the all-Hadamard basis (local basis with zero angles)."""
    n = state.qubit_count
    if n is None:
        raise ValueError(f"dimension {state.dim} is not a power of two")
    d = state.dim
    qcoef = _qubit_mask_coefficients(state, np.zeros(n)) * (2.0 / d)
    qcoef[0] = state.norm_squared() / d
    return ProbDist(values=walsh_hadamard(qcoef), basis="plain_hadamard")


def prob_oracle(state: PureState, basis: MeasurementBasis) -> ProbDist:
    """Independent verification path: p_j = |<j| U^dagger |psi>|^2 with U built densely."""
    if basis.dim != state.dim:
        raise ValueError(f"basis dimension {basis.dim} does not match state dimension {state.dim}")
    u = build_unitary(basis)
    rotated = u.conj().T @ state.amplitudes
    return ProbDist(values=np.abs(rotated) ** 2, basis=basis.kind)


def prob_in_basis(state: PureState, basis: MeasurementBasis) -> ProbDist:
    """Closed-form distribution for any supported basis kind."""
    if basis.kind == "computational":
        return prob_computational(state)
    if basis.kind == "qudit_fourier_phase":
        return prob_qudit_second(state, basis.angles)
    if basis.kind == "qubit_local_phase":
        return prob_qubit_second(state, basis.angles)
    if basis.kind == "plain_hadamard":
        return prob_plain_hadamard(state)
    raise ValueError(f"unknown basis kind {basis.kind!r}")


def apply_depolarizing(dist: ProbDist, p: float, d: int) -> ProbDist:
    """Mix with the uniform distribution: valid in every orthonormal basis."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("depolarizing rate must lie in [0, 1]")
    if d != dist.dim:
        raise ValueError("dimension does not match the distribution")
    return replace(dist, values=(1.0 - p) * dist.values + p / d)


def apply_bitflip(dist: ProbDist, p: float, n: int) -> ProbDist:
    """Independent classical flip of each outcome bit with probability p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("bit-flip rate must lie in [0, 1]")
    if dist.dim != 1 << n:
        raise ValueError(f"distribution length {dist.dim} is not 2**{n}")
    return replace(dist, values=bitflip_mix(dist.values, p))


def apply_noise(dist: ProbDist, noise: NoiseModel) -> ProbDist:
    if noise.kind == "none" or noise.p == 0.0:
        return dist
    if noise.kind == "depolarizing":
        return apply_depolarizing(dist, noise.p, dist.dim)
    n = dist.dim.bit_length() - 1
    return apply_bitflip(dist, noise.p, n)


def sample_shots(dist: ProbDist, shots: int, seed: int) -> ProbDist:
    """Empirical frequencies from multinomial sampling; deterministic per seed."""
    if shots <= 0:
        raise ValueError("need a positive number of shots")
    rng = np.random.default_rng(seed)
    p = dist.values / dist.values.sum()
    counts = rng.multinomial(shots, p)
    return ProbDist(values=counts / shots, kind="sampled", shots=shots, basis=dist.basis)


def save_dist(dist: ProbDist, path, decimals: int = 15, noise: NoiseModel | None = None) -> None:
    """CSV of (outcome, probability) plus a JSON sidecar with the metadata."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["outcome", "probability"])
        for j, p in enumerate(dist.values):
            writer.writerow([j, f"{round(float(p), decimals):.17g}"])
    sidecar = {
        "basis": dist.basis,
        "kind": dist.kind,
        "shots": dist.shots,
        "noise": None if noise is None or noise.kind == "none"
        else {"kind": noise.kind, "p": noise.p},
    }
    path.with_suffix(path.suffix + ".meta.json").write_text(json.dumps(sidecar, indent=2))


def load_dist(path) -> ProbDist:
    path = Path(path)
    values = []
    with path.open() as fh:
        reader = csv.reader(fh)
        next(reader)
        for row in reader:
            values.append(float(row[1]))
    meta_path = path.with_suffix(path.suffix + ".meta.json")
    meta = json.loads(meta_path.read_text()) if meta_path.exists() else {}
    return ProbDist(values=np.asarray(values), kind=meta.get("kind", "exact"),
                    shots=meta.get("shots"), basis=meta.get("basis", "computational"))
