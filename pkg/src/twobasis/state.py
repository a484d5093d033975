"""Pure-state construction, decimal quantization, and state metrics.

States are kept in polar form: non-negative moduli ``r`` and phases ``phi``
in [0, 2*pi), gauged so the phase of the reference index (smallest index
with nonzero modulus) is exactly zero.  The complex amplitude vector is
always ``r * exp(1j * phi)``, so the Cartesian and polar views agree by
construction.

Quantization mimics finite-decimal storage: moduli are rounded to a fixed
number of decimal places and each phase is snapped to the angle of its
rounded (cos, sin) pair.  A quantized state satisfies the loosened
normalisation tolerances carried by :class:`PrecisionSpec` instead of exact
unit norm.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from ._numeric import (
    mod_2pi_array,
    phase_pair,
    quantize_phase_array,
    round_decimal_array,
)

ATOL = 1e-12

#: Support threshold on probabilities for exact distributions.
EXACT_SUPPORT_THRESHOLD = 1e-9


class QuantizationError(ValueError):
    """Rounding could not be reconciled with the normalisation tolerances."""


@dataclass(frozen=True)
class PrecisionSpec:
    """Decimal-place budget for the target side (c1..c3, n1, n2, x, y) and
    the candidate side (primed counterparts)."""

    c1: int = 3
    c2: int = 3
    c3: int = 3
    c1p: int = 3
    c2p: int = 3
    c3p: int = 3
    n1: int = 2
    n2: int = 2
    n3: int = 2
    n4: int = 2
    x: int = 15
    xp: int = 15
    y: int = 15
    yp: int = 15

    def __post_init__(self):
        for name in ("c1", "c2", "c3", "c1p", "c2p", "c3p", "n1", "n2", "n3", "n4", "x", "xp", "y", "yp"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {v!r}")
        if self.c2 != self.c3 or self.c2p != self.c3p:
            raise ValueError("cos/sin decimal places must match (c2 == c3, c2p == c3p)")
        floor = max(self.c1 + self.c2, self.c1p + self.c2p)
        for name in ("x", "xp", "y", "yp"):
            if getattr(self, name) < floor:
                raise ValueError(f"{name} must be >= max(c1+c2, c1p+c2p) = {floor}")

    def side(self, which: str) -> tuple[int, int, int, int]:
        """(amplitude decimals, phase decimals, amp norm exponent, phase norm exponent)."""
        if which == "target":
            return self.c1, self.c2, self.n1, self.n2
        if which == "candidate":
            return self.c1p, self.c2p, self.n3, self.n4
        raise ValueError(f"unknown side {which!r}")

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in (
            "c1", "c2", "c3", "c1p", "c2p", "c3p", "n1", "n2", "n3", "n4", "x", "xp", "y", "yp")}


@dataclass(frozen=True)
class SparseSupport:
    """Indices carrying probability mass, the reference index, and the threshold used."""

    indices: tuple[int, ...]
    reference: int
    threshold: float


@dataclass(frozen=True)
class PureState:
    r: np.ndarray
    phi: np.ndarray
    qubit_count: int | None = None
    quantized: tuple[int, int] | None = None  # (amplitude decimals, phase decimals)

    def __post_init__(self):
        if self.r.shape != self.phi.shape or self.r.ndim != 1:
            raise ValueError("r and phi must be 1-d arrays of equal length")
        self.r.flags.writeable = False
        self.phi.flags.writeable = False

    @property
    def dim(self) -> int:
        return self.r.size

    @property
    def amplitudes(self) -> np.ndarray:
        return self.r * np.exp(1j * self.phi)

    @property
    def reference(self) -> int:
        nz = np.flatnonzero(self.r > 0.0)
        if nz.size == 0:
            raise ValueError("degenerate state: all moduli zero")
        return int(nz[0])

    def support(self) -> np.ndarray:
        return np.flatnonzero(self.r > 0.0)

    def norm_squared(self) -> float:
        return float(self.r @ self.r)


def _qubit_count_of(d: int) -> int | None:
    if d >= 2 and d & (d - 1) == 0:
        return d.bit_length() - 1
    return None


def _canonical(r: np.ndarray, phi: np.ndarray, quantized=None) -> PureState:
    """Reduce phases mod 2*pi, gauge the reference phase to zero, blank dead phases."""
    nz = np.flatnonzero(r > 0.0)
    if nz.size == 0:
        raise ValueError("degenerate state: all moduli zero")
    g = int(nz[0])
    phi = mod_2pi_array(phi - phi[g])
    phi[r == 0.0] = 0.0
    phi[g] = 0.0
    return PureState(r=r, phi=phi, qubit_count=_qubit_count_of(r.size), quantized=quantized)


def from_polar(r, phi) -> PureState:
    """Build a normalized state from moduli and phases.

    The moduli are scaled to unit norm and the global phase is removed so
    the reference index carries phase zero.
    """
    r = np.asarray(r, dtype=float).copy()
    phi = np.asarray(phi, dtype=float).copy()
    if r.shape != phi.shape or r.ndim != 1:
        raise ValueError("r and phi must be 1-d arrays of equal length")
    if not np.all(np.isfinite(r)) or not np.all(np.isfinite(phi)):
        raise ValueError("non-finite entries in r or phi")
    if np.any(r < 0.0):
        raise ValueError("moduli must be non-negative")
    norm = math.sqrt(float(r @ r))
    if norm == 0.0:
        raise ValueError("degenerate state: zero vector")
    return _canonical(r / norm, phi)


def from_amplitudes(amplitudes, normalize: bool = False) -> PureState:
    """Build a state from a complex vector; keeps its norm unless asked to normalize."""
    vec = np.asarray(amplitudes, dtype=complex)
    if vec.ndim != 1:
        raise ValueError("amplitude vector must be 1-d")
    r = np.abs(vec)
    if normalize:
        norm = math.sqrt(float(r @ r))
        if norm == 0.0:
            raise ValueError("degenerate state: zero vector")
        r = r / norm
    phi = np.where(r > 0.0, np.angle(vec), 0.0)
    return _canonical(r, mod_2pi_array(phi))


def random_state(d: int, seed: int, spec: PrecisionSpec | None = None) -> PureState:
    """A Haar-like random state: i.i.d. standard complex normal amplitudes, normalized.

    With a :class:`PrecisionSpec` the state is quantized on the target side,
    which is the "algebraic state" regime used throughout the experiments.
    """
    if d < 2:
        raise ValueError("dimension must be at least 2")
    rng = np.random.default_rng(seed)
    vec = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    state = from_amplitudes(vec, normalize=True)
    if spec is not None:
        state = quantize(state, spec, side="target")
    return state


def w_like(n: int, r, phi) -> PureState:
    """State supported on the n one-hot indices 2**(j-1), j = 1..n."""
    if n < 2:
        raise ValueError("need at least 2 qubits")
    r = np.asarray(r, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if r.shape != (n,) or phi.shape != (n,):
        raise ValueError(f"need {n} weights and {n} phases")
    full_r = np.zeros(1 << n)
    full_phi = np.zeros(1 << n)
    for j in range(n):
        full_r[1 << j] = r[j]
        full_phi[1 << j] = phi[j]
    return from_polar(full_r, full_phi)


def ghz_like(n: int, r0: float, r1: float, phi: float) -> PureState:
    """State supported on the all-zeros and all-ones indices, phase on the latter."""
    if n < 2:
        raise ValueError("need at least 2 qubits")
    d = 1 << n
    full_r = np.zeros(d)
    full_phi = np.zeros(d)
    full_r[0], full_r[d - 1] = r0, r1
    full_phi[d - 1] = phi
    return from_polar(full_r, full_phi)


def _quantize_moduli(r: np.ndarray, decimals: int, norm_exponent: int) -> np.ndarray:
    tol = 0.5 * 10.0 ** (-norm_exponent)
    rq = round_decimal_array(r, decimals)
    if abs(float(rq @ rq) - 1.0) < tol:
        return rq
    # one repair pass: renormalise the rounded moduli in full precision, re-round
    norm = math.sqrt(float(rq @ rq))
    if norm == 0.0:
        raise QuantizationError("all moduli rounded to zero")
    rq = round_decimal_array(rq / norm, decimals)
    if abs(float(rq @ rq) - 1.0) < tol:
        return rq
    raise QuantizationError(
        f"amplitude normalisation unreachable at {decimals} decimals "
        f"(|sum r^2 - 1| = {abs(float(rq @ rq) - 1.0):.3e}, tol {tol:.3e})")


def _quantize_phase_checked(phi: float, decimals: int, norm_exponent: int) -> float:
    tol = 0.5 * 10.0 ** (-norm_exponent)
    c, s = phase_pair(phi, decimals)
    if abs(c * c + s * s - 1.0) >= tol:
        # repair: project the rounded pair back to the circle and re-round once
        rho = math.hypot(c, s)
        if rho == 0.0:
            raise QuantizationError(f"phase {phi!r} collapses to origin at {decimals} decimals")
        c, s = phase_pair(math.atan2(s / rho, c / rho), decimals)
        if abs(c * c + s * s - 1.0) >= tol:
            raise QuantizationError(
                f"phase normalisation unreachable at {decimals} decimals for phi={phi!r}")
    out = math.atan2(s, c)
    return out + 2.0 * math.pi if out < 0.0 else out


def quantize(state: PureState, spec: PrecisionSpec, side: str = "target") -> PureState:
    """Round a state onto the finite-decimal grid for the given side.

    Moduli go to ``c1`` (or ``c1'``) decimals and each phase to the angle of
    its rounded (cos, sin) pair.  The result must satisfy the loosened
    amplitude and phase normalisation tolerances; a single
    renormalise-and-re-round pass is attempted before failing.
    """
    c_amp, c_ph, n_amp, n_ph = spec.side(side)
    if state.quantized == (c_amp, c_ph):
        return state
    rq = _quantize_moduli(state.r, c_amp, n_amp)
    nz = np.flatnonzero(rq > 0.0)
    if nz.size == 0:
        raise QuantizationError("quantization removed the whole support")
    g = int(nz[0])
    # rounding can kill the old reference index; re-gauge before snapping phases
    phi = mod_2pi_array(state.phi - state.phi[g])
    phi_q = np.zeros_like(phi)
    for k in nz:
        phi_q[k] = _quantize_phase_checked(float(phi[k]), c_ph, n_ph)
    phi_q[g] = 0.0
    return PureState(r=rq, phi=phi_q, qubit_count=_qubit_count_of(rq.size),
                     quantized=(c_amp, c_ph))


def fidelity(psi: PureState, phi: PureState) -> float:
    """|<psi|phi>|^2 with both vectors normalized; global-phase invariant."""
    if psi.dim != phi.dim:
        raise ValueError(f"dimension mismatch: {psi.dim} vs {phi.dim}")
    overlap = np.vdot(psi.amplitudes, phi.amplitudes)
    denom = psi.norm_squared() * phi.norm_squared()
    return float(abs(overlap) ** 2 / denom)


def support_of(P, threshold: float) -> SparseSupport:
    """Indices with probability mass at or above ``threshold``."""
    if threshold < 0.0:
        raise ValueError("threshold must be non-negative")
    values = np.asarray(getattr(P, "values", P), dtype=float)
    idx = np.flatnonzero(values >= threshold)
    if idx.size == 0:
        raise ValueError("empty support: no outcome reaches the threshold")
    return SparseSupport(indices=tuple(int(i) for i in idx),
                         reference=int(idx[0]), threshold=float(threshold))


def default_support_threshold(P) -> float:
    """1e-9 for exact distributions, 3/sqrt(shots) for sampled ones."""
    kind = getattr(P, "kind", "exact")
    shots = getattr(P, "shots", None)
    if kind == "sampled" and shots:
        return 3.0 / math.sqrt(shots)
    return EXACT_SUPPORT_THRESHOLD


def state_to_dict(state: PureState) -> dict:
    amps = state.amplitudes
    payload = {
        "dim": state.dim,
        "amplitudes": [[float(a.real), float(a.imag)] for a in amps],
    }
    if state.quantized is not None:
        payload["precision"] = {"amplitude_decimals": state.quantized[0],
                                "phase_decimals": state.quantized[1]}
    return payload


def state_from_dict(payload: dict) -> PureState:
    amps = np.array([complex(re, im) for re, im in payload["amplitudes"]])
    if len(amps) != payload["dim"]:
        raise ValueError("dim does not match amplitude count")
    state = from_amplitudes(amps)
    prec = payload.get("precision")
    if prec:
        state = replace(state, quantized=(prec["amplitude_decimals"], prec["phase_decimals"]))
    return state


def save_state(state: PureState, path) -> None:
    Path(path).write_text(json.dumps(state_to_dict(state), indent=2))


def load_state(path) -> PureState:
    return state_from_dict(json.loads(Path(path).read_text()))
