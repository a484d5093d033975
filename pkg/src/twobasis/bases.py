"""Measurement-basis construction and angle-constraint checking.

Two families of second bases are supported: the qudit basis D*F (diagonal
phases on top of the discrete Fourier transform) and the local qubit basis
built from per-qubit phase rotations followed by Hadamards.  Validity of an
angle set means the interference phases it induces are pairwise distinct in
absolute value, which is what the reconstruction-uniqueness argument needs.

Angle sets produced by the geometric generator carry exact rational
multipliers of the seed value, so their constraint checks run in exact
rational arithmetic; transcendental sets (square roots of primes) are
checked numerically with a margin.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path

import numpy as np

from ._numeric import first_primes, quantize_phase_array, sqrt_to_decimals
from .state import SparseSupport

QUDIT = "qudit"
QUBIT_LOCAL = "qubit_local"

#: Minimum separation of interference phases for numeric (non-exact) checks.
DEFAULT_MARGIN = 1e-6

#: Signed-sum enumeration is 3**n; beyond this qubit count it does not fit a sane budget.
LOCAL_CHECK_MAX_QUBITS = 18

UNITARY_DIM_CAP = 1 << 12


@dataclass(frozen=True)
class Witness:
    """A concrete constraint violation, re-checkable by direct arithmetic."""

    kind: str          # "duplicate-difference" | "zero-difference" | "duplicate-sum" | "zero-sum"
    left: tuple
    right: tuple | None
    value: float

    def describe(self) -> str:
        if self.right is None:
            return f"{self.kind}: {self.left} -> {self.value!r}"
        return f"{self.kind}: {self.left} vs {self.right} -> {self.value!r}"


@dataclass(frozen=True)
class CheckResult:
    status: str                    # "valid" | "invalid"
    witness: Witness | None = None

    def __bool__(self) -> bool:
        return self.status == "valid"


@dataclass(frozen=True)
class AngleSet:
    mode: str
    angles: np.ndarray
    generator: str = "explicit"
    z0: float | None = None
    rational_coeffs: tuple[Fraction, ...] | None = None
    check: CheckResult | None = None

    def __post_init__(self):
        if self.mode not in (QUDIT, QUBIT_LOCAL):
            raise ValueError(f"unknown angle-set mode {self.mode!r}")
        self.angles.flags.writeable = False

    def __len__(self) -> int:
        return self.angles.size

    def rounded(self, decimals: int) -> "AngleSet":
        """Angles with each phase factor's (cos, sin) pair rounded to ``decimals`` places.

        This models storing the basis phase factors at finite decimal
        precision while keeping every basis matrix exactly unitary.
        """
        snapped = quantize_phase_array(self.angles, decimals)
        return AngleSet(mode=self.mode, angles=snapped, generator=self.generator,
                        z0=self.z0, rational_coeffs=None, check=None)

    @property
    def check_status(self) -> str:
        return self.check.status if self.check is not None else "unchecked"


@dataclass(frozen=True)
class MeasurementBasis:
    kind: str                      # "computational" | "qudit_fourier_phase" | "qubit_local_phase" | "plain_hadamard"
    dim: int
    angles: AngleSet | None = None

    def __post_init__(self):
        if self.kind in ("qubit_local_phase", "plain_hadamard") and self.dim & (self.dim - 1):
            raise ValueError(f"{self.kind} requires a power-of-two dimension, got {self.dim}")
        if self.kind == "qudit_fourier_phase":
            if self.angles is None or self.angles.mode != QUDIT or len(self.angles) != self.dim:
                raise ValueError("qudit_fourier_phase needs a qudit angle set of length dim")
        if self.kind == "qubit_local_phase":
            n = self.dim.bit_length() - 1
            if self.angles is None or self.angles.mode != QUBIT_LOCAL or len(self.angles) != n:
                raise ValueError("qubit_local_phase needs a qubit-local angle set of length n")


def computational_basis(dim: int) -> MeasurementBasis:
    return MeasurementBasis(kind="computational", dim=dim)


def qudit_fourier_basis(angles: AngleSet) -> MeasurementBasis:
    return MeasurementBasis(kind="qudit_fourier_phase", dim=len(angles), angles=angles)


def qubit_local_basis(angles: AngleSet) -> MeasurementBasis:
    return MeasurementBasis(kind="qubit_local_phase", dim=1 << len(angles), angles=angles)


def plain_hadamard_basis(n: int) -> MeasurementBasis:
    return MeasurementBasis(kind="plain_hadamard", dim=1 << n)


def gen_geometric(count: int, z0: float, mode: str = QUDIT) -> AngleSet:
    """Doubling angles theta_k = 2**(k-1) * z0.

    Qudit sets index from k = 0 (first angle z0/2); qubit-local sets index
    from k = 1 (first angle z0), matching how each basis is written down.
    The power-of-two multipliers are kept exactly for rational checking.
    """
    if count < 2:
        raise ValueError("need at least 2 angles")
    if z0 == 0.0:
        raise ValueError("z0 must be nonzero")
    start = -1 if mode == QUDIT else 0
    coeffs = tuple(Fraction(2) ** (start + k) for k in range(count))
    angles = np.array([float(c) * z0 for c in coeffs])
    return AngleSet(mode=mode, angles=angles, generator="geometric", z0=float(z0),
                    rational_coeffs=coeffs)


def gen_sqrt_prime(count: int, mode: str = QUDIT, digits: int = 15) -> AngleSet:
    """Angles sqrt(q_k) with q_k the k-th prime, evaluated to ``digits`` decimals."""
    if count < 2:
        raise ValueError("need at least 2 angles")
    angles = np.array([sqrt_to_decimals(q, digits) for q in first_primes(count)])
    return AngleSet(mode=mode, angles=angles, generator="sqrt_prime")


def explicit_angles(values, mode: str = QUDIT) -> AngleSet:
    return AngleSet(mode=mode, angles=np.asarray(values, dtype=float))


def _pair_labels(count: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(count) for j in range(i + 1, count)]


def check_qudit_constraints(angles: AngleSet, margin: float = DEFAULT_MARGIN) -> CheckResult:
    """All pairwise |theta_i - theta_j| must be distinct (and nonzero).

    Exact over the rational multipliers when the generator exposes them
    (margin ignored); otherwise numeric with the given margin.
    """
    if angles.mode != QUDIT:
        raise ValueError("qudit checker needs a qudit-mode angle set")
    pairs = _pair_labels(len(angles))
    if angles.rational_coeffs is not None:
        seen: dict[Fraction, tuple[int, int]] = {}
        for (i, j) in pairs:
            gap = abs(angles.rational_coeffs[i] - angles.rational_coeffs[j])
            if gap == 0:
                return CheckResult("invalid", Witness("zero-difference", (i, j), None, 0.0))
            if gap in seen:
                return CheckResult("invalid", Witness(
                    "duplicate-difference", seen[gap], (i, j), float(gap) * (angles.z0 or 1.0)))
            seen[gap] = (i, j)
        return CheckResult("valid")
    th = angles.angles
    gaps = np.array([abs(th[i] - th[j]) for (i, j) in pairs])
    order = np.argsort(gaps, kind="stable")
    if gaps[order[0]] <= margin:
        i, j = pairs[order[0]]
        return CheckResult("invalid", Witness("zero-difference", (i, j), None, float(gaps[order[0]])))
    for a, b in zip(order[:-1], order[1:]):
        if gaps[b] - gaps[a] <= margin:
            return CheckResult("invalid", Witness(
                "duplicate-difference", pairs[a], pairs[b], float(gaps[a])))
    return CheckResult("valid")


def _signed_sum_blocks(n: int, size: int):
    """All subsets of {0..n-1} of the given size, with every sign pattern that
    fixes the first element positive (quotient by global negation)."""
    subsets = np.array(list(itertools.combinations(range(n), size)), dtype=np.int64)
    patterns = np.arange(1 << (size - 1), dtype=np.int64)
    signs = np.ones((patterns.size, size))
    for b in range(size - 1):
        signs[:, b + 1] = np.where((patterns >> b) & 1, -1.0, 1.0)
    return subsets, signs


def _local_witness(kind: str, subset, signs_row, other_signs, value: float) -> Witness:
    left = tuple((int(q) + 1, int(s)) for q, s in zip(subset, signs_row))
    right = None
    if other_signs is not None:
        right = tuple((int(q) + 1, int(s)) for q, s in zip(subset, other_signs))
    return Witness(kind, left, right, value)


def check_local_constraints(angles: AngleSet, margin: float = DEFAULT_MARGIN) -> CheckResult:
    """Signed subset sums of the local angles must be nonzero and, within each
    subset, pairwise distinct in absolute value up to global negation.

    Exact over the rational multipliers when available.  The enumeration
    touches the whole 3**n signed-sum space, hence the qubit-count cap.
    """
    if angles.mode != QUBIT_LOCAL:
        raise ValueError("local checker needs a qubit_local-mode angle set")
    n = len(angles)
    if n > LOCAL_CHECK_MAX_QUBITS:
        raise ValueError(
            f"exhaustive signed-sum check infeasible for n={n} (3^n space); "
            f"cap is {LOCAL_CHECK_MAX_QUBITS}, use sampled spot checks instead")
    exact = angles.rational_coeffs is not None
    if exact:
        denom = math.lcm(*(c.denominator for c in angles.rational_coeffs))
        vals = np.array([int(c * denom) for c in angles.rational_coeffs], dtype=np.int64)
        scale = (angles.z0 or 1.0) / denom
        tol_zero, tol_dup = 0.5, 0.5  # integer arithmetic: anything < 1 apart is equal
    else:
        vals = angles.angles.astype(float)
        scale = 1.0
        tol_zero, tol_dup = margin, margin

    for size in range(1, n + 1):
        subsets, signs = _signed_sum_blocks(n, size)
        sums = np.einsum("cs,ps->cp", vals[subsets].astype(float), signs)
        zero_hits = np.argwhere(np.abs(sums) <= tol_zero)
        if zero_hits.size:
            c, p = zero_hits[0]
            return CheckResult("invalid", _local_witness(
                "zero-sum", subsets[c], signs[p], None, float(sums[c, p] * scale)))
        if size == 1:
            continue
        asums = np.abs(sums)
        order = np.argsort(asums, axis=1, kind="stable")
        ranked = np.take_along_axis(asums, order, axis=1)
        dup = np.argwhere(np.diff(ranked, axis=1) <= tol_dup)
        if dup.size:
            c, k = dup[0]
            p1, p2 = order[c, k], order[c, k + 1]
            return CheckResult("invalid", _local_witness(
                "duplicate-sum", subsets[c], signs[p1], signs[p2], float(ranked[c, k] * scale)))
    return CheckResult("valid")


def verified(angles: AngleSet, margin: float = DEFAULT_MARGIN) -> AngleSet:
    """Run the matching checker and return the angle set with its verdict attached."""
    checker = check_qudit_constraints if angles.mode == QUDIT else check_local_constraints
    return replace(angles, check=checker(angles, margin))


def mask_to_support(angles: AngleSet, support: SparseSupport) -> AngleSet:
    """Zero the diagonal phases outside the support (the sparse simplification).

    Second-basis probabilities of any state supported inside ``support`` are
    unchanged, because only phase differences within the support enter.
    """
    if angles.mode != QUDIT:
        raise ValueError("masking applies to qudit-mode angle sets")
    masked = np.zeros(len(angles))
    keep = list(support.indices)
    masked[keep] = angles.angles[keep]
    return AngleSet(mode=QUDIT, angles=masked, generator="explicit")


def build_unitary(basis: MeasurementBasis) -> np.ndarray:
    """Dense matrix whose columns are the basis vectors; oracle-scale only."""
    d = basis.dim
    if d > UNITARY_DIM_CAP:
        raise ValueError(f"dimension {d} above the dense-unitary cap; use the closed-form path")
    if basis.kind == "computational":
        return np.eye(d, dtype=complex)
    if basis.kind == "qudit_fourier_phase":
        jk = np.outer(np.arange(d), np.arange(d))
        fourier = np.exp(2j * np.pi * jk / d) / math.sqrt(d)
        return np.exp(1j * basis.angles.angles)[:, None] * fourier
    if basis.kind == "plain_hadamard":
        n = d.bit_length() - 1
        h = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / math.sqrt(2.0)
        out = np.eye(1, dtype=complex)
        for _ in range(n):
            out = np.kron(out, h)
        return out
    if basis.kind == "qubit_local_phase":
        alpha = basis.angles.angles
        h = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / math.sqrt(2.0)
        out = np.eye(1, dtype=complex)
        # leftmost kron factor acts on the most significant bit = qubit n
        for j in reversed(range(alpha.size)):
            rj = np.diag([1.0, np.exp(1j * alpha[j])])
            out = np.kron(out, rj @ h)
        return out
    raise ValueError(f"unknown basis kind {basis.kind!r}")


def angles_to_dict(angles: AngleSet) -> dict:
    payload = {
        "mode": angles.mode,
        "generator": angles.generator,
        "z0": angles.z0,
        "angles": [float(a) for a in angles.angles],
        "check": {"status": angles.check_status,
                  "witness": angles.check.witness.describe()
                  if angles.check and angles.check.witness else None},
    }
    return payload


def angles_from_dict(payload: dict) -> AngleSet:
    aset = AngleSet(mode=payload["mode"], angles=np.asarray(payload["angles"], dtype=float),
                    generator=payload.get("generator", "explicit"), z0=payload.get("z0"))
    if payload["mode"] == QUDIT and payload.get("generator") == "geometric" and payload.get("z0"):
        # re-derive exact multipliers so reloaded sets keep the exact checker
        count = len(payload["angles"])
        aset = replace(aset, rational_coeffs=tuple(Fraction(2) ** (k - 1) for k in range(count)))
    return aset


def save_angles(angles: AngleSet, path) -> None:
    Path(path).write_text(json.dumps(angles_to_dict(angles), indent=2))


def load_angles(path) -> AngleSet:
    return angles_from_dict(json.loads(Path(path).read_text()))
