"""Shared numeric kernels: decimal-grid rounding, phase-grid tests, butterflies, primes.

The decimal grid is the discretisation everything else builds on: moduli are
rounded to a fixed number of decimal places and phases are rounded through
their (cos, sin) pair.  Rounding is half-away-from-zero on the shortest
decimal string of the float, which is platform independent.
"""
from __future__ import annotations

import math
from decimal import ROUND_HALF_UP, Decimal

import numpy as np

TWO_PI = 2.0 * math.pi


def round_decimal(x: float, decimals: int) -> float:
    """Round ``x`` to ``decimals`` places, ties away from zero."""
    if not math.isfinite(x):
        raise ValueError(f"cannot round non-finite value {x!r}")
    quantum = Decimal(1).scaleb(-decimals)
    return float(Decimal(repr(float(x))).quantize(quantum, rounding=ROUND_HALF_UP))


def round_decimal_array(values, decimals: int) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    out = np.empty(arr.shape, dtype=float)
    flat_in, flat_out = arr.reshape(-1), out.reshape(-1)
    for i in range(flat_in.size):
        flat_out[i] = round_decimal(float(flat_in[i]), decimals)
    return out


def mod_2pi(x: float) -> float:
    y = math.fmod(x, TWO_PI)
    if y < 0.0:
        y += TWO_PI
    if y >= TWO_PI:  # fmod can land exactly on 2*pi after the add
        y -= TWO_PI
    return y


def mod_2pi_array(x) -> np.ndarray:
    y = np.mod(np.asarray(x, dtype=float), TWO_PI)
    y[y >= TWO_PI] = 0.0
    return y


def phase_pair(phi: float, decimals: int) -> tuple[float, float]:
    """Rounded (cos, sin) coordinates of a phase on the decimal grid."""
    return round_decimal(math.cos(phi), decimals), round_decimal(math.sin(phi), decimals)


def quantize_phase(phi: float, decimals: int) -> float:
    """Snap a phase onto the decimal (cos, sin) grid; result in [0, 2*pi)."""
    c, s = phase_pair(phi, decimals)
    if c == 0.0 and s == 0.0:
        raise ValueError(f"phase grid with {decimals} decimals collapses phi={phi!r} to the origin")
    return mod_2pi(math.atan2(s, c))


def quantize_phase_array(phis, decimals: int) -> np.ndarray:
    arr = np.asarray(phis, dtype=float)
    out = np.empty(arr.shape, dtype=float)
    flat_in, flat_out = arr.reshape(-1), out.reshape(-1)
    for i in range(flat_in.size):
        flat_out[i] = quantize_phase(float(flat_in[i]), decimals)
    return out


def phase_on_grid(phi: float, decimals: int, norm_tol: float) -> bool:
    """Whether ``phi`` is realisable as atan2(s, c) with c, s on the decimal grid.

    A grid pair for ``phi`` must be a positive multiple lam*(cos phi, sin phi)
    with both coordinates exact multiples of 10**-decimals and
    |c^2+s^2-1| < norm_tol.  Only a handful of integer candidates exist for
    the better-conditioned coordinate, so the search is exhaustive.
    """
    scale = 10.0 ** decimals
    c0, s0 = math.cos(phi), math.sin(phi)
    lam_lo = math.sqrt(max(0.0, 1.0 - norm_tol))
    lam_hi = math.sqrt(1.0 + norm_tol)
    anchor_is_cos = abs(c0) >= abs(s0)
    a0, b0 = (c0, s0) if anchor_is_cos else (s0, c0)
    lo, hi = sorted((lam_lo * a0 * scale, lam_hi * a0 * scale))
    for u in range(math.ceil(lo - 1e-9), math.floor(hi + 1e-9) + 1):
        if u == 0:
            continue
        lam = u / (a0 * scale)
        if not (lam_lo - 1e-12 <= lam <= lam_hi + 1e-12):
            continue
        v = lam * b0 * scale
        vi = round(v)
        if abs(v - vi) > 1e-6:
            continue
        c, s = (u / scale, vi / scale) if anchor_is_cos else (vi / scale, u / scale)
        if abs(c * c + s * s - 1.0) >= norm_tol:
            continue
        delta = (math.atan2(s, c) - phi + math.pi) % TWO_PI - math.pi
        if abs(delta) < 1e-9:
            return True
    return False


def walsh_hadamard(values) -> np.ndarray:
    """Unnormalised Walsh-Hadamard transform, kernel (-1)^popcount(j & m).

    Involution up to the factor 2**n: applying it twice multiplies by the
    length.  Length must be a power of two.
    """
    v = np.array(values, dtype=float, copy=True)
    n = v.size
    if n & (n - 1):
        raise ValueError(f"length {n} is not a power of two")
    h = 1
    while h < n:
        v = v.reshape(-1, 2, h)
        a = v[:, 0, :].copy()
        v[:, 0, :] = a + v[:, 1, :]
        v[:, 1, :] = a - v[:, 1, :]
        v = v.reshape(n)
        h *= 2
    return v


def bitflip_mix(values, p: float) -> np.ndarray:
    """Apply the per-bit confusion kernel [[1-p, p], [p, 1-p]] to every outcome bit."""
    v = np.array(values, dtype=float, copy=True)
    n = v.size
    if n & (n - 1):
        raise ValueError(f"length {n} is not a power of two")
    h = 1
    while h < n:
        v = v.reshape(-1, 2, h)
        a = v[:, 0, :].copy()
        b = v[:, 1, :].copy()
        v[:, 0, :] = (1.0 - p) * a + p * b
        v[:, 1, :] = p * a + (1.0 - p) * b
        v = v.reshape(n)
        h *= 2
    return v


def first_primes(count: int) -> list[int]:
    """The first ``count`` primes via a plain sieve."""
    if count <= 0:
        return []
    bound = 15
    if count > 5:
        x = float(count)
        bound = int(x * (math.log(x) + math.log(math.log(x)))) + 10
    while True:
        sieve = np.ones(bound + 1, dtype=bool)
        sieve[:2] = False
        for q in range(2, int(math.isqrt(bound)) + 1):
            if sieve[q]:
                sieve[q * q :: q] = False
        primes = np.flatnonzero(sieve)
        if primes.size >= count:
            return [int(q) for q in primes[:count]]
        bound *= 2


def sqrt_to_decimals(value: int, digits: int) -> float:
    """Nearest float to sqrt(value) computed exactly to ``digits`` decimal places.

    Integer Newton (math.isqrt) on the scaled radicand, then round-to-nearest
    at the requested decimal precision.
    """
    if value < 0:
        raise ValueError("negative radicand")
    scaled = value * 10 ** (2 * digits)
    root = math.isqrt(scaled)
    # nearest integer to the true scaled root: compare 4*scaled with (2*root+1)^2
    if 4 * scaled > (2 * root + 1) ** 2:
        root += 1
    return float(Decimal(root).scaleb(-digits))
