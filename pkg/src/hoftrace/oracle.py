"""Independent ground truth: Bloch eigensolves, momentum quadrature, walk counts.

None of these routes touches the partition-sum formulas.  The Bloch matrix
is diagonalized directly; quantum traces come out either as Brillouin-zone
averages of eigenvalue powers or as Peierls-phase weighted counts of closed
lattice walks, and point-spectrum roots are realized by picking momenta
that hit the requested band parameter s.
"""

from __future__ import annotations

import cmath
import math
import warnings

import numpy as np

from .core import Flux, InvalidCoupling, lambda_tilde

WALK_LENGTH_CAP = 20


class RangeError(ValueError):
    """No real momentum realizes the requested band parameter."""


class TooLarge(ValueError):
    """Walk length exceeds the configured cap."""


class InsufficientGridWarning(UserWarning):
    """Momentum grid too coarse to integrate the trace exactly."""


def secular_matrix(flux: Flux, lam: float, kx: float, ky: float) -> np.ndarray:
    """q x q Hermitian Bloch matrix: cosine diagonal, unit hops, phased corners."""
    if not lam > 0:
        raise InvalidCoupling(f"coupling must be positive, got {lam}")
    q = flux.q
    m = np.zeros((q, q), dtype=complex)
    for r in range(q):
        m[r, r] = lam * math.cos(ky + flux.gamma * r)
    if q == 1:
        m[0, 0] += 2.0 * math.cos(q * kx)
    else:
        for r in range(q - 1):
            m[r, r + 1] += 1.0
            m[r + 1, r] += 1.0
        m[0, q - 1] += cmath.exp(-1j * q * kx)
        m[q - 1, 0] += cmath.exp(1j * q * kx)
    return m


def eigenvalues(matrix: np.ndarray) -> np.ndarray:
    """All eigenvalues of a Hermitian matrix, ascending."""
    return np.linalg.eigvalsh(matrix)


def band_energies(flux: Flux, lam: float, kx: float, ky: float) -> np.ndarray:
    """The q band energies at one momentum, ascending."""
    return eigenvalues(secular_matrix(flux, lam, kx, ky))


def bz_trace(flux: Flux, lam: float, n: int, grid: int) -> float:
    """Trace of H**n per site as a uniform Brillouin-zone average.

    The integrand is a trigonometric polynomial of degree at most n in each
    momentum, so a periodic grid with at least n+1 points per axis
    integrates it exactly (up to eigensolver error).  Coarser grids are
    allowed but flagged.  The reduction runs in row-major grid order.
    """
    if grid < 1:
        raise ValueError(f"grid must be positive, got {grid}")
    if grid < n + 1:
        warnings.warn(
            f"grid {grid} < n+1 = {n + 1}: momentum average is not exact",
            InsufficientGridWarning,
            stacklevel=2,
        )
    q = flux.q
    ks = -math.pi + 2.0 * math.pi * np.arange(grid) / grid
    mats = np.zeros((grid, grid, q, q), dtype=complex)
    diag = lam * np.cos(ks[None, :, None] + flux.gamma * np.arange(q)[None, None, :])
    rows = np.arange(q)
    mats[:, :, rows, rows] = diag
    if q == 1:
        mats[:, :, 0, 0] += 2.0 * np.cos(q * ks)[:, None]
    else:
        mats[:, :, rows[:-1], rows[:-1] + 1] += 1.0
        mats[:, :, rows[:-1] + 1, rows[:-1]] += 1.0
        mats[:, :, 0, q - 1] += np.exp(-1j * q * ks)[:, None]
        mats[:, :, q - 1, 0] += np.exp(1j * q * ks)[:, None]
    energies = np.linalg.eigvalsh(mats)
    return float(np.sum(energies**n) / (q * grid * grid))


def point_spectrum_roots(flux: Flux, lam: float, s: float, sign: int = 1) -> np.ndarray:
    """The q roots of P(E) = sign*s, as Bloch eigenvalues at a chosen momentum.

    The band identity P(E) = 2*(cos(q*kx) + lt*cos(q*ky)) lets any momentum
    with the right-hand side equal to sign*s do; the proportional split
    cos(q*kx) = cos(q*ky) = sign*s / (2*(1+lt)) is used (clamped against
    roundoff) so results are reproducible.
    """
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    q = flux.q
    lt = lambda_tilde(lam, q)
    bound = 2.0 * (1.0 + lt)
    if abs(s) > bound * (1.0 + 1e-12):
        raise RangeError(f"|s| = {abs(s)} exceeds the spectral range {bound}")
    target = sign * s
    c2 = min(1.0, max(-1.0, target / bound))
    cx = min(1.0, max(-1.0, target / 2.0 - lt * c2))
    kx = math.acos(cx) / q
    ky = math.acos(c2) / q
    return band_energies(flux, lam, kx, ky)


def walk_trace_table(
    flux: Flux, lam: float, n_max: int, y_origin: int = 0
) -> list[float]:
    """Return-amplitude of H**t at the origin for every t = 0..n_max.

    Peierls phases in Landau gauge: a horizontal hop at height y carries
    phase exp(+/- i*gamma*y); vertical hops carry amplitude lam/2 and no
    phase.  The state lives on a (2*n_max+1)**2 patch, which an n_max-step
    walk from the origin cannot leave.  y_origin rebases the gauge; the
    trace must not depend on it.
    """
    if not lam > 0:
        raise InvalidCoupling(f"coupling must be positive, got {lam}")
    if n_max < 0:
        raise ValueError(f"walk length must be nonnegative, got {n_max}")
    gamma = flux.gamma
    size = 2 * n_max + 1
    heights = np.arange(size) - n_max + y_origin
    phase = np.exp(1j * gamma * heights)  # indexed by y, broadcast over x
    half = lam / 2.0
    psi = np.zeros((size, size), dtype=complex)
    psi[n_max, n_max] = 1.0
    values = [1.0]
    for _ in range(n_max):
        nxt = np.zeros_like(psi)
        nxt[1:, :] += phase[None, :] * psi[:-1, :]
        nxt[:-1, :] += np.conj(phase)[None, :] * psi[1:, :]
        nxt[:, 1:] += half * psi[:, :-1]
        nxt[:, :-1] += half * psi[:, 1:]
        psi = nxt
        amp = psi[n_max, n_max]
        if abs(amp.imag) > 1e-10 * (1.0 + abs(amp.real)):
            raise ArithmeticError(f"walk amplitude has imaginary part {amp.imag!r}")
        values.append(amp.real)
    return values


def walk_trace(flux: Flux, lam: float, n: int, cap: int = WALK_LENGTH_CAP) -> float:
    """Tr H**n per site as a Peierls-phase weighted count of closed n-walks."""
    if n > cap:
        raise TooLarge(f"walk length {n} exceeds cap {cap}")
    return walk_trace_table(flux, lam, n)[n]
