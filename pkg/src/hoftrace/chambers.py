"""Chambers polynomial coefficients for the Hofstadter and almost Mathieu bands.

At rational flux p/q the momentum-independent part of the Bloch determinant
is a polynomial of degree q in the energy,

    P(E) = -sum_j a(2j) * E**(q - 2j),        j = 0 .. floor(q/2),

with a(0) = -1 by convention.  The band structure is P(E) = 2*(cos(q*kx) +
(lam/2)**q * cos(q*ky)), so everything spectral reduces to the coefficient
table a(2j).  Two independent constructions are implemented:

* a determinant recursion on the tridiagonalized Bloch matrix, run as
  polynomial arithmetic in E, and
* nested sine-product sums evaluated with a prefix-sum dynamic program
  (O(q^2) per coefficient instead of the naive O(q^j)).

For lam != 2 the off-diagonal building blocks are no longer complex
conjugates of each other, but the coefficients stay real; the imaginary
residue of either construction is asserted small and discarded.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .core import Flux, InvalidCoupling

# imaginary residue allowed before a coefficient is declared non-real
_IMAG_TOL = 1e-9


@dataclass(frozen=True)
class BuildingBlock:
    """Off-diagonal pair (alpha, alpha_bar) of the tridiagonal Bloch matrix.

    Only the product alpha*alpha_bar enters any implemented formula, and the
    product is independent of the transverse momentum, so the phase factor
    is fixed to one.  At lam = 2 the pair is complex conjugate and the
    product is 4*sin(pi*(k+1)*p/q)**2.
    """

    k: int
    alpha: complex
    alpha_bar: complex

    @property
    def product(self) -> complex:
        return self.alpha * self.alpha_bar


def building_block(flux: Flux, lam: float, k: int) -> BuildingBlock:
    if not 0 <= k <= flux.q - 1:
        raise IndexError(f"block index {k} outside 0..{flux.q - 1}")
    if not lam > 0:
        raise InvalidCoupling(f"coupling must be positive, got {lam}")
    half = lam / 2.0
    theta = 2.0 * math.pi * (k + 1) * flux.p / flux.q
    w = cmath.exp(1j * theta)
    w_conj = cmath.exp(-1j * theta)
    alpha = half * (1.0 - w)
    alpha_bar = half * (1.0 - (2.0 / lam) ** 2 * w_conj)
    return BuildingBlock(k, alpha, alpha_bar)


@dataclass(frozen=True)
class ChambersPolynomial:
    """Coefficient table a(2j), j = 0..floor(q/2), for one (flux, lam)."""

    flux: Flux
    lam: float
    a: tuple[float, ...]

    def energy_coefficients(self) -> list[float]:
        """Ascending coefficients of P(E) = -sum_j a(2j) E^(q-2j), length q+1."""
        q = self.flux.q
        coeffs = [0.0] * (q + 1)
        for j, aj in enumerate(self.a):
            coeffs[q - 2 * j] = -aj
        return coeffs

    def b_coefficients(self) -> list[float]:
        """Ascending z-coefficients of b(z) = -sum_j a(2j) z^(2j)."""
        coeffs = [0.0] * (2 * self.flux.half_q + 1)
        for j, aj in enumerate(self.a):
            coeffs[2 * j] = -aj
        return coeffs


def _real_checked(z: complex) -> float:
    if abs(z.imag) > _IMAG_TOL * (1.0 + abs(z.real)):
        raise ArithmeticError(
            f"coefficient has non-cancelling imaginary part {z.imag!r}"
        )
    return z.real


def _block_products(flux: Flux, lam: float) -> list[complex]:
    # products for indices 0..q-2; index q-1 vanishes identically and is unused
    return [building_block(flux, lam, k).product for k in range(flux.q - 1)]


def chambers_recursive(flux: Flux, lam: float) -> ChambersPolynomial:
    """Coefficients from the tridiagonal determinant recursion.

    The k x k leading principal minor D_k obeys
        D_k = -E * D_{k-1} - beta(k-2) * D_{k-2},
    with beta(m) the m-th building-block product.  The recursion is run on
    coefficient vectors in E (exact degree bookkeeping, no expression
    swell), and P(E) = (-1)**q * D_q is read off at the end.
    """
    q = flux.q
    beta = _block_products(flux, lam)
    d_prev: list[complex] = [0j, -1.0 + 0j]  # D_1 = -E
    d_prev2: list[complex] = [1.0 + 0j]      # D_0 = 1
    for k in range(2, q + 1):
        d = [0j] * (k + 1)
        for i, c in enumerate(d_prev):
            d[i + 1] -= c
        b = beta[k - 2]
        for i, c in enumerate(d_prev2):
            d[i] -= b * c
        d_prev2, d_prev = d_prev, d
    sign = -1.0 if q % 2 == 0 else 1.0  # (-1)**(q+1)
    a = tuple(_real_checked(sign * d_prev[q - 2 * j]) for j in range(q // 2 + 1))
    return ChambersPolynomial(flux, lam, a)


def _nested_coefficient(flux: Flux, lam: float, j: int) -> complex:
    """One coefficient a(2j) from the closed nested-sum formula.

    The sum runs over q-2j >= k_1 >= k_2 >= ... >= k_j >= 0 of the product
    of building blocks beta(k_i + 2*(j-i)).  Accumulating prefix sums from
    the innermost index outward collapses the nest to O(q) work per level.
    Empty ranges (q < 2j) yield zero.
    """
    q = flux.q
    if j == 0:
        return -1.0 + 0j
    top = q - 2 * j
    if top < 0:
        return 0j
    beta = _block_products(flux, lam)
    level = [beta[m] for m in range(top + 1)]
    for i in range(j - 1, 0, -1):
        offset = 2 * (j - i)
        prefix = 0j
        nxt = []
        for m in range(top + 1):
            prefix += level[m]
            nxt.append(beta[m + offset] * prefix)
        level = nxt
    total = 0j
    for value in level:
        total += value
    sign = -1.0 if j % 2 == 0 else 1.0  # (-1)**(j+1)
    return sign * total


def chambers_nested(flux: Flux, lam: float) -> ChambersPolynomial:
    """Coefficients from the nested-sum closed form (independent of the recursion)."""
    a = tuple(
        _real_checked(_nested_coefficient(flux, lam, j))
        for j in range(flux.q // 2 + 1)
    )
    return ChambersPolynomial(flux, lam, a)


def eval_energy_polynomial(poly: ChambersPolynomial, energy: float) -> float:
    """Evaluate P(E) = -sum_j a(2j) E^(q-2j) by Horner in E**2.

    The expanded polynomial form is used so that energy = 0 is allowed even
    though the defining expression divides by E.
    """
    e2 = energy * energy
    acc = 0.0
    for aj in poly.a:
        acc = acc * e2 - aj
    if poly.flux.q % 2:
        acc *= energy
    return acc
