"""Value types and exact combinatorics shared by all trace formulas.

The partition sums that produce spectral moments run over solutions of

    q*k + 1*l_1 + 2*l_2 + ... + floor(q/2)*l_m = n/2,

each weighted by a multinomial coefficient divided by the total number of
parts.  Multinomials overflow 64-bit integers well below interesting n, so
weights are kept as exact rationals and converted to floating point only
when they are multiplied into real-valued coefficient products.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator


class InvalidFlux(ValueError):
    """Flux fraction cannot be formed (non-positive denominator)."""


class InvalidCoupling(ValueError):
    """Anisotropy coupling must be strictly positive."""


class DegenerateTerm(ValueError):
    """The all-zero partition term carries no multinomial weight."""


@dataclass(frozen=True)
class Flux:
    """Reduced rational magnetic flux p/q, with gamma = 2*pi*p/q per plaquette.

    Invariants: q >= 1, 0 <= p < q, gcd(p, q) = 1.  Zero flux is the
    canonical pair (0, 1).  Use :func:`make_flux` to build one from an
    arbitrary integer pair.
    """

    p: int
    q: int

    def __post_init__(self) -> None:
        if self.q < 1:
            raise InvalidFlux(f"denominator must be positive, got {self.q}")
        if not 0 <= self.p < self.q and not (self.p == 0 and self.q == 1):
            raise InvalidFlux(f"numerator {self.p} not canonical for q={self.q}")
        if math.gcd(self.p, self.q) != 1:
            raise InvalidFlux(f"{self.p}/{self.q} is not in lowest terms")

    @property
    def gamma(self) -> float:
        return 2.0 * math.pi * self.p / self.q

    @property
    def half_q(self) -> int:
        """Number of coefficient slots floor(q/2) in the partition sums."""
        return self.q // 2

    def __str__(self) -> str:
        return f"{self.p}/{self.q}"


def make_flux(p: int, q: int) -> Flux:
    """Canonicalize an integer pair into a reduced flux.

    p is first reduced modulo q, then the fraction is brought to lowest
    terms.  p = 0 mod q collapses to the zero-flux representative 0/1.
    """
    if q < 1:
        raise InvalidFlux(f"denominator must be positive, got {q}")
    p = p % q
    if p == 0:
        return Flux(0, 1)
    g = math.gcd(p, q)
    return Flux(p // g, q // g)


@dataclass(frozen=True)
class Coupling:
    """Anisotropy ratio of vertical to horizontal hopping amplitudes."""

    lam: float

    def __post_init__(self) -> None:
        if not self.lam > 0:
            raise InvalidCoupling(f"coupling must be positive, got {self.lam}")

    def tilde(self, q: int) -> float:
        return lambda_tilde(self.lam, q)


def lambda_tilde(lam: float, q: int) -> float:
    """(lam/2)**q accumulated by q left-to-right multiplications.

    The evaluation order is fixed so that every module computes bit-identical
    powers of lam/2 (the quantity enters range bounds and moment formulas).
    """
    if not lam > 0:
        raise InvalidCoupling(f"coupling must be positive, got {lam}")
    half = lam / 2.0
    out = 1.0
    for _ in range(q):
        out *= half
    return out


@dataclass(frozen=True)
class PartitionTerm:
    """One summand (k, l_1..l_m) of a trace partition sum."""

    k: int
    ell: tuple[int, ...]

    @property
    def total_parts(self) -> int:
        return sum(self.ell) + 2 * self.k


def _ell_tails(remainder: int, j: int, m: int) -> Iterator[tuple[int, ...]]:
    # all (l_j..l_m) >= 0 with sum_i i*l_i = remainder, ascending lexicographic
    if j > m:
        if remainder == 0:
            yield ()
        return
    for v in range(remainder // j + 1):
        for tail in _ell_tails(remainder - j * v, j + 1, m):
            yield (v,) + tail


def enumerate_partition_terms(
    half_n: int, q: int, allow_k: bool = True
) -> Iterator[PartitionTerm]:
    """Yield every (k, l) with q*k + sum_j j*l_j = half_n.

    With allow_k=False the index k is pinned to zero and the enumeration
    reduces to partitions of half_n into parts of size at most floor(q/2).
    Terms come out in ascending lexicographic order on (k, l_1, ..., l_m);
    downstream floating-point sums rely on this order for reproducibility.
    """
    if q < 1:
        raise InvalidFlux(f"denominator must be positive, got {q}")
    if half_n < 0:
        return
    m = q // 2
    k_top = half_n // q if allow_k else 0
    for k in range(k_top + 1):
        for ell in _ell_tails(half_n - q * k, 1, m):
            yield PartitionTerm(k, ell)


def multinomial_weight(term: PartitionTerm) -> Fraction:
    """Exact weight multinomial(sum l + 2k; l_1, ..., l_m, 2k) / (sum l + 2k).

    Raises DegenerateTerm for the all-zero term, whose weight would divide
    by zero; that term only arises for n = 0, which callers special-case.
    """
    total = term.total_parts
    if total == 0:
        raise DegenerateTerm("all-zero partition term has no weight")
    denominator = math.factorial(2 * term.k)
    for count in term.ell:
        denominator *= math.factorial(count)
    return Fraction(math.factorial(total), denominator * total)
