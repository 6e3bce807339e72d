"""Lattice densities of states, their moments, and the trace-recovery integral.

The band parameter s = 2*(cos(q*kx) + lt*cos(q*ky)), lt = (lam/2)**q, is a
sum of two independent arcsine variables, so its density is the convolution
of arcsine laws on [-2, 2] and [-2*lt, 2*lt].  For lt = 1 the convolution
collapses to the classic square-lattice density (2*pi**2)**(-1) * K(1 - s**2/16),
with K the complete elliptic integral of the first kind in the *parameter*
convention K(m) = integral dtheta / sqrt(1 - m sin(theta)**2); that
convention is pinned by the series identity (2/pi) K(16x) = sum binom(2k,k)**2 x**k.

Integrating the +/-s point-spectrum trace against this density reproduces
the full quantum trace.  Two routes are provided: an exact one that pairs
the s**2-expansion of the trace with closed-form moments, and a numerical
one that actually integrates the tabulated density (and thereby validates
the density construction itself).
"""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .core import Flux, lambda_tilde
from .traces import cached_polynomial, central_factor, pm_s_coefficients


class DomainError(ValueError):
    """Argument outside the mathematical domain of the function."""


def _agm_k(complement_root: float) -> float:
    # K(m) = pi / (2 * agm(1, sqrt(1-m))), with sqrt(1-m) supplied directly
    # so the parameter can sit arbitrarily close to the m = 1 singularity
    a, b = 1.0, complement_root
    for _ in range(64):
        if abs(a - b) <= 1e-16 * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return math.pi / (2.0 * a)


def elliptic_k(m: float) -> float:
    """Complete elliptic integral K(m), parameter convention, via the AGM.

    K(m) = pi / (2 * agm(1, sqrt(1-m))).  The iteration converges
    quadratically and is run to machine precision.  m >= 1 is rejected
    (logarithmic singularity at m = 1).
    """
    if m >= 1.0:
        raise DomainError(f"elliptic parameter must satisfy m < 1, got {m}")
    return _agm_k(math.sqrt(1.0 - m))


def dos_free(s: float) -> float:
    """Free square-lattice density of states (2*pi**2)**(-1) * K(1 - s**2/16).

    Zero outside |s| > 4; the finite one-sided limit 1/(4*pi) is returned at
    the band edge |s| = 4, and the logarithmic divergence at s = 0 is
    reported as math.inf.  The elliptic parameter is fed to the AGM through
    its complement root |s|/4, which stays accurate arbitrarily close to
    the singularity.
    """
    x = abs(s)
    if x > 4.0:
        return 0.0
    if x == 4.0:
        return 1.0 / (4.0 * math.pi)
    if x == 0.0:
        return math.inf
    return _agm_k(x / 4.0) / (2.0 * math.pi**2)


def _convolution_piece(a: float, b: float, w) -> float:
    # integral over [a, b] of w(t) / sqrt((t-a)*(b-t)), endpoint singularities
    # absorbed by t = mid + half*sin(theta)
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)

    def integrand(theta: float) -> float:
        return w(mid + half * math.sin(theta))

    with warnings.catch_warnings():
        # within ~1e-13 of a sub-case boundary the remaining factor has an
        # integrable inverse-sqrt peak at one theta endpoint; QUADPACK
        # converges there but distrusts its own error estimate
        warnings.simplefilter("ignore", IntegrationWarning)
        value, _ = quad(
            integrand,
            -0.5 * math.pi,
            0.5 * math.pi,
            epsabs=1e-12,
            epsrel=1e-10,
            limit=200,
        )
    return value


def dos_deformed(s: float, lam_tilde: float) -> float:
    """Density of 2*(cos(q*kx) + lam_tilde*cos(q*ky)) over uniform momenta.

    Computed as the convolution of the two arcsine laws, split into the
    sub-cases dictated by which square-root factor is singular at each
    integration endpoint; the cancelled factors are removed analytically so
    the substituted integrand stays bounded.  lam_tilde = 1 delegates to
    :func:`dos_free`.  The value at the interior logarithmic singularity
    |s| = |2*lam_tilde - 2| is math.inf; at the support edge the finite
    inner limit 1/(4*pi*sqrt(lam_tilde)) is returned, mirroring dos_free.
    """
    if not lam_tilde > 0.0:
        raise DomainError(f"lam_tilde must be positive, got {lam_tilde}")
    if lam_tilde == 1.0:
        return dos_free(s)
    x = abs(s)
    lt = lam_tilde
    edge = 2.0 * (1.0 + lt)
    pinch = abs(2.0 * lt - 2.0)  # interior van Hove point
    if x > edge:
        return 0.0
    if x == edge:
        return 1.0 / (4.0 * math.pi * math.sqrt(lt))
    if x == pinch:
        return math.inf
    if x > pinch:
        # one endpoint from each factor: [x-2, 2*lt]
        value = _convolution_piece(
            x - 2.0, 2.0 * lt, lambda t: 1.0 / math.sqrt((2.0 + x - t) * (2.0 * lt + t))
        )
    elif lt > 1.0:
        # both endpoints from the narrow factor: [x-2, x+2]
        value = _convolution_piece(
            x - 2.0, x + 2.0, lambda t: 1.0 / math.sqrt(4.0 * lt * lt - t * t)
        )
    else:
        # both endpoints from the wide factor: [-2*lt, 2*lt]
        value = _convolution_piece(
            -2.0 * lt, 2.0 * lt, lambda t: 1.0 / math.sqrt(4.0 - (x - t) * (x - t))
        )
    return value / math.pi**2


@dataclass(frozen=True)
class DensityProfile:
    """Tabulated density of states for one deformation parameter lam_tilde."""

    lam_tilde: float

    def __post_init__(self) -> None:
        if not self.lam_tilde > 0.0:
            raise DomainError(f"lam_tilde must be positive, got {self.lam_tilde}")

    @property
    def support_half_width(self) -> float:
        return 2.0 * (1.0 + self.lam_tilde)

    @property
    def interior_singularities(self) -> tuple[float, ...]:
        """Signed s values where the density diverges logarithmically."""
        pinch = abs(2.0 * self.lam_tilde - 2.0)
        return (-pinch, pinch) if pinch > 0.0 else (0.0,)

    def density(self, s: float) -> float:
        return dos_deformed(s, self.lam_tilde)


def dos_moment_exact(k: int, lam_tilde: float) -> float:
    """Closed-form moment binom(2k,k) * sum_{k1} binom(k,k1)**2 lam_tilde**(2k1).

    Ground truth against which quadrature moments are tested; it is the same
    weight that deforms the +/-s trace into the full quantum trace.
    """
    if k < 0:
        raise ValueError(f"moment index must be nonnegative, got {k}")
    return central_factor(k, lam_tilde)


def dos_moment(profile: DensityProfile, k: int) -> float:
    """2k-th moment of the density by adaptive quadrature over the support.

    The integration is split at the interior logarithmic singularities so
    QUADPACK only ever meets them as subinterval endpoints.
    """
    if k < 0:
        raise ValueError(f"moment index must be nonnegative, got {k}")
    edge = profile.support_half_width
    interior = [p for p in profile.interior_singularities if -edge < p < edge]

    def integrand(s: float) -> float:
        return s ** (2 * k) * profile.density(s)

    with warnings.catch_warnings():
        # roundoff chatter next to the integrable log singularities; accuracy
        # is enforced against the closed-form moments, not the estimate
        warnings.simplefilter("ignore", IntegrationWarning)
        value, _ = quad(
            integrand,
            -edge,
            edge,
            points=interior or None,
            epsabs=1e-8,
            epsrel=1e-8,
            limit=400,
        )
    return value


# minimum tanh-sinh node count per smooth piece for the trace integral
MIN_QUADRATURE_NODES = 32
_TANH_SINH_CUTOFF = 3.0


@functools.lru_cache(maxsize=256)
def _density_table(
    lam_tilde: float, nodes: int
) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """Fixed tanh-sinh abscissas over the support with density-weighted weights.

    The support is split at the interior singularities; each smooth piece
    gets its own tanh-sinh rule, whose nodes cluster double-exponentially at
    the endpoints and absorb the integrable log divergences there.
    """
    profile = DensityProfile(lam_tilde)
    edge = profile.support_half_width
    cuts = sorted(
        {-edge, edge, *(p for p in profile.interior_singularities if -edge < p < edge)}
    )
    u = np.linspace(-_TANH_SINH_CUTOFF, _TANH_SINH_CUTOFF, nodes)
    step = u[1] - u[0]
    sinh_u = 0.5 * math.pi * np.sinh(u)
    base_x = np.tanh(sinh_u)
    base_w = step * 0.5 * math.pi * np.cosh(u) / np.cosh(sinh_u) ** 2
    abscissas: list[float] = []
    weights: list[float] = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        for x, w in zip(base_x, base_w):
            # for extremely narrow pieces rounding can push a node onto a
            # singular cut; clamp strictly inside and drop exact collisions
            # (their true contribution is O(w * log) and the piece mass is
            # already negligible when that happens)
            s = min(max(mid + half * x, math.nextafter(a, b)), math.nextafter(b, a))
            rho = profile.density(s)
            if not math.isfinite(rho):
                continue
            abscissas.append(s)
            weights.append(half * w * rho)
    return tuple(abscissas), tuple(weights)


def integrate_point_traces(
    flux: Flux, lam: float, n: int, quadrature_nodes: int = 160
) -> float:
    """Recover the full quantum trace by integrating +/-s traces against the density.

    The trace factor is an even polynomial in s, evaluated from its
    coefficient expansion at cached quadrature abscissas.  When q > n/2 the
    factor is constant in s and the integral reduces to normalization times
    the mid-band trace.
    """
    if quadrature_nodes < MIN_QUADRATURE_NODES:
        raise ValueError(
            f"need at least {MIN_QUADRATURE_NODES} nodes, got {quadrature_nodes}"
        )
    if n % 2:
        return 0.0
    lt = lambda_tilde(lam, flux.q)
    poly = cached_polynomial(flux, lam)
    coeffs = pm_s_coefficients(poly, n)
    abscissas, weights = _density_table(lt, quadrature_nodes)
    total = 0.0
    for s, w in zip(abscissas, weights):
        s2 = s * s
        value = 0.0
        for t in reversed(coeffs):
            value = value * s2 + t
        total += w * value
    return total


def integrate_point_traces_exact(flux: Flux, lam: float, n: int) -> float:
    """Same recovery with the quadrature replaced by the closed-form moments.

    Pairs each s**(2k) coefficient of the +/-s trace with the exact 2k-th
    density moment, so the only error is floating-point reassociation.
    """
    if n % 2:
        return 0.0
    lt = lambda_tilde(lam, flux.q)
    poly = cached_polynomial(flux, lam)
    coeffs = pm_s_coefficients(poly, n)
    return sum(t * dos_moment_exact(k, lt) for k, t in enumerate(coeffs))
