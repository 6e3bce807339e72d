"""Spectral moment traces of the Hofstadter and almost Mathieu operators.

At rational flux p/q the q-band spectrum is governed by a single polynomial
of degree q in the energy; its coefficient table turns spectral moments
into finite partition sums.  This package builds that table two independent
ways, evaluates the mid-band, point-spectrum and full quantum traces in
closed form, recovers full traces by integrating point traces against the
lattice density of states, and checks everything against eigensolver,
momentum-quadrature and lattice-walk oracles.
"""

from .chambers import (
    BuildingBlock,
    ChambersPolynomial,
    building_block,
    chambers_nested,
    chambers_recursive,
    eval_energy_polynomial,
)
from .core import (
    Coupling,
    DegenerateTerm,
    Flux,
    InvalidCoupling,
    InvalidFlux,
    PartitionTerm,
    enumerate_partition_terms,
    lambda_tilde,
    make_flux,
    multinomial_weight,
)
from .dos import (
    DensityProfile,
    DomainError,
    dos_deformed,
    dos_free,
    dos_moment,
    dos_moment_exact,
    elliptic_k,
    integrate_point_traces,
    integrate_point_traces_exact,
)
from .oracle import (
    InsufficientGridWarning,
    RangeError,
    TooLarge,
    band_energies,
    bz_trace,
    eigenvalues,
    point_spectrum_roots,
    secular_matrix,
    walk_trace,
    walk_trace_table,
)
from .traces import (
    DegeneratePolynomial,
    SpectralRangeWarning,
    TraceKind,
    TraceMethod,
    TraceRecord,
    almost_mathieu_trace,
    hofstadter_trace,
    midband_trace,
    newton_power_sums,
    pm_s_coefficients,
    pm_s_trace,
    trace_series,
    trace_sum_rule,
)

__version__ = "0.1.0"

__all__ = [
    "BuildingBlock",
    "ChambersPolynomial",
    "Coupling",
    "DegeneratePolynomial",
    "DegenerateTerm",
    "DensityProfile",
    "DomainError",
    "Flux",
    "InsufficientGridWarning",
    "InvalidCoupling",
    "InvalidFlux",
    "PartitionTerm",
    "RangeError",
    "SpectralRangeWarning",
    "TooLarge",
    "TraceKind",
    "TraceMethod",
    "TraceRecord",
    "almost_mathieu_trace",
    "band_energies",
    "building_block",
    "bz_trace",
    "chambers_nested",
    "chambers_recursive",
    "dos_deformed",
    "dos_free",
    "dos_moment",
    "dos_moment_exact",
    "eigenvalues",
    "elliptic_k",
    "enumerate_partition_terms",
    "eval_energy_polynomial",
    "hofstadter_trace",
    "integrate_point_traces",
    "integrate_point_traces_exact",
    "lambda_tilde",
    "make_flux",
    "midband_trace",
    "multinomial_weight",
    "newton_power_sums",
    "pm_s_coefficients",
    "pm_s_trace",
    "point_spectrum_roots",
    "secular_matrix",
    "trace_series",
    "trace_sum_rule",
    "walk_trace",
    "walk_trace_table",
]
