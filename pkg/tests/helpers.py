"""Shared helpers for the test suite."""

import math


def rel_err(a: float, b: float) -> float:
    """Deviation scaled by the larger magnitude, floored at 1."""
    return abs(a - b) / max(1.0, abs(a), abs(b))


def proper_fluxes(q_max: int) -> list[tuple[int, int]]:
    """All coprime pairs 1 <= p < q <= q_max."""
    return [
        (p, q)
        for q in range(2, q_max + 1)
        for p in range(1, q)
        if math.gcd(p, q) == 1
    ]


def all_fluxes(q_max: int) -> list[tuple[int, int]]:
    """Proper fluxes plus the zero-flux representative."""
    return [(0, 1)] + proper_fluxes(q_max)
