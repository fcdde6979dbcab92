"""Selecting parameters for the small full-period generators.

The criterion is the exact star discrepancy of all overlapping pairs over one full
period.  For small moduli every candidate is scored; for large ones a cheap proxy
picks a shortlist first.
"""

from __future__ import annotations

import numpy as np

from .discrepancy import overlapping_tuples, star_discrepancy
from .streams import (LcgParams, LfsrParams, default_lfsr_step, generator_cycle,
                      is_primitive_gf2, primitive_roots)

EXHAUSTIVE_LIMIT = 5000


def pair_discrepancy(params, exact: bool = True) -> float:
    u = generator_cycle(params)
    pts = overlapping_tuples(u, 2, cyclic=True)
    budget = float("inf") if exact else 1
    return star_discrepancy(pts, budget=budget).star


def spectral_2d(m: int, a: int) -> float:
    """Length of the shortest nonzero vector of the dual lattice of ``(1, a) mod m``."""
    u = np.array([m, 0], dtype=object)
    v = np.array([-a, 1], dtype=object)
    norm = lambda w: w[0] * w[0] + w[1] * w[1]  # noqa: E731
    if norm(u) < norm(v):
        u, v = v, u
    while True:
        q = round((u[0] * v[0] + u[1] * v[1]) / norm(v))
        u = u - q * v
        if norm(u) >= norm(v):
            break
        u, v = v, u
    return float(norm(v)) ** 0.5


def primitive_polynomials(degree: int) -> list[int]:
    """Tap masks of all primitive polynomials of the given degree over GF(2)."""
    return [t for t in range(1, 1 << degree, 2) if is_primitive_gf2(t, degree)]


def search_lcg(m: int, shortlist: int = 16, candidates=None):
    """Rank primitive roots of ``m``; returns ``[(pair discrepancy, multiplier), ...]``."""
    roots = list(candidates) if candidates is not None else primitive_roots(m)
    if len(roots) > shortlist and m > EXHAUSTIVE_LIMIT:
        roots = sorted(roots, key=lambda a: -spectral_2d(m, a))[:shortlist]
    scored = [(pair_discrepancy(LcgParams(m, a)), a) for a in roots]
    return sorted(scored)


def search_lfsr(degree: int, width: int | None = None, shortlist: int = 16):
    """Rank primitive polynomials; returns ``[(pair discrepancy, taps), ...]``."""
    width = width or degree
    step = default_lfsr_step(degree, width)
    polys = primitive_polynomials(degree)
    make = lambda t: LfsrParams(degree, t, width, step)  # noqa: E731
    if len(polys) > shortlist and (1 << degree) > EXHAUSTIVE_LIMIT:
        polys = sorted(polys, key=lambda t: pair_discrepancy(make(t), exact=False))[:shortlist]
    return sorted((pair_discrepancy(make(t)), t) for t in polys)
