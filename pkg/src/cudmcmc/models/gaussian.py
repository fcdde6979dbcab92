"""Toy Gaussian targets: bivariate normal Gibbs and normal MIS/RWM samplers."""

from __future__ import annotations

import numpy as np
from scipy import special

from ..errors import DomainError
from ..generators import bivariate_normal_rosenblatt, normal_quantile
from ..samplers import (IndependenceSampler, RandomWalkMetropolis, SystematicScanGibbs)


def log_normal(x):
    x = np.asarray(x, dtype=np.float64)
    return float(-0.5 * np.sum(x * x) - 0.5 * x.size * np.log(2.0 * np.pi))


def bivariate_normal_gibbs(rho: float) -> SystematicScanGibbs:
    """Two-block Gibbs sampler for the standard bivariate normal with correlation ``rho``.

    Works on stacked states of shape ``(..., 2)``.
    """
    if not -1.0 < rho < 1.0:
        raise DomainError("rho must lie in (-1, 1)")
    scale = np.sqrt(1.0 - rho * rho)

    def first(x, u):
        return rho * x[..., 1:2] + scale * special.ndtri(u)

    def second(x, u):
        return rho * x[..., 0:1] + scale * special.ndtri(u)

    gibbs = SystematicScanGibbs([(1, first), (1, second)], vectorized=True)
    gibbs.rho = rho
    gibbs.rosenblatt = bivariate_normal_rosenblatt(rho)
    return gibbs


def normal_mis_exact() -> IndependenceSampler:
    """MIS for N(0, 1) proposing from N(0, 1) itself, so every proposal is accepted."""
    return IndependenceSampler(log_normal, lambda v: normal_quantile(v),
                               log_normal, state_dim=1, innovation_dim=2)


def normal_mis_t(df: float = 3.0, scale: float = 1.5) -> IndependenceSampler:
    """MIS for N(0, 1) with a scaled Student-t proposal.

    The t tails dominate the normal ones, so ``pi / p`` is bounded and the sampler has
    a coupling region.
    """
    const = (special.gammaln((df + 1) / 2) - special.gammaln(df / 2)
             - 0.5 * np.log(df * np.pi) - np.log(scale))

    def t_logpdf(x):
        z = np.asarray(x, dtype=np.float64) / scale
        return const - 0.5 * (df + 1) * np.log1p(z * z / df)

    def ppf(v):
        return scale * special.stdtrit(df, v)

    def weight(x):
        x = np.asarray(x, dtype=np.float64)
        return np.exp(-0.5 * x * x - 0.5 * np.log(2.0 * np.pi) - t_logpdf(x))

    sampler = IndependenceSampler(log_normal, ppf, lambda x: float(np.sum(t_logpdf(x))),
                                  state_dim=1, innovation_dim=2)
    sampler.proposal_ppf = ppf
    sampler.proposal_logpdf = t_logpdf
    sampler.weight = weight
    return sampler


def normal_rwm(step: float = 1.0) -> RandomWalkMetropolis:
    """RWM for N(0, 1) with a symmetric normal increment ``step * Phi^{-1}(v)``."""
    return RandomWalkMetropolis(log_normal, lambda v: step * normal_quantile(v),
                                state_dim=1, innovation_dim=2)
