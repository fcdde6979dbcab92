"""Nonuniform generation by inversion.

Every generator here is a deterministic function of uniforms in (0, 1), which is what
lets a CUD sequence stand in for IID draws.  Functions broadcast over array inputs.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import special

from .errors import DimensionMismatch, DomainError

POSITIVE = "positive"
NEGATIVE = "negative"

# Stand-in for +-infinity when a quantile is requested at u = 0 or 1.
LARGE = 1e12
ENDPOINT_TOL = 1e-15


class ExtendedValueWarning(RuntimeWarning):
    """A quantile was evaluated at or next to an endpoint of (0, 1)."""


def _check_open(u, name="u"):
    u = np.asarray(u, dtype=np.float64)
    if np.any(~(u > 0.0) | ~(u < 1.0)):
        raise DomainError(f"{name} must lie in the open interval (0, 1)")
    return u


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def normal_cdf(x):
    return _out(special.ndtr(x))


def normal_pdf(x):
    x = np.asarray(x, dtype=np.float64)
    return _out(np.exp(-0.5 * x * x) / np.sqrt(2.0 * np.pi))


def normal_quantile(u, *, extended: bool = False):
    """Inverse of the standard normal CDF.

    With ``extended=True``, ``u = 0`` and ``u = 1`` are accepted and map to
    ``-LARGE`` and ``+LARGE`` with an :class:`ExtendedValueWarning`.
    """
    if extended:
        u = np.asarray(u, dtype=np.float64)
        if np.any((u < 0.0) | (u > 1.0) | np.isnan(u)):
            raise DomainError("u must lie in [0, 1]")
        x = special.ndtri(u)
        if np.any(np.isinf(x)):
            warnings.warn("normal quantile at an endpoint clamped to +-LARGE",
                          ExtendedValueWarning, stacklevel=2)
            x = np.clip(x, -LARGE, LARGE)
        return _out(x)
    return _out(special.ndtri(_check_open(u)))


def gamma_quantile(shape, rate, u):
    """Quantile of Gamma(shape, rate) by inverting the regularized incomplete gamma."""
    u = _check_open(u)
    x = special.gammaincinv(shape, u) / rate
    if np.any(np.isnan(x)):
        raise DomainError("gamma quantile inversion failed to converge")
    return _out(x)


def truncated_normal_inverse(mean, side, u):
    """Inversion for N(mean, 1) truncated to (0, inf) (``POSITIVE``) or (-inf, 0].

    Evaluated in log space so that extreme means do not cancel:
    ``mean - Phi^{-1}((1-u) Phi(mean))`` for the positive side and
    ``mean + Phi^{-1}(u Phi(-mean))`` for the negative side, which are algebraically
    the usual ``mean + Phi^{-1}(Phi(-mean) + u Phi(mean))`` and its mirror.
    """
    u = _check_open(u)
    mean = np.asarray(mean, dtype=np.float64)
    if np.any((u < ENDPOINT_TOL) | (1.0 - u < ENDPOINT_TOL)):
        warnings.warn("truncated normal inversion within 1e-15 of an endpoint",
                      ExtendedValueWarning, stacklevel=2)
    if side == POSITIVE:
        z = mean - special.ndtri_exp(np.log1p(-u) + special.log_ndtr(mean))
        z = np.maximum(z, np.finfo(float).tiny)
    elif side == NEGATIVE:
        z = mean + special.ndtri_exp(np.log(u) + special.log_ndtr(-mean))
        z = np.minimum(z, 0.0)
    else:
        raise ValueError(f"side must be {POSITIVE!r} or {NEGATIVE!r}")
    return _out(z)


@dataclass
class RosenblattSpec:
    """Sequential conditional quantiles ``x_j = F_j^{-1}(u_j; x_1..x_{j-1})``.

    ``conditionals[j](u_j, prev)`` receives ``prev`` with shape ``(..., j)``.  Each
    must be monotone in ``u_j``; continuity in ``prev`` is the caller's obligation.
    """

    conditionals: Sequence[Callable]

    @property
    def s(self) -> int:
        return len(self.conditionals)


def inverse_rosenblatt(spec: RosenblattSpec, u):
    u = np.asarray(u, dtype=np.float64)
    if u.shape[-1] != spec.s:
        raise DimensionMismatch(f"expected {spec.s} uniforms, got {u.shape[-1]}")
    x = np.empty_like(u)
    for j, f in enumerate(spec.conditionals):
        x[..., j] = f(u[..., j], x[..., :j])
    return x


def bivariate_normal_rosenblatt(rho: float) -> RosenblattSpec:
    """Standard bivariate normal with correlation ``rho``, first coordinate first."""
    if not -1.0 < rho < 1.0:
        raise DomainError("rho must lie in (-1, 1)")
    scale = np.sqrt(1.0 - rho * rho)
    return RosenblattSpec([
        lambda u, prev: normal_quantile(u),
        lambda u, prev: rho * prev[..., 0] + scale * normal_quantile(u),
    ])
