"""Gamma-Poisson hierarchy for the ten-pump failure data.

    s_i | lambda_i ~ Poisson(lambda_i t_i)
    lambda_i | beta ~ Gamma(alpha, beta)
    beta ~ Gamma(gamma, delta)

Both full conditionals are gamma, so the Gibbs sampler inverts
``lambda_i ~ Gamma(s_i + alpha, t_i + beta)`` and
``beta ~ Gamma(gamma + 10 alpha, delta + sum(lambda))`` with one uniform each.
The state is ``(lambda_1, ..., lambda_10, beta)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources

import numpy as np
from scipy import special

from ..errors import DomainError, InvalidState
from ..samplers import UpdateFunction

DATA_FILE = "pumps.csv"


def _read(path):
    if path is None:
        return resources.files("cudmcmc.models.data").joinpath(DATA_FILE).read_text()
    with open(path) as fh:
        return fh.read()


def load_pump_data(path=None):
    """Read counts and exposure times, plus hyperparameters from the header comments."""
    text = _read(path)
    hyper = {}
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            for key, val in re.findall(r"(\w+)=([0-9.eE+-]+)", line):
                hyper[key] = float(val)
            continue
        if line.lower().startswith("pump"):
            continue
        _, s, t = line.split(",")
        rows.append((float(s), float(t)))
    s, t = np.array(rows).T
    return s, t, hyper


@dataclass(frozen=True)
class PumpModel:
    counts: np.ndarray
    times: np.ndarray
    alpha: float = 1.802
    gamma: float = 0.01
    delta: float = 1.0
    names: tuple = field(default=(), compare=False)

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.float64)
        times = np.asarray(self.times, dtype=np.float64)
        if counts.shape != times.shape or counts.ndim != 1:
            raise ValueError("counts and times must be 1-d arrays of equal length")
        if np.any(counts < 0) or np.any(times <= 0):
            raise DomainError("counts must be >= 0 and times > 0")
        if min(self.alpha, self.gamma, self.delta) <= 0:
            raise DomainError("hyperparameters must be positive")
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "times", times)
        if not self.names:
            names = tuple(f"lambda{i + 1}" for i in range(counts.size)) + ("beta",)
            object.__setattr__(self, "names", names)

    @classmethod
    def from_csv(cls, path=None, **overrides):
        s, t, hyper = load_pump_data(path)
        hyper.update(overrides)
        keys = ("alpha", "gamma", "delta")
        return cls(s, t, **{k: hyper[k] for k in keys if k in hyper})

    @property
    def k(self) -> int:
        return self.counts.size

    @property
    def dim(self) -> int:
        return self.k + 1

    def initial_state(self) -> np.ndarray:
        """Crude start: rates at ``s / t`` and the prior-mean hyperparameter."""
        rates = (self.counts + self.alpha) / (self.times + 1.0)
        return np.r_[rates, self.gamma / self.delta + 1.0]


def _gamma_inv(shape, u):
    x = special.gammaincinv(shape, u)
    if np.any(np.isnan(x)):
        raise DomainError("gamma quantile inversion failed to converge")
    return x


class PumpGibbs(UpdateFunction):
    """Systematic-scan Gibbs: the ten rates (one uniform each) then the hyperparameter.

    Accepts stacked states ``(..., 11)`` with innovations ``(..., 11)``.
    """

    kind = "gibbs"
    vectorized = True

    def __init__(self, model: PumpModel):
        self.model = model
        self.state_dim = self.innovation_dim = model.dim
        self._rate_shape = model.counts + model.alpha
        self._beta_shape = model.gamma + model.k * model.alpha

    def __call__(self, x, u):
        u = self._check(u)
        x = np.asarray(x, dtype=np.float64)
        beta = x[..., -1:]
        if np.any(beta <= 0):
            raise InvalidState("hyperparameter must be positive")
        m = self.model
        rates = _gamma_inv(self._rate_shape, u[..., :-1]) / (m.times + beta)
        beta = _gamma_inv(self._beta_shape, u[..., -1:]) / (
            m.delta + rates.sum(axis=-1, keepdims=True))
        return np.concatenate([rates, beta], axis=-1)


def pump_gibbs_update(model: PumpModel, state, u):
    return PumpGibbs(model)(state, u)
