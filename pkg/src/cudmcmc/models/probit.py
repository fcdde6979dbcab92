"""Probit regression by data augmentation, ``Z = X beta + eps`` with ``Y = 1{Z > 0}``.

With a flat prior on ``beta`` the Gibbs sampler alternates

    Z_i | beta ~ N(x_i' beta, 1) truncated to the side given by y_i
    beta | Z ~ N((X'X)^{-1} X'Z, (X'X)^{-1})

and both draws are inversions, so one step uses ``n + p`` uniforms: the first ``n``
for ``Z`` and the last ``p`` for ``beta``.  The state is stored as ``(beta, Z)``.
"""

from __future__ import annotations

from importlib import resources

import numpy as np
from scipy import special

from ..errors import DimensionMismatch, DomainError, InvalidState
from ..generators import NEGATIVE, POSITIVE, normal_pdf, truncated_normal_inverse
from ..samplers import UpdateFunction

SYNTHETIC_FILE = "probit_synthetic.csv"


def load_probit_csv(path=None):
    """Columns ``x0..x{p-1}`` then ``y``; lines starting with ``#`` are comments."""
    if path is None:
        text = resources.files("cudmcmc.models.data").joinpath(SYNTHETIC_FILE).read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    body = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    return body[:, :-1], body[:, -1]


class ProbitModel:
    """Design ``X`` (n x p, rank p) and binary responses ``y``, with cached factors."""

    def __init__(self, X, y):
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        y = np.asarray(y)
        if y.shape != (X.shape[0],):
            raise DimensionMismatch("y must have one entry per row of X")
        if not np.all((y == 0) | (y == 1)):
            raise DomainError("responses must be 0 or 1")
        if np.linalg.matrix_rank(X) < X.shape[1]:
            raise DomainError("X must have full column rank")
        self.X = X
        self.y = y.astype(bool)
        self.xtx = X.T @ X
        w, v = np.linalg.eigh(self.xtx)
        self.xtx_inv = (v / w) @ v.T
        self.hat = self.xtx_inv @ X.T
        self.root_inv = (v / np.sqrt(w)) @ v.T

    @classmethod
    def from_csv(cls, path=None):
        return cls(*load_probit_csv(path))

    @classmethod
    def synthetic(cls):
        """The shipped deterministic test problem (n=20, p=3)."""
        return cls.from_csv(None)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    def split(self, state):
        state = np.asarray(state, dtype=np.float64)
        return state[..., :self.p], state[..., self.p:]

    def sign_consistent(self, z) -> bool:
        z = np.asarray(z)
        return bool(np.all(np.where(self.y, z > 0, z <= 0)))

    # -- the two conditional draws ---------------------------------------------

    def z_update(self, beta, u):
        u = np.asarray(u, dtype=np.float64)
        if u.shape[-1] != self.n:
            raise DimensionMismatch(f"Z update needs {self.n} uniforms")
        mean = np.asarray(beta, dtype=np.float64) @ self.X.T
        pos = truncated_normal_inverse(mean, POSITIVE, u)
        neg = truncated_normal_inverse(mean, NEGATIVE, u)
        return np.where(self.y, pos, neg)

    def beta_update(self, z, u):
        u = np.asarray(u, dtype=np.float64)
        if u.shape[-1] != self.p:
            raise DimensionMismatch(f"beta update needs {self.p} uniforms")
        return np.asarray(z) @ self.hat.T + special.ndtri(u) @ self.root_inv.T

    def recover_u(self, beta, z):
        """Invert the Z update: the uniforms that map ``beta`` to ``z``."""
        mean = np.asarray(beta) @ self.X.T
        z = np.asarray(z)
        # (Phi(z - m) - Phi(-m)) / Phi(m) rewritten without the cancellation
        pos = -np.expm1(special.log_ndtr(mean - z) - special.log_ndtr(mean))
        neg = np.exp(special.log_ndtr(z - mean) - special.log_ndtr(-mean))
        return np.where(self.y, pos, neg)

    # -- contraction quantities -------------------------------------------------

    def lam(self, beta, z, u):
        """Derivative factors ``dZ_i / d(x_i' beta)`` of the Z update, each in [0, 1)."""
        mean = np.asarray(beta) @ self.X.T
        u = np.asarray(u)
        dens = normal_pdf(np.asarray(z) - mean)
        pos = 1.0 - (1.0 - u) * normal_pdf(mean) / dens
        neg = 1.0 - u * normal_pdf(-mean) / dens
        return np.where(self.y, pos, neg)

    def lam_mills(self, beta, z):
        """Same factors through ``tau = phi / Phi``; needs no uniforms."""
        mean = np.asarray(beta) @ self.X.T
        z = np.asarray(z)

        def tau(x):
            return np.exp(-0.5 * x * x - 0.5 * np.log(2.0 * np.pi) - special.log_ndtr(x))

        pos = 1.0 - tau(mean) / tau(mean - z)
        neg = 1.0 - tau(-mean) / tau(z - mean)
        return np.where(self.y, pos, neg)

    def d1(self, beta, beta2):
        diff = np.asarray(beta) - np.asarray(beta2)
        return float(np.sqrt(max(diff @ self.xtx @ diff, 0.0)))

    def d2(self, z, z2):
        return float(np.linalg.norm(np.asarray(z) - np.asarray(z2)))

    def distance(self, a, b):
        """``max(d1, d2)`` on stacked ``(beta, Z)`` states."""
        ba, za = self.split(a)
        bb, zb = self.split(b)
        return max(self.d1(ba, bb), self.d2(za, zb))


def probit_metrics(model: ProbitModel):
    return model.d1, model.d2


def probit_z_update(model, beta, u):
    return model.z_update(beta, u)


def probit_beta_update(model, z, u):
    return model.beta_update(z, u)


def probit_lambda(model, beta, z, u):
    return model.lam(beta, z, u)


class ProbitGibbs(UpdateFunction):
    """One Gibbs step ``(beta, Z) -> (beta', Z')``: Z from the old beta, then beta."""

    kind = "gibbs"

    def __init__(self, model: ProbitModel):
        self.model = model
        self.state_dim = self.innovation_dim = self.model.n + self.model.p

    def __call__(self, x, u):
        u = self._check(u)
        m = self.model
        beta, _ = m.split(x)
        z = m.z_update(beta, u[..., :m.n])
        if not m.sign_consistent(z):
            raise InvalidState("Z update broke the sign constraint")
        beta = m.beta_update(z, u[..., m.n:])
        return np.concatenate([beta, z], axis=-1)
