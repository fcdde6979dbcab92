"""MCMC update functions ``x' = phi(x, u)`` and the chain runner.

An update consumes exactly ``innovation_dim`` uniforms per step and nothing else, so
that a CUD stream read in consecutive blocks lines up with the chain's steps.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import DimensionMismatch, InvalidState

MH = "metropolis_hastings"
MIS = "independence"
RWM = "random_walk"
GIBBS = "gibbs"
SLICE = "slice"


class UpdateFunction:
    """Deterministic transition ``phi(x, u)``.

    Subclasses set ``state_dim`` and ``innovation_dim`` and implement ``__call__``.
    ``vectorized`` updates also accept stacked states ``(..., s)`` with innovations
    ``(..., d)``.
    """

    state_dim: int
    innovation_dim: int
    kind: str = "custom"
    vectorized: bool = False

    def __call__(self, x, u):
        raise NotImplementedError

    def _check(self, u):
        u = np.asarray(u, dtype=np.float64)
        if u.shape[-1] != self.innovation_dim:
            raise DimensionMismatch(
                f"{self.kind} update needs {self.innovation_dim} uniforms, got {u.shape[-1]}")
        return u


class FunctionUpdate(UpdateFunction):
    """Wrap a plain callable ``f(x, u)`` as an update."""

    def __init__(self, fn, state_dim, innovation_dim, kind="custom", vectorized=False):
        self.fn = fn
        self.state_dim = state_dim
        self.innovation_dim = innovation_dim
        self.kind = kind
        self.vectorized = vectorized

    def __call__(self, x, u):
        return np.asarray(self.fn(np.asarray(x, dtype=np.float64), self._check(u)),
                          dtype=np.float64)


def _log_density(f, x, what):
    v = float(f(x))
    if np.isnan(v):
        raise InvalidState(f"{what} log-density is NaN at {x}")
    return v


class MetropolisHastings(UpdateFunction):
    """Generic Metropolis-Hastings.

    ``proposal(x, v)`` maps the first ``d - 1`` uniforms to a proposal ``y``;
    ``log_proposal(y, x)`` is ``log p(y | x)``.  The last uniform decides acceptance.
    """

    kind = MH

    def __init__(self, log_target, proposal, log_proposal, state_dim, innovation_dim):
        if innovation_dim < 2:
            raise ValueError("Metropolis-Hastings needs at least one proposal uniform")
        self.log_target = log_target
        self.proposal = proposal
        self.log_proposal = log_proposal
        self.state_dim = state_dim
        self.innovation_dim = innovation_dim

    def _log_ratio(self, x, y, lx):
        ly = _log_density(self.log_target, y, "target")
        if ly == -np.inf:
            return -np.inf
        fwd = _log_density(lambda z: self.log_proposal(z, x), y, "proposal")
        if fwd == -np.inf:
            raise InvalidState("generated proposal has zero proposal density")
        back = _log_density(lambda z: self.log_proposal(z, y), x, "reverse proposal")
        return ly + back - lx - fwd

    def propose(self, x, u):
        return np.atleast_1d(np.asarray(self.proposal(x, u[:-1]), dtype=np.float64))

    def acceptance(self, x, u) -> float:
        """``A(x, u) = min(1, pi(y) p(x|y) / (pi(x) p(y|x)))``."""
        x = np.atleast_1d(np.asarray(x, dtype=np.float64))
        u = self._check(u)
        lx = _log_density(self.log_target, x, "target")
        if lx == -np.inf:
            raise InvalidState(f"current state {x} has zero target density")
        return float(np.exp(min(0.0, self._log_ratio(x, self.propose(x, u), lx))))

    def __call__(self, x, u):
        x = np.atleast_1d(np.asarray(x, dtype=np.float64))
        u = self._check(u)
        y = self.propose(x, u)
        return y if u[-1] <= self.acceptance(x, u) else x


class IndependenceSampler(MetropolisHastings):
    """Metropolized independence sampler: the proposal ``psi(v)`` ignores ``x``.

    Acceptance uses the importance weights ``w = pi / p``: ``min(1, w(y) / w(x))``.
    """

    kind = MIS

    def __init__(self, log_target, proposal, log_proposal_density, state_dim, innovation_dim):
        super().__init__(log_target, lambda x, v: proposal(v),
                         lambda y, x: log_proposal_density(y), state_dim, innovation_dim)
        self.independent_proposal = proposal
        self.log_proposal_density = log_proposal_density

    def log_weight(self, x) -> float:
        lt = _log_density(self.log_target, x, "target")
        if lt == -np.inf:
            return -np.inf
        return lt - _log_density(self.log_proposal_density, x, "proposal")

    def acceptance(self, x, u) -> float:
        x = np.atleast_1d(np.asarray(x, dtype=np.float64))
        u = self._check(u)
        wx = self.log_weight(x)
        if wx == -np.inf:
            raise InvalidState(f"current state {x} has zero target density")
        y = self.propose(x, u)
        if _log_density(self.log_proposal_density, y, "proposal") == -np.inf:
            raise InvalidState("generated proposal has zero proposal density")
        wy = self.log_weight(y)
        return 0.0 if wy == -np.inf else float(np.exp(min(0.0, wy - wx)))


class RandomWalkMetropolis(MetropolisHastings):
    """Random-walk Metropolis ``y = x + psi(v)``.

    ``log_increment_density`` is the density of the increment; leave it ``None`` for a
    symmetric increment, in which case the acceptance is ``min(1, pi(y) / pi(x))``.
    """

    kind = RWM

    def __init__(self, log_target, increment, state_dim, innovation_dim,
                 log_increment_density=None):
        g = log_increment_density
        log_q = (lambda y, x: 0.0) if g is None else (lambda y, x: g(np.asarray(y) - x))
        super().__init__(log_target, lambda x, v: x + increment(v), log_q,
                         state_dim, innovation_dim)
        self.increment = increment
        self.log_increment_density = g

    def acceptance(self, x, u) -> float:
        if self.log_increment_density is not None:
            return super().acceptance(x, u)
        x = np.atleast_1d(np.asarray(x, dtype=np.float64))
        u = self._check(u)
        lx = _log_density(self.log_target, x, "target")
        if lx == -np.inf:
            raise InvalidState(f"current state {x} has zero target density")
        ly = _log_density(self.log_target, self.propose(x, u), "target")
        return 0.0 if ly == -np.inf else float(np.exp(min(0.0, ly - lx)))


class SystematicScanGibbs(UpdateFunction):
    """Systematic-scan Gibbs over blocks of coordinates.

    ``blocks`` is a sequence of ``(size, generator)``; ``generator(x, u_j)`` returns the
    new values of block ``j`` given the current state, in which blocks ``< j`` already
    hold their new values.  Block ``j`` consumes ``size`` uniforms.
    """

    kind = GIBBS

    def __init__(self, blocks: Sequence[tuple[int, Callable]], vectorized: bool = False):
        self.blocks = list(blocks)
        self.vectorized = vectorized
        sizes = [k for k, _ in self.blocks]
        self._edges = np.cumsum([0] + sizes)
        self.state_dim = self.innovation_dim = int(self._edges[-1])

    def __call__(self, x, u):
        u = self._check(u)
        x = np.array(x, dtype=np.float64)
        for (k, gen), lo, hi in zip(self.blocks, self._edges[:-1], self._edges[1:]):
            x[..., lo:hi] = gen(x, u[..., lo:hi])
        return x


class InversiveSliceSampler(UpdateFunction):
    """Slice sampler on a bounded box, every conditional sampled by inversion.

    The state is ``(y, x_1, ..., x_s)``.  A step sets ``y' = u_1 pi(x)`` and then
    scans the coordinates, drawing ``x_j`` uniformly (by inversion) on
    ``{t : pi(x_1', ..., t, ..., x_s) >= y'}``.

    ``level_set(j, x, y)`` may return that set as a list of ``(lo, hi)`` intervals.
    By default it is located numerically from a grid of ``grid`` points refined with
    Brent's method, which assumes the set has no components narrower than the grid.
    """

    kind = SLICE

    def __init__(self, density, lower, upper, level_set=None, grid: int = 64):
        self.density = density
        self.lower = np.atleast_1d(np.asarray(lower, dtype=np.float64))
        self.upper = np.atleast_1d(np.asarray(upper, dtype=np.float64))
        self.s = self.lower.size
        self.state_dim = self.innovation_dim = self.s + 1
        self.level_set = level_set or self._numeric_level_set
        self.grid = grid

    def _numeric_level_set(self, j, x, y):
        lo, hi = self.lower[j], self.upper[j]
        z = x.copy()

        def f(t):
            z[j] = t
            return self.density(z) - y

        ts = np.linspace(lo, hi, self.grid)
        vals = np.array([f(t) for t in ts])
        inside = vals >= 0.0
        if inside.all():
            return [(lo, hi)]
        edges = []
        for i in range(ts.size - 1):
            if inside[i] != inside[i + 1]:
                edges.append(brentq(f, ts[i], ts[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps))
        cuts = np.r_[lo, edges, hi]
        out = []
        state = inside[0]
        for a, b in zip(cuts[:-1], cuts[1:]):
            if state and b > a:
                out.append((float(a), float(b)))
            state = not state
        return out

    def __call__(self, state, u):
        u = self._check(u)
        state = np.array(state, dtype=np.float64)
        y, x = state[0], state[1:]
        px = self.density(x)
        if y > px:
            raise InvalidState(f"slice height {y} exceeds density {px}")
        y = u[0] * px
        for j in range(self.s):
            intervals = self.level_set(j, x, y)
            lengths = np.array([b - a for a, b in intervals])
            total = lengths.sum()
            if total <= 0.0:
                continue
            target = u[j + 1] * total
            for (a, b), length in zip(intervals, lengths):
                if target <= length:
                    x[j] = a + target
                    break
                target -= length
            else:
                x[j] = intervals[-1][1]
        return np.r_[y, x]


def mh_step(sampler: UpdateFunction, x, u):
    return sampler(x, u)


mis_step = rwm_step = gibbs_step = slice_step = mh_step


# ---------------------------------------------------------------------------
# running chains


@dataclass
class ChainRun:
    """Result of a chain run.

    ``estimates`` averages each registered function over all ``n`` states, even when
    the stored trajectory is thinned.
    """

    n: int
    estimates: dict
    final_state: np.ndarray
    trajectory: np.ndarray | None = None
    thin: int = 0
    stream: object = None
    consumed: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def empty(self) -> bool:
        return self.n == 0

    def to_csv(self, path):
        if self.trajectory is None:
            raise ValueError("no trajectory was retained")
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["step"] + [f"x{j}" for j in range(self.trajectory.shape[1])])
            for i, row in enumerate(self.trajectory, start=1):
                w.writerow([i * self.thin] + [repr(float(v)) for v in row])


def run_chain(update: UpdateFunction, x0, stream, n: int, fns: dict | None = None,
              thin: int = 0, trajectory_path=None) -> ChainRun:
    """Iterate ``x_i = phi(x_{i-1}, u_i)`` for ``i = 1..n``.

    Reads exactly ``n * innovation_dim`` scalars from ``stream``.  ``fns`` maps names
    to functions of the state; the default is the identity (component means).  With
    ``thin=t`` every ``t``-th state is kept; ``trajectory_path`` additionally writes
    the kept states to CSV.
    """
    fns = {"mean": lambda x: x} if fns is None else fns
    d = update.innovation_dim
    x = np.array(x0, dtype=np.float64)
    if n == 0:
        nan = {k: np.full_like(np.asarray(f(x), dtype=float), np.nan) for k, f in fns.items()}
        return ChainRun(0, nan, x, None, thin, getattr(stream, "spec", None))
    us = stream.blocks(n, d)
    sums = {k: np.zeros_like(np.asarray(f(x), dtype=float)) for k, f in fns.items()}
    kept = []
    for i in range(n):
        try:
            x = update(x, us[i])
        except InvalidState as exc:
            raise InvalidState(str(exc), step=i + 1) from exc
        for k, f in fns.items():
            sums[k] += f(x)
        if thin and (i + 1) % thin == 0:
            kept.append(x.copy())
    estimates = {k: v / n for k, v in sums.items()}
    estimates = {k: float(v) if np.ndim(v) == 0 else v for k, v in estimates.items()}
    traj = np.array(kept) if thin else None
    run = ChainRun(n, estimates, x, traj, thin, getattr(stream, "spec", None), n * d)
    if trajectory_path is not None:
        run.to_csv(trajectory_path)
    return run


def run_batch(update: UpdateFunction, x0, blocks) -> np.ndarray:
    """Run ``R`` chains side by side; ``blocks`` has shape ``(R, n, d)``.

    Requires a vectorized update.  Returns the ``(R, s)`` component means.
    """
    if not update.vectorized:
        raise TypeError(f"{type(update).__name__} does not support batched states")
    blocks = np.asarray(blocks, dtype=np.float64)
    r, n, _ = blocks.shape
    x = np.broadcast_to(np.asarray(x0, dtype=np.float64), (r, update.state_dim)).copy()
    total = np.zeros_like(x)
    for i in range(n):
        x = update(x, blocks[:, i])
        total += x
    return total / n
