"""Coupling regions together with empirical probes of merging and contraction.

A coupling region is a box of innovation vectors that forces every chain to the same
state (after ``lag`` steps) whatever the current state.  Merges are exact events, so
all comparisons here are bitwise.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DimensionMismatch, InvalidBound
from .generators import RosenblattSpec, inverse_rosenblatt

# Numerically located extrema are widened by this relative margin so that declared
# regions stay inside the true ones.
SAFETY = 1e-9


def rosenblatt_chentsov(ros: RosenblattSpec, update, u0, us=()) -> np.ndarray:
    """``x_0`` by inverse Rosenblatt from ``u0[:s]``, then ``x_i = phi(x_{i-1}, u_i)``."""
    u0 = np.asarray(u0, dtype=np.float64)
    if u0.size < ros.s:
        raise DimensionMismatch(f"u0 needs at least {ros.s} entries")
    x = inverse_rosenblatt(ros, u0[:ros.s])
    out = [x]
    for u in us:
        x = update(x, u)
        out.append(x)
    return np.array(out)


@dataclass(frozen=True)
class CouplingRegion:
    """Closed box ``[lower, upper]`` inside ``[0, 1]^d``."""

    lower: np.ndarray
    upper: np.ndarray
    lag: int
    kind: str = ""

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=np.float64)
        hi = np.asarray(self.upper, dtype=np.float64)
        if lo.shape != hi.shape or lo.ndim != 1:
            raise DimensionMismatch("region bounds must be 1-d and of equal length")
        if np.any(lo < 0) or np.any(hi > 1) or np.any(hi <= lo):
            raise InvalidBound("region must be a box of positive volume inside [0, 1]^d")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def d(self) -> int:
        return self.lower.size

    @property
    def volume(self) -> float:
        return float(np.prod(self.upper - self.lower))

    def contains(self, u):
        u = np.asarray(u, dtype=np.float64)
        return np.all((u >= self.lower) & (u <= self.upper), axis=-1)


def _check_bounds(kappa, eta):
    if not np.isfinite(kappa):
        raise InvalidBound("kappa must be finite")
    if not 0.0 < eta <= kappa:
        raise InvalidBound(f"need 0 < eta <= kappa, got eta={eta}, kappa={kappa}")


def mis_coupling_region(kappa: float, eta: float, box_lower, box_upper) -> CouplingRegion:
    """Region ``[a, b] x [0, eta / kappa]`` for the independence sampler, lag 1.

    ``kappa`` bounds the weight ``pi / p`` everywhere and ``eta`` bounds it from below
    on proposals generated from the box: any accepted-uniform below ``eta / kappa``
    accepts the proposal from every current state.
    """
    _check_bounds(kappa, eta)
    a = np.atleast_1d(np.asarray(box_lower, dtype=np.float64))
    b = np.atleast_1d(np.asarray(box_upper, dtype=np.float64))
    return CouplingRegion(np.r_[a, 0.0], np.r_[b, eta / kappa], lag=1, kind="mis")


def slice_coupling_region(kappa: float, eta: float, s: int) -> CouplingRegion:
    """Region ``[0, eta / kappa] x [0, 1]^s`` for the slice sampler, lag 2.

    Below that height the slice is the whole box, so the ``x`` parts merge at once and
    the heights one step later.
    """
    _check_bounds(kappa, eta)
    return CouplingRegion(np.zeros(s + 1), np.r_[eta / kappa, np.ones(s)], lag=2,
                          kind="slice")


def extremum(f, lo: float, hi: float, grid: int = 2049, maximize: bool = False) -> float:
    """Grid search on ``[lo, hi]`` refined by bounded Brent around the best node."""
    sign = -1.0 if maximize else 1.0
    ts = np.linspace(lo, hi, grid)
    vals = sign * np.array([f(t) for t in ts])
    i = int(np.argmin(vals))
    best = vals[i]
    a, b = ts[max(i - 1, 0)], ts[min(i + 1, grid - 1)]
    if b > a:
        res = minimize_scalar(lambda t: sign * f(t), bounds=(a, b), method="bounded",
                              options={"xatol": 1e-12})
        best = min(best, res.fun)
    return float(sign * best)


def mis_weight_bounds(weight, proposal_ppf, box_lower, box_upper, grid: int = 2049,
                      tail: float = 1e-9):
    """``(kappa, eta)`` for a one-dimensional proposal by grid extremization.

    ``kappa`` is the sup of ``weight`` over the whole proposal range, ``eta`` the inf
    over proposals generated from the box.  Both are widened by ``SAFETY``.
    """
    g = lambda v: float(weight(proposal_ppf(v)))  # noqa: E731
    kappa = extremum(g, tail, 1.0 - tail, grid, maximize=True)
    lo, hi = float(np.ravel(box_lower)[0]), float(np.ravel(box_upper)[0])
    eta = extremum(g, lo, hi, grid)
    if eta < kappa:
        kappa, eta = kappa * (1 + SAFETY), eta * (1 - SAFETY)
    return kappa, eta


def slice_coupling_check(density, lower, upper, eta=None, kappa=None,
                         grid: int = 257) -> CouplingRegion:
    """Coupling region of the inversive slice sampler for a density bounded on a box.

    Missing bounds are found on a product grid, refined coordinatewise for ``s = 1``.
    """
    lower = np.atleast_1d(np.asarray(lower, dtype=np.float64))
    upper = np.atleast_1d(np.asarray(upper, dtype=np.float64))
    s = lower.size
    if eta is None or kappa is None:
        if s == 1:
            f = lambda t: float(density(np.array([t])))  # noqa: E731
            lo_val = extremum(f, lower[0], upper[0], grid)
            hi_val = extremum(f, lower[0], upper[0], grid, maximize=True)
        else:
            per = max(3, int(round(1e5 ** (1.0 / s))))
            axes = [np.linspace(a, b, per) for a, b in zip(lower, upper)]
            pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, s)
            vals = np.array([density(p) for p in pts])
            lo_val, hi_val = float(vals.min()), float(vals.max())
        if lo_val < hi_val:
            lo_val, hi_val = lo_val * (1 - SAFETY), hi_val * (1 + SAFETY)
        eta = lo_val if eta is None else eta
        kappa = hi_val if kappa is None else kappa
    return slice_coupling_region(kappa, eta, s)


# ---------------------------------------------------------------------------
# empirical probes


def _same(a, b) -> bool:
    a, b = np.asarray(a), np.asarray(b)
    return a.shape == b.shape and a.tobytes() == b.tobytes()


@dataclass
class CouplingReport:
    n: int
    merge_step: int | None
    post_merge_equal: bool
    hit_rates: dict = field(default_factory=dict)
    first_hits: dict = field(default_factory=dict)
    region_sound: dict = field(default_factory=dict)

    @property
    def merged(self) -> bool:
        return self.merge_step is not None


def coupling_probe(update, x0, x0b, stream, n: int, regions=()) -> CouplingReport:
    """Drive two chains with the same ``n`` innovation blocks and watch them merge.

    For each region the report holds its hit rate and first hit step, and records
    whether the chains had merged within ``lag`` steps of that hit.  Steps count from
    1; a merge at step 0 means the starts were already equal.
    """
    d = update.innovation_dim
    us = stream.blocks(n, d) if n else np.empty((0, d))
    x, xb = np.array(x0, dtype=np.float64), np.array(x0b, dtype=np.float64)
    merge = 0 if _same(x, xb) else None
    after_ok = True
    for i, u in enumerate(us, start=1):
        x, xb = update(x, u), update(xb, u)
        equal = _same(x, xb)
        if merge is None and equal:
            merge = i
        elif merge is not None and not equal:
            after_ok = False
    report = CouplingReport(n, merge, after_ok)
    for k, region in enumerate(regions):
        name = region.kind or f"region{k}"
        hits = region.contains(us) if n else np.zeros(0, bool)
        report.hit_rates[name] = float(hits.mean()) if n else float("nan")
        first = int(np.argmax(hits)) + 1 if hits.any() else None
        report.first_hits[name] = first
        if first is None or first + region.lag - 1 > n:
            report.region_sound[name] = None
        else:
            report.region_sound[name] = merge is not None and merge <= first + region.lag - 1
    return report


def euclidean(a, b) -> float:
    return float(np.linalg.norm(np.asarray(a, dtype=np.float64) - np.asarray(b)))


@dataclass
class ContractionReport:
    metric: str
    ratios: np.ndarray
    mean_log: float
    mean_log_se: float
    power: float
    moment: float
    gamma: float
    bm_rates: np.ndarray
    bm_se: np.ndarray

    @property
    def contracts(self) -> bool:
        return bool(self.mean_log < 0)

    @property
    def degenerate(self) -> bool:
        """No contraction at all, so the ``B_m`` volumes say nothing."""
        return not self.contracts

    def rows(self, probe_id: str):
        yield probe_id, "mean_log_lipschitz", 1, self.mean_log, self.mean_log_se
        se = float(np.std(self.ratios ** self.power, ddof=1) / np.sqrt(self.ratios.size)) \
            if self.ratios.size > 1 else float("nan")
        yield probe_id, f"lipschitz_moment_p{self.power:g}", 1, self.moment, se
        for m, (r, s) in enumerate(zip(self.bm_rates, self.bm_se), start=1):
            yield probe_id, "bm_volume", m, float(r), float(s)


def contraction_probe(update, metric, x, xhat, stream, m: int, reps: int,
                      pairs: int = 64, power: float = 1.0, gamma: float | None = None,
                      seed: int = 0, metric_name: str | None = None) -> ContractionReport:
    """Estimate the per-step Lipschitz ratio ``l(u)`` and the volumes of ``B_m``.

    1. The chains from ``x`` and ``xhat`` are run for ``m`` steps on ``reps`` innovation
       sequences; their visited states form a pool.
    2. For ``reps`` further blocks ``u``, ``l(u)`` is the largest ratio
       ``d(phi(a, u), phi(b, u)) / d(a, b)`` over ``pairs`` random distinct pool pairs.
       That is a lower bound on the true sup over the state space.
    3. ``gamma`` defaults to ``exp(E log l / 2)``; ``B_m`` hits are replicates whose
       chains are still farther apart than ``gamma^m`` after ``m`` steps.  Step 1's runs
       are reused for this.

    Innovations come from ``stream``; ``seed`` only drives the pair selection.
    """
    if m < 1 or reps < 1:
        raise ValueError("m and reps must be at least 1")
    d = update.innovation_dim
    rng = np.random.default_rng(seed)
    dist = np.empty((reps, m))
    pool = [np.asarray(x, dtype=np.float64), np.asarray(xhat, dtype=np.float64)]
    for r in range(reps):
        a, b = pool[0], pool[1]
        for k, u in enumerate(stream.blocks(m, d)):
            a, b = update(a, u), update(b, u)
            dist[r, k] = metric(a, b)
            pool.extend((a, b))
    ratios = np.empty(reps)
    for r in range(reps):
        u = stream.next_block(d)
        best = 0.0
        for _ in range(pairs):
            i, j = rng.choice(len(pool), size=2, replace=False)
            base = metric(pool[i], pool[j])
            if base > 0:
                best = max(best, metric(update(pool[i], u), update(pool[j], u)) / base)
        ratios[r] = best
    with np.errstate(divide="ignore"):
        logs = np.log(ratios)
    mean_log = float(logs.mean())
    se = float(logs.std(ddof=1) / np.sqrt(reps)) if reps > 1 and np.isfinite(mean_log) \
        else float("nan")
    if gamma is None:
        gamma = float(np.exp(mean_log / 2.0))
    thresholds = gamma ** np.arange(1, m + 1)
    hits = dist > thresholds
    rates = hits.mean(axis=0)
    bm_se = np.sqrt(rates * (1 - rates) / reps)
    name = metric_name or getattr(metric, "__name__", "metric")
    return ContractionReport(name, ratios, mean_log, se, power,
                             float(np.mean(ratios ** power)), gamma, rates, bm_se)


def write_report_csv(path, rows):
    """Rows of ``(probe id, quantity, m, estimate, standard error)``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["probe_id", "quantity", "m", "estimate", "std_error"])
        for row in rows:
            w.writerow([row[0], row[1], row[2], repr(float(row[3])), repr(float(row[4]))])
