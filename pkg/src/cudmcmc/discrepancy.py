"""Local and star discrepancy of point sets, and CUD diagnostics on scalar streams.

Point sets are ``(n, d)`` float arrays with coordinates in [0, 1].

Exact star discrepancy enumerates critical anchors: along each axis the distinct
point coordinates plus 1.  At an anchor ``a`` the supremum of ``count/n - vol`` is
approached from above (closed box ``[0, a]``) and the supremum of ``vol - count/n`` is
attained at the half-open box ``[0, a)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .errors import BudgetExceeded, DimensionMismatch, DomainError, TooShort

EXACT_1D = "EXACT_1D"
EXACT_GRID = "EXACT_GRID"
SUP_ESTIMATE = "SUP_ESTIMATE"

DEFAULT_BUDGET = 10**8
DEFAULT_ANCHORS = 10**5


@dataclass(frozen=True)
class DiscrepancyReport:
    n: int
    d: int
    star: float
    method: str

    @property
    def exact(self) -> bool:
        return self.method != SUP_ESTIMATE


def as_points(points, d: int | None = None) -> np.ndarray:
    """Validate and coerce to an ``(n, d)`` float array inside [0, 1]^d."""
    x = np.asarray(points, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None] if d in (None, 1) else x[None, :]
    if x.ndim != 2 or x.shape[0] < 1:
        raise DomainError("a point set needs at least one point")
    if d is not None and x.shape[1] != d:
        raise DimensionMismatch(f"expected dimension {d}, got {x.shape[1]}")
    if np.any(x < 0.0) or np.any(x > 1.0) or np.any(np.isnan(x)):
        raise DomainError("point coordinates must lie in [0, 1]")
    return x


def local_discrepancy(points, a) -> float:
    """Fraction of points in ``[0, a)`` minus the volume of that box."""
    x = as_points(points)
    a = np.atleast_1d(np.asarray(a, dtype=np.float64))
    if a.shape != (x.shape[1],):
        raise DimensionMismatch(f"anchor has dimension {a.size}, points have {x.shape[1]}")
    inside = np.all(x < a, axis=1)
    return float(inside.mean() - np.prod(a))


def _star_1d(x: np.ndarray) -> float:
    xs = np.sort(x)
    n = xs.size
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - xs), np.max(xs - (i - 1) / n)))


def _levels(col: np.ndarray):
    lev = np.unique(np.append(col, 1.0))
    return lev, np.searchsorted(lev, col)


@numba.njit(cache=True)
def _sweep2(order, rx, ry, lx, ly, n):
    best = 0.0
    ny = ly.size
    open_c = np.zeros(ny, np.int64)
    closed_c = np.zeros(ny, np.int64)
    p = 0
    for i in range(lx.size):
        a = lx[i]
        for j in range(ny):
            v = a * ly[j] - open_c[j] / n
            if v > best:
                best = v
        while p < order.size and rx[order[p]] == i:
            r = ry[order[p]]
            for j in range(r + 1, ny):
                open_c[j] += 1
            for j in range(r, ny):
                closed_c[j] += 1
            p += 1
        for j in range(ny):
            v = closed_c[j] / n - a * ly[j]
            if v > best:
                best = v
    return best


@numba.njit(cache=True)
def _sweep3(order, rx, ry, rz, lx, ly, lz, n):
    # c[j, k] counts the points swept so far with y-rank < j and z-rank < k.  After
    # x-level i is swept, c[j, k] is the open count at (lx[i+1], ly[j], lz[k]) and the
    # closed count at (lx[i], ly[j-1], lz[k-1]), so one pass checks both.
    best = 0.0
    ny, nz = ly.size, lz.size
    c = np.zeros((ny + 1, nz + 1), np.int64)
    inv = 1.0 / n
    for k in range(nz):  # nothing swept yet: open boxes at the first x-level
        for j in range(ny):
            v = lx[0] * ly[j] * lz[k]
            if v > best:
                best = v
    p = 0
    for i in range(lx.size):
        while p < order.size and rx[order[p]] == i:
            q = order[p]
            for j in range(ry[q] + 1, ny + 1):
                for k in range(rz[q] + 1, nz + 1):
                    c[j, k] += 1
            p += 1
        a = lx[i]
        a_next = lx[i + 1] if i + 1 < lx.size else 0.0
        for j in range(ny + 1):
            for k in range(nz + 1):
                f = c[j, k] * inv
                if j < ny and k < nz:
                    v = a_next * ly[j] * lz[k] - f
                    if v > best:
                        best = v
                if j > 0 and k > 0:
                    v = f - a * ly[j - 1] * lz[k - 1]
                    if v > best:
                        best = v
    return best


def _grid_counts(x: np.ndarray, levels: list[np.ndarray]):
    """Open and closed anchored-box counts at every anchor of a product grid."""
    shape = tuple(lv.size + 1 for lv in levels)
    out = []
    for side in ("left", "right"):  # left: closed boxes, right: open boxes
        idx = [np.searchsorted(lv, x[:, k], side=side) for k, lv in enumerate(levels)]
        flat = np.ravel_multi_index(idx, shape)
        c = np.bincount(flat, minlength=math.prod(shape)).reshape(shape)
        for k in range(len(levels)):
            c = np.cumsum(c, axis=k)
        out.append(c[tuple(slice(0, lv.size) for lv in levels)])
    return out[1], out[0]


def _grid_sup(x: np.ndarray, levels: list[np.ndarray]) -> float:
    n = x.shape[0]
    open_c, closed_c = _grid_counts(x, levels)
    vol = levels[0]
    for lv in levels[1:]:
        vol = np.multiply.outer(vol, lv)
    return float(max(np.max(vol - open_c / n), np.max(closed_c / n - vol), 0.0))


@numba.njit(cache=True)
def _dominance_counts(px, py, pz, kind, qid, nq):
    """For each query, the number of data points <= it in all three coordinates.

    Offline divide and conquer over x with a Fenwick tree over z.  Items are data
    (kind 0) and queries (kind 1, result slot ``qid``); coordinates are integer ranks
    and data sort before queries on ties, so ties count as dominated.
    """
    m = px.size
    # order by (x, kind)
    key = px * 2 + kind
    order = np.argsort(key, kind="mergesort")
    buf = np.empty(m, np.int64)
    zmax = 0
    for i in range(m):
        if pz[i] > zmax:
            zmax = pz[i]
    tree = np.zeros(zmax + 2, np.int64)
    res = np.zeros(nq, np.int64)
    width = 1
    # order is sorted by x; blocks of size width are kept sorted by (y, kind)
    while width < m:
        lo = 0
        while lo < m:
            mid = min(lo + width, m)
            hi = min(lo + 2 * width, m)
            if mid < hi:
                # left data with y <= query y contribute to right queries
                i = lo
                for jj in range(mid, hi):
                    q = order[jj]
                    if kind[q] != 1:
                        continue
                    while i < mid and (py[order[i]] < py[q] or
                                       (py[order[i]] == py[q] and kind[order[i]] == 0)):
                        d = order[i]
                        if kind[d] == 0:
                            z = pz[d] + 1
                            while z < tree.size:
                                tree[z] += 1
                                z += z & (-z)
                        i += 1
                    z = pz[q] + 1
                    s = 0
                    while z > 0:
                        s += tree[z]
                        z -= z & (-z)
                    res[qid[q]] += s
                for r in range(lo, i):
                    d = order[r]
                    if kind[d] == 0:
                        z = pz[d] + 1
                        while z < tree.size:
                            tree[z] -= 1
                            z += z & (-z)
                # merge by (y, kind)
                a, b, k = lo, mid, lo
                while a < mid and b < hi:
                    oa, ob = order[a], order[b]
                    if py[oa] < py[ob] or (py[oa] == py[ob] and kind[oa] <= kind[ob]):
                        buf[k] = oa
                        a += 1
                    else:
                        buf[k] = ob
                        b += 1
                    k += 1
                while a < mid:
                    buf[k] = order[a]
                    a += 1
                    k += 1
                while b < hi:
                    buf[k] = order[b]
                    b += 1
                    k += 1
                for t in range(lo, hi):
                    order[t] = buf[t]
            lo += 2 * width
        width *= 2
    return res


def _corner_counts(ranks: np.ndarray):
    """Closed and open dominance counts at each point's own corner (d <= 3)."""
    n, d = ranks.shape
    r = np.zeros((n, 3), np.int64)
    r[:, :d] = ranks
    # shift by one so that "rank - 1" stays non-negative
    data = r + 1
    closed_q = r + 1
    open_q = r.copy()
    open_q[:, d:] = 1
    items = np.vstack([data, closed_q, open_q])
    kind = np.r_[np.zeros(n, np.int64), np.ones(2 * n, np.int64)]
    qidx = np.r_[np.zeros(n, np.int64), np.arange(2 * n)]
    res = _dominance_counts(items[:, 0].copy(), items[:, 1].copy(), items[:, 2].copy(),
                            kind, qidx, 2 * n)
    return res[:n], res[n:]


def _corner_sup(x: np.ndarray) -> float:
    n, d = x.shape
    vol = np.prod(x, axis=1)
    if d <= 3:
        ranks = np.empty((n, d), np.int64)
        for k in range(d):
            ranks[:, k] = np.unique(x[:, k], return_inverse=True)[1]
        closed_c, open_c = _corner_counts(ranks)
    else:
        closed_c = np.array([np.sum(np.all(x <= p, axis=1)) for p in x])
        open_c = np.array([np.sum(np.all(x < p, axis=1)) for p in x])
    return float(max(np.max(closed_c / n - vol), np.max(vol - open_c / n)))


def _estimate(x: np.ndarray, anchors: int, seed: int) -> float:
    n, d = x.shape
    rng = np.random.default_rng(seed)
    k = max(2, int(round(anchors ** (1.0 / d))))
    levels = []
    for j in range(d):
        lev = np.unique(np.append(x[:, j], 1.0))
        if lev.size > k:
            pick = rng.choice(lev.size - 1, size=k - 1, replace=False)
            lev = np.sort(np.append(lev[pick], 1.0))
        levels.append(lev)
    return max(_grid_sup(x, levels), _corner_sup(x))


def star_discrepancy(points, *, budget: int = DEFAULT_BUDGET, estimate: bool = True,
                     anchors: int = DEFAULT_ANCHORS, seed: int = 0) -> DiscrepancyReport:
    """Star discrepancy of a point set.

    Exact in dimension 1 (closed form) and whenever ``n**d <= budget``; otherwise a
    lower bound from about ``anchors`` sampled critical anchors plus every point's own
    corner, flagged ``SUP_ESTIMATE``.
    """
    x = as_points(points)
    n, d = x.shape
    if d == 1:
        return DiscrepancyReport(n, 1, _star_1d(x[:, 0]), EXACT_1D)
    if float(n) ** d > budget:
        if not estimate:
            raise BudgetExceeded(f"exact enumeration needs {n}^{d} anchors, budget {budget}")
        return DiscrepancyReport(n, d, _estimate(x, anchors, seed), SUP_ESTIMATE)
    lv = [_levels(x[:, k]) for k in range(d)]
    if d == 2:
        order = np.argsort(lv[0][1], kind="stable")
        star = _sweep2(order, lv[0][1], lv[1][1], lv[0][0], lv[1][0], n)
    elif d == 3:
        order = np.argsort(lv[0][1], kind="stable")
        star = _sweep3(order, lv[0][1], lv[1][1], lv[2][1],
                       lv[0][0], lv[1][0], lv[2][0], n)
    else:
        star = _grid_sup(x, [lev for lev, _ in lv])
    return DiscrepancyReport(n, d, float(star), EXACT_GRID)


# ---------------------------------------------------------------------------
# tuples of a scalar stream


def overlapping_tuples(scalars, d: int, cyclic: bool = False) -> np.ndarray:
    """Windows ``(u_i, ..., u_{i+d-1})``.

    With ``cyclic=True`` the scalars are one full period and windows wrap around,
    giving ``len(scalars)`` tuples.
    """
    u = np.asarray(scalars, dtype=np.float64).ravel()
    if d < 1:
        raise ValueError("d must be >= 1")
    if cyclic:
        if u.size < 1:
            raise TooShort("need at least one scalar")
        idx = (np.arange(u.size)[:, None] + np.arange(d)[None, :]) % u.size
        return u[idx]
    if u.size < d:
        raise TooShort(f"{u.size} scalars cannot form a {d}-tuple")
    return np.lib.stride_tricks.sliding_window_view(u, d).copy()


def nonoverlapping_tuples(scalars, d: int) -> np.ndarray:
    u = np.asarray(scalars, dtype=np.float64).ravel()
    if u.size < d:
        raise TooShort(f"{u.size} scalars cannot form a {d}-tuple")
    n = u.size // d
    return u[: n * d].reshape(n, d)


@dataclass(frozen=True)
class DiagnosticRow:
    n: int
    d: int
    window_kind: str  # "overlapping" | "nonoverlapping"
    report: DiscrepancyReport


def cud_diagnostic(stream_spec, n_list, d_list, **kwargs) -> list[DiagnosticRow]:
    """Star discrepancy of the first ``n`` overlapping and nonoverlapping d-tuples.

    Overlapping windows read the stream's periodic sequence, wrapping around at the
    period for CUD streams.  Nonoverlapping tuples are the first ``n`` blocks of the
    stream consumed with block size ``d``.  Keyword arguments go to
    :func:`star_discrepancy`.
    """
    from .streams import for_blocks, make_stream

    rows = []
    for d in d_list:
        for n in n_list:
            flat = make_stream(for_blocks(stream_spec, 1))
            cap = flat.capacity
            if cap is not None and n + d - 1 > cap:
                if n > cap:
                    flat.take(n)  # raises StreamExhausted
                over = overlapping_tuples(flat.take(cap), d, cyclic=True)[:n]
            else:
                over = overlapping_tuples(flat.take(n + d - 1), d)
            blocks = make_stream(for_blocks(stream_spec, d)).blocks(n, d)
            rows.append(DiagnosticRow(n, d, "overlapping", star_discrepancy(over, **kwargs)))
            rows.append(DiagnosticRow(n, d, "nonoverlapping",
                                      star_discrepancy(blocks, **kwargs)))
    return rows


def iid_reference(n: int, d: int, reps: int = 100, seed: int = 0, **kwargs) -> np.ndarray:
    """Star discrepancies of ``reps`` independent uniform point sets of size ``n``."""
    seqs = np.random.SeedSequence(seed).spawn(reps)
    return np.array([
        star_discrepancy(np.random.default_rng(s).random((n, d)), **kwargs).star
        for s in seqs
    ])
