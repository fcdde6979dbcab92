"""Driving sequences for MCMC: IID pseudo-random, full-period CUD generators, and
randomly shifted (weakly CUD) versions of them.

A stream is a stateful cursor over a scalar sequence in (0, 1).  Chains consume it
in nonoverlapping blocks of ``d`` scalars, one block per step.

CUD streams are miniature generators whose whole period is used.  When a CUD stream is
built for blocks of size ``d`` (``tuple_dim``), it may cycle through its period ``d``
times so that the ``P`` blocks it can emit are exactly the ``P`` overlapping d-tuples
of the periodic sequence.  If ``gcd(d, P) = g > 1`` the cursor skips one value each
time it returns to its starting phase, so all residues are still visited once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .errors import ConfigError, StreamExhausted

IID = "iid"
CUD_LCG = "cud_lcg"
CUD_LFSR = "cud_lfsr"
KINDS = (IID, CUD_LCG, CUD_LFSR)

# Replacement for an exact 0, so every emitted value is strictly inside (0, 1).
TINY = float(np.nextafter(0.0, 1.0))


# ---------------------------------------------------------------------------
# number theory helpers


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of ``n`` by trial division."""
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def is_prime(n: int) -> bool:
    return n >= 2 and prime_factors(n) == [n]


def is_primitive_root(a: int, m: int) -> bool:
    """True when ``a`` generates the multiplicative group mod prime ``m``."""
    if not 1 < a < m:
        return False
    phi = m - 1
    return all(pow(a, phi // q, m) != 1 for q in prime_factors(phi))


def primitive_roots(m: int) -> list[int]:
    return [a for a in range(2, m) if is_primitive_root(a, m)]


def _gf2_mulmod(a: int, b: int, poly: int, k: int) -> int:
    out = 0
    top = 1 << k
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if a & top:
            a ^= poly
    return out


def _gf2_powx(e: int, poly: int, k: int) -> int:
    result, base = 1, 2  # the polynomial "x"
    while e:
        if e & 1:
            result = _gf2_mulmod(result, base, poly, k)
        base = _gf2_mulmod(base, base, poly, k)
        e >>= 1
    return result


def is_primitive_gf2(taps: int, k: int) -> bool:
    """Whether ``x^k + taps(x)`` is primitive over GF(2).

    ``taps`` holds the coefficients of ``x^0 .. x^(k-1)`` as bits.
    """
    if not taps & 1 or taps >> k:
        return False
    poly = (1 << k) | taps
    order = (1 << k) - 1
    if _gf2_powx(order, poly, k) != 1:
        return False
    return all(_gf2_powx(order // q, poly, k) != 1 for q in prime_factors(order))


# ---------------------------------------------------------------------------
# generator parameters


@dataclass(frozen=True)
class LcgParams:
    """Multiplicative congruential generator ``x <- a x mod m`` with prime ``m``."""

    modulus: int
    multiplier: int

    def __post_init__(self):
        if not is_prime(self.modulus):
            raise ConfigError(f"LCG modulus {self.modulus} is not prime")
        if not is_primitive_root(self.multiplier, self.modulus):
            raise ConfigError(
                f"{self.multiplier} is not a primitive root mod {self.modulus}")

    @property
    def period(self) -> int:
        return self.modulus - 1


@dataclass(frozen=True)
class LfsrParams:
    """Tausworthe generator driven by a maximal-length shift register.

    Bits follow ``b[n+k] = sum_j taps_j b[n+j] (mod 2)``; output ``i`` reads ``width``
    bits starting at bit ``step * i``.
    """

    degree: int
    taps: int
    width: int
    step: int

    def __post_init__(self):
        if not 1 <= self.width <= self.degree:
            raise ConfigError("LFSR output width must satisfy 1 <= w <= k")
        if not is_primitive_gf2(self.taps, self.degree):
            raise ConfigError(
                f"taps {self.taps:#x} do not give a primitive degree-{self.degree} polynomial")
        if math.gcd(self.step, self.period) != 1:
            raise ConfigError("LFSR step must be coprime with the period")

    @property
    def period(self) -> int:
        return (1 << self.degree) - 1


def default_lfsr_step(degree: int, width: int) -> int:
    step = width
    while math.gcd(step, (1 << degree) - 1) != 1:
        step += 1
    return step


# Multipliers minimise the exact 2-d star discrepancy of the overlapping pairs of the
# full period (all primitive roots for m <= 4099, a spectral-test shortlist above).
# Regenerate with tools/build_generator_table.py.
LCG_TABLE: tuple[LcgParams, ...] = (
    LcgParams(1031, 394),
    LcgParams(4099, 1151),
    LcgParams(16411, 3474),
    LcgParams(65537, 26880),
)

# Same criterion over primitive polynomials, with width = degree.
LFSR_TABLE: tuple[LfsrParams, ...] = tuple(
    LfsrParams(k, taps, k, default_lfsr_step(k, k))
    for k, taps in ((10, 0x321), (12, 0xE51), (14, 0x2C2F))
)


def choose_generator(kind: str, period_target: int | None):
    """Smallest shipped generator of ``kind`` whose period is at least ``period_target``."""
    table = {CUD_LCG: LCG_TABLE, CUD_LFSR: LFSR_TABLE}.get(kind)
    if table is None:
        raise ConfigError(f"no generator table for stream kind {kind!r}")
    if period_target is None:
        return table[0]
    for params in table:
        if params.period >= period_target:
            return params
    raise ConfigError(
        f"no {kind} generator with period >= {period_target} "
        f"(largest is {table[-1].period})")


@lru_cache(maxsize=32)
def _lcg_cycle(m: int, a: int, x0: int) -> np.ndarray:
    out = np.empty(m - 1, dtype=np.float64)
    x = x0
    for k in range(m - 1):
        x = (a * x) % m
        out[k] = x / m
    out.setflags(write=False)
    return out


@lru_cache(maxsize=32)
def _lfsr_cycle(params: LfsrParams, state0: int) -> np.ndarray:
    k, period = params.degree, params.period
    bits = np.empty(period, dtype=np.uint8)
    state, taps = state0, params.taps
    for n in range(period):
        bits[n] = state & 1
        fb = (state & taps).bit_count() & 1
        state = (state >> 1) | (fb << (k - 1))
    i = np.arange(period, dtype=np.int64)
    idx = (params.step * i[:, None] + np.arange(params.width)[None, :]) % period
    weights = 0.5 ** np.arange(1, params.width + 1)
    out = bits[idx] @ weights
    out.setflags(write=False)
    return out


def generator_cycle(params, seed: int = 0) -> np.ndarray:
    """One full period of raw outputs (before any shift), starting from ``seed``."""
    if isinstance(params, LcgParams):
        return _lcg_cycle(params.modulus, params.multiplier, 1 + seed % params.period)
    if isinstance(params, LfsrParams):
        return _lfsr_cycle(params, 1 + seed % params.period)
    raise TypeError(f"unknown generator parameters {params!r}")


# ---------------------------------------------------------------------------
# specs and streams


@dataclass(frozen=True)
class StreamSpec:
    """Everything needed to rebuild a stream bit for bit.

    ``shift`` is a Cranley-Patterson rotation: scalar ``t`` of the stream gets
    ``shift[t % len(shift)]`` added mod 1, so a shift of length ``tuple_dim`` rotates
    each consumption block by a vector in [0,1)^d.
    """

    kind: str = IID
    seed: int = 0
    period_target: int | None = None
    shift: tuple[float, ...] | None = None
    tuple_dim: int = 1
    params: LcgParams | LfsrParams | None = field(default=None, compare=True)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown stream kind {self.kind!r}")
        if self.tuple_dim < 1:
            raise ConfigError("tuple_dim must be >= 1")
        if self.shift is not None:
            shift = tuple(float(s) for s in np.atleast_1d(self.shift))
            if not shift or any(not 0.0 <= s < 1.0 for s in shift):
                raise ConfigError("shift entries must lie in [0, 1)")
            object.__setattr__(self, "shift", shift)

    @property
    def is_cud(self) -> bool:
        return self.kind != IID

    def generator(self):
        if not self.is_cud:
            return None
        return self.params or choose_generator(self.kind, self.period_target)

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "seed": self.seed}
        if self.period_target is not None:
            out["period_target"] = self.period_target
        if self.shift is not None:
            out["shift"] = list(self.shift)
        if self.tuple_dim != 1:
            out["tuple_dim"] = self.tuple_dim
        if isinstance(self.params, LcgParams):
            out["lcg"] = {"modulus": self.params.modulus,
                          "multiplier": self.params.multiplier}
        elif isinstance(self.params, LfsrParams):
            out["lfsr"] = {"degree": self.params.degree, "taps": self.params.taps,
                           "width": self.params.width, "step": self.params.step}
        return out

    @classmethod
    def from_dict(cls, data: dict) -> StreamSpec:
        data = dict(data)
        params = None
        if "lcg" in data:
            params = LcgParams(**data.pop("lcg"))
        if "lfsr" in data:
            lf = dict(data.pop("lfsr"))
            lf.setdefault("width", lf["degree"])
            lf.setdefault("step", default_lfsr_step(lf["degree"], lf["width"]))
            params = LfsrParams(**lf)
        if "shift" in data and data["shift"] is not None:
            data["shift"] = tuple(np.atleast_1d(data["shift"]))
        unknown = set(data) - {"kind", "seed", "period_target", "shift", "tuple_dim"}
        if unknown:
            raise ConfigError(f"unknown stream fields {sorted(unknown)}")
        return cls(params=params, **data)


class InnovationStream:
    """Stateful cursor over a scalar sequence in (0, 1)."""

    def __init__(self, spec: StreamSpec):
        self.spec = spec
        self.consumed = 0
        self._shift = None if spec.shift is None else np.asarray(spec.shift)

    capacity: int | None = None

    @property
    def remaining(self) -> int | None:
        return None if self.capacity is None else self.capacity - self.consumed

    def _raw(self, start: int, k: int) -> np.ndarray:
        raise NotImplementedError

    def take(self, k: int) -> np.ndarray:
        """The next ``k`` scalars as a flat array."""
        if k < 0:
            raise ValueError("k must be non-negative")
        if self.capacity is not None and self.consumed + k > self.capacity:
            raise StreamExhausted(
                f"{self.spec.kind} stream has {self.remaining} scalars left, {k} requested")
        u = self._raw(self.consumed, k)
        if self._shift is not None:
            t = np.arange(self.consumed, self.consumed + k)
            u = np.mod(u + self._shift[t % self._shift.size], 1.0)
        self.consumed += k
        return np.where(u <= 0.0, TINY, u)

    def next_scalar(self) -> float:
        return float(self.take(1)[0])

    def next_block(self, d: int) -> np.ndarray:
        if d < 1:
            raise ValueError("block size must be >= 1")
        return self.take(d)

    def blocks(self, n: int, d: int) -> np.ndarray:
        """``n`` consecutive nonoverlapping blocks, shape ``(n, d)``."""
        return self.take(n * d).reshape(n, d)

    def clone(self) -> InnovationStream:
        """A fresh stream from the same spec, at the start."""
        return make_stream(self.spec)


class IIDStream(InnovationStream):
    def __init__(self, spec: StreamSpec):
        super().__init__(spec)
        self._rng = np.random.Generator(np.random.PCG64(spec.seed))

    def _raw(self, start, k):
        return self._rng.random(k)


class CUDStream(InnovationStream):
    def __init__(self, spec: StreamSpec):
        super().__init__(spec)
        self.params = spec.generator()
        self.period = self.params.period
        self._values = generator_cycle(self.params, spec.seed)
        d = spec.tuple_dim
        # scalars per pass through the residues reachable with stride d
        self._cycle = d * self.period // math.gcd(d, self.period)
        self.capacity = d * self.period

    def _raw(self, start, k):
        t = np.arange(start, start + k, dtype=np.int64)
        return self._values[(t + t // self._cycle) % self.period]


def make_stream(spec: StreamSpec) -> InnovationStream:
    return CUDStream(spec) if spec.is_cud else IIDStream(spec)


def randomize(stream, seed):
    """Apply an independent uniform shift (mod 1) to every scalar of a CUD stream.

    Accepts a :class:`StreamSpec` (returns a spec) or an :class:`InnovationStream`
    (returns a new stream at the same cursor position).
    """
    spec = stream.spec if isinstance(stream, InnovationStream) else stream
    if not spec.is_cud:
        raise ConfigError("only CUD streams are randomized")
    rng = np.random.default_rng(seed)
    new_spec = replace(spec, shift=tuple(rng.random(spec.tuple_dim)))
    if isinstance(stream, InnovationStream):
        out = make_stream(new_spec)
        out.consumed = stream.consumed
        return out
    return new_spec


def for_blocks(spec: StreamSpec, d: int) -> StreamSpec:
    """The same spec set up to be consumed in blocks of ``d``.

    The shift is kept as it is, since it applies by scalar position: a single entry
    rotates every scalar alike, and a ``d``-entry shift rotates each block by the same
    vector.  Reading with ``d = 1`` is always allowed.
    """
    shift = spec.shift
    if shift is not None and d != 1 and len(shift) not in (1, d):
        raise ConfigError(f"shift of length {len(shift)} cannot drive blocks of {d}")
    return replace(spec, tuple_dim=d)
