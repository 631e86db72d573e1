"""Vertex-weight distributions, deterministic lazy weight fields, and tail functionals.

Every distribution in the catalog is sampled by inverse-CDF transform of a
uniform variate, so fields with comparable parameters (and all truncation
levels of one field) are monotonically coupled on a shared realization.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field as _field
from statistics import NormalDist
from typing import Iterator, Mapping, Union

Vertex = tuple[int, ...]

_STD_NORMAL = NormalDist()


class InfiniteMoment(ArithmeticError):
    """A requested moment integral diverges."""


class EmptyConditioningEvent(ValueError):
    """Conditioning event has probability zero."""


# ---------------------------------------------------------------------------
# counter-based randomness
#
# A keyed splitmix64-style mixer: the sample at a vertex is a pure function of
# (seed, coordinates), so values are reproducible regardless of query order,
# thread count, or batching.  No sequential generator state exists anywhere.
# ---------------------------------------------------------------------------

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def counter_hash(*words: int) -> int:
    """64-bit hash of an integer word sequence (order-sensitive)."""
    h = 0x243F6A8885A308D3
    for w in words:
        h = _mix64(((h + _GOLDEN) & _MASK64) ^ (w & _MASK64))
    return h


def derive_seed(*parts: Union[int, str]) -> int:
    """Fold run seeds, experiment labels and replica indices into a subseed."""
    words = []
    for p in parts:
        if isinstance(p, str):
            digest = hashlib.blake2b(p.encode("utf-8"), digest_size=8).digest()
            words.append(int.from_bytes(digest, "big"))
        else:
            words.append(int(p))
    return counter_hash(*words)


def uniform01(h: int) -> float:
    """Map a 64-bit hash to the open interval (0, 1)."""
    return ((h >> 11) + 0.5) * 2.0**-53


# ---------------------------------------------------------------------------
# distribution catalog
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Constant:
    """Point mass at c."""

    c: float

    family = "constant"

    def params(self) -> tuple:
        return (self.c,)

    @property
    def is_discrete(self) -> bool:
        return True

    def atoms(self) -> list[tuple[float, float]]:
        return [(self.c, 1.0)]

    def quantile(self, u: float) -> float:
        return self.c

    def cdf(self, x: float) -> float:
        return 1.0 if x >= self.c else 0.0

    def cdf_strict(self, x: float) -> float:
        return 1.0 if x > self.c else 0.0

    def mean(self) -> float:
        return self.c

    def support_max(self) -> float:
        return self.c


@dataclass(frozen=True)
class TwoPoint:
    """P(X = a_plus) = 1 - q, P(X = -a_minus) = q.  Requires -a_minus <= a_plus."""

    a_plus: float
    a_minus: float
    q: float

    family = "two_point"

    def __post_init__(self):
        if not 0.0 <= self.q <= 1.0:
            raise ValueError("q must lie in [0, 1]")
        if self.a_minus < 0.0:
            raise ValueError("a_minus must be nonnegative")
        if -self.a_minus > self.a_plus:
            raise ValueError("lower atom -a_minus must not exceed a_plus")

    def params(self) -> tuple:
        return (self.a_plus, self.a_minus, self.q)

    @property
    def is_discrete(self) -> bool:
        return True

    def atoms(self) -> list[tuple[float, float]]:
        if -self.a_minus == self.a_plus:
            return [(self.a_plus, 1.0)]
        return [(-self.a_minus, self.q), (self.a_plus, 1.0 - self.q)]

    def quantile(self, u: float) -> float:
        return -self.a_minus if u <= self.q else self.a_plus

    def cdf(self, x: float) -> float:
        return sum(p for a, p in self.atoms() if a <= x)

    def cdf_strict(self, x: float) -> float:
        return sum(p for a, p in self.atoms() if a < x)

    def mean(self) -> float:
        return (1.0 - self.q) * self.a_plus - self.q * self.a_minus

    def support_max(self) -> float:
        return self.a_plus


@dataclass(frozen=True)
class Bernoulli:
    """P(X = 1) = p, P(X = 0) = 1 - p."""

    p: float

    family = "bernoulli"

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")

    def params(self) -> tuple:
        return (self.p,)

    @property
    def is_discrete(self) -> bool:
        return True

    def atoms(self) -> list[tuple[float, float]]:
        return [(0.0, 1.0 - self.p), (1.0, self.p)]

    def quantile(self, u: float) -> float:
        return 0.0 if u <= 1.0 - self.p else 1.0

    def cdf(self, x: float) -> float:
        return sum(p for a, p in self.atoms() if a <= x)

    def cdf_strict(self, x: float) -> float:
        return sum(p for a, p in self.atoms() if a < x)

    def mean(self) -> float:
        return self.p

    def support_max(self) -> float:
        return 1.0


@dataclass(frozen=True)
class UniformInt:
    """Uniform on the integers lo, lo+1, ..., hi."""

    lo: int
    hi: int

    family = "uniform_int"

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("lo must not exceed hi")

    def params(self) -> tuple:
        return (self.lo, self.hi)

    @property
    def is_discrete(self) -> bool:
        return True

    def _count(self) -> int:
        return self.hi - self.lo + 1

    def atoms(self) -> list[tuple[float, float]]:
        w = 1.0 / self._count()
        return [(float(k), w) for k in range(self.lo, self.hi + 1)]

    def quantile(self, u: float) -> float:
        k = min(int(u * self._count()), self._count() - 1)
        return float(self.lo + k)

    def cdf(self, x: float) -> float:
        n_le = math.floor(x) - self.lo + 1
        return min(max(n_le, 0), self._count()) / self._count()

    def cdf_strict(self, x: float) -> float:
        if x == math.floor(x):
            n_lt = int(x) - self.lo
        else:
            n_lt = math.floor(x) - self.lo + 1
        return min(max(n_lt, 0), self._count()) / self._count()

    def mean(self) -> float:
        return (self.lo + self.hi) / 2.0

    def support_max(self) -> float:
        return float(self.hi)


@dataclass(frozen=True)
class Gaussian:
    mu: float
    sigma: float

    family = "gaussian"

    def __post_init__(self):
        if self.sigma <= 0.0:
            raise ValueError("sigma must be positive")

    def params(self) -> tuple:
        return (self.mu, self.sigma)

    @property
    def is_discrete(self) -> bool:
        return False

    def quantile(self, u: float) -> float:
        return self.mu + self.sigma * _STD_NORMAL.inv_cdf(u)

    def cdf(self, x: float) -> float:
        return _STD_NORMAL.cdf((x - self.mu) / self.sigma)

    cdf_strict = cdf

    def mean(self) -> float:
        return self.mu

    def support_max(self) -> float:
        return math.inf


@dataclass(frozen=True)
class ShiftedExponential:
    """shift + Exp(rate) when sign=+1; shift - Exp(rate) when sign=-1."""

    rate: float
    shift: float
    sign: int

    family = "shifted_exponential"

    def __post_init__(self):
        if self.rate <= 0.0:
            raise ValueError("rate must be positive")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    def params(self) -> tuple:
        return (self.rate, self.shift, self.sign)

    @property
    def is_discrete(self) -> bool:
        return False

    def quantile(self, u: float) -> float:
        if self.sign > 0:
            return self.shift - math.log1p(-u) / self.rate
        return self.shift + math.log(u) / self.rate

    def cdf(self, x: float) -> float:
        if self.sign > 0:
            if x < self.shift:
                return 0.0
            return -math.expm1(-self.rate * (x - self.shift))
        if x >= self.shift:
            return 1.0
        return math.exp(-self.rate * (self.shift - x))

    cdf_strict = cdf

    def mean(self) -> float:
        return self.shift + self.sign / self.rate

    def support_max(self) -> float:
        return math.inf if self.sign > 0 else self.shift


@dataclass(frozen=True)
class ParetoTail:
    """One-sided power-law tail.

    sign=+1: support [scale, +inf), P(X > x) = (x/scale)^-beta.
    sign=-1: support (-inf, -scale], P(X < -x) = (x/scale)^-beta.
    """

    beta: float
    sign: int
    scale: float = 1.0

    family = "pareto_tail"

    def __post_init__(self):
        if self.beta <= 0.0:
            raise ValueError("beta must be positive")
        if self.scale <= 0.0:
            raise ValueError("scale must be positive")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    def params(self) -> tuple:
        return (self.beta, self.sign, self.scale)

    @property
    def is_discrete(self) -> bool:
        return False

    def quantile(self, u: float) -> float:
        if self.sign > 0:
            return self.scale * (1.0 - u) ** (-1.0 / self.beta)
        return -self.scale * u ** (-1.0 / self.beta)

    def cdf(self, x: float) -> float:
        if self.sign > 0:
            if x < self.scale:
                return 0.0
            return 1.0 - (x / self.scale) ** (-self.beta)
        if x >= -self.scale:
            return 1.0
        return (-x / self.scale) ** (-self.beta)

    cdf_strict = cdf

    def mean(self) -> float:
        if self.beta <= 1.0:
            return math.inf * self.sign
        return self.sign * self.scale * self.beta / (self.beta - 1.0)

    def support_max(self) -> float:
        return math.inf if self.sign > 0 else -self.scale


DistributionSpec = Union[
    Constant, TwoPoint, Bernoulli, UniformInt, Gaussian, ShiftedExponential, ParetoTail
]

_FAMILIES = {
    cls.family: cls
    for cls in (Constant, TwoPoint, Bernoulli, UniformInt, Gaussian, ShiftedExponential, ParetoTail)
}


def parse_spec(token: str) -> DistributionSpec:
    """Parse 'family:p1,p2,...' tokens, e.g. 'two_point:1,10,0.3' or 'pareto_tail:2,neg,1'."""
    name, _, raw = token.partition(":")
    name = name.strip()
    if name not in _FAMILIES:
        raise ValueError(f"unknown distribution family {name!r}")
    args = []
    for part in raw.split(",") if raw else []:
        part = part.strip()
        if part in ("pos", "positive", "+"):
            args.append(1)
        elif part in ("neg", "negative", "-"):
            args.append(-1)
        elif name == "uniform_int":
            args.append(int(part))
        else:
            args.append(float(part))
    if name == "shifted_exponential" and len(args) == 3:
        args[2] = int(args[2])
    if name == "pareto_tail" and len(args) >= 2:
        args[1] = int(args[1])
    return _FAMILIES[name](*args)


def spec_token(spec: DistributionSpec) -> str:
    """Inverse of parse_spec, used for CSV columns and manifests."""
    parts = []
    for p in spec.params():
        if isinstance(p, int):
            parts.append(str(p))
        elif float(p).is_integer():
            parts.append(str(int(p)))
        else:
            parts.append(f"{p:.17g}")
    return f"{spec.family}:{','.join(parts)}"


# ---------------------------------------------------------------------------
# truncation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TruncationLevel:
    """Floor weights at -m on read; m = +inf encodes no truncation."""

    m: float

    def __post_init__(self):
        if not self.m >= 0.0:
            raise ValueError("truncation level m must be nonnegative")

    @property
    def floor(self) -> float:
        return -self.m

    @property
    def is_none(self) -> bool:
        return math.isinf(self.m)

    def apply(self, x: float) -> float:
        return x if x >= -self.m else -self.m


NO_TRUNCATION = TruncationLevel(math.inf)


def as_truncation(t) -> TruncationLevel:
    if t is None:
        return NO_TRUNCATION
    if isinstance(t, TruncationLevel):
        return t
    return TruncationLevel(float(t))


def truncate(x: float, t) -> float:
    """max(x, -m); identity when m = +inf."""
    return as_truncation(t).apply(x)


# ---------------------------------------------------------------------------
# weight fields
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class WeightField:
    """Deterministic lazily-evaluated i.i.d. weight field on Z^d.

    The sample at a vertex is a pure function of (seed, vertex, spec); repeated
    queries return bit-identical values.  Truncation is applied on read, never
    at sampling time, so every truncation level shares one realization.
    """

    spec: DistributionSpec
    seed: int
    dimension: int
    _cache: dict = _field(default_factory=dict, repr=False)

    def sample(self, v: Vertex) -> float:
        w = self._cache.get(v)
        if w is None:
            u = uniform01(counter_hash(self.seed, *v))
            w = self.spec.quantile(u)
            self._cache[v] = w
        return w

    def sample_truncated(self, v: Vertex, t: TruncationLevel) -> float:
        return t.apply(self.sample(v))


@dataclass(eq=False)
class ExplicitField:
    """Weight field backed by a fixed table; handy for oracles and worked examples."""

    values: Mapping[Vertex, float]
    dimension: int
    default: float = 0.0
    spec: DistributionSpec | None = None

    def sample(self, v: Vertex) -> float:
        return self.values.get(v, self.default)

    def sample_truncated(self, v: Vertex, t: TruncationLevel) -> float:
        return t.apply(self.sample(v))


def sample_weight(field, v: Vertex) -> float:
    """Sample X_v from a field (deterministic in (seed, v, spec))."""
    return field.sample(v)


# ---------------------------------------------------------------------------
# tail and overshoot functionals
# ---------------------------------------------------------------------------


def tail_prob(spec: DistributionSpec, m: float) -> float:
    """P(X <= -m) for m >= 0; m = +inf means no floor, so 0."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    if math.isinf(m):
        return 0.0
    return spec.cdf(-m)


def tail_prob_strict(spec: DistributionSpec, t: float) -> float:
    """P(X < -t) for t >= 0."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if math.isinf(t):
        return 0.0
    return spec.cdf_strict(-t)


def overshoot_mean(spec: DistributionSpec, m: float) -> float:
    """E[(-m - X) 1{X <= -m}], the expected overshoot below the truncation floor.

    Raises InfiniteMoment when E[X^-] = +inf makes the integral diverge.
    """
    if m < 0:
        raise ValueError("m must be nonnegative")
    if math.isinf(m):
        return 0.0
    if spec.is_discrete:
        return sum((-m - a) * p for a, p in spec.atoms() if a <= -m)
    if isinstance(spec, Gaussian):
        z0 = (-m - spec.mu) / spec.sigma
        return spec.sigma * _STD_NORMAL.pdf(z0) + (-m - spec.mu) * _STD_NORMAL.cdf(z0)
    if isinstance(spec, ShiftedExponential):
        if spec.sign < 0:
            a = m + spec.shift
            if a <= 0.0:
                return -a + 1.0 / spec.rate
            return math.exp(-spec.rate * a) / spec.rate
        b = -m - spec.shift
        if b <= 0.0:
            return 0.0
        return b + math.expm1(-spec.rate * b) / spec.rate
    if isinstance(spec, ParetoTail):
        if spec.sign > 0:
            return 0.0
        if spec.beta <= 1.0:
            raise InfiniteMoment(f"E[X^-] diverges for pareto_tail(beta={spec.beta})")
        tail_part = spec.scale * (max(m, spec.scale) / spec.scale) ** (1.0 - spec.beta) / (spec.beta - 1.0)
        return max(spec.scale - m, 0.0) + tail_part
    raise TypeError(f"unsupported spec {spec!r}")


def conditional_overshoot_mean(spec: DistributionSpec, m: float) -> float:
    """E[-m - X | X <= -m]."""
    p = tail_prob(spec, m)
    if p == 0.0:
        raise EmptyConditioningEvent(f"P(X <= -{m}) = 0")
    return overshoot_mean(spec, m) / p


def overshoot_raw_moment(spec: DistributionSpec, m: float, k: int) -> float:
    """E[(-m - X)^k | X <= -m], by atom summation or quadrature on the quantile scale."""
    p = tail_prob(spec, m)
    if p == 0.0:
        raise EmptyConditioningEvent(f"P(X <= -{m}) = 0")
    if isinstance(spec, ParetoTail) and spec.sign < 0 and spec.beta <= k:
        raise InfiniteMoment(f"overshoot moment of order {k} diverges for beta={spec.beta}")
    if spec.is_discrete:
        return sum((-m - a) ** k * pa for a, pa in spec.atoms() if a <= -m) / p
    from scipy.integrate import quad

    val, _ = quad(lambda u: max(-m - spec.quantile(u), 0.0) ** k, 0.0, p, limit=200)
    return val / p


def overshoot_sampler(spec: DistributionSpec, m: float, seed: int) -> Iterator[float]:
    """i.i.d. stream from the conditional overshoot law P(-m - X in dx | X <= -m)."""
    p = tail_prob(spec, m)
    if p == 0.0:
        raise EmptyConditioningEvent(f"P(X <= -{m}) = 0")
    j = 0
    while True:
        u = uniform01(counter_hash(seed, j))
        yield max(-m - spec.quantile(u * p), 0.0)
        j += 1


# ---------------------------------------------------------------------------
# integrability hypotheses
# ---------------------------------------------------------------------------

HOLDS = "holds"
FAILS = "fails"
BOUNDARY = "boundary"


@dataclass(frozen=True)
class HypothesisReport:
    """Classification of the four integrability conditions behind linear growth.

    positive_moment       E[(X^+)^d (log^+ X^+)^(d+alpha)] < inf
    negative_mean         E[X^-] < inf
    negative_fourth       E[(X^-)^4] < inf
    negative_tail_integral  int_0^inf P(X < -t)^(2d) dt < inf
    """

    spec: DistributionSpec
    d: int
    alpha: float
    positive_moment: str
    negative_mean: str
    negative_fourth: str
    negative_tail_integral: str
    l1: bool
    almost_sure: bool
    mode: str


def _classify_power(beta: float, threshold: float) -> str:
    if beta > threshold:
        return HOLDS
    if beta == threshold:
        return BOUNDARY
    return FAILS


def hypothesis_report(spec: DistributionSpec, d: int, alpha: float = 1.0) -> HypothesisReport:
    """Classify each integrability condition and state which convergence mode is granted."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    pos = neg1 = neg4 = tail_int = HOLDS
    if isinstance(spec, ParetoTail):
        if spec.sign > 0:
            # E[(X^+)^d (log X^+)^(d+alpha)] diverges at beta = d due to the log factor.
            pos = _classify_power(spec.beta, float(d))
        else:
            neg1 = _classify_power(spec.beta, 1.0)
            neg4 = _classify_power(spec.beta, 4.0)
            tail_int = _classify_power(2 * d * spec.beta, 1.0)
    l1 = pos == HOLDS and neg1 == HOLDS
    almost_sure = pos == HOLDS and neg4 == HOLDS
    mode = "l1_and_almost_sure" if almost_sure else ("l1_only" if l1 else "neither_proved")
    return HypothesisReport(
        spec=spec,
        d=d,
        alpha=alpha,
        positive_moment=pos,
        negative_mean=neg1,
        negative_fourth=neg4,
        negative_tail_integral=tail_int,
        l1=l1,
        almost_sure=almost_sure,
        mode=mode,
    )
