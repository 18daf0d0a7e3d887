"""
Radius distributions on the non-negative integers.

Three families cover the regimes the bounds distinguish: Constant (all moments
finite), Geometric (exponential tail) and Zeta (polynomial tail with a tunable
critical moment). Laws are immutable and hashable.
"""
import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Union

import numpy as np
from scipy import special

from boolperc.sim.errors import ConfigError

logger = logging.getLogger(__name__)

# Largest radius the sampler will emit.
RADIUS_CAP = 2 ** 62

# Zeta quantiles below this index come from a precomputed CDF table.
_ZETA_TABLE_SIZE = 2 ** 16

# Direct-summation span before the analytic tail takes over.
_DIRECT_TERMS = 20_000

Number = Union[int, float, Fraction]


class RadiusLaw(ABC):
    kind: str = "law"

    @abstractmethod
    def pmf(self, k: int) -> float:
        ...

    @abstractmethod
    def tail(self, r: int, strict: bool = False) -> float:
        """P(R > r) if strict else P(R >= r)."""

    def tail_array(self, ks: np.ndarray, strict: bool = False) -> np.ndarray:
        return np.array([self.tail(int(k), strict) for k in np.asarray(ks)], dtype=np.float64)

    @abstractmethod
    def quantile(self, u: float) -> int:
        """Smallest k with CDF(k) > u."""

    def quantiles(self, us: np.ndarray) -> np.ndarray:
        return np.array([self.quantile(float(u)) for u in np.asarray(us)], dtype=np.int64)

    @abstractmethod
    def truncated_moment(self, s: float, r: int = 0) -> float:
        """E[R^s 1{R >= r}], with 0^0 = 1; math.inf when the moment diverges."""

    def exact_truncated_moment(self, s: Number, r: int = 0) -> Optional[Fraction]:
        """Rational value of the truncated moment when one is available."""
        return None

    @abstractmethod
    def moment_finite(self, s: float) -> bool:
        ...

    @abstractmethod
    def spec(self) -> str:
        ...

    def mean(self) -> float:
        return self.truncated_moment(1, 0)


@dataclass(frozen=True)
class Constant(RadiusLaw):
    c: int
    kind = "const"

    def __post_init__(self):
        if self.c < 0:
            raise ConfigError("constant radius must be >= 0")

    def pmf(self, k: int) -> float:
        return 1.0 if k == self.c else 0.0

    def tail(self, r: int, strict: bool = False) -> float:
        return float(self.c > r) if strict else float(self.c >= r)

    def tail_array(self, ks: np.ndarray, strict: bool = False) -> np.ndarray:
        ks = np.asarray(ks)
        hit = self.c > ks if strict else self.c >= ks
        return hit.astype(np.float64)

    def quantile(self, u: float) -> int:
        return self.c

    def quantiles(self, us: np.ndarray) -> np.ndarray:
        return np.full(np.shape(us), self.c, dtype=np.int64)

    def truncated_moment(self, s: float, r: int = 0) -> float:
        if self.c < r:
            return 0.0
        return float(self.c) ** s

    def exact_truncated_moment(self, s: Number, r: int = 0) -> Optional[Fraction]:
        if self.c < r:
            return Fraction(0)
        if Fraction(s).denominator != 1:
            return None
        return Fraction(self.c) ** int(s)

    def moment_finite(self, s: float) -> bool:
        return True

    def spec(self) -> str:
        return f"const:{self.c}"


@dataclass(frozen=True)
class Geometric(RadiusLaw):
    """nu(k) = (1-q) q^k, so P(R >= k) = q^k."""
    q: float
    kind = "geom"

    def __post_init__(self):
        if not 0.0 < self.q < 1.0:
            raise ConfigError("geometric parameter q must lie in (0, 1)")

    def pmf(self, k: int) -> float:
        return (1.0 - self.q) * self.q ** k

    def tail(self, r: int, strict: bool = False) -> float:
        k = r + 1 if strict else r
        return self.q ** max(k, 0)

    def tail_array(self, ks: np.ndarray, strict: bool = False) -> np.ndarray:
        ks = np.asarray(ks, dtype=np.float64) + (1 if strict else 0)
        return np.power(self.q, np.maximum(ks, 0.0))

    def quantile(self, u: float) -> int:
        return int(self.quantiles(np.array([u]))[0])

    def quantiles(self, us: np.ndarray) -> np.ndarray:
        us = np.asarray(us, dtype=np.float64)
        k = np.floor(np.log1p(-us) / math.log(self.q))
        return np.minimum(k, float(RADIUS_CAP)).astype(np.int64)

    def truncated_moment(self, s: float, r: int = 0) -> float:
        if s == 0:
            return self.tail(r)
        total = 0.0
        start = max(r, 0)
        while True:
            k = np.arange(start, start + _DIRECT_TERMS, dtype=np.float64)
            chunk = float(np.sum(np.power(k, s) * (1.0 - self.q) * np.power(self.q, k)))
            total += chunk
            last = (start + _DIRECT_TERMS - 1) ** s * self.q ** (start + _DIRECT_TERMS - 1)
            if chunk <= 1e-17 * total or last == 0.0 or (last < 1e-300 and chunk < 1e-300):
                return total
            start += _DIRECT_TERMS

    def moment_finite(self, s: float) -> bool:
        return True

    def spec(self) -> str:
        return f"geom:{self.q:g}"


@lru_cache(maxsize=None)
def _zeta_normalizer(alpha: float) -> float:
    return float(special.zeta(alpha + 1.0))


@lru_cache(maxsize=16)
def _zeta_cdf_table(alpha: float) -> np.ndarray:
    ks = np.arange(_ZETA_TABLE_SIZE, dtype=np.float64)
    # CDF(k) = 1 - P(R >= k+1)
    return 1.0 - special.zeta(alpha + 1.0, ks + 2.0) / _zeta_normalizer(alpha)


@dataclass(frozen=True)
class Zeta(RadiusLaw):
    """nu(k) = (k+1)^-(alpha+1) / zeta(alpha+1); E[R^s] < inf iff s < alpha."""
    alpha: float
    kind = "zeta"

    def __post_init__(self):
        if not self.alpha > 0:
            raise ConfigError("zeta exponent alpha must be > 0")

    @property
    def normalizer(self) -> float:
        return _zeta_normalizer(float(self.alpha))

    def pmf(self, k: int) -> float:
        return (k + 1.0) ** -(self.alpha + 1.0) / self.normalizer

    def tail(self, r: int, strict: bool = False) -> float:
        k = r + 1 if strict else r
        if k <= 0:
            return 1.0
        return float(special.zeta(self.alpha + 1.0, k + 1.0)) / self.normalizer

    def tail_array(self, ks: np.ndarray, strict: bool = False) -> np.ndarray:
        ks = np.asarray(ks, dtype=np.float64) + (1 if strict else 0)
        out = special.zeta(self.alpha + 1.0, np.maximum(ks, 0.0) + 1.0) / self.normalizer
        return np.where(ks <= 0, 1.0, out)

    def _quantile_beyond_table(self, u: float) -> int:
        target = 1.0 - u
        if self.tail(RADIUS_CAP) >= target:
            return RADIUS_CAP
        lo, hi = _ZETA_TABLE_SIZE - 1, RADIUS_CAP
        # invariant: tail(lo + 1) >= target > tail(hi + 1)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.tail(mid + 1) < target:
                hi = mid
            else:
                lo = mid
        return hi

    def quantile(self, u: float) -> int:
        return int(self.quantiles(np.array([u]))[0])

    def quantiles(self, us: np.ndarray) -> np.ndarray:
        us = np.asarray(us, dtype=np.float64)
        table = _zeta_cdf_table(float(self.alpha))
        ks = np.searchsorted(table, us, side="right").astype(np.int64)
        overflow = np.flatnonzero(ks >= _ZETA_TABLE_SIZE)
        for i in overflow:
            ks.flat[i] = self._quantile_beyond_table(float(us.flat[i]))
        return ks

    def truncated_moment(self, s: float, r: int = 0) -> float:
        if not self.moment_finite(s):
            return math.inf
        r = max(int(r), 0)
        a1 = self.alpha + 1.0
        k = np.arange(r, r + _DIRECT_TERMS, dtype=np.float64)
        direct = float(np.sum(np.power(k, s) * np.power(k + 1.0, -a1)))
        # k^s = sum_j binom(s,j) (-1)^j (k+1)^(s-j), summed over k >= M+1
        start = r + _DIRECT_TERMS + 1.0
        tail = 0.0
        for j in range(64):
            coeff = float(special.binom(s, j))
            if coeff == 0.0:
                break
            term = coeff * (-1) ** j * float(special.zeta(a1 - s + j, start))
            tail += term
            if abs(term) < 1e-17 * abs(tail):
                break
        return (direct + tail) / self.normalizer

    def moment_finite(self, s: float) -> bool:
        return s < self.alpha

    def spec(self) -> str:
        return f"zeta:{self.alpha:g}"


def law_from_spec(spec: str) -> RadiusLaw:
    """Parse `const:c`, `geom:q` or `zeta:alpha`."""
    name, _, arg = spec.strip().partition(":")
    name = name.lower()
    if not arg:
        raise ConfigError(f"law spec {spec!r} needs a parameter, e.g. const:1, geom:0.5, zeta:2")
    try:
        if name in ("const", "constant"):
            return Constant(int(arg))
        if name in ("geom", "geometric"):
            return Geometric(float(arg))
        if name == "zeta":
            return Zeta(float(arg))
    except ValueError:
        raise ConfigError(f"invalid law spec {spec!r}")
    raise ConfigError(f"unknown law {name!r} (expected const, geom, zeta)")


def tail(law: RadiusLaw, r: int, strict: bool = False) -> float:
    return law.tail(r, strict)


def quantile(law: RadiusLaw, u: float) -> int:
    if not 0.0 <= u < 1.0:
        raise ConfigError("quantile level must lie in [0, 1)")
    return law.quantile(u)


def truncated_moment(law: RadiusLaw, s: float, r: int = 0) -> float:
    return law.truncated_moment(s, r)


def moment_finite(law: RadiusLaw, s: float) -> bool:
    return law.moment_finite(s)
