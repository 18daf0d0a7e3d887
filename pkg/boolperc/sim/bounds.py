"""
Analytic side of the multiscale argument: the constants C2, C3, K, the
single-scale bounds on P(G) and P(H~), the subcritical threshold p0, the
two-sequence recursion, the bracket on P(H) and the complete-coverage series.

Constants stay exact (Fraction) whenever dim is an integer and C1 is rational.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from boolperc.sim.errors import BudgetExceededError, ConfigError, InfiniteMomentError, WindowTooSmallError
from boolperc.sim.graphs import Coords, GraphModel, Vertex, ball
from boolperc.sim.radius_laws import RadiusLaw

logger = logging.getLogger(__name__)

Real = Union[int, float, Fraction]

_SERIES_CHUNK = 100_000
_SERIES_CHUNKS = 40

# BFS depth for exact sphere sizes of models without a closed form
DEFAULT_EXACT_RADIUS = 16


def _exact(x: Real) -> Real:
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if float(x).is_integer():
        return Fraction(int(x))
    return float(x)


def _power(base: int, exponent: Real) -> Real:
    if isinstance(exponent, Fraction) and exponent.denominator == 1:
        return Fraction(base) ** int(exponent)
    return float(base) ** float(exponent)


@dataclass(frozen=True)
class Constants:
    """(dim, C1) and the constants derived from them."""
    dim: Real
    C1: Real
    source: str = "declared"

    def __post_init__(self):
        if self.dim < 0:
            raise ConfigError("dim must be >= 0")
        if self.C1 <= 0:
            raise ConfigError("C1 must be > 0")
        object.__setattr__(self, "dim", _exact(self.dim))
        object.__setattr__(self, "C1", _exact(self.C1))

    @property
    def C2(self) -> Real:
        return self.C1 * _power(10, self.dim)

    @property
    def C3(self) -> Real:
        return self.C1 * _power(100, self.dim)

    @property
    def K(self) -> Real:
        return self.C1 ** 2 * _power(800, self.dim)

    @property
    def is_exact(self) -> bool:
        return isinstance(self.dim, Fraction) and isinstance(self.C1, Fraction)

    def as_dict(self) -> dict:
        return {
            "dim": float(self.dim),
            "C1": float(self.C1),
            "C2": float(self.C2),
            "C3": float(self.C3),
            "K": float(self.K),
            "source": self.source,
        }

    @classmethod
    def for_model(cls, model: GraphModel, dim: Optional[Real] = None, C1: Optional[Real] = None) -> "Constants":
        """Explicit values, then the model's declared ones, then built-ins, then a fit."""
        dim = dim if dim is not None else model.declared_dim
        C1 = C1 if C1 is not None else model.declared_C1
        if dim is not None and C1 is not None:
            return cls(dim=dim, C1=C1, source="declared")
        builtin = model.default_constants()
        if builtin is not None:
            logger.info(f"Using built-in constants dim={builtin[0]}, C1={builtin[1]} for {model.spec()} (not certified)")
            return cls(dim=dim if dim is not None else builtin[0], C1=C1 if C1 is not None else builtin[1], source="builtin")
        from boolperc.sim.geometry import fitted_constants

        fit_dim, fit_C1 = fitted_constants(model)
        return cls(dim=dim if dim is not None else fit_dim, C1=C1 if C1 is not None else fit_C1, source="fitted")


def bound_SB1(constants: Constants, p: Real, r: int) -> Real:
    """p C2 r^dim, an upper bound on P(G(v,r))."""
    if r < 1:
        raise ConfigError("r must be >= 1")
    if p == 0:
        return 0.0
    if isinstance(p, Fraction) and constants.is_exact:
        return p * constants.C2 * _power(r, constants.dim)
    return float(p) * float(constants.C2) * float(r) ** float(constants.dim)


def bound_SB2(constants: Constants, p: Real, law: RadiusLaw, r: int) -> float:
    """p C3 E[R^dim 1{R >= r}], an upper bound on P(H~(v,r)); inf when the moment diverges."""
    if r < 1:
        raise ConfigError("r must be >= 1")
    if p == 0:
        return 0.0
    moment = law.truncated_moment(float(constants.dim), r)
    if math.isinf(moment):
        return math.inf
    return float(p) * float(constants.C3) * moment


def p_zero(constants: Constants, law: RadiusLaw) -> Real:
    """
    min(1 / (2 K C2 10^dim), 1 / (4 K C3 E[R^dim])).

    Exact when the constants and the moment are rational. The value is far
    below the true critical probability.
    """
    if not law.moment_finite(float(constants.dim)):
        raise InfiniteMomentError(f"E[R^{constants.dim}] is infinite for {law.spec()}; no subcritical threshold")
    moment: Real
    exact_moment = law.exact_truncated_moment(constants.dim, 0) if constants.is_exact else None
    first_den = 2 * constants.K * constants.C2 * _power(10, constants.dim)
    if exact_moment is not None:
        first = Fraction(1) / first_den
        if exact_moment == 0:
            return first
        return min(first, Fraction(1) / (4 * constants.K * constants.C3 * exact_moment))
    moment = law.truncated_moment(float(constants.dim), 0)
    first = 1.0 / float(first_den)
    if moment == 0:
        return first
    return min(first, 1.0 / (4.0 * float(constants.K) * float(constants.C3) * moment))


@dataclass(frozen=True)
class RecursionReport:
    F: List[Real]
    G: List[Real]
    direct: List[Real]
    closed: List[Real]
    hypotheses_ok: bool
    bounded_by_closed: bool
    below_half: bool
    converged: bool
    threshold: float


def recursion_check(F0: Sequence[Real], G_levels: Sequence[Real], threshold: float = 1e-3) -> RecursionReport:
    """
    Iterate direct[n] = direct[n-1]^2 + G[n-1] from direct[0] = max F0 and
    compare with closed[n] = 2^-(n+1) + sum_j 2^-j G[n-1-j].

    Hypotheses: max F0 <= 1/2 and max G <= 1/4. Violations are reported, not raised.
    Fractions in, Fractions out.
    """
    if len(F0) == 0:
        raise ConfigError("F0 must not be empty")
    if any(x < 0 for x in F0) or any(g < 0 for g in G_levels):
        raise ConfigError("recursion inputs must be non-negative")
    half = Fraction(1, 2)
    f0 = max(F0)
    exact = isinstance(f0, (int, Fraction)) and all(isinstance(g, (int, Fraction)) for g in G_levels)
    one = Fraction(1) if exact else 1.0
    hypotheses_ok = f0 <= half and all(g <= Fraction(1, 4) for g in G_levels)

    direct = [f0 * one]
    for g in G_levels:
        direct.append(direct[-1] ** 2 + g)
    closed = []
    for n in range(len(G_levels) + 1):
        value = one / 2 ** (n + 1)
        for j in range(n):
            value += G_levels[n - 1 - j] * one / 2 ** j
        closed.append(value)

    bounded = all(d <= c for d, c in zip(direct, closed))
    below_half = all(d <= half for d in direct)
    report = RecursionReport(
        F=list(F0),
        G=list(G_levels),
        direct=direct,
        closed=closed,
        hypotheses_ok=hypotheses_ok,
        bounded_by_closed=bounded,
        below_half=below_half,
        converged=bool(direct[-1] < threshold),
        threshold=threshold,
    )
    if hypotheses_ok and not (bounded and below_half):
        logger.warning("recursion hypotheses hold but the iterate escaped its bound")
    return report


def _tail_remainder(term_fn, start: int) -> float:
    """
    Sum term_fn over k >= start in chunks; past the last chunk, bound the rest
    by a power-law integral fitted to the final terms (inf if it decays too slowly).
    """
    total = 0.0
    k0 = start
    for _ in range(_SERIES_CHUNKS):
        ks = np.arange(k0, k0 + _SERIES_CHUNK, dtype=np.float64)
        chunk = float(np.sum(term_fn(ks)))
        total += chunk
        k0 += _SERIES_CHUNK
        if chunk == 0.0 or chunk <= 1e-18 * max(total, 1e-300):
            return total
    k_end = float(k0)
    last, mid = float(term_fn(np.array([k_end]))[0]), float(term_fn(np.array([k_end / 2]))[0])
    if last <= 0.0:
        return total
    gamma = math.log(mid / last) / math.log(2.0)
    if gamma <= 1.0:
        return math.inf
    return total + last * k_end / (gamma - 1.0)


def _sphere_bound(model: GraphModel, constants: Constants):
    """Vectorized k -> bound on |S(v,k)|: exact for Z^d, else C1 k^dim."""
    if model.sphere_size_formula(1) is not None and hasattr(model, "d"):
        d = model.d

        def spheres(ks: np.ndarray) -> np.ndarray:
            out = np.zeros(len(ks), dtype=np.float64)
            for i in range(1, d + 1):
                # C(k-1, i-1) as a float polynomial in k
                comb = np.ones(len(ks), dtype=np.float64)
                for j in range(1, i):
                    comb *= (ks - j) / j
                out += 2.0 ** i * math.comb(d, i) * comb
            return np.where(ks == 0, 1.0, out)

        return spheres, float(d)
    C1, dim = float(constants.C1), float(constants.dim)
    return (lambda ks: C1 * np.power(ks, dim)), dim + 1.0


def prob_H_bracket(
    model: GraphModel,
    v: "Vertex | Coords | None",
    r: int,
    p: float,
    law: RadiusLaw,
    L: int,
    constants: Constants,
) -> Tuple[float, float]:
    """
    Bracket (lo, hi) on P(H(v,r)).

    lo is the exact probability of the window event: 1 - prod_{k=10r+1}^{L}
    (1 - p P(R > k/10))^{s_k}. hi adds the expected number of far centres
    beyond L that qualify, using exact sphere sizes for Z^d and the growth
    bound C1 k^dim otherwise; hi is 1 when that series diverges.
    """
    if L <= 10 * r:
        raise WindowTooSmallError(f"bracket needs L > 10r (L={L}, r={r})")
    if p == 0:
        return 0.0, 0.0
    sizes = ball(model, v, L).sphere_sizes.astype(np.float64)
    ks = np.arange(10 * r + 1, L + 1)
    t = law.tail_array(ks // 10, strict=True)
    with np.errstate(divide="ignore"):
        log_keep = float(np.sum(sizes[ks] * np.log1p(-p * t)))
    lo = float(-np.expm1(log_keep))

    spheres, critical = _sphere_bound(model, constants)
    if not law.moment_finite(critical):
        return lo, 1.0

    def terms(k: np.ndarray) -> np.ndarray:
        return spheres(k) * p * law.tail_array(np.floor(k / 10.0), strict=True)

    tail = _tail_remainder(terms, L + 1)
    hi = min(1.0, lo + tail)
    return lo, hi


@dataclass(frozen=True)
class CoverageSeries:
    partial: np.ndarray
    classification: str
    exact_terms: int


def coverage_series(
    model: GraphModel,
    v: "Vertex | Coords | None",
    r: int,
    law: RadiusLaw,
    p: float,
    K_terms: int,
    constants: Constants,
    exact_radius: Optional[int] = None,
) -> CoverageSeries:
    """
    Partial sums of p * sum_k s_k P(R > k + r).

    s_k is exact (closed form, or BFS up to exact_radius) and C1 k^dim beyond.
    Divergence is decided from the law: the series diverges iff E[R^dim] = inf.
    """
    if K_terms < 1:
        raise ConfigError("K_terms must be >= 1")
    ks = np.arange(K_terms)
    sizes = np.empty(K_terms, dtype=np.float64)
    exact_terms = 0
    if model.sphere_size_formula(1) is not None:
        sizes[:] = [model.sphere_size_formula(int(k)) for k in ks]
        exact_terms = K_terms
    else:
        limit = min(K_terms - 1, exact_radius if exact_radius is not None else DEFAULT_EXACT_RADIUS)
        try:
            exact = ball(model, v, limit).sphere_sizes
            sizes[: limit + 1] = exact
            exact_terms = limit + 1
        except BudgetExceededError:
            logger.warning(f"sphere sizes beyond budget for {model.spec()}; using C1 k^dim")
        rest = ks[exact_terms:]
        sizes[exact_terms:] = float(constants.C1) * np.power(rest.astype(np.float64), float(constants.dim))
    terms = p * sizes * law.tail_array(ks + r, strict=True)
    classification = "converges" if law.moment_finite(float(constants.dim)) else "diverges"
    return CoverageSeries(partial=np.cumsum(terms), classification=classification, exact_terms=exact_terms)
