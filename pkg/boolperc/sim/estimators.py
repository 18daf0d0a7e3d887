"""
Monte Carlo estimation of event probabilities and the exact Z^1 oracle.

Replica k of a run is sampled with seed replica_seed(base_seed, k), so a run
is reproducible from its base seed and replicas merge by summing counts.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed
from scipy import stats
from tqdm import tqdm

from boolperc.sim.errors import ConfigError, OracleDomainError, WindowTooSmallError
from boolperc.sim.graphs import Coords, GraphModel, ZLattice
from boolperc.sim.percolation import EVENTS, event_indicator, required_window
from boolperc.sim.radius_laws import Constant, RadiusLaw
from boolperc.sim.sampler import ProcessSpec, replica_seed, sample_window

logger = logging.getLogger(__name__)

DEFAULT_CONFIDENCE = 0.95

_ORACLE_RADIUS = 10
_ORACLE_SIZE = 2 * _ORACLE_RADIUS + 1


@dataclass(frozen=True)
class EventDescriptor:
    """An event kind evaluated at vertex v and scale r, on a window of radius L around v."""
    kind: str
    v: Coords
    r: int
    L: Optional[int] = None

    def __post_init__(self):
        if self.kind not in EVENTS:
            raise ConfigError(f"unknown event kind {self.kind!r} (expected one of {sorted(EVENTS)})")
        if self.r < 1:
            raise ConfigError("scale r must be >= 1")
        object.__setattr__(self, "v", tuple(self.v))
        need = required_window(self.kind, self.r)
        if self.L is not None and self.L < need:
            raise WindowTooSmallError(f"{self.kind} at r={self.r} needs a window radius >= {need}, got {self.L}")

    @property
    def window(self) -> int:
        return self.L if self.L is not None else required_window(self.kind, self.r)


@dataclass(frozen=True)
class EventEstimate:
    event: EventDescriptor
    p: float
    law: str
    model: str
    hits: int
    replicas: int
    p_hat: float
    ci_lo: float
    ci_hi: float
    seed: int
    confidence: float = DEFAULT_CONFIDENCE

    @property
    def ci95(self) -> Tuple[float, float]:
        return self.ci_lo, self.ci_hi

    @property
    def sigma(self) -> float:
        """Binomial standard error of p_hat."""
        return float(np.sqrt(self.p_hat * (1.0 - self.p_hat) / self.replicas))

    def as_row(self) -> dict:
        return {
            "event_kind": self.event.kind,
            "model": self.model,
            "p": self.p,
            "law": self.law,
            "r": self.event.r,
            "replicas": self.replicas,
            "p_hat": self.p_hat,
            "ci_lo": self.ci_lo,
            "ci_hi": self.ci_hi,
            "seed": self.seed,
        }


def wilson_interval(hits: int, n: int, confidence: float = DEFAULT_CONFIDENCE) -> Tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if n < 1:
        raise ConfigError("need at least one replica")
    if not 0 < confidence < 1:
        raise ConfigError("confidence must lie in (0, 1)")
    z = float(stats.norm.ppf(1.0 - (1.0 - confidence) / 2.0))
    phat = hits / n
    denom = 1.0 + z * z / n
    center = (phat + z * z / (2 * n)) / denom
    half = z / denom * np.sqrt(phat * (1.0 - phat) / n + z * z / (4.0 * n * n))
    lo = 0.0 if hits == 0 else max(0.0, min(phat, center - half))
    hi = 1.0 if hits == n else min(1.0, max(phat, center + half))
    return float(lo), float(hi)


def _count_hits(model: GraphModel, spec: ProcessSpec, event: EventDescriptor, base_seed: int, ks: Sequence[int]) -> List[bool]:
    out = []
    for k in ks:
        config = sample_window(model, event.v, event.window, spec.with_seed(replica_seed(base_seed, k)))
        out.append(event_indicator(event.kind, config, event.v, event.r))
    return out


def replica_indicators(
    model: GraphModel,
    spec: ProcessSpec,
    event: EventDescriptor,
    replicas: int,
    base_seed: int,
    jobs: int = 1,
    progress: bool = False,
) -> np.ndarray:
    """Event indicator of every replica, in replica order."""
    if replicas < 1:
        raise ConfigError("replicas must be >= 1")
    if jobs == 1:
        hits = []
        for k in tqdm(range(replicas), desc=f"{event.kind}(r={event.r})", disable=not progress):
            hits.extend(_count_hits(model, spec, event, base_seed, [k]))
        return np.asarray(hits, dtype=bool)
    chunk = max(1, replicas // (8 * abs(jobs)))
    blocks = [range(start, min(start + chunk, replicas)) for start in range(0, replicas, chunk)]
    results = Parallel(n_jobs=jobs)(
        delayed(_count_hits)(model, spec, event, base_seed, list(block))
        for block in tqdm(blocks, desc=f"{event.kind}(r={event.r})", disable=not progress)
    )
    return np.asarray([h for block in results for h in block], dtype=bool)


def mc_estimate(
    model: GraphModel,
    spec: ProcessSpec,
    event: EventDescriptor,
    replicas: int,
    base_seed: Optional[int] = None,
    jobs: int = 1,
    confidence: float = DEFAULT_CONFIDENCE,
    progress: bool = False,
) -> EventEstimate:
    """
    Frequency of the event over independent replicas with a Wilson interval.

    Args:
        model: graph model.
        spec: occupation probability and radius law; its seed is the base seed
            unless base_seed is given.
        event: event kind, vertex, scale and optional window radius.
        replicas: number of independent configurations.
        jobs: joblib worker count (-1 for all cores).

    Returns:
        EventEstimate, identical for identical inputs regardless of jobs.
    """
    seed = spec.seed if base_seed is None else int(base_seed)
    indicators = replica_indicators(model, spec, event, replicas, seed, jobs, progress)
    hits = int(indicators.sum())
    lo, hi = wilson_interval(hits, replicas, confidence)
    estimate = EventEstimate(
        event=event,
        p=spec.p,
        law=spec.law.spec(),
        model=model.spec(),
        hits=hits,
        replicas=replicas,
        p_hat=hits / replicas,
        ci_lo=lo,
        ci_hi=hi,
        seed=seed,
        confidence=confidence,
    )
    logger.info(
        f"{event.kind}({event.v}, {event.r}) on {model.spec()} p={spec.p} {spec.law.spec()}: "
        f"{hits}/{replicas} = {estimate.p_hat:.5f} [{lo:.5f}, {hi:.5f}]"
    )
    return estimate


def _popcount(x: np.ndarray) -> np.ndarray:
    table = np.array([bin(i).count("1") for i in range(256)], dtype=np.int64)
    total = np.zeros(x.shape, dtype=np.int64)
    for shift in range(0, 32, 8):
        total += table[(x >> shift) & 0xFF]
    return total


def oracle_G_patterns(c: int) -> np.ndarray:
    """
    G(0,1) on Z^1 with constant radius c for all 2^21 occupation patterns of
    B(0,10); bit i of the pattern is vertex i - 10.

    In one dimension the component of 0 is the maximal run of present links
    (x, x+1) through 0, and a link is present iff some occupied centre y of
    the window has y - c <= x and x + 1 <= y + c.
    """
    patterns = np.arange(1 << _ORACLE_SIZE, dtype=np.int64)

    def link(x: int) -> np.ndarray:
        mask = 0
        for y in range(x + 1 - c, x + c + 1):
            if -_ORACLE_RADIUS <= y <= _ORACLE_RADIUS:
                mask |= 1 << (y + _ORACLE_RADIUS)
        return (patterns & mask) != 0

    right = np.ones(len(patterns), dtype=bool)
    for x in range(0, 9):
        right &= link(x)
    left = np.ones(len(patterns), dtype=bool)
    for x in range(-9, 0):
        left &= link(x)
    return right | left


def oracle_G_counts(c: int) -> np.ndarray:
    """counts[k] = number of patterns with k occupied vertices on which G(0,1) holds."""
    hits = oracle_G_patterns(c)
    occupied = _popcount(np.flatnonzero(hits))
    return np.bincount(occupied, minlength=_ORACLE_SIZE + 1)


def oracle_G_exact(model: GraphModel, r: int, p: float, law: RadiusLaw, exact: bool = False) -> "float | Fraction":
    """
    Exact P(G(0,1)) on Z^1 under a constant radius law with c <= 3, summed
    over all occupation patterns of B(0,10).
    """
    if not isinstance(model, ZLattice) or model.d != 1:
        raise OracleDomainError("the exact oracle only supports z:1")
    if r != 1:
        raise OracleDomainError("the exact oracle only supports r = 1")
    if not isinstance(law, Constant) or law.c > 3:
        raise OracleDomainError("the exact oracle only supports const:c with c <= 3")
    counts = oracle_G_counts(law.c)
    n = _ORACLE_SIZE
    if exact:
        q = Fraction(p)
        return sum((Fraction(int(counts[k])) * q ** k * (1 - q) ** (n - k) for k in range(n + 1)), Fraction(0))
    k = np.arange(n + 1)
    terms = counts.astype(np.float64) * np.power(p, k) * np.power(1.0 - p, n - k)
    return float(terms.sum())
