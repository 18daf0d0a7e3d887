"""
Pathwise and statistical checks of the multiscale inclusions, coverage
measurements and cluster census.

Inclusion checks count counterexamples over seeded configurations; a check
whose conditioning event never occurs is reported as vacuous.
"""
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from boolperc.sim.bounds import Constants, prob_H_bracket
from boolperc.sim.errors import ConfigError
from boolperc.sim.estimators import DEFAULT_CONFIDENCE, EventDescriptor, EventEstimate, mc_estimate
from boolperc.sim.geometry import separated_net
from boolperc.sim.graphs import Coords, GraphModel, LoadedGraph, Vertex, ball, sphere
from boolperc.sim.percolation import (
    cluster,
    covered_mask,
    event_G,
    event_H_window,
    event_Htilde,
    window_components,
)
from boolperc.sim.radius_laws import RadiusLaw
from boolperc.sim.sampler import Configuration, ProcessSpec, replica_seed, sample_window

logger = logging.getLogger(__name__)


@dataclass
class InclusionReport:
    """Outcome of a pathwise inclusion check."""
    name: str
    configs: int
    accepted: int
    counterexamples: int
    vacuous: bool
    counterexample_seeds: List[int] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return self.counterexamples == 0


@dataclass
class ScalingReport:
    r: int
    K: float
    g_10r: EventEstimate
    g_r: EventEstimate
    htilde_r: EventEstimate
    rhs: float
    rhs_net: float
    net_sizes: Tuple[int, int]
    holds: bool
    violation_at_ci: bool
    sup_is_lower_bound: bool = False


@dataclass
class IndependenceReport:
    configs: int
    freq_near: float
    freq_far: float
    freq_joint: float
    product: float
    stderr: float

    @property
    def consistent(self) -> bool:
        return abs(self.freq_joint - self.product) <= 4.0 * self.stderr + 1e-12


@dataclass
class DiameterReport:
    d_exceeds: EventEstimate
    g_r: EventEstimate
    h_bracket: Tuple[float, float]
    bound: float
    holds: bool


@dataclass
class CensusResult:
    histogram: Dict[int, int]
    n_components: int
    spanning: int
    largest: int


def _origin(model: GraphModel, v: "Vertex | Coords | None") -> Coords:
    if v is None:
        return model.origin()
    return v.coords if isinstance(v, Vertex) else tuple(v)


def diameter_inclusion_check(
    model: GraphModel,
    p: float,
    law: RadiusLaw,
    r: int,
    L: int,
    n_configs: int,
    seed: int = 0,
    v: "Vertex | Coords | None" = None,
    progress: bool = False,
) -> InclusionReport:
    """Counterexamples to: not G(v,r) and not H(v,r) implies D_v <= 8r, on the window graph."""
    o = _origin(model, v)
    report = InclusionReport(name="diameter", configs=n_configs, accepted=0, counterexamples=0, vacuous=True)
    spec = ProcessSpec(p=p, law=law, seed=seed)
    for k in tqdm(range(n_configs), desc=f"diameter r={r}", disable=not progress):
        s = replica_seed(seed, k)
        config = sample_window(model, o, L, spec.with_seed(s))
        if event_G(config, o, r) or event_H_window(config, o, r):
            continue
        report.accepted += 1
        if cluster(config, o).D > 8 * r:
            report.counterexamples += 1
            report.counterexample_seeds.append(s)
    report.vacuous = report.accepted == 0
    if report.counterexamples:
        logger.warning(f"diameter inclusion: {report.counterexamples} counterexamples at r={r} on {model.spec()}")
    return report


def _net_points(model: GraphModel, o: Coords, r: int, m: int) -> List[Vertex]:
    """An r-separated greedy net on the sphere S(o, m r)."""
    return separated_net(model, [x.coords for x in sphere(model, o, m * r)], r)


def _two_net_subevents(config: Configuration, near: List[Vertex], far: List[Vertex], r: int) -> Tuple[bool, bool]:
    a = any(event_G(config, u.coords, r) for u in near)
    b = any(event_G(config, w.coords, r) for w in far)
    return a, b


def two_net_inclusion_check(
    model: GraphModel,
    p: float,
    law: RadiusLaw,
    r: int,
    n_accepted: int,
    max_configs: int,
    seed: int = 0,
    v: "Vertex | Coords | None" = None,
    L: Optional[int] = None,
    progress: bool = False,
) -> InclusionReport:
    """
    Counterexamples to: G(v,10r) and not H~(v,r) implies some u in the net on
    S(v,10r) and some w in the net on S(v,80r) with G(u,r) and G(w,r).

    Configurations are drawn until n_accepted satisfy the conditioning event
    or max_configs have been tried. At r = 1, not H~(v,1) forces every occupied
    radius in B(v,100) to be 0, so G(v,10) cannot hold and the check is vacuous.
    """
    o = _origin(model, v)
    L = L if L is not None else 100 * r
    near = _net_points(model, o, r, 10)
    far = _net_points(model, o, r, 80)
    spec = ProcessSpec(p=p, law=law, seed=seed)
    report = InclusionReport(name="two-net", configs=0, accepted=0, counterexamples=0, vacuous=True)
    for k in tqdm(range(max_configs), desc=f"two-net r={r}", disable=not progress):
        if report.accepted >= n_accepted:
            break
        s = replica_seed(seed, k)
        config = sample_window(model, o, L, spec.with_seed(s))
        report.configs += 1
        if event_Htilde(config, o, r) or not event_G(config, o, 10 * r):
            continue
        report.accepted += 1
        a, b = _two_net_subevents(config, near, far, r)
        if not (a and b):
            report.counterexamples += 1
            report.counterexample_seeds.append(s)
    report.vacuous = report.accepted == 0
    if report.vacuous:
        logger.warning(f"two-net inclusion at r={r}: conditioning event never occurred in {report.configs} configurations")
    return report


def two_net_independence_check(
    model: GraphModel,
    p: float,
    law: RadiusLaw,
    r: int,
    n_configs: int,
    seed: int = 0,
    v: "Vertex | Coords | None" = None,
    progress: bool = False,
) -> IndependenceReport:
    """Joint against product frequency of the near-net and far-net sub-events."""
    o = _origin(model, v)
    near = _net_points(model, o, r, 10)
    far = _net_points(model, o, r, 80)
    spec = ProcessSpec(p=p, law=law, seed=seed)
    hits = np.zeros((n_configs, 2), dtype=bool)
    for k in tqdm(range(n_configs), desc=f"independence r={r}", disable=not progress):
        config = sample_window(model, o, 100 * r, spec.with_seed(replica_seed(seed, k)))
        hits[k] = _two_net_subevents(config, near, far, r)
    fa, fb = float(hits[:, 0].mean()), float(hits[:, 1].mean())
    joint = float((hits[:, 0] & hits[:, 1]).mean())
    product = fa * fb
    stderr = float(np.sqrt(max(product * (1.0 - product), 1.0 / n_configs) / n_configs))
    return IndependenceReport(configs=n_configs, freq_near=fa, freq_far=fb, freq_joint=joint, product=product, stderr=stderr)


def net_scaling_bound(model: GraphModel, r: int, v: "Vertex | Coords | None" = None) -> Tuple[int, int]:
    """Sizes of the r-separated nets on S(v,10r) and S(v,80r)."""
    o = _origin(model, v)
    return len(_net_points(model, o, r, 10)), len(_net_points(model, o, r, 80))


def _sup_estimate(
    model: GraphModel,
    spec: ProcessSpec,
    kind: str,
    r: int,
    centers: Sequence[Coords],
    replicas: int,
    jobs: int,
    confidence: float,
) -> EventEstimate:
    estimates = [
        mc_estimate(model, spec, EventDescriptor(kind, c, r), replicas, jobs=jobs, confidence=confidence)
        for c in centers
    ]
    return max(estimates, key=lambda e: e.ci_hi)


def scaling_inequality_check(
    model: GraphModel,
    constants: Constants,
    r: int,
    p: float,
    law: RadiusLaw,
    replicas: int,
    seed: int = 0,
    centers: Optional[Sequence[Coords]] = None,
    jobs: int = 1,
    confidence: float = DEFAULT_CONFIDENCE,
) -> ScalingReport:
    """
    One-sided statistical check of P(G(10r)) <= K P(G(r))^2 + P(H~(r)).

    Compares the upper confidence limit of the left side with the right side
    built from upper limits; `violation_at_ci` flags a left-side lower limit
    above the right side. Evidence, never proof.
    """
    if centers is None:
        centers = [model.origin()]
    sup_lower = isinstance(model, LoadedGraph) or not model.transitive
    spec = ProcessSpec(p=p, law=law, seed=seed)
    g10 = _sup_estimate(model, spec, "G", 10 * r, centers, replicas, jobs, confidence)
    g1 = _sup_estimate(model, spec, "G", r, centers, replicas, jobs, confidence)
    ht = _sup_estimate(model, spec, "Htilde", r, centers, replicas, jobs, confidence)
    K = float(constants.K)
    rhs = K * g1.ci_hi ** 2 + ht.ci_hi
    n10, n80 = net_scaling_bound(model, r, centers[0])
    rhs_net = n10 * n80 * g1.ci_hi ** 2 + ht.ci_hi
    report = ScalingReport(
        r=r,
        K=K,
        g_10r=g10,
        g_r=g1,
        htilde_r=ht,
        rhs=rhs,
        rhs_net=rhs_net,
        net_sizes=(n10, n80),
        holds=g10.ci_hi <= rhs,
        violation_at_ci=g10.ci_lo > min(rhs, rhs_net),
        sup_is_lower_bound=sup_lower,
    )
    logger.info(f"scaling check r={r}: {g10.ci_hi:.4g} <= {rhs:.4g} ({'holds' if report.holds else 'fails'})")
    return report


def diameter_bound_check(
    model: GraphModel,
    r: int,
    p: float,
    law: RadiusLaw,
    L: int,
    replicas: int,
    constants: Constants,
    seed: int = 0,
    jobs: int = 1,
) -> DiameterReport:
    """P(D_v > 8r) against P(G(v,r)) + the upper bracket of P(H(v,r))."""
    spec = ProcessSpec(p=p, law=law, seed=seed)
    o = model.origin()
    d_est = mc_estimate(model, spec, EventDescriptor("D_exceeds", o, r, L), replicas, jobs=jobs)
    g_est = mc_estimate(model, spec, EventDescriptor("G", o, r), replicas, jobs=jobs)
    bracket = prob_H_bracket(model, o, r, p, law, L, constants)
    bound = min(1.0, g_est.ci_hi + bracket[1])
    return DiameterReport(d_exceeds=d_est, g_r=g_est, h_bracket=bracket, bound=bound, holds=d_est.ci_lo <= bound)


def coverage_fraction_of(config: Configuration) -> float:
    """Fraction of the inner half of the window lying in some occupied ball."""
    inner = config.window.distances <= config.L // 2
    covered = covered_mask(config)
    return float(covered[inner].mean())


def coverage_fraction(model: GraphModel, L: int, spec: ProcessSpec, o: "Vertex | Coords | None" = None) -> float:
    return coverage_fraction_of(sample_window(model, _origin(model, o), L, spec))


def expected_coverage(
    model: GraphModel,
    L: int,
    p: float,
    law: RadiusLaw,
    samples: int = 200,
    o: "Vertex | Coords | None" = None,
) -> float:
    """
    E[coverage_fraction]: the mean over inner-half vertices u of
    1 - prod_{w in window} (1 - p P(R >= d(u,w))), on an evenly spaced sample of u.
    """
    if L < 0:
        raise ConfigError("window radius must be >= 0")
    window = ball(model, _origin(model, o), L)
    inner = np.flatnonzero(window.distances <= L // 2)
    if len(inner) > samples:
        inner = inner[np.linspace(0, len(inner) - 1, samples).round().astype(np.int64)]
    coords = window.coords
    probs = []
    for i in inner.tolist():
        counts = np.bincount(model.distances(coords[i], coords))
        ks = np.arange(len(counts))
        with np.errstate(divide="ignore"):
            log_miss = float(np.sum(counts * np.log1p(-p * law.tail_array(ks))))
        probs.append(-np.expm1(log_miss))
    return float(np.mean(probs))


def cluster_census(config: Configuration) -> CensusResult:
    """
    Component sizes of the window graph.

    `spanning` counts components that cross the window: they hold two vertices
    of the outer shell S(o, L) at distance 2L from each other, i.e. antipodal
    through o. This is a proxy for an infinite cluster, not a proof of one. On
    graphs where no two shell vertices are 2L apart (a loaded graph smaller
    than the window, a cycle of odd length) it is always 0.
    """
    components = window_components(config)
    sizes = Counter(len(c) for c in components)
    shell = config.window.distances == config.L
    coords = config.window.coords
    spanning = 0
    if config.L > 0:
        for comp in components:
            on_shell = [coords[i] for i in comp.tolist() if shell[i]]
            if len(on_shell) < 2:
                continue
            if any(int(config.model.distances(a, on_shell).max()) >= 2 * config.L for a in on_shell):
                spanning += 1
    return CensusResult(
        histogram=dict(sorted(sizes.items())),
        n_components=len(components),
        spanning=spanning,
        largest=max(sizes) if sizes else 0,
    )
