"""
Command-line front end.

Usage:
    boolperc bounds --model z:1 --law const:1 --dim 1 --c1 3
    boolperc sweep --model z:2 --law geom:0.5 --p 0.01,0.02,0.05 --r 1,2 --replicas 2000 --output sweep.csv
    boolperc coverage --model z:1 --law zeta:1 --p 0.05 --windows 100,1000,10000 --plot

Every subcommand prints a summary; `--output` writes CSV (or JSON for a
.json path) with the full config echoed in the header, `--plot` writes an
SVG of the primary curve, `--record` stores the run in the run store.

Exit codes: 0 success, 1 configuration or input error, 2 resource limit
(vertex budget, window too small).
"""
import argparse
import logging
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from tqdm import tqdm

from boolperc.config import ExperimentConfig, resolve_config
from boolperc.export import ESTIMATE_COLUMNS, write_output
from boolperc.plotting import plot_path, save_line_chart
from boolperc.sim.bounds import bound_SB1, bound_SB2, coverage_series, p_zero, prob_H_bracket, recursion_check
from boolperc.sim.checks import (
    cluster_census,
    coverage_fraction_of,
    diameter_bound_check,
    diameter_inclusion_check,
    expected_coverage,
    scaling_inequality_check,
    two_net_inclusion_check,
    two_net_independence_check,
)
from boolperc.sim.errors import DegenerateFitError, InfiniteMomentError, PercolationError, ResourceLimitError
from boolperc.sim.estimators import EventDescriptor, mc_estimate, oracle_G_exact
from boolperc.sim.geometry import (
    PROFILE_COLUMNS,
    assouad_fit,
    covering_profile,
    growth_exponent,
    growth_table,
    sample_centers,
    separated_net,
)
from boolperc.sim.graphs import LoadedGraph, ball
from boolperc.sim.percolation import cluster
from boolperc.sim.sampler import ProcessSpec, occupation_fraction, replica_seed, sample_window

logger = logging.getLogger(__name__)


@dataclass
class CommandResult:
    """What a subcommand hands back to the output stage."""
    frame: pd.DataFrame
    columns: List[str]
    summary: List[str] = field(default_factory=list)
    plot: Optional[Dict[str, Any]] = None
    estimates: List[dict] = field(default_factory=list)
    extra: Dict[str, Any] = field(default_factory=dict)


def _spec(cfg: ExperimentConfig, p: float) -> ProcessSpec:
    return ProcessSpec(p=p, law=cfg.build_law(), seed=cfg.seed)


def _fmt_coords(c) -> str:
    return ",".join(str(x) for x in c)


# Geometry

def cmd_graph_info(cfg: ExperimentConfig) -> CommandResult:
    model = cfg.build_model()
    center = cfg.center(model)
    table = growth_table(model, center, cfg.r)
    summary = [f"model {model.spec()} ({'transitive' if model.transitive else 'non-transitive'})"]
    try:
        fit = growth_exponent(table)
        summary.append(f"growth exponent d_hat = {fit.d_hat:.3f}, C_hat = {fit.C_hat:.3f} (R^2 = {fit.r2:.4f})")
    except DegenerateFitError:
        summary.append("growth exponent: need at least two radii >= 1")
    plot = {
        "series": {"|B(v,r)|": (table["r"], table["ball"])},
        "title": f"growth of {model.spec()}",
        "xlabel": "r",
        "ylabel": "ball size",
    }
    return CommandResult(table, ["r", "ball", "sphere", "doubling_ratio"], summary, plot)


def cmd_net(cfg: ExperimentConfig) -> CommandResult:
    model = cfg.build_model()
    center = cfg.center(model)
    r = cfg.r[0]
    base = ball(model, center, r)
    net = separated_net(model, base.coords, cfg.sep)
    dist = model.distances(center, [v.coords for v in net]) if net else np.zeros(0, dtype=np.int64)
    frame = pd.DataFrame({
        "index": np.arange(len(net)),
        "vertex": [_fmt_coords(v.coords) for v in net],
        "distance": dist,
    })
    summary = [f"greedy {cfg.sep}-separated net of B({_fmt_coords(center)}, {r}): {len(net)} of {len(base)} vertices"]
    return CommandResult(frame, ["index", "vertex", "distance"], summary)


def cmd_assouad(cfg: ExperimentConfig) -> CommandResult:
    model = cfg.build_model()
    v = None if cfg.vertex is None and isinstance(model, LoadedGraph) else cfg.center(model)
    profile = covering_profile(model, v, cfg.r, cfg.eps_fractions(), samples=cfg.samples, seed=cfg.seed)
    fit = assouad_fit(profile)
    summary = [f"Assouad fit: beta_hat = {fit.beta_hat:.3f}, C1_hat = {fit.C1_hat:.3f} (R^2 = {fit.r2:.4f})"]
    if fit.log2_doubling is not None:
        summary.append(f"doubling bound log2 C = {fit.log2_doubling:.3f}")
    series = {}
    for eps, rows in profile.groupby("eps", sort=True):
        mean = rows.groupby("r")["n_hat"].mean()
        series[f"eps={eps:g}"] = (mean.index.to_numpy(), mean.to_numpy())
    plot = {"series": series, "title": f"covering numbers of {model.spec()}", "xlabel": "r", "ylabel": "net size"}
    extra = {"fit": {"beta_hat": fit.beta_hat, "C1_hat": fit.C1_hat, "r2": fit.r2, "log2_doubling": fit.log2_doubling}}
    return CommandResult(profile, PROFILE_COLUMNS, summary, plot, extra=extra)


# Sampling and clusters

def _window(cfg: ExperimentConfig, default: int) -> int:
    return cfg.window if cfg.window is not None else default


def cmd_sample(cfg: ExperimentConfig) -> CommandResult:
    model = cfg.build_model()
    center = cfg.center(model)
    L = _window(cfg, 10)
    config = sample_window(model, center, L, _spec(cfg, cfg.p[0]))
    idx = config.occupied_indices
    coords = config.window.coords
    frame = pd.DataFrame({
        "vertex": [_fmt_coords(coords[i]) for i in idx],
        "distance": config.window.distances[idx],
        "radius": config.radius[idx],
    })
    summary = [
        f"window B({_fmt_coords(center)}, {L}): {len(config)} vertices, {len(idx)} occupied "
        f"(fraction {occupation_fraction(config):.4f}), max radius {config.r_max}"
    ]
    return CommandResult(frame, ["vertex", "distance", "radius"], summary)


def cmd_cluster(cfg: ExperimentConfig) -> CommandResult:
    model = cfg.build_model()
    center = cfg.center(model)
    L = _window(cfg, 10)
    config = sample_window(model, center, L, _spec(cfg, cfg.p[0]))
    result = cluster(config, center)
    members = sorted(result.members, key=lambda v: v.key)
    frame = pd.DataFrame({
        "vertex": [_fmt_coords(v.coords) for v in members],
        "distance": model.distances(center, [v.coords for v in members]) if members else [],
    })
    summary = [
        f"cluster of {_fmt_coords(center)}: size {result.size}, D = {result.D}"
        + (" (censored by the window)" if result.censored else "")
    ]
    return CommandResult(frame, ["vertex", "distance"], summary, extra={"D": result.D, "censored": result.censored})


# Monte Carlo estimates

def _estimate_grid(cfg: ExperimentConfig, kind: str) -> CommandResult:
    model = cfg.build_model()
    center = cfg.center(model)
    law = cfg.build_law()
    estimates = []
    for r in cfg.r:
        event = EventDescriptor(kind, center, r, cfg.window)
        for p in cfg.p:
            spec = ProcessSpec(p=p, law=law, seed=cfg.seed)
            estimates.append(mc_estimate(
                model, spec, event, cfg.replicas, jobs=cfg.jobs, confidence=cfg.confidence, progress=cfg.progress
            ))
    rows = [e.as_row() for e in estimates]
    frame = pd.DataFrame(rows, columns=ESTIMATE_COLUMNS)
    summary = [
        f"{kind}(r={e.event.r}) p={e.p:g}: p_hat = {e.p_hat:.6f} [{e.ci_lo:.6f}, {e.ci_hi:.6f}] ({e.replicas} replicas)"
        for e in estimates
    ]
    series = {}
    for r, rows_r in frame.groupby("r", sort=True):
        series[f"r={r}"] = (rows_r["p"].to_numpy(), rows_r["p_hat"].to_numpy())
    plot = {"series": series, "title": f"P({kind}) on {model.spec()}, {law.spec()}", "xlabel": "p", "ylabel": "p_hat"}
    return CommandResult(frame, ESTIMATE_COLUMNS, summary, plot, estimates=rows)


def cmd_event_g(cfg: ExperimentConfig) -> CommandResult:
    return _estimate_grid(cfg, "G")


def cmd_event_htilde(cfg: ExperimentConfig) -> CommandResult:
    return _estimate_grid(cfg, "Htilde")


def cmd_event_h(cfg: ExperimentConfig) -> CommandResult:
    return _estimate_grid(cfg, "H_window")


def cmd_sweep(cfg: ExperimentConfig) -> CommandResult:
    """p-grid x r-grid of G estimates."""
    return _estimate_grid(cfg, "G")


def cmd_oracle(cfg: ExperimentConfig) -> CommandResult:
    model = cfg.build_model()
    law = cfg.build_law()
    r = cfg.r[0]
    rows, summary = [], []
    for p in cfg.p:
        exact = oracle_G_exact(model, r, Fraction(str(p)), law, exact=True)
        rows.append({"p": p, "r": r, "probability": float(exact), "exact": str(exact)})
        summary.append(f"P(G(0,{r})) at p={p:g}: {float(exact):.10f}")
    frame = pd.DataFrame(rows)
    plot = {"series": {"exact": (frame["p"], frame["probability"])}, "title": "exact P(G(0,1)) on z:1", "xlabel": "p", "ylabel": "probability"}
    return CommandResult(frame, ["p", "r", "probability", "exact"], summary, plot)


# Analytic bounds

def cmd_bounds(cfg: ExperimentConfig) -> CommandResult:
    model = cfg.build_model()
    law = cfg.build_law()
    constants = cfg.build_constants(model)
    summary = [f"constants ({constants.source}): dim = {constants.dim}, C1 = {constants.C1}"]
    summary.append(f"K = {constants.K}, C2 = {constants.C2}, C3 = {constants.C3}")
    extra: Dict[str, Any] = {"constants": constants.as_dict()}
    try:
        p0 = p_zero(constants, law)
        summary.append(f"p0 = {p0}" + ("" if isinstance(p0, Fraction) else f" ({float(p0):.6g})"))
        extra["p_zero"] = str(p0)
    except InfiniteMomentError as e:
        summary.append(f"p0 undefined: {e}")
        extra["p_zero"] = None
    rows = []
    for p in cfg.p:
        for r in cfg.r:
            rows.append({
                "p": p,
                "r": r,
                "sb1": float(bound_SB1(constants, p, r)),
                "sb2": float(bound_SB2(constants, p, law, r)),
            })
    frame = pd.DataFrame(rows, columns=["p", "r", "sb1", "sb2"])
    return CommandResult(frame, ["p", "r", "sb1", "sb2"], summary, extra=extra)


def cmd_h_bracket(cfg: ExperimentConfig) -> CommandResult:
    model = cfg.build_model()
    center = cfg.center(model)
    law = cfg.build_law()
    constants = cfg.build_constants(model)
    rows = []
    for p in cfg.p:
        for r in cfg.r:
            L = _window(cfg, 20 * r)
            lo, hi = prob_H_bracket(model, center, r, p, law, L, constants)
            rows.append({"p": p, "r": r, "L": L, "lo": lo, "hi": hi, "width": hi - lo})
    frame = pd.DataFrame(rows, columns=["p", "r", "L", "lo", "hi", "width"])
    summary = [f"P(H(v,{row.r})) at p={row.p:g}: [{row.lo:.6g}, {row.hi:.6g}]" for row in frame.itertuples()]
    series = {}
    for p, rows_p in frame.groupby("p", sort=True):
        series[f"p={p:g}"] = (rows_p["r"].to_numpy(), rows_p["lo"].to_numpy())
    plot = {"series": series, "title": "lower bracket of P(H(v,r))", "xlabel": "r", "ylabel": "lo"}
    return CommandResult(frame, ["p", "r", "L", "lo", "hi", "width"], summary, plot)


def cmd_recursion(cfg: ExperimentConfig) -> CommandResult:
    F0 = cfg.fractions(cfg.f0) if cfg.f0 else [Fraction(1, 2)]
    G = cfg.fractions(cfg.g_levels) if cfg.g_levels else [Fraction(1, 2 ** k) / 8 for k in range(20)]
    report = recursion_check(F0, G)
    frame = pd.DataFrame({
        "n": np.arange(len(report.direct)),
        "direct": [float(x) for x in report.direct],
        "closed": [float(x) for x in report.closed],
        "direct_exact": [str(x) for x in report.direct],
    })
    summary = [
        f"hypotheses {'hold' if report.hypotheses_ok else 'violated'}; "
        f"direct <= closed: {report.bounded_by_closed}; direct <= 1/2: {report.below_half}",
        f"F_{len(G)} = {float(report.direct[-1]):.6g} ({'below' if report.converged else 'above'} {report.threshold:g})",
    ]
    plot = {
        "series": {"direct": (frame["n"], frame["direct"]), "closed": (frame["n"], frame["closed"])},
        "title": "recursion F_n",
        "xlabel": "n",
        "ylabel": "F_n",
    }
    return CommandResult(frame, ["n", "direct", "closed", "direct_exact"], summary, plot)


# Statistical checks

def cmd_scaling_check(cfg: ExperimentConfig) -> CommandResult:
    model = cfg.build_model()
    law = cfg.build_law()
    constants = cfg.build_constants(model)
    if isinstance(model, LoadedGraph) and cfg.vertex is None:
        centers = sample_centers(model, None, cfg.samples, cfg.seed)
    else:
        centers = [cfg.center(model)]
    rows, estimates, summary = [], [], []
    for p in cfg.p:
        for r in cfg.r:
            rep = scaling_inequality_check(
                model, constants, r, p, law, cfg.replicas, seed=cfg.seed, centers=centers,
                jobs=cfg.jobs, confidence=cfg.confidence,
            )
            rows.append({
                "p": p,
                "r": r,
                "lhs_hi": rep.g_10r.ci_hi,
                "rhs": rep.rhs,
                "rhs_net": rep.rhs_net,
                "net_near": rep.net_sizes[0],
                "net_far": rep.net_sizes[1],
                "holds": rep.holds,
                "violation_at_ci": rep.violation_at_ci,
                "sup_is_lower_bound": rep.sup_is_lower_bound,
            })
            estimates.extend(e.as_row() for e in (rep.g_10r, rep.g_r, rep.htilde_r))
            summary.append(
                f"p={p:g} r={r}: P(G(10r)) <= {rep.g_10r.ci_hi:.4g} vs K-form {rep.rhs:.4g}, net-form {rep.rhs_net:.4g} "
                f"({'holds' if rep.holds else 'fails'})"
            )
    columns = ["p", "r", "lhs_hi", "rhs", "rhs_net", "net_near", "net_far", "holds", "violation_at_ci", "sup_is_lower_bound"]
    return CommandResult(pd.DataFrame(rows, columns=columns), columns, summary, estimates=estimates)


def cmd_diameter_inclusion(cfg: ExperimentConfig) -> CommandResult:
    model = cfg.build_model()
    law = cfg.build_law()
    center = cfg.center(model)
    rows = []
    for p in cfg.p:
        for r in cfg.r:
            L = _window(cfg, 20 * r)
            rep = diameter_inclusion_check(model, p, law, r, L, cfg.replicas, seed=cfg.seed, v=center, progress=cfg.progress)
            rows.append({"p": p, "r": r, "L": L, "configs": rep.configs, "accepted": rep.accepted,
                         "counterexamples": rep.counterexamples, "vacuous": rep.vacuous})
    columns = ["p", "r", "L", "configs", "accepted", "counterexamples", "vacuous"]
    frame = pd.DataFrame(rows, columns=columns)
    summary = [f"{int(frame['counterexamples'].sum())} counterexamples over {int(frame['configs'].sum())} configurations"]
    return CommandResult(frame, columns, summary)


def cmd_net_inclusion(cfg: ExperimentConfig) -> CommandResult:
    model = cfg.build_model()
    law = cfg.build_law()
    center = cfg.center(model)
    rows, summary = [], []
    for p in cfg.p:
        for r in cfg.r:
            rep = two_net_inclusion_check(
                model, p, law, r, cfg.replicas, max_configs=20 * cfg.replicas, seed=cfg.seed,
                v=center, L=cfg.window, progress=cfg.progress,
            )
            ind = two_net_independence_check(model, p, law, r, cfg.replicas, seed=cfg.seed, v=center, progress=cfg.progress)
            rows.append({"p": p, "r": r, "configs": rep.configs, "accepted": rep.accepted,
                         "counterexamples": rep.counterexamples, "vacuous": rep.vacuous,
                         "freq_joint": ind.freq_joint, "freq_product": ind.product,
                         "independence_consistent": ind.consistent})
            if rep.vacuous:
                summary.append(f"p={p:g} r={r}: conditioning event never occurred in {rep.configs} configurations")
    columns = ["p", "r", "configs", "accepted", "counterexamples", "vacuous", "freq_joint", "freq_product", "independence_consistent"]
    frame = pd.DataFrame(rows, columns=columns)
    summary.append(f"{int(frame['counterexamples'].sum())} counterexamples over {int(frame['accepted'].sum())} accepted configurations")
    return CommandResult(frame, columns, summary)


def cmd_diameter_check(cfg: ExperimentConfig) -> CommandResult:
    model = cfg.build_model()
    law = cfg.build_law()
    constants = cfg.build_constants(model)
    rows, estimates = [], []
    for p in cfg.p:
        for r in cfg.r:
            L = _window(cfg, 20 * r)
            rep = diameter_bound_check(model, r, p, law, L, cfg.replicas, constants, seed=cfg.seed, jobs=cfg.jobs)
            rows.append({"p": p, "r": r, "L": L, "d_exceeds_lo": rep.d_exceeds.ci_lo, "bound": rep.bound, "holds": rep.holds})
            estimates.extend([rep.d_exceeds.as_row(), rep.g_r.as_row()])
    columns = ["p", "r", "L", "d_exceeds_lo", "bound", "holds"]
    frame = pd.DataFrame(rows, columns=columns)
    summary = [f"P(D > 8r) bound holds in {int(frame['holds'].sum())} of {len(frame)} cases"]
    return CommandResult(frame, columns, summary, estimates=estimates)


# Coverage and clusters at large scale

def cmd_coverage(cfg: ExperimentConfig) -> CommandResult:
    model = cfg.build_model()
    center = cfg.center(model)
    law = cfg.build_law()
    constants = cfg.build_constants(model)
    p, r = cfg.p[0], cfg.r[0]
    series = coverage_series(model, center, r, law, p, cfg.terms, constants)
    rows = []
    for L in tqdm(cfg.windows, desc="coverage", disable=not cfg.progress):
        expected = expected_coverage(model, L, p, law, o=center)
        observed = [
            coverage_fraction_of(sample_window(model, center, L, ProcessSpec(p=p, law=law, seed=replica_seed(cfg.seed, k))))
            for k in range(cfg.samples)
        ]
        rows.append({"L": L, "expected": expected, "observed": float(np.mean(observed))})
    frame = pd.DataFrame(rows, columns=["L", "expected", "observed"])
    summary = [
        f"coverage series ({series.exact_terms} exact terms): partial sum {float(series.partial[-1]):.6g}, {series.classification}",
    ]
    summary += [f"L={row.L}: expected {row.expected:.4f}, observed {row.observed:.4f}" for row in frame.itertuples()]
    plot = {
        "series": {"expected": (frame["L"], frame["expected"]), "observed": (frame["L"], frame["observed"])},
        "title": f"coverage on {model.spec()}, {law.spec()}, p={p:g}",
        "xlabel": "window radius L",
        "ylabel": "covered fraction",
        "logx": True,
    }
    extra = {"classification": series.classification, "partial": series.partial, "exact_terms": series.exact_terms}
    return CommandResult(frame, ["L", "expected", "observed"], summary, plot, extra=extra)


def cmd_census(cfg: ExperimentConfig) -> CommandResult:
    model = cfg.build_model()
    center = cfg.center(model)
    L = _window(cfg, 50)
    config = sample_window(model, center, L, _spec(cfg, cfg.p[0]))
    census = cluster_census(config)
    frame = pd.DataFrame(
        {"size": list(census.histogram.keys()), "count": list(census.histogram.values())},
        columns=["size", "count"],
    )
    summary = [f"{census.n_components} components, largest {census.largest}, {census.spanning} spanning"]
    extra = {"n_components": census.n_components, "spanning": census.spanning, "largest": census.largest}
    return CommandResult(frame, ["size", "count"], summary, extra=extra)


COMMANDS: Dict[str, Callable[[ExperimentConfig], CommandResult]] = {
    "graph-info": cmd_graph_info,
    "net": cmd_net,
    "assouad": cmd_assouad,
    "sample": cmd_sample,
    "cluster": cmd_cluster,
    "event-g": cmd_event_g,
    "event-htilde": cmd_event_htilde,
    "event-h": cmd_event_h,
    "sweep": cmd_sweep,
    "oracle": cmd_oracle,
    "bounds": cmd_bounds,
    "h-bracket": cmd_h_bracket,
    "recursion": cmd_recursion,
    "scaling-check": cmd_scaling_check,
    "diameter-inclusion": cmd_diameter_inclusion,
    "net-inclusion": cmd_net_inclusion,
    "diameter-check": cmd_diameter_check,
    "coverage": cmd_coverage,
    "census": cmd_census,
}

HELP = {
    "graph-info": "Growth table |B(v,r)| and growth exponent",
    "net": "Greedy separated net of a ball",
    "assouad": "Covering profile and Assouad dimension fit",
    "sample": "Sample the marks of one window",
    "cluster": "Cluster of a vertex in one sampled window",
    "event-g": "Monte Carlo estimate of P(G(v,r))",
    "event-htilde": "Monte Carlo estimate of P(H~(v,r))",
    "event-h": "Monte Carlo estimate of the window event H(v,r)",
    "sweep": "p-grid x r-grid of G estimates",
    "oracle": "Exact P(G(0,1)) on z:1 for constant radii <= 3",
    "bounds": "SB1/SB2 bounds, p0 and the derived constants",
    "h-bracket": "Analytic bracket on P(H(v,r))",
    "recursion": "Check the F/G multiscale recursion in exact arithmetic",
    "scaling-check": "Statistical check of the multiscale inequality",
    "diameter-inclusion": "Pathwise check of the diameter inclusion",
    "net-inclusion": "Pathwise check of the two-net inclusion and independence",
    "diameter-check": "P(D_v > 8r) against P(G) + P(H)",
    "coverage": "Coverage series classification and covered fraction",
    "census": "Component-size histogram of one window",
}


class _Parser(argparse.ArgumentParser):
    """Parse errors become exit code 1 like every other config error."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(f"{self.prog}: error: {message}") from None


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value config file (flags override it)")
    common.add_argument("--model", help="z:d, heisenberg, tree:b or file:<path>")
    common.add_argument("--law", help="const:c, geom:q or zeta:alpha")
    common.add_argument("--p", help="Occupation probability or comma-separated grid")
    common.add_argument("--r", help="Scale or comma-separated grid of scales")
    common.add_argument("--window", type=int, help="Window radius L")
    common.add_argument("--windows", help="Comma-separated window radii (coverage)")
    common.add_argument("--replicas", type=int, help="Monte Carlo replicas per estimate")
    common.add_argument("--seed", type=int, help="Base seed")
    common.add_argument("--jobs", type=int, help="Parallel workers for replicas (-1 for all cores)")
    common.add_argument("--dim", type=float, help="Declared growth dimension")
    common.add_argument("--c1", type=float, help="Declared growth constant C1")
    common.add_argument("--budget", type=int, help="Vertex budget (overrides PERC_BUDGET)")
    common.add_argument("--vertex", help="Centre vertex as comma-separated integers")
    common.add_argument("--eps", help="Comma-separated covering scales, e.g. 1/2,1/4")
    common.add_argument("--samples", type=int, help="Centres or configurations per point")
    common.add_argument("--sep", type=int, help="Net separation")
    common.add_argument("--terms", type=int, help="Coverage series terms")
    common.add_argument("--f0", help="Comma-separated initial F values (rationals)")
    common.add_argument("--g-levels", dest="g_levels", help="Comma-separated G values per level (rationals)")
    common.add_argument("--confidence", type=float, help="Confidence level of intervals")
    common.add_argument("--output", help="Output file (.csv or .json)")
    common.add_argument("--plot", action="store_true", default=None, help="Also write an SVG of the primary curve")
    common.add_argument("--record", action="store_true", default=None, help="Store the run in the run store")
    common.add_argument("--progress", action="store_true", default=None, help="Show progress bars")
    common.add_argument("--verbose", action="store_true", help="Debug logging")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="boolperc", description="Boolean percolation on doubling graphs")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common_options()
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=HELP[name])
    return parser


_NOT_CONFIG = {"command", "config", "verbose"}


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    return {k: v for k, v in vars(args).items() if k not in _NOT_CONFIG}


def _record(command: str, config: Dict[str, Any], rows: List[dict]) -> int:
    from boolperc.db import SessionLocal, init_db
    from boolperc.models import record_run

    init_db()
    db = SessionLocal()
    try:
        return record_run(db, command, config, rows).id
    finally:
        db.close()


def run(command: str, cfg: ExperimentConfig) -> CommandResult:
    """Execute one subcommand and write its outputs."""
    cfg.apply_budget()
    result = COMMANDS[command](cfg)
    echo = cfg.echo()
    for line in result.summary:
        print(line)
    if cfg.output:
        write_output(cfg.output, result.frame, echo, result.columns, result.extra)
    elif len(result.frame) <= 40:
        print(result.frame.reindex(columns=result.columns).to_string(index=False))
    if cfg.plot and result.plot is not None:
        spec = dict(result.plot)
        series = spec.pop("series")
        save_line_chart(plot_path(cfg.output, command), series, **spec)
    if cfg.record:
        run_id = _record(command, echo, result.estimates)
        print(f"recorded run {run_id}")
    return result


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        if e.code in (0, None):
            return 0
        print(e.code, file=sys.stderr)
        return 1

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = resolve_config(args.config, _overrides(args))
        run(args.command, cfg)
    except ResourceLimitError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except PercolationError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
