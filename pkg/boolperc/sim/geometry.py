"""
Metric geometry of graph models: separated nets, covering profiles, growth
tables and dimension fits.

Greedy maximal separated sets stand in for maximum ones; they lower-bound the
covering numbers and keep the covering property.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from sklearn.linear_model import LinearRegression

from boolperc.sim.errors import ConfigError, DegenerateFitError
from boolperc.sim.graphs import Coords, GraphModel, LoadedGraph, Vertex, ball, growth

logger = logging.getLogger(__name__)

PROFILE_COLUMNS = ["center", "r", "eps", "sep", "n_hat", "ball_size"]


@dataclass(frozen=True)
class AssouadFit:
    beta_hat: float
    C1_hat: float
    r2: float
    log2_doubling: Optional[float] = None


@dataclass(frozen=True)
class GrowthFit:
    d_hat: float
    C_hat: float
    r2: float


def _as_vertices(model: GraphModel, base: Iterable["Vertex | Coords"]) -> List[Vertex]:
    out = []
    for x in base:
        out.append(x if isinstance(x, Vertex) else model.vertex(tuple(x)))
    return out


def separated_net(model: GraphModel, base: Iterable["Vertex | Coords"], sep: int) -> List[Vertex]:
    """
    Maximal sep-separated subset of `base`, chosen greedily in key order.

    Every base vertex ends up within distance < sep of the net.
    """
    if sep < 1:
        raise ConfigError("separation must be >= 1")
    vertices = sorted(set(_as_vertices(model, base)), key=lambda v: v.key)
    excluded = set()
    net: List[Vertex] = []
    for v in vertices:
        if v.coords in excluded:
            continue
        net.append(v)
        if sep > 1:
            excluded.update(c for c, _ in model.ball_coords(v.coords, sep - 1))
    return net


def is_separated(model: GraphModel, net: Sequence[Vertex], sep: int) -> bool:
    for i, a in enumerate(net):
        for b in net[i + 1:]:
            if model.distance(a.coords, b.coords) < sep:
                return False
    return True


def covers(model: GraphModel, base: Iterable["Vertex | Coords"], net: Sequence[Vertex], sep: int) -> bool:
    """Every base vertex lies within distance sep of the net."""
    targets = [v.coords for v in net]
    for v in _as_vertices(model, base):
        if int(model.distances(v.coords, targets).min()) > sep:
            return False
    return True


def sample_centers(model: GraphModel, v: "Vertex | Coords | None", samples: int, seed: int) -> List[Coords]:
    if v is not None:
        return [v.coords if isinstance(v, Vertex) else tuple(v)]
    if model.transitive or not isinstance(model, LoadedGraph):
        return [model.origin()]
    nodes = np.array(sorted(model.graph.nodes), dtype=np.int64)
    rng = np.random.default_rng(seed)
    picks = rng.choice(nodes, size=min(samples, len(nodes)), replace=False)
    return [(int(x),) for x in sorted(picks)]


def covering_profile(
    model: GraphModel,
    v: "Vertex | Coords | None",
    radii: Sequence[int],
    eps_list: Sequence[Union[Fraction, float, str]],
    samples: int = 1,
    seed: int = 0,
) -> pd.DataFrame:
    """
    Greedy net sizes N̂ of B(v, r) at separation ceil(eps*r).

    For non-transitive models with v=None, `samples` centres are drawn and
    one row per centre is returned.
    """
    eps_values = [Fraction(e).limit_denominator(10 ** 6) if not isinstance(e, Fraction) else e for e in eps_list]
    for eps in eps_values:
        if not 0 < eps <= 1:
            raise ConfigError(f"eps must lie in (0, 1], got {eps}")
    rows = []
    for c in sample_centers(model, v, samples, seed):
        for r in radii:
            base = ball(model, c, r)
            for eps in eps_values:
                sep = math.ceil(eps * r)
                if sep < 1:
                    raise ConfigError(f"eps*r must be >= 1 (r={r}, eps={eps})")
                net = separated_net(model, base.coords, sep)
                rows.append({
                    "center": str(c),
                    "r": int(r),
                    "eps": float(eps),
                    "sep": sep,
                    "n_hat": len(net),
                    "ball_size": len(base),
                })
                logger.debug(f"N̂(B({c},{r}), {eps}) = {len(net)}")
    return pd.DataFrame(rows, columns=PROFILE_COLUMNS)


def doubling_constant(profile: pd.DataFrame) -> Tuple[int, float]:
    """Largest N̂ at eps = 1/2 and its log2, an upper-bound proxy for the dimension."""
    halves = profile[np.isclose(profile["eps"], 0.5)]
    if halves.empty:
        raise DegenerateFitError("profile has no eps = 1/2 rows")
    c = int(halves["n_hat"].max())
    return c, math.log2(c) if c > 0 else 0.0


def assouad_fit(profile: pd.DataFrame) -> AssouadFit:
    """
    Least-squares slope of log N̂ against log(1/eps), pooled over r, and the
    smallest C1 with |B(v,r)| <= C1 r^beta on every observed ball.
    """
    rows = profile[profile["eps"] < 1]
    if rows["eps"].nunique() < 2:
        raise DegenerateFitError("assouad fit needs at least two distinct eps < 1")
    X = np.log(1.0 / rows["eps"].to_numpy(dtype=np.float64)).reshape(-1, 1)
    y = np.log(rows["n_hat"].to_numpy(dtype=np.float64))
    reg = LinearRegression().fit(X, y)
    beta = float(reg.coef_[0])
    balls = profile.drop_duplicates(subset=["center", "r"])
    balls = balls[balls["r"] >= 1]
    C1 = float((balls["ball_size"] / balls["r"].astype(np.float64) ** beta).max())
    try:
        _, log2c = doubling_constant(profile)
    except DegenerateFitError:
        log2c = None
    fit = AssouadFit(beta_hat=beta, C1_hat=C1, r2=float(reg.score(X, y)), log2_doubling=log2c)
    logger.info(f"Assouad fit: beta_hat={fit.beta_hat:.3f}, C1_hat={fit.C1_hat:.3f}")
    return fit


def growth_table(model: GraphModel, v: "Vertex | Coords | None", radii: Sequence[int]) -> pd.DataFrame:
    """Rows (r, |B(v,r)|, |S(v,r)|, |B(v,2r)| / |B(v,r)|)."""
    rows = []
    for r in radii:
        size = growth(model, v, r)
        inner = growth(model, v, r - 1) if r > 0 else 0
        rows.append({
            "r": int(r),
            "ball": size,
            "sphere": size - inner,
            "doubling_ratio": growth(model, v, 2 * r) / size,
        })
    return pd.DataFrame(rows, columns=["r", "ball", "sphere", "doubling_ratio"])


def growth_exponent(table: pd.DataFrame) -> GrowthFit:
    """Log-log fit gamma(r) ~ r^d and the two-sided constant C with C^-1 r^d <= gamma <= C r^d."""
    rows = table[table["r"] >= 1]
    if rows["r"].nunique() < 2:
        raise DegenerateFitError("growth fit needs at least two radii >= 1")
    X = np.log(rows["r"].to_numpy(dtype=np.float64)).reshape(-1, 1)
    y = np.log(rows["ball"].to_numpy(dtype=np.float64))
    reg = LinearRegression().fit(X, y)
    d = float(reg.coef_[0])
    ratio = rows["ball"].to_numpy(dtype=np.float64) / rows["r"].to_numpy(dtype=np.float64) ** d
    C = float(np.max(np.maximum(ratio, 1.0 / ratio)))
    return GrowthFit(d_hat=d, C_hat=C, r2=float(reg.score(X, y)))


def fitted_constants(model: GraphModel, radii: Sequence[int] = (2, 4, 8)) -> Tuple[float, float]:
    """(dim, C1) from a covering profile around the origin, for models without built-ins."""
    profile = covering_profile(model, None, radii, [Fraction(1, 2), Fraction(1, 4)], samples=4)
    fit = assouad_fit(profile)
    logger.warning(
        f"Using fitted constants dim={fit.beta_hat:.3f}, C1={fit.C1_hat:.3f} for {model.spec()}; "
        f"bounds derived from them are heuristic"
    )
    return max(fit.beta_hat, 0.0), fit.C1_hat


def metric_violations(model: GraphModel, v: "Vertex | Coords | None", r: int, samples: int = 64, seed: int = 0) -> int:
    """Count sampled pairs u, w in B(v,r) with d(u,w) > d(u,v) + d(v,w)."""
    view = ball(model, v, r)
    coords = view.coords
    rng = np.random.default_rng(seed)
    center = view.center.coords
    bad = 0
    for _ in range(samples):
        i, j = rng.integers(0, len(coords), size=2)
        u, w = coords[int(i)], coords[int(j)]
        if model.distance(u, w) > model.distance(u, center) + model.distance(center, w):
            bad += 1
        if model.distance(u, w) != model.distance(w, u):
            bad += 1
    return bad
