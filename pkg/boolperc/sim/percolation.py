"""
The Boolean random graph on a sampled window, cluster exploration and the
multiscale events G, H~, H.

An occupied centre c joins every vertex of B(c, R_c) to itself, so inside a
region the connectivity structure is the union of the "stars"
region ∩ B(c, R_c) of the occupied centres of that region. Components are
explored over stars rather than over individual edges.
"""
import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Tuple

import numpy as np

from boolperc.sim.errors import ConfigError, OutOfWindowError, WindowTooSmallError
from boolperc.sim.graphs import Coords, GroupModel, LoadedGraph, Vertex, ball
from boolperc.sim.sampler import Configuration
from boolperc.sim.unionfind import UnionFind

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ClusterResult:
    """Component of `root` in the window graph; members and D are lower bounds when censored."""
    root: Vertex
    members: FrozenSet[Vertex]
    D: int
    censored: bool

    @property
    def size(self) -> int:
        return len(self.members)


@dataclass(eq=False)
class Region:
    """B(anchor, rho) ∩ window, as a mask over window indices."""
    anchor: Coords
    rho: int
    dist: np.ndarray
    mask: np.ndarray

    @property
    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    def __len__(self) -> int:
        return int(self.mask.sum())


def _coords(v: "Vertex | Coords") -> Coords:
    return v.coords if isinstance(v, Vertex) else tuple(v)


def distances_from(config: Configuration, v: "Vertex | Coords") -> np.ndarray:
    """d(v, u) for every window member u, aligned with the window."""
    c = _coords(v)
    window = config.window
    if c == window.center.coords:
        return window.distances
    config.index_of(c)
    return config.model.distances(c, window.coords)


def whole_window(config: Configuration) -> Region:
    window = config.window
    return Region(
        anchor=window.center.coords,
        rho=window.radius,
        dist=window.distances,
        mask=np.ones(len(window), dtype=bool),
    )


def region_of(config: Configuration, v: "Vertex | Coords", rho: int) -> Region:
    """B(v, rho) as a region of the window; raises if the window does not contain it."""
    c = _coords(v)
    try:
        dist = distances_from(config, c)
    except OutOfWindowError:
        raise WindowTooSmallError(f"{c} is outside the window B({config.center.coords}, {config.L})")
    mask = dist <= rho
    offset = int(dist[0]) if len(dist) else 0  # members[0] is the window centre
    if offset + rho > config.L:
        model = config.model
        if isinstance(model, GroupModel):
            inside = int(mask.sum()) == model.ball_size(rho)
        else:
            index = config.window.index
            inside = all(x in index for x in ball(model, c, rho).coords)
        if not inside:
            raise WindowTooSmallError(
                f"window B({config.center.coords}, {config.L}) does not contain B({c}, {rho})"
            )
    return Region(anchor=c, rho=rho, dist=dist, mask=mask)


def star(config: Configuration, center: int, region: Region) -> np.ndarray:
    """Window indices of region ∩ B(c, R_c) for the centre at window index `center`."""
    R = int(config.radius[center])
    if R >= int(region.dist[center]) + region.rho:
        return region.indices
    model = config.model
    c = config.window.coords[center]
    if R == 0:
        return np.array([center], dtype=np.int64)
    if isinstance(model, GroupModel) and R <= model.cached_radius and model.ball_size(R) < len(region):
        index = config.window.index
        hits = [index.get(x) for x, _ in model.ball_coords(c, R)]
        idx = np.fromiter((i for i in hits if i is not None), dtype=np.int64)
        return idx[region.mask[idx]]
    if isinstance(model, LoadedGraph):
        index = config.window.index
        hits = [index.get(x) for x, _ in model.ball_coords(c, R)]
        idx = np.fromiter((i for i in hits if i is not None), dtype=np.int64)
        return idx[region.mask[idx]]
    inside = region.indices
    coords = config.window.coords
    d = model.distances(c, [coords[i] for i in inside])
    return inside[d <= R]


def stars_of(config: Configuration, region: Region) -> Dict[int, np.ndarray]:
    """Stars of every occupied centre inside the region."""
    centers = np.flatnonzero(config.occupied & region.mask)
    return {int(c): star(config, int(c), region) for c in centers}


def _component(stars: Dict[int, np.ndarray], start: int) -> np.ndarray:
    covering: Dict[int, List[int]] = {}
    for c, members in stars.items():
        for x in members.tolist():
            covering.setdefault(x, []).append(c)
    seen = {start}
    queue = [start]
    used = set()
    while queue:
        x = queue.pop()
        for c in covering.get(x, ()):
            if c in used:
                continue
            used.add(c)
            for y in stars[c].tolist():
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
    return np.fromiter(sorted(seen), dtype=np.int64, count=len(seen))


def component_in(config: Configuration, region: Region, v: "Vertex | Coords") -> np.ndarray:
    """Component of v in the induced graph on the region (window indices)."""
    i = config.index_of(v)
    if not region.mask[i]:
        raise OutOfWindowError(f"{_coords(v)} is outside the region B({region.anchor}, {region.rho})")
    return _component(stars_of(config, region), i)


def window_components(config: Configuration) -> List[np.ndarray]:
    """Every component of the window graph."""
    uf = UnionFind(len(config))
    for members in stars_of(config, whole_window(config)).values():
        uf.union_all(members)
    return [np.asarray(c, dtype=np.int64) for c in uf.components()]


def edge(config: Configuration, u: "Vertex | Coords", w: "Vertex | Coords") -> bool:
    """(X_u and d(u,w) <= R_u) or (X_w and d(u,w) <= R_w)."""
    cu, cw = _coords(u), _coords(w)
    if cu == cw:
        raise ConfigError("edge endpoints must differ")
    occ_u, r_u = config.marks(cu)
    occ_w, r_w = config.marks(cw)
    d = config.model.distance(cu, cw)
    return (occ_u and d <= r_u) or (occ_w and d <= r_w)


def cluster(config: Configuration, v: "Vertex | Coords") -> ClusterResult:
    """
    Cluster of v in the window graph.

    Censored when the cluster holds a vertex u with L - d(o,u) < R_max, where
    R_max is the largest radius sampled in the window: an occupied centre
    outside the window could reach u.
    """
    comp = component_in(config, whole_window(config), v)
    dv = distances_from(config, v)
    members = config.window.members
    slack = config.L - config.window.distances[comp]
    return ClusterResult(
        root=config.model.vertex(_coords(v)) if not isinstance(v, Vertex) else v,
        members=frozenset(members[i][0] for i in comp.tolist()),
        D=int(dv[comp].max()),
        censored=bool(np.any(slack < config.r_max)),
    )


def _require_r(r: int) -> None:
    if r < 1:
        raise ConfigError("scale r must be >= 1")


def event_G(config: Configuration, v: "Vertex | Coords", r: int) -> bool:
    """v reaches the exterior of B(v, 8r) inside the induced graph on B(v, 10r)."""
    _require_r(r)
    region = region_of(config, v, 10 * r)
    comp = _component(stars_of(config, region), config.index_of(v))
    return bool(np.any(region.dist[comp] > 8 * r))


def event_Htilde(config: Configuration, v: "Vertex | Coords", r: int) -> bool:
    """Some occupied w in B(v, 100r) has R_w >= r."""
    region = region_of(config, v, 100 * r)
    return bool(np.any(config.occupied & region.mask & (config.radius >= r)))


def event_H_window(config: Configuration, v: "Vertex | Coords", r: int) -> bool:
    """
    Some occupied w with 10r < d(w,v) <= L_v has 10 R_w > d(w,v), where
    L_v = L - d(o,v) is the largest ball around v inside the window.
    """
    c = _coords(v)
    dist = distances_from(config, c)
    reach = config.L - int(dist[0])
    if reach <= 10 * r:
        raise WindowTooSmallError(f"H({c},{r}) needs a window radius > {10 * r} around {c}, have {reach}")
    far = (dist > 10 * r) & (dist <= reach)
    hit = config.occupied & far & (10 * config.radius > dist)
    return bool(np.any(hit))


def event_D_exceeds(config: Configuration, v: "Vertex | Coords", r: int) -> bool:
    """D_v > 8r on the window cluster (a lower bound of the unwindowed event)."""
    return cluster(config, v).D > 8 * r


def event_ball_covered(config: Configuration, v: "Vertex | Coords", r: int) -> bool:
    """Some occupied w in the window has R_w > d(w,v) + r, so B(v,r) lies in one ball."""
    dist = distances_from(config, v)
    return bool(np.any(config.occupied & (config.radius > dist + r)))


def covered_mask(config: Configuration, region: Optional[Region] = None) -> np.ndarray:
    """Window vertices lying in some occupied ball B(w, R_w) with w in the window."""
    region = region or whole_window(config)
    covered = np.zeros(len(config), dtype=bool)
    for members in stars_of(config, whole_window(config)).values():
        covered[members] = True
    return covered & region.mask


def event_indicator(kind: str, config: Configuration, v: "Vertex | Coords", r: int) -> bool:
    fn = EVENTS.get(kind)
    if fn is None:
        raise ConfigError(f"unknown event kind {kind!r} (expected one of {sorted(EVENTS)})")
    return fn(config, v, r)


EVENTS = {
    "G": event_G,
    "Htilde": event_Htilde,
    "H_window": event_H_window,
    "D_exceeds": event_D_exceeds,
    "covered": event_ball_covered,
}


def required_window(kind: str, r: int) -> int:
    """Smallest window radius around v on which the event is evaluated."""
    if kind == "G":
        return 10 * r
    if kind == "Htilde":
        return 100 * r
    if kind == "H_window":
        return 10 * r + 1
    if kind in ("D_exceeds", "covered"):
        return 8 * r + 1
    raise ConfigError(f"unknown event kind {kind!r}")
