"""
Graph models for the Boolean percolation engine.

Every model is a connected, locally finite graph with positive integer edge
weights, viewed as a metric space under the weighted path distance. The
built-ins (Z^d, the discrete Heisenberg group, regular trees) are implicit and
infinite; arbitrary finite lattices enter through `load_graph`.

Group models (Cayley graphs) are left-invariant, so B(v,r) = v * B(e,r). They
keep one BFS table of the identity ball, grown on demand, and translate it.
"""
import heapq
import logging
import math
import os
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from boolperc.sim.errors import BudgetExceededError, ConfigError, GraphFormatError, NonPositiveWeightError

logger = logging.getLogger(__name__)

DEFAULT_BUDGET = 5_000_000

Coords = Tuple[int, ...]


def get_budget() -> int:
    """Vertex budget per ball computation (env PERC_BUDGET overrides the default)."""
    raw = os.environ.get("PERC_BUDGET")
    if raw:
        try:
            value = int(raw)
        except ValueError:
            raise ConfigError(f"PERC_BUDGET must be an integer, got {raw!r}")
        if value < 1:
            raise ConfigError("PERC_BUDGET must be positive")
        return value
    return DEFAULT_BUDGET


def zigzag(n: int) -> int:
    """Map a signed integer to a non-negative one, preserving |n| ordering."""
    return 2 * n if n >= 0 else -2 * n - 1


@dataclass(frozen=True)
class Vertex:
    """A vertex identified by its canonical key; coords are model-specific."""
    key: bytes
    coords: Coords = field(compare=False)

    def __repr__(self) -> str:
        return f"Vertex{self.coords}"


@dataclass(frozen=True, eq=False)
class BallView:
    """Closed ball B(center, radius) with members sorted by (distance, key)."""
    center: Vertex
    radius: int
    members: Tuple[Tuple[Vertex, int], ...]
    sphere_sizes: np.ndarray

    def __len__(self) -> int:
        return len(self.members)

    @cached_property
    def coords(self) -> List[Coords]:
        return [vertex.coords for vertex, _ in self.members]

    @cached_property
    def distances(self) -> np.ndarray:
        return np.fromiter((d for _, d in self.members), dtype=np.int64, count=len(self.members))

    @cached_property
    def index(self) -> Dict[Coords, int]:
        return {vertex.coords: i for i, (vertex, _) in enumerate(self.members)}

    def sphere(self, k: int) -> List[Vertex]:
        return [vertex for vertex, d in self.members if d == k]


class GraphModel(ABC):
    """
    A connected, locally finite metric graph.

    Subclasses provide neighbours, canonical key words and (where cheaper
    than search) a closed-form distance.
    """

    kind: str = "graph"
    tag: int = 0
    transitive: bool = False
    is_group: bool = False

    def __init__(self, declared_dim: Optional[float] = None, declared_C1: Optional[float] = None):
        if declared_dim is not None and declared_dim < 0:
            raise ConfigError("declared_dim must be >= 0")
        if declared_C1 is not None and declared_C1 <= 0:
            raise ConfigError("declared_C1 must be > 0")
        self.declared_dim = declared_dim
        self.declared_C1 = declared_C1

    @abstractmethod
    def origin(self) -> Coords:
        """A distinguished vertex (the identity for group models)."""

    @abstractmethod
    def neighbors(self, c: Coords) -> List[Tuple[Coords, int]]:
        """Adjacent vertices with their edge weights."""

    @abstractmethod
    def key_words(self, c: Coords) -> Tuple[int, ...]:
        """Canonical encoding of a vertex as unsigned 64-bit words."""

    @abstractmethod
    def spec(self) -> str:
        """The model spec string this model parses from."""

    def vertex(self, c: Coords) -> Vertex:
        words = self.key_words(c)
        key = bytes([self.tag]) + b"".join(w.to_bytes(8, "big") for w in words)
        return Vertex(key=key, coords=tuple(c))

    def contains(self, c: Coords) -> bool:
        return True

    def ball_coords(self, c: Coords, r: int, budget: Optional[int] = None) -> List[Tuple[Coords, int]]:
        """All (vertex, distance) pairs with distance <= r, unsorted."""
        return _dijkstra_ball(self, c, r, budget or get_budget())

    def distance(self, u: Coords, w: Coords) -> int:
        if tuple(u) == tuple(w):
            return 0
        return _dijkstra_distance(self, u, w, get_budget())

    def distances(self, u: Coords, targets: Sequence[Coords]) -> np.ndarray:
        return np.array([self.distance(u, t) for t in targets], dtype=np.int64)

    def sphere_size_formula(self, k: int) -> Optional[int]:
        """Exact |S(v,k)| when a closed form is known."""
        return None

    def default_constants(self) -> Optional[Tuple[float, float]]:
        """Built-in (dim, C1) pair, or None when the model has none."""
        return None

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.spec()}>"


def _dijkstra_ball(model: GraphModel, c: Coords, r: int, budget: int) -> List[Tuple[Coords, int]]:
    start = tuple(c)
    dist: Dict[Coords, int] = {start: 0}
    heap = [(0, start)]
    done = set()
    while heap:
        d, x = heapq.heappop(heap)
        if x in done:
            continue
        done.add(x)
        if len(done) > budget:
            raise BudgetExceededError(budget)
        for y, w in model.neighbors(x):
            nd = d + w
            if nd <= r and nd < dist.get(y, nd + 1):
                dist[y] = nd
                heapq.heappush(heap, (nd, y))
    return [(x, dist[x]) for x in done]


def _dijkstra_distance(model: GraphModel, u: Coords, w: Coords, budget: int) -> int:
    start, goal = tuple(u), tuple(w)
    dist: Dict[Coords, int] = {start: 0}
    heap = [(0, start)]
    done = set()
    while heap:
        d, x = heapq.heappop(heap)
        if x == goal:
            return d
        if x in done:
            continue
        done.add(x)
        if len(done) > budget:
            raise BudgetExceededError(budget, what="distance search")
        for y, wt in model.neighbors(x):
            nd = d + wt
            if nd < dist.get(y, nd + 1):
                dist[y] = nd
                heapq.heappush(heap, (nd, y))
    raise GraphFormatError(f"vertex {goal} unreachable from {start}")


class GroupModel(GraphModel):
    """
    Cayley graph with unit weights and right-multiplication edges.

    The identity ball is kept as a BFS table (`_layers[k]` = number of
    elements at distance <= k) that grows on demand.
    """

    is_group = True
    transitive = True

    def __init__(self, declared_dim: Optional[float] = None, declared_C1: Optional[float] = None):
        super().__init__(declared_dim, declared_C1)
        identity = self.origin()
        self._offsets: List[Coords] = [identity]
        self._length: Dict[Coords, int] = {identity: 0}
        self._layers: List[int] = [1]
        self._frontier: List[Coords] = [identity]

    @abstractmethod
    def multiply(self, a: Coords, b: Coords) -> Coords:
        ...

    @abstractmethod
    def inverse(self, a: Coords) -> Coords:
        ...

    @abstractmethod
    def generators(self) -> List[Coords]:
        ...

    def neighbors(self, c: Coords) -> List[Tuple[Coords, int]]:
        return [(self.multiply(c, s), 1) for s in self.generators()]

    @property
    def cached_radius(self) -> int:
        return len(self._layers) - 1

    def _grow(self, r: int, budget: int) -> None:
        while self.cached_radius < r:
            depth = self.cached_radius + 1
            layer: List[Coords] = []
            seen = set()
            for x in self._frontier:
                for y, _ in self.neighbors(x):
                    if y not in self._length and y not in seen:
                        seen.add(y)
                        layer.append(y)
            if len(self._offsets) + len(layer) > budget:
                raise BudgetExceededError(budget)
            for y in layer:
                self._length[y] = depth
            self._offsets.extend(layer)
            self._layers.append(len(self._offsets))
            self._frontier = layer

    def identity_ball(self, r: int, budget: Optional[int] = None) -> List[Coords]:
        """Elements of B(e, r) in BFS order."""
        budget = budget or get_budget()
        self._grow(r, budget)
        if self._layers[r] > budget:
            raise BudgetExceededError(budget)
        return self._offsets[: self._layers[r]]

    def ball_size(self, r: int) -> int:
        self._grow(r, get_budget())
        return self._layers[r]

    def ball_coords(self, c: Coords, r: int, budget: Optional[int] = None) -> List[Tuple[Coords, int]]:
        offsets = self.identity_ball(r, budget)
        c = tuple(c)
        length = self._length
        if c == self.origin():
            return [(x, length[x]) for x in offsets]
        return [(self.multiply(c, x), length[x]) for x in offsets]

    def word_length(self, g: Coords) -> int:
        g = tuple(g)
        budget = get_budget()
        while g not in self._length:
            self._grow(max(1, 2 * self.cached_radius), budget)
        return self._length[g]

    def distance(self, u: Coords, w: Coords) -> int:
        return self.word_length(self.multiply(self.inverse(u), w))


class ZLattice(GroupModel):
    """The integer lattice Z^d with nearest-neighbour edges (L1 metric)."""

    kind = "z"
    tag = 1

    def __init__(self, d: int, declared_dim: Optional[float] = None, declared_C1: Optional[float] = None):
        if d < 1:
            raise ConfigError("lattice dimension must be >= 1")
        self.d = d
        super().__init__(declared_dim, declared_C1)

    def origin(self) -> Coords:
        return (0,) * self.d

    def contains(self, c: Coords) -> bool:
        return len(c) == self.d

    def generators(self) -> List[Coords]:
        gens = []
        for i in range(self.d):
            for step in (1, -1):
                e = [0] * self.d
                e[i] = step
                gens.append(tuple(e))
        return gens

    def multiply(self, a: Coords, b: Coords) -> Coords:
        return tuple(x + y for x, y in zip(a, b))

    def inverse(self, a: Coords) -> Coords:
        return tuple(-x for x in a)

    def neighbors(self, c: Coords) -> List[Tuple[Coords, int]]:
        out = []
        for i in range(self.d):
            for step in (1, -1):
                y = list(c)
                y[i] += step
                out.append((tuple(y), 1))
        return out

    def key_words(self, c: Coords) -> Tuple[int, ...]:
        return tuple(zigzag(x) for x in c)

    def distance(self, u: Coords, w: Coords) -> int:
        return sum(abs(a - b) for a, b in zip(u, w))

    def distances(self, u: Coords, targets: Sequence[Coords]) -> np.ndarray:
        if len(targets) == 0:
            return np.zeros(0, dtype=np.int64)
        arr = np.asarray(targets, dtype=np.int64).reshape(len(targets), self.d)
        return np.abs(arr - np.asarray(u, dtype=np.int64)).sum(axis=1)

    def sphere_size_formula(self, k: int) -> Optional[int]:
        if k == 0:
            return 1
        return sum(2 ** i * math.comb(self.d, i) * math.comb(k - 1, i - 1) for i in range(1, self.d + 1))

    def default_constants(self) -> Optional[Tuple[float, float]]:
        # |B(r)| / r^d is maximal at r = 1, where it equals 2d + 1
        return float(self.d), float(2 * self.d + 1)

    def spec(self) -> str:
        return f"z:{self.d}"


class Heisenberg(GroupModel):
    """
    Discrete Heisenberg group H3(Z) with generators x, y and inverses.

    (a,b,c) is the upper-triangular matrix with entries x=a, y=b, z=c and
    (a,b,c)(a',b',c') = (a+a', b+b', c+c'+a*b').
    """

    kind = "heisenberg"
    tag = 2

    def origin(self) -> Coords:
        return (0, 0, 0)

    def contains(self, c: Coords) -> bool:
        return len(c) == 3

    def generators(self) -> List[Coords]:
        return [(1, 0, 0), (0, 1, 0), (-1, 0, 0), (0, -1, 0)]

    def multiply(self, g: Coords, h: Coords) -> Coords:
        a, b, c = g
        a2, b2, c2 = h
        return (a + a2, b + b2, c + c2 + a * b2)

    def inverse(self, g: Coords) -> Coords:
        a, b, c = g
        return (-a, -b, a * b - c)

    def neighbors(self, g: Coords) -> List[Tuple[Coords, int]]:
        a, b, c = g
        return [((a + 1, b, c), 1), ((a, b + 1, c + a), 1), ((a - 1, b, c), 1), ((a, b - 1, c - a), 1)]

    def key_words(self, g: Coords) -> Tuple[int, ...]:
        return tuple(zigzag(x) for x in g)

    def default_constants(self) -> Optional[Tuple[float, float]]:
        # growth is of degree 4; gamma(r) / r^4 peaks at r = 1 (5 elements)
        return 4.0, 5.0

    def spec(self) -> str:
        return "heisenberg"


class RegularTree(GroupModel):
    """
    The b-regular tree, as the Cayley graph of the free product of b copies
    of Z/2. Vertices are reduced words (no letter repeated consecutively).
    """

    kind = "tree"
    tag = 3

    def __init__(self, b: int, declared_dim: Optional[float] = None, declared_C1: Optional[float] = None):
        if b < 2:
            raise ConfigError("tree degree must be >= 2")
        self.b = b
        self._bits = max(1, (b - 1).bit_length())
        self._per_word = 64 // self._bits
        super().__init__(declared_dim, declared_C1)

    def origin(self) -> Coords:
        return ()

    def contains(self, u: Coords) -> bool:
        return all(0 <= s < self.b for s in u) and all(a != b for a, b in zip(u, u[1:]))

    def generators(self) -> List[Coords]:
        return [(s,) for s in range(self.b)]

    def multiply(self, u: Coords, x: Coords) -> Coords:
        out = list(u)
        for s in x:
            if out and out[-1] == s:
                out.pop()
            else:
                out.append(s)
        return tuple(out)

    def inverse(self, u: Coords) -> Coords:
        return tuple(reversed(u))

    def neighbors(self, u: Coords) -> List[Tuple[Coords, int]]:
        out = []
        for s in range(self.b):
            if u and u[-1] == s:
                out.append((u[:-1], 1))
            else:
                out.append((u + (s,), 1))
        return out

    def key_words(self, u: Coords) -> Tuple[int, ...]:
        words = [len(u)]
        for start in range(0, len(u), self._per_word):
            chunk = 0
            for s in u[start:start + self._per_word]:
                chunk = (chunk << self._bits) | s
            words.append(chunk)
        return tuple(words)

    def distance(self, u: Coords, w: Coords) -> int:
        common = 0
        for a, b in zip(u, w):
            if a != b:
                break
            common += 1
        return len(u) + len(w) - 2 * common

    def ball_size(self, r: int) -> int:
        if r == 0:
            return 1
        return 1 + self.b * sum((self.b - 1) ** k for k in range(r))

    def spec(self) -> str:
        return f"tree:{self.b}"


class LoadedGraph(GraphModel):
    """A finite weighted graph read from an edge-list file; vertices are integers."""

    kind = "file"
    tag = 4

    def __init__(
        self,
        graph: nx.Graph,
        source: str = "<memory>",
        declared_dim: Optional[float] = None,
        declared_C1: Optional[float] = None,
    ):
        super().__init__(declared_dim, declared_C1)
        self.graph = graph
        self.source = source
        self._origin = (min(graph.nodes),)
        self._sssp: Dict[int, Dict[int, int]] = {}

    def origin(self) -> Coords:
        return self._origin

    def contains(self, c: Coords) -> bool:
        return len(c) == 1 and c[0] in self.graph

    def neighbors(self, c: Coords) -> List[Tuple[Coords, int]]:
        return [((y,), int(attrs["weight"])) for y, attrs in self.graph.adj[c[0]].items()]

    def key_words(self, c: Coords) -> Tuple[int, ...]:
        return (int(c[0]),)

    def _lengths_from(self, u: int) -> Dict[int, int]:
        lengths = self._sssp.get(u)
        if lengths is None:
            lengths = nx.single_source_dijkstra_path_length(self.graph, u, weight="weight")
            if len(self._sssp) > 4096:
                self._sssp.clear()
            self._sssp[u] = lengths
        return lengths

    def ball_coords(self, c: Coords, r: int, budget: Optional[int] = None) -> List[Tuple[Coords, int]]:
        budget = budget or get_budget()
        lengths = nx.single_source_dijkstra_path_length(self.graph, c[0], cutoff=r, weight="weight")
        if len(lengths) > budget:
            raise BudgetExceededError(budget)
        return [((x,), int(d)) for x, d in lengths.items()]

    def distance(self, u: Coords, w: Coords) -> int:
        return int(self._lengths_from(u[0])[w[0]])

    def distances(self, u: Coords, targets: Sequence[Coords]) -> np.ndarray:
        lengths = self._lengths_from(u[0])
        return np.array([lengths[t[0]] for t in targets], dtype=np.int64)

    @property
    def n_vertices(self) -> int:
        return self.graph.number_of_nodes()

    def spec(self) -> str:
        return f"file:{self.source}"


def model_from_spec(
    spec: str,
    declared_dim: Optional[float] = None,
    declared_C1: Optional[float] = None,
) -> GraphModel:
    """Parse `z:d`, `heisenberg`, `tree:b` or `file:<path>`."""
    text = spec.strip()
    name, _, arg = text.partition(":")
    name = name.lower()
    try:
        if name == "z":
            return ZLattice(int(arg or 1), declared_dim, declared_C1)
        if name in ("heisenberg", "h3"):
            return Heisenberg(declared_dim, declared_C1)
        if name == "tree":
            return RegularTree(int(arg or 3), declared_dim, declared_C1)
    except ValueError:
        raise ConfigError(f"invalid model spec {spec!r}")
    if name == "file":
        if not arg:
            raise ConfigError("file model needs a path: file:<path>")
        return load_graph(arg, declared_dim, declared_C1)
    raise ConfigError(f"unknown model spec {spec!r} (expected z:d, heisenberg, tree:b, file:path)")


def load_graph(
    path: "str | os.PathLike",
    declared_dim: Optional[float] = None,
    declared_C1: Optional[float] = None,
) -> LoadedGraph:
    """
    Read an edge list: one edge per line `u v [w]`, '#' comments, w >= 1.

    Disconnected input is reduced to the component of the smallest vertex,
    with a warning.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise GraphFormatError(f"cannot read {path}: {e}") from e

    graph = nx.Graph()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise GraphFormatError(f"expected 'u v [w]', got {raw.strip()!r}", line=lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
            w = int(parts[2]) if len(parts) == 3 else 1
        except ValueError:
            raise GraphFormatError(f"non-integer field in {raw.strip()!r}", line=lineno)
        if u < 0 or v < 0:
            raise GraphFormatError("vertices must be non-negative integers", line=lineno)
        if w < 1:
            raise NonPositiveWeightError(f"edge weight must be >= 1, got {w}", line=lineno)
        if u == v:
            raise GraphFormatError(f"self-loop at vertex {u}", line=lineno)
        if graph.has_edge(u, v):
            w = min(w, graph[u][v]["weight"])
        graph.add_edge(u, v, weight=w)

    if graph.number_of_nodes() == 0:
        raise GraphFormatError("graph file has no edges")

    if not nx.is_connected(graph):
        root = min(graph.nodes)
        component = nx.node_connected_component(graph, root)
        logger.warning(
            f"Graph {path} is disconnected; keeping the component of vertex {root} "
            f"({len(component)} of {graph.number_of_nodes()} vertices)"
        )
        graph = graph.subgraph(component).copy()

    logger.info(f"Loaded graph {path}: {graph.number_of_nodes()} vertices, {graph.number_of_edges()} edges")
    return LoadedGraph(graph, source=str(path), declared_dim=declared_dim, declared_C1=declared_C1)


def _sorted_members(model: GraphModel, pairs: Iterable[Tuple[Coords, int]]) -> Tuple[Tuple[Vertex, int], ...]:
    members = [(model.vertex(c), d) for c, d in pairs]
    members.sort(key=lambda m: (m[1], m[0].key))
    return tuple(members)


@lru_cache(maxsize=64)
def _cached_ball(model: GraphModel, c: Coords, r: int, budget: int) -> BallView:
    pairs = model.ball_coords(c, r, budget)
    if len(pairs) > budget:
        raise BudgetExceededError(budget)
    members = _sorted_members(model, pairs)
    sizes = np.zeros(r + 1, dtype=np.int64)
    for _, d in members:
        sizes[d] += 1
    return BallView(center=model.vertex(c), radius=r, members=members, sphere_sizes=sizes)


def _as_coords(model: GraphModel, v: "Vertex | Sequence[int] | None") -> Coords:
    if v is None:
        return model.origin()
    if isinstance(v, Vertex):
        return v.coords
    c = tuple(int(x) for x in v)
    if not model.contains(c):
        raise ConfigError(f"{c} is not a vertex of {model.spec()}")
    return c


def ball(model: GraphModel, v: "Vertex | Sequence[int] | None", r: int, budget: Optional[int] = None) -> BallView:
    """Exact closed ball B(v,r) with sphere sizes."""
    if r < 0:
        raise ConfigError("radius must be >= 0")
    return _cached_ball(model, _as_coords(model, v), int(r), budget or get_budget())


def sphere(model: GraphModel, v: "Vertex | Sequence[int] | None", r: int) -> List[Vertex]:
    return ball(model, v, r).sphere(r)


def growth(model: GraphModel, v: "Vertex | Sequence[int] | None", r: int) -> int:
    """gamma(v,r) = |B(v,r)|."""
    if r < 0:
        raise ConfigError("radius must be >= 0")
    c = _as_coords(model, v)
    if isinstance(model, RegularTree):
        size = model.ball_size(r)
        if size > get_budget():
            raise BudgetExceededError(get_budget())
        return size
    if isinstance(model, GroupModel):
        budget = get_budget()
        model.identity_ball(r, budget)
        return model.ball_size(r)
    return len(ball(model, c, r))


def distance(model: GraphModel, u: "Vertex | Sequence[int]", w: "Vertex | Sequence[int]") -> int:
    return model.distance(_as_coords(model, u), _as_coords(model, w))
