"""
Deterministic sampling of the Bernoulli marked point process.

Marks are a counter-based hash of (seed, vertex key, lane): lane 0 gives the
occupation uniform, lane 1 the radius uniform. A vertex gets the same marks
in every window that contains it.
"""
import logging
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from boolperc.sim.errors import ConfigError, OutOfWindowError
from boolperc.sim.graphs import BallView, Coords, GraphModel, Vertex, ball
from boolperc.sim.radius_laws import RadiusLaw

logger = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB

_U_GOLDEN = np.uint64(GOLDEN)
_U_M1 = np.uint64(_M1)
_U_M2 = np.uint64(_M2)
_S30, _S27, _S31, _S11 = np.uint64(30), np.uint64(27), np.uint64(31), np.uint64(11)

LANE_OCCUPIED = 0
LANE_RADIUS = 1


def fmix64(z: int) -> int:
    """SplitMix64 finalizer on a Python int."""
    z &= MASK64
    z ^= z >> 30
    z = (z * _M1) & MASK64
    z ^= z >> 27
    z = (z * _M2) & MASK64
    z ^= z >> 31
    return z


def _fmix_array(z: np.ndarray) -> np.ndarray:
    z = z ^ (z >> _S30)
    z = z * _U_M1
    z = z ^ (z >> _S27)
    z = z * _U_M2
    return z ^ (z >> _S31)


def replica_seed(base_seed: int, k: int) -> int:
    """Seed of replica k; distinct replicas get independent streams."""
    return fmix64((base_seed & MASK64) ^ fmix64(((k + 1) * GOLDEN) & MASK64))


@dataclass(frozen=True)
class ProcessSpec:
    """Occupation probability, radius law and 64-bit seed."""
    p: float
    law: RadiusLaw
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ConfigError(f"p must lie in [0, 1], got {self.p}")
        object.__setattr__(self, "seed", int(self.seed) & MASK64)

    def with_seed(self, seed: int) -> "ProcessSpec":
        return ProcessSpec(p=self.p, law=self.law, seed=seed)

    def with_p(self, p: float) -> "ProcessSpec":
        return ProcessSpec(p=p, law=self.law, seed=self.seed)


@dataclass(frozen=True)
class _KeyGroup:
    rows: np.ndarray
    tags: np.ndarray
    words: np.ndarray


def _key_groups(keys: Sequence[bytes]) -> List[_KeyGroup]:
    by_len: Dict[int, List[int]] = {}
    for i, key in enumerate(keys):
        by_len.setdefault(len(key), []).append(i)
    groups = []
    for length, rows in sorted(by_len.items()):
        n_words = (length - 1) // 8
        blob = b"".join(keys[i] for i in rows)
        raw = np.frombuffer(blob, dtype=np.uint8).reshape(len(rows), length)
        tags = raw[:, 0].astype(np.uint64)
        if n_words:
            words = raw[:, 1:].copy().view(">u8").astype(np.uint64).reshape(len(rows), n_words)
        else:
            words = np.zeros((len(rows), 0), dtype=np.uint64)
        groups.append(_KeyGroup(rows=np.asarray(rows, dtype=np.int64), tags=tags, words=words))
    return groups


@lru_cache(maxsize=64)
def _window_groups(window: BallView) -> List[_KeyGroup]:
    return _key_groups([vertex.key for vertex, _ in window.members])


def _uniforms(groups: List[_KeyGroup], n: int, seed: int, lanes: Tuple[int, ...]) -> np.ndarray:
    out = np.empty((n, len(lanes)), dtype=np.float64)
    for group in groups:
        m = group.words.shape[1]
        h = np.full(len(group.rows), seed & MASK64, dtype=np.uint64)
        h = _fmix_array(h ^ ((group.tags << np.uint64(56)) | np.uint64(m)))
        for j in range(m):
            h = _fmix_array((h ^ group.words[:, j]) + _U_GOLDEN)
        for col, lane in enumerate(lanes):
            bump = np.uint64(((lane + 1) * GOLDEN) & MASK64)
            z = _fmix_array(h + bump)
            out[group.rows, col] = (z >> _S11).astype(np.float64) * 2.0 ** -53
    return out


def uniforms_for(vertices: Sequence[Vertex], seed: int, lanes: Tuple[int, ...] = (LANE_OCCUPIED, LANE_RADIUS)) -> np.ndarray:
    """Hash uniforms in [0,1) for each vertex and lane, shape (n, len(lanes))."""
    groups = _key_groups([v.key for v in vertices])
    return _uniforms(groups, len(vertices), seed, lanes)


def _marks_from_uniforms(u: np.ndarray, spec: ProcessSpec) -> Tuple[np.ndarray, np.ndarray]:
    occupied = u[:, 0] < spec.p
    radius = spec.law.quantiles(u[:, 1])
    return occupied, radius


def marks_at(spec: ProcessSpec, v: Vertex) -> Tuple[bool, int]:
    """(occupied, radius) of a single vertex."""
    occupied, radius = _marks_from_uniforms(uniforms_for([v], spec.seed), spec)
    return bool(occupied[0]), int(radius[0])


class Configuration:
    """
    A sampled window: occupation bits and radii for every member of B(o, L).

    Arrays are aligned with `window.members`.
    """

    def __init__(self, model: GraphModel, spec: ProcessSpec, window: BallView, occupied: np.ndarray, radius: np.ndarray):
        self.model = model
        self.spec = spec
        self.window = window
        self.occupied = occupied
        self.radius = radius

    @property
    def center(self) -> Vertex:
        return self.window.center

    @property
    def L(self) -> int:
        return self.window.radius

    def __len__(self) -> int:
        return len(self.window)

    @cached_property
    def r_max(self) -> int:
        """Largest sampled radius in the window."""
        return int(self.radius.max()) if len(self.radius) else 0

    @cached_property
    def occupied_indices(self) -> np.ndarray:
        return np.flatnonzero(self.occupied)

    def index_of(self, v: "Vertex | Coords") -> int:
        coords = v.coords if isinstance(v, Vertex) else tuple(v)
        i = self.window.index.get(coords)
        if i is None:
            raise OutOfWindowError(f"{coords} is outside the window B({self.center.coords}, {self.L})")
        return i

    def marks(self, v: "Vertex | Coords") -> Tuple[bool, int]:
        i = self.index_of(v)
        return bool(self.occupied[i]), int(self.radius[i])

    def mark_map(self) -> Dict[Vertex, Tuple[bool, int]]:
        return {
            vertex: (bool(self.occupied[i]), int(self.radius[i]))
            for i, (vertex, _) in enumerate(self.window.members)
        }

    def occupied_set(self) -> set:
        coords = self.window.coords
        return {coords[i] for i in self.occupied_indices}

    def restricted(self, p: float) -> "Configuration":
        """Same seed at a lower or higher p (the monotone coupling)."""
        return sample_window(self.model, self.center, self.L, self.spec.with_p(p))


def sample_window(model: GraphModel, o: "Vertex | Coords | None", L: int, spec: ProcessSpec) -> Configuration:
    """Apply marks_at to every member of B(o, L)."""
    window = ball(model, o, L)
    u = _uniforms(_window_groups(window), len(window), spec.seed, (LANE_OCCUPIED, LANE_RADIUS))
    occupied, radius = _marks_from_uniforms(u, spec)
    return Configuration(model, spec, window, occupied, radius)


def resample_outside(config: Configuration, v: "Vertex | Coords", radius: int, seed: int) -> Configuration:
    """Keep marks inside B(v, radius); draw every other window mark from `seed`."""
    coords = v.coords if isinstance(v, Vertex) else tuple(v)
    window = config.window
    dist = config.model.distances(coords, window.coords)
    outside = dist > radius
    other = sample_window(config.model, window.center, window.radius, config.spec.with_seed(seed))
    occupied = np.where(outside, other.occupied, config.occupied)
    radii = np.where(outside, other.radius, config.radius)
    return Configuration(config.model, config.spec, window, occupied, radii)


def occupation_fraction(config: Configuration, inner: Optional[int] = None) -> float:
    mask = np.ones(len(config), dtype=bool) if inner is None else config.window.distances <= inner
    return float(config.occupied[mask].mean()) if mask.any() else 0.0
