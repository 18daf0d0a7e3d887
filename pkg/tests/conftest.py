"""Shared fixtures; the run store is an in-memory SQLite database."""
import os

os.environ.setdefault("PERC_DB_URL", "sqlite://")

from typing import Dict, Optional, Sequence  # noqa: E402

import numpy as np  # noqa: E402
import pytest  # noqa: E402

from boolperc.sim.graphs import GraphModel, Heisenberg, RegularTree, ZLattice, ball  # noqa: E402
from boolperc.sim.radius_laws import Constant  # noqa: E402
from boolperc.sim.sampler import Configuration, ProcessSpec  # noqa: E402


@pytest.fixture
def z1() -> ZLattice:
    return ZLattice(1)


@pytest.fixture
def z2() -> ZLattice:
    return ZLattice(2)


@pytest.fixture
def heisenberg() -> Heisenberg:
    return Heisenberg()


@pytest.fixture
def tree3() -> RegularTree:
    return RegularTree(3)


@pytest.fixture
def build_config():
    """Configuration with hand-placed marks: {coords: radius} for occupied vertices."""

    def _build(
        model: GraphModel,
        L: int,
        marks: Dict[Sequence[int], int],
        center: Optional[Sequence[int]] = None,
    ) -> Configuration:
        window = ball(model, center, L)
        occupied = np.zeros(len(window), dtype=bool)
        radius = np.zeros(len(window), dtype=np.int64)
        for c, R in marks.items():
            i = window.index[tuple(c)]
            occupied[i] = True
            radius[i] = R
        return Configuration(model, ProcessSpec(p=0.5, law=Constant(0), seed=0), window, occupied, radius)

    return _build


@pytest.fixture
def edge_file(tmp_path):
    """Write an edge list and return its path."""

    def _write(text: str, name: str = "graph.txt"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return _write
