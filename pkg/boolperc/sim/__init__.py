"""Simulation engine for Boolean discrete percolation."""
from boolperc.sim.graphs import GraphModel, Heisenberg, LoadedGraph, RegularTree, Vertex, ZLattice, ball, growth, load_graph, model_from_spec
from boolperc.sim.radius_laws import Constant, Geometric, RadiusLaw, Zeta, law_from_spec
from boolperc.sim.sampler import Configuration, ProcessSpec, marks_at, sample_window

__all__ = [
    "GraphModel",
    "Heisenberg",
    "LoadedGraph",
    "RegularTree",
    "Vertex",
    "ZLattice",
    "ball",
    "growth",
    "load_graph",
    "model_from_spec",
    "Constant",
    "Geometric",
    "RadiusLaw",
    "Zeta",
    "law_from_spec",
    "Configuration",
    "ProcessSpec",
    "marks_at",
    "sample_window",
]
