import math

import numpy as np
import pytest

from boolperc.sim.errors import BudgetExceededError, ConfigError, GraphFormatError, NonPositiveWeightError
from boolperc.sim.graphs import (
    Heisenberg,
    LoadedGraph,
    RegularTree,
    ZLattice,
    ball,
    distance,
    growth,
    load_graph,
    model_from_spec,
    sphere,
    zigzag,
)


class TestBall:
    def test_z1_ball_members_and_spheres(self, z1):
        view = ball(z1, (0,), 3)
        assert sorted(c[0] for c in view.coords) == list(range(-3, 4))
        assert len(view) == 7
        assert view.sphere_sizes.tolist() == [1, 2, 2, 2]

    def test_z2_ball_size(self, z2):
        assert len(ball(z2, (0, 0), 2)) == 13

    def test_heisenberg_ball_size(self, heisenberg):
        assert len(ball(heisenberg, None, 2)) == 17

    def test_members_sorted_by_distance_then_key(self, z2):
        view = ball(z2, (1, -1), 3)
        pairs = [(d, v.key) for v, d in view.members]
        assert pairs == sorted(pairs)
        assert view.members[0][0].coords == (1, -1)

    def test_radius_zero(self, heisenberg):
        view = ball(heisenberg, (2, -1, 5), 0)
        assert view.coords == [(2, -1, 5)]

    def test_translated_ball_matches_distances(self, heisenberg):
        v = (1, 2, -3)
        view = ball(heisenberg, v, 3)
        for c, d in zip(view.coords, view.distances.tolist()):
            assert heisenberg.distance(v, c) == d

    def test_negative_radius_rejected(self, z1):
        with pytest.raises(ConfigError):
            ball(z1, None, -1)

    def test_vertex_of_wrong_shape_rejected(self, z2):
        with pytest.raises(ConfigError):
            ball(z2, (0,), 1)

    def test_budget_exceeded(self, monkeypatch):
        monkeypatch.setenv("PERC_BUDGET", "100")
        with pytest.raises(BudgetExceededError):
            ball(ZLattice(3), None, 10)

    def test_invalid_budget_env(self, monkeypatch, z1):
        monkeypatch.setenv("PERC_BUDGET", "lots")
        with pytest.raises(ConfigError):
            ball(z1, None, 2)

    def test_sphere(self, z2):
        assert len(sphere(z2, None, 3)) == 12


class TestGrowth:
    def test_z1(self, z1):
        assert growth(z1, None, 10) == 21

    def test_heisenberg_radius_one(self, heisenberg):
        assert growth(heisenberg, None, 1) == 5

    def test_tree_closed_form(self, tree3):
        # 1 + 3 (1 + 2 + 4)
        assert growth(tree3, None, 3) == 22
        assert growth(tree3, None, 3) == len(ball(tree3, None, 3))

    def test_sphere_formula_matches_bfs(self):
        for d in (1, 2, 3):
            model = ZLattice(d)
            sizes = ball(model, None, 6).sphere_sizes.tolist()
            assert sizes == [model.sphere_size_formula(k) for k in range(7)]

    def test_heisenberg_growth_is_quartic(self, heisenberg):
        sizes = [growth(heisenberg, None, r) for r in (4, 8, 16)]
        slope = np.polyfit(np.log([4, 8, 16]), np.log(sizes), 1)[0]
        assert slope == pytest.approx(4.0, abs=1.0)


def _bfs_size(model, v, r):
    """|B(v,r)| by breadth-first search over neighbors."""
    seen, frontier = {v}, [v]
    for _ in range(r):
        layer = []
        for u in frontier:
            for w, _ in model.neighbors(u):
                if w not in seen:
                    seen.add(w)
                    layer.append(w)
        frontier = layer
    return len(seen)


class TestStructure:
    @pytest.mark.parametrize("spec", ["z:2", "heisenberg", "tree:3"])
    def test_balls_nest(self, spec):
        model = model_from_spec(spec)
        previous = set(ball(model, None, 0).coords)
        for r in range(1, 6):
            current = set(ball(model, None, r).coords)
            assert previous <= current
            previous = current

    @pytest.mark.parametrize("spec", ["z:3", "heisenberg", "tree:3"])
    def test_neighbors_are_symmetric(self, spec):
        model = model_from_spec(spec)
        for u in ball(model, None, 3).coords:
            for w, weight in model.neighbors(u):
                assert (u, weight) in model.neighbors(w)

    def test_loaded_neighbors_are_symmetric(self, edge_file):
        model = load_graph(edge_file("0 1 2\n1 2\n2 3 3\n3 0\n"))
        for u in ball(model, None, 10).coords:
            for w, weight in model.neighbors(u):
                assert (u, weight) in model.neighbors(w)

    @pytest.mark.parametrize("spec", ["z:1", "z:3", "heisenberg"])
    def test_growth_is_vertex_independent(self, spec):
        model = model_from_spec(spec)
        dim = len(model.origin())
        rng = np.random.default_rng(17)
        for _ in range(5):
            v = tuple(int(x) for x in rng.integers(-40, 40, size=dim))
            for r in (1, 2, 4):
                assert _bfs_size(model, v, r) == growth(model, None, r)
                assert len(ball(model, v, r)) == growth(model, None, r)


class TestDistance:
    def test_z_lattice_is_l1(self, z2):
        assert distance(z2, (0, 0), (3, -4)) == 7

    def test_heisenberg_inverse_and_law(self, heisenberg):
        g = (2, -1, 3)
        assert heisenberg.multiply(g, heisenberg.inverse(g)) == (0, 0, 0)
        assert heisenberg.multiply(heisenberg.inverse(g), g) == (0, 0, 0)

    def test_heisenberg_commutator_is_four(self, heisenberg):
        # x y x^-1 y^-1 = z
        assert heisenberg.distance((0, 0, 0), (0, 0, 1)) == 4

    def test_heisenberg_left_invariance(self, heisenberg):
        g, u, w = (1, 1, 0), (0, 2, 1), (-1, 0, 2)
        assert heisenberg.distance(heisenberg.multiply(g, u), heisenberg.multiply(g, w)) == heisenberg.distance(u, w)

    def test_tree_distance(self, tree3):
        assert tree3.distance((0, 1), (0, 2, 1)) == 3
        assert tree3.distance((), (1, 0, 1)) == 3

    def test_tree_rejects_unreduced_word(self, tree3):
        with pytest.raises(ConfigError):
            ball(tree3, (1, 1), 1)


class TestKeys:
    def test_zigzag(self):
        assert [zigzag(n) for n in (0, -1, 1, -2, 2)] == [0, 1, 2, 3, 4]

    def test_keys_distinct_across_models(self, z1, tree3):
        assert z1.vertex((0,)).key != tree3.vertex(()).key

    def test_key_equality_ignores_nothing_but_key(self, z2):
        assert z2.vertex((1, 2)) == z2.vertex((1, 2))
        assert z2.vertex((1, 2)) != z2.vertex((2, 1))


class TestLoadGraph:
    def test_path(self, edge_file):
        model = load_graph(edge_file("0 1 1\n1 2 1\n"))
        assert isinstance(model, LoadedGraph)
        assert model.distance((0,), (2,)) == 2

    def test_cycle(self, edge_file):
        text = "".join(f"{i} {(i + 1) % 6}\n" for i in range(6))
        model = load_graph(edge_file(text))
        for v in range(6):
            assert model.distance((v,), ((v + 3) % 6,)) == 3

    def test_weights_and_comments(self, edge_file):
        model = load_graph(edge_file("# triangle\n0 1 5\n1 2 1  # light\n0 2 1\n"))
        assert model.distance((0,), (1,)) == 2
        assert len(ball(model, (0,), 1)) == 2
        assert len(ball(model, (0,), 2)) == 3

    def test_zero_weight(self, edge_file):
        with pytest.raises(NonPositiveWeightError) as err:
            load_graph(edge_file("0 1 1\n1 2 0\n"))
        assert err.value.line == 2

    def test_malformed_line(self, edge_file):
        with pytest.raises(GraphFormatError, match="line 1"):
            load_graph(edge_file("0 1 x\n"))

    def test_self_loop(self, edge_file):
        with pytest.raises(GraphFormatError):
            load_graph(edge_file("3 3\n"))

    def test_empty_file(self, edge_file):
        with pytest.raises(GraphFormatError):
            load_graph(edge_file("# nothing\n"))

    def test_disconnected_keeps_origin_component(self, edge_file, caplog):
        model = load_graph(edge_file("0 1\n1 2\n7 8\n"))
        assert model.n_vertices == 3
        assert "disconnected" in caplog.text

    def test_duplicate_edge_keeps_lighter(self, edge_file):
        model = load_graph(edge_file("0 1 4\n1 0 2\n"))
        assert model.distance((0,), (1,)) == 2

    def test_missing_file(self, tmp_path):
        with pytest.raises(GraphFormatError, match="cannot read"):
            load_graph(tmp_path / "nope.txt")

    def test_not_utf8(self, tmp_path):
        path = tmp_path / "g.txt"
        path.write_bytes(b"\xff\xfe\x00bad")
        with pytest.raises(GraphFormatError, match="cannot read"):
            load_graph(path)


class TestModelFromSpec:
    @pytest.mark.parametrize(
        "spec, cls",
        [("z:2", ZLattice), ("heisenberg", Heisenberg), ("tree:4", RegularTree)],
    )
    def test_builtins(self, spec, cls):
        model = model_from_spec(spec)
        assert isinstance(model, cls)
        assert model.spec() == spec

    def test_file(self, edge_file):
        path = edge_file("0 1\n")
        assert isinstance(model_from_spec(f"file:{path}"), LoadedGraph)

    @pytest.mark.parametrize("spec", ["q:1", "z:x", "z:0", "tree:1", "file:"])
    def test_invalid(self, spec):
        with pytest.raises(ConfigError):
            model_from_spec(spec)

    def test_declared_constants(self):
        model = model_from_spec("z:2", declared_dim=2, declared_C1=7)
        assert (model.declared_dim, model.declared_C1) == (2, 7)

    def test_builtin_constants(self):
        assert ZLattice(2).default_constants() == (2.0, 5.0)
        assert Heisenberg().default_constants() == (4.0, 5.0)
        assert RegularTree(3).default_constants() is None
        assert math.isclose(ZLattice(1).default_constants()[1], 3.0)
