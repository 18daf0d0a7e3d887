from fractions import Fraction

import pytest
from pytest import approx

from boolperc.sim.errors import ConfigError, DegenerateFitError
from boolperc.sim.geometry import (
    PROFILE_COLUMNS,
    assouad_fit,
    covering_profile,
    covers,
    doubling_constant,
    growth_exponent,
    growth_table,
    is_separated,
    metric_violations,
    sample_centers,
    separated_net,
)
from boolperc.sim.graphs import ball, growth, load_graph

HALVES = [Fraction(1, 2)]


class TestSeparatedNet:
    def test_greedy_order_on_z1(self, z1):
        net = separated_net(z1, ball(z1, None, 4).coords, 2)
        assert [v.coords[0] for v in net] == [0, -2, 2, -4, 4]

    def test_separated_and_covering(self, z2, heisenberg):
        for model in (z2, heisenberg):
            base = ball(model, None, 4).coords
            net = separated_net(model, base, 3)
            assert is_separated(model, net, 3)
            assert covers(model, base, net, 2)

    def test_sep_one_keeps_everything(self, z2):
        base = ball(z2, None, 2).coords
        assert len(separated_net(z2, base, 1)) == 13

    def test_invalid_sep(self, z1):
        with pytest.raises(ConfigError):
            separated_net(z1, [(0,)], 0)


class TestCoveringProfile:
    def test_z1_halves_are_constant(self, z1):
        profile = covering_profile(z1, None, [8, 16, 32], HALVES)
        assert list(profile.columns) == PROFILE_COLUMNS
        assert profile["n_hat"].tolist() == [5, 5, 5]
        assert profile["sep"].tolist() == [4, 8, 16]
        assert doubling_constant(profile)[0] == 5

    def test_z1_fit(self, z1):
        profile = covering_profile(z1, None, [8, 16, 32], [Fraction(1, 2), Fraction(1, 4)])
        fit = assouad_fit(profile)
        assert 0.5 < fit.beta_hat < 1.5
        assert fit.C1_hat > 0

    def test_tree_profile_grows_with_r(self, tree3):
        profile = covering_profile(tree3, None, [4, 8], HALVES)
        small, large = profile["n_hat"].tolist()
        assert large > small

    @pytest.mark.slow
    def test_heisenberg_exponent(self, heisenberg):
        eps = [Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)]
        fit = assouad_fit(covering_profile(heisenberg, None, [16], eps))
        assert fit.beta_hat == approx(4.0, abs=1.0)

    @pytest.mark.slow
    def test_heisenberg_halves_stay_bounded(self, heisenberg):
        profile = covering_profile(heisenberg, None, [4, 8, 16], HALVES)
        sizes = profile["n_hat"].tolist()
        for r, sep, n_hat in zip(profile["r"], profile["sep"], sizes):
            s = (sep - 1) // 2
            # disjoint balls of radius s around net points fit in B(r + s)
            assert n_hat * growth(heisenberg, None, s) <= growth(heisenberg, None, r + s)
        assert sizes[2] <= 8 * sizes[1]

    def test_single_eps_is_degenerate(self, z1):
        with pytest.raises(DegenerateFitError):
            assouad_fit(covering_profile(z1, None, [8, 16], HALVES))

    def test_eps_out_of_range(self, z1):
        with pytest.raises(ConfigError):
            covering_profile(z1, None, [8], [Fraction(3, 2)])

    def test_zero_separation(self, z1):
        with pytest.raises(ConfigError):
            covering_profile(z1, None, [0], HALVES)

    def test_loaded_graph_samples_centres(self, edge_file):
        text = "".join(f"{i} {(i + 1) % 20}\n" for i in range(20))
        model = load_graph(edge_file(text))
        profile = covering_profile(model, None, [4], HALVES, samples=3, seed=1)
        assert profile["center"].nunique() == 3
        assert len(sample_centers(model, None, 3, 1)) == 3
        assert sample_centers(model, (5,), 3, 1) == [(5,)]


class TestGrowth:
    def test_table_z2(self, z2):
        table = growth_table(z2, None, [1, 2])
        first = table.iloc[0]
        assert (first["ball"], first["sphere"]) == (5, 4)
        assert first["doubling_ratio"] == approx(13 / 5)

    def test_exponent_z2(self, z2):
        fit = growth_exponent(growth_table(z2, None, [4, 8, 16]))
        assert fit.d_hat == approx(2.0, abs=0.2)
        assert fit.C_hat >= 1.0

    def test_exponent_needs_two_radii(self, z2):
        with pytest.raises(DegenerateFitError):
            growth_exponent(growth_table(z2, None, [0, 4]))


def test_heisenberg_metric_is_consistent(heisenberg):
    assert metric_violations(heisenberg, None, 4, samples=50) == 0
