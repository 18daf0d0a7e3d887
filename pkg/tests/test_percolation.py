import numpy as np
import pytest

from boolperc.sim.errors import ConfigError, WindowTooSmallError
from boolperc.sim.percolation import (
    cluster,
    edge,
    event_D_exceeds,
    event_G,
    event_H_window,
    event_Htilde,
    event_ball_covered,
    event_indicator,
    required_window,
    window_components,
)
from boolperc.sim.radius_laws import Geometric
from boolperc.sim.sampler import ProcessSpec, resample_outside, sample_window


def _coords(result):
    return sorted(v.coords[0] for v in result.members)


class TestCluster:
    def test_single_ball(self, z1, build_config):
        config = build_config(z1, 10, {(2,): 3})
        result = cluster(config, (0,))
        assert _coords(result) == list(range(-1, 6))
        assert result.D == 5
        assert result.size == 7
        assert not result.censored

    def test_uncovered_vertex_is_alone(self, z1, build_config):
        config = build_config(z1, 10, {(2,): 3})
        result = cluster(config, (8,))
        assert _coords(result) == [8]
        assert result.D == 0

    def test_censored_near_boundary(self, z1, build_config):
        config = build_config(z1, 10, {(9,): 3})
        result = cluster(config, (9,))
        assert _coords(result) == [6, 7, 8, 9, 10]
        assert result.censored

    def test_overlapping_balls_chain(self, z2, build_config):
        config = build_config(z2, 8, {(0, 0): 2, (3, 0): 1, (5, 0): 1})
        result = cluster(config, (0, 0))
        assert (6, 0) in {v.coords for v in result.members}
        assert result.D == 6

    def test_components_of_window(self, z1, build_config):
        config = build_config(z1, 10, {(2,): 3})
        components = window_components(config)
        sizes = sorted(len(c) for c in components)
        assert len(components) == 15
        assert sizes[-1] == 7
        assert sum(sizes) == 21

    def test_empty_configuration(self, z2, build_config):
        config = build_config(z2, 3, {})
        assert all(len(c) == 1 for c in window_components(config))


class TestEdge:
    def test_edges(self, z1, build_config):
        config = build_config(z1, 10, {(2,): 3})
        assert edge(config, (2,), (5,))
        assert edge(config, (-1,), (2,))
        assert not edge(config, (2,), (6,))
        assert not edge(config, (4,), (5,))

    def test_same_endpoint(self, z1, build_config):
        config = build_config(z1, 4, {})
        with pytest.raises(ConfigError):
            edge(config, (1,), (1,))


class TestEventG:
    def test_chain_escapes(self, z1, build_config):
        config = build_config(z1, 12, {(k,): 1 for k in range(9)})
        assert event_G(config, (0,), 1)

    def test_short_chain_does_not_escape(self, z1, build_config):
        config = build_config(z1, 12, {(k,): 1 for k in range(7)})
        assert not event_G(config, (0,), 1)

    def test_large_ball_outside_region_is_ignored(self, z1, build_config):
        # the centre at 11 lies outside B(0, 10)
        config = build_config(z1, 30, {(11,): 20})
        assert not event_G(config, (0,), 1)

    def test_window_too_small(self, z1, build_config):
        config = build_config(z1, 5, {})
        with pytest.raises(WindowTooSmallError):
            event_G(config, (0,), 1)

    def test_scale_must_be_positive(self, z1, build_config):
        config = build_config(z1, 10, {})
        with pytest.raises(ConfigError):
            event_G(config, (0,), 0)


class TestEventHtilde:
    def test_large_radius_inside(self, z1, build_config):
        config = build_config(z1, 200, {(150,): 5})
        assert event_Htilde(config, (0,), 2)

    def test_large_radius_too_far(self, z1, build_config):
        config = build_config(z1, 300, {(250,): 5})
        assert not event_Htilde(config, (0,), 2)

    def test_small_radius(self, z1, build_config):
        config = build_config(z1, 200, {(150,): 1})
        assert not event_Htilde(config, (0,), 2)


class TestEventHWindow:
    def test_reaching_ball(self, z1, build_config):
        assert event_H_window(build_config(z1, 30, {(20,): 3}), (0,), 1)

    def test_short_ball(self, z1, build_config):
        assert not event_H_window(build_config(z1, 30, {(20,): 2}), (0,), 1)

    def test_near_centres_do_not_count(self, z1, build_config):
        assert not event_H_window(build_config(z1, 30, {(5,): 100}), (0,), 1)

    def test_window_too_small(self, z1, build_config):
        with pytest.raises(WindowTooSmallError):
            event_H_window(build_config(z1, 10, {}), (0,), 1)


class TestOtherEvents:
    def test_ball_covered(self, z1, build_config):
        config = build_config(z1, 10, {(3,): 5})
        assert event_ball_covered(config, (0,), 1)
        assert not event_ball_covered(config, (0,), 2)

    def test_D_exceeds(self, z1, build_config):
        config = build_config(z1, 30, {(k,): 1 for k in range(0, 12, 2)})
        assert event_D_exceeds(config, (0,), 1)
        assert not event_D_exceeds(config, (0,), 2)

    def test_indicator_dispatch(self, z1, build_config):
        config = build_config(z1, 12, {(k,): 1 for k in range(9)})
        assert event_indicator("G", config, (0,), 1)
        with pytest.raises(ConfigError):
            event_indicator("nope", config, (0,), 1)

    def test_required_window(self):
        assert required_window("G", 2) == 20
        assert required_window("Htilde", 1) == 100
        assert required_window("H_window", 1) == 11
        with pytest.raises(ConfigError):
            required_window("nope", 1)


class TestLocality:
    def test_G_ignores_marks_beyond_ten_r(self, z2):
        law = Geometric(0.5)
        for seed in range(60):
            config = sample_window(z2, None, 20, ProcessSpec(p=0.3, law=law, seed=seed))
            other = resample_outside(config, (0, 0), 10, seed=seed + 1000)
            assert event_G(other, (0, 0), 1) == event_G(config, (0, 0), 1)

    def test_Htilde_ignores_marks_beyond_hundred_r(self, z1):
        law = Geometric(0.5)
        for seed in range(60):
            config = sample_window(z1, None, 150, ProcessSpec(p=0.002, law=law, seed=seed))
            other = resample_outside(config, (0,), 100, seed=seed + 1000)
            assert event_Htilde(other, (0,), 1) == event_Htilde(config, (0,), 1)


class TestMonotoneCoupling:
    def test_events_increase_with_p(self, z1):
        law = Geometric(0.5)
        for seed in range(100):
            base = sample_window(z1, None, 120, ProcessSpec(p=0.1, law=law, seed=seed))
            configs = [base] + [base.restricted(p) for p in (0.3, 0.7)]
            for low, high in zip(configs, configs[1:]):
                assert np.all(high.occupied[low.occupied])
                assert event_G(low, (0,), 1) <= event_G(high, (0,), 1)
                assert event_Htilde(low, (0,), 1) <= event_Htilde(high, (0,), 1)
                assert event_H_window(low, (0,), 1) <= event_H_window(high, (0,), 1)
                assert cluster(low, (0,)).members <= cluster(high, (0,)).members

    def test_cluster_grows_with_p_on_z2(self, z2):
        law = Geometric(0.4)
        sizes = []
        for p in (0.05, 0.2, 0.5, 0.9):
            config = sample_window(z2, None, 10, ProcessSpec(p=p, law=law, seed=8))
            sizes.append(cluster(config, (0, 0)).size)
        assert sizes == sorted(sizes)
        assert np.all(np.diff(sizes) >= 0)
