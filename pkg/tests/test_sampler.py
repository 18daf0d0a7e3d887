import numpy as np
import pytest

from boolperc.sim.errors import ConfigError, OutOfWindowError
from boolperc.sim.graphs import ZLattice, ball
from boolperc.sim.radius_laws import Constant, Geometric, Zeta
from boolperc.sim.sampler import (
    ProcessSpec,
    fmix64,
    marks_at,
    occupation_fraction,
    replica_seed,
    resample_outside,
    sample_window,
)


class TestDeterminism:
    def test_same_seed_same_marks(self, z2):
        spec = ProcessSpec(p=0.4, law=Geometric(0.5), seed=11)
        a = sample_window(z2, None, 6, spec)
        b = sample_window(z2, None, 6, spec)
        assert np.array_equal(a.occupied, b.occupied)
        assert np.array_equal(a.radius, b.radius)

    def test_window_agrees_with_pointwise_marks(self, heisenberg):
        spec = ProcessSpec(p=0.3, law=Zeta(1.5), seed=5)
        config = sample_window(heisenberg, None, 3, spec)
        for i, (vertex, _) in enumerate(config.window.members):
            assert marks_at(spec, vertex) == (bool(config.occupied[i]), int(config.radius[i]))

    def test_overlapping_windows_agree(self, z1):
        spec = ProcessSpec(p=0.5, law=Geometric(0.7), seed=3)
        small = sample_window(z1, (10,), 5, spec)
        large = sample_window(z1, None, 30, spec)
        for c in small.window.coords:
            assert small.marks(c) == large.marks(c)

    def test_seeds_differ(self, z1):
        a = sample_window(z1, None, 200, ProcessSpec(p=0.5, law=Constant(0), seed=1))
        b = sample_window(z1, None, 200, ProcessSpec(p=0.5, law=Constant(0), seed=2))
        assert not np.array_equal(a.occupied, b.occupied)

    def test_replica_seeds_distinct(self):
        seeds = {replica_seed(42, k) for k in range(1000)}
        assert len(seeds) == 1000
        assert replica_seed(42, 0) != replica_seed(43, 0)

    def test_fmix64_range(self):
        for z in (0, 1, 2 ** 64 - 1, 12345):
            assert 0 <= fmix64(z) < 2 ** 64


class TestDistribution:
    def test_occupation_is_uniform(self, z1):
        config = sample_window(z1, None, 4999, ProcessSpec(p=0.5, law=Constant(0), seed=2024))
        assert len(config) == 9999
        assert abs(int(config.occupied.sum()) - 5000) < 200

    def test_adjacent_occupations_uncorrelated(self, z1):
        spec = ProcessSpec(p=0.5, law=Constant(0), seed=31)
        x = np.array([marks_at(spec, z1.vertex((k,)))[0] for k in range(-4999, 5000)], dtype=float)
        n = len(x) - 1
        corr = np.corrcoef(x[:-1], x[1:])[0, 1]
        assert abs(corr) < 3 / np.sqrt(n)

    def test_extreme_p(self, z2):
        none = sample_window(z2, None, 5, ProcessSpec(p=0.0, law=Constant(1), seed=0))
        full = sample_window(z2, None, 5, ProcessSpec(p=1.0, law=Constant(1), seed=0))
        assert not none.occupied.any()
        assert full.occupied.all()

    def test_constant_radii(self, z2):
        config = sample_window(z2, None, 4, ProcessSpec(p=0.5, law=Constant(3), seed=9))
        assert np.all(config.radius == 3)
        assert config.r_max == 3

    def test_occupation_fraction(self, z1):
        config = sample_window(z1, None, 10, ProcessSpec(p=1.0, law=Constant(0), seed=0))
        assert occupation_fraction(config) == 1.0
        assert occupation_fraction(config, inner=2) == 1.0


class TestCoupling:
    @pytest.mark.parametrize("p_low, p_high", [(0.1, 0.3), (0.3, 0.7)])
    def test_occupied_sets_nest(self, z2, p_low, p_high):
        low = sample_window(z2, None, 8, ProcessSpec(p=p_low, law=Geometric(0.5), seed=77))
        high = low.restricted(p_high)
        assert np.all(high.occupied[low.occupied])
        assert np.array_equal(low.radius, high.radius)

    def test_resample_outside_keeps_inner_marks(self, z1):
        config = sample_window(z1, None, 40, ProcessSpec(p=0.5, law=Geometric(0.5), seed=1))
        other = resample_outside(config, (0,), 10, seed=99)
        inner = config.window.distances <= 10
        assert np.array_equal(other.occupied[inner], config.occupied[inner])
        assert np.array_equal(other.radius[inner], config.radius[inner])
        assert not np.array_equal(other.occupied[~inner], config.occupied[~inner])


class TestValidation:
    @pytest.mark.parametrize("p", [-0.1, 1.5])
    def test_p_out_of_range(self, p):
        with pytest.raises(ConfigError):
            ProcessSpec(p=p, law=Constant(1))

    def test_seed_reduced_to_64_bits(self):
        assert ProcessSpec(p=0.5, law=Constant(1), seed=2 ** 64 + 5).seed == 5

    def test_query_outside_window(self):
        config = sample_window(ZLattice(1), None, 3, ProcessSpec(p=0.5, law=Constant(1), seed=0))
        with pytest.raises(OutOfWindowError):
            config.marks((4,))

    def test_window_is_the_ball(self, z2):
        config = sample_window(z2, (1, 1), 3, ProcessSpec(p=0.5, law=Constant(1), seed=0))
        assert config.window is ball(z2, (1, 1), 3)
        assert config.L == 3
