from fractions import Fraction

import numpy as np
import pytest
from pytest import approx

from boolperc.export import ESTIMATE_COLUMNS
from boolperc.sim.errors import ConfigError, OracleDomainError, WindowTooSmallError
from boolperc.sim.estimators import (
    EventDescriptor,
    mc_estimate,
    oracle_G_exact,
    oracle_G_patterns,
    wilson_interval,
)
from boolperc.sim.graphs import ZLattice
from boolperc.sim.percolation import event_G
from boolperc.sim.radius_laws import Constant, Geometric
from boolperc.sim.sampler import ProcessSpec


class TestEventDescriptor:
    def test_default_window(self):
        assert EventDescriptor("G", (0,), 2).window == 20
        assert EventDescriptor("Htilde", (0, 0), 1).window == 100
        assert EventDescriptor("G", [0], 1, L=30).window == 30

    def test_unknown_kind(self):
        with pytest.raises(ConfigError):
            EventDescriptor("F", (0,), 1)

    def test_bad_scale(self):
        with pytest.raises(ConfigError):
            EventDescriptor("G", (0,), 0)

    def test_window_too_small(self):
        with pytest.raises(WindowTooSmallError):
            EventDescriptor("G", (0,), 1, L=5)


class TestWilson:
    def test_no_hits(self):
        lo, hi = wilson_interval(0, 10)
        assert lo == 0.0
        assert 0.0 < hi < 0.35

    def test_all_hits(self):
        lo, hi = wilson_interval(10, 10)
        assert hi == 1.0
        assert 0.65 < lo < 1.0

    def test_symmetric_at_half(self):
        lo, hi = wilson_interval(50, 100)
        assert lo == approx(1.0 - hi)
        assert lo < 0.5 < hi

    def test_wider_at_higher_confidence(self):
        lo95, hi95 = wilson_interval(30, 100, 0.95)
        lo999, hi999 = wilson_interval(30, 100, 0.999)
        assert lo999 < lo95 and hi999 > hi95

    def test_invalid(self):
        with pytest.raises(ConfigError):
            wilson_interval(0, 0)
        with pytest.raises(ConfigError):
            wilson_interval(1, 2, confidence=1.0)


class TestMonteCarlo:
    def test_deterministic(self, z1):
        spec = ProcessSpec(p=0.3, law=Constant(1), seed=17)
        event = EventDescriptor("G", (0,), 1)
        a = mc_estimate(z1, spec, event, 200)
        b = mc_estimate(z1, spec, event, 200)
        assert a == b
        assert a.hits == round(a.p_hat * 200)

    def test_parallel_matches_serial(self, z1):
        spec = ProcessSpec(p=0.4, law=Geometric(0.5), seed=3)
        event = EventDescriptor("G", (0,), 1)
        serial = mc_estimate(z1, spec, event, 40, jobs=1)
        parallel = mc_estimate(z1, spec, event, 40, jobs=2)
        assert serial.hits == parallel.hits

    def test_impossible_event(self, z2):
        spec = ProcessSpec(p=0.0, law=Constant(3), seed=1)
        estimate = mc_estimate(z2, spec, EventDescriptor("G", (0, 0), 1), 50)
        assert estimate.p_hat == 0.0
        assert estimate.ci_lo == 0.0

    def test_row(self, z1):
        spec = ProcessSpec(p=0.2, law=Constant(1), seed=5)
        estimate = mc_estimate(z1, spec, EventDescriptor("G", (0,), 1), 20, base_seed=9)
        row = estimate.as_row()
        assert list(row) == ESTIMATE_COLUMNS
        assert row["seed"] == 9
        assert row["law"] == "const:1"
        assert estimate.sigma == approx(np.sqrt(estimate.p_hat * (1 - estimate.p_hat) / 20))

    def test_agrees_with_oracle(self, z1):
        spec = ProcessSpec(p=0.5, law=Constant(1), seed=123)
        estimate = mc_estimate(z1, spec, EventDescriptor("G", (0,), 1), 1000, confidence=0.999)
        assert estimate.ci_lo <= oracle_G_exact(z1, 1, 0.5, Constant(1)) <= estimate.ci_hi

    @pytest.mark.slow
    @pytest.mark.parametrize("p", [0.1, 0.3, 0.5])
    def test_agrees_with_oracle_at_scale(self, z1, p):
        spec = ProcessSpec(p=p, law=Constant(1), seed=2024)
        estimate = mc_estimate(z1, spec, EventDescriptor("G", (0,), 1), 100_000, jobs=-1, confidence=0.999)
        assert estimate.ci_lo <= oracle_G_exact(z1, 1, p, Constant(1)) <= estimate.ci_hi


class TestOracle:
    def test_extremes(self, z1):
        assert oracle_G_exact(z1, 1, 0.0, Constant(1)) == 0.0
        assert oracle_G_exact(z1, 1, 1.0, Constant(1)) == approx(1.0)
        assert oracle_G_exact(z1, 1, 1, Constant(1), exact=True) == 1

    def test_zero_radius_never_connects(self, z1):
        assert oracle_G_exact(z1, 1, 0.9, Constant(0)) == 0.0

    def test_exact_matches_float(self, z1):
        exact = oracle_G_exact(z1, 1, Fraction(3, 10), Constant(2), exact=True)
        assert isinstance(exact, Fraction)
        assert float(exact) == approx(oracle_G_exact(z1, 1, 0.3, Constant(2)), rel=1e-12)

    def test_increasing_in_p(self, z1):
        values = [oracle_G_exact(z1, 1, p, Constant(1)) for p in (0.1, 0.3, 0.5, 0.7)]
        assert values == sorted(values)

    @pytest.mark.parametrize("c", [1, 2])
    def test_patterns_match_event(self, z1, build_config, c):
        hits = oracle_G_patterns(c)
        rng = np.random.default_rng(c)
        for pattern in rng.integers(0, 1 << 21, size=150).tolist():
            marks = {(i - 10,): c for i in range(21) if pattern >> i & 1}
            config = build_config(z1, 10, marks)
            assert bool(hits[pattern]) == event_G(config, (0,), 1)

    @pytest.mark.parametrize(
        "model, r, law",
        [(ZLattice(2), 1, Constant(1)), (ZLattice(1), 2, Constant(1)), (ZLattice(1), 1, Geometric(0.5)), (ZLattice(1), 1, Constant(4))],
    )
    def test_domain(self, model, r, law):
        with pytest.raises(OracleDomainError):
            oracle_G_exact(model, r, 0.3, law)
