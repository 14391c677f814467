import json
import math
from fractions import Fraction as F

import numpy as np
import pytest
from scipy import stats

from hardybound.distributions import (
    Discrete,
    Exponential,
    Pareto,
    PiecewiseLinearCDF,
    Uniform,
    bernoulli,
    dirac,
    distribution_from_json,
    moment_of_curve,
    random_discrete,
)
from hardybound.errors import ArgumentError, CapabilityError
from hardybound.monotone import INF, Interval


class TestDiscrete:
    def test_masses_are_renormalized_exactly(self):
        d = Discrete.from_unsorted([3, 1, 2], [0.2, 0.3, 0.5])
        assert sum(m for _, m in d.atoms) == 1
        assert [v for v, _ in d.atoms] == [1, 2, 3]

    def test_rejects_bad_atoms(self):
        with pytest.raises(ArgumentError):
            Discrete(((0, F(1, 2)), (0, F(1, 2))))
        with pytest.raises(ArgumentError):
            Discrete(((0, -1), (1, 2)))
        with pytest.raises(ArgumentError):
            Discrete(())

    def test_survival_values(self):
        d = Discrete(((0, F(1, 4)), (2, F(3, 4))))
        assert d.survival.eval(-1) == Interval(1, 1)
        assert d.survival.eval(0) == Interval(F(3, 4), 1)
        assert d.survival.eval(1) == Interval(F(3, 4), F(3, 4))
        assert d.survival.eval(2) == Interval(0, F(3, 4))
        assert d.survival.eval(3) == Interval(0, 0)

    def test_quantiles(self):
        d = Discrete(((0, F(1, 4)), (2, F(3, 4))))
        assert d.tail_quantile.eval(F(1, 2)) == Interval(2, 2)
        assert d.tail_quantile.eval(F(3, 4)) == Interval(0, 2)
        assert d.quantile(1) == 0
        assert d.support == (0, 2)

    def test_moments(self):
        d = Discrete(((1, F(1, 2)), (3, F(1, 2))))
        assert d.expectation() == 2
        assert d.moment(2) == 5
        assert d.moment(1.5) == pytest.approx((1 + 3**1.5) / 2, rel=1e-14)

    def test_moment_needs_nonnegative_support(self):
        with pytest.raises(CapabilityError):
            Discrete(((-1, F(1, 2)), (1, F(1, 2)))).moment(2)

    def test_bernoulli_and_dirac(self):
        b = bernoulli()
        assert b.atoms == ((0, F(1, 2)), (1, F(1, 2)))
        assert bernoulli(1) == dirac(1)
        assert dirac(F(5, 2)).expectation() == F(5, 2)

    def test_sampling_fraction(self):
        x = bernoulli(F(3, 10)).sample(np.random.default_rng(0), 200000)
        # binomial sd is about 0.001
        assert abs(x.mean() - 0.3) < 0.005
        assert set(np.unique(x)) == {0.0, 1.0}

    def test_random_discrete(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            d = random_discrete(rng, max_atoms=20)
            assert 1 <= len(d.atoms) <= 20
            assert sum(m for _, m in d.atoms) == 1
        d = random_discrete(rng, atoms=4, nonnegative=True)
        assert d.support[0] >= 0


class TestContinuous:
    def test_exponential(self):
        e = Exponential(2.0)
        assert e.survival.eval(1.0).lo == pytest.approx(math.exp(-2.0), rel=1e-15)
        assert e.quantile(0.5) == pytest.approx(math.log(2) / 2, rel=1e-15)
        assert e.expectation() == pytest.approx(0.5)
        assert e.moment(2) == pytest.approx(2 / 4, rel=1e-14)
        assert e.support == (0, INF)

    def test_exponential_rejects_rate(self):
        with pytest.raises(ArgumentError):
            Exponential(0)

    def test_pareto(self):
        p = Pareto(2, 1)
        assert p.survival.eval(4).lo == pytest.approx(1 / 16, rel=1e-15)
        assert p.quantile(0.25) == pytest.approx(2.0, rel=1e-15)
        assert p.expectation() == pytest.approx(2.0)
        assert p.moment(1.5) == pytest.approx(4.0, rel=1e-12)
        with pytest.raises(CapabilityError):
            p.moment(2)

    def test_pareto_rejects_heavy_tail(self):
        with pytest.raises(ArgumentError):
            Pareto(1, 1)

    def test_piecewise_linear(self):
        d = PiecewiseLinearCDF(((0, 0), (1, F(1, 2)), (3, 1)))
        assert d.cdf(F(1, 2)) == F(1, 4)
        assert d.cdf(2) == F(3, 4)
        assert d.expectation() == F(1, 4) + F(1, 2) * 2
        assert d.tail_quantile.eval(F(1, 4)) == Interval(2, 2)
        assert d.tail_quantile.eval(F(1, 8)) == Interval(F(5, 2), F(5, 2))

    def test_uniform(self):
        u = Uniform(2, 4)
        assert u.expectation() == 3
        assert u.moment(2) == pytest.approx(28 / 3, rel=1e-12)
        assert u.survival.eval(3) == Interval(F(1, 2), F(1, 2))

    def test_moment_of_curve_matches_closed_form(self):
        assert moment_of_curve(Exponential().survival, 3) == pytest.approx(6.0, rel=1e-10)
        assert moment_of_curve(Pareto(3, 1).survival, 2) == pytest.approx(3.0, rel=1e-10)


@pytest.mark.parametrize(
    "mu, ref",
    [
        (Exponential(1.5), stats.expon(scale=1 / 1.5)),
        (Pareto(2.5, 2.0), stats.pareto(2.5, scale=2.0)),
        (Uniform(-1, 3), stats.uniform(-1, 4)),
    ],
    ids=["exponential", "pareto", "uniform"],
)
def test_sampling_matches_reference_law(mu, ref):
    x = mu.sample(np.random.default_rng(11), 10**6)
    # the 1% critical value at 1e6 draws is about 0.0016
    assert stats.kstest(x, ref.cdf).statistic < 0.002


def test_cdf_array_matches_scalar():
    for mu in (Exponential(), Pareto(2, 1), Uniform(0, 2), bernoulli()):
        xs = np.array([-1.0, 0.0, 0.5, 1.0, 1.5, 3.0])
        want = np.array([float(mu.cdf(v)) for v in xs])
        assert np.allclose(mu.cdf_array(xs), want, rtol=1e-14, atol=0)


class TestJson:
    def test_round_trips(self):
        laws = [
            bernoulli(F(1, 3)),
            Discrete(((F(-1, 2), F(1, 3)), (2, F(2, 3)))),
            Exponential(0.5),
            Pareto(3, 2),
            Uniform(0, 1),
            PiecewiseLinearCDF(((0, 0), (1, F(1, 2)), (3, 1))),
        ]
        for mu in laws:
            back = distribution_from_json(json.loads(json.dumps(mu.to_json())))
            assert back.survival == mu.survival

    def test_names(self):
        assert distribution_from_json("exp").survival == Exponential().survival
        assert distribution_from_json("bernoulli") == bernoulli()
        assert distribution_from_json('{"kind": "dirac", "value": 3}') == dirac(3)

    def test_errors(self):
        with pytest.raises(ArgumentError):
            distribution_from_json("nonsense")
        with pytest.raises(ArgumentError):
            distribution_from_json({"kind": "discrete"})
        with pytest.raises(ArgumentError):
            distribution_from_json({"kind": "weird"})
