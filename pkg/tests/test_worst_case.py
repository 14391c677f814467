import math
from fractions import Fraction as F

import numpy as np
import pytest
from scipy.integrate import quad

from hardybound.distributions import Discrete, Exponential, Pareto, bernoulli, random_discrete
from hardybound.errors import ArgumentError
from hardybound.hardy import jump_points
from hardybound.monotone import INF
from hardybound.worst_case import (
    build_slot_system,
    cyclic_permutation,
    family_averages,
    marginal_check,
    mean_variance_ladder,
    sample_coupling,
    sample_marginal,
    simulate_profile,
    slot_means,
    slot_of,
    slot_quantile,
    slot_quantile_from_survival,
)


def rational_law(rng, atoms):
    values = sorted(set(int(v) for v in rng.integers(-10, 11, size=atoms)))
    masses = [F(int(m)) for m in rng.integers(1, 10, size=len(values))]
    total = sum(masses)
    return Discrete(tuple((F(v), m / total) for v, m in zip(values, masses)))


class TestConstruction:
    def test_bernoulli(self):
        s = build_slot_system(bernoulli(), F(1, 2), 2)
        assert s.p_levels == (F(1, 2), F(1, 4), 0)
        assert s.p_prime_levels == (F(1, 2), F(3, 4), 1)
        assert s.u == (0, 1, 1)
        assert s.u_prime == (0, 0, 0)

    def test_exponential(self):
        s = build_slot_system(Exponential(), F(1, 2), 2)
        assert float(s.u[0]) == pytest.approx(math.log(2), rel=1e-15)
        assert float(s.u[1]) == pytest.approx(math.log(4), rel=1e-15)
        assert s.u[2] == INF
        assert float(s.u_prime[1]) == pytest.approx(-math.log(0.75), rel=1e-14)
        assert s.u_prime[2] == 0

    def test_levels_and_chain(self):
        rng = np.random.default_rng(41)
        for _ in range(30):
            mu = random_discrete(rng, max_atoms=8)
            n = int(rng.integers(1, 8))
            p = F(int(rng.integers(1, 20)), 20)
            s = build_slot_system(mu, p, n)
            assert s.p_levels[0] == s.p_prime_levels[0] == p
            assert s.p_levels[-1] == 0 and s.p_prime_levels[-1] == 1
            assert s.check_chain() and s.check_partition()

    def test_arguments(self):
        for p in (0, 1, 1.2):
            with pytest.raises(ArgumentError):
                build_slot_system(bernoulli(), p, 3)
        with pytest.raises(ArgumentError):
            build_slot_system(bernoulli(), F(1, 2), 0)
        with pytest.raises(ArgumentError):
            build_slot_system(bernoulli(), F(1, 2), 2.5)
        s = build_slot_system(bernoulli(), F(1, 2), 3)
        with pytest.raises(ArgumentError):
            s.slot_bounds(0)
        with pytest.raises(ArgumentError):
            slot_quantile(s, 1, 1)


class TestSlotQuantiles:
    def test_identity_on_rational_systems(self):
        rng = np.random.default_rng(42)
        for _ in range(20):
            mu = rational_law(rng, int(rng.integers(1, 7)))
            n = int(rng.integers(1, 6))
            p = F(int(rng.integers(1, 12)), 12)
            s = build_slot_system(mu, p, n)
            for i in range(1, n + 1):
                for primed in (False, True):
                    for lvl in (F(1, 7), F(1, 2), F(5, 6)):
                        assert slot_quantile(s, i, lvl, primed) == slot_quantile_from_survival(s, i, lvl, primed)

    def test_values_stay_in_slot(self):
        s = build_slot_system(Exponential(), F(3, 10), 5)
        for i in range(1, 6):
            for primed in (False, True):
                lo, hi = s.slot_bounds(i, primed)
                iv = slot_quantile(s, i, F(1, 3), primed)
                assert lo <= iv.lo <= iv.hi <= hi


class TestIndexing:
    def test_cyclic_permutation(self):
        n = 5
        for k in range(1, n + 1):
            image = sorted(cyclic_permutation(n, k, i) for i in range(1, n + 1))
            assert image == list(range(1, n + 1))
        assert cyclic_permutation(5, 1, 3) == 3
        assert cyclic_permutation(5, 3, 4) == 1

    def test_each_cell_covers_all_slots(self):
        n = 6
        for cell in range(n):
            assert sorted(slot_of(cell, k, n) for k in range(1, n + 1)) == list(range(1, n + 1))
        for k in range(1, n + 1):
            assert sorted(slot_of(c, k, n) for c in range(n)) == list(range(1, n + 1))


class TestCoupling:
    def test_sample_structure(self):
        s = build_slot_system(Exponential(), 0.4, 6)
        rng = np.random.default_rng(43)
        for _ in range(200):
            c = sample_coupling(s, rng)
            assert c.X.mean() == pytest.approx(c.Y, rel=1e-12)
            for i in range(1, 7):
                lo, hi = s.slot_bounds(i)
                assert lo <= c.W[i - 1] <= hi
                lo, hi = s.slot_bounds(i, primed=True)
                assert lo <= c.W_prime[i - 1] <= hi

    def test_exact_means(self):
        # independent route: closed-form integral of -log over the slot levels
        p, n = 0.3, 4
        s = build_slot_system(Exponential(), p, n)
        anti = lambda x: x - x * math.log(x) if x > 0 else 0.0
        top = sum((n / p) * (anti(float(s.p_levels[i - 1])) - anti(float(s.p_levels[i]))) for i in range(1, n + 1)) / n
        bottom = sum(
            (n / (1 - p)) * (anti(float(s.p_prime_levels[i])) - anti(float(s.p_prime_levels[i - 1])))
            for i in range(1, n + 1)
        ) / n
        m = slot_means(s)
        assert float(m.mean_W) == pytest.approx(top, rel=1e-12)
        assert float(m.mean_W_prime) == pytest.approx(bottom, rel=1e-12)

    def test_exact_means_pareto_quadrature(self):
        p, n = 0.5, 3
        s = build_slot_system(Pareto(3, 1), p, n)
        T = lambda v: v ** (-1 / 3)
        top = sum(quad(T, float(s.p_levels[i]), float(s.p_levels[i - 1]))[0] for i in range(1, n + 1)) / p
        m = slot_means(s)
        assert float(m.mean_W) == pytest.approx(top, rel=1e-9)

    def test_monte_carlo_means(self):
        s = build_slot_system(Exponential(), 0.5, 10)
        m = slot_means(s, reps=20000, seed=3)
        assert abs(m.mc_W - float(m.mean_W)) <= 4 * m.se_W
        assert abs(m.mc_W_prime - float(m.mean_W_prime)) <= 4 * m.se_W_prime

    def test_mixed_family_splits_at_p(self):
        s = build_slot_system(bernoulli(), F(1, 2), 5)
        y = family_averages(s, 2, 20000, seed=1)
        # Bernoulli: the upper family averages to 1, the lower to 0
        assert set(np.unique(y)) <= {0.0, 1.0}
        assert abs(y.mean() - 0.5) < 4 * 0.5 / math.sqrt(20000)


class TestMarginals:
    def test_discrete(self):
        s = build_slot_system(Discrete(((0, F(1, 5)), (1, F(3, 10)), (4, F(1, 2)))), F(2, 5), 4)
        for k in range(1, 5):
            assert marginal_check(s, k, 20000, seed=k) < 0.015

    def test_continuous(self):
        s = build_slot_system(Exponential(), 0.7, 3)
        for k in range(1, 4):
            assert marginal_check(s, k, 20000, seed=k) < 0.015

    def test_needs_enough_reps(self):
        with pytest.raises(ArgumentError):
            marginal_check(build_slot_system(bernoulli(), F(1, 2), 2), 1, 10)

    def test_sample_marginal_range(self):
        s = build_slot_system(bernoulli(), F(1, 2), 3)
        with pytest.raises(ArgumentError):
            sample_marginal(s, 4, 100)


class TestConcentration:
    def test_variance_shrinks_like_one_over_n(self):
        v = mean_variance_ladder(Exponential(), 0.5, [4, 16, 64], 4000, seed=2)
        assert v[0] > v[1] > v[2]
        assert v[2] * 64 < 4 * v[0] * 4

    def test_simulate_profile(self):
        mu = Exponential()
        a, b = (float(x) for x in jump_points(mu, 0.5))
        res = simulate_profile(mu, 0.5, [50, 500], 4000, [0.0, 1.0, 3.0, b], seed=5)
        by = {(r.n, r.t): r for r in res.rows}
        assert by[(500, 0.0)].empirical_survival == 1.0
        assert by[(500, 3.0)].empirical_survival == 0.0
        assert abs(by[(500, 1.0)].empirical_survival - 0.5) < 0.05
        assert by[(500, b)].flag == "near_jump"
        assert by[(500, 1.0)].flag == "ok"
        assert by[(500, 1.0)].limit_value == 0.5

    def test_p_one_uses_iid_average(self):
        res = simulate_profile(bernoulli(), 1, 400, 2000, [0.4, 0.6], seed=1)
        r = {row.t: row.empirical_survival for row in res.rows}
        assert r[0.4] > 0.99 and r[0.6] < 0.01

    def test_worker_count_does_not_change_results(self):
        s = build_slot_system(Pareto(2, 1), 0.3, 20)
        a = family_averages(s, 2, 3000, seed=9, workers=1)
        b = family_averages(s, 2, 3000, seed=9, workers=4)
        assert np.array_equal(a, b)
        c = family_averages(s, 2, 3000, seed=10, workers=1)
        assert not np.array_equal(a, c)
