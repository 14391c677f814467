"""Fast invariant suite behind ``hardybound selfcheck``.

Each check returns ``(passed, detail)``; sizes are small enough to finish in
a few seconds on one core.
"""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .bounds import (
    convexity_equivalence_check,
    corollary_exp_bound,
    iid_bound,
    moment_bound_check,
    power_factor,
    power_geometric_mean,
    theorem1_bound,
)
from .distributions import Exponential, Pareto, bernoulli, dirac, random_discrete
from .hardy import delta, hardy_of, hardy_transform
from .monotone import curve_leq, make_exp, make_id_pow
from .oracle import max_tail_two_sweep
from .worst_case import build_slot_system, marginal_check, slot_means, slot_quantile, slot_quantile_from_survival


def check_hardy_closed_forms():
    rng = np.random.default_rng(1)
    worst = 0.0
    for q in (1.5, 2.0, 4.0):
        h = hardy_transform(make_id_pow(1 / q))
        for p in rng.uniform(1e-3, 1, 50):
            want = q / (q - 1) * p ** (-1 / q)
            worst = max(worst, abs(float(h.value(p)) - want) / want)
    h = hardy_of(Exponential())
    for p in rng.uniform(1e-3, 1, 50):
        want = 1 - math.log(p)
        worst = max(worst, abs(h.value(p) - want) / want)
    return worst <= 1e-10, f"max rel err {worst:.2e}"


def check_order_properties():
    rng = np.random.default_rng(2)
    for _ in range(20):
        a = random_discrete(rng, max_atoms=6)
        T, H = a.tail_quantile, hardy_of(a).curve
        if not curve_leq(T, H, tol=1e-9):
            return False, f"f <= H(f) fails for {a}"
        b = random_discrete(rng, max_atoms=6)
        f, g = a.survival, b.survival
        if curve_leq(f, g) != curve_leq(f.inverse(), g.inverse()):
            return False, "inversion does not preserve order"
    return True, "20 random laws"


def check_sandwich():
    rng = np.random.default_rng(3)
    for _ in range(30):
        mu = random_discrete(rng, max_atoms=8)
        p = Fraction(int(rng.integers(1, 99)), 100)
        h, e, d = hardy_of(mu).value(p), mu.expectation(), delta(mu, p)
        if d < 0 or not (h - d <= e <= h):
            return False, f"sandwich fails for {mu} at {p}"
    if delta(dirac(3), 0.4) != 0:
        return False, "nonzero gap for a point mass"
    return True, "30 random (mu, p)"


def check_slot_identity():
    rng = np.random.default_rng(4)
    for _ in range(5):
        mu = random_discrete(rng, max_atoms=6)
        p = Fraction(int(rng.integers(1, 10)), 10)
        n = int(rng.integers(1, 6))
        sys = build_slot_system(mu, p, n)
        for i in range(1, n + 1):
            for primed in (False, True):
                s = Fraction(int(rng.integers(1, 100)), 100)
                if slot_quantile(sys, i, s, primed) != slot_quantile_from_survival(sys, i, s, primed):
                    return False, f"slot {i} mismatch"
    return True, "5 random systems"


def check_slot_means():
    sys = build_slot_system(Exponential(), 0.5, 10)
    m = slot_means(sys, reps=20000, seed=7)
    z1 = abs(m.mc_W - m.mean_W) / m.se_W
    z2 = abs(m.mc_W_prime - m.mean_W_prime) / m.se_W_prime
    return max(z1, z2) <= 4, f"z-scores {z1:.2f}, {z2:.2f}"


def check_marginals():
    d = marginal_check(build_slot_system(bernoulli(), Fraction(1, 2), 5), 3, 20000, seed=5)
    k = marginal_check(build_slot_system(Exponential(), 0.3, 5), 2, 20000, seed=5)
    return d < 0.015 and k < 0.015, f"TV {d:.4f}, KS {k:.4f}"


def check_oracle_dominance():
    rng = np.random.default_rng(6)
    worst = math.inf
    for _ in range(3):
        a, b = random_discrete(rng, atoms=3), random_discrete(rng, atoms=3)
        ts = np.linspace(-10, 10, 11)
        vals, _ = max_tail_two_sweep(a, b, ts)
        bound = theorem1_bound([a, b]).bound
        worst = min(worst, min(float(bound.eval(t).hi) - float(v) for t, v in zip(ts, vals)))
    return worst >= -1e-9, f"min slack {worst:.2e}"


def check_moments():
    rng = np.random.default_rng(8)
    for _ in range(10):
        mu = random_discrete(rng, max_atoms=8, nonnegative=True)
        for q in (1.5, 2.0, 4.0):
            lhs, rhs, m = moment_bound_check(mu, q)
            if not (m * (1 - 1e-8) <= lhs <= rhs * (1 + 1e-8)):
                return False, f"ordering fails for {mu}, q={q}"
    lhs, rhs, _ = moment_bound_check(Pareto(2, 1), 1.5)
    return abs(lhs - 8 * math.sqrt(2)) < 1e-8, f"pareto lhs {lhs:.10f}"


def check_constants():
    ok = abs(power_factor(1000) / math.e - 1) < 2e-3
    b = corollary_exp_bound(make_exp()).bound
    ok = ok and abs(float(b.eval(2).hi) - math.exp(-1)) < 1e-12
    rng = np.random.default_rng(9)
    worst = 0.0
    for _ in range(20):
        a, c, lam = rng.uniform(0.1, 10), rng.uniform(0.1, 10), rng.uniform()
        worst = max(worst, abs(power_geometric_mean(a, c, lam, 1e4) - a**lam * c ** (1 - lam)))
    return ok and worst <= 1e-3, f"power-geometric gap {worst:.2e}"


def check_convexity_equivalence():
    fs = {"x": lambda x: x, "-x": lambda x: -x, "x^2": lambda x: x * x, "log": math.log}
    bad = [name for name, f in fs.items() if not convexity_equivalence_check(f).holds]
    return not bad, "all hold" if not bad else f"fails for {bad}"


def check_iid_example():
    v = float(iid_bound(Exponential()).bound.eval(2).hi)
    return abs(v - math.exp(-1)) < 1e-12, f"bound at 2 = {v:.12f}"


CHECKS = [
    ("hardy_closed_forms", check_hardy_closed_forms),
    ("order_properties", check_order_properties),
    ("gap_sandwich", check_sandwich),
    ("slot_quantile_identity", check_slot_identity),
    ("slot_means", check_slot_means),
    ("marginals", check_marginals),
    ("oracle_dominance", check_oracle_dominance),
    ("moment_bounds", check_moments),
    ("constants", check_constants),
    ("convexity_equivalence", check_convexity_equivalence),
    ("iid_bound_example", check_iid_example),
]


def run_selfcheck():
    results = []
    for name, fn in CHECKS:
        try:
            ok, detail = fn()
        except Exception as exc:  # a crash is a failed check, reported not raised
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append((name, bool(ok), detail))
    return results
