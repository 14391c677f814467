"""Survival bounds for sums of dependent variables and related checks."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import quad

from .distributions import Distribution
from .errors import ArgumentError, CapabilityError, PreconditionError
from .hardy import hardy_of
from .monotone import INF, MonotoneCurve, make_incr, pointwise_sum


@dataclass(frozen=True)
class ConvexityCertificate:
    """Outcome of a second-difference convexity scan on a grid."""

    label: str
    convex: bool
    points: int
    worst_excess: float
    witness: Optional[tuple] = None

    def to_json(self):
        return {
            "label": self.label,
            "convex": self.convex,
            "points": self.points,
            "worst_excess": self.worst_excess,
            "witness": None if self.witness is None else list(self.witness),
        }


@dataclass(frozen=True)
class BoundReport:
    bound: MonotoneCurve
    kind: str
    inputs: tuple = ()
    params: dict = field(default_factory=dict)
    certificates: tuple = ()

    def survival_at(self, t):
        return self.bound.eval(t)

    def to_json(self):
        return {
            "kind": self.kind,
            "params": {k: float(v) for k, v in self.params.items()},
            "inputs": [mu.to_json() for mu in self.inputs],
            "bound": self.bound.to_json(),
            "certificates": [c.to_json() for c in self.certificates],
        }


def theorem1_bound(mus: Sequence[Distribution]) -> BoundReport:
    """Survival bound for ``X_1 + ... + X_n`` under any dependence.

    The bound is the inverse of the sum of the running-average quantile
    curves of the marginals.
    """
    mus = tuple(mus)
    if not mus:
        raise ArgumentError("need at least one marginal")
    total = pointwise_sum([hardy_of(mu).curve for mu in mus])
    return BoundReport(total.inverse(), "theorem1", mus)


def iid_bound(mu: Distribution) -> BoundReport:
    """Survival bound for the average of ``n`` variables with law ``mu`` (any ``n``)."""
    return BoundReport(hardy_of(mu).curve.inverse(), "iid", (mu,))


def naive_union_bound(mu: Distribution, n: int) -> BoundReport:
    """``min(1, n * S_mu)``: the union bound for the average of ``n`` copies."""
    if int(n) != n or n < 1:
        raise ArgumentError(f"n must be a positive integer, got {n}")
    curve = mu.survival if n == 1 else mu.survival.scale(int(n), "y").clip_y(hi=1)
    return BoundReport(curve, "naive_union", (mu,), {"n": int(n)})


def power_factor(q) -> float:
    """``(q / (q - 1)) ** q``."""
    if not q > 1:
        raise ArgumentError(f"q must exceed 1, got {q}")
    return (q / (q - 1)) ** q


def default_grid(curve: MonotoneCurve, points=512, decades=6):
    dom = curve.domain
    start = float(dom.lo) if math.isfinite(dom.lo) else 0.0
    half = decades / 2
    grid = start + np.geomspace(10.0**-half, 10.0**half, points)
    if math.isfinite(dom.hi):
        grid = grid[grid < float(dom.hi)]
    return grid


def convexity_scan(xs, ys, label="", tol=1e-9) -> ConvexityCertificate:
    """Check ``y_mid <= chord`` for every consecutive triple of grid points."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if len(xs) < 3:
        return ConvexityCertificate(label, True, len(xs), 0.0)
    x1, x2, x3 = xs[:-2], xs[1:-1], xs[2:]
    g1, g2, g3 = ys[:-2], ys[1:-1], ys[2:]
    lam = (x3 - x2) / (x3 - x1)
    chord = lam * g1 + (1 - lam) * g3
    scale = np.maximum.reduce([np.ones_like(g1), np.abs(g1), np.abs(g2), np.abs(g3)])
    with np.errstate(invalid="ignore"):
        excess = (g2 - chord) / scale
    bad = ~np.isfinite(excess)
    excess = np.where(bad, np.inf, excess)
    worst = int(np.argmax(excess))
    ok = bool(excess[worst] <= tol)
    witness = None
    if not ok:
        witness = (float(x1[worst]), float(x2[worst]), float(x3[worst]))
    return ConvexityCertificate(label, ok, len(xs), float(excess[worst]), witness)


def _positive_values(curve: MonotoneCurve, grid):
    """Curve values on the grid; default grids drop points that underflow.

    Subnormal values are dropped too: their logarithms and powers have lost
    most of their precision and would fail the scan spuriously.
    """
    for x, y in curve.vertices:
        if y <= 0 and math.isfinite(x):
            raise PreconditionError(f"alpha reaches {y} at t={x}; it must stay positive", (x,))
    if grid is None:
        grid = default_grid(curve)
        vals = np.array([float(curve.eval(t).hi) for t in grid])
        keep = vals >= np.finfo(float).tiny
        return grid[keep], vals[keep]
    grid = np.asarray(grid, dtype=float)
    vals = np.array([float(curve.eval(t).hi) for t in grid])
    if np.any(vals <= 0):
        raise PreconditionError("alpha must be positive on the certification grid", None)
    return grid, vals


def corollary_power_bound(alpha: MonotoneCurve, q, grid=None, tol=1e-9) -> BoundReport:
    """``(q/(q-1))**q * alpha`` clipped at 1, once ``alpha ** (-1/q)`` is certified convex."""
    factor = power_factor(q)
    grid, vals = _positive_values(alpha, grid)
    cert = convexity_scan(grid, vals ** (-1.0 / q), f"alpha^(-1/{q}) convex", tol)
    if not cert.convex:
        raise PreconditionError(f"alpha^(-1/q) is not convex near {cert.witness}", cert.witness)
    bound = alpha.scale(factor, "y").clip_y(hi=1)
    return BoundReport(bound, "corollary_power", (), {"q": q, "factor": factor}, (cert,))


def corollary_exp_bound(alpha: MonotoneCurve, grid=None, tol=1e-9) -> BoundReport:
    """``e * alpha`` clipped at 1, once ``-log(alpha)`` is certified convex."""
    grid, vals = _positive_values(alpha, grid)
    cert = convexity_scan(grid, -np.log(vals), "-log(alpha) convex", tol)
    if not cert.convex:
        raise PreconditionError(f"-log(alpha) is not convex near {cert.witness}", cert.witness)
    bound = alpha.scale(math.e, "y").clip_y(hi=1)
    return BoundReport(bound, "corollary_exp", (), {"factor": math.e}, (cert,))


def power_mean_integral(mu: Distribution, q) -> float:
    """``int_0^1 H(T_mu)(p) ** q dp``."""
    total = 0.0
    for seg in hardy_of(mu).segments:
        lo, hi = seg.lo, min(seg.hi, 1)
        if lo >= hi:
            continue
        powered = seg.form.power(q) if hasattr(seg.form, "power") else None
        F = powered.antiderivative() if powered is not None else None
        if F is not None:
            val = float(F.value_at(hi)) - float(F.value_at(lo))
            if not math.isfinite(val):
                raise CapabilityError("power integral diverges")
        else:
            form = seg.form
            val, _ = quad(
                lambda p: max(float(form(p)), 0.0) ** q, float(lo), float(hi), epsabs=0.0, epsrel=1e-12, limit=400
            )
        total += val
    return total


def moment_bound_check(mu: Distribution, q):
    """Return ``(lhs, rhs, jensen_rhs)`` and insist ``lhs <= rhs``.

    ``lhs`` integrates the q-th power of the running-average quantile,
    ``rhs`` is ``(q/(q-1))**q`` times the q-th moment and ``jensen_rhs`` is the
    moment itself.
    """
    if not q > 1:
        raise ArgumentError(f"q must exceed 1, got {q}")
    m = float(mu.moment(q))
    lhs = power_mean_integral(mu, q)
    rhs = power_factor(q) * m
    if lhs > rhs * (1 + 1e-8):
        raise PreconditionError(f"moment bound violated: {lhs} > {rhs}", (lhs, rhs))
    return lhs, rhs, m


def power_geometric_mean(a, b, lam, q) -> float:
    """``(lam * a**(-1/q) + (1-lam) * b**(-1/q)) ** -q`` without cancellation."""
    if not (a > 0 and b > 0):
        raise ArgumentError("a and b must be positive")
    if not 0 <= lam <= 1:
        raise ArgumentError("lambda must lie in [0, 1]")
    if not q > 0:
        raise ArgumentError("q must be positive")
    s = lam * math.expm1(-math.log(a) / q) + (1 - lam) * math.expm1(-math.log(b) / q)
    return math.exp(-q * math.log1p(s))


@dataclass(frozen=True)
class EquivalenceReport:
    power: dict  # q -> (convex certificate, concave certificate)
    exp: tuple  # (convex certificate, concave certificate)
    nondecreasing: bool
    nonincreasing: bool
    forward_holds: bool
    converse_holds: Optional[bool]

    @property
    def holds(self):
        return self.forward_holds and self.converse_holds is not False


def convexity_equivalence_check(
    f: Callable, qs=(0.5, 1.0, 2.0, 4.0, 8.0), grid=None, converse=True, tol=1e-9
) -> EquivalenceReport:
    """Compare convexity of ``f(t**-q)`` for each ``q`` with convexity of ``f(exp(-t))``.

    Both the convex branch (for ``f``) and the concave branch (for ``-f``) are
    scanned.  The forward implication needs no assumption; the converse is
    checked for the branch matching the monotonicity of ``f`` and demands
    that ``f`` be monotone on the sampled arguments.
    """
    grid = np.geomspace(1e-2, 1e2, 512) if grid is None else np.asarray(grid, dtype=float)
    fv = np.vectorize(lambda x: float(f(x)), otypes=[float])
    args = {q: grid ** (-q) for q in qs}
    exp_args = np.exp(-grid)
    power = {}
    for q in qs:
        vals = fv(args[q])
        power[q] = (
            convexity_scan(grid, vals, f"f(t^-{q}) convex", tol),
            convexity_scan(grid, -vals, f"f(t^-{q}) concave", tol),
        )
    ev = fv(exp_args)
    exp_pair = (
        convexity_scan(grid, ev, "f(exp(-t)) convex", tol),
        convexity_scan(grid, -ev, "f(exp(-t)) concave", tol),
    )
    xs = np.unique(np.concatenate([exp_args] + list(args.values())))
    ys = fv(xs)
    nondecr = bool(np.all(np.diff(ys) >= -tol * np.maximum(1, np.abs(ys[1:]))))
    nonincr = bool(np.all(np.diff(ys) <= tol * np.maximum(1, np.abs(ys[1:]))))
    forward = True
    for branch in (0, 1):
        if all(power[q][branch].convex for q in qs) and not exp_pair[branch].convex:
            forward = False
    converse_ok = None
    if converse:
        if not (nondecr or nonincr):
            raise PreconditionError("converse check needs a monotone f", None)
        converse_ok = True
        branches = ([0] if nondecr else []) + ([1] if nonincr else [])
        for branch in branches:
            if exp_pair[branch].convex and not all(power[q][branch].convex for q in qs):
                converse_ok = False
    return EquivalenceReport(power, exp_pair, nondecr, nonincr, forward, converse_ok)


def incr_expectation(mu: Distribution) -> MonotoneCurve:
    """Unit jump at the mean, the trivial lower profile of every bound."""
    return make_incr(mu.expectation())
