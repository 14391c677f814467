"""Probability measures on the real line and their monotone curves.

Discrete and piecewise-linear laws are stored with :class:`~fractions.Fraction`
coordinates, so their survival and quantile curves are exact.  The parametric
families carry analytic forms on their curved pieces.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.integrate import quad
from scipy.special import gamma

from .errors import ArgumentError, CapabilityError, DomainError
from .forms import Term, Terms
from .monotone import INF, MonotoneCurve, Piece

KIND_TABLE = 0
KIND_EXP = 1
KIND_PARETO = 2


def as_number(v):
    """Coerce user input to an exact number where that is lossless."""
    if isinstance(v, (int, Fraction)):
        return Fraction(v)
    if isinstance(v, float):
        if not math.isfinite(v):
            raise ArgumentError(f"expected a finite number, got {v}")
        return Fraction(v)
    if isinstance(v, str):
        try:
            return Fraction(v)
        except ValueError:
            raise ArgumentError(f"cannot parse number {v!r}") from None
    if isinstance(v, np.generic):
        return as_number(v.item())
    raise ArgumentError(f"cannot interpret {v!r} as a number")


@dataclass(frozen=True)
class KernelSpec:
    """Flat description of a quantile map consumed by the sampling kernels."""

    kind: int
    levels: np.ndarray
    values: np.ndarray
    a: float = 0.0
    b: float = 0.0


class Distribution:
    """Base class; subclasses define the survival curve and closed forms."""

    kind = "abstract"

    @cached_property
    def survival(self) -> MonotoneCurve:
        return self._survival()

    @cached_property
    def tail_quantile(self) -> MonotoneCurve:
        return self.survival.inverse()

    def survival_curve(self) -> MonotoneCurve:
        return self.survival

    def tail_quantile_curve(self) -> MonotoneCurve:
        return self.tail_quantile

    @property
    def support(self):
        """Closed hull of the support as ``(lo, hi)``."""
        dom = self.tail_quantile.domain
        lo = self.tail_quantile.pieces[-1].y0 if dom.hi == 1 else -INF
        hi = self.tail_quantile.pieces[0].y1 if dom.lo == 0 else INF
        return lo, hi

    def quantile(self, level):
        """Lower endpoint of the tail quantile at ``level``.

        At level 1 the lower endpoint is always ``-inf``; the bottom of the
        support is returned instead so the result stays a sample value.
        """
        if not 0 <= level <= 1:
            raise ArgumentError(f"level must lie in [0, 1], got {level}")
        if level == 1:
            return self.support[0]
        return self.tail_quantile.eval(level).lo

    def cdf(self, t):
        return 1 - self.survival.eval(t).lo

    def cdf_array(self, x):
        """Vectorized ``P(X <= x)``."""
        return np.array([float(self.cdf(v)) for v in np.asarray(x, dtype=float)])

    def expectation(self):
        raise NotImplementedError

    def moment(self, q):
        raise NotImplementedError

    def _check_moment(self, q):
        if not q > 0:
            raise ArgumentError(f"moment order must be positive, got {q}")
        if self.support[0] < 0:
            raise CapabilityError("moments need a nonnegative support")

    def sample(self, rng, size=None):
        """Inverse-transform draws through :meth:`kernel_spec`."""
        from .kernels import quantile_many

        u = 1.0 - rng.random(size if size is not None else 1)
        x = quantile_many(self.kernel_spec(), u)
        return x if size is not None else float(x[0])

    def kernel_spec(self) -> KernelSpec:
        pts = [(x, y) for x, y in self.tail_quantile.vertices if math.isfinite(x) and math.isfinite(y)]
        levels = np.array([float(x) for x, _ in pts])
        values = np.array([float(y) for _, y in pts])
        return KernelSpec(KIND_TABLE, levels, values)

    def to_json(self):
        raise NotImplementedError

    def __repr__(self):
        return json.dumps(self.to_json())


@dataclass(frozen=True, eq=True, repr=False)
class Discrete(Distribution):
    """Finitely many atoms ``(value, mass)`` with strictly increasing values."""

    atoms: tuple
    kind = "discrete"

    def __post_init__(self):
        atoms = tuple((as_number(v), as_number(m)) for v, m in self.atoms)
        if not atoms:
            raise ArgumentError("a discrete law needs at least one atom")
        if any(m <= 0 for _, m in atoms):
            raise ArgumentError("atom masses must be positive")
        if any(a[0] >= b[0] for a, b in zip(atoms, atoms[1:])):
            raise ArgumentError("atom values must be strictly increasing")
        total = sum(m for _, m in atoms)
        if abs(total - 1) > Fraction(1, 10**12):
            raise ArgumentError(f"atom masses sum to {float(total)}, not 1")
        # renormalize so survival levels are exact and end at 0
        atoms = tuple((v, m / total) for v, m in atoms)
        object.__setattr__(self, "atoms", atoms)

    @classmethod
    def from_unsorted(cls, values: Sequence, masses: Sequence):
        acc = {}
        for v, m in zip(values, masses):
            v = as_number(v)
            acc[v] = acc.get(v, 0) + as_number(m)
        total = sum(acc.values())
        return cls(tuple((v, acc[v] / total) for v in sorted(acc)))

    def __hash__(self):
        return hash(self.atoms)

    def _survival(self):
        pieces, level = [], Fraction(1)
        prev_x = -INF
        for v, m in self.atoms:
            pieces.append(Piece(prev_x, level, v, level))
            pieces.append(Piece(v, level, v, level - m))
            level -= m
            prev_x = v
        pieces.append(Piece(prev_x, level, INF, level))
        return MonotoneCurve(tuple(pieces))

    def expectation(self):
        return sum(v * m for v, m in self.atoms)

    def moment(self, q):
        self._check_moment(q)
        if isinstance(q, int) or (isinstance(q, Fraction) and q.denominator == 1):
            return sum(v ** int(q) * m for v, m in self.atoms)
        return sum(float(v) ** q * float(m) for v, m in self.atoms)

    def to_json(self):
        return {"kind": "discrete", "atoms": [[_enc(v), _enc(m)] for v, m in self.atoms]}


@dataclass(frozen=True, repr=False)
class PiecewiseLinearCDF(Distribution):
    """CDF interpolating knots ``(t, F(t))`` with ``F`` from 0 to 1."""

    knots: tuple
    kind = "piecewise_linear_cdf"

    def __post_init__(self):
        knots = tuple((as_number(t), as_number(f)) for t, f in self.knots)
        if len(knots) < 2:
            raise ArgumentError("need at least two knots")
        if knots[0][1] != 0 or knots[-1][1] != 1:
            raise ArgumentError("CDF knots must start at 0 and end at 1")
        for (t0, f0), (t1, f1) in zip(knots, knots[1:]):
            if t1 < t0 or f1 < f0:
                raise ArgumentError("CDF knots must be nondecreasing")
        object.__setattr__(self, "knots", knots)

    def _survival(self):
        ks = self.knots
        pieces = [Piece(-INF, 1, ks[0][0], 1)]
        for (t0, f0), (t1, f1) in zip(ks, ks[1:]):
            pieces.append(Piece(t0, 1 - f0, t1, 1 - f1))
        pieces.append(Piece(ks[-1][0], 0, INF, 0))
        return MonotoneCurve(tuple(pieces))

    def expectation(self):
        return sum((f1 - f0) * (t0 + t1) / 2 for (t0, f0), (t1, f1) in zip(self.knots, self.knots[1:]))

    def moment(self, q):
        self._check_moment(q)
        total = 0.0
        for (t0, f0), (t1, f1) in zip(self.knots, self.knots[1:]):
            if f1 == f0:
                continue
            if t1 == t0:
                total += float(f1 - f0) * float(t0) ** q
            else:
                dens = float(f1 - f0) / float(t1 - t0)
                total += dens * (float(t1) ** (q + 1) - float(t0) ** (q + 1)) / (q + 1)
        return total

    def cdf_array(self, x):
        ts = np.array([float(t) for t, _ in self.knots])
        fs = np.array([float(f) for _, f in self.knots])
        x = np.asarray(x, dtype=float)
        # right-continuous at repeated knots
        idx = np.searchsorted(ts, x, side="right")
        out = np.interp(x, ts, fs)
        out = np.where(idx >= len(ts), 1.0, out)
        jump = (idx > 0) & (idx < len(ts))
        at_knot = jump & (ts[np.maximum(idx - 1, 0)] == x)
        return np.where(at_knot, fs[np.maximum(idx - 1, 0)], out)

    def to_json(self):
        return {"kind": "piecewise_linear_cdf", "knots": [[_enc(t), _enc(f)] for t, f in self.knots]}


class Uniform(PiecewiseLinearCDF):
    kind = "uniform"

    def __init__(self, a, b):
        a, b = as_number(a), as_number(b)
        if not a < b:
            raise ArgumentError("uniform law needs a < b")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        super().__init__(((a, 0), (b, 1)))

    def expectation(self):
        return (self.a + self.b) / 2

    def to_json(self):
        return {"kind": "uniform", "a": _enc(self.a), "b": _enc(self.b)}


@dataclass(frozen=True, repr=False)
class Exponential(Distribution):
    rate: float = 1.0
    kind = "exponential"

    def __post_init__(self):
        if not self.rate > 0:
            raise ArgumentError("exponential rate must be positive")
        object.__setattr__(self, "rate", float(self.rate))

    def _survival(self):
        form = Terms.of(Term(1.0, 0, 0, -self.rate))
        return MonotoneCurve((Piece(-INF, 1, 0, 1), Piece(0, 1, INF, 0, form)))

    @property
    def support(self):
        return 0, INF

    def quantile(self, level):
        if not 0 < level <= 1:
            if level == 0:
                raise DomainError("the exponential quantile is empty at level 0")
            raise ArgumentError(f"level must lie in (0, 1], got {level}")
        return -math.log(level) / self.rate if level < 1 else 0.0

    def expectation(self):
        return 1.0 / self.rate

    def moment(self, q):
        self._check_moment(q)
        return float(gamma(q + 1)) / self.rate**q

    def cdf_array(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x > 0, -np.expm1(-self.rate * np.maximum(x, 0)), 0.0)

    def kernel_spec(self):
        return KernelSpec(KIND_EXP, np.empty(0), np.empty(0), a=self.rate)

    def to_json(self):
        return {"kind": "exponential", "rate": self.rate}


@dataclass(frozen=True, repr=False)
class Pareto(Distribution):
    """Survival ``min(1, (t / scale) ** -exponent)`` with ``exponent > 1``."""

    exponent: float = 2.0
    scale: float = 1.0
    kind = "pareto"

    def __post_init__(self):
        if not self.exponent > 1:
            raise ArgumentError("pareto exponent must exceed 1 for a finite mean")
        if not self.scale > 0:
            raise ArgumentError("pareto scale must be positive")
        q = self.exponent
        object.__setattr__(self, "exponent", int(q) if float(q).is_integer() else float(q))
        object.__setattr__(self, "scale", float(self.scale))

    def _survival(self):
        q, s = self.exponent, self.scale
        form = Terms.of(Term(s**q, -q))
        return MonotoneCurve((Piece(-INF, 1, s, 1), Piece(s, 1, INF, 0, form)))

    @property
    def support(self):
        return self.scale, INF

    def quantile(self, level):
        if not 0 < level <= 1:
            if level == 0:
                raise DomainError("the pareto quantile is empty at level 0")
            raise ArgumentError(f"level must lie in (0, 1], got {level}")
        return self.scale * level ** (-1.0 / self.exponent)

    def expectation(self):
        q = self.exponent
        return q * self.scale / (q - 1)

    def moment(self, q):
        self._check_moment(q)
        if q >= self.exponent:
            raise CapabilityError(f"moment of order {q} diverges for exponent {self.exponent}")
        return self.exponent * self.scale**q / (self.exponent - q)

    def cdf_array(self, x):
        x = np.asarray(x, dtype=float)
        ratio = np.maximum(x, self.scale) / self.scale
        return np.where(x > self.scale, 1.0 - ratio ** (-float(self.exponent)), 0.0)

    def kernel_spec(self):
        return KernelSpec(KIND_PARETO, np.empty(0), np.empty(0), a=self.scale, b=1.0 / self.exponent)

    def to_json(self):
        return {"kind": "pareto", "exponent": self.exponent, "scale": self.scale}


def dirac(c) -> Discrete:
    return Discrete(((c, 1),))


def bernoulli(p=Fraction(1, 2)) -> Discrete:
    p = as_number(p)
    if p == 0:
        return dirac(0)
    if p == 1:
        return dirac(1)
    return Discrete(((0, 1 - p), (1, p)))


def random_discrete(rng, max_atoms=20, low=-5.0, high=5.0, atoms=None, nonnegative=False) -> Discrete:
    """Random discrete law with dyadic-free float atoms and masses."""
    k = int(atoms if atoms is not None else rng.integers(1, max_atoms + 1))
    lo = 0.0 if nonnegative else low
    values = np.unique(np.round(rng.uniform(lo, high, size=k), 6))
    masses = rng.uniform(0.05, 1.0, size=len(values))
    return Discrete.from_unsorted(values.tolist(), [Fraction(m).limit_denominator(10**6) for m in masses])


def moment_of_curve(curve: MonotoneCurve, q) -> float:
    """``int_0^inf beta(t ** (1/q)) dt`` for a survival-like curve ``beta``.

    With the substitution ``t = s ** q`` this is ``int_0^inf q s^(q-1) beta(s) ds``,
    integrated piece by piece.
    """
    if not q > 0:
        raise ArgumentError("q must be positive")
    total = 0.0
    for p in curve.pieces:
        if p.vertical:
            continue
        u, v = max(0, p.x0), p.x1
        if u >= v:
            continue
        if p.form is None and p.y0 == p.y1:
            if p.y0 == 0:
                continue
            if v == INF:
                raise CapabilityError("moment diverges: survival stays positive")
            total += float(p.y0) * (float(v) ** q - float(u) ** q)
            continue
        val, _ = quad(
            lambda s: q * s ** (q - 1) * float(p.y_at(s)), float(u), float(v), epsabs=0.0, epsrel=1e-11, limit=400
        )
        total += val
    return total


def _enc(v):
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else v.numerator
    return v


def distribution_from_json(obj) -> Distribution:
    """Parse ``{"kind": ..., ...}`` (or a JSON string / shorthand name)."""
    if isinstance(obj, str):
        named = _NAMED.get(obj.strip().lower())
        if named is not None:
            return named()
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError:
            raise ArgumentError(f"cannot parse distribution {obj!r}") from None
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ArgumentError("distribution JSON needs a 'kind' field")
    kind = obj["kind"]
    try:
        if kind == "discrete":
            return Discrete(tuple((v, m) for v, m in obj["atoms"]))
        if kind == "dirac":
            return dirac(obj["value"])
        if kind == "bernoulli":
            return bernoulli(obj.get("p", "1/2"))
        if kind == "piecewise_linear_cdf":
            return PiecewiseLinearCDF(tuple((t, f) for t, f in obj["knots"]))
        if kind == "exponential":
            return Exponential(float(obj.get("rate", 1.0)))
        if kind == "pareto":
            return Pareto(float(obj.get("exponent", 2.0)), float(obj.get("scale", 1.0)))
        if kind == "uniform":
            return Uniform(obj.get("a", 0), obj.get("b", 1))
    except KeyError as exc:
        raise ArgumentError(f"distribution {kind!r} is missing field {exc}") from None
    raise ArgumentError(f"unknown distribution kind {kind!r}")


_NAMED = {
    "exp": Exponential,
    "exponential": Exponential,
    "bernoulli": bernoulli,
    "pareto": Pareto,
    "uniform": lambda: Uniform(0, 1),
}
