"""Closed-form pieces used inside monotone curves.

A curve piece is either a straight segment (described by its endpoints only)
or carries a *form*: an analytic, monotone function of the abscissa.  Forms
are built from terms ``c * x**k * log(x)**m`` and pure exponentials
``c * exp(r * x)``.  This family is closed under integration followed by
division by ``x``, which is exactly what the Hardy transform needs, and it
has closed-form inverses for the one-term members that appear in practice
(exponential survival, Pareto survival, logarithmic quantiles).

Forms whose inverse has no closed form are wrapped in :class:`Inverse`, which
evaluates by bracketed root finding on the original form.  Inverting an
:class:`Inverse` returns the wrapped form untouched, so curve inversion is an
exact involution.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from scipy.optimize import brentq

from .errors import CapabilityError

INF = math.inf


def encode_number(v):
    """JSON-safe encoding: Fractions as ``"n/d"`` strings, infinities as strings."""
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, float):
        if math.isnan(v):
            raise ValueError("NaN is not serializable")
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
    return v


def decode_number(v):
    if isinstance(v, str):
        if v in ("inf", "+inf", "Infinity"):
            return INF
        if v in ("-inf", "-Infinity"):
            return -INF
        return Fraction(v)
    return v


def _sign(v):
    return (v > 0) - (v < 0)


@dataclass(frozen=True)
class Term:
    """``coef * x**k * log(x)**m`` or, when ``r`` is nonzero, ``coef * exp(r*x)``."""

    coef: object
    k: object = 0
    m: int = 0
    r: float = 0
    _fcoef: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        # float inputs skip the Fraction-by-float promotion on every call
        try:
            fc = float(self.coef)
        except OverflowError:
            fc = self.coef
        object.__setattr__(self, "_fcoef", fc)

    @property
    def key(self):
        return (self.k, self.m, self.r)

    def __call__(self, x):
        c, k, m, r = self.coef, self.k, self.m, self.r
        if isinstance(x, float):
            c = self._fcoef
        if r:
            try:
                return c * math.exp(r * x)
            except OverflowError:
                return _sign(c) * INF
        if m == 0:
            if k == 0:
                return c
            if isinstance(k, int):
                return c * x**k
            return c * float(x) ** k
        return c * float(x) ** k * math.log(x) ** m

    def limit(self, where):
        """Limit at ``0`` (from the right), ``inf`` or ``-inf``."""
        c, k, m, r = self.coef, self.k, self.m, self.r
        s = _sign(c)
        if r:
            if where == 0:
                return c
            if (where > 0) == (r > 0):
                return s * INF
            return 0.0
        if where == 0:
            if k > 0:
                return 0.0
            if k == 0 and m == 0:
                return c
            return s * (-1) ** m * INF
        if where == INF:
            if k > 0 or (k == 0 and m > 0):
                return s * INF
            if k == 0:
                return c
            return 0.0
        # x -> -inf only makes sense for constants and integer monomials
        if m == 0 and isinstance(k, int):
            if k == 0:
                return c
            if k < 0:
                return 0.0
            return s * (-1) ** k * INF
        return math.nan


def _combine(terms):
    acc = {}
    for t in terms:
        acc[t.key] = acc.get(t.key, 0) + t.coef
    out = [Term(c, *key) for key, c in acc.items() if c != 0]
    out.sort(key=lambda t: (t.r, t.m, t.k))
    return tuple(out)


def _bracket_solve(f, y, lo, hi):
    """Solve ``f(x) = y`` for nonincreasing ``f`` on ``[lo, hi]``."""
    a, b = lo, hi
    if a == -INF:
        a = (min(b, 0.0) if b != INF else 0.0) - 1.0
        step = 1.0
        while f(a) < y:
            step *= 2.0
            a -= step
            if a < -1e300:
                return -INF
    if b == INF:
        b = (max(a, 0.0) if a != -INF else 0.0) + 1.0
        step = 1.0
        while f(b) > y:
            step *= 2.0
            b += step
            if b > 1e300:
                return INF
    fa = _safe(f, a)
    j = 0
    while not math.isfinite(fa) and j < 2000:
        a = a + (b - a) / 2.0 if j < 60 else math.nextafter(a, b)
        fa = _safe(f, a)
        j += 1
    fb = _safe(f, b)
    j = 0
    while not math.isfinite(fb) and j < 2000:
        b = b - (b - a) / 2.0 if j < 60 else math.nextafter(b, a)
        fb = _safe(f, b)
        j += 1
    if fa <= y:
        return a
    if fb >= y:
        return b
    return brentq(lambda x: f(x) - y, a, b, xtol=1e-300, rtol=4 * 2.220446049250313e-16, maxiter=500)


def _safe(f, x):
    try:
        return float(f(x))
    except (ValueError, ZeroDivisionError, OverflowError):
        return math.nan


class Form:
    """Base class of analytic piece forms."""

    def value_at(self, x):
        raise NotImplementedError

    def add(self, other):
        return SumForm.of(self, other)

    def inverse(self, lo, hi):
        """Form of the inverse function; ``[lo, hi]`` is this form's x-range."""
        return Inverse(self, lo, hi)

    def solve(self, y, lo, hi):
        return _bracket_solve(self.value_at, y, lo, hi)

    def antiderivative(self) -> Optional["Form"]:
        return None

    def over_x(self) -> Optional["Form"]:
        return None


@dataclass(frozen=True)
class Terms(Form):
    terms: tuple

    @classmethod
    def of(cls, *terms):
        return cls(_combine(terms))

    @classmethod
    def line(cls, x0, y0, x1, y1):
        """The affine function through two finite points (or a constant)."""
        if y0 == y1:
            return cls.of(Term(y0))
        s = (y1 - y0) / (x1 - x0)
        return cls.of(Term(y0 - s * x0), Term(s, 1))

    def __call__(self, x):
        return sum(t(x) for t in self.terms) if self.terms else 0

    def value_at(self, x):
        if x == 0 or x in (INF, -INF):
            vals = [t.limit(x) for t in self.terms]
            if any(math.isnan(v) for v in vals):
                return math.nan
            infs = {v for v in vals if math.isinf(v)}
            if len(infs) > 1:
                return math.nan
            if infs:
                return infs.pop()
            return sum(vals) if vals else 0
        return self(x)

    @property
    def constant(self):
        return sum((t.coef for t in self.terms if t.key == (0, 0, 0)), 0)

    @property
    def nonconstant(self):
        return [t for t in self.terms if t.key != (0, 0, 0)]

    def is_affine(self):
        return all(t.r == 0 and t.m == 0 and t.k in (0, 1) for t in self.terms)

    def scale_y(self, a):
        return Terms.of(*(Term(t.coef * a, t.k, t.m, t.r) for t in self.terms))

    def shift_y(self, d):
        return Terms.of(*self.terms, Term(d))

    def scale_x(self, a):
        """The form ``x -> self(x / a)``."""
        out = []
        for t in self.terms:
            if t.r:
                out.append(Term(t.coef, 0, 0, t.r / a))
                continue
            if isinstance(t.k, int):
                c = t.coef * (Fraction(a) ** (-t.k) if isinstance(a, Fraction) else a ** (-t.k))
            else:
                c = t.coef * float(a) ** (-t.k)
            if t.m == 0:
                out.append(Term(c, t.k))
                continue
            la = math.log(a)
            for j in range(t.m + 1):
                out.append(Term(c * math.comb(t.m, j) * (-la) ** (t.m - j), t.k, j))
        return Terms.of(*out)

    def shift_x(self, d):
        """The form ``x -> self(x - d)`` (exponentials and polynomials only)."""
        out = []
        for t in self.terms:
            if t.r:
                out.append(Term(t.coef * math.exp(-t.r * d), 0, 0, t.r))
            elif t.m == 0 and isinstance(t.k, int) and t.k >= 0:
                for j in range(t.k + 1):
                    out.append(Term(t.coef * math.comb(t.k, j) * (-d) ** (t.k - j), j))
            else:
                raise CapabilityError("cannot shift the argument of a log/power term")
        return Terms.of(*out)

    def add(self, other):
        if isinstance(other, Terms):
            return Terms.of(*self.terms, *other.terms)
        return SumForm.of(self, other)

    def antiderivative(self):
        out = []
        for t in self.terms:
            out.extend(_integrate(t.coef, t.k, t.m, t.r))
        return Terms.of(*out)

    def over_x(self):
        if any(t.r for t in self.terms):
            return None
        return Terms.of(*(Term(t.coef, t.k - 1, t.m) for t in self.terms))

    def power(self, q):
        """``self ** q`` when that stays in the family (one monomial)."""
        if len(self.terms) == 1:
            t = self.terms[0]
            if t.r == 0 and t.m == 0 and t.coef > 0:
                return Terms.of(Term(float(t.coef) ** q, t.k * q))
        return None

    def solve(self, y, lo, hi):
        nonconst = self.nonconstant
        if len(nonconst) == 1:
            t = nonconst[0]
            a = self.constant
            try:
                z = (y - a) / t.coef
                if t.r:
                    x = math.log(z) / t.r
                elif t.m == 0 and t.k == 1:
                    x = z
                elif t.m == 0 and t.k == -1:
                    x = 1 / z
                elif t.m == 0:
                    x = float(z) ** (1.0 / t.k)
                elif t.m == 1 and t.k == 0:
                    x = math.exp(z)
                else:
                    x = None
            except (ValueError, ZeroDivisionError, OverflowError):
                x = None
            if x is not None and not (isinstance(x, float) and math.isnan(x)):
                return min(max(x, lo), hi)
        return _bracket_solve(self.value_at, y, lo, hi)

    def explicit_inverse(self):
        """Closed-form inverse as a :class:`Terms`, or ``None``."""
        nonconst = self.nonconstant
        if len(nonconst) != 1:
            return None
        t = nonconst[0]
        a = self.constant
        if t.r:
            if a != 0 or t.coef <= 0:
                return None
            return Terms.of(Term(1.0 / t.r, 0, 1), Term(-math.log(t.coef) / t.r))
        if t.m == 0 and t.k == 1:
            return Terms.of(Term(1 / t.coef, 1), Term(-a / t.coef))
        if t.m == 0 and a == 0 and t.coef > 0:
            inv_k = 1.0 / t.k
            return Terms.of(Term(float(t.coef) ** (-inv_k), inv_k))
        if t.m == 1 and t.k == 0:
            return Terms.of(Term(math.exp(-a / t.coef), 0, 0, 1.0 / t.coef))
        return None

    def to_json(self):
        return {
            "kind": "terms",
            "terms": [[encode_number(t.coef), encode_number(t.k), t.m, t.r] for t in self.terms],
        }


def _integrate(c, k, m, r):
    if r:
        return [Term(c / r, 0, 0, r)]
    if k == -1:
        return [Term(c / (m + 1), 0, m + 1)]
    kp = k + 1
    out = [Term(c / kp, kp, m)]
    if m:
        out.extend(_integrate(-c * m / kp, k, m - 1, 0))
    return out


@dataclass(frozen=True, eq=False)
class Inverse(Form):
    """Inverse of ``base``, whose own x-range is ``[lo, hi]``."""

    base: Form
    lo: object
    hi: object

    def __post_init__(self):
        explicit = self.base.explicit_inverse() if isinstance(self.base, Terms) else None
        object.__setattr__(self, "_explicit", explicit)

    def __call__(self, x):
        return self.base.solve(x, self.lo, self.hi)

    def value_at(self, x):
        if math.isfinite(x):
            return self(x)
        if x == self.base.value_at(self.lo):
            return self.lo
        if x == self.base.value_at(self.hi):
            return self.hi
        if self._explicit is not None:
            return self._explicit.value_at(x)
        return math.nan

    def solve(self, y, lo, hi):
        return self.base.value_at(y)

    def inverse(self, lo, hi):
        return self.base

    def explicit(self):
        return self._explicit

    def scale_y(self, a):
        return Inverse(self.base.scale_x(a), self.lo * a, self.hi * a)

    def scale_x(self, a):
        return Inverse(self.base.scale_y(a), self.lo, self.hi)

    def shift_y(self, d):
        if not isinstance(self.base, Terms):
            raise CapabilityError("cannot shift this inverse form")
        return Inverse(self.base.shift_x(d), self.lo + d, self.hi + d)

    def antiderivative(self):
        return None if self._explicit is None else self._explicit.antiderivative()

    def over_x(self):
        return None if self._explicit is None else self._explicit.over_x()

    def power(self, q):
        return None if self._explicit is None else self._explicit.power(q)

    def to_json(self):
        return {
            "kind": "inverse",
            "of": self.base.to_json(),
            "range": [encode_number(self.lo), encode_number(self.hi)],
        }

    def __eq__(self, other):
        return (
            isinstance(other, Inverse)
            and self.base == other.base
            and self.lo == other.lo
            and self.hi == other.hi
        )

    def __hash__(self):
        return hash((self.base, self.lo, self.hi))


@dataclass(frozen=True)
class SumForm(Form):
    parts: tuple

    @classmethod
    def of(cls, *forms):
        flat, terms = [], []
        for f in forms:
            items = f.parts if isinstance(f, SumForm) else (f,)
            for g in items:
                (terms if isinstance(g, Terms) else flat).append(g)
        if terms:
            merged = Terms.of(*(t for g in terms for t in g.terms))
            if merged.terms:
                flat.append(merged)
        if len(flat) == 1:
            return flat[0]
        return cls(tuple(flat))

    def __call__(self, x):
        return sum(p(x) for p in self.parts)

    def value_at(self, x):
        vals = [p.value_at(x) for p in self.parts]
        infs = {v for v in vals if isinstance(v, float) and math.isinf(v)}
        if any(isinstance(v, float) and math.isnan(v) for v in vals) or len(infs) > 1:
            return math.nan
        return infs.pop() if infs else sum(vals)

    def scale_y(self, a):
        return SumForm.of(*(p.scale_y(a) for p in self.parts))

    def scale_x(self, a):
        return SumForm.of(*(p.scale_x(a) for p in self.parts))

    def shift_y(self, d):
        return SumForm.of(*self.parts, Terms.of(Term(d)))

    def antiderivative(self):
        parts = [p.antiderivative() for p in self.parts]
        return None if any(p is None for p in parts) else SumForm.of(*parts)

    def over_x(self):
        parts = [p.over_x() for p in self.parts]
        return None if any(p is None for p in parts) else SumForm.of(*parts)

    def power(self, q):
        return None

    def to_json(self):
        return {"kind": "sum", "parts": [p.to_json() for p in self.parts]}


def form_from_json(obj):
    if obj is None:
        return None
    kind = obj["kind"]
    if kind == "terms":
        return Terms.of(
            *(Term(decode_number(c), decode_number(k), int(m), float(r)) for c, k, m, r in obj["terms"])
        )
    if kind == "inverse":
        lo, hi = obj["range"]
        return Inverse(form_from_json(obj["of"]), decode_number(lo), decode_number(hi))
    if kind == "sum":
        return SumForm.of(*(form_from_json(p) for p in obj["parts"]))
    raise ValueError(f"unknown form kind {kind!r}")
