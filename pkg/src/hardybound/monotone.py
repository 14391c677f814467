"""Maximally nonincreasing set-valued operators on the real line.

A :class:`MonotoneCurve` is the graph of such an operator, stored as a chain of
:class:`Piece` objects running from the upper-left end of the graph to the
lower-right end.  Coordinates live in the extended reals, so tail rays are
just pieces with an infinite endpoint:

* a vertical piece is a jump of the operator (its value is a whole interval),
* a horizontal piece is a flat,
* a piece with a :mod:`~hardybound.forms` form is an analytic arc,
* any other piece is a straight segment between its two endpoints.

Only finite points belong to the graph.  The value at ``x`` is the closed
interval spanned by the finite graph points above ``x``; ``x`` is outside the
domain when there are none.  Inversion swaps coordinates, which turns jumps
into flats and back, so ``c.inverse().inverse() == c`` holds exactly.
"""
from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from scipy.integrate import quad

from .errors import ArgumentError, CapabilityError, DomainError
from .forms import Form, Inverse, Term, Terms, decode_number, encode_number, form_from_json

INF = math.inf


def _finite(v):
    return not isinstance(v, float) or math.isfinite(v)


@dataclass(frozen=True)
class Interval:
    """Closed interval ``[lo, hi]`` of extended reals."""

    lo: object
    hi: object

    def __post_init__(self):
        if self.lo > self.hi:
            raise ArgumentError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, v):
        return cls(v, v)

    @property
    def is_singleton(self):
        return self.lo == self.hi

    def __contains__(self, v):
        return self.lo <= v <= self.hi

    def __le__(self, other):
        return interval_leq(self, other)

    def __add__(self, other):
        return Interval(self.lo + other.lo, self.hi + other.hi)

    def to_json(self):
        return [encode_number(self.lo), encode_number(self.hi)]


def interval_leq(a: Interval, b: Interval) -> bool:
    """Interval order: ``b`` lies above ``a`` on both ends."""
    return a.lo <= b.lo and a.hi <= b.hi


def _le(u, v, tol):
    if u <= v:
        return True
    if tol and _finite(u) and _finite(v):
        return u - v <= tol * max(1.0, abs(u), abs(v))
    return False


def _interval_le(a, b, tol):
    return _le(a.lo, b.lo, tol) and _le(a.hi, b.hi, tol)


@dataclass(frozen=True)
class Piece:
    """One segment of a curve from ``(x0, y0)`` to ``(x1, y1)``."""

    x0: object
    y0: object
    x1: object
    y1: object
    form: Optional[Form] = None

    @property
    def vertical(self):
        return self.x0 == self.x1

    @property
    def horizontal(self):
        return self.y0 == self.y1 and self.x0 != self.x1

    def y_at(self, x):
        if x == self.x0:
            return self.y0
        if x == self.x1:
            return self.y1
        if self.form is not None:
            return self.form.value_at(x)
        if self.y0 == self.y1:
            return self.y0
        return self.y0 + (self.y1 - self.y0) * (x - self.x0) / (self.x1 - self.x0)

    def x_at(self, y):
        if self.vertical or y == self.y0:
            return self.x0
        if y == self.y1:
            return self.x1
        if self.form is not None:
            return self.form.solve(y, self.x0, self.x1)
        if self.y0 == self.y1:
            return self.x0
        return self.x0 + (self.x1 - self.x0) * (y - self.y0) / (self.y1 - self.y0)

    def as_form(self):
        if self.form is not None:
            return self.form
        if self.y0 == self.y1:
            return Terms.of(Term(self.y0))
        return Terms.line(self.x0, self.y0, self.x1, self.y1)

    def inverted(self):
        form = None if self.form is None else self.form.inverse(self.x0, self.x1)
        return Piece(self.y1, self.x1, self.y0, self.x0, form)

    def scaled(self, ax, ay):
        form = self.form
        if form is not None:
            if ax != 1:
                form = form.scale_x(ax)
            if ay != 1:
                form = form.scale_y(ay)
        return Piece(self.x0 * ax, self.y0 * ay, self.x1 * ax, self.y1 * ay, form)

    def to_json(self):
        return None if self.form is None else self.form.to_json()


def _normalize(p: Piece) -> Piece:
    if p.form is None:
        return p
    if p.x0 == p.x1 or p.y0 == p.y1:
        return Piece(p.x0, p.y0, p.x1, p.y1)
    if (
        isinstance(p.form, Terms)
        and p.form.is_affine()
        and all(_finite(v) for v in (p.x0, p.y0, p.x1, p.y1))
    ):
        return Piece(p.x0, p.y0, p.x1, p.y1)
    return p


def _collinear(a: Piece, b: Piece) -> bool:
    if a.form is not None or b.form is not None or a.vertical or b.vertical:
        return False
    if a.horizontal or b.horizontal:
        return False
    coords = (a.x0, a.y0, a.x1, a.y1, b.x1, b.y1)
    if not all(_finite(v) for v in coords):
        return False
    x0, y0, x1, y1, x2, y2 = (Fraction(v) for v in coords)
    return (x1 - x0) * (y2 - y1) == (x2 - x1) * (y1 - y0)


def _merge(a: Piece, b: Piece) -> Optional[Piece]:
    if a.x1 != b.x0 or a.y1 != b.y0:
        return None
    if a.vertical and b.vertical:
        return Piece(a.x0, a.y0, b.x1, b.y1)
    if a.form is None and b.form is None:
        if a.horizontal and b.horizontal:
            return Piece(a.x0, a.y0, b.x1, b.y1)
        if _collinear(a, b):
            return Piece(a.x0, a.y0, b.x1, b.y1)
        return None
    if a.form is not None and b.form is not None and not a.vertical and not b.vertical:
        if a.form == b.form:
            return Piece(a.x0, a.y0, b.x1, b.y1, a.form)
        fa, fb = a.form, b.form
        if isinstance(fa, Inverse) and isinstance(fb, Inverse) and fa.base == fb.base:
            lo, hi = min(fa.lo, fb.lo), max(fa.hi, fb.hi)
            return Piece(a.x0, a.y0, b.x1, b.y1, Inverse(fa.base, lo, hi))
    return None


def _canonical(pieces):
    out = []
    for p in pieces:
        p = _normalize(p)
        if p.x0 == p.x1 and p.y0 == p.y1:
            continue
        if out:
            m = _merge(out[-1], p)
            if m is not None:
                out[-1] = m
                continue
        out.append(p)
    return tuple(out)


@dataclass(frozen=True)
class MonotoneCurve:
    """Graph of a maximally nonincreasing operator (canonical, immutable)."""

    pieces: tuple

    def __post_init__(self):
        pieces = _canonical(self.pieces)
        object.__setattr__(self, "pieces", pieces)
        self._validate()
        object.__setattr__(self, "_x0s", [p.x0 for p in pieces])

    def _validate(self):
        ps = self.pieces
        if not ps:
            raise ArgumentError("a curve needs at least one piece")
        for p in ps:
            coords = (p.x0, p.y0, p.x1, p.y1)
            if any(isinstance(v, float) and math.isnan(v) for v in coords):
                raise ArgumentError("NaN coordinate in curve")
            if p.x0 > p.x1 or p.y0 < p.y1:
                raise ArgumentError(f"piece {p} is not nonincreasing")
            if p.vertical and not _finite(p.x0):
                raise ArgumentError("vertical piece at infinite abscissa")
            if p.horizontal and not _finite(p.y0):
                raise ArgumentError("horizontal piece at infinite level")
            if p.form is None and not (p.vertical or p.horizontal):
                if not all(_finite(v) for v in coords):
                    raise ArgumentError("straight segments need finite endpoints")
        for a, b in zip(ps, ps[1:]):
            if a.x1 != b.x0 or a.y1 != b.y0:
                raise ArgumentError(f"curve is disconnected between {a} and {b}")
        first, last = ps[0], ps[-1]
        if not (first.x0 == -INF or first.y0 == INF):
            raise ArgumentError("curve is not maximal at its upper-left end")
        if not (last.x1 == INF or last.y1 == -INF):
            raise ArgumentError("curve is not maximal at its lower-right end")

    # -- construction --------------------------------------------------
    @classmethod
    def from_vertices(cls, vertices, forms=None):
        vs = list(vertices)
        forms = list(forms) if forms is not None else [None] * (len(vs) - 1)
        if len(forms) != len(vs) - 1:
            raise ArgumentError("need one form per segment")
        return cls(tuple(Piece(a[0], a[1], b[0], b[1], f) for a, b, f in zip(vs, vs[1:], forms)))

    # -- queries -------------------------------------------------------
    @property
    def vertices(self):
        ps = self.pieces
        return [(ps[0].x0, ps[0].y0)] + [(p.x1, p.y1) for p in ps]

    @property
    def breakpoints(self):
        return sorted({x for x, _ in self.vertices if _finite(x)})

    @property
    def domain(self) -> Interval:
        """Closure of the domain."""
        return Interval(self.pieces[0].x0, self.pieces[-1].x1)

    @property
    def range(self) -> Interval:
        """Closure of the range."""
        return Interval(self.pieces[-1].y1, self.pieces[0].y0)

    def eval(self, x) -> Interval:
        if not _finite(x):
            raise DomainError(f"{x} is not a real number", self.domain)
        lo, hi, found = INF, -INF, False
        # one exact conversion instead of one per comparison against Fraction breakpoints
        key = Fraction(x) if isinstance(x, float) else x
        i = bisect_right(self._x0s, key) - 1
        while i >= 0 and self.pieces[i].x1 >= key:
            p = self.pieces[i]
            if p.vertical:
                lo, hi, found = min(lo, p.y1), max(hi, p.y0), True
            else:
                y = p.y_at(x)
                if _finite(y):
                    lo, hi, found = min(lo, y), max(hi, y), True
            i -= 1
        if not found:
            raise DomainError(f"{x} is outside the domain {self.domain}", self.domain)
        return Interval(lo, hi)

    __call__ = eval

    def contains(self, x) -> bool:
        try:
            self.eval(x)
        except DomainError:
            return False
        return True

    def piece_over(self, a, b) -> Piece:
        """The graph (non-vertical) piece covering the open gap ``(a, b)``."""
        i = max(bisect_right(self._x0s, a) - 1, 0)
        n = len(self.pieces)
        while i < n:
            p = self.pieces[i]
            if not p.vertical and p.x0 <= a and p.x1 >= b:
                return p
            if p.x0 > a:
                break
            i += 1
        raise DomainError(f"no graph piece over ({a}, {b})", self.domain)

    # -- transformations ----------------------------------------------
    def inverse(self) -> "MonotoneCurve":
        return MonotoneCurve(tuple(p.inverted() for p in reversed(self.pieces)))

    def scale(self, a, axis="y") -> "MonotoneCurve":
        if not a > 0:
            raise ArgumentError(f"scale factor must be positive, got {a}")
        if axis == "x":
            return MonotoneCurve(tuple(p.scaled(a, 1) for p in self.pieces))
        if axis == "y":
            return MonotoneCurve(tuple(p.scaled(1, a) for p in self.pieces))
        raise ArgumentError(f"axis must be 'x' or 'y', got {axis!r}")

    def affine_y(self, scale, shift) -> "MonotoneCurve":
        """Apply ``y -> scale * y + shift`` (``scale > 0``)."""
        if not scale > 0:
            raise ArgumentError("affine scale must be positive")
        out = []
        for p in self.pieces:
            form = p.form
            if form is not None:
                form = form.scale_y(scale).shift_y(shift)
            out.append(Piece(p.x0, p.y0 * scale + shift, p.x1, p.y1 * scale + shift, form))
        return MonotoneCurve(tuple(out))

    def clip_y(self, lo=-INF, hi=INF) -> "MonotoneCurve":
        """Pointwise ``min(max(y, lo), hi)``."""
        if lo > hi:
            raise ArgumentError("clip bounds are inverted")
        ps = list(self.pieces)
        if hi < INF and ps[0].y0 > hi:
            j = next((i for i, p in enumerate(ps) if p.y1 <= hi), None)
            if j is None:
                return MonotoneCurve((Piece(-INF, hi, INF, hi),))
            p = ps[j]
            xs = p.x_at(hi)
            ps = [Piece(-INF, hi, xs, hi), Piece(xs, hi, p.x1, p.y1, p.form)] + ps[j + 1 :]
        if lo > -INF and ps[-1].y1 < lo:
            j = next((i for i in range(len(ps) - 1, -1, -1) if ps[i].y0 >= lo), None)
            if j is None:
                return MonotoneCurve((Piece(-INF, lo, INF, lo),))
            p = ps[j]
            xs = p.x_at(lo)
            ps = ps[:j] + [Piece(p.x0, p.y0, xs, lo, p.form), Piece(xs, lo, INF, lo)]
        return MonotoneCurve(tuple(ps))

    # -- serialization -------------------------------------------------
    def to_json(self):
        return {
            "vertices": [[encode_number(x), encode_number(y)] for x, y in self.vertices],
            "segments": [p.to_json() for p in self.pieces],
            "left_tail": _tail(self.pieces[0], "left"),
            "right_tail": _tail(self.pieces[-1], "right"),
        }

    @classmethod
    def from_json(cls, obj):
        vs = [(decode_number(x), decode_number(y)) for x, y in obj["vertices"]]
        forms = [form_from_json(f) for f in obj.get("segments", [None] * (len(vs) - 1))]
        return cls.from_vertices(vs, forms)


def _tail(p: Piece, side):
    end_x = p.x0 if side == "left" else p.x1
    end_y = p.y0 if side == "left" else p.y1
    if _finite(end_x) and _finite(end_y):
        return {"kind": "none"}
    if p.vertical:
        return {"kind": "vertical", "x": encode_number(p.x0)}
    if p.horizontal:
        return {"kind": "horizontal", "y": encode_number(p.y0)}
    if isinstance(p.form, Terms) and p.form.is_affine():
        slope = sum((t.coef for t in p.form.terms if t.k == 1), 0)
        return {"kind": "ray", "slope": encode_number(slope)}
    return {"kind": "curve", "to": [encode_number(end_x), encode_number(end_y)]}


def invert(c: MonotoneCurve) -> MonotoneCurve:
    return c.inverse()


def scale(c: MonotoneCurve, a, axis="y") -> MonotoneCurve:
    return c.scale(a, axis)


def curve_leq(f: MonotoneCurve, g: MonotoneCurve, tol=0.0, samples=16) -> bool:
    """Pointwise interval order ``f <= g`` (domains compared first).

    Breakpoints of both curves are compared exactly.  Between breakpoints
    straight pieces are compared at the gap ends; analytic pieces are also
    compared at interior sample points.
    """
    if not _interval_le(f.domain, g.domain, 0):
        return False
    lo = max(f.domain.lo, g.domain.lo)
    hi = min(f.domain.hi, g.domain.hi)
    if lo > hi:
        return True
    inner = sorted({x for c in (f, g) for x in c.breakpoints if lo < x < hi})
    for x in [v for v in (lo, hi) if _finite(v)] + inner:
        if f.contains(x) and g.contains(x):
            if not _interval_le(f.eval(x), g.eval(x), tol):
                return False
    grid = [lo] + inner + [hi]
    for a, b in zip(grid, grid[1:]):
        if a == b:
            continue
        pf, pg = f.piece_over(a, b), g.piece_over(a, b)
        for x in (a, b):
            if not _le(pf.y_at(x), pg.y_at(x), tol):
                return False
        if pf.form is None and pg.form is None:
            continue
        for x in _gap_samples(a, b, samples):
            if not _le(_interior_y(pf, x), _interior_y(pg, x), tol):
                return False
    return True


def _interior_y(piece, x):
    # float-only evaluation strictly inside a piece; skips the exact endpoint checks
    if piece.form is not None:
        return piece.form.value_at(x)
    if piece.y0 == piece.y1:
        return piece.y0
    x0, y0 = float(piece.x0), float(piece.y0)
    return y0 + (float(piece.y1) - y0) * (x - x0) / (float(piece.x1) - x0)


def _gap_samples(a, b, n):
    if _finite(a) and _finite(b):
        a, b = float(a), float(b)
        w = b - a
        lin = [a + w * j / (n + 1) for j in range(1, n + 1)]
        geo = [a + w * 2.0**-j for j in range(2, n + 2)] + [b - w * 2.0**-j for j in range(2, n + 2)]
        return [x for x in lin + geo if a < x < b]
    offsets = [2.0**e for e in range(-6, 3 * n - 6, 3)]
    if _finite(a):
        s = max(1.0, abs(float(a)))
        return [float(a) + s * o for o in offsets]
    if _finite(b):
        s = max(1.0, abs(float(b)))
        return [float(b) - s * o for o in offsets]
    return [0.0] + [o for o in offsets] + [-o for o in offsets]


def pointwise_sum(curves: Iterable[MonotoneCurve]) -> MonotoneCurve:
    """Curve whose value at each point is the Minkowski sum of the values."""
    curves = list(curves)
    if not curves:
        raise ArgumentError("pointwise_sum needs at least one curve")
    if len(curves) == 1:
        return curves[0]
    lo = max(c.domain.lo for c in curves)
    hi = min(c.domain.hi for c in curves)
    if lo >= hi:
        raise DomainError(f"common domain [{lo}, {hi}] has no interior")
    inner = sorted({x for c in curves for x in c.breakpoints if lo < x < hi})
    grid = [lo] + inner + [hi]
    gaps = []
    for a, b in zip(grid, grid[1:]):
        ps = [c.piece_over(a, b) for c in curves]
        ya = _sum_ext(p.y_at(a) for p in ps)
        yb = _sum_ext(p.y_at(b) for p in ps)
        form = None
        if any(p.form is not None for p in ps):
            form = ps[0].as_form()
            for p in ps[1:]:
                form = form.add(p.as_form())
        gaps.append(Piece(a, ya, b, yb, form))
    out = []
    if _finite(lo):
        out.append(Piece(lo, INF, lo, gaps[0].y0))
    for i, g in enumerate(gaps):
        if i:
            out.append(Piece(g.x0, gaps[i - 1].y1, g.x0, g.y0))
        out.append(g)
    if _finite(hi):
        out.append(Piece(hi, gaps[-1].y1, hi, -INF))
    return MonotoneCurve(tuple(out))


def _sum_ext(values):
    vals = list(values)
    infs = {v for v in vals if not _finite(v)}
    if len(infs) > 1:
        raise DomainError("sum of opposite infinities")
    return infs.pop() if infs else sum(vals)


def integrate(c: MonotoneCurve, a, b) -> float:
    """Integral over ``[a, b]`` of any selection of the curve."""
    if a > b:
        raise ArgumentError("integration bounds are inverted")
    total = 0
    for p in c.pieces:
        if p.vertical:
            continue
        u, v = max(a, p.x0), min(b, p.x1)
        if u >= v:
            continue
        total += _piece_integral(p, u, v)
    return total


def _piece_integral(p: Piece, u, v):
    if p.form is None:
        if p.y0 == p.y1:
            if p.y0 == 0:
                return 0
            if not (_finite(u) and _finite(v)):
                raise CapabilityError("integral of a nonzero flat over an infinite range")
            return p.y0 * (v - u)
        return (p.y_at(u) + p.y_at(v)) * (v - u) / 2
    F = p.form.antiderivative()
    if F is not None:
        fu, fv = F.value_at(u), F.value_at(v)
        if not (_finite(fu) and _finite(fv)):
            raise CapabilityError("divergent integral")
        return fv - fu
    val, _ = quad(lambda x: float(p.form(x)), float(u), float(v), epsabs=0.0, epsrel=1e-12, limit=400)
    return val


def make_incr(delta) -> MonotoneCurve:
    """Unit downward jump at ``delta``: 1 before, [0, 1] at, 0 after."""
    return MonotoneCurve(
        (Piece(-INF, 1, delta, 1), Piece(delta, 1, delta, 0), Piece(delta, 0, INF, 0))
    )


def make_id_pow(a) -> MonotoneCurve:
    """``t -> t**(-a)`` on ``t > 0`` (empty elsewhere)."""
    if not a > 0:
        raise ArgumentError(f"exponent must be positive, got {a}")
    return MonotoneCurve((Piece(0, INF, INF, 0, Terms.of(Term(1.0, -a))),))


def make_exp() -> MonotoneCurve:
    """``t -> exp(-t)`` on the whole line."""
    return MonotoneCurve((Piece(-INF, INF, INF, 0, Terms.of(Term(1.0, 0, 0, -1.0))),))


def make_neg_log() -> MonotoneCurve:
    """``t -> -log(t)`` on ``t > 0``, the inverse of :func:`make_exp`."""
    return make_exp().inverse()
