"""Running averages of tail-quantile curves and the limiting survival profile.

For a curve ``f`` whose domain starts at 0, the transform is
``H(f)(p) = (1/p) * int_0^p f``.  It is built piece by piece: on a piece of
``f`` starting at ``x0`` with accumulated integral ``K``, the transform is
``(K + F(p) - F(x0)) / p`` for an antiderivative ``F``.  A straight piece
``alpha + beta * p`` therefore yields ``a + b * p + c / p`` with
``a = alpha``, ``b = beta / 2`` and ``c = K - alpha * x0 - beta * x0**2 / 2``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from .distributions import Distribution
from .errors import ArgumentError, CapabilityError
from .forms import Term, Terms
from .monotone import INF, Interval, MonotoneCurve, Piece, make_incr


@dataclass(frozen=True)
class HardySegment:
    lo: object
    hi: object
    form: object
    coefficients: Optional[tuple] = None  # (a, b, c) for straight input pieces


@dataclass(frozen=True)
class HardyProfile:
    base: MonotoneCurve
    curve: MonotoneCurve
    segments: tuple
    endpoint_zero: Optional[Interval]
    endpoint_pf: Optional[tuple]

    def eval(self, p) -> Interval:
        return self.curve.eval(p)

    def value(self, p):
        """Single value on the open domain interior (upper endpoint elsewhere)."""
        return self.curve.eval(p).hi

    def to_json(self):
        segs = []
        for s in self.segments:
            item = {"lo": _enc(s.lo), "hi": _enc(s.hi), "form": s.form.to_json()}
            if s.coefficients is not None:
                item["coefficients"] = [_enc(v) for v in s.coefficients]
            segs.append(item)
        return {
            "curve": self.curve.to_json(),
            "segments": segs,
            "endpoint_zero": None if self.endpoint_zero is None else self.endpoint_zero.to_json(),
            "endpoint_pf": None if self.endpoint_pf is None else [_enc(v) for v in self.endpoint_pf],
        }


def _enc(v):
    from .forms import encode_number

    return encode_number(v)


def hardy_transform(f: MonotoneCurve) -> HardyProfile:
    """Exact running average of ``f`` from 0."""
    dom = f.domain
    if dom.lo != 0:
        raise ArgumentError(f"domain must start at 0, got {dom}")
    pf = dom.hi
    if not pf > 0:
        raise ArgumentError("domain has no interior")
    out, segments = [], []
    first = f.pieces[0]
    if first.vertical and first.x0 == 0:
        out.append(first)
    acc = 0
    for p in f.pieces:
        if p.vertical:
            continue
        x0, x1 = p.x0, p.x1
        if p.form is None:
            beta = 0 if p.y0 == p.y1 else (p.y1 - p.y0) / (x1 - x0)
            alpha = p.y0 - beta * x0
            a, b, c = alpha, beta / 2, acc - alpha * x0 - beta * x0 * x0 / 2
            form = Terms.of(Term(a), Term(b, 1), Term(c, -1))
            coeffs = (a, b, c)
            inc = None if x1 == INF else alpha * (x1 - x0) + beta * (x1 * x1 - x0 * x0) / 2
        else:
            F = p.form.antiderivative()
            if F is None:
                raise CapabilityError("no antiderivative for this curve piece")
            f0 = F.value_at(x0)
            if f0 in (INF, -INF) or f0 != f0:
                raise CapabilityError("integral diverges at the start of the domain")
            form = F.shift_y(acc - f0).over_x()
            if form is None:
                raise CapabilityError("cannot divide this antiderivative by p")
            coeffs = None
            inc = None
            if x1 != INF:
                inc = F.value_at(x1) - f0
                if inc in (INF, -INF) or inc != inc:
                    raise CapabilityError("integral diverges inside the domain")
        y0 = p.y0 if x0 == 0 else acc / x0
        if x1 == INF:
            y1 = form.value_at(INF)
        else:
            acc = acc + inc
            y1 = acc / x1
        out.append(Piece(x0, y0, x1, y1, form))
        segments.append(HardySegment(x0, x1, form, coeffs))
    endpoint_pf = None
    if pf != INF:
        out.append(Piece(pf, acc / pf, pf, -INF))
        endpoint_pf = (pf, acc / pf)
    curve = MonotoneCurve(tuple(out))
    zero = f.eval(0) if f.contains(0) else None
    return HardyProfile(f, curve, tuple(segments), zero, endpoint_pf)


@lru_cache(maxsize=512)
def hardy_of(mu: Distribution) -> HardyProfile:
    """Transform of the tail quantile of ``mu`` (cached per distribution)."""
    return hardy_transform(mu.tail_quantile)


def _check_level(p, allow_one=False):
    ok = 0 < p <= 1 if allow_one else 0 < p < 1
    if not ok:
        raise ArgumentError(f"level p must lie in (0, 1{']' if allow_one else ')'}, got {p}")


def delta(mu: Distribution, p) -> object:
    """Normalized gap ``(H(T)(p) - E[X]) / (1 - p)``."""
    _check_level(p)
    return (hardy_of(mu).value(p) - mu.expectation()) / (1 - p)


def jump_points(mu: Distribution, p):
    """Lower and upper jump locations of the limiting survival profile."""
    _check_level(p, allow_one=True)
    if p == 1:
        e = mu.expectation()
        return e, e
    h = hardy_of(mu).value(p)
    return h - delta(mu, p), h


def limiting_survival(mu: Distribution, p) -> MonotoneCurve:
    """Survival profile equal to 1, then ``p``, then 0, with jumps at :func:`jump_points`."""
    a, b = jump_points(mu, p)
    if p == 1 or a == b:
        return make_incr(b)
    return MonotoneCurve(
        (
            Piece(-INF, 1, a, 1),
            Piece(a, 1, a, p),
            Piece(a, p, b, p),
            Piece(b, p, b, 0),
            Piece(b, 0, INF, 0),
        )
    )
