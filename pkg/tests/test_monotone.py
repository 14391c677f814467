import json
import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hardybound.distributions import Discrete, Exponential, random_discrete
from hardybound.errors import ArgumentError, DomainError
from hardybound.hardy import hardy_of
from hardybound.monotone import (
    INF,
    Interval,
    MonotoneCurve,
    Piece,
    curve_leq,
    integrate,
    interval_leq,
    invert,
    make_exp,
    make_id_pow,
    make_incr,
    make_neg_log,
    pointwise_sum,
    scale,
)



atoms = st.lists(
    st.tuples(st.integers(-20, 20), st.integers(1, 9)),
    min_size=1,
    max_size=6,
    unique_by=lambda a: a[0],
)


def curve_from(at):
    total = sum(m for _, m in at)
    return Discrete(tuple((F(v), F(m, total)) for v, m in sorted(at))).survival


class TestInterval:
    def test_order_examples(self):
        assert interval_leq(Interval(0, 1), Interval(2, 3))
        assert interval_leq(Interval(0, 2), Interval(1, 3))
        assert not interval_leq(Interval(0, 3), Interval(1, 2))
        assert not interval_leq(Interval(1, 2), Interval(0, 3))

    def test_empty_interval_rejected(self):
        with pytest.raises(ArgumentError):
            Interval(2, 1)

    def test_infinite_ends(self):
        assert interval_leq(Interval(-INF, 0), Interval(0, INF))


class TestEval:
    def test_incr(self):
        c = make_incr(0)
        assert c.eval(-1) == Interval(1, 1)
        assert c.eval(0) == Interval(0, 1)
        assert c.eval(5) == Interval(0, 0)
        assert make_incr(3).eval(2.999) == Interval(1, 1)

    def test_id_pow(self):
        assert make_id_pow(2).eval(2).lo == pytest.approx(0.25, abs=0)
        assert make_id_pow(F(1, 2)).eval(4).lo == pytest.approx(0.5, rel=1e-15)
        with pytest.raises(DomainError) as exc:
            make_id_pow(2).eval(-1)
        assert exc.value.domain == Interval(0, INF)

    def test_id_pow_rejects_nonpositive(self):
        with pytest.raises(ArgumentError):
            make_id_pow(0)

    def test_exp(self):
        assert make_exp().eval(0) == Interval(1.0, 1.0)

    def test_infinite_argument_is_outside(self):
        with pytest.raises(DomainError):
            make_exp().eval(INF)

    def test_jump_interval_is_closed(self):
        s = Discrete(((0, F(1, 4)), (1, F(3, 4)))).survival
        assert s.eval(1) == Interval(0, F(3, 4))
        assert s.eval(F(1, 2)) == Interval(F(3, 4), F(3, 4))


class TestInvert:
    def test_incr_flat(self):
        t = invert(make_incr(F(7, 3)))
        assert t.eval(F(1, 2)) == Interval(F(7, 3), F(7, 3))

    def test_exponential_quantile(self):
        t = invert(Exponential().survival)
        assert t.eval(0.5).lo == pytest.approx(math.log(2), rel=1e-15)
        # bisection on the survival function as an independent route
        lo, hi = 0.0, 10.0
        for _ in range(200):
            mid = (lo + hi) / 2
            lo, hi = (mid, hi) if math.exp(-mid) > 0.5 else (lo, mid)
        assert t.eval(0.5).lo == pytest.approx(lo, abs=1e-14)

    def test_id_pow(self):
        assert invert(make_id_pow(2)).eval(0.25).lo == pytest.approx(2.0, rel=1e-15)

    def test_neg_log(self):
        assert make_neg_log().eval(math.e).lo == pytest.approx(-1.0, rel=1e-15)

    @given(atoms)
    @settings(max_examples=60, deadline=None)
    def test_involution(self, at):
        c = curve_from(at)
        assert invert(invert(c)) == c

    def test_involution_analytic(self):
        for c in (make_exp(), make_id_pow(3), Exponential(2).survival):
            assert c.inverse().inverse() == c


class TestOrder:
    def test_reflexive(self):
        s = Exponential().survival
        assert curve_leq(s, s)

    def test_exponential_equals_e1(self):
        s = Exponential().survival
        assert curve_leq(s, make_exp().clip_y(0, 1))
        assert curve_leq(s, make_exp())

    def test_preserved_by_inversion_on_random_pairs(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            f = random_discrete(rng, max_atoms=6).survival
            g = random_discrete(rng, max_atoms=6).survival
            assert curve_leq(f, g) == curve_leq(invert(f), invert(g))

    @given(atoms, atoms, atoms)
    @settings(max_examples=60, deadline=None)
    def test_partial_order(self, a, b, c):
        f, g, h = curve_from(a), curve_from(b), curve_from(c)
        if curve_leq(f, g) and curve_leq(g, f):
            assert f == g
        if curve_leq(f, g) and curve_leq(g, h):
            assert curve_leq(f, h)

    def test_shifted_jump_ordering(self):
        assert curve_leq(make_incr(0), make_incr(1))
        assert not curve_leq(make_incr(1), make_incr(0))

    def test_analytic_order(self):
        # e^-t <= e * e^-t on the whole line
        assert curve_leq(make_exp(), make_exp().scale(math.e, "y"))
        assert not curve_leq(make_exp().scale(math.e, "y"), make_exp())


class TestSum:
    def test_flats(self):
        a, b = invert(make_incr(2)), invert(make_incr(5))
        s = pointwise_sum([a, b])
        assert s.eval(F(1, 3)) == Interval(7, 7)

    def test_doubled_hardy_exponential(self):
        h = hardy_of(Exponential()).curve
        s = pointwise_sum([h, h])
        assert s.eval(0.5).lo == pytest.approx(2 * (1 + math.log(2)), rel=1e-15)

    def test_copies_equal_scaling(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            c = random_discrete(rng, max_atoms=5).survival
            k = int(rng.integers(2, 5))
            assert pointwise_sum([c] * k) == scale(c, k, "y")

    @given(atoms, atoms, atoms)
    @settings(max_examples=40, deadline=None)
    def test_commutative_associative(self, a, b, c):
        f, g, h = curve_from(a), curve_from(b), curve_from(c)
        assert pointwise_sum([f, g]) == pointwise_sum([g, f])
        assert pointwise_sum([pointwise_sum([f, g]), h]) == pointwise_sum([f, pointwise_sum([g, h])])

    def test_minkowski_values_at_jumps(self):
        f = Discrete(((0, F(1, 2)), (1, F(1, 2)))).survival
        g = Discrete(((1, F(1, 4)), (2, F(3, 4)))).survival
        s = pointwise_sum([f, g])
        for x in (F(-1), F(0), F(1, 2), F(1), F(3, 2), F(2), F(3)):
            want = f.eval(x) + g.eval(x)
            assert s.eval(x) == want

    def test_disjoint_domains(self):
        f = MonotoneCurve((Piece(-INF, 1, 0, 1), Piece(0, 1, 0, -INF)))
        g = MonotoneCurve((Piece(1, INF, 1, 0), Piece(1, 0, INF, 0)))
        with pytest.raises(DomainError):
            pointwise_sum([f, g])


class TestScale:
    def test_examples(self):
        assert scale(make_id_pow(2), 4, "y").eval(2).lo == pytest.approx(1.0, rel=1e-15)
        c = Exponential().survival
        assert scale(scale(c, 2, "x"), 0.5, "x") == c
        assert scale(make_exp(), math.e, "y").eval(1).lo == pytest.approx(1.0, rel=1e-15)

    def test_rejects_nonpositive(self):
        with pytest.raises(ArgumentError):
            scale(make_exp(), 0)
        with pytest.raises(ArgumentError):
            scale(make_exp(), -1, "x")


class TestConstruction:
    def test_disconnected_rejected(self):
        with pytest.raises(ArgumentError):
            MonotoneCurve((Piece(-INF, 1, 0, 1), Piece(1, 1, INF, 1)))

    def test_non_maximal_rejected(self):
        with pytest.raises(ArgumentError):
            MonotoneCurve((Piece(0, 1, 1, 0),))

    def test_increasing_rejected(self):
        with pytest.raises(ArgumentError):
            MonotoneCurve((Piece(-INF, 0, 0, 0), Piece(0, 0, 1, 1), Piece(1, 1, INF, 1)))

    def test_canonical_merging(self):
        c = MonotoneCurve(
            (
                Piece(-INF, 2, 0, 2),
                Piece(0, 2, 1, 2),
                Piece(1, 2, 2, 1),
                Piece(2, 1, 3, 0),
                Piece(3, 0, 3, -1),
                Piece(3, -1, 3, -INF),
            )
        )
        assert len(c.pieces) == 3


class TestClipAndIntegrate:
    def test_clip(self):
        c = make_id_pow(2).clip_y(hi=1)
        assert c.eval(F(1, 2)) == Interval(1, 1)
        assert c.eval(2).lo == pytest.approx(0.25)
        assert c.domain == Interval(-INF, INF)

    def test_integrals(self):
        assert integrate(make_exp(), 0, INF) == pytest.approx(1.0, rel=1e-14)
        assert integrate(make_id_pow(2), 1, INF) == pytest.approx(1.0, rel=1e-14)
        assert integrate(make_neg_log(), 0, 1) == pytest.approx(1.0, rel=1e-14)
        s = Discrete(((0, F(1, 2)), (1, F(1, 2)))).tail_quantile
        assert integrate(s, 0, 1) == F(1, 2)


class TestJson:
    @given(atoms)
    @settings(max_examples=40, deadline=None)
    def test_rational_round_trip(self, at):
        c = curve_from(at)
        text = json.dumps(c.to_json())
        back = MonotoneCurve.from_json(json.loads(text))
        assert back == c
        assert back.vertices == c.vertices

    def test_analytic_round_trip(self):
        for c in (make_exp(), make_id_pow(2).inverse(), hardy_of(Exponential()).curve):
            back = MonotoneCurve.from_json(json.loads(json.dumps(c.to_json())))
            assert back == c

    def test_tail_descriptors(self):
        d = Exponential().survival.to_json()
        assert d["left_tail"] == {"kind": "horizontal", "y": 1}
        assert d["right_tail"]["kind"] == "curve"
        d = make_incr(0).inverse().to_json()
        assert d["left_tail"] == {"kind": "vertical", "x": 0}
