from fractions import Fraction
from math import gcd

from hypothesis import given, strategies as st

from padicauto.links import (
    cable_segments, canonical_intercept, predict_affine, predict_const, predict_linear, psi_family, same_cable,
)
from padicauto.padic import PAdicRational, cset, mult_ord

F = Fraction
rats = st.builds(Fraction, st.integers(-60, 60), st.sampled_from([1, 3, 5, 7, 9, 11, 15, 21]))


def brute_cables(a, q, p):
    """Group the offsets of C(q) into cables by brute force: two lines y = a x + e
    coincide on the torus iff e1 - e2 lies in Z + a Z."""
    v = Fraction(a).denominator
    offsets = sorted(cset(PAdicRational.of(q, p)).elements)
    classes = []
    for e in offsets:
        for cls in classes:
            d = e - cls[0]
            if any(((d - Fraction(a) * i) % 1) == 0 for i in range(v)):
                cls.append(e)
                break
        else:
            classes.append([e])
    return classes


def test_const_examples():
    pred = predict_const(PAdicRational.of("2/7", 2))
    assert pred.knot_count == 3 and set(pred.intercepts) == {F(5, 7), F(6, 7), F(3, 7)}
    assert predict_const(PAdicRational.of(4, 2)).intercepts == (F(0),)
    assert set(predict_const(PAdicRational.of("1/3", 2)).intercepts) == {F(2, 3), F(1, 3)}


def test_linear_examples():
    pred = predict_linear(PAdicRational.of("5/3", 2))
    assert pred.slope.fraction == F(5, 3) and pred.knot_count == 1 and pred.intercepts == (0,)
    assert predict_linear(PAdicRational.of(1, 2)).winding == (1, 1)
    assert predict_linear(PAdicRational.of(0, 2)).intercepts == predict_const(PAdicRational.of(0, 2)).intercepts


def test_affine_examples():
    pred = predict_affine("3/5", "1/3", 2)
    assert pred.m == 3 and pred.knot_count == 2
    assert predict_affine("7/15", "2/5", 2).knot_count == 1
    assert predict_affine("-2", "1/3", 2).knot_count == 2
    assert predict_affine("3/5", "2/7", 2).knot_count == 3


def test_psi_examples():
    assert psi_family("3/5", "1/3", 2).phases == (F(1, 3), F(2, 3))
    assert psi_family("3/5", 6, 2).phases == (F(0),)
    assert psi_family("3/5", "2/7", 2).phases == (F(2, 7), F(4, 7), F(1, 7))


@given(rats, rats, st.sampled_from([2, 3, 5]))
def test_affine_matches_brute_force(a, q, p):
    if gcd(a.denominator, p) != 1 or gcd(q.denominator, p) != 1:
        return
    pred = predict_affine(a, q, p)
    classes = brute_cables(a, q, p)
    assert pred.knot_count == len(classes) == mult_ord(pred.m, p)
    assert len({canonical_intercept(e, a) for e in pred.intercepts}) == pred.knot_count
    for e in pred.intercepts:
        assert e in pred.full_offsets
    for cls in classes:
        assert sum(same_cable(e, cls[0], a) for e in pred.intercepts) == 1
    assert len(psi_family(a, q, p).phases) == pred.knot_count


@given(rats, rats, st.integers(-5, 5))
def test_consistency_laws(a, q, n):
    p = 2
    if a.denominator % 2 == 0 or q.denominator % 2 == 0:
        return
    assert predict_affine(a, q + n, p) == predict_affine(a, q, p)
    assert predict_affine(a, 0, p) == predict_linear(a, p)
    const = predict_const(q, p)
    flat = predict_affine(0, q, p)
    assert flat.slope.num == 0 and set(flat.intercepts) == set(const.intercepts)


def test_cable_segments_cover_unit_square():
    segs = cable_segments(F(3, 5), F(1, 15))
    assert len(segs) == 5 + 3
    for x0, y0, x1, y1 in segs:
        assert 0 <= x0 < x1 <= 1 and 0 <= min(y0, y1) and max(y0, y1) <= 1
        assert (y1 - y0) == F(3, 5) * (x1 - x0)
    assert sum(x1 - x0 for x0, _, x1, _ in segs) == 5
