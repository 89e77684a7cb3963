"""Closed-form limit plots of constant, linear and affine maps.

On the unit torus the line y = s x + e (s = u/v reduced) closes up after
winding v times in x and u times in y.  Two such lines with the same slope
coincide exactly when their intercepts differ by a multiple of 1/v, which is
the cable identity used throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import floor, gcd

from .padic import CSet, PAdicRational, RationalLike, cset, mult_ord


@dataclass(frozen=True)
class LinkPrediction:
    slope: PAdicRational
    intercepts: tuple[Fraction, ...]
    knot_count: int
    full_offsets: CSet
    m: int

    @property
    def winding(self) -> tuple[int, int]:
        """(numerator, denominator) of the slope: turns in y and in x."""
        return self.slope.num, self.slope.den

    @property
    def is_parallels(self) -> bool:
        return self.slope.num == 0


@dataclass(frozen=True)
class PsiFamily:
    A: PAdicRational
    phases: tuple[Fraction, ...]


def same_cable(e1: Fraction, e2: Fraction, slope: Fraction) -> bool:
    """Whether y = s x + e1 and y = s x + e2 are the same closed curve on the torus."""
    return ((Fraction(e1) - Fraction(e2)) * Fraction(slope).denominator).denominator == 1


def canonical_intercept(e: Fraction, slope: Fraction) -> Fraction:
    """Representative of the cable's intercept class in [0, 1/v)."""
    v = Fraction(slope).denominator
    return (Fraction(e) * v % 1) / v


def predict_affine(a: RationalLike, q: RationalLike, prime: int | None = None) -> LinkPrediction:
    if prime is None:
        prime = a.prime if isinstance(a, PAdicRational) else q.prime
    a = PAdicRational.of(a, prime)
    q = PAdicRational.of(q, prime)
    b, b2 = a.den, q.den
    m = b2 // gcd(b, b2)
    knots = mult_ord(m, prime)
    offsets = cset(q.mod1())
    intercepts = tuple((-(prime**r) * q.fraction) % 1 for r in range(knots))
    return LinkPrediction(a, intercepts, knots, offsets, m)


def predict_linear(c: RationalLike, prime: int | None = None) -> LinkPrediction:
    if prime is None:
        prime = c.prime
    return predict_affine(c, 0, prime)


def predict_const(q: RationalLike, prime: int | None = None) -> LinkPrediction:
    """Horizontal parallels, one per element of C(q)."""
    if prime is None:
        prime = q.prime
    q = PAdicRational.of(q, prime)
    offsets = cset(q.mod1())
    heights = tuple(sorted(offsets.elements))
    return LinkPrediction(PAdicRational(0, 1, prime), heights, len(heights), offsets, q.den)


def psi_family(a: RationalLike, q: RationalLike, prime: int | None = None) -> PsiFamily:
    pred = predict_affine(a, q, prime)
    p = pred.slope.prime
    qf = PAdicRational.of(q, p).fraction
    phases = tuple((p**k * qf) % 1 for k in range(pred.knot_count))
    return PsiFamily(pred.slope, phases)


def cable_segments(slope: Fraction, intercept: Fraction) -> list[tuple[Fraction, Fraction, Fraction, Fraction]]:
    """The cable through (0, intercept) as straight pieces inside the unit square.

    Each piece is (x0, y0, x1, y1) with exact endpoints; together they trace
    y = s x + e mod 1 for x over v unit periods, folded back into [0,1).
    """
    s = Fraction(slope)
    v = s.denominator
    segs = []
    for i in range(v):
        e = (Fraction(intercept) + s * i) % 1
        if s == 0:
            segs.append((Fraction(0), e, Fraction(1), e))
            continue
        # breakpoints where s x + e crosses an integer, x in (0, 1)
        xs = {Fraction(0), Fraction(1)}
        lo, hi = sorted((e, s + e))
        for n in range(floor(lo) + 1, floor(hi) + 1):
            x = (n - e) / s
            if 0 < x < 1:
                xs.add(x)
        pts = sorted(xs)
        for x0, x1 in zip(pts, pts[1:]):
            mid = (x0 + x1) / 2
            shift = floor(s * mid + e)
            segs.append((x0, s * x0 + e - shift, x1, s * x1 + e - shift))
    return segs
