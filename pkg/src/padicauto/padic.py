"""Exact arithmetic on p-adic rational integers (elements of Z_p ∩ Q).

Digit words are lists of ints in ``range(p)``.  Everywhere in this module a
digit word is *least significant first* (index 0 holds digit δ_0), matching
the left-infinite words ``...δ_2 δ_1 δ_0`` of a canonical p-adic expansion.
The single exception is :func:`mod1_expansion`, which returns the real base-p
expansion of ``z mod 1`` and is therefore *most significant first*.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Union

RationalLike = Union["PAdicRational", Fraction, int, str]

_RATIONAL_RE = re.compile(r"^([+-]?\d+)(?:/(\d+))?$")


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def parse_fraction(text: str) -> Fraction:
    """Parse ``"[sign]digits[/digits]"`` strictly; whitespace is not allowed."""
    m = _RATIONAL_RE.match(text.strip())
    if m is None:
        raise ValueError(f"not a rational: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"zero denominator: {text!r}")
    return Fraction(num, den)


def format_fraction(q: Fraction | int) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class PAdicRational:
    """An element of Z_p ∩ Q stored as a reduced fraction ``num/den``.

    The denominator is always coprime to ``prime``; zero is ``0/1``.
    """

    num: int
    den: int
    prime: int

    def __post_init__(self) -> None:
        if self.prime < 2:
            raise ValueError(f"prime must be >= 2, got {self.prime}")
        if self.den < 1:
            raise ValueError("denominator must be positive")
        if gcd(self.num, self.den) != 1:
            raise ValueError(f"{self.num}/{self.den} is not reduced")
        if gcd(self.den, self.prime) != 1:
            raise ValueError(
                f"{self.num}/{self.den} is not a {self.prime}-adic integer "
                "(denominator shares a factor with p)"
            )

    @classmethod
    def of(cls, value: RationalLike, prime: int) -> "PAdicRational":
        if isinstance(value, PAdicRational):
            if value.prime != prime:
                raise ValueError(f"prime mismatch: {value.prime} != {prime}")
            return value
        if isinstance(value, str):
            value = parse_fraction(value)
        q = Fraction(value)
        return cls(q.numerator, q.denominator, prime)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.num, self.den)

    def is_integer(self) -> bool:
        return self.den == 1

    def residue(self, k: int) -> int:
        """``self mod p^k`` as an integer in ``[0, p^k)``."""
        modulus = self.prime**k
        if modulus == 1:
            return 0
        return self.num * pow(self.den, -1, modulus) % modulus

    def mod1(self) -> "PAdicRational":
        """The real fractional part ``self mod 1``, still an element of Z_p ∩ Q."""
        return PAdicRational.of(self.fraction - (self.num // self.den), self.prime)

    def __add__(self, other: RationalLike) -> "PAdicRational":
        return PAdicRational.of(self.fraction + _as_fraction(other), self.prime)

    def __sub__(self, other: RationalLike) -> "PAdicRational":
        return PAdicRational.of(self.fraction - _as_fraction(other), self.prime)

    def __mul__(self, other: RationalLike) -> "PAdicRational":
        return PAdicRational.of(self.fraction * _as_fraction(other), self.prime)

    def __neg__(self) -> "PAdicRational":
        return PAdicRational(-self.num, self.den, self.prime)

    def __str__(self) -> str:
        return format_fraction(self.fraction)


def _as_fraction(value: RationalLike) -> Fraction:
    if isinstance(value, PAdicRational):
        return value.fraction
    if isinstance(value, str):
        return parse_fraction(value)
    return Fraction(value)


@dataclass(frozen=True)
class PeriodForm:
    """Shortest pre-period and period of a canonical expansion, both LSB-first."""

    preperiod: tuple[int, ...]
    period: tuple[int, ...]

    def digit(self, i: int) -> int:
        r = len(self.preperiod)
        if i < r:
            return self.preperiod[i]
        return self.period[(i - r) % len(self.period)]


@dataclass(frozen=True)
class CanonicalCD:
    """``z = c + d/(p^t - 1)`` with ``0 <= d <= p^t - 2``."""

    c: int
    d: int
    t: int

    def value(self, prime: int) -> Fraction:
        return self.c + Fraction(self.d, prime**self.t - 1)


@dataclass(frozen=True)
class CSet:
    """The finite cluster-point set C(q) of the sequence ((-p^l q) mod 1)."""

    elements: frozenset[Fraction]
    source: PAdicRational

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(sorted(self.elements))

    def __contains__(self, x: object) -> bool:
        return x in self.elements


def digits(z: PAdicRational, n: int) -> list[int]:
    """First ``n`` canonical digits of ``z`` (least significant first)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    x = z.residue(n)
    p = z.prime
    out = []
    for _ in range(n):
        x, d = divmod(x, p)
        out.append(d)
    return out


def from_digits(word, prime: int) -> int:
    """``nm(word)`` for an LSB-first digit word."""
    value = 0
    for d in reversed(list(word)):
        value = value * prime + d
    return value


def to_digits(value: int, prime: int, k: int) -> list[int]:
    """``wrd_k(value mod p^k)``: the k-digit LSB-first word of a residue."""
    value %= prime**k
    out = []
    for _ in range(k):
        value, d = divmod(value, prime)
        out.append(d)
    return out


def period_form(z: PAdicRational) -> PeriodForm:
    p, b = z.prime, z.den
    binv = pow(b, -1, p)
    # Long division state: the tail after i digits equals a_i / b.
    seen: dict[int, int] = {}
    states: list[int] = []
    word: list[int] = []
    a = z.num
    while a not in seen:
        seen[a] = len(states)
        states.append(a)
        d = a * binv % p
        word.append(d)
        a = (a - d * b) // p
    start = seen[a]
    pre, per = word[:start], word[start:]
    per = _primitive_root_word(per)
    # Shrink the pre-period while its last digit continues the period backwards.
    while pre and pre[-1] == per[-1]:
        pre.pop()
        per = [per[-1]] + per[:-1]
    return PeriodForm(tuple(pre), tuple(per))


def _primitive_root_word(word: list[int]) -> list[int]:
    t = len(word)
    for d in range(1, t + 1):
        if t % d == 0 and word == word[:d] * (t // d):
            return word[:d]
    return word


def mult_ord(b: int, prime: int) -> int:
    """Multiplicative order of ``prime`` modulo ``b`` (1 when ``b == 1``)."""
    if b < 1:
        raise ValueError("b must be positive")
    if gcd(b, prime) != 1:
        raise ValueError(f"{b} is not coprime to {prime}")
    if b == 1:
        return 1
    x, ell = prime % b, 1
    while x != 1:
        x = x * prime % b
        ell += 1
    return ell


def crep(z: PAdicRational) -> CanonicalCD:
    p = z.prime
    t = len(period_form(z).period)
    modulus = p**t - 1
    scaled = z.fraction * modulus
    if scaled.denominator != 1:
        raise AssertionError("period length does not clear the denominator")
    c, d = divmod(scaled.numerator, modulus)
    return CanonicalCD(c=c, d=d, t=t)


def cset(q: PAdicRational) -> CSet:
    p = q.prime
    t = mult_ord(q.den, p)
    elements = frozenset((-(p**ell) * q.fraction) % 1 for ell in range(t))
    return CSet(elements=elements, source=q)


def mod1_expansion(z: PAdicRational) -> list[int]:
    """Purely periodic block ``w`` with ``z mod 1 = 0.(w)^∞`` (MSB first)."""
    cd = crep(z)
    return list(reversed(to_digits(cd.d, z.prime, cd.t)))


def padic_valuation(x: Fraction | int, prime: int) -> int | None:
    """``ord_p(x)``; ``None`` stands for +∞ (x == 0)."""
    x = Fraction(x)
    if x == 0:
        return None
    v = 0
    num, den = x.numerator, x.denominator
    while num % prime == 0:
        num //= prime
        v += 1
    while den % prime == 0:
        den //= prime
        v -= 1
    return v


def residue_of(x: Fraction | int, prime: int, k: int) -> int:
    """``x mod p^k`` for a rational with p-free denominator."""
    x = Fraction(x)
    modulus = prime**k
    if modulus == 1:
        return 0
    return x.numerator * pow(x.denominator, -1, modulus) % modulus
