"""Finite automata for affine maps z -> a z + b on Z_p ∩ Q.

Write a = alpha/beta and b = gamma/beta over a common denominator.  Reading
input digit x with carry r, the machine emits the unique y with
beta*y ≡ alpha*x + r (mod p) and moves to carry (alpha*x + r - beta*y)/p.
Starting from r_0 = gamma this keeps
    beta * nm(out_k) + r_k * p^k = alpha * nm(in_k) + gamma
after every k digits, and the reachable carries stay bounded, so the carry
graph is finite.  This is the usual schoolbook carry construction.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Sequence

import numpy as np

from ._rng import SplitMix64
from .padic import PAdicRational, RationalLike, from_digits
from .transducer import Transducer, run1


@dataclass(frozen=True)
class AffineParams:
    alpha: int
    gamma: int
    beta: int
    prime: int

    @classmethod
    def of(cls, a: RationalLike, b: RationalLike, prime: int) -> "AffineParams":
        a = PAdicRational.of(a, prime)
        b = PAdicRational.of(b, prime)
        beta = lcm(a.den, b.den)
        return cls(a.num * (beta // a.den), b.num * (beta // b.den), beta, prime)

    @property
    def a(self) -> Fraction:
        return Fraction(self.alpha, self.beta)

    @property
    def b(self) -> Fraction:
        return Fraction(self.gamma, self.beta)

    def carry_bound(self) -> int:
        return 4 * (abs(self.alpha) + abs(self.gamma) + self.beta)


def synth_affine(a: RationalLike, b: RationalLike, prime: int | None = None) -> Transducer:
    """The carry automaton for z -> a z + b.  States are numbered in BFS order."""
    if prime is None:
        if isinstance(a, PAdicRational):
            prime = a.prime
        elif isinstance(b, PAdicRational):
            prime = b.prime
        else:
            raise ValueError("prime not given")
    params = AffineParams.of(a, b, prime)
    return synth_from_params(params)


def synth_from_params(params: AffineParams) -> Transducer:
    p, alpha, beta = params.prime, params.alpha, params.beta
    binv = pow(beta, -1, p)
    bound = params.carry_bound()
    index = {params.gamma: 0}
    carries = [params.gamma]
    queue = deque([params.gamma])
    delta_rows, lam_rows = [], []
    while queue:
        r = queue.popleft()
        drow, lrow = [], []
        for x in range(p):
            acc = alpha * x + r
            y = acc * binv % p
            r2 = (acc - beta * y) // p
            if abs(r2) > bound:
                raise AssertionError(f"carry {r2} escaped the bound {bound} for {params}")
            if r2 not in index:
                index[r2] = len(carries)
                carries.append(r2)
                queue.append(r2)
            drow.append(index[r2])
            lrow.append(y)
        delta_rows.append(drow)
        lam_rows.append(lrow)
    return Transducer(p, 1, 1, delta_rows, lam_rows, 0)


def affine_eval_mod(a: RationalLike, b: RationalLike, zdigits: Sequence[int], prime: int | None = None) -> int:
    """(alpha*X + gamma) * beta^{-1} mod p^k for X = nm(zdigits)."""
    if prime is None:
        prime = a.prime if isinstance(a, PAdicRational) else b.prime
    params = AffineParams.of(a, b, prime)
    k = len(zdigits)
    modulus = prime**k
    if modulus == 1:
        return 0
    X = from_digits(zdigits, prime)
    return (params.alpha * X + params.gamma) * pow(params.beta, -1, modulus) % modulus


def affine_eval_batch(params: AffineParams, X, k: int) -> np.ndarray:
    """Vectorised :func:`affine_eval_mod` over an integer array (p^k < 2^31)."""
    modulus = params.prime**k
    if modulus >= 1 << 31:
        raise ValueError("modulus too large for the vectorised oracle")
    X = np.asarray(X, dtype=np.int64)
    binv = pow(params.beta, -1, modulus) if modulus > 1 else 0
    t = (params.alpha % modulus * X + params.gamma % modulus) % modulus
    return t * binv % modulus


@dataclass(frozen=True)
class LipschitzReport:
    passed: bool
    trials: int
    counterexample: tuple | None = None


def lipschitz_check(T: Transducer, trials: int = 1000, seed: int = 0, k: int = 16,
                    word_map=None) -> LipschitzReport:
    """Sample word pairs sharing a prefix and check the outputs share it too.

    Every complete Mealy machine passes; ``word_map`` replaces the machine by
    an arbitrary word function so the harness itself can be tested.
    """
    if T.in_arity != 1 or T.out_arity != 1:
        raise ValueError("single-input single-output machine required")
    apply = word_map if word_map is not None else (lambda w: run1(T, w))
    rng = SplitMix64(seed)
    p = T.prime
    for _ in range(trials):
        j = rng.below(k + 1)
        u = rng.choice_digits(k, p)
        v = u[:j] + rng.choice_digits(k - j, p)
        if j < k and v[j] == u[j]:
            v[j] = (u[j] + 1 + rng.below(p - 1)) % p
        fu, fv = apply(u), apply(v)
        if fu[:j] != fv[:j]:
            return LipschitzReport(False, trials, (u, v, j))
    return LipschitzReport(True, trials, None)
