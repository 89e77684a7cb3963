"""Van der Put coefficients of 1-Lipschitz functions on Z_p.

For m >= p with n = floor(log_p m) + 1 digits and leading digit c,
    B_m = f(m) - f(m - c p^(n-1)),    b_m = B_m / p^(n-1),
and B_m = b_m = f(m) for m < p.  The series sum_m B_m chi(m, z), where
chi(m, z) = 1 iff z ≡ m (mod p^n), recovers f.

Three oracle kinds are accepted:

* FunctionOracle: exact values f(m) on natural numbers (Fractions or ints);
* TransducerOracle: a finite machine, evaluated exactly by running m and then
  an all-zero tail, whose output is eventually periodic;
* DigitOracle: f given only modulo p^k on k-digit words, so B_m and b_m are
  known only modulo a power of p.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .padic import residue_of, to_digits
from .transducer import Transducer, prefix_levels, run_batch


def n_digits(m: int, prime: int) -> int:
    """floor(log_p m) + 1, with 0 counted as one digit."""
    n = 1
    while m >= prime:
        m //= prime
        n += 1
    return n


@dataclass(frozen=True)
class VdpCoefficient:
    """(m, B_m, b_m).

    When ``precision`` is None, B and b are exact rationals.  Otherwise B is
    the residue of B_m mod p^precision and b the residue of b_m modulo
    p^(precision - n + 1); b is None when B_m is not divisible by p^(n-1) at
    that precision.
    """

    m: int
    B: Fraction | int
    b: Fraction | int | None
    precision: int | None = None


class FunctionOracle:
    """Exact values on natural numbers.  ``batch`` may evaluate int64 arrays."""

    exact = True

    def __init__(self, fn: Callable[[int], Fraction | int], prime: int,
                 batch: Callable[[np.ndarray], np.ndarray] | None = None):
        self.fn = fn
        self.prime = prime
        self.batch = batch

    def __call__(self, m: int) -> Fraction:
        return Fraction(self.fn(m))


class DigitOracle:
    """f known only as a map from k-digit words to residues mod p^k."""

    exact = False

    def __init__(self, fn: Callable[[Sequence[int]], int], prime: int):
        self.fn = fn
        self.prime = prime

    def residue(self, m: int, K: int) -> int:
        return self.fn(to_digits(m, self.prime, K)) % self.prime**K


class TransducerOracle:
    """A single-input single-output machine as an exact oracle."""

    exact = True

    def __init__(self, T: Transducer):
        if T.in_arity != 1 or T.out_arity != 1:
            raise ValueError("single-input single-output machine required")
        self.T = T
        self.prime = T.prime
        self.tail = zero_tail_values(T)

    def __call__(self, m: int) -> Fraction:
        p, T = self.prime, self.T
        n = n_digits(m, p)
        s, value, weight = T.initial, 0, 1
        for d in to_digits(m, p, n):
            value += int(T.lam[s, d]) * weight
            s = int(T.delta[s, d])
            weight *= p
        return value + weight * self.tail[s]

    def residue(self, m: int, K: int) -> int:
        (Y,) = run_batch(self.T, np.array([m], dtype=np.int64), K) if self.prime**K < 1 << 62 else (None,)
        if Y is not None:
            return int(Y[0])
        p, T = self.prime, self.T
        s, value, weight = T.initial, 0, 1
        for d in to_digits(m, p, K):
            value += int(T.lam[s, d]) * weight
            s = int(T.delta[s, d])
            weight *= p
        return value


def zero_tail_values(T: Transducer) -> list[Fraction]:
    """G(s): the p-adic number T writes from state s on the all-zero input.

    G(s) = lam(s,0) + p G(delta(s,0)); on a zero-input cycle of length L the
    output is purely periodic, G = sum lam_i p^i / (1 - p^L).
    """
    p = T.prime
    succ = T.delta[:, 0].tolist()
    out = T.lam[:, 0].tolist()
    G: list[Fraction | None] = [None] * T.n_states
    for start in range(T.n_states):
        path: list[int] = []
        pos: dict[int, int] = {}
        s = start
        while G[s] is None and s not in pos:
            pos[s] = len(path)
            path.append(s)
            s = succ[s]
        if G[s] is None:
            cycle = path[pos[s]:]
            L = len(cycle)
            total = sum(out[c] * p**i for i, c in enumerate(cycle))
            value = Fraction(total, 1 - p**L)
            for i, c in enumerate(cycle):
                G[c] = value
                value = (value - out[c]) / p
            path = path[:pos[s]]
        for c in reversed(path):
            G[c] = out[c] + p * G[succ[c]]
    return G  # type: ignore[return-value]


def _exact_function_coeffs(oracle: FunctionOracle, m_max: int) -> list[VdpCoefficient]:
    p = oracle.prime
    out = []
    for m in range(m_max):
        n = n_digits(m, p)
        if m < p:
            B = oracle(m)
            out.append(VdpCoefficient(m, B, B))
            continue
        top = p ** (n - 1)
        B = oracle(m) - oracle(m % top)
        out.append(VdpCoefficient(m, B, B / top))
    return out


def _transducer_b_keys(T: Transducer, count: int) -> np.ndarray:
    """Integer keys determining b_m for m < count.

    For m = c p^(n-1) + m' with leading digit c, the words of m and m' agree
    below digit n-1, so both runs sit in the same state P after n-1 digits.
    With o = output digit n-1 and S_n the state after n digits,
        b_m = (o_m - o_m') + p (G(S_n(m)) - G(S_n(m'))),
    where o_m = lam(P, c), o_m' = lam(P, 0) and S_n = delta(P, c), delta(P, 0).
    For m < p, b_m = f(m) = lam(s0, m) + p G(delta(s0, m)).  The key packs
    (kind, o_m - o_m', S_n(m), S_n(m')) into one integer, kind 0 for m < p.
    """
    if T.in_arity != 1 or T.out_arity != 1:
        raise ValueError("single-input single-output machine required")
    p, S = T.prime, T.n_states
    keys = np.zeros(count, dtype=np.int64)
    first = np.arange(min(p, count))
    s0 = T.initial
    keys[: len(first)] = _pack(0, T.lam[s0, first] + p, T.delta[s0, first], 0, p, S)
    # key of a block with leading digit c, as a function of the shared state P
    table = [_pack(1, T.lam[:, c] - T.lam[:, 0] + p, T.delta[:, c], T.delta[:, 0], p, S)
             for c in range(p)]
    columns = [np.ascontiguousarray(T.delta[:, d]) for d in range(p)]
    P = np.full(1, s0, dtype=np.int64)
    top = 1
    while top * p < count:
        P = np.concatenate([col[P] for col in columns])
        top *= p
        for c in range(1, p):
            lo = c * top
            if lo >= count:
                break
            hi = min(lo + top, count)
            keys[lo:hi] = table[c][P[: hi - lo]]
    return keys


def _pack(kind, do, s, sp, p, S):
    return ((kind * 2 * p + do) * S + s) * S + sp


def _unpack(key: int, p: int, S: int) -> tuple[int, int, int, int]:
    key, sp = divmod(key, S)
    key, s = divmod(key, S)
    kind, do = divmod(key, 2 * p)
    return kind, do - p, s, sp


def _key_value(key: int, G, p: int, S: int) -> Fraction:
    kind, do, s, sp = _unpack(key, p, S)
    if kind == 0:
        return do + p * G[s]
    return do + p * (G[s] - G[sp])


def transducer_b_sequence(T: Transducer, count: int) -> tuple[np.ndarray, list[Fraction]]:
    """b_m for m < count as (ids, values): b_m = values[ids[m]].  Exact.

    Value ids are numbered in order of first occurrence.
    """
    if (2 * T.prime) * T.n_states**2 * 2 >= 1 << 62:
        raise ValueError("machine too large for packed coefficient keys")
    keys = _transducer_b_keys(T, count)
    present = np.bincount(keys, minlength=1)
    seen = np.flatnonzero(present)
    # value ids follow first occurrence in m
    order = np.full(len(present), -1, dtype=np.int64)
    first_pos = np.full(len(present), count, dtype=np.int64)
    np.minimum.at(first_pos, keys, np.arange(count, dtype=np.int64))
    G = zero_tail_values(T)
    value_id: dict[Fraction, int] = {}
    values: list[Fraction] = []
    for key in sorted(seen.tolist(), key=lambda k_: first_pos[k_]):
        v = _key_value(key, G, T.prime, T.n_states)
        if v not in value_id:
            value_id[v] = len(values)
            values.append(v)
        order[key] = value_id[v]
    return order[keys], values


def vdp_coeffs(oracle, m_max: int, K: int = 64) -> list[VdpCoefficient]:
    """Coefficients for 0 <= m < m_max.

    Exact oracles give exact B_m, b_m.  A DigitOracle (or ``exact=False`` use
    of a TransducerOracle through :func:`vdp_coeffs_mod`) works mod p^K.
    """
    if isinstance(oracle, Transducer):
        oracle = TransducerOracle(oracle)
    if isinstance(oracle, TransducerOracle):
        T, p = oracle.T, oracle.prime
        ids, values = transducer_b_sequence(T, m_max)
        out = []
        for m in range(m_max):
            b = values[ids[m]]
            top = p ** (n_digits(m, p) - 1)
            out.append(VdpCoefficient(m, b * top, b))
        return out
    if isinstance(oracle, FunctionOracle):
        return _exact_function_coeffs(oracle, m_max)
    return vdp_coeffs_mod(oracle, m_max, K)


def vdp_coeffs_mod(oracle, m_max: int, K: int = 64) -> list[VdpCoefficient]:
    """B_m mod p^K from K-digit evaluations; b_m where p^(n-1) divides B_m."""
    p = oracle.prime
    modulus = p**K
    out = []
    for m in range(m_max):
        n = n_digits(m, p)
        if m < p:
            B = oracle.residue(m, K)
            out.append(VdpCoefficient(m, B, B, K))
            continue
        top = p ** (n - 1)
        B = (oracle.residue(m, K) - oracle.residue(m % top, K)) % modulus
        if n - 1 >= K:
            b = None
        elif B % top:
            b = None
        else:
            b = B // top % p ** (K - n + 1)
        out.append(VdpCoefficient(m, B, b, K))
    return out


def reconstruct(coeffs: Sequence[VdpCoefficient], zdigits: Sequence[int], prime: int) -> int:
    """sum_m B_m chi(m, z) mod p^k for the k-digit word z.

    Only m = z mod p^j with exactly j digits (and m = z mod p) can have
    chi(m, z) = 1 and B_m nonzero mod p^k, so the sum has at most k terms.
    """
    k = len(zdigits)
    modulus = prime**k
    if modulus == 1:
        return 0
    if len(coeffs) < modulus:
        raise ValueError(f"need coefficients for m < {modulus}, have {len(coeffs)}")
    total = 0
    m, weight = 0, 1
    for j, d in enumerate(zdigits, start=1):
        m += d * weight
        weight *= prime
        if j == 1 or d != 0:
            c = coeffs[m]
            if c.m != m:
                raise ValueError("coefficient list is not indexed by m")
            if c.precision is None:
                total += residue_of(c.B, prime, k)
            else:
                if c.precision < k:
                    raise ValueError(f"coefficient precision {c.precision} below k={k}")
                total += c.B
    return total % modulus


@dataclass(frozen=True)
class CoeffSetReport:
    values: frozenset
    growth: tuple[tuple[int, int], ...]
    finite: bool
    exact: bool

    @property
    def size(self) -> int:
        return len(self.values)


def _growth(ids: np.ndarray, prime: int, count: int) -> tuple[tuple[int, int], ...]:
    rows = []
    j = 1
    while prime ** (j - 1) < count:
        upto = min(prime**j, count)
        rows.append((j, int(len(np.unique(ids[:upto])))))
        j += 1
    return tuple(rows)


def coeffset_probe(oracle, M: int, K: int = 64, stable_levels: int = 3) -> CoeffSetReport:
    """Distinct b_m for m < M and the growth curve |{b_m : m < p^j}|.

    ``finite`` means the curve stopped growing over its last ``stable_levels``
    levels: verified to that depth only.
    """
    if isinstance(oracle, Transducer):
        oracle = TransducerOracle(oracle)
    p = oracle.prime
    if isinstance(oracle, TransducerOracle):
        ids, values = transducer_b_sequence(oracle.T, M)
        vals = frozenset(values[i] for i in set(ids.tolist()))
        exact = True
    else:
        ids, values, exact = coefficient_ids(oracle, M, K)
        vals = frozenset(values)
    growth = _growth(ids, p, M)
    tail = [c for _, c in growth[-stable_levels:]]
    finite = len(growth) >= stable_levels and len(set(tail)) == 1
    return CoeffSetReport(vals, growth, finite, exact)


def coefficient_ids(oracle, count: int, K: int = 64) -> tuple[np.ndarray, list, bool]:
    """b_m for m < count encoded as ids into a list of distinct values."""
    if isinstance(oracle, Transducer):
        oracle = TransducerOracle(oracle)
    if isinstance(oracle, TransducerOracle):
        ids, values = transducer_b_sequence(oracle.T, count)
        return ids, values, True
    if isinstance(oracle, FunctionOracle) and oracle.batch is not None:
        b = function_b_batch(oracle, count)
        uniq, first, inverse = np.unique(b, return_index=True, return_inverse=True)
        order = np.argsort(first, kind="stable")
        rank = np.empty_like(order)
        rank[order] = np.arange(len(order))
        return rank[inverse.reshape(-1)], [int(uniq[i]) for i in order], True
    coeffs = vdp_coeffs(oracle, count, K)
    table: dict = {}
    values: list = []
    ids = np.zeros(count, dtype=np.int64)
    for c in coeffs:
        if c.b not in table:
            table[c.b] = len(values)
            values.append(c.b)
        ids[c.m] = table[c.b]
    return ids, values, oracle.exact


def function_b_batch(oracle: FunctionOracle, count: int) -> np.ndarray:
    """b_m for m < count from an integer-valued batch oracle, in int64."""
    p = oracle.prime
    m = np.arange(count, dtype=np.int64)
    top = np.ones(count, dtype=np.int64)
    power = p
    while power < count:
        top[power:] = power
        power *= p
    f = oracle.batch(m)
    fp = oracle.batch(m % top)
    B = np.where(m < p, f, f - fp)
    if np.any(B % top):
        raise ValueError("oracle is not 1-Lipschitz on these inputs")
    return B // top


def identity_oracle(prime: int) -> FunctionOracle:
    return FunctionOracle(lambda m: m, prime, batch=lambda a: a)


def constant_oracle(c, prime: int) -> FunctionOracle:
    c = Fraction(c)
    return FunctionOracle(lambda m: c, prime)


def squaring_oracle(prime: int) -> FunctionOracle:
    return FunctionOracle(lambda m: m * m, prime, batch=lambda a: a * a)


def affine_oracle(a, b, prime: int) -> FunctionOracle:
    a, b = Fraction(a), Fraction(b)
    return FunctionOracle(lambda m: a * m + b, prime)


def closed_form_affine_b(a, q, m: int, prime: int) -> Fraction:
    """b_m of z -> a z + q: q, a m + q below p, else a times the leading digit."""
    a, q = Fraction(a), Fraction(q)
    if m < prime:
        return a * m + q
    return a * (m // prime ** (n_digits(m, prime) - 1))


def closed_form_square_b(m: int, prime: int) -> int:
    """b_m of z -> z^2: 2 c m - c^2 p^(n-1), c the leading digit."""
    if m < prime:
        return m * m
    top = prime ** (n_digits(m, prime) - 1)
    c = m // top
    return 2 * c * m - c * c * top


@dataclass(frozen=True)
class KernelReport:
    status: str
    n_classes: int
    depth_j: int
    prefix_len: int
    classes: tuple[tuple[int, int], ...]
    alphabet_overflow: bool = False

    @property
    def finite(self) -> bool:
        return self.status == "finite"


def kernel_probe(seq, prime: int, J: int = 6, L: int = 1024,
                 max_alphabet: int | None = 256) -> KernelReport:
    """Bounded search for the p-kernel of ``seq``.

    Subsequences (seq[t + i p^j])_{i<L} for 0 <= t < p^j are compared by their
    full length-L prefix.  Classes are collected breadth first down to depth
    J; the result is "finite" when every child (j+1, t + d p^j) of every class
    repeats a known prefix, and "undecided" when a new prefix still appears at
    depth J+1 or the alphabet exceeds ``max_alphabet``.
    """
    if J < 1:
        raise ValueError("J must be >= 1")
    if L < prime**J:
        raise ValueError("L must be at least p^J")
    need = prime ** (J + 1) * L
    arr = np.asarray(seq)
    if len(arr) < need:
        raise ValueError(f"sequence too short: need {need} terms, have {len(arr)}")
    arr = arr[:need]
    if arr.dtype.kind not in "iu":
        _, arr = np.unique(arr, return_inverse=True)
    arr = np.ascontiguousarray(arr, dtype=np.int64).reshape(-1)
    overflow = max_alphabet is not None and len(np.unique(arr)) > max_alphabet

    def sig(j: int, t: int) -> bytes:
        return arr[t::prime**j][:L].tobytes()

    known = {sig(0, 0): (0, 0)}
    classes = [(0, 0)]
    frontier = [(0, 0)]
    closed = True
    while frontier and closed:
        nxt = []
        for j, t in frontier:
            for d in range(prime):
                child = (j + 1, t + d * prime**j)
                s = sig(*child)
                if s in known:
                    continue
                if child[0] > J:
                    closed = False
                    break
                known[s] = child
                classes.append(child)
                nxt.append(child)
            if not closed:
                break
        frontier = nxt
    status = "finite" if closed and not overflow else "undecided"
    return KernelReport(status, len(classes), J, L, tuple(classes), overflow)
