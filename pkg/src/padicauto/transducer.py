"""Complete deterministic letter-to-letter transducers over {0..p-1}.

A machine with m inputs and n outputs reads one m-tuple of digits per step and
writes one n-tuple.  Internally a tuple (d_1, ..., d_m) is packed into the
letter code d_1 + d_2 p + ... + d_m p^(m-1), and the transition and output maps
are dense integer tables indexed by (state, letter).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import product
from typing import Callable, Sequence

import numpy as np

from ._rng import SplitMix64

Word = Sequence[int]


def encode_letter(digits: Sequence[int], prime: int) -> int:
    code = 0
    for d in reversed(digits):
        code = code * prime + d
    return code


def decode_letter(code: int, prime: int, arity: int) -> tuple[int, ...]:
    out = []
    for _ in range(arity):
        code, d = divmod(code, prime)
        out.append(d)
    return tuple(out)


class Transducer:
    """A complete deterministic Mealy machine with an initial state.

    ``delta[s, x]`` is the next state and ``lam[s, x]`` the packed output letter
    for state ``s`` and packed input letter ``x``.  Both tables are read-only.
    """

    def __init__(self, prime: int, in_arity: int, out_arity: int, delta, lam, initial: int = 0):
        if prime < 2:
            raise ValueError("prime must be >= 2")
        if in_arity < 1 or out_arity < 1:
            raise ValueError("arities must be >= 1")
        delta = np.array(delta, dtype=np.int64, copy=True)
        lam = np.array(lam, dtype=np.int64, copy=True)
        letters = prime**in_arity
        if delta.ndim != 2 or delta.shape[1] != letters or delta.shape[0] < 1:
            raise ValueError(f"delta must have shape (S, {letters})")
        if lam.shape != delta.shape:
            raise ValueError("lam must have the same shape as delta")
        n_states = delta.shape[0]
        if delta.min() < 0 or delta.max() >= n_states:
            raise ValueError("delta refers to an unknown state")
        if lam.min() < 0 or lam.max() >= prime**out_arity:
            raise ValueError("output letter out of range")
        if not 0 <= initial < n_states:
            raise ValueError(f"unknown initial state {initial}")
        delta.setflags(write=False)
        lam.setflags(write=False)
        self.prime = prime
        self.in_arity = in_arity
        self.out_arity = out_arity
        self.delta = delta
        self.lam = lam
        self.initial = int(initial)

    @property
    def n_states(self) -> int:
        return self.delta.shape[0]

    @property
    def n_letters(self) -> int:
        return self.delta.shape[1]

    def step(self, state: int, letter: Sequence[int]) -> tuple[int, tuple[int, ...]]:
        x = encode_letter(letter, self.prime)
        return int(self.delta[state, x]), decode_letter(int(self.lam[state, x]), self.prime, self.out_arity)

    def successors(self, state: int) -> list[int]:
        return sorted(set(self.delta[state].tolist()))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Transducer):
            return NotImplemented
        return (
            self.prime == other.prime
            and self.in_arity == other.in_arity
            and self.out_arity == other.out_arity
            and self.initial == other.initial
            and np.array_equal(self.delta, other.delta)
            and np.array_equal(self.lam, other.lam)
        )

    def __hash__(self) -> int:
        return hash((self.prime, self.in_arity, self.out_arity, self.initial,
                     self.delta.tobytes(), self.lam.tobytes()))

    def __repr__(self) -> str:
        return (f"Transducer(p={self.prime}, arity={self.in_arity}->{self.out_arity}, "
                f"states={self.n_states}, initial={self.initial})")

    @classmethod
    def from_function(cls, prime: int, in_arity: int, out_arity: int, n_states: int,
                      fn: Callable[[int, tuple[int, ...]], tuple[int, Sequence[int]]],
                      initial: int = 0) -> "Transducer":
        """Build the tables from ``fn(state, input_tuple) -> (next, output_tuple)``."""
        letters = prime**in_arity
        delta = np.zeros((n_states, letters), dtype=np.int64)
        lam = np.zeros((n_states, letters), dtype=np.int64)
        for s in range(n_states):
            for x in range(letters):
                nxt, out = fn(s, decode_letter(x, prime, in_arity))
                delta[s, x] = nxt
                lam[s, x] = encode_letter(out, prime)
        return cls(prime, in_arity, out_arity, delta, lam, initial)


def _check_words(T: Transducer, words: Sequence[Word]) -> int:
    if len(words) != T.in_arity:
        raise ValueError(f"expected {T.in_arity} input words, got {len(words)}")
    lengths = {len(w) for w in words}
    if len(lengths) != 1:
        raise ValueError("input words differ in length")
    for w in words:
        for d in w:
            if not 0 <= d < T.prime:
                raise ValueError(f"digit {d} out of range for p={T.prime}")
    return lengths.pop()


def run(T: Transducer, words: Sequence[Word]) -> tuple[list[int], ...]:
    """Feed m equal-length LSB-first words; return the n output words."""
    k = _check_words(T, words)
    p = T.prime
    outs: list[list[int]] = [[] for _ in range(T.out_arity)]
    s = T.initial
    for i in range(k):
        x = encode_letter([w[i] for w in words], p)
        y = int(T.lam[s, x])
        s = int(T.delta[s, x])
        for j in range(T.out_arity):
            y, d = divmod(y, p)
            outs[j].append(d)
    return tuple(outs)


def run1(T: Transducer, word: Word) -> list[int]:
    """Single-input single-output convenience wrapper around :func:`run`."""
    return run(T, [word])[0]


def run_batch(T: Transducer, inputs, k: int, return_state: bool = False):
    """Vectorised simulation on many inputs at once.

    ``inputs`` is a sequence of m integer arrays (or a single array when m=1)
    holding values in [0, p^k).  Returns a list of n integer arrays, the
    output numbers ``nm(run(T, wrd_k(x)))``.  Requires p^k < 2^62.
    """
    p = T.prime
    if p**k >= 1 << 62:
        raise ValueError("p^k too large for vectorised simulation")
    if T.in_arity == 1 and (isinstance(inputs, (np.ndarray, range))
                            or (len(inputs) > 0 and np.ndim(inputs[0]) == 0)):
        inputs = [inputs]
    xs = [np.array(a, dtype=np.int64) for a in inputs]
    if len(xs) != T.in_arity:
        raise ValueError(f"expected {T.in_arity} input arrays")
    shape = xs[0].shape
    state = np.full(shape, T.initial, dtype=np.int64)
    outs = [np.zeros(shape, dtype=np.int64) for _ in range(T.out_arity)]
    weight = 1
    for _ in range(k):
        letter = np.zeros(shape, dtype=np.int64)
        scale = 1
        for j in range(T.in_arity):
            xs[j], d = np.divmod(xs[j], p)
            letter += d * scale
            scale *= p
        y = T.lam[state, letter]
        state = T.delta[state, letter]
        for j in range(T.out_arity):
            y, d = np.divmod(y, p)
            outs[j] += d * weight
        weight *= p
    if return_state:
        return outs, state
    return outs


def prefix_levels(T: Transducer, kmax: int):
    """Yield (n, Y, S) for n = 0..kmax, where for every X < p^n
    ``Y[X] = nm(run(T, wrd_n(X)))`` and ``S[X]`` is the state reached.

    Level n+1 is built from level n by appending one digit on top, so the
    arrays stay indexed by X without sorting.
    """
    if T.in_arity != 1 or T.out_arity != 1:
        raise ValueError("single-input single-output machine required")
    p = T.prime
    Y = np.zeros(1, dtype=np.int64)
    S = np.full(1, T.initial, dtype=np.int64)
    yield 0, Y, S
    weight = 1
    for n in range(1, kmax + 1):
        Y = np.concatenate([Y + T.lam[S, d] * weight for d in range(p)])
        S = np.concatenate([T.delta[S, d] for d in range(p)])
        weight *= p
        yield n, Y, S


def trim(T: Transducer) -> Transducer:
    """Keep the states reachable from the initial one, renumbered in BFS order.

    Successors are visited in ascending input-letter order, so the numbering is
    canonical for a given behaviour-preserving table layout.
    """
    order = [T.initial]
    index = {T.initial: 0}
    queue = deque([T.initial])
    delta = T.delta
    while queue:
        s = queue.popleft()
        for t in delta[s].tolist():
            if t not in index:
                index[t] = len(order)
                order.append(t)
                queue.append(t)
    remap = np.full(T.n_states, -1, dtype=np.int64)
    for new, old in enumerate(order):
        remap[old] = new
    new_delta = remap[T.delta[order]]
    new_lam = T.lam[order]
    return Transducer(T.prime, T.in_arity, T.out_arity, new_delta, new_lam, 0)


def is_trimmed(T: Transducer) -> bool:
    return trim(T).n_states == T.n_states


def strongly_connected_components(n: int, succ: Sequence[Sequence[int]]) -> list[int]:
    """Iterative Tarjan.  Returns a component id per vertex.

    Component ids are assigned in the order components are completed, which is
    a reverse topological order of the condensation.
    """
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    comp = [-1] * n
    stack: list[int] = []
    counter = 0
    n_comp = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, i = work[-1]
            edges = succ[v]
            if i < len(edges):
                work[-1] = (v, i + 1)
                w = edges[i]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = n_comp
                    if w == v:
                        break
                n_comp += 1
    return comp


@dataclass(frozen=True)
class ComponentReport:
    scc_of: tuple[int, ...]
    ergodic: frozenset[int]
    transient_states: frozenset[int]
    is_minimal: bool

    @property
    def n_components(self) -> int:
        return len(set(self.scc_of))

    def members(self, comp: int) -> list[int]:
        return [s for s, c in enumerate(self.scc_of) if c == comp]

    def ergodic_states(self) -> list[int]:
        return [s for s, c in enumerate(self.scc_of) if c in self.ergodic]


def components(T: Transducer) -> ComponentReport:
    succ = [T.successors(s) for s in range(T.n_states)]
    comp = strongly_connected_components(T.n_states, succ)
    closed = set(comp)
    for s in range(T.n_states):
        for t in succ[s]:
            if comp[t] != comp[s]:
                closed.discard(comp[s])
    transient = frozenset(s for s in range(T.n_states) if comp[s] not in closed)
    minimal = len(set(comp)) == 1 and comp[T.initial] in closed
    return ComponentReport(tuple(comp), frozenset(closed), transient, minimal)


def subautomaton(T: Transducer, s: int) -> Transducer:
    if not 0 <= s < T.n_states:
        raise ValueError(f"unknown state {s}")
    return trim(Transducer(T.prime, T.in_arity, T.out_arity, T.delta, T.lam, s))


def _product(A: Transducer, B: Transducer, step) -> Transducer:
    """BFS over reachable state pairs; ``step(a, b, x) -> (a', b', y)``."""
    start = (A.initial, B.initial)
    index = {start: 0}
    pairs = [start]
    rows_d: list[list[int]] = []
    rows_l: list[list[int]] = []
    i = 0
    letters = A.n_letters
    while i < len(pairs):
        a, b = pairs[i]
        i += 1
        rd, rl = [], []
        for x in range(letters):
            a2, b2, y = step(a, b, x)
            key = (a2, b2)
            if key not in index:
                index[key] = len(pairs)
                pairs.append(key)
            rd.append(index[key])
            rl.append(y)
        rows_d.append(rd)
        rows_l.append(rl)
    return rows_d, rows_l


def compose(A: Transducer, B: Transducer) -> Transducer:
    """Sequential composition: feed A's output into B (computes f_B ∘ f_A)."""
    if A.prime != B.prime:
        raise ValueError("prime mismatch")
    if A.out_arity != B.in_arity:
        raise ValueError(f"arity mismatch: A outputs {A.out_arity}, B reads {B.in_arity}")
    ad, al, bd, bl = A.delta.tolist(), A.lam.tolist(), B.delta.tolist(), B.lam.tolist()

    def step(a, b, x):
        y = al[a][x]
        return ad[a][x], bd[b][y], bl[b][y]

    rd, rl = _product(A, B, step)
    return trim(Transducer(A.prime, A.in_arity, B.out_arity, rd, rl, 0))


def pair(A: Transducer, B: Transducer) -> Transducer:
    """Run A and B side by side on the same input; outputs are concatenated."""
    if A.prime != B.prime or A.in_arity != B.in_arity:
        raise ValueError("pair needs equal prime and input arity")
    shift = A.prime**A.out_arity
    ad, al, bd, bl = A.delta.tolist(), A.lam.tolist(), B.delta.tolist(), B.lam.tolist()

    def step(a, b, x):
        return ad[a][x], bd[b][x], al[a][x] + shift * bl[b][x]

    rd, rl = _product(A, B, step)
    return trim(Transducer(A.prime, A.in_arity, A.out_arity + B.out_arity, rd, rl, 0))


def branch(machines: Sequence[Transducer]) -> Transducer:
    """A machine whose first input letter x hands control to ``machines[x % len]``.

    The chosen machine also consumes that first letter, so on inputs whose
    first letter is x the result computes exactly that machine's function.
    """
    if not machines:
        raise ValueError("need at least one machine")
    p, m, n = machines[0].prime, machines[0].in_arity, machines[0].out_arity
    for M in machines:
        if (M.prime, M.in_arity, M.out_arity) != (p, m, n):
            raise ValueError("branch needs machines of equal prime and arities")
    letters = p**m
    if len(machines) > letters:
        raise ValueError("more machines than first letters")
    offsets, total = [], 1
    for M in machines:
        offsets.append(total)
        total += M.n_states
    delta = np.zeros((total, letters), dtype=np.int64)
    lam = np.zeros((total, letters), dtype=np.int64)
    for M, off in zip(machines, offsets):
        delta[off:off + M.n_states] = M.delta + off
        lam[off:off + M.n_states] = M.lam
    for x in range(letters):
        i = x % len(machines)
        M, off = machines[i], offsets[i]
        delta[0, x] = M.delta[M.initial, x] + off
        lam[0, x] = M.lam[M.initial, x]
    return trim(Transducer(p, m, n, delta, lam, 0))


def identity(prime: int, arity: int = 1) -> Transducer:
    letters = prime**arity
    row = np.arange(letters, dtype=np.int64)
    return Transducer(prime, arity, arity, np.zeros((1, letters)), row[None, :], 0)


def negation(prime: int) -> Transducer:
    """Digit complement d -> p-1-d, i.e. z -> -1-z."""
    row = np.arange(prime - 1, -1, -1, dtype=np.int64)
    return Transducer(prime, 1, 1, np.zeros((1, prime)), row[None, :], 0)


def adder(prime: int = 2) -> Transducer:
    """Two inputs, one output; the state is the carry (0 or 1)."""

    def fn(carry, xy):
        total = xy[0] + xy[1] + carry
        return total // prime, (total % prime,)

    return Transducer.from_function(prime, 2, 1, 2, fn, 0)


def random_transducer(prime: int, n_states: int, seed: int = 0,
                      in_arity: int = 1, out_arity: int = 1, trimmed: bool = True) -> Transducer:
    rng = SplitMix64(seed)
    letters = prime**in_arity
    outs = prime**out_arity
    delta = [[rng.below(n_states) for _ in range(letters)] for _ in range(n_states)]
    lam = [[rng.below(outs) for _ in range(letters)] for _ in range(n_states)]
    T = Transducer(prime, in_arity, out_arity, delta, lam, 0)
    return trim(T) if trimmed else T


def periodic_response(T: Transducer, word: Word) -> tuple[list[int], list[int]]:
    """Output of T on the periodic input (word)^∞ as (preperiod, period).

    Both lists are LSB-first single-output digit words.  The pair (state,
    phase) determines the future, so the output repeats once a pair recurs;
    the returned period is that raw cycle and need not be primitive.
    """
    if T.in_arity != 1 or T.out_arity != 1:
        raise ValueError("single-input single-output machine required")
    if not word:
        raise ValueError("empty word")
    seen: dict[tuple[int, int], int] = {}
    out: list[int] = []
    s, phase = T.initial, 0
    while (s, phase) not in seen:
        seen[(s, phase)] = len(out)
        x = word[phase]
        out.append(int(T.lam[s, x]))
        s = int(T.delta[s, x])
        phase = (phase + 1) % len(word)
    start = seen[(s, phase)]
    return out[:start], out[start:]


def all_words(prime: int, k: int):
    """Every LSB-first word of length k, in lexicographic order of tuples."""
    return product(range(prime), repeat=k)
