"""Plain-text machine files.

    p <prime>
    arity <m> <n>
    states <S>
    initial <id>
    <state> <d_1 .. d_m> -> <next> <e_1 .. e_n>     (S * p^m rows)

'#' starts a comment; blank lines are ignored.
"""

from __future__ import annotations

from itertools import product

import numpy as np

from .transducer import Transducer, decode_letter, encode_letter, trim


class CodecError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)


class FormatError(CodecError):
    pass


class DuplicateTransition(CodecError):
    pass


class MissingTransition(CodecError):
    pass


class LetterOutOfRange(CodecError):
    pass


class UnknownState(CodecError):
    pass


def _records(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            yield lineno, body


def _ints(fields, lineno):
    try:
        return [int(f) for f in fields]
    except ValueError:
        raise FormatError(f"expected integers, got {' '.join(fields)!r}", lineno) from None


def load(text: str, trim_unreachable: bool = True) -> Transducer:
    records = list(_records(text))
    header: dict[str, tuple[int, list[int]]] = {}
    for key in ("p", "arity", "states", "initial"):
        if not records:
            raise FormatError(f"missing '{key}' header")
        lineno, body = records.pop(0)
        fields = body.split()
        if fields[0] != key:
            raise FormatError(f"expected '{key}' header, got {fields[0]!r}", lineno)
        header[key] = (lineno, _ints(fields[1:], lineno))

    def single(key, count):
        lineno, vals = header[key]
        if len(vals) != count:
            raise FormatError(f"'{key}' takes {count} value(s)", lineno)
        return vals

    (p,) = single("p", 1)
    m, n = single("arity", 2)
    (S,) = single("states", 1)
    (init,) = single("initial", 1)
    if p < 2:
        raise FormatError("p must be >= 2", header["p"][0])
    if m < 1 or n < 1:
        raise FormatError("arities must be >= 1", header["arity"][0])
    if S < 1:
        raise FormatError("need at least one state", header["states"][0])
    if not 0 <= init < S:
        raise UnknownState(f"initial state {init} not in 0..{S - 1}", header["initial"][0])

    letters = p**m
    delta = np.full((S, letters), -1, dtype=np.int64)
    lam = np.zeros((S, letters), dtype=np.int64)
    for lineno, body in records:
        if "->" not in body:
            raise FormatError("transition row lacks '->'", lineno)
        left, right = body.split("->", 1)
        lhs = _ints(left.split(), lineno)
        rhs = _ints(right.split(), lineno)
        if len(lhs) != 1 + m or len(rhs) != 1 + n:
            raise FormatError(f"row needs 1+{m} fields before '->' and 1+{n} after", lineno)
        s, ins = lhs[0], lhs[1:]
        t, outs = rhs[0], rhs[1:]
        for st in (s, t):
            if not 0 <= st < S:
                raise UnknownState(f"state {st} not in 0..{S - 1}", lineno)
        for d in ins + outs:
            if not 0 <= d < p:
                raise LetterOutOfRange(f"digit {d} not in 0..{p - 1}", lineno)
        x = encode_letter(ins, p)
        if delta[s, x] != -1:
            raise DuplicateTransition(f"second row for state {s} input {' '.join(map(str, ins))}", lineno)
        delta[s, x] = t
        lam[s, x] = encode_letter(outs, p)
    missing = np.argwhere(delta == -1)
    if len(missing):
        s, x = (int(v) for v in missing[0])
        ins = " ".join(map(str, decode_letter(x, p, m)))
        raise MissingTransition(f"no row for state {s} input {ins} ({len(missing)} missing)")
    T = Transducer(p, m, n, delta, lam, init)
    return trim(T) if trim_unreachable else T


def save(T: Transducer) -> str:
    p, m, n = T.prime, T.in_arity, T.out_arity
    lines = [f"p {p}", f"arity {m} {n}", f"states {T.n_states}", f"initial {T.initial}"]
    for s in range(T.n_states):
        for ins in product(range(p), repeat=m):
            x = encode_letter(ins, p)
            outs = decode_letter(int(T.lam[s, x]), p, n)
            lines.append(f"{s} {' '.join(map(str, ins))} -> {int(T.delta[s, x])} {' '.join(map(str, outs))}")
    return "\n".join(lines) + "\n"


def read(path) -> Transducer:
    with open(path, encoding="utf-8") as fh:
        return load(fh.read())


def write(T: Transducer, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(save(T))
