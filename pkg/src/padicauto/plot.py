"""Plot layers of automaton functions as exact integer points.

Layer k of the plot of f is the point set
    { (X / p^k, Y / p^k) : X in [0, p^k), Y = f(X) mod p^k },
stored as the integer pair (X, Y).  Floats appear only in torus3d and in the
SVG writer, neither of which feeds back into any check.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

from ._rng import SplitMix64
from .transducer import Transducer, prefix_levels, run_batch

DEFAULT_BUDGET = 1 << 24
SURFACES = ("square", "torus", "cylinder-x", "cylinder-y")


class BudgetExceeded(ValueError):
    pass


@dataclass(frozen=True)
class ExactPoint:
    k: int
    X: int
    Y: int

    def coords(self, prime: int) -> tuple[Fraction, Fraction]:
        d = prime**self.k
        return Fraction(self.X, d), Fraction(self.Y, d)


@dataclass
class PlotSet:
    """Points grouped by word length: ``layers[k] = (X array, Y array)``."""

    prime: int
    layers: dict[int, tuple[np.ndarray, np.ndarray]] = field(default_factory=dict)
    mode: str = "exhaustive"
    samples: int | None = None
    seed: int | None = None
    surface: str = "torus"

    def __len__(self) -> int:
        return sum(len(X) for X, _ in self.layers.values())

    @property
    def ks(self) -> list[int]:
        return sorted(self.layers)

    def points(self) -> Iterator[ExactPoint]:
        for k in self.ks:
            X, Y = self.layers[k]
            for x, y in zip(X.tolist(), Y.tolist()):
                yield ExactPoint(k, x, y)

    def point_set(self) -> set[ExactPoint]:
        return set(self.points())

    def scaled(self) -> tuple[np.ndarray, np.ndarray, int]:
        """All points on the common denominator p^kmax as (X, Y, kmax)."""
        if not self.layers:
            return np.zeros(0, np.int64), np.zeros(0, np.int64), 0
        kmax = max(self.layers)
        xs, ys = [], []
        for k in self.ks:
            X, Y = self.layers[k]
            f = self.prime ** (kmax - k)
            xs.append(X * f)
            ys.append(Y * f)
        return np.concatenate(xs), np.concatenate(ys), kmax

    def merged(self, other: "PlotSet") -> "PlotSet":
        if other.prime != self.prime:
            raise ValueError("prime mismatch")
        layers = dict(self.layers)
        for k, (X, Y) in other.layers.items():
            if k in layers:
                layers[k] = (np.concatenate([layers[k][0], X]), np.concatenate([layers[k][1], Y]))
            else:
                layers[k] = (X, Y)
        return PlotSet(self.prime, layers, "mixed", None, None, self.surface)


def _check_machine(T: Transducer) -> None:
    if T.in_arity != 1 or T.out_arity != 1:
        raise ValueError("plots need a single-input single-output machine")


def exhaustive_layers(T: Transducer, ks: Iterable[int], budget: int = DEFAULT_BUDGET) -> dict:
    """All layers in ``ks``, built digit by digit so shared prefixes are reused."""
    _check_machine(T)
    ks = sorted(set(ks))
    if not ks:
        return {}
    p = T.prime
    if p ** ks[-1] > budget:
        raise BudgetExceeded(f"p^k = {p}^{ks[-1]} exceeds the point budget {budget}")
    wanted = set(ks)
    out = {}
    for n, Y, _ in prefix_levels(T, ks[-1]):
        if n in wanted:
            out[n] = (np.arange(p**n, dtype=np.int64), Y)
    return out


def sampled_layer(T: Transducer, k: int, n: int, rng: SplitMix64) -> tuple[np.ndarray, np.ndarray]:
    _check_machine(T)
    modulus = T.prime**k
    X = np.array([rng.below(modulus) for _ in range(n)], dtype=np.int64)
    (Y,) = run_batch(T, X, k)
    return X, Y


def _parse_mode(mode) -> tuple[str, int | None]:
    if isinstance(mode, tuple):
        return mode[0], mode[1]
    if mode == "exhaustive":
        return "exhaustive", None
    if isinstance(mode, str) and mode.startswith("sample:"):
        return "sampled", int(mode.split(":", 1)[1])
    raise ValueError(f"unknown mode {mode!r}")


def layers(T: Transducer, ks: Iterable[int], mode="exhaustive", seed: int = 0,
           budget: int = DEFAULT_BUDGET, surface: str = "torus") -> PlotSet:
    """Layers for every k in ``ks``.

    ``mode`` is "exhaustive", "sample:N" or ("sampled", N).  Sampled layers
    draw N inputs per layer from one SplitMix64 stream seeded with ``seed``,
    layers taken in ascending k.
    """
    if surface not in SURFACES:
        raise ValueError(f"unknown surface {surface!r}")
    kind, n = _parse_mode(mode)
    ks = sorted(set(ks))
    if kind == "exhaustive":
        return PlotSet(T.prime, exhaustive_layers(T, ks, budget), "exhaustive", None, None, surface)
    rng = SplitMix64(seed)
    out = {k: sampled_layer(T, k, n, rng) for k in ks}
    return PlotSet(T.prime, out, "sampled", n, seed, surface)


def layer(T: Transducer, k: int, mode="exhaustive", seed: int = 0,
          budget: int = DEFAULT_BUDGET, surface: str = "torus") -> PlotSet:
    return layers(T, [k], mode, seed, budget, surface)


def window(T: Transducer, k: int, width: int = 6, mode="exhaustive", seed: int = 0,
           budget: int = DEFAULT_BUDGET, surface: str = "torus") -> PlotSet:
    """Layers k, k+1, ..., k+width-1.

    A single layer shows each ergodic part of an affine machine on one cable
    only; consecutive layers cycle through the cables, so a window of a few
    layers is what exhibits the whole link.
    """
    return layers(T, range(k, k + width), mode, seed, budget, surface)


def mon(value: int, prime: int, k: int) -> Fraction:
    """Digit reversal: sum of delta_i p^(-i-1) over the k lowest digits."""
    rev = 0
    for _ in range(k):
        value, d = divmod(value, prime)
        rev = rev * prime + d
    return Fraction(rev, prime**k)


def monna_points(T: Transducer, k: int, mode="exhaustive", seed: int = 0,
                 budget: int = DEFAULT_BUDGET) -> list[tuple[Fraction, Fraction]]:
    ps = layer(T, k, mode, seed, budget)
    X, Y = ps.layers[k]
    p = T.prime
    return [(mon(x, p, k), mon(y, p, k)) for x, y in zip(X.tolist(), Y.tolist())]


def raster(points: PlotSet, res: int) -> tuple[np.ndarray, Fraction]:
    """Occupancy bitmap, row 0 = lowest y band, plus the exact fill ratio."""
    if res < 2:
        raise ValueError("res must be >= 2")
    grid = np.zeros((res, res), dtype=bool)
    p = points.prime
    for k in points.ks:
        X, Y = points.layers[k]
        d = p**k
        if d * res < 1 << 62:
            cx = X * res // d
            cy = Y * res // d
        else:
            cx = np.array([x * res // d for x in X.tolist()], dtype=np.int64)
            cy = np.array([y * res // d for y in Y.tolist()], dtype=np.int64)
        grid[cy % res, cx % res] = True
    return grid, Fraction(int(grid.sum()), res * res)


def torus3d(points, R: float = 2.0, r: float = 1.0) -> list[tuple[float, float, float]]:
    if not R > r > 0:
        raise ValueError("need R > r > 0")
    if isinstance(points, PlotSet):
        pairs = [pt.coords(points.prime) for pt in points.points()]
    else:
        pairs = list(points)
    out = []
    for x, y in pairs:
        ax, ay = 2 * math.pi * float(x), 2 * math.pi * float(y)
        ring = R + r * math.cos(ay)
        out.append((_clean(ring * math.cos(ax)), _clean(ring * math.sin(ax)), _clean(r * math.sin(ay))))
    return out


def _clean(v: float) -> float:
    return 0.0 if abs(v) < 1e-12 else v


def to_csv(points: PlotSet) -> str:
    buf = io.StringIO()
    buf.write("k,X,Y\n")
    for k in points.ks:
        X, Y = points.layers[k]
        for x, y in zip(X.tolist(), Y.tolist()):
            buf.write(f"{k},{x},{y}\n")
    return buf.getvalue()


def read_csv(text: str, prime: int) -> PlotSet:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != ["k", "X", "Y"]:
        raise ValueError("expected header 'k,X,Y'")
    cols: dict[int, tuple[list[int], list[int]]] = {}
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        try:
            k, x, y = (int(v) for v in row)
        except ValueError:
            raise ValueError(f"line {lineno}: expected three integers") from None
        d = prime**k
        if not (0 <= x < d and 0 <= y < d):
            raise ValueError(f"line {lineno}: coordinate out of range for k={k}")
        xs, ys = cols.setdefault(k, ([], []))
        xs.append(x)
        ys.append(y)
    layers_ = {k: (np.array(xs, dtype=np.int64), np.array(ys, dtype=np.int64)) for k, (xs, ys) in cols.items()}
    return PlotSet(prime, layers_, "file")


def to_pgm(bitmap: np.ndarray) -> bytes:
    """Binary greymap; set cells black, top image row = highest y band."""
    h, w = bitmap.shape
    body = np.where(bitmap[::-1], 0, 255).astype(np.uint8).tobytes()
    return f"P5 {w} {h} 255\n".encode("ascii") + body


def _num(v) -> str:
    v = Fraction(v)
    if v.denominator == 1:
        return str(v.numerator)
    return f"{float(v):.6f}".rstrip("0").rstrip(".")


def to_svg(points: PlotSet | None, res: int, cables: Sequence[tuple[Fraction, Fraction]] = ()) -> str:
    """Points as res-snapped unit squares; cables (slope, intercept) as line elements."""
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{res}" height="{res}" '
           f'viewBox="0 0 {res} {res}">',
           f'<rect x="0" y="0" width="{res}" height="{res}" fill="white"/>']
    if points is not None and len(points):
        grid, _ = raster(points, res)
        for cy, cx in zip(*np.nonzero(grid)):
            out.append(f'<rect x="{cx}" y="{res - 1 - cy}" width="1" height="1" fill="black"/>')
    from .links import cable_segments

    for slope, intercept in cables:
        for x0, y0, x1, y1 in cable_segments(Fraction(slope), Fraction(intercept)):
            out.append(f'<line x1="{_num(x0 * res)}" y1="{_num(res - y0 * res)}" '
                       f'x2="{_num(x1 * res)}" y2="{_num(res - y1 * res)}" stroke="red" stroke-width="0.5"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def export(obj, fmt: str, path, res: int = 256, cables=()) -> None:
    """Write a PlotSet (csv, pgm, svg) or a bitmap (pgm) to ``path``."""
    if fmt == "csv":
        if not isinstance(obj, PlotSet):
            raise TypeError("csv export needs a PlotSet")
        data: bytes = to_csv(obj).encode("ascii")
    elif fmt == "pgm":
        bitmap = raster(obj, res)[0] if isinstance(obj, PlotSet) else np.asarray(obj, dtype=bool)
        data = to_pgm(bitmap)
    elif fmt == "svg":
        data = to_svg(obj if isinstance(obj, PlotSet) else None, res, cables).encode("utf-8")
    else:
        raise ValueError(f"unknown format {fmt!r}")
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc
