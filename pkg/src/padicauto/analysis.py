"""Checks that tie generated plots to predicted links, and line discovery.

For a slope s = u/v in lowest terms and a point (X, Y) at scale p^K, the
integer rho = (v Y - u X) mod p^K encodes v (y - s x) mod 1 as rho / p^K.
Two points with equal rho lie on the same cable of slope s (a cable meets
the vertical line x = 0 in a coset e + (1/v)Z), so all intercept work is done
on this circle of length p^K and reported back in y units, inside [0, 1/v).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .affine import AffineParams
from .links import LinkPrediction, predict_affine, predict_const
from .padic import PAdicRational
from .plot import DEFAULT_BUDGET, PlotSet, exhaustive_layers
from .transducer import Transducer, prefix_levels
from .vanderput import coefficient_ids, squaring_oracle


def _residues(X: np.ndarray, Y: np.ndarray, P: int, u: int, v: int) -> np.ndarray:
    if P * (v + abs(u)) >= 1 << 62:
        raise ValueError("scale too large for int64 residues")
    r = v * Y - u * X
    if P & (P - 1) == 0:
        return r & (P - 1)
    return r % P


def _value_counts(rho: np.ndarray, P: int) -> tuple[np.ndarray, np.ndarray]:
    """Sorted distinct residues and their multiplicities."""
    if P <= 1 << 26 and P <= 8 * len(rho) + 1024:
        counts = np.bincount(rho, minlength=P)
        vals = np.flatnonzero(counts)
        return vals, counts[vals]
    return np.unique(rho, return_counts=True)


def _circle_dist(a: np.ndarray, b, period: int) -> np.ndarray:
    d = np.abs(a - b) % period
    return np.minimum(d, period - d)


@dataclass(frozen=True)
class VerifyReport:
    distances: dict[int, Fraction]
    exact_congruence_pass: bool
    empirical_knot_count: int
    first_failure: tuple[int, int] | None
    prediction: LinkPrediction

    @property
    def passed(self) -> bool:
        return self.exact_congruence_pass


def link_distance(X: np.ndarray, Y: np.ndarray, k: int, prime: int, slope: Fraction,
                  intercepts: Sequence[Fraction]) -> tuple[Fraction, np.ndarray]:
    """Exact max over points of the torus (max-norm) distance to the cable set.

    The distance from (x, y) to the cable family y = s x + e + j/v is the
    vertical offset to the nearest translate divided by 1 + |s|.  Returns the
    maximum and, per point, the index of the nearest cable.
    """
    s = Fraction(slope)
    u, v = s.numerator, s.denominator
    P = prime**k
    rho = _residues(X, Y, P, u, v)
    best = None
    which = np.zeros(len(X), dtype=np.int64)
    scale = 1
    targets = []
    for e in intercepts:
        t = (Fraction(e) * v) % 1
        targets.append(t)
        scale = np.lcm(scale, t.denominator)
    scale = int(scale)
    if P * scale * 2 >= 1 << 62:
        raise ValueError("scale too large for exact distances")
    period = P * scale
    for i, t in enumerate(targets):
        target = t.numerator * (scale // t.denominator) * P
        d = _circle_dist(rho * scale, target, period)
        if best is None:
            best = d
        else:
            closer = d < best
            which[closer] = i
            best = np.minimum(best, d)
    if best is None or len(best) == 0:
        return Fraction(0), which
    # d / (P scale) is v (y - s x - e) on the unit circle; undo v and the slope factor
    return Fraction(int(best.max()), period * (v + abs(u))), which


def verify_affine(T: Transducer, params: AffineParams, k_range: Iterable[int],
                  budget: int = DEFAULT_BUDGET) -> VerifyReport:
    """Exact congruence beta Y ≡ alpha X + gamma (mod p^k) on exhaustive layers,
    plus the exact distance of every layer to the predicted link."""
    ks = sorted(set(k_range))
    p = params.prime
    pred = predict_affine(PAdicRational.of(params.a, p), PAdicRational.of(params.b, p))
    distances: dict[int, Fraction] = {}
    failure = None
    hit: set[int] = set()
    for k, (X, Y) in exhaustive_layers(T, ks, budget).items():
        P = p**k
        lhs = (params.beta % P) * Y % P
        rhs = ((params.alpha % P) * X + params.gamma % P) % P
        bad = np.flatnonzero(lhs != rhs)
        if len(bad) and failure is None:
            failure = (k, int(X[bad[0]]))
        dist, which = link_distance(X, Y, k, p, pred.slope.fraction, pred.intercepts)
        distances[k] = dist
        hit.update(np.unique(which).tolist())
    return VerifyReport(distances, failure is None, len(hit), failure, pred)


@dataclass(frozen=True)
class Cluster:
    center: Fraction
    extent: Fraction
    mass: int


@dataclass(frozen=True)
class ClusterReport:
    slope: Fraction
    clusters: tuple[Cluster, ...]

    @property
    def count(self) -> int:
        return len(self.clusters)

    @property
    def centers(self) -> list[Fraction]:
        return [c.center for c in self.clusters]


def _tol_units(tol: Fraction, P: int, v: int) -> Fraction:
    """A vertical tolerance in y units, expressed on the rho circle."""
    return Fraction(tol) * v * P


def _circular_groups(values: np.ndarray, masses: np.ndarray, P: int, tol_r: Fraction):
    """Split sorted distinct circle points at gaps >= tol_r.

    Returns (start value, end value, mass) triples walking counterclockwise.
    With no such gap the whole set is one group spanning the circle minus its
    widest gap.
    """
    n = len(values)
    if n == 0:
        return []
    gaps = np.empty(n, dtype=np.int64)
    gaps[:-1] = np.diff(values)
    gaps[-1] = values[0] + P - values[-1]
    num, den = tol_r.numerator, tol_r.denominator
    breaks = np.flatnonzero(gaps * den >= num)
    if len(breaks) == 0:
        widest = int(np.argmax(gaps))
        start = (widest + 1) % n
        return [(int(values[start]), int(values[widest]), int(masses.sum()))]
    groups = []
    csum = np.concatenate([[0], np.cumsum(masses)])
    for i, b in enumerate(breaks):
        start = (b + 1) % n
        end = breaks[(i + 1) % len(breaks)]
        if start <= end:
            mass = csum[end + 1] - csum[start]
        else:
            mass = csum[n] - csum[start] + csum[end + 1]
        groups.append((int(values[start]), int(values[end]), int(mass)))
    return groups


def _group_center(lo: int, hi: int, P: int) -> tuple[Fraction, int]:
    """Midpoint of the arc lo -> hi (counterclockwise) and its length."""
    length = (hi - lo) % P
    return Fraction(2 * lo + length, 2) % P, length


def _scaled_points(points: PlotSet):
    X, Y, K = points.scaled()
    return X, Y, points.prime**K


def intercept_clusters(points: PlotSet, slope, tol=Fraction(1, 256), min_mass: int = 1) -> ClusterReport:
    """Cluster the intercepts y - s x of all points, taken mod 1/v.

    Distinct intercept values with multiplicity below ``min_mass`` are dropped;
    the rest are merged across gaps smaller than ``tol`` (y units).  Centers
    are exact midpoints in [0, 1/v).
    """
    tol = Fraction(tol)
    if not 0 < tol < Fraction(1, 2):
        raise ValueError("tol must lie in (0, 1/2)")
    s = Fraction(slope)
    u, v = s.numerator, s.denominator
    X, Y, P = _scaled_points(points)
    if len(X) == 0:
        return ClusterReport(s, ())
    rho = _residues(X, Y, P, u, v)
    vals, counts = _value_counts(rho, P)
    keep = counts >= min_mass
    vals, counts = vals[keep], counts[keep]
    clusters = []
    for lo, hi, mass in _circular_groups(vals, counts, P, _tol_units(tol, P, v)):
        center, length = _group_center(lo, hi, P)
        clusters.append(Cluster(center / (P * v), Fraction(length, P * v), mass))
    clusters.sort(key=lambda c: c.center)
    return ClusterReport(s, tuple(clusters))


@dataclass(frozen=True)
class LineCandidate:
    slope: Fraction
    intercepts: tuple[Fraction, ...]
    support: Fraction
    residual: Fraction

    @property
    def knot_count(self) -> int:
        return len(self.intercepts)


def candidate_slopes(prime: int, max_num: int, max_den: int) -> list[Fraction]:
    from math import gcd

    out = []
    for v in range(1, max_den + 1):
        if gcd(v, prime) != 1:
            continue
        for u in range(-max_num, max_num + 1):
            if gcd(u, v) == 1:
                out.append(Fraction(u, v))
    return out


def _fit_slope(X, Y, P, s: Fraction, tol: Fraction, min_mass: int):
    """Tight clusters of heavy exact intercepts, and the points they explain."""
    u, v = s.numerator, s.denominator
    rho = _residues(X, Y, P, u, v)
    vals, counts = _value_counts(rho, P)
    heavy = counts >= min_mass
    if not heavy.any():
        return None
    tol_r = _tol_units(tol, P, v)
    centers, halfwidths = [], []
    for lo, hi, _ in _circular_groups(vals[heavy], counts[heavy], P, tol_r):
        center, length = _group_center(lo, hi, P)
        if length > tol_r:
            continue
        centers.append(center)
        halfwidths.append(Fraction(length, 2))
    if not centers:
        return None
    covered = np.zeros(len(X), dtype=bool)
    num, den = tol_r.numerator, tol_r.denominator
    for c in centers:
        # |rho - c| <= tol_r on the circle, in doubled integers to keep c exact
        c2 = c.numerator * (2 // c.denominator)
        d = _circle_dist(2 * rho, c2, 2 * P)
        covered |= d * den <= 2 * num
    intercepts = tuple(sorted(c / (P * v) for c in centers))
    residual = max(halfwidths) / (P * v)
    return intercepts, residual, covered


def detect_lines(points: PlotSet, max_num: int = 8, max_den: int = 8, tol=Fraction(1, 256),
                 min_coverage=Fraction(9, 10), atom_fraction=Fraction(1, 64)) -> list[LineCandidate]:
    """Find the cables of rational slope that explain the plot.

    For each slope u/v (|u| <= max_num, v <= max_den, p not dividing v) the
    exact intercepts y - s x mod 1/v are computed.  Values shared by at least
    ``atom_fraction`` of the points (and by two points) are the candidate
    cable positions; those that bunch within ``tol`` become the slope's
    intercepts and the points within ``tol`` of one are its support.  Slopes
    are then taken greedily by the number of not yet explained points (ties:
    smaller residual, denominator, |numerator|) until ``min_coverage`` of the
    plot is explained.  An empty list means no such cover exists at these
    bounds.  Reported support is relative to the whole plot.
    """
    tol = Fraction(tol)
    X, Y, P = _scaled_points(points)
    N = len(X)
    if N == 0:
        return []
    min_mass = max(2, -(-N * Fraction(atom_fraction).numerator // Fraction(atom_fraction).denominator))
    fits = []
    for s in candidate_slopes(points.prime, max_num, max_den):
        fit = _fit_slope(X, Y, P, s, tol, min_mass)
        if fit is not None:
            fits.append((s, *fit))
    chosen: list[LineCandidate] = []
    explained = np.zeros(N, dtype=bool)
    while fits:
        def rank(f):
            s, _, residual, covered = f
            return (-int((covered & ~explained).sum()), residual, s.denominator, abs(s.numerator), s)

        fits.sort(key=rank)
        s, intercepts, residual, covered = fits.pop(0)
        gain = int((covered & ~explained).sum())
        if gain < min_mass:
            break
        explained |= covered
        chosen.append(LineCandidate(s, intercepts, Fraction(int(covered.sum()), N), residual))
        if Fraction(int(explained.sum()), N) >= min_coverage:
            return chosen
    return []


@dataclass(frozen=True)
class ShiftReport:
    passed: bool
    k_max: int
    first_failure: tuple[int, int] | None = None


def shift_test(T: Transducer, k_max: int) -> ShiftReport:
    """Every layer-k point (X, Y) projects to (X mod p^(k-1), Y mod p^(k-1)) in layer k-1."""
    prev = None
    for k, Y, _ in prefix_levels(T, k_max):
        if k >= 2:
            top = T.prime ** (k - 1)
            X = np.arange(len(Y), dtype=np.int64)
            bad = np.flatnonzero(Y % top != prev[X % top])
            if len(bad):
                return ShiftReport(False, k_max, (k, int(bad[0])))
        prev = Y
    return ShiftReport(True, k_max)


def squaring_growth(M: int = 1 << 16, prime: int = 2) -> list[tuple[int, int]]:
    """|{b_m : m < p^j}| for the squaring map, j = 1 .. log_p M."""
    ids, _, _ = coefficient_ids(squaring_oracle(prime), M)
    rows = []
    j = 1
    while prime**j <= M:
        rows.append((j, int(len(np.unique(ids[: prime**j])))))
        j += 1
    return rows


@dataclass(frozen=True)
class FillTrend:
    rows: tuple[tuple[int, Fraction], ...]
    undersampled: bool

    @property
    def ratio(self) -> Fraction:
        first, last = self.rows[0][1], self.rows[-1][1]
        return last / first if first else Fraction(0)


def fill_trend(T: Transducer, resolutions: Sequence[int], k: int, width: int = 1,
               budget: int = DEFAULT_BUDGET) -> FillTrend:
    """Fill ratios of the exhaustive plot (layers k .. k+width-1) at each resolution.

    ``undersampled`` flags p^k < res^2 for the finest resolution, where a thin
    set can look sparse merely for lack of points.
    """
    from .plot import layers, raster

    res = list(resolutions)
    if res != sorted(res):
        raise ValueError("resolutions must be ascending")
    ps = layers(T, range(k, k + width), "exhaustive", budget=budget)
    rows = tuple((r, raster(ps, r)[1]) for r in res)
    return FillTrend(rows, T.prime**k < res[-1] ** 2)


def constant_prediction(q, prime: int) -> LinkPrediction:
    return predict_const(q, prime)
