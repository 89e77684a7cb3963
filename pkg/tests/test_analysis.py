from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from padicauto.affine import AffineParams, synth_affine
from padicauto.analysis import (
    candidate_slopes, detect_lines, fill_trend, intercept_clusters, link_distance, shift_test,
    squaring_growth, verify_affine,
)
from padicauto.links import predict_affine, same_cable
from padicauto.plot import PlotSet, layer, window
from padicauto.transducer import Transducer, branch, identity, random_transducer
from padicauto.vanderput import closed_form_square_b

F = Fraction


def brute_distance(X, Y, k, slope, intercepts):
    """Chebyshev torus distance to the cables by scanning integer translates."""
    s = F(slope)
    best = F(0)
    for x, y in zip(X.tolist(), Y.tolist()):
        px, py = F(x, 2**k), F(y, 2**k)
        d = min(
            abs(py - s * px - e - j - s * i) / (1 + abs(s))
            for e in intercepts for i in range(s.denominator) for j in range(-abs(s.numerator) - 2, abs(s.numerator) + 3)
        )
        best = max(best, d)
    return best


def test_verify_examples():
    T = synth_affine("5/3", 0, 2)
    rep = verify_affine(T, AffineParams.of("5/3", 0, 2), range(4, 13))
    assert rep.exact_congruence_pass and rep.empirical_knot_count == 1
    rep = verify_affine(identity(2), AffineParams.of(1, 0, 2), range(1, 10))
    assert rep.passed and set(rep.distances.values()) == {0}
    T = synth_affine("3/5", "1/3", 2)
    rep = verify_affine(T, AffineParams.of("3/5", "2/3", 2), range(4, 10))
    assert not rep.exact_congruence_pass and rep.first_failure is not None


@pytest.mark.parametrize("a,q", [("3/5", "1/3"), ("-2", "1/3"), ("3/5", "2/7"), ("7/3", "-5/9")])
def test_distance_matches_brute_force(a, q):
    T = synth_affine(a, q, 2)
    pred = predict_affine(a, q, 2)
    for k in (3, 5, 7):
        X, Y = layer(T, k).layers[k]
        d, _ = link_distance(X, Y, k, 2, pred.slope.fraction, pred.intercepts)
        assert d == brute_distance(X, Y, k, pred.slope.fraction, pred.intercepts)
        gamma_over_beta = abs(F(q))
        assert d <= gamma_over_beta / 2**k


def test_verify_counts_knots():
    for a, q in [("3/5", "1/3"), ("-2", "1/3"), ("3/5", "2/7"), (1, "1/9")]:
        T = synth_affine(a, q, 2)
        rep = verify_affine(T, AffineParams.of(a, q, 2), range(4, 15))
        assert rep.empirical_knot_count == rep.prediction.knot_count


def test_cluster_examples():
    T = synth_affine("3/5", "1/3", 2)
    assert intercept_clusters(window(T, 16), F(3, 5)).count == 2
    rep = intercept_clusters(layer(identity(2), 10), 1)
    assert rep.count == 1 and rep.centers == [0]
    C = synth_affine(0, "2/7", 2)
    rep = intercept_clusters(window(C, 15), 0)
    assert rep.count == 3
    for c, e in zip(rep.centers, [F(3, 7), F(5, 7), F(6, 7)]):
        assert abs(c - e) < F(1, 2**12)
    same = PlotSet(2, {4: (np.array([3, 3, 3]), np.array([5, 5, 5]))})
    assert intercept_clusters(same, F(1, 3)).count == 1
    with pytest.raises(ValueError):
        intercept_clusters(same, 1, tol=F(1, 2))


def test_cluster_centers_lie_on_predicted_cables():
    for a, q in [("3/5", "1/3"), ("-2", "1/3"), ("3/5", "2/7")]:
        pred = predict_affine(a, q, 2)
        v = F(a).denominator
        rep = intercept_clusters(window(synth_affine(a, q, 2), 16), F(a))
        for c in rep.centers:
            # circle distance on the 1/v circle to the nearest predicted intercept
            nearest = min(abs(((c - e) * v + F(1, 2)) % 1 - F(1, 2)) / v for e in pred.intercepts)
            assert nearest < F(1, 2**10)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10**6))
def test_cluster_count_invariant_under_relabel_and_shift(seed):
    T = synth_affine("3/5", "2/7", 2)
    ps = window(T, 12)
    base = intercept_clusters(ps, F(3, 5)).count
    rng = np.random.default_rng(seed)
    perm_layers = {}
    for k, (X, Y) in ps.layers.items():
        idx = rng.permutation(len(X))
        perm_layers[k] = (X[idx], Y[idx])
    assert intercept_clusters(PlotSet(2, perm_layers), F(3, 5)).count == base
    shifted = {k: v for k, v in ps.layers.items()}
    for k, (X, Y) in ps.layers.items():
        if k - 1 in shifted:
            top = 2 ** (k - 1)
            pX, pY = shifted[k - 1]
            shifted[k - 1] = (np.concatenate([pX, X % top]), np.concatenate([pY, Y % top]))
    assert intercept_clusters(PlotSet(2, shifted), F(3, 5)).count == base


def test_detect_examples():
    T = synth_affine("3/5", "1/3", 2)
    found = detect_lines(window(T, 16), 8, 8)
    assert found[0].slope == F(3, 5) and found[0].knot_count == 2
    U = branch([synth_affine(-2, "1/3", 2), synth_affine("3/5", "2/7", 2)])
    found = detect_lines(window(U, 16), 8, 8)
    assert {c.slope for c in found} == {F(-2), F(3, 5)}
    found = detect_lines(layer(identity(2), 12), 8, 8)
    assert found[0].slope == 1 and found[0].intercepts == (0,) and found[0].support == 1


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_detect_rejects_unstructured_plot(seed):
    T = random_transducer(2, 6, seed)
    assert detect_lines(window(T, 12), 8, 8) == []


def test_detect_nothing_for_bounds_too_small():
    T = synth_affine("7/3", "1/3", 2)
    found = detect_lines(window(T, 16, mode="sample:256"), 2, 2)
    assert found == []


def test_candidate_slopes():
    c = candidate_slopes(2, 2, 4)
    assert F(1, 2) not in c and F(2, 3) in c and F(0) in c
    assert len(c) == len(set(c))


def test_shift_test_examples():
    assert shift_test(synth_affine("3/5", "1/3", 2), 12).passed
    assert shift_test(identity(2), 12).passed
    assert shift_test(random_transducer(2, 5, 7), 12).passed


def test_squaring_growth():
    rows = squaring_growth(2**16)
    assert rows[1] == (2, 4)
    counts = [c for _, c in rows]
    assert all(a <= b for a, b in zip(counts, counts[1:])) and counts[-1] >= 100
    brute = [len({closed_form_square_b(m, 2) for m in range(2**j)}) for j in range(1, 11)]
    assert counts[:10] == brute


def test_fill_trend_examples():
    tr = fill_trend(identity(2), [32, 64, 128], 16)
    assert [r for _, r in tr.rows] == [F(1, 32), F(1, 64), F(1, 128)]
    tr = fill_trend(synth_affine("3/5", "1/3", 2), [64, 256], 18)
    assert tr.rows == ((64, F(1, 8)), (256, F(1, 32))) and tr.ratio <= F(1, 2)
    tr = fill_trend(synth_affine(0, "2/7", 2), [64, 256], 18, width=6)
    assert [r for _, r in tr.rows] == [F(3, 64), F(3, 256)]
    assert fill_trend(identity(2), [64, 256], 10).undersampled
