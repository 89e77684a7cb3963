import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from padicauto.affine import synth_affine
from padicauto.padic import from_digits, residue_of
from padicauto.transducer import identity, random_transducer, run1
from padicauto.vanderput import (
    DigitOracle, FunctionOracle, TransducerOracle, closed_form_affine_b, closed_form_square_b,
    coefficient_ids, coeffset_probe, constant_oracle, identity_oracle, kernel_probe, n_digits,
    reconstruct, squaring_oracle, transducer_b_sequence, vdp_coeffs, vdp_coeffs_mod, zero_tail_values,
)


def thue_morse(n):
    return np.array([bin(i).count("1") % 2 for i in range(n)], dtype=np.int64)


def test_identity_coefficients():
    cs = vdp_coeffs(identity_oracle(2), 8)
    assert [c.b for c in cs] == [0] + [1] * 7
    for c in vdp_coeffs(identity_oracle(3), 3**5):
        assert c.b == c.m // 3 ** (n_digits(c.m, 3) - 1)


def test_constant_coefficients():
    cs = vdp_coeffs(constant_oracle("1/3", 2), 8)
    assert [c.B for c in cs] == [Fraction(1, 3)] * 2 + [0] * 6


def test_squaring_coefficients():
    cs = vdp_coeffs(squaring_oracle(2), 6)
    assert (cs[2].b, cs[3].b, cs[5].b) == (2, 4, 6)
    for c in vdp_coeffs(squaring_oracle(3), 200):
        assert c.b == closed_form_square_b(c.m, 3)


def test_zero_tail_values():
    T = synth_affine("3/5", "1/3", 2)
    G = zero_tail_values(T)
    assert G[T.initial] == Fraction(1, 3)
    # state reached after reading m equals the carry; check f(m) = 3m/5 + 1/3 on naturals
    o = TransducerOracle(T)
    for m in range(300):
        assert o(m) == Fraction(3, 5) * m + Fraction(1, 3)


@pytest.mark.parametrize("a,q,p", [("3/5", "1/3", 2), ("-2", "1/3", 2), ("5/3", 0, 2), ("7/2", "-4/5", 3), (4, "1/4", 5)])
def test_affine_coefficients_closed_form(a, q, p):
    T = synth_affine(a, q, p)
    for c in vdp_coeffs(T, 2 * p**4):
        assert c.b == closed_form_affine_b(a, q, c.m, p)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 6), st.sampled_from([2, 3]))
def test_exact_and_modular_routes_agree(seed, n, p):
    T = random_transducer(p, n, seed)
    exact = vdp_coeffs(T, p**4)
    K = 20
    mod = vdp_coeffs_mod(TransducerOracle(T), p**4, K)
    o = TransducerOracle(T)
    for e, r in zip(exact, mod):
        assert r.B == residue_of(e.B, p, K)
        top = p ** (n_digits(e.m, p) - 1)
        assert r.b == residue_of(e.b, p, K - n_digits(e.m, p) + 1)
        # b_m is a p-adic integer: denominators coprime to p
        assert e.b.denominator % p != 0
        assert e.B == (o(e.m) if e.m < p else o(e.m) - o(e.m % top))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 6))
def test_reconstruction_matches_simulation(seed, n):
    T = random_transducer(2, n, seed)
    coeffs = vdp_coeffs(T, 2**8)
    for w in itertools.product((0, 1), repeat=8):
        assert reconstruct(coeffs, list(w), 2) == from_digits(run1(T, list(w)), 2)


def test_reconstruct_examples():
    ident = vdp_coeffs(identity_oracle(2), 8)
    assert reconstruct(ident, [1, 0, 1], 2) == 5
    const = vdp_coeffs(constant_oracle("1/3", 2), 8)
    assert all(reconstruct(const, list(w), 2) == 3 for w in itertools.product((0, 1), repeat=3))
    T = synth_affine("3/5", "1/3", 2)
    cs = vdp_coeffs(T, 64)
    for w in itertools.product((0, 1), repeat=6):
        assert reconstruct(cs, list(w), 2) == from_digits(run1(T, list(w)), 2)
    with pytest.raises(ValueError):
        reconstruct(cs[:10], [0] * 6, 2)


def test_digit_oracle_route():
    sq = DigitOracle(lambda w: from_digits(w, 2) ** 2, 2)
    cs = vdp_coeffs(sq, 64, K=16)
    for c in cs:
        assert c.b == closed_form_square_b(c.m, 2) % 2 ** (16 - n_digits(c.m, 2) + 1)
    # a non-Lipschitz oracle shows up as b_m = None
    bad = DigitOracle(lambda w: sum(w) % 2, 2)
    assert any(c.b is None for c in vdp_coeffs(bad, 16, K=8))


def test_b_sequence_ids_match_values():
    T = random_transducer(2, 5, 9)
    ids, values = transducer_b_sequence(T, 512)
    cs = vdp_coeffs(T, 512)
    assert [values[i] for i in ids.tolist()] == [c.b for c in cs]
    assert ids[0] == 0


def test_coeffset_examples():
    rep = coeffset_probe(identity(2), 2**10)
    assert rep.values == {0, 1} and rep.finite
    rep = coeffset_probe(synth_affine("5/3", 0, 2), 2**10)
    assert rep.finite and rep.values == {Fraction(0), Fraction(5, 3)}
    rep = coeffset_probe(squaring_oracle(2), 2**16)
    assert rep.size >= 100 and not rep.finite
    counts = [c for _, c in rep.growth]
    assert all(a < b for a, b in zip(counts, counts[1:]))


def test_kernel_examples():
    rep = kernel_probe(np.zeros(2**5 * 64, dtype=np.int64), 2, 4, 64)
    assert rep.finite and rep.n_classes == 1
    rep = kernel_probe(np.zeros(3**5 * 81, dtype=np.int64), 3, 4, 81)
    assert rep.finite and rep.n_classes == 1
    rep = kernel_probe(thue_morse(2**5 * 256), 2, 4, 256)
    assert rep.finite and rep.n_classes == 2
    ids, _, _ = coefficient_ids(squaring_oracle(2), 2**7 * 256)
    rep = kernel_probe(ids, 2, 6, 256)
    assert rep.status == "undecided" and rep.alphabet_overflow


def test_thue_morse_kernel_brute_force():
    L = 4096
    seq = thue_morse(L * 2**6)
    subseqs = {seq[t::2**j][:L].tobytes() for j in range(6) for t in range(2**j)}
    assert len(subseqs) == 2


def test_kernel_detects_growth():
    # n -> number of trailing ones: unbounded kernel depth, probe must not claim finite
    seq = np.array([(i ^ (i + 1)).bit_length() - 1 for i in range(2**5 * 64)])
    rep = kernel_probe(seq, 2, 4, 64, max_alphabet=None)
    assert rep.status == "undecided" and not rep.alphabet_overflow


def test_kernel_preconditions():
    with pytest.raises(ValueError):
        kernel_probe(np.zeros(100), 2, 4, 8)
    with pytest.raises(ValueError):
        kernel_probe(np.zeros(10), 2, 4, 64)
    with pytest.raises(ValueError):
        kernel_probe(np.zeros(10), 2, 0, 64)


def test_function_oracle_batch_matches_scalar():
    fo = FunctionOracle(lambda m: 3 * m * m + m, 3, batch=lambda a: 3 * a * a + a)
    ids, values, _ = coefficient_ids(fo, 3**6)
    slow = vdp_coeffs(FunctionOracle(fo.fn, 3), 3**6)
    assert [values[i] for i in ids.tolist()] == [int(c.b) for c in slow]
