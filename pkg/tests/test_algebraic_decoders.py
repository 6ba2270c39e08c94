from itertools import combinations, product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isdkit.algebraic_decoders import (DecodingFailure, PolyFq, bw_decode, grs_encode,
                                       hamming_decode)
from isdkit.codes import grs_code, hamming_code
from isdkit.gf_linalg import FieldCtx

from oracles import grs_codewords, nearest, poly_eval

coeff_lists = st.lists(st.integers(0, 12), max_size=6)


@settings(max_examples=200, deadline=None)
@given(coeff_lists, coeff_lists.filter(lambda c: any(v % 13 for v in c)))
def test_polynomial_division_identity(a, b):
    ctx = FieldCtx(13)
    A, B = PolyFq.make(ctx, a), PolyFq.make(ctx, b)
    quo, rem = A.divmod(B)
    assert rem.degree < B.degree
    back = quo * B
    top = max(len(back.coeffs), len(rem.coeffs))
    summed = PolyFq.make(ctx, [(back.coeffs[i] if i < len(back.coeffs) else 0)
                               + (rem.coeffs[i] if i < len(rem.coeffs) else 0) for i in range(top)])
    assert summed == A


def test_polynomial_evaluation_matches_horner_oracle():
    ctx = FieldCtx(7)
    f = PolyFq.make(ctx, [3, 0, 5, 1])
    assert f(np.arange(7)).tolist() == [poly_eval([3, 0, 5, 1], x, 7) for x in range(7)]
    assert PolyFq.make(ctx, [0, 0]).degree == -1


def test_hamming_decoder_corrects_every_single_error_r4():
    code = hamming_code(4)
    for m in product(range(2), repeat=code.k):
        c = code.encode(np.array(m))
        for pos in range(-1, code.n):
            y = c.copy()
            if pos >= 0:
                y[pos] ^= 1
            got, e = hamming_decode(4, y)
            assert np.array_equal(got, c)
            assert np.count_nonzero(e) == (pos >= 0)


@pytest.mark.parametrize("q,n,k", [(11, 10, 4), (13, 12, 5), (17, 16, 8)])
def test_bw_with_general_multipliers(q, n, k):
    ctx = FieldCtx(q)
    rng = np.random.default_rng(q)
    x = rng.permutation(q)[:n]
    z = rng.integers(1, q, size=n)
    code = grs_code(ctx, x, z, k)
    radius = (n - k) // 2
    for _ in range(40):
        f = PolyFq.make(ctx, rng.integers(0, q, size=k))
        c = grs_encode(code, f)
        w = int(rng.integers(0, radius + 1))
        e = np.zeros(n, dtype=np.int64)
        e[rng.permutation(n)[:w]] = rng.integers(1, q, size=w)
        got_f, got_e = bw_decode(code, (c + e) % q)
        assert got_f == f and np.array_equal(got_e, e)
        # the codeword really is in the code
        assert not np.any(c @ code.H.T % q)


def test_bw_beyond_radius_never_returns_a_far_codeword():
    q, n, k = 7, 6, 2
    ctx = FieldCtx(q)
    x = list(range(1, 7))
    code = grs_code(ctx, x, [1] * n, k)
    words = grs_codewords(x, [1] * n, k, q)
    rng = np.random.default_rng(0)
    failures = 0
    for _ in range(300):
        y = rng.integers(0, q, size=n)
        d, near = nearest(words, tuple(y))
        try:
            f, e = bw_decode(code, y)
        except DecodingFailure:
            failures += 1
            assert d > (n - k) // 2
            continue
        assert np.count_nonzero(e) == d <= (n - k) // 2
        assert tuple((y - e) % q) in near
    assert failures > 0


def test_grs_encode_rejects_high_degree():
    ctx = FieldCtx(5)
    code = grs_code(ctx, [0, 1, 2, 3], [1, 1, 1, 1], 2)
    with pytest.raises(ValueError):
        grs_encode(code, PolyFq.make(ctx, [0, 0, 1]))


def test_bw_zero_message():
    ctx = FieldCtx(7)
    code = grs_code(ctx, range(1, 7), [1] * 6, 3)
    y = np.zeros(6, dtype=np.int64)
    y[2] = 4
    f, e = bw_decode(code, y)
    assert f.is_zero() and e.tolist() == [0, 0, 4, 0, 0, 0]


def test_exhaustive_small_error_patterns_are_all_distinct_syndromes():
    # sanity for the radius: weight <= 1 errors of a [6,3]_7 GRS code have distinct syndromes
    ctx = FieldCtx(7)
    code = grs_code(ctx, range(1, 7), [1] * 6, 3)
    seen = set()
    for w in (0, 1):
        for supp in combinations(range(6), w):
            for vals in product(range(1, 7), repeat=w):
                e = np.zeros(6, dtype=np.int64)
                e[list(supp)] = vals
                seen.add(tuple(e @ code.H.T % 7))
    assert len(seen) == 1 + 6 * 6
