import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isdkit.gf_linalg import (FieldCtx, NoSolution, RankDeficient, eliminate_on, hamming_weight,
                              matrix, rank, rref, row_reduce_systematic, solve_linear, vector)

from oracles import rank_by_span

PRIMES = [2, 3, 5, 7]


def small_matrices(max_rows=4, max_cols=5):
    return st.sampled_from(PRIMES).flatmap(
        lambda q: st.tuples(st.just(q), st.integers(1, max_rows), st.integers(1, max_cols)).flatmap(
            lambda t: st.tuples(st.just(t[0]), st.lists(
                st.lists(st.integers(0, t[0] - 1), min_size=t[2], max_size=t[2]),
                min_size=t[1], max_size=t[1]))))


@pytest.mark.parametrize("q", [4, 1, 0, 9, 65536, 70001])
def test_field_rejects_non_primes_and_out_of_range(q):
    with pytest.raises(ValueError):
        FieldCtx(q)


@pytest.mark.parametrize("q", [2, 3, 7, 4093, 65521])
def test_inverse_times_value_is_one(q):
    ctx = FieldCtx(q)
    xs = np.arange(1, min(q, 500))
    assert np.all(xs * ctx.inv(xs) % q == 1)
    assert ctx.inv(q - 1) == q - 1
    with pytest.raises(ZeroDivisionError):
        ctx.inv(0)


def test_vector_and_matrix_reject_bad_residues():
    ctx = FieldCtx(5)
    with pytest.raises(ValueError):
        vector(ctx, [0, 5])
    with pytest.raises(ValueError):
        matrix(ctx, [[1, -1]])
    assert matrix(ctx, [], ncols=3).shape == (0, 3)


def test_hamming_weight():
    assert hamming_weight([0, 3, 0, 1]) == 2


@settings(max_examples=150, deadline=None)
@given(small_matrices())
def test_rank_matches_span_size(qm):
    q, rows = qm
    assert rank(FieldCtx(q), np.array(rows)) == rank_by_span(rows, q)


@settings(max_examples=100, deadline=None)
@given(small_matrices())
def test_rref_is_reduced_and_row_equivalent(qm):
    q, rows = qm
    ctx = FieldCtx(q)
    m = np.array(rows)
    red, piv = rref(ctx, m)
    for i, c in enumerate(piv):
        col = np.zeros(m.shape[0], dtype=np.int64)
        col[i] = 1
        assert np.array_equal(red[:, c], col)
    assert np.all(red[len(piv):] == 0)
    # same row space: stacking does not raise the rank
    assert rank(ctx, np.vstack([m, red])) == len(piv)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(PRIMES), st.integers(1, 5), st.integers(0, 4), st.integers(0, 2**32 - 1))
def test_systematic_form(q, r, extra, seed):
    ctx = FieldCtx(q)
    rng = np.random.default_rng(seed)
    m = rng.integers(0, q, size=(r, r + extra))
    if rank(ctx, m) < r:
        with pytest.raises(RankDeficient):
            row_reduce_systematic(ctx, m)
        return
    S, perm, red = row_reduce_systematic(ctx, m)
    assert np.array_equal((S @ m % q)[:, perm], red)
    assert np.array_equal(red[:, :r], np.eye(r, dtype=np.int64))
    assert sorted(perm.tolist()) == list(range(r + extra))


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(PRIMES), st.integers(1, 4), st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_solve_linear_agrees_with_exhaustive_search(q, r, n, seed):
    ctx = FieldCtx(q)
    rng = np.random.default_rng(seed)
    a = rng.integers(0, q, size=(r, n))
    b = rng.integers(0, q, size=r)
    reachable = any(np.array_equal(a @ np.array(x) % q, b)
                    for x in np.ndindex(*([q] * n)))
    if reachable:
        x = solve_linear(ctx, a, b)
        assert np.array_equal(a @ x % q, b)
    else:
        with pytest.raises(NoSolution):
            solve_linear(ctx, a, b)


def test_eliminate_on_makes_unit_columns_or_reports_dependence():
    ctx = FieldCtx(3)
    m = np.array([[1, 2, 0, 1], [2, 1, 1, 0], [0, 0, 1, 2]])
    red = eliminate_on(ctx, m, [3, 2])
    assert np.array_equal(red[:, [3, 2]], np.array([[1, 0], [0, 1], [0, 0]]))
    assert rank(ctx, np.vstack([m, red])) == rank(ctx, m)
    assert eliminate_on(ctx, m, [0, 1]) is None  # column 1 = 2 * column 0
