from math import comb, sqrt

import numpy as np
import pytest

from isdkit.generic_decoders import (DepthInfeasible, InfeasibleParameters,
                                     IterationBudgetExceeded, IsdParams, PrangeConfig, alpha,
                                     draw_information_set, dumer, isd, isd_reduce, prange,
                                     prange_candidate, prange_weight_class, wagner, wagner_check,
                                     wagner_ell, wagner_windows)
from isdkit.gf_linalg import FieldCtx
from isdkit.instances import DecodingInstance, count_solutions, gen_dp, solution_set, verify


def _sols(rep):
    return {tuple(e) for e in rep.solutions}


# Prange -------------------------------------------------------------------------

@pytest.mark.parametrize("n,k,t,q,j", [
    (20, 10, 3, 2, 0),      # t < (q-1)(n-k)/q
    (20, 10, 5, 2, 0),      # boundary: t = floor(thr) gives j = 0
    (20, 10, 8, 2, 3),      # middle regime
    (20, 10, 19, 2, 10),    # clamped to k
    (30, 15, 11, 3, 1),
])
def test_weight_class(n, k, t, q, j):
    assert prange_weight_class(n, k, t, q) == j


def test_prange_zero_weight():
    inst = gen_dp(FieldCtx(3), 12, 0.5, 0.0, seed=1)
    rep = prange(inst)
    assert rep.iterations == 1 and not rep.solutions[0].any()


def test_prange_candidate_satisfies_the_reduced_system():
    ctx = FieldCtx(3)
    inst = gen_dp(ctx, 16, 0.5, 0.25, seed=4)
    rng = np.random.default_rng(0)
    aug = np.hstack([inst.H, inst.s[:, None]])
    for _ in range(20):
        red, ibar, iset = draw_information_set(ctx, aug, 16, 8, rng)
        x = rng.integers(0, 3, size=8)
        e = prange_candidate(ctx, red, ibar, iset, x)
        # S H e^T = S s^T, hence H e^T = s^T
        assert np.array_equal(red[:, :16] @ e % 3, red[:, 16])
        assert np.array_equal(inst.H @ e % 3, inst.s)


def test_prange_near_the_easy_regime_is_fast():
    # t = round((q-1)(n-k)/q): a weight-t solution appears after a handful of draws
    ctx = FieldCtx(3)
    worst = 0
    for seed in range(100):
        inst = gen_dp(ctx, 60, 0.5, 20 / 60, seed=seed)
        rep = prange(inst, PrangeConfig(seed=seed))
        worst = max(worst, rep.iterations)
    assert worst <= 200


def test_prange_budget_exhaustion():
    ctx = FieldCtx(2)
    base = gen_dp(ctx, 16, 0.5, 0.25, seed=3)
    # weight 1 with a syndrome that is not a column: no solution exists
    s = (base.H[:, 0] + base.H[:, 1]) % 2
    assert not any(np.array_equal(s, c) for c in base.H.T)
    inst = DecodingInstance(ctx, base.H, s, 1)
    with pytest.raises(IterationBudgetExceeded) as info:
        prange(inst, PrangeConfig(max_iterations=50))
    assert info.value.report.iterations == 50


def test_prange_iteration_counts_are_geometric():
    ctx = FieldCtx(2)
    inst = gen_dp(ctx, 20, 0.5, 0.15, seed=8)
    probe = prange(inst, PrangeConfig(max_iterations=20_000, seed=1, stop_on_success=False))
    p = probe.accepted / probe.iterations
    counts = np.array([prange(inst, PrangeConfig(seed=1000 + i)).iterations for i in range(400)])
    mean, sigma = 1 / p, sqrt((1 - p) / p ** 2 / len(counts))
    assert abs(counts.mean() - mean) <= 3 * sigma + 3 * sqrt(p * (1 - p) / probe.iterations) / p ** 2
    # a geometric law has P(N = 1) = p
    assert abs((counts == 1).mean() - p) <= 3 * sqrt(p * (1 - p) / len(counts))


def test_prange_with_workers_still_verifies():
    inst = gen_dp(FieldCtx(2), 30, 0.5, 0.1, seed=2)
    rep = prange(inst, PrangeConfig(seed=5, workers=3))
    assert rep.success and all(verify(inst, e) for e in rep.solutions)


# Dumer / Wagner -----------------------------------------------------------------

def test_dumer_zero_weight():
    inst = gen_dp(FieldCtx(2), 12, 0.5, 0.0, seed=1)
    rep = dumer(inst)
    assert _sols(rep) == {tuple([0] * 12)}


def test_dumer_odd_weight_union_is_complete():
    inst = gen_dp(FieldCtx(3), 12, 0.5, 3 / 12, seed=6)
    rep = dumer(inst, max_iterations=60, stop_on_success=False, seed=2)
    assert _sols(rep) == {tuple(e) for e in solution_set(inst)}


def test_dumer_one_iteration_count_matches_the_split_expectation():
    # uniform H and uniform s: one split finds on average C(12,5)^2 / 2^18 solutions
    q, n, k, t = 2, 24, 6, 10
    rng = np.random.default_rng(123)
    found = []
    for seed in range(100):
        H = rng.integers(0, 2, size=(n - k, n))
        s = rng.integers(0, 2, size=n - k)
        rep = dumer(DecodingInstance(FieldCtx(q), H, s, t), max_iterations=1,
                    stop_on_success=False, seed=seed)
        found.append(len(rep.solutions))
    found = np.array(found)
    expected = comb(12, 5) ** 2 / 2 ** 18
    assert abs(found.mean() - expected) <= 3 * found.std(ddof=1) / sqrt(len(found))


def test_dumer_list_size_guard():
    inst = gen_dp(FieldCtx(2), 12, 0.5, 2 / 12, seed=1)
    with pytest.raises(InfeasibleParameters):
        dumer(inst, list_size=7)  # only C(6,1) = 6 vectors per half


def test_wagner_depth_one_equals_dumer_on_the_same_split():
    ctx = FieldCtx(2)
    for seed in range(5):
        inst = gen_dp(ctx, 14, 0.5, 4 / 14, seed=seed)
        split = np.random.default_rng(seed).permutation(14)
        d = dumer(inst, max_iterations=1, stop_on_success=False, split=split)
        w = wagner(inst, 1, "amortized", ell=7, list_size=0, split=split)
        assert _sols(d) == _sols(w)


def test_wagner_window_layout():
    wins = wagner_windows(10, 3, 3)
    assert [w.tolist() for w in wins] == [[0, 1, 2], [3, 4, 5], [6, 7, 8, 9]]
    assert wagner_ell(24, 2, "amortized") == 12 and wagner_ell(24, 2, "one_solution") == 8
    with pytest.raises(DepthInfeasible):
        wagner_windows(4, 3, 3)


def test_wagner_depth_constraint():
    assert wagner_check(48, 16, 2, 2, 8) == comb(12, 4)
    with pytest.raises(DepthInfeasible):
        wagner_check(32, 8, 2, 2, 12)


def test_wagner_amortized_output_count():
    # n=48, k=32, t=16, a=2: ell = 8, lists of 2^8 vectors, about 2^8 outputs per run
    ctx = FieldCtx(2)
    counts, level1 = [], []
    for seed in range(40):
        inst = gen_dp(ctx, 48, 32 / 48, 16 / 48, seed=seed)
        rep = wagner(inst, 2, "amortized", seed=seed)
        assert all(verify(inst, e) for e in rep.solutions)
        counts.append(len(rep.solutions))
        level1.extend(rep.list_sizes[0][1])
    counts, level1 = np.array(counts), np.array(level1)
    assert abs(counts.mean() - 256) <= 3 * counts.std(ddof=1) / sqrt(len(counts))
    # intermediate lists keep their size: L^2 / q^ell = L
    assert abs(level1.mean() - 256) <= 3 * level1.std(ddof=1) / sqrt(len(level1))


# ISD ---------------------------------------------------------------------------

def test_isd_block_identity():
    ctx = FieldCtx(3)
    inst = gen_dp(ctx, 18, 0.5, 0.2, seed=1)
    rng = np.random.default_rng(5)
    ell = 3
    r = 9
    for _ in range(10):
        jbar = rng.permutation(18)[: r - ell]
        red = isd_reduce(ctx, inst.H, inst.s, jbar)
        if red is None:
            continue
        block = red[:, jbar]
        assert np.array_equal(block[: r - ell], np.eye(r - ell, dtype=np.int64))
        assert not block[r - ell:].any()


def test_isd_degenerates_to_prange():
    ctx = FieldCtx(2)
    inst = gen_dp(ctx, 20, 0.5, 0.1, seed=9)
    a = isd(inst, IsdParams(p=0, ell=0, seed=3, max_iterations=300, stop_on_success=False))
    b = prange(inst, PrangeConfig(max_iterations=300, seed=3, stop_on_success=False))
    pa, pb = a.accepted / a.iterations, b.accepted / b.iterations
    pm = (pa + pb) / 2
    assert abs(pa - pb) <= 3 * sqrt(pm * (1 - pm) * 2 / 300)
    assert _sols(a) <= {tuple(e) for e in solution_set(inst)}


@pytest.mark.parametrize("sub,a,p,ell", [("dumer", 1, 2, 4), ("wagner", 2, 4, 4)])
def test_isd_solutions_belong_to_the_solution_set(sub, a, p, ell):
    ctx = FieldCtx(2)
    inst = gen_dp(ctx, 30, 0.5, 0.2, seed=4)
    rep = isd(inst, IsdParams(p=p, ell=ell, sub=sub, a=a, seed=1))
    assert rep.success
    for e in rep.solutions:
        assert verify(inst, e)
        assert any(np.array_equal(e, x) for x in solution_set(inst))
    assert count_solutions(ctx, inst.H, inst.s, inst.t, limit=1000) >= len(rep.solutions)


def test_isd_typical_lifted_weight():
    # over uniform codes and syndromes, lifted parts have mean weight (q-1)(n-k-ell)/q = 4
    ctx = FieldCtx(2)
    rng = np.random.default_rng(2)
    means = []
    for seed in range(300):
        H = rng.integers(0, 2, size=(12, 24))
        s = rng.integers(0, 2, size=12)
        inst = DecodingInstance(ctx, H, s, 3)
        rep = isd(inst, IsdParams(p=2, ell=4, seed=seed, max_iterations=3,
                                  stop_on_success=False))
        means.append(rep.lifted_weight_sum / rep.candidates)
    means = np.array(means)
    # candidates of one instance are correlated, so the error bar is taken across instances
    assert abs(means.mean() - 4.0) <= 3 * means.std(ddof=1) / sqrt(len(means))


def test_isd_parameter_checks():
    inst = gen_dp(FieldCtx(2), 20, 0.5, 0.1, seed=1)
    with pytest.raises(InfeasibleParameters):
        isd(inst, IsdParams(p=1, ell=11))
    with pytest.raises(InfeasibleParameters):
        isd(inst, IsdParams(p=3, ell=2))
    with pytest.raises(DepthInfeasible):
        isd(inst, IsdParams(p=2, ell=6, sub="wagner", a=2))


def test_alpha_with_exact_count():
    assert alpha(24, 12, 3, 2, 2, 4, solutions=1) == pytest.approx(8 * 16 / comb(24, 3))
    assert alpha(24, 12, 3, 2, 2, 4) == pytest.approx(8 * 16 / comb(24, 3))
