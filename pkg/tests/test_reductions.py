from itertools import combinations
from math import sqrt

import numpy as np
import pytest

from isdkit.generic_decoders import PrangeConfig, dumer, prange
from isdkit.gf_linalg import FieldCtx, NoSolution, rank, solve_linear
from isdkit.instances import noisy_to_syndrome, solution_set
from isdkit.reductions import (DdpOracle, LpnOracle, ThreeDmInstance, coin_flip_ddp,
                               ddp_experiment, existence_ddp, find_matching_bruteforce,
                               is_matching, lpn_collect, lpn_weight_bound, matching_from_solution,
                               min_preimage_weights, parse_tdm, predictor_agreement,
                               random_satisfiable_tdm, read_tdm, render_tdm, std_predictor,
                               tdm_decoding_instance, threshold_ddp, tdm_to_matrix, write_tdm)

from oracles import disjoint_triples, weight_vectors

EXAMPLE = ThreeDmInstance(3, ((1, 1, 2), (2, 3, 1), (1, 2, 3), (3, 1, 2), (2, 2, 2)))
# the incidence table for EXAMPLE, copied row by row
EXAMPLE_TABLE = [
    "10100", "01001", "00010",
    "10010", "00101", "01000",
    "01000", "10011", "00100",
]

# chi-square critical value, 15 degrees of freedom, upper 0.1% tail
CHI2_15_999 = 37.697


def test_example_incidence_matrix():
    m = tdm_to_matrix(EXAMPLE)
    assert ["".join(map(str, row)) for row in m] == EXAMPLE_TABLE
    assert np.array_equal(m[:, [1, 2, 3]].sum(axis=1), np.ones(9, dtype=np.int64))


def test_example_is_solved_by_decoding():
    inst = tdm_decoding_instance(EXAMPLE)
    sols = solution_set(inst)
    assert [e.tolist() for e in sols] == [[0, 1, 1, 1, 0]]
    rep = dumer(inst, max_iterations=200, seed=0)
    assert matching_from_solution(EXAMPLE, rep.solutions[0]) == [1, 2, 3]
    assert is_matching(EXAMPLE, [1, 2, 3])


def test_empty_triple_set():
    assert tdm_to_matrix(ThreeDmInstance(2, ())).shape == (6, 0)


def test_instance_without_matching():
    inst = ThreeDmInstance(2, ((1, 2, 1),))
    assert find_matching_bruteforce(inst) is None
    assert len(solution_set(tdm_decoding_instance(inst))) == 0


@pytest.mark.parametrize("seed", range(6))
def test_column_sums_are_all_one_exactly_for_disjoint_triples(seed):
    inst, planted = random_satisfiable_tdm(3, 5, seed=seed)
    m = tdm_to_matrix(inst)
    assert np.all(m.sum(axis=0) == 3)
    for combo in combinations(range(len(inst.triples)), inst.size):
        all_one = bool(np.all(m[:, list(combo)].sum(axis=1) == 1))
        assert all_one == disjoint_triples([inst.triples[j] for j in combo])
    assert disjoint_triples([inst.triples[j] for j in planted])


@pytest.mark.parametrize("seed", range(5))
def test_decoder_matchings_pass_the_independent_checker(seed):
    inst, _ = random_satisfiable_tdm(4, 8, seed=seed)
    dec = tdm_decoding_instance(inst)
    rep = dumer(dec, max_iterations=400, seed=seed, stop_on_success=False)
    assert rep.solutions
    for e in rep.solutions:
        assert disjoint_triples([inst.triples[j] for j in matching_from_solution(inst, e)])


def test_tdm_validation_and_text_round_trip(tmp_path):
    with pytest.raises(ValueError):
        ThreeDmInstance(2, ((1, 2, 3),))
    with pytest.raises(ValueError):
        ThreeDmInstance(2, ((1, 2, 1), (1, 2, 1)))
    assert parse_tdm(render_tdm(EXAMPLE)) == EXAMPLE
    write_tdm(tmp_path / "x.3dm", EXAMPLE)
    assert read_tdm(tmp_path / "x.3dm") == EXAMPLE
    assert (tmp_path / "x.3dm").read_text().splitlines()[0] == "3 5"
    with pytest.raises(ValueError):
        parse_tdm("3 2\n1 1 1\n")


# LPN ----------------------------------------------------------------------------

def test_lpn_stream_is_deterministic_and_sealed():
    a, b = LpnOracle(8, 0.1, seed=4), LpnOracle(8, 0.1, seed=4)
    for _ in range(20):
        x, y = a.query(), b.query()
        assert np.array_equal(x[0], y[0]) and x[1] == y[1]
    with pytest.raises(PermissionError):
        a.secret
    with pytest.raises(PermissionError):
        a.errors


def test_noiseless_square_system_recovers_the_secret():
    ctx = FieldCtx(2)
    recovered = 0
    for seed in range(10):
        oracle = LpnOracle(10, 0.0, seed=seed, white_box=True)
        inst = lpn_collect(oracle, 10)
        if rank(ctx, inst.G) < 10:
            continue
        s = solve_linear(ctx, inst.G.T, inst.y)
        assert np.array_equal(s, oracle.secret)
        recovered += 1
    assert recovered >= 1


def test_prange_recovers_the_lpn_secret():
    ctx = FieldCtx(2)
    for seed in range(5):
        oracle = LpnOracle(10, 0.05, seed=seed, white_box=True)
        noisy = lpn_collect(oracle, 30)
        dec = noisy_to_syndrome(noisy)
        e = prange(dec, PrangeConfig(seed=seed)).solutions[0]
        try:
            s = solve_linear(ctx, noisy.G.T, (noisy.y - e) % 2)
        except NoSolution:
            pytest.fail("decoded error does not lead back to a codeword")
        assert np.array_equal(s, oracle.secret)


def test_lpn_error_weight_concentrates():
    n, tau, streams = 200, 0.1, 400
    band = 3 * sqrt(tau * (1 - tau) / n)
    inside = 0
    for seed in range(streams):
        oracle = LpnOracle(4, tau, seed=seed, white_box=True)
        inst = lpn_collect(oracle, n)
        inside += abs(inst.t / n - tau) <= band
    # a 3-sigma band misses about 0.3% of streams
    assert inside / streams >= 0.98
    assert lpn_weight_bound(n, tau) == 33


# decision decoding --------------------------------------------------------------

def test_min_preimage_weights_match_enumeration():
    H = np.random.default_rng(1).integers(0, 2, size=(4, 7))
    best = min_preimage_weights(H)
    expected = np.full(16, -1)
    for w in range(7, -1, -1):
        for e in weight_vectors(7, w, 2):
            key = sum(int(v) << i for i, v in enumerate(H @ np.array(e) % 2))
            expected[key] = w
    assert best.tolist() == expected.tolist()


def test_constant_distinguisher_has_no_advantage():
    run = ddp_experiment(DdpOracle(lambda H, s: 1), 10, 4, 2, 2, 500, seed=0)
    assert run.advantage == 0.0


def test_existence_distinguisher_is_nearly_perfect_below_gv():
    run = ddp_experiment(existence_ddp(1), 14, 1, 1, 2, 2000, seed=3)
    # P(a uniform syndrome has a weight-1 preimage) = 14 / 2^13; when no uniform draw hits,
    # sigma is 0 and the estimate sits 7/8192 above the mean, hence the 1e-3 floor
    assert abs(run.advantage - 0.5 * (1 - 14 / 2 ** 13)) <= 3 * run.sigma + 1e-3


def test_success_rate_is_one_half_plus_advantage():
    # thresholded weight statistic: advantage about 0.2 at these sizes
    run = ddp_experiment(threshold_ddp(6), 14, 1, 6, 2, 3000, seed=5)
    assert 0.1 < run.advantage < 0.35
    # equality holds exactly when the two classes are equally represented
    imbalance = abs(run.count_planted - run.count_uniform) / run.trials
    assert abs(run.success_rate - (0.5 + run.advantage)) <= imbalance + 3 * run.sigma


def test_coin_flip_predictor_agrees_half_the_time():
    run = predictor_agreement(coin_flip_ddp(seed=1), 12, 4, 3, 4000, seed=2)
    assert abs(run.rate - 0.5) <= 3 * sqrt(0.25 / run.trials)


def test_predictor_matrix_is_uniform():
    # record the matrices the distinguisher sees; with H uniform they must be uniform too
    seen = []
    spy = DdpOracle(lambda H, s: seen.append(tuple(H.ravel())) or 0)
    rng = np.random.default_rng(9)
    trials = 8000
    for i in range(trials):
        H = rng.integers(0, 2, size=(2, 2))
        r = rng.integers(0, 2, size=2)
        std_predictor(spy, H, np.zeros(2, dtype=np.int64), r, seed=i)
    counts = np.zeros(16)
    for m in seen:
        counts[int("".join(map(str, m)), 2)] += 1
    exp = trials / 16
    chi2 = float(((counts - exp) ** 2 / exp).sum())
    assert chi2 < CHI2_15_999
