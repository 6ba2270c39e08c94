"""Reductions: 3DM to syndrome decoding, LPN samples to a noisy codeword, and a
predictor for x.r built from a decision-decoding distinguisher."""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from itertools import combinations
from typing import Callable

import numpy as np

from . import _enum
from .gf_linalg import FieldCtx
from .instances import DecodingInstance, NoisyCodewordInstance


# three-dimensional matching ------------------------------------------------------

@dataclass(frozen=True)
class ThreeDmInstance:
    """Triples over {1..size}^3; a solution picks ``size`` pairwise disjoint triples."""
    size: int
    triples: tuple

    def __post_init__(self):
        trip = tuple(tuple(int(v) for v in u) for u in self.triples)
        object.__setattr__(self, "triples", trip)
        if self.size < 1:
            raise ValueError("|T| must be positive")
        for u in trip:
            if len(u) != 3 or not all(1 <= v <= self.size for v in u):
                raise ValueError(f"triple {u} is not in [1, {self.size}]^3")
        if len(set(trip)) != len(trip):
            raise ValueError("duplicate triple")


def tdm_to_matrix(inst: ThreeDmInstance) -> np.ndarray:
    """3|T| x |U| binary incidence matrix: one indicator block per coordinate."""
    T = inst.size
    m = np.zeros((3 * T, len(inst.triples)), dtype=np.int64)
    for j, u in enumerate(inst.triples):
        for block, v in enumerate(u):
            m[block * T + v - 1, j] = 1
    return m


def tdm_decoding_instance(inst: ThreeDmInstance) -> DecodingInstance:
    """(H_3DM, all-one syndrome, t = |T|).  H is usually rank deficient."""
    H = tdm_to_matrix(inst)
    return DecodingInstance(FieldCtx(2), H, np.ones(H.shape[0], dtype=np.int64), inst.size)


def is_matching(inst: ThreeDmInstance, chosen) -> bool:
    """Independent check: |T| triples, no shared value in any coordinate."""
    chosen = list(chosen)
    if len(chosen) != inst.size or len(set(chosen)) != len(chosen):
        return False
    picked = [inst.triples[j] for j in chosen]
    return all(len({u[c] for u in picked}) == inst.size for c in range(3))


def matching_from_solution(inst: ThreeDmInstance, e) -> list[int]:
    """Triple indices (0-based) in the support of a decoding solution."""
    return [int(j) for j in np.flatnonzero(np.asarray(e))]


def find_matching_bruteforce(inst: ThreeDmInstance) -> list[int] | None:
    for combo in combinations(range(len(inst.triples)), inst.size):
        if is_matching(inst, combo):
            return list(combo)
    return None


def random_satisfiable_tdm(size: int, extra: int, seed=0) -> tuple[ThreeDmInstance, list[int]]:
    """A planted matching plus ``extra`` random distinct triples, shuffled.

    Returns the instance and the positions of the planted matching.
    """
    rng = _enum.make_rng(seed)
    ys, zs = rng.permutation(size) + 1, rng.permutation(size) + 1
    planted = [(i + 1, int(ys[i]), int(zs[i])) for i in range(size)]
    pool = set(planted)
    if extra > size ** 3 - size:
        raise ValueError("not enough distinct triples")
    triples = list(planted)
    while len(triples) < size + extra:
        u = tuple(int(v) for v in rng.integers(1, size + 1, size=3))
        if u not in pool:
            pool.add(u)
            triples.append(u)
    order = rng.permutation(len(triples))
    shuffled = [triples[i] for i in order]
    where = sorted(int(np.flatnonzero(order == i)[0]) for i in range(size))
    return ThreeDmInstance(size, tuple(shuffled)), where


def render_tdm(inst: ThreeDmInstance) -> str:
    lines = [f"{inst.size} {len(inst.triples)}"] + [" ".join(map(str, u)) for u in inst.triples]
    return "\n".join(lines) + "\n"


def parse_tdm(text: str) -> ThreeDmInstance:
    rows = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not rows or len(rows[0]) != 2:
        raise ValueError("first line must be '|T| |U|'")
    size, count = int(rows[0][0]), int(rows[0][1])
    body = rows[1:]
    if len(body) != count:
        raise ValueError(f"expected {count} triples, found {len(body)}")
    return ThreeDmInstance(size, tuple(tuple(int(v) for v in r) for r in body))


def read_tdm(path: str | os.PathLike) -> ThreeDmInstance:
    with open(path, encoding="ascii") as fh:
        return parse_tdm(fh.read())


def write_tdm(path: str | os.PathLike, inst: ThreeDmInstance) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(render_tdm(inst))


# LPN ---------------------------------------------------------------------------

class LpnOracle:
    """Returns (a, <secret, a> + e) with a uniform in F_2^k and e ~ Bernoulli(tau).

    ``white_box`` exposes the secret and the realized errors; it exists for tests.
    """

    def __init__(self, k: int, tau: float, seed=0, white_box: bool = False):
        if k < 1 or not 0 <= tau < 0.5:
            raise ValueError("need k >= 1 and 0 <= tau < 1/2")
        self.k, self.tau, self.white_box = k, tau, white_box
        self._rng = _enum.make_rng(seed)
        self._secret = self._rng.integers(0, 2, size=k, dtype=np.int64)
        self._errors: list[int] = []
        self.queries = 0

    def query(self) -> tuple[np.ndarray, int]:
        a = self._rng.integers(0, 2, size=self.k, dtype=np.int64)
        e = int(self._rng.random() < self.tau)
        self._errors.append(e)
        self.queries += 1
        return a, int((a @ self._secret + e) % 2)

    def _require_white_box(self):
        if not self.white_box:
            raise PermissionError("oracle is not in white-box mode")

    @property
    def secret(self) -> np.ndarray:
        self._require_white_box()
        return self._secret.copy()

    @property
    def errors(self) -> np.ndarray:
        self._require_white_box()
        return np.array(self._errors, dtype=np.int64)


def lpn_weight_bound(n: int, tau: float) -> int:
    """ceil(tau n + 3 sqrt(n tau (1 - tau))): the error weight assumed without white-box access."""
    return math.ceil(tau * n + 3 * math.sqrt(n * tau * (1 - tau)))


def lpn_collect(oracle: LpnOracle, n: int) -> NoisyCodewordInstance:
    """n queries as y = s G + e, with the query vectors a_i as the columns of G."""
    if n < oracle.k:
        raise ValueError("need at least k samples")
    start = oracle.queries
    cols, ys = zip(*(oracle.query() for _ in range(n)))
    G = np.array(cols, dtype=np.int64).T
    y = np.array(ys, dtype=np.int64)
    if oracle.white_box:
        e = oracle.errors[start:start + n]
        return NoisyCodewordInstance(FieldCtx(2), G, y, int(e.sum()), e)
    return NoisyCodewordInstance(FieldCtx(2), G, y, lpn_weight_bound(n, oracle.tau))


# decision decoding ---------------------------------------------------------------

@dataclass
class DdpOracle:
    """A distinguisher: maps (H, s) to a guess of whether s is a weight-t syndrome."""
    fn: Callable[[np.ndarray, np.ndarray], int]
    advantage: float | None = None

    def __call__(self, H, s) -> int:
        return int(self.fn(H, s)) & 1


def coin_flip_ddp(seed=0) -> DdpOracle:
    rng = _enum.make_rng(seed)
    return DdpOracle(lambda H, s: int(rng.integers(0, 2)), 0.0)


def min_preimage_weights(H) -> np.ndarray:
    """Binary H: minimum weight of a preimage of every syndrome (packed LSB first); -1 if none."""
    H = np.asarray(H, dtype=np.int64) % 2
    r, n = H.shape
    if n > 22:
        raise ValueError("exhaustive preimage search needs n <= 22")
    colkeys = (H << np.arange(r)[:, None]).sum(axis=0)
    syn = np.zeros(1, dtype=np.int64)
    wt = np.zeros(1, dtype=np.int64)
    for i in range(n):
        syn = np.concatenate([syn, syn ^ colkeys[i]])
        wt = np.concatenate([wt, wt + 1])
    best = np.full(1 << r, n + 1, dtype=np.int64)
    np.minimum.at(best, syn, wt)
    best[best > n] = -1
    return best


def _syndrome_key(s) -> int:
    s = np.asarray(s, dtype=np.int64) % 2
    return int((s << np.arange(s.size)).sum())


def threshold_ddp(threshold: int) -> DdpOracle:
    """Say 'planted' when s has a preimage of weight at most ``threshold``."""
    def fn(H, s):
        w = min_preimage_weights(H)[_syndrome_key(s)]
        return int(0 <= w <= threshold)
    return DdpOracle(fn)


def existence_ddp(t: int) -> DdpOracle:
    """Exact test for a weight-t preimage by enumeration of S_t."""
    def fn(H, s):
        H = np.asarray(H, dtype=np.int64) % 2
        supp, vals = _enum.enumerate_weight(H.shape[1], t, 2)
        syn = _enum.sparse_syndromes(2, H, supp, vals)
        return int(np.any(np.all(syn == np.asarray(s) % 2, axis=1)))
    return DdpOracle(fn)


def std_predictor(ddp: DdpOracle, H, s, r, seed=0) -> int:
    """Guess x.r from (H, s = x H^T) and r using one call to a distinguisher.

    With H' = H - u^T r for a uniform u, s is a planted syndrome for H' when
    x.r = 0 and a uniform one when x.r = 1.  The distinguisher answers 1 for
    'planted', so its complement is the guess.
    """
    H = np.asarray(H, dtype=np.int64) % 2
    r = np.asarray(r, dtype=np.int64) % 2
    rng = _enum.make_rng(seed)
    u = rng.integers(0, 2, size=H.shape[0], dtype=np.int64)
    H2 = (H - np.outer(u, r)) % 2
    return 1 - ddp(H2, s)


@dataclass
class DdpRun:
    ones_planted: int = 0
    count_planted: int = 0
    ones_uniform: int = 0
    count_uniform: int = 0
    correct: int = 0
    trials: int = 0

    @property
    def advantage(self) -> float:
        return 0.5 * (self.ones_planted / self.count_planted - self.ones_uniform / self.count_uniform)

    @property
    def sigma(self) -> float:
        p1 = self.ones_planted / self.count_planted
        p0 = self.ones_uniform / self.count_uniform
        return 0.5 * math.sqrt(p1 * (1 - p1) / self.count_planted + p0 * (1 - p0) / self.count_uniform)

    @property
    def success_rate(self) -> float:
        return self.correct / self.trials


def ddp_experiment(ddp: DdpOracle, n: int, k: int, t: int, q: int, samples: int,
                   seed=0) -> DdpRun:
    """Draw b uniformly, feed (H, s) ~ D_b to the distinguisher, tally the answers."""
    rng = _enum.make_rng(seed)
    run = DdpRun()
    r = n - k
    for _ in range(samples):
        b = int(rng.integers(0, 2))
        H = rng.integers(0, q, size=(r, n), dtype=np.int64)
        if b:
            x = _enum.random_weight_vector(n, t, q, rng)
            s = (H @ x) % q
        else:
            s = rng.integers(0, q, size=r, dtype=np.int64)
        out = ddp(H, s)
        if b:
            run.count_planted += 1
            run.ones_planted += out
        else:
            run.count_uniform += 1
            run.ones_uniform += out
        run.correct += out == b
        run.trials += 1
    return run


def ddp_advantage(ddp: DdpOracle, n: int, k: int, t: int, q: int, samples: int,
                  seed=0) -> tuple[float, float]:
    """Monte-Carlo advantage estimate and its binomial standard error."""
    run = ddp_experiment(ddp, n, k, t, q, samples, seed)
    return run.advantage, run.sigma


@dataclass
class PredictorRun:
    agree: int = 0
    trials: int = 0

    @property
    def rate(self) -> float:
        return self.agree / self.trials

    @property
    def sigma(self) -> float:
        p = self.rate
        return math.sqrt(p * (1 - p) / self.trials)


def predictor_agreement(ddp: DdpOracle, n: int, k: int, t: int, trials: int,
                        seed=0) -> PredictorRun:
    """How often std_predictor returns x.r over uniform H, weight-t x and uniform r."""
    ss = np.random.SeedSequence(seed)
    rng = _enum.make_rng(ss.spawn(1)[0])
    run = PredictorRun()
    for child in ss.spawn(trials):
        H = rng.integers(0, 2, size=(n - k, n), dtype=np.int64)
        x = _enum.random_weight_vector(n, t, 2, rng)
        r = rng.integers(0, 2, size=n, dtype=np.int64)
        s = (H @ x) % 2
        guess = std_predictor(ddp, H, s, r, seed=child)
        run.agree += guess == int(x @ r % 2)
        run.trials += 1
    return run
