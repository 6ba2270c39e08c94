"""Generic decoders: Prange, Dumer, Wagner and the ISD framework built on them.

All solvers return a :class:`SolveReport`.  Every solution in a report has been
checked with :func:`isdkit.instances.verify`, which recomputes e H^T from the
original instance rather than trusting the solver's reduced matrices.
"""
from __future__ import annotations

import math
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _enum
from .gf_linalg import eliminate_on
from .instances import DecodingInstance, verify


class InfeasibleParameters(ValueError):
    """Parameters violate a list-size or depth constraint."""


class DepthInfeasible(InfeasibleParameters):
    """The Wagner depth constraint q^l <= C(n/2^a, t/2^a)(q-1)^(t/2^a) fails."""


class IterationBudgetExceeded(RuntimeError):
    def __init__(self, report: "SolveReport"):
        super().__init__(f"no solution within {report.iterations} iterations")
        self.report = report


class SingularStreak(RuntimeError):
    """64 consecutive information-set draws were singular."""


DEFAULT_CAP = 1 << 20
MAX_RESAMPLES = 64


@dataclass
class SolveReport:
    solutions: list = field(default_factory=list)
    iterations: int = 0
    sub_calls: int = 0
    wall_ms: float = 0.0
    success: bool = False
    candidates: int = 0
    accepted: int = 0
    lifted_weight_sum: int = 0
    truncated: bool = False
    list_sizes: list = field(default_factory=list)

    def add(self, inst: DecodingInstance, e: np.ndarray, seen: set) -> None:
        key = e.tobytes()
        if key in seen:
            return
        if not verify(inst, e):
            raise AssertionError("solver produced an invalid solution")
        seen.add(key)
        self.solutions.append(e.copy())
        self.success = True


def _split_sizes(total: int, parts: int) -> list[int]:
    """Near-equal split; the remainder goes to the first parts."""
    base, rem = divmod(total, parts)
    return [base + (1 if i < rem else 0) for i in range(parts)]


def _blocks(perm: np.ndarray, parts: int) -> list[np.ndarray]:
    sizes = _split_sizes(len(perm), parts)
    cuts = np.cumsum([0] + sizes)
    return [perm[cuts[i]:cuts[i + 1]] for i in range(parts)]


def _run(inst, worker, seed, workers, budget, stop_on_success) -> SolveReport:
    """Independent restarts over ``workers`` threads, each with its own Philox stream."""
    t0 = time.perf_counter()
    stop = threading.Event()
    seen: set = set()
    lock = threading.Lock()
    report = SolveReport()
    if workers <= 1:
        worker(inst, _enum.make_rng(seed), budget, stop, report, seen, lock, stop_on_success)
    else:
        per = _split_sizes(budget, workers)
        rngs = _enum.spawn_rngs(seed, workers)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futs = [pool.submit(worker, inst, rngs[i], per[i], stop, report, seen, lock,
                                stop_on_success) for i in range(workers)]
            for f in futs:
                f.result()
    report.wall_ms = (time.perf_counter() - t0) * 1000.0
    return report


# Prange -----------------------------------------------------------------------

def prange_weight_class(n: int, k: int, t: int, q: int) -> int:
    """Weight of the guess x on the information set, drawn from D_t."""
    thr = Fraction((q - 1) * (n - k), q)
    if t < thr:
        return 0
    return max(0, min(k, t - math.floor(thr)))


def prange_success_estimate(n: int, k: int, t: int, q: int) -> float:
    j = prange_weight_class(n, k, t, q)
    num = _enum.sphere_count(n - k, t - j, q)
    den = min(q ** (n - k), _enum.sphere_count(n, t, q))
    return num / den if den else 0.0


@dataclass
class PrangeConfig:
    max_iterations: int | None = None
    seed: object = 0
    stop_on_success: bool = True
    workers: int = 1


def _default_budget(p_est: float) -> int:
    if p_est <= 0:
        return 1000
    return 1000 * math.ceil(min(1.0 / p_est, 1e9))


def draw_information_set(ctx, aug: np.ndarray, n: int, size: int, rng):
    """Pick ``size`` columns uniformly and eliminate on them; retry if dependent.

    Returns (reduced, chosen, rest).
    """
    for _ in range(MAX_RESAMPLES):
        perm = rng.permutation(n)
        chosen, rest = perm[:size], perm[size:]
        red = eliminate_on(ctx, aug, chosen)
        if red is not None:
            return red, chosen, rest
    raise SingularStreak(f"{MAX_RESAMPLES} singular draws in a row")


def prange_candidate(ctx, red: np.ndarray, ibar, i_set, x) -> np.ndarray:
    """e with e_I = x and e_Ibar = S s^T - (S H_I) x^T, for a reduced [S H | S s^T]."""
    n = red.shape[1] - 1
    e = np.zeros(n, dtype=np.int64)
    e[i_set] = x
    e[ibar] = (red[:, n] - red[:, i_set] @ x) % ctx.q
    return e


def _prange_worker(inst, rng, budget, stop, report, seen, lock, stop_on_success):
    ctx, n, t = inst.ctx, inst.n, inst.t
    r = inst.H.shape[0]
    k = n - r
    j = prange_weight_class(n, k, t, ctx.q)
    aug = np.hstack([inst.H, inst.s[:, None] % ctx.q])
    for _ in range(budget):
        if stop.is_set():
            return
        red, ibar, i_set = draw_information_set(ctx, aug, n, r, rng)
        x = _enum.random_weight_vector(k, j, ctx.q, rng)
        e = prange_candidate(ctx, red, ibar, i_set, x)
        ok = np.count_nonzero(e) == t
        with lock:
            report.iterations += 1
            report.candidates += 1
            if ok:
                report.accepted += 1
                report.add(inst, e, seen)
        if ok and stop_on_success:
            stop.set()
            return


def prange(inst: DecodingInstance, cfg: PrangeConfig | None = None) -> SolveReport:
    """Prange's algorithm.

    With ``stop_on_success`` false the full budget is spent and
    ``report.accepted`` counts the successful iterations.

    Raises:
        IterationBudgetExceeded: if no solution was found (only when stopping on success).
    """
    cfg = cfg or PrangeConfig()
    budget = cfg.max_iterations or _default_budget(
        prange_success_estimate(inst.n, inst.k, inst.t, inst.ctx.q))
    rep = _run(inst, _prange_worker, cfg.seed, cfg.workers, budget, cfg.stop_on_success)
    if cfg.stop_on_success and not rep.success:
        raise IterationBudgetExceeded(rep)
    return rep


# collision trees (Dumer is depth 1, Wagner depth a) ---------------------------

def ktree(q: int, H: np.ndarray, s: np.ndarray, blocks, weights, windows,
          list_size=None, rng=None, cap: int = DEFAULT_CAP):
    """Merge 2^a base lists pairwise, level by level.

    Base list b holds (e_b, e_b H^T) for weight-``weights[b]`` vectors supported
    on ``blocks[b]`` (all of them, or ``list_size`` sampled ones).  The last
    list stores e_b H^T - s instead.  Level j keeps the sums vanishing on the
    symbols ``windows[j]``; when the windows cover every symbol, the survivors
    are exactly errors with e H^T = s.

    Returns (supports, values, sizes_per_level, truncated).
    """
    lists = []
    last = len(blocks) - 1
    for b, (pos, w) in enumerate(zip(blocks, weights)):
        if list_size is None:
            supp, vals = _enum.enumerate_weight(len(pos), w, q)
        else:
            supp, vals = _enum.sample_weight(len(pos), w, q, list_size, rng)
        gsupp = np.asarray(pos, dtype=np.int64)[supp]
        syn = _enum.sparse_syndromes(q, H, gsupp, vals)
        if b == last:
            syn = (syn - s) % q
        lists.append((gsupp, vals, syn))
    sizes = [[len(l[2]) for l in lists]]
    truncated = False
    for win in windows:
        win = np.asarray(win, dtype=np.int64)
        merged = []
        for i in range(0, len(lists), 2):
            (sa, va, ya), (sb, vb, yb) = lists[i], lists[i + 1]
            ka, kb = _enum.pack_keys(q, ya[:, win], (-yb[:, win]) % q)
            ia, ib, tr = _enum.join_equal(ka, kb, cap)
            truncated |= tr
            merged.append((np.hstack([sa[ia], sb[ib]]), np.hstack([va[ia], vb[ib]]),
                           (ya[ia] + yb[ib]) % q))
        lists = merged
        sizes.append([len(l[2]) for l in lists])
    supp, vals, _ = lists[0]
    return supp, vals, sizes, truncated


def _dumer_worker_factory(list_size, split, cap):
    def worker(inst, rng, budget, stop, report, seen, lock, stop_on_success):
        ctx, n, t = inst.ctx, inst.n, inst.t
        r = inst.H.shape[0]
        for it in range(budget):
            if stop.is_set():
                return
            perm = np.asarray(split) if (split is not None and it == 0) else rng.permutation(n)
            blocks = _blocks(perm, 2)
            supp, vals, sizes, tr = ktree(ctx.q, inst.H, inst.s % ctx.q, blocks,
                                          _split_sizes(t, 2), [np.arange(r)],
                                          list_size, rng, cap)
            es = _enum.densify(n, supp, vals)
            with lock:
                report.iterations += 1
                report.sub_calls += 1
                report.candidates += len(es)
                report.truncated |= tr
                report.list_sizes.append(sizes)
                for e in es:
                    report.add(inst, e, seen)
                found = bool(report.solutions)
            if found and stop_on_success:
                stop.set()
                return
    return worker


def dumer(inst: DecodingInstance, list_size: int | None = None, max_iterations: int = 50,
          seed=0, stop_on_success: bool = True, split=None, workers: int = 1,
          cap: int = DEFAULT_CAP) -> SolveReport:
    """Dumer's birthday decoder.

    Each iteration draws a random split of the positions into two halves (the
    first one of size ceil(n/2)), the weight being split as ceil(t/2) and
    floor(t/2), and reports every collision.  ``split`` fixes the permutation
    of the first iteration.  With ``stop_on_success`` the loop stops after the
    first iteration that produced something; otherwise the union over all
    iterations is returned.
    """
    n, t, q = inst.n, inst.t, inst.ctx.q
    if list_size is not None:
        avail = min(_enum.sphere_count(b, w, q)
                    for b, w in zip(_split_sizes(n, 2), _split_sizes(t, 2)))
        if list_size > avail:
            raise InfeasibleParameters(f"list size {list_size} exceeds the {avail} available vectors")
    rep = _run(inst, _dumer_worker_factory(list_size, split, cap), seed, workers,
               max_iterations, stop_on_success)
    if stop_on_success and not rep.success:
        raise IterationBudgetExceeded(rep)
    return rep


def wagner_windows(r: int, a: int, ell: int) -> list[np.ndarray]:
    """a-1 windows of ell symbols, then the remaining symbols for the last merge."""
    if (a - 1) * ell > r:
        raise DepthInfeasible(f"(a-1) * ell = {(a - 1) * ell} exceeds {r} symbols")
    wins = [np.arange(j * ell, (j + 1) * ell) for j in range(a - 1)]
    wins.append(np.arange((a - 1) * ell, r))
    return wins


def wagner_ell(r: int, a: int, mode: str) -> int:
    if mode == "one_solution":
        return math.ceil(r / (a + 1))
    if mode == "amortized":
        return math.ceil(r / a)
    raise ValueError("mode must be 'one_solution' or 'amortized'")


def wagner_check(n: int, t: int, q: int, a: int, ell: int) -> int:
    """Return the smallest base-list capacity; raise DepthInfeasible if below q^ell."""
    caps = [_enum.sphere_count(b, w, q)
            for b, w in zip(_split_sizes(n, 1 << a), _split_sizes(t, 1 << a))]
    avail = min(caps)
    if q ** ell > avail:
        raise DepthInfeasible(
            f"q^ell = {q}^{ell} exceeds the {avail} vectors available per base list")
    return avail


def _wagner_worker_factory(a, ell, list_size, split, cap):
    def worker(inst, rng, budget, stop, report, seen, lock, stop_on_success):
        ctx, n, t = inst.ctx, inst.n, inst.t
        r = inst.H.shape[0]
        wins = wagner_windows(r, a, ell)
        for it in range(budget):
            if stop.is_set():
                return
            perm = np.asarray(split) if (split is not None and it == 0) else rng.permutation(n)
            supp, vals, sizes, tr = ktree(ctx.q, inst.H, inst.s % ctx.q, _blocks(perm, 1 << a),
                                          _split_sizes(t, 1 << a), wins, list_size, rng, cap)
            es = _enum.densify(n, supp, vals)
            with lock:
                report.iterations += 1
                report.sub_calls += 1
                report.candidates += len(es)
                report.truncated |= tr
                report.list_sizes.append(sizes)
                for e in es:
                    report.add(inst, e, seen)
                found = bool(report.solutions)
            if found and stop_on_success:
                stop.set()
                return
    return worker


def wagner(inst: DecodingInstance, a: int, mode: str = "amortized", seed=0,
           ell: int | None = None, list_size: int | None = None, max_iterations: int = 1,
           stop_on_success: bool = False, split=None, workers: int = 1,
           cap: int = DEFAULT_CAP) -> SolveReport:
    """Wagner's generalized birthday decoder with 2^a base lists.

    The merge width is ell = ceil((n-k)/(a+1)) in one-solution mode and
    ceil((n-k)/a) in amortized mode; base lists hold q^ell sampled vectors
    unless ``list_size`` overrides it (``list_size=0`` takes full lists).

    Raises:
        DepthInfeasible: when a base block cannot supply q^ell distinct vectors.
    """
    if a < 1:
        raise ValueError("depth a must be at least 1")
    n, t, q = inst.n, inst.t, inst.ctx.q
    r = inst.H.shape[0]
    ell = wagner_ell(r, a, mode) if ell is None else ell
    if list_size is None:
        wagner_check(n, t, q, a, ell)
        list_size = q ** ell
    elif list_size == 0:
        list_size = None
    rep = _run(inst, _wagner_worker_factory(a, ell, list_size, split, cap), seed, workers,
               max_iterations, stop_on_success)
    return rep


# ISD framework ----------------------------------------------------------------

@dataclass
class IsdParams:
    """Parameters of one ISD run.

    ``sub`` selects the sub-decoder: "dumer" (optionally with ``list_size``) or
    "wagner" (depth ``a``, amortized merge width ceil(ell/a)).
    """
    p: int
    ell: int
    sub: str = "dumer"
    list_size: int | None = None
    a: int = 1
    seed: object = 0
    max_iterations: int | None = None
    stop_on_success: bool = True
    cap: int = DEFAULT_CAP


def isd_success_estimate(n: int, k: int, t: int, q: int, p: int, ell: int) -> float:
    num = _enum.sphere_count(k + ell, p, q) * _enum.sphere_count(n - k - ell, t - p, q)
    den = min(q ** (n - k), _enum.sphere_count(n, t, q))
    return min(1.0, num / den) if den else 0.0


def alpha(n: int, k: int, t: int, q: int, p: int, ell: int, solutions: int | None = None) -> float:
    """Probability that a sub-decoder output lifts to a weight-t solution.

    The denominator is min(q^(n-k-ell), C(n,t)(q-1)^t q^-ell); passing the exact
    number of solutions replaces it by C(n,t)(q-1)^t q^-ell / solutions.
    """
    num = _enum.sphere_count(n - k - ell, t - p, q)
    sphere = _enum.sphere_count(n, t, q)
    if solutions is not None:
        return float(Fraction(num * solutions * q ** ell, sphere))
    return float(Fraction(num * q ** ell, min(q ** (n - k), sphere)))


def isd_reduce(ctx, H: np.ndarray, s: np.ndarray, jbar) -> np.ndarray | None:
    """[S H | S s^T] with S H restricted to jbar equal to (identity; zero), or None."""
    aug = np.hstack([H, (s % ctx.q)[:, None]])
    return eliminate_on(ctx, aug, jbar)


def _sub_decode(ctx, Hpp, spp, p, params: IsdParams, rng):
    m = Hpp.shape[1]
    ell = Hpp.shape[0]
    perm = rng.permutation(m)
    if params.sub == "dumer":
        return ktree(ctx.q, Hpp, spp, _blocks(perm, 2), _split_sizes(p, 2),
                     [np.arange(ell)], params.list_size, rng, params.cap)
    if params.sub == "wagner":
        a = params.a
        width = math.ceil(ell / a) if ell else 0
        wagner_check(m, p, ctx.q, a, width)
        return ktree(ctx.q, Hpp, spp, _blocks(perm, 1 << a), _split_sizes(p, 1 << a),
                     wagner_windows(ell, a, width), ctx.q ** width, rng, params.cap)
    raise ValueError(f"unknown sub-decoder {params.sub!r}")


def _isd_worker_factory(params: IsdParams):
    def worker(inst, rng, budget, stop, report, seen, lock, stop_on_success):
        ctx, n, t = inst.ctx, inst.n, inst.t
        q = ctx.q
        r = inst.H.shape[0]
        ell, p = params.ell, params.p
        aug = np.hstack([inst.H, inst.s[:, None] % q])
        top = r - ell
        for _ in range(budget):
            if stop.is_set():
                return
            red, jbar, jset = draw_information_set(ctx, aug, n, top, rng)
            Hp, sp = red[:top][:, jset], red[:top, n]
            Hpp, spp = red[top:][:, jset], red[top:, n]
            supp, vals, sizes, tr = _sub_decode(ctx, Hpp, spp, p, params, rng)
            cand = _enum.densify(len(jset), supp, vals)
            lifted = (sp[None, :] - cand @ Hp.T) % q
            wts = np.count_nonzero(lifted, axis=1)
            ok = np.flatnonzero(wts == t - p)
            with lock:
                report.iterations += 1
                report.sub_calls += 1
                report.candidates += len(cand)
                report.accepted += len(ok)
                report.lifted_weight_sum += int(wts.sum())
                report.truncated |= tr
                for i in ok:
                    e = np.zeros(n, dtype=np.int64)
                    e[jset] = cand[i]
                    e[jbar] = lifted[i]
                    report.add(inst, e, seen)
                found = bool(report.solutions)
            if found and stop_on_success:
                stop.set()
                return
    return worker


def isd(inst: DecodingInstance, params: IsdParams, workers: int = 1) -> SolveReport:
    """ISD: draw an augmented information set J of size k+ell, reduce H so that
    its columns outside J become (identity; zero), sub-decode the last ell rows at
    weight p, lift each candidate and keep those of total weight t.

    Raises:
        IterationBudgetExceeded: no solution (only when stopping on success).
        DepthInfeasible: the Wagner sub-decoder's constraint fails.
    """
    n, k, t, q = inst.n, inst.k, inst.t, inst.ctx.q
    if not 0 <= params.ell <= n - k:
        raise InfeasibleParameters("need 0 <= ell <= n-k")
    if not 0 <= params.p <= min(t, k + params.ell):
        raise InfeasibleParameters("need 0 <= p <= min(t, k+ell)")
    if params.sub == "dumer" and params.list_size is not None:
        m = k + params.ell
        avail = min(_enum.sphere_count(b, w, q)
                    for b, w in zip(_split_sizes(m, 2), _split_sizes(params.p, 2)))
        if params.list_size > avail:
            raise InfeasibleParameters(f"list size {params.list_size} exceeds {avail}")
    if params.sub == "wagner":
        width = math.ceil(params.ell / params.a) if params.ell else 0
        wagner_check(k + params.ell, params.p, q, params.a, width)
    budget = params.max_iterations or _default_budget(
        isd_success_estimate(n, k, t, q, params.p, params.ell))
    rep = _run(inst, _isd_worker_factory(params), params.seed, workers, budget,
               params.stop_on_success)
    if params.stop_on_success and not rep.success:
        raise IterationBudgetExceeded(rep)
    return rep
