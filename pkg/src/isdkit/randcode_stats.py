"""Statistics of random codes: q-ary entropy, sphere sizes, GV distance, moments, statistical distance."""
from __future__ import annotations

import math
from collections.abc import Mapping
from fractions import Fraction

import numpy as np

from . import _enum
from .codes import TooLarge, min_distance_bruteforce, random_code
from .gf_linalg import FieldCtx
from .instances import weight_syndromes


class DomainError(ValueError):
    pass


class SupportMismatch(ValueError):
    pass


# entropy --------------------------------------------------------------------

def entropy(q: int, x: float) -> float:
    """h_q(x) = -x log_q(x/(q-1)) - (1-x) log_q(1-x), continuous at 0 and 1."""
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x = {x} outside [0, 1]")
    lq = math.log(q)
    out = 0.0
    if x > 0:
        out -= x * math.log(x / (q - 1)) / lq
    if x < 1:
        out -= (1 - x) * math.log1p(-x) / lq
    return out


def _bisect(f, lo: float, hi: float, tol: float = 1e-15) -> float:
    flo = f(lo)
    for _ in range(200):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def entropy_inv_minus(q: int, y: float) -> float:
    """Inverse of h_q on [0, (q-1)/q]."""
    if not 0.0 <= y <= 1.0:
        raise DomainError(f"y = {y} outside [0, 1]")
    top = (q - 1) / q
    if y == 0.0:
        return 0.0
    if y == 1.0:
        return top
    return _bisect(lambda x: entropy(q, x) - y, 0.0, top)


def entropy_inv_plus(q: int, y: float) -> float:
    """Inverse of h_q on [(q-1)/q, 1]; defined for y in [log_q(q-1), 1]."""
    low = math.log(q - 1) / math.log(q) if q > 2 else 0.0
    if not low - 1e-15 <= y <= 1.0:
        raise DomainError(f"y = {y} outside [{low}, 1]")
    top = (q - 1) / q
    if y == 1.0:
        return top
    if y <= low:
        return 1.0
    # h_q is decreasing on this branch
    return _bisect(lambda x: entropy(q, x) - y, top, 1.0)


# spheres and GV ---------------------------------------------------------------

def sphere_size(n: int, t: int, q: int) -> int:
    return _enum.sphere_count(n, t, q)


def sphere_exponent(tau: float, q: int) -> float:
    return entropy(q, tau)


def gv_distance(n: int, k: int, q: int) -> int:
    """Largest t with sum_{l <= t} C(n, l)(q-1)^l <= q^(n-k)."""
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    budget = q ** (n - k)
    acc = 0
    t = -1
    term = 1  # C(n, l)(q-1)^l, updated multiplicatively
    for l in range(n + 1):
        if l:
            term = term * (n - l + 1) * (q - 1) // l
        if acc + term > budget:
            break
        acc += term
        t = l
    return t


def tau_minus(q: int, R: float) -> float:
    return entropy_inv_minus(q, 1 - R)


def tau_plus(q: int, R: float) -> float:
    low = math.log(q - 1) / math.log(q)
    if R > 1 - low + 1e-15:
        raise DomainError("tau_plus needs R <= 1 - log_q(q-1)")
    return entropy_inv_plus(q, 1 - R)


# moments ----------------------------------------------------------------------

def expected_solutions(n: int, k: int, t: int, q: int) -> Fraction:
    """E_H N_t(C, s) = C(n,t)(q-1)^t / q^(n-k), exactly."""
    return Fraction(sphere_size(n, t, q), q ** (n - k))


def moment_bounds(n: int, k: int, t: int, q: int, a: float) -> tuple[float, float]:
    """(Markov bound on P(N_t > a), Chebyshev-type bound on P(|N_t - E| >= a))."""
    if a <= 0:
        raise ValueError("a must be positive")
    mean = expected_solutions(n, k, t, q)
    markov = float(mean) / a
    chebyshev = (q - 1) * float(mean) / (a * a)
    return markov, chebyshev


def average_dp_solutions(n: int, k: int, t: int, q: int) -> Fraction:
    """Mean number of weight-t solutions of a planted instance: 1 + (#S_t - 1)/q^(n-k)."""
    return 1 + Fraction(sphere_size(n, t, q) - 1, q ** (n - k))


def membership_probability(n: int, k: int, q: int) -> Fraction:
    """P_H(y H^T = s) for a fixed nonzero y."""
    return Fraction(1, q ** (n - k))


# statistical distance ----------------------------------------------------------

def statistical_distance(p, r) -> float:
    """Half the l1 distance between two finite distributions.

    Accepts equal-length arrays or mappings from outcomes to probabilities
    (missing outcomes count as probability 0).
    """
    if isinstance(p, Mapping) or isinstance(r, Mapping):
        if not (isinstance(p, Mapping) and isinstance(r, Mapping)):
            raise SupportMismatch("cannot compare a mapping with an array")
        keys = set(p) | set(r)
        return 0.5 * sum(abs(p.get(x, 0.0) - r.get(x, 0.0)) for x in keys)
    p = np.asarray(p, dtype=float)
    r = np.asarray(r, dtype=float)
    if p.shape != r.shape:
        raise SupportMismatch(f"shapes {p.shape} and {r.shape} differ")
    return float(0.5 * np.abs(p - r).sum())


def syndrome_distribution(ctx: FieldCtx, H, t: int) -> np.ndarray:
    """Exact law of e H^T for e uniform on S_t, indexed by the base-q packed syndrome."""
    H = np.asarray(H, dtype=np.int64)
    r = H.shape[0]
    _, _, syn = weight_syndromes(ctx, H, t)
    keys = _enum.pack_keys(ctx.q, syn)
    counts = np.bincount(keys, minlength=ctx.q ** r)
    return counts / counts.sum()


def distance_to_uniform(dist: np.ndarray) -> float:
    return statistical_distance(dist, np.full(dist.shape, 1.0 / dist.size))


def lhl_bound(n: int, k: int, t: int, q: int) -> float:
    """(1/2) sqrt((q^(n-k) - 1) / (C(n,t)(q-1)^t))."""
    return 0.5 * math.sqrt((q ** (n - k) - 1) / sphere_size(n, t, q))


def _sampled_matrices(q, rows, n, samples, seed):
    rng = _enum.make_rng(seed)
    for _ in range(samples):
        yield rng.integers(0, q, size=(rows, n), dtype=np.int64)


def exact_distances(n: int, k: int, t: int, q: int, samples: int, seed=0) -> np.ndarray:
    """Exact Delta(e H^T, uniform) for each of ``samples`` uniform H."""
    if sphere_size(n, t, q) > 1 << 22:
        raise TooLarge("sphere too large to enumerate")
    ctx = FieldCtx(q)
    if k == n:
        return np.zeros(samples)
    return np.array([distance_to_uniform(syndrome_distribution(ctx, H, t))
                     for H in _sampled_matrices(q, n - k, n, samples, seed)])


def lhl_empirical(n: int, k: int, t: int, q: int, samples: int, seed=0) -> float:
    return float(exact_distances(n, k, t, q, samples, seed).mean())


def fixed_matrix_tail(eps: float) -> float:
    """Bound on the fraction of matrices whose distance reaches sqrt(eps)."""
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    return math.sqrt(eps)


def bernoulli_lhl_bound(n: int, k: int, tau: float, q: int = 2) -> float:
    """(1/2) sqrt(2^-k (1 + (1 - 2 tau)^2)^n) for Bernoulli(tau) binary errors."""
    if q != 2:
        raise DomainError("the Bernoulli bound is stated for q = 2 only")
    if not 0 <= tau <= 0.5:
        raise DomainError("tau must lie in [0, 1/2]")
    return 0.5 * math.sqrt(2.0 ** (-k) * (1 + (1 - 2 * tau) ** 2) ** n)


def bernoulli_syndrome_distribution(H, tau: float) -> np.ndarray:
    """Exact law of e H^T over F_2 when the e_i are independent Bernoulli(tau)."""
    H = np.asarray(H, dtype=np.int64)
    r, n = H.shape
    if n > 24:
        raise TooLarge("enumerating F_2^n needs n <= 24")
    colkeys = (H * (1 << np.arange(r))[:, None]).sum(axis=0)
    syn = np.zeros(1, dtype=np.int64)
    wt = np.zeros(1, dtype=np.int64)
    for i in range(n):
        syn = np.concatenate([syn, syn ^ colkeys[i]])
        wt = np.concatenate([wt, wt + 1])
    prob = tau ** wt * (1 - tau) ** (n - wt)
    return np.bincount(syn, weights=prob, minlength=1 << r)


def bernoulli_empirical(n: int, k: int, tau: float, samples: int, seed=0) -> float:
    vals = [distance_to_uniform(bernoulli_syndrome_distribution(H, tau))
            for H in _sampled_matrices(2, n - k, n, samples, seed)]
    return float(np.mean(vals))


def sample_coset_counts(n: int, k: int, t: int, q: int, samples: int, seed=0, s=None,
                        batch: int = 64) -> np.ndarray:
    """N_t(C, s) for ``samples`` uniform raw H and a fixed s (zero if omitted)."""
    r = n - k
    s = np.zeros(r, np.int64) if s is None else np.asarray(s, np.int64) % q
    supp, vals = _enum.enumerate_weight(n, t, q)
    rng = _enum.make_rng(seed)
    out = np.empty(samples, dtype=np.int64)
    done = 0
    while done < samples:
        b = min(batch, samples - done)
        Hs = rng.integers(0, q, size=(b, r, n), dtype=np.int64)
        cols = Hs.transpose(0, 2, 1)  # (b, n, r)
        syn = np.zeros((b, supp.shape[0], r), dtype=np.int64)
        for j in range(supp.shape[1]):
            syn += vals[None, :, j, None] * cols[:, supp[:, j], :]
        syn %= q
        out[done:done + b] = np.all(syn == s, axis=2).sum(axis=1)
        done += b
    return out


def membership_hits(y, n: int, k: int, q: int, samples: int, seed=0, s=None) -> int:
    """How many of ``samples`` uniform H satisfy y H^T = s."""
    r = n - k
    y = np.asarray(y, dtype=np.int64)
    s = np.zeros(r, np.int64) if s is None else np.asarray(s, np.int64)
    rng = _enum.make_rng(seed)
    hits = 0
    chunk = 4096
    done = 0
    while done < samples:
        b = min(chunk, samples - done)
        Hs = rng.integers(0, q, size=(b, r, n), dtype=np.int64)
        syn = (Hs @ y) % q
        hits += int(np.all(syn == s, axis=1).sum())
        done += b
    return hits


def min_distance_concentration(n: int, R: float, q: int, eps: float, samples: int,
                               seed=0) -> float:
    """Fraction of random codes with (1-eps) tau- < d_min / n < (1+eps) tau-."""
    k = math.floor(R * n)
    if q ** k > 1 << 22:
        raise TooLarge("q^k too large for brute-force minimum distance")
    ctx = FieldCtx(q)
    tm = tau_minus(q, R)
    lo, hi = (1 - eps) * tm, (1 + eps) * tm
    ss = np.random.SeedSequence(seed)
    inside = 0
    for child in ss.spawn(samples):
        code = random_code(ctx, n, k, "H", seed=child)
        d = min_distance_bruteforce(code) / n
        inside += lo < d < hi
    return inside / samples
