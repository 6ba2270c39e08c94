"""Shared plumbing: seeded generators, fixed-weight enumeration, key packing and joins."""
from __future__ import annotations

from itertools import combinations, product
from math import comb

import numpy as np


def make_rng(seed) -> np.random.Generator:
    """Philox counter-based generator; ``seed`` may be an int or a SeedSequence."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(seed))


def spawn_rngs(seed, count: int) -> list[np.random.Generator]:
    ss = np.random.SeedSequence(seed)
    return [np.random.Generator(np.random.Philox(s)) for s in ss.spawn(count)]


def sphere_count(m: int, w: int, q: int) -> int:
    if w < 0 or w > m:
        return 0
    return comb(m, w) * (q - 1) ** w


def enumerate_weight(m: int, w: int, q: int) -> tuple[np.ndarray, np.ndarray]:
    """All weight-``w`` vectors of F_q^m as (supports, values), each of shape (M, w)."""
    if w < 0 or w > m:
        return np.zeros((0, max(w, 0)), np.int64), np.zeros((0, max(w, 0)), np.int64)
    if w == 0:
        return np.zeros((1, 0), np.int64), np.zeros((1, 0), np.int64)
    combos = np.array(list(combinations(range(m), w)), dtype=np.int64)
    vals = np.array(list(product(range(1, q), repeat=w)), dtype=np.int64)
    supp = np.repeat(combos, len(vals), axis=0)
    values = np.tile(vals, (len(combos), 1))
    return supp, values


def random_weight_vector(n: int, w: int, q: int, rng) -> np.ndarray:
    """Uniform element of S_w: Fisher-Yates support, uniform nonzero values."""
    e = np.zeros(n, dtype=np.int64)
    if w:
        supp = rng.permutation(n)[:w]
        e[supp] = rng.integers(1, q, size=w) if q > 2 else 1
    return e


def sample_weight(m: int, w: int, q: int, size: int, rng) -> tuple[np.ndarray, np.ndarray]:
    """``size`` distinct uniform weight-``w`` vectors of F_q^m (capped at the sphere size)."""
    total = sphere_count(m, w, q)
    size = min(size, total)
    if total <= max(4 * size, 1 << 16):
        supp, vals = enumerate_weight(m, w, q)
        if size < total:
            pick = np.sort(rng.choice(total, size=size, replace=False))
            supp, vals = supp[pick], vals[pick]
        return supp, vals
    seen = set()
    supps, valss = [], []
    while len(supps) < size:
        s = np.sort(rng.choice(m, size=w, replace=False))
        v = rng.integers(1, q, size=w)
        key = (tuple(s), tuple(v))
        if key in seen:
            continue
        seen.add(key)
        supps.append(s)
        valss.append(v)
    return np.array(supps, dtype=np.int64).reshape(size, w), np.array(valss, dtype=np.int64).reshape(size, w)


def sparse_syndromes(q: int, h: np.ndarray, supp: np.ndarray, vals: np.ndarray) -> np.ndarray:
    """Syndromes e H^T for sparse vectors given by global supports and values."""
    r = h.shape[0]
    out = np.zeros((supp.shape[0], r), dtype=np.int64)
    cols = h.T
    for j in range(supp.shape[1]):
        out += vals[:, j, None] * cols[supp[:, j]]
    return out % q


def densify(n: int, supp: np.ndarray, vals: np.ndarray) -> np.ndarray:
    e = np.zeros((supp.shape[0], n), dtype=np.int64)
    if supp.shape[1]:
        rows = np.repeat(np.arange(supp.shape[0]), supp.shape[1])
        e[rows, supp.ravel()] = vals.ravel()
    return e


def pack_keys(q: int, a: np.ndarray, b: np.ndarray | None = None):
    """Map the rows of ``a`` (and ``b``) to integer keys equal iff rows are equal.

    Rows are packed base q into one int64 when q**width < 2**63; otherwise the
    rows are ranked jointly with ``np.unique``.
    """
    width = a.shape[1]
    if width == 0:
        ka = np.zeros(a.shape[0], np.int64)
        return ka if b is None else (ka, np.zeros(b.shape[0], np.int64))
    if q ** width < (1 << 63):
        w = np.array([q ** i for i in range(width)], dtype=np.int64)
        ka = a @ w
        return ka if b is None else (ka, b @ w)
    both = a if b is None else np.vstack([a, b])
    _, inv = np.unique(both, axis=0, return_inverse=True)
    inv = inv.ravel().astype(np.int64)
    return inv if b is None else (inv[: a.shape[0]], inv[a.shape[0]:])


def join_equal(k1: np.ndarray, k2: np.ndarray, cap: int | None = None):
    """All index pairs (i, j) with k1[i] == k2[j], via sort and binary search.

    Returns (i_idx, j_idx, truncated).
    """
    order = np.argsort(k2, kind="stable")
    sk = k2[order]
    lo = np.searchsorted(sk, k1, side="left")
    hi = np.searchsorted(sk, k1, side="right")
    cnt = hi - lo
    total = int(cnt.sum())
    truncated = False
    if cap is not None and total > cap:
        truncated = True
        keep = np.cumsum(cnt) <= cap
        cnt = np.where(keep, cnt, 0)
        total = int(cnt.sum())
    i_idx = np.repeat(np.arange(len(k1)), cnt)
    starts = np.repeat(lo, cnt)
    offs = np.arange(total) - np.repeat(np.cumsum(cnt) - cnt, cnt)
    j_idx = order[starts + offs]
    return i_idx, j_idx, truncated
