"""Linear codes over prime fields and a few classical constructions."""
from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np

from ._enum import make_rng
from .gf_linalg import (FieldCtx, RankDeficient, identity, matmul, rank,
                        row_reduce_systematic, rref, solve_linear)


class TooLarge(ValueError):
    """Raised when an exhaustive computation exceeds its size guard."""


class DuplicatePoints(ValueError):
    pass


class ZeroMultiplier(ValueError):
    pass


def _dual_of_systematic(ctx: FieldCtx, m: np.ndarray) -> np.ndarray:
    """From a full-rank r x n matrix M, a full-rank (n-r) x n matrix N with M N^T = 0."""
    r, n = m.shape
    _, perm, red = row_reduce_systematic(ctx, m)
    a = red[:, r:]
    out_perm = np.hstack([(-a.T) % ctx.q, identity(n - r)])
    out = np.zeros_like(out_perm)
    out[:, perm] = out_perm
    return out


class LinearCode:
    """An [n, k]_q code given by a parity-check matrix, a generator matrix or both.

    The missing matrix is derived on first access from a systematic form.
    """

    def __init__(self, ctx: FieldCtx, n: int, k: int, H=None, G=None):
        if H is None and G is None:
            raise ValueError("need a parity-check or a generator matrix")
        self.ctx = ctx
        self.n = int(n)
        self.k = int(k)
        self._H = None if H is None else np.asarray(H, dtype=np.int64)
        self._G = None if G is None else np.asarray(G, dtype=np.int64)
        self._lock = threading.Lock()

    @property
    def rate(self) -> float:
        return self.k / self.n

    @property
    def H(self) -> np.ndarray:
        if self._H is None:
            with self._lock:
                if self._H is None:
                    if self.k == 0:
                        self._H = identity(self.n)
                    else:
                        self._H = _dual_of_systematic(self.ctx, self._G)
        return self._H

    @property
    def G(self) -> np.ndarray:
        if self._G is None:
            with self._lock:
                if self._G is None:
                    if self.k == self.n:
                        self._G = identity(self.n)
                    else:
                        self._G = _dual_of_systematic(self.ctx, self._H)
        return self._G

    def dual(self) -> "LinearCode":
        return LinearCode(self.ctx, self.n, self.n - self.k, H=self.G, G=self.H)

    def contains(self, c) -> bool:
        return not np.any(matmul(self.ctx, self.H, np.asarray(c)))

    def syndrome(self, y) -> np.ndarray:
        return matmul(self.ctx, np.asarray(y), self.H.T)

    def encode(self, m) -> np.ndarray:
        return matmul(self.ctx, np.asarray(m), self.G)

    def __repr__(self) -> str:
        return f"LinearCode([{self.n},{self.k}]_{self.ctx.q})"


def from_generator(ctx: FieldCtx, G) -> LinearCode:
    G = np.asarray(G, dtype=np.int64)
    k, n = G.shape
    if rank(ctx, G) != k:
        raise RankDeficient("generator matrix must have full row rank")
    return LinearCode(ctx, n, k, G=G)


def from_parity_check(ctx: FieldCtx, H) -> LinearCode:
    H = np.asarray(H, dtype=np.int64)
    r, n = H.shape
    if r and rank(ctx, H) != r:
        raise RankDeficient("parity-check matrix must have full row rank")
    return LinearCode(ctx, n, n - r, H=H)


def random_code(ctx: FieldCtx, n: int, k: int, model: str = "H", seed=0,
                resample: bool = True) -> LinearCode:
    """Uniformly random code in the generator ("G") or parity-check ("H") model.

    With ``resample`` the draw is repeated until the matrix has full rank; with
    ``resample=False`` the raw matrix is kept even when rank-deficient, in which
    case ``k`` is the nominal dimension.
    """
    if not 0 < k < n:
        raise ValueError("need 0 < k < n")
    rng = make_rng(seed)
    rows = n - k if model == "H" else k
    if model not in ("G", "H"):
        raise ValueError("model must be 'G' or 'H'")
    while True:
        m = rng.integers(0, ctx.q, size=(rows, n), dtype=np.int64)
        if not resample or rank(ctx, m) == rows:
            break
    return LinearCode(ctx, n, k, H=m) if model == "H" else LinearCode(ctx, n, k, G=m)


def hamming_code(r: int) -> LinearCode:
    """Binary Hamming code; column i (1-based) of H is i in binary, top row most significant."""
    if r < 2:
        raise ValueError("r must be at least 2")
    n = (1 << r) - 1
    cols = np.arange(1, n + 1)
    H = np.array([(cols >> (r - 1 - b)) & 1 for b in range(r)], dtype=np.int64)
    return LinearCode(FieldCtx(2), n, n - r, H=H)


@dataclass(frozen=True)
class InfoSet:
    positions: tuple
    flavor: str = "plain"


class GrsCode(LinearCode):
    """Generalized Reed-Solomon code GRS_k(x, z): words (z_i f(x_i)) with deg f < k."""

    def __init__(self, ctx: FieldCtx, x, z, k: int):
        x = np.asarray(x, dtype=np.int64) % ctx.q
        z = np.asarray(z, dtype=np.int64) % ctx.q
        n = len(x)
        if len(z) != n:
            raise ValueError("x and z must have the same length")
        if n > ctx.q:
            raise ValueError("a GRS code needs n <= q")
        if len(set(x.tolist())) != n:
            raise DuplicatePoints("evaluation points must be pairwise distinct")
        if np.any(z == 0):
            raise ZeroMultiplier("multipliers must be nonzero")
        if not 0 <= k <= n:
            raise ValueError("need 0 <= k <= n")
        self.x = x
        self.z = z
        G = _vandermonde(ctx, x, k) * z % ctx.q
        super().__init__(ctx, n, k, H=grs_dual_matrix(ctx, x, z, k), G=G)


def _vandermonde(ctx: FieldCtx, x: np.ndarray, rows: int) -> np.ndarray:
    out = np.ones((rows, len(x)), dtype=np.int64)
    for j in range(1, rows):
        out[j] = out[j - 1] * x % ctx.q
    return out


def grs_dual_multipliers(ctx: FieldCtx, x, z) -> np.ndarray:
    """z'_i = 1 / (z_i * prod_{j != i} (x_i - x_j))."""
    x = np.asarray(x, dtype=np.int64)
    z = np.asarray(z, dtype=np.int64)
    out = np.empty(len(x), dtype=np.int64)
    for i in range(len(x)):
        d = int(z[i])
        for j in range(len(x)):
            if j != i:
                d = d * int(x[i] - x[j]) % ctx.q
        out[i] = ctx.inv(d)
    return out


def grs_dual_matrix(ctx: FieldCtx, x, z, k: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64)
    zp = grs_dual_multipliers(ctx, x, z)
    return _vandermonde(ctx, x, len(x) - k) * zp % ctx.q


def grs_code(ctx: FieldCtx, x, z, k: int) -> GrsCode:
    return GrsCode(ctx, x, z, k)


def grs_parity_check(code: GrsCode) -> np.ndarray:
    return code.H


def _messages(q: int, k: int, start: int, stop: int) -> np.ndarray:
    idx = np.arange(start, stop, dtype=np.int64)
    out = np.empty((len(idx), k), dtype=np.int64)
    for j in range(k):
        out[:, j] = idx % q
        idx //= q
    return out


def iter_codewords(code: LinearCode, chunk: int = 1 << 16):
    """Yield all q^k codewords in blocks."""
    q, k = code.ctx.q, code.k
    total = q ** k
    G = code.G
    for start in range(0, total, chunk):
        m = _messages(q, k, start, min(total, start + chunk))
        yield (m @ G) % q if k else np.zeros((1, code.n), dtype=np.int64)


def min_distance_bruteforce(code: LinearCode, limit: int = 1 << 24) -> int:
    q, k = code.ctx.q, code.k
    if q ** k > limit:
        raise TooLarge(f"q^k = {q}^{k} exceeds {limit}")
    if k == 0:
        raise ValueError("the zero code has no nonzero codeword")
    best = code.n
    for block in iter_codewords(code):
        w = np.count_nonzero(block, axis=1)
        w = w[w > 0]
        if w.size:
            best = min(best, int(w.min()))
    return best


def coset_representative(code: LinearCode, s) -> np.ndarray:
    """A vector a with H a^T = s^T (the free variables set to zero)."""
    return solve_linear(code.ctx, code.H, np.asarray(s, dtype=np.int64))


def same_coset(code: LinearCode, a, b) -> bool:
    return bool(np.array_equal(code.syndrome(a), code.syndrome(b)))


def puncture(code: LinearCode, J) -> LinearCode:
    """Restriction of the code to the positions J; its dimension is computed."""
    J = np.asarray(sorted(J), dtype=np.int64)
    G = code.G[:, J]
    red, piv = rref(code.ctx, G)
    basis = red[: len(piv)]
    return LinearCode(code.ctx, len(J), len(piv), G=basis) if len(piv) else \
        LinearCode(code.ctx, len(J), 0, H=identity(len(J)))


def is_information_set(code: LinearCode, J) -> bool:
    """True when codewords are determined by their restriction to J (|J| >= k)."""
    J = sorted(J)
    if len(J) < code.k:
        return False
    return rank(code.ctx, code.G[:, J]) == code.k


def is_information_set_by_parity(code: LinearCode, J) -> bool:
    """Same criterion through H: the columns of H outside J are independent."""
    comp = sorted(set(range(code.n)) - set(J))
    if not comp:
        return True
    return rank(code.ctx, code.H[:, comp]) == len(comp)
