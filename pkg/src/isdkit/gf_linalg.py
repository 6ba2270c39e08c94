"""Prime-field arithmetic and dense linear algebra over F_q.

Matrices and vectors are plain ``numpy`` int64 arrays holding residues in
``[0, q)``.  A :class:`FieldCtx` carries the modulus and the inverse table;
every routine takes it as first argument.
"""
from __future__ import annotations

import numpy as np

MAX_Q = 1 << 16
_INV_TABLE_LIMIT = 1 << 12


class RankDeficient(ValueError):
    """Raised when a matrix does not have full row rank."""


class NoSolution(ValueError):
    """Raised when a linear system has no solution."""


def is_prime(q: int) -> bool:
    if q < 2:
        return False
    if q % 2 == 0:
        return q == 2
    d = 3
    while d * d <= q:
        if q % d == 0:
            return False
        d += 2
    return True


class FieldCtx:
    """The prime field F_q.

    Args:
        q: a prime with 2 <= q <= 2**16.  Prime powers are rejected.
    """

    __slots__ = ("q", "_inv")

    def __init__(self, q: int):
        q = int(q)
        if not 2 <= q <= MAX_Q:
            raise ValueError(f"q must lie in [2, {MAX_Q}], got {q}")
        if not is_prime(q):
            raise ValueError(f"q={q} is not prime; only prime fields are supported")
        self.q = q
        self._inv = None
        if q < _INV_TABLE_LIMIT:
            tab = np.zeros(q, dtype=np.int64)
            for x in range(1, q):
                tab[x] = pow(x, q - 2, q)
            self._inv = tab

    def __repr__(self) -> str:
        return f"FieldCtx(q={self.q})"

    def __eq__(self, other) -> bool:
        return isinstance(other, FieldCtx) and other.q == self.q

    def __hash__(self) -> int:
        return hash(("FieldCtx", self.q))

    def inv(self, x):
        """Multiplicative inverse of a scalar or an array of nonzero residues."""
        if np.ndim(x) == 0:
            x = int(x) % self.q
            if x == 0:
                raise ZeroDivisionError("0 has no inverse")
            return int(self._inv[x]) if self._inv is not None else pow(x, self.q - 2, self.q)
        x = np.asarray(x, dtype=np.int64) % self.q
        if np.any(x == 0):
            raise ZeroDivisionError("0 has no inverse")
        if self._inv is not None:
            return self._inv[x]
        return np.array([pow(int(v), self.q - 2, self.q) for v in x.ravel()],
                        dtype=np.int64).reshape(x.shape)

    def add(self, a, b):
        return (np.asarray(a, dtype=np.int64) + b) % self.q

    def sub(self, a, b):
        return (np.asarray(a, dtype=np.int64) - b) % self.q

    def neg(self, a):
        return (-np.asarray(a, dtype=np.int64)) % self.q

    def mul(self, a, b):
        return (np.asarray(a, dtype=np.int64) * b) % self.q

    def reduce(self, a) -> np.ndarray:
        return np.asarray(a, dtype=np.int64) % self.q


def _check_entries(ctx: FieldCtx, a: np.ndarray) -> np.ndarray:
    if a.size and (a.min() < 0 or a.max() >= ctx.q):
        raise ValueError(f"entries must be residues in [0, {ctx.q})")
    return a


def vector(ctx: FieldCtx, entries) -> np.ndarray:
    """Build an FqVector, rejecting out-of-range residues."""
    a = np.asarray(entries, dtype=np.int64)
    if a.ndim != 1:
        raise ValueError("a vector must be one-dimensional")
    return _check_entries(ctx, a.copy())


def matrix(ctx: FieldCtx, rows, ncols: int | None = None) -> np.ndarray:
    """Build an FqMatrix.  ``ncols`` disambiguates the shape of an empty row list."""
    a = np.asarray(rows, dtype=np.int64)
    if a.size == 0 and ncols is not None:
        a = a.reshape(0, ncols)
    if a.ndim != 2:
        raise ValueError("a matrix must be two-dimensional")
    return _check_entries(ctx, a.copy())


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def hamming_weight(v) -> int:
    return int(np.count_nonzero(v))


def matmul(ctx: FieldCtx, a, b) -> np.ndarray:
    # entries < 2**16 so products fit in 32 bits; a 64-bit accumulator absorbs 2**31 terms
    return (np.asarray(a, dtype=np.int64) @ np.asarray(b, dtype=np.int64)) % ctx.q


def syndrome(ctx: FieldCtx, h: np.ndarray, e: np.ndarray) -> np.ndarray:
    """Row vector e H^T."""
    return matmul(ctx, e, h.T)


def _gauss_jordan(ctx: FieldCtx, m: np.ndarray, col_order, require_all: bool = False):
    """Reduced row echelon form, scanning candidate pivot columns in ``col_order``.

    Pivot rows end up on top in the order their columns were visited.  With
    ``require_all`` the function returns ``None`` as soon as a listed column
    has no pivot.
    """
    q = ctx.q
    a = np.array(m, dtype=np.int64, copy=True)
    nrows = a.shape[0]
    r = 0
    pivots = []
    for c in col_order:
        if r == nrows:
            if require_all:
                return None
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            if require_all:
                return None
            continue
        p = r + int(nz[0])
        if p != r:
            a[[r, p]] = a[[p, r]]
        piv = int(a[r, c])
        if piv != 1:
            a[r] = (a[r] * ctx.inv(piv)) % q
        col = a[:, c].copy()
        col[r] = 0
        rows = np.flatnonzero(col)
        if rows.size:
            if q == 2:
                a[rows] ^= a[r]
            else:
                a[rows] = (a[rows] - np.outer(col[rows], a[r])) % q
        pivots.append(int(c))
        r += 1
    return a, pivots


def rref(ctx: FieldCtx, m) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form with left-to-right pivoting; returns (R, pivot columns)."""
    m = np.asarray(m, dtype=np.int64)
    return _gauss_jordan(ctx, m, range(m.shape[1]))


def rank(ctx: FieldCtx, m) -> int:
    m = np.asarray(m, dtype=np.int64)
    if m.size == 0:
        return 0
    return len(rref(ctx, m)[1])


def row_reduce_systematic(ctx: FieldCtx, m):
    """Systematic form of a full-row-rank matrix.

    Returns ``(S, colperm, reduced)`` with S nonsingular and
    ``(S @ m)[:, colperm] == reduced == (I | A)``.  ``colperm`` lists the
    pivot columns first, then the remaining columns in increasing order.

    Raises:
        RankDeficient: if the row rank is below the number of rows.
    """
    m = np.asarray(m, dtype=np.int64)
    r, n = m.shape
    aug = np.hstack([m, identity(r)])
    red, pivots = _gauss_jordan(ctx, aug, range(n))
    if len(pivots) < r:
        raise RankDeficient(f"rank {len(pivots)} < {r} rows")
    pivset = set(pivots)
    colperm = pivots + [c for c in range(n) if c not in pivset]
    s = red[:, n:].copy()
    reduced = red[:, :n][:, colperm]
    return s, np.array(colperm, dtype=np.int64), reduced


def eliminate_on(ctx: FieldCtx, m, cols):
    """Row-reduce ``m`` so that its columns ``cols`` (in order) become unit vectors.

    Returns the reduced matrix, whose first ``len(cols)`` rows carry the pivots
    and whose remaining rows vanish on ``cols``.  Returns ``None`` when the
    listed columns are linearly dependent.
    """
    out = _gauss_jordan(ctx, m, cols, require_all=True)
    return None if out is None else out[0]


def solve_linear(ctx: FieldCtx, a, b) -> np.ndarray:
    """Some x with A x^T = b^T.

    Free variables are set to zero, so the answer is deterministic.

    Raises:
        NoSolution: if b is outside the column space of A.
    """
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    r, n = a.shape
    if b.shape != (r,):
        raise ValueError(f"right-hand side must have length {r}")
    if r == 0:
        return np.zeros(n, dtype=np.int64)
    aug = np.hstack([a, b[:, None] % ctx.q])
    red, pivots = _gauss_jordan(ctx, aug, range(n))
    rk = len(pivots)
    if np.any(red[rk:, n]):
        raise NoSolution("inconsistent system")
    x = np.zeros(n, dtype=np.int64)
    x[pivots] = red[:rk, n]
    return x
