"""Exact decoders for structured codes: Hamming single-error and Berlekamp-Welch for GRS."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codes import GrsCode, hamming_code
from .gf_linalg import FieldCtx, NoSolution, matmul, solve_linear


class DecodingFailure(Exception):
    """The received word is not within the guaranteed decoding radius."""


class NotSupported(Exception):
    pass


@dataclass(frozen=True)
class PolyFq:
    """Polynomial over F_q, coefficients low to high, no trailing zeros."""
    ctx: FieldCtx
    coeffs: tuple

    @classmethod
    def make(cls, ctx: FieldCtx, coeffs) -> "PolyFq":
        c = [int(v) % ctx.q for v in coeffs]
        while c and c[-1] == 0:
            c.pop()
        return cls(ctx, tuple(c))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x):
        q = self.ctx.q
        x = np.asarray(x, dtype=np.int64)
        acc = np.zeros_like(x)
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % q
        return acc

    def __mul__(self, other: "PolyFq") -> "PolyFq":
        if self.is_zero() or other.is_zero():
            return PolyFq(self.ctx, ())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return PolyFq.make(self.ctx, out)

    def divmod(self, other: "PolyFq") -> tuple["PolyFq", "PolyFq"]:
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        q = self.ctx.q
        rem = list(self.coeffs)
        dq = other.degree
        lead_inv = self.ctx.inv(other.coeffs[-1])
        quot = [0] * max(0, len(rem) - dq)
        for i in range(len(rem) - 1, dq - 1, -1):
            c = rem[i] * lead_inv % q
            if c:
                quot[i - dq] = c
                for j, b in enumerate(other.coeffs):
                    rem[i - dq + j] = (rem[i - dq + j] - c * b) % q
        return PolyFq.make(self.ctx, quot), PolyFq.make(self.ctx, rem)


def hamming_decode(r: int, y):
    """Correct at most one error: the syndrome, read in binary, is the error position.

    Returns (codeword, error).
    """
    code = hamming_code(r)
    y = np.asarray(y, dtype=np.int64) % 2
    if y.shape != (code.n,):
        raise ValueError(f"expected a word of length {code.n}")
    syn = matmul(code.ctx, code.H, y)
    pos = int("".join(str(int(b)) for b in syn), 2)
    e = np.zeros(code.n, dtype=np.int64)
    if pos:
        e[pos - 1] = 1
    return (y + e) % 2, e


def grs_encode(code: GrsCode, f: PolyFq) -> np.ndarray:
    if f.degree >= code.k:
        raise ValueError("message polynomial degree must be < k")
    return f(code.x) * code.z % code.ctx.q


def bw_decode(code: GrsCode, y):
    """Berlekamp-Welch decoding up to floor((n-k)/2) errors.

    Solves y_i E(x_i) = N(x_i) with E monic of degree floor((n-k)/2) and
    deg N < k + ceil((n-k)/2); if that system is inconsistent the degree of E
    is lowered step by step.  The general multipliers z are removed first.

    Returns (f, e) with f of degree < k and y - e its codeword.

    Raises:
        DecodingFailure: when no pair (N, E) with E dividing N is found, or the
            resulting codeword is farther than the radius from y.
    """
    ctx = code.ctx
    q = ctx.q
    n, k = code.n, code.k
    y = np.asarray(y, dtype=np.int64) % q
    if y.shape != (n,):
        raise ValueError(f"expected a word of length {n}")
    try:
        yz = y * ctx.inv(code.z) % q
    except ZeroDivisionError as exc:
        raise NotSupported("zero multiplier") from exc
    radius = (n - k) // 2
    n_len = k + (n - k + 1) // 2  # number of N coefficients
    x = code.x
    powers = np.ones((n, max(n_len, radius + 1)), dtype=np.int64)
    for j in range(1, powers.shape[1]):
        powers[:, j] = powers[:, j - 1] * x % q

    for deg_e in range(radius, -1, -1):
        # unknowns: E_0..E_{deg_e-1}, N_0..N_{n_len-1}; E_{deg_e} = 1
        a = np.hstack([(yz[:, None] * powers[:, :deg_e]) % q, (-powers[:, :n_len]) % q])
        b = (-yz * powers[:, deg_e]) % q
        try:
            sol = solve_linear(ctx, a, b)
        except NoSolution:
            continue
        E = PolyFq.make(ctx, list(sol[:deg_e]) + [1])
        N = PolyFq.make(ctx, sol[deg_e:])
        f, rem = N.divmod(E)
        if not rem.is_zero() or f.degree >= k:
            raise DecodingFailure("E does not divide N")
        c = grs_encode(code, f) if not f.is_zero() else np.zeros(n, dtype=np.int64)
        e = (y - c) % q
        if np.count_nonzero(e) > radius:
            raise DecodingFailure("decoded word is beyond the decoding radius")
        return f, e
    raise DecodingFailure("no nonzero solution pair")
