"""Decoding-problem instances: generation, verification, conversion and the .dpi format."""
from __future__ import annotations

import io
import os
from dataclasses import dataclass
from math import floor

import numpy as np

from . import _enum
from .codes import _dual_of_systematic
from .gf_linalg import FieldCtx, hamming_weight, matmul, rank, solve_linear


class DegenerateParams(ValueError):
    """Raised when k = floor(R n) is 0 or n."""


@dataclass
class DecodingInstance:
    """Find e with |e| = t and e H^T = s.

    ``planted`` is the error the instance was built from, kept for tests only.
    H is normally full rank; reductions may produce rank-deficient matrices.
    """
    ctx: FieldCtx
    H: np.ndarray
    s: np.ndarray
    t: int
    planted: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.H.shape[1]

    @property
    def k(self) -> int:
        return self.H.shape[1] - self.H.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, DecodingInstance):
            return NotImplemented
        same_planted = (self.planted is None and other.planted is None) or (
            self.planted is not None and other.planted is not None
            and np.array_equal(self.planted, other.planted))
        return (self.ctx == other.ctx and self.t == other.t and same_planted
                and np.array_equal(self.H, other.H) and np.array_equal(self.s, other.s))


@dataclass
class NoisyCodewordInstance:
    """Find e with |e| = t and y - e in the code generated by G."""
    ctx: FieldCtx
    G: np.ndarray
    y: np.ndarray
    t: int
    planted: np.ndarray | None = None


def verify(inst: DecodingInstance, e) -> bool:
    e = np.asarray(e, dtype=np.int64)
    if e.shape != (inst.n,) or e.min(initial=0) < 0 or e.max(initial=0) >= inst.ctx.q:
        return False
    if hamming_weight(e) != inst.t:
        return False
    return bool(np.array_equal(matmul(inst.ctx, e, inst.H.T), inst.s % inst.ctx.q))


def verify_noisy(inst: NoisyCodewordInstance, e) -> bool:
    e = np.asarray(e, dtype=np.int64)
    if e.shape != inst.y.shape or hamming_weight(e) != inst.t:
        return False
    c = (inst.y - e) % inst.ctx.q
    # c is a codeword iff it lies in the row space of G
    try:
        solve_linear(inst.ctx, inst.G.T, c)
    except ValueError:
        return False
    return True


def dp_parameters(n: int, R: float, tau: float) -> tuple[int, int]:
    return floor(R * n), floor(tau * n)


def instance_from_matrix(ctx: FieldCtx, H, t: int, rng) -> DecodingInstance:
    """Plant a uniform weight-t error on a given parity-check matrix."""
    H = np.asarray(H, dtype=np.int64)
    x = _enum.random_weight_vector(H.shape[1], t, ctx.q, rng)
    return DecodingInstance(ctx, H, matmul(ctx, x, H.T), t, x)


def gen_dp(ctx: FieldCtx, n: int, R: float, tau: float, seed=0) -> DecodingInstance:
    """Random DP(n, q, R, tau) instance: H uniform of full rank, s = x H^T with x uniform in S_t."""
    if not 0 < R < 1 or not 0 <= tau <= 1:
        raise ValueError("need 0 < R < 1 and 0 <= tau <= 1")
    k, t = dp_parameters(n, R, tau)
    if k in (0, n):
        raise DegenerateParams(f"k = floor(R n) = {k} is degenerate for n = {n}")
    rng = _enum.make_rng(seed)
    while True:
        H = rng.integers(0, ctx.q, size=(n - k, n), dtype=np.int64)
        if rank(ctx, H) == n - k:
            break
    return instance_from_matrix(ctx, H, t, rng)


def syndrome_to_noisy(inst: DecodingInstance, seed=0) -> NoisyCodewordInstance:
    """y = (some preimage of s) + (a uniform codeword); same solution set."""
    ctx = inst.ctx
    G = _dual_of_systematic(ctx, inst.H) if inst.k < inst.n else None
    y0 = solve_linear(ctx, inst.H, inst.s)
    rng = _enum.make_rng(seed)
    if G is not None and G.shape[0]:
        m = rng.integers(0, ctx.q, size=G.shape[0], dtype=np.int64)
        y0 = (y0 + matmul(ctx, m, G)) % ctx.q
    else:
        G = np.zeros((0, inst.n), dtype=np.int64)
    return NoisyCodewordInstance(ctx, G, y0, inst.t, inst.planted)


def noisy_to_syndrome(inst: NoisyCodewordInstance) -> DecodingInstance:
    ctx = inst.ctx
    k, n = inst.G.shape
    if k == 0:
        H = np.eye(n, dtype=np.int64)
    else:
        H = _dual_of_systematic(ctx, inst.G)
    return DecodingInstance(ctx, H, matmul(ctx, inst.y, H.T), inst.t, inst.planted)


def weight_syndromes(ctx: FieldCtx, H, t: int):
    """All weight-t vectors with their syndromes: (supports, values, syndromes)."""
    H = np.asarray(H, dtype=np.int64)
    supp, vals = _enum.enumerate_weight(H.shape[1], t, ctx.q)
    return supp, vals, _enum.sparse_syndromes(ctx.q, H, supp, vals)


def solution_set(inst: DecodingInstance) -> np.ndarray:
    """Every weight-t solution, by exhaustive enumeration of S_t (rows, lexicographic supports)."""
    supp, vals, syn = weight_syndromes(inst.ctx, inst.H, inst.t)
    hit = np.all(syn == inst.s % inst.ctx.q, axis=1)
    return _enum.densify(inst.n, supp[hit], vals[hit])


def count_solutions(ctx: FieldCtx, H, s, t: int, limit: int = 1 << 22) -> int:
    """Exact number of weight-t solutions.

    Full enumeration when the sphere has at most ``limit`` points, otherwise a
    meet-in-the-middle count over every split of the weight between the two
    halves of the positions.
    """
    H = np.asarray(H, dtype=np.int64)
    s = np.asarray(s, dtype=np.int64) % ctx.q
    n = H.shape[1]
    q = ctx.q
    if _enum.sphere_count(n, t, q) <= limit:
        _, _, syn = weight_syndromes(ctx, H, t)
        return int(np.all(syn == s, axis=1).sum())
    n1 = n // 2
    left, right = H[:, :n1], H[:, n1:]
    total = 0
    for w1 in range(max(0, t - (n - n1)), min(t, n1) + 1):
        _, _, syn1 = weight_syndromes(ctx, left, w1)
        _, _, syn2 = weight_syndromes(ctx, right, t - w1)
        k1, k2 = _enum.pack_keys(q, syn1, (s - syn2) % q)
        u1, c1 = np.unique(k1, return_counts=True)
        u2, c2 = np.unique(k2, return_counts=True)
        _, i1, i2 = np.intersect1d(u1, u2, assume_unique=True, return_indices=True)
        total += int((c1[i1] * c2[i2]).sum())
    return total


# .dpi text format -------------------------------------------------------------

def _row(v) -> str:
    return " ".join(str(int(x)) for x in v)


def render(inst: DecodingInstance, with_planted: bool = True) -> str:
    lines = ["DPI 1", f"{inst.ctx.q} {inst.n} {inst.k} {inst.t}"]
    lines += [_row(r) for r in inst.H]
    lines.append(_row(inst.s))
    if with_planted and inst.planted is not None:
        lines.append("# e " + _row(inst.planted))
    return "\n".join(lines) + "\n"


class FormatError(ValueError):
    pass


def parse(text: str) -> DecodingInstance:
    lines = [ln.strip() for ln in io.StringIO(text).read().splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or lines[0] != "DPI 1":
        raise FormatError("missing 'DPI 1' header")
    try:
        q, n, k, t = (int(v) for v in lines[1].split())
    except (IndexError, ValueError) as exc:
        raise FormatError("second line must be 'q n k t'") from exc
    r = n - k
    body = lines[2:]
    if len(body) < r + (1 if r else 0):
        raise FormatError("truncated matrix or syndrome")

    def ints(line, width):
        vals = [int(v) for v in line.split()]
        if len(vals) != width:
            raise FormatError(f"expected {width} entries, got {len(vals)}")
        return vals

    ctx = FieldCtx(q)
    H = np.array([ints(body[i], n) for i in range(r)], dtype=np.int64).reshape(r, n)
    s = np.array(ints(body[r], r) if r else [], dtype=np.int64)
    planted = None
    for extra in body[r + 1:]:
        if extra.startswith("# e"):
            planted = np.array(ints(extra[3:], n), dtype=np.int64)
    for a in (H, s) + (() if planted is None else (planted,)):
        if a.size and (a.min() < 0 or a.max() >= q):
            raise FormatError("entries must be residues modulo q")
    return DecodingInstance(ctx, H, s, t, planted)


def write_dpi(path: str | os.PathLike, inst: DecodingInstance, with_planted: bool = True) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(render(inst, with_planted))


def read_dpi(path: str | os.PathLike) -> DecodingInstance:
    with open(path, encoding="ascii") as fh:
        return parse(fh.read())
