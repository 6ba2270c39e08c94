"""Asymptotic running-time exponents (base q, per code length) and curve emission.

Every exponent is a function of (q, R, tau) with R = k/n and tau = t/n.
Optimized exponents use golden-section search, cross-checked on a uniform grid.
"""
from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field

from .generic_decoders import DepthInfeasible
from .randcode_stats import entropy, entropy_inv_minus, entropy_inv_plus

GRID_PROBES = 32
GRID_TOLERANCE = 1e-4
MAX_DEPTH = 40
_PHI = (math.sqrt(5) - 1) / 2


class OptimizerNoConverge(RuntimeError):
    pass


def h(q: int, x: float) -> float:
    # clip float noise just outside [0, 1]
    return entropy(q, min(1.0, max(0.0, x)))


def golden_section(f, a: float, b: float, tol: float = 1e-7, max_iter: int = 500):
    """Minimize a unimodal f on [a, b]; returns (argmin, min)."""
    if b < a:
        raise ValueError("empty interval")
    c = b - _PHI * (b - a)
    d = a + _PHI * (b - a)
    fc, fd = f(c), f(d)
    it = 0
    while b - a > tol:
        it += 1
        if it > max_iter:
            raise OptimizerNoConverge(f"interval still {b - a:.3g} wide after {max_iter} steps")
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _PHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


@dataclass
class OptResult:
    exponent: float
    params: dict = field(default_factory=dict)
    flagged: bool = False


def _minimize(f, lo: float, hi: float, tol: float):
    """Golden section plus a grid check; returns (x, value, flagged)."""
    if hi - lo <= tol:
        x = 0.5 * (lo + hi)
        return x, f(x), False
    x, v = golden_section(f, lo, hi, tol)
    grid = [lo + (hi - lo) * i / (GRID_PROBES - 1) for i in range(GRID_PROBES)]
    gx = min(grid, key=f)
    gv = f(gx)
    flagged = gv < v - GRID_TOLERANCE
    return (gx, gv, flagged) if gv < v else (x, v, flagged)


def _feasible_upper(ok, lo: float, hi: float, probes: int = 256, tol: float = 1e-12) -> float:
    """Largest point of [lo, hi] before ``ok`` first fails (scan, then bisection)."""
    prev = lo
    for i in range(1, probes + 1):
        x = lo + (hi - lo) * i / probes
        if not ok(x):
            a, b = prev, x
            while b - a > tol:
                m = 0.5 * (a + b)
                a, b = (m, b) if ok(m) else (a, m)
            return a
        prev = x
    return hi


def easy_band(q: int, R: float) -> tuple[float, float]:
    lo = (q - 1) * (1 - R) / q
    return lo, R + lo


def _check(R: float, tau: float) -> None:
    if not 0 < R < 1 or not 0 < tau < 1:
        raise ValueError("R and tau must lie in (0, 1)")


# Prange -------------------------------------------------------------------------

def prange_gamma(q: int, R: float, tau: float) -> float:
    lo, hi = easy_band(q, R)
    if tau < lo:
        return 0.0
    if tau <= hi:
        return tau - lo
    return R


def prange_exponent(q: int, R: float, tau: float) -> float:
    """min(1-R, h(tau)) - (1-R) h((tau - gamma)/(1-R))."""
    _check(R, tau)
    g = prange_gamma(q, R, tau)
    return min(1 - R, h(q, tau)) - (1 - R) * h(q, (tau - g) / (1 - R))


def expected_solutions_exponent(q: int, R: float, tau: float) -> float:
    return h(q, tau) - (1 - R)


# Dumer --------------------------------------------------------------------------

def dumer_plain_exponent(q: int, R: float, tau: float) -> float:
    """Birthday decoding on the whole code: max(h/2, h - (1-R))."""
    _check(R, tau)
    ht = h(q, tau)
    return max(ht / 2, ht - (1 - R))


def dumer_pi(q: int, R: float, lam: float) -> float:
    """Sub-decoding weight ratio making Dumer's lists of size q^(lam n)."""
    y = 2 * lam / (R + lam)
    return (R + lam) * entropy_inv_minus(q, min(1.0, y))


def dumer_isd_f(q: int, R: float, tau: float, lam: float) -> float:
    pi = dumer_pi(q, R, lam)
    rest = 1 - R - lam
    x = (tau - pi) / rest if rest > 0 else 0.0
    return lam + max(0.0, min(1 - R, h(q, tau)) - rest * h(q, x) - 2 * lam)


def dumer_isd_exponent_short(q: int, R: float, tau: float, tol: float = 1e-7) -> OptResult:
    """min over lam of f(lam); lam = 0 is Prange's algorithm."""
    _check(R, tau)
    if tau > easy_band(q, R)[0] + 1e-15:
        raise ValueError("short-weight regime needs tau <= (q-1)(1-R)/q")

    def ok(lam):
        pi = dumer_pi(q, R, lam)
        return pi <= tau and tau - pi <= 1 - R - lam

    hi = _feasible_upper(ok, 0.0, min(R, 1 - R))
    lam, val, flagged = _minimize(lambda l: dumer_isd_f(q, R, tau, l), 0.0, hi, tol)
    pr = prange_exponent(q, R, tau)
    if pr <= val:
        return OptResult(pr, {"lambda": 0.0, "pi": 0.0}, flagged)
    return OptResult(val, {"lambda": lam, "pi": dumer_pi(q, R, lam)}, flagged)


def large_sigma_max(q: int, R: float, lam: float) -> float:
    """(R+lam)/2 h(1): the largest list exponent for full-weight halves."""
    return (R + lam) / 2 * h(q, 1.0)


def large_amortized_lambda(q: int, R: float) -> float:
    """lam where the list-size bound meets sigma = lam (amortized time one)."""
    L = math.log(q - 1) / math.log(q)
    return (R / 2) * L / (1 - L / 2)


def dumer_isd_g(q: int, R: float, tau: float, lam: float, sigma: float) -> float:
    rest = 1 - R - lam
    x = (tau - R - lam) / rest if rest > 0 else 0.0
    return max(sigma, 2 * sigma - lam) + max(
        0.0, min(1 - R, h(q, tau)) - rest * h(q, x) - 2 * sigma)


def dumer_isd_exponent_large(q: int, R: float, tau: float, tol: float = 1e-7) -> OptResult:
    """min over (lam, sigma) of g; q = 2 goes through the symmetry tau -> 1 - tau."""
    _check(R, tau)
    if q == 2:
        res = dumer_isd_exponent_short(q, R, 1 - tau, tol)
        return OptResult(res.exponent, dict(res.params, mirrored=True), res.flagged)
    if tau < easy_band(q, R)[1] - 1e-15:
        raise ValueError("large-weight regime needs tau >= R + (q-1)(1-R)/q")
    lam_hi = min(1 - R, tau - R)
    flags = []

    def inner(lam):
        smax = large_sigma_max(q, R, lam)
        s, v, fl = _minimize(lambda sg: dumer_isd_g(q, R, tau, lam, sg), 0.0, smax, tol)
        flags.append(fl)
        return s, v

    lam, val, fl = _minimize(lambda l: inner(l)[1], 0.0, lam_hi, tol)
    sigma, val = inner(lam)
    pr = prange_exponent(q, R, tau)
    if pr <= val:
        return OptResult(pr, {"lambda": 0.0, "sigma": 0.0}, fl)
    return OptResult(val, {"lambda": lam, "sigma": sigma}, fl or any(flags))


def isd_dumer_exponent(q: int, R: float, tau: float, tol: float = 1e-7) -> OptResult:
    """ISD with a Dumer sub-decoder at any tau, choosing the weight regime."""
    _check(R, tau)
    lo, hi = easy_band(q, R)
    if q == 2 and tau > 0.5:
        tau = 1 - tau
    if tau <= lo:
        return dumer_isd_exponent_short(q, R, tau, tol)
    if tau <= hi:
        return OptResult(prange_exponent(q, R, tau), {"lambda": 0.0})
    return dumer_isd_exponent_large(q, R, tau, tol)


# Wagner -------------------------------------------------------------------------

def _depth_ratio(a: int, mode: str) -> float:
    return (a + 1) / 2 ** a if mode == "one_solution" else a / 2 ** a


def wagner_depth(q: int, R: float, tau: float, mode: str = "one_solution") -> int:
    """Largest a in 1..40 with (1-R)/h(tau) <= (a+1)/2^a (or a/2^a when amortized)."""
    ht = h(q, tau)
    if ht <= 0:
        raise DepthInfeasible("h(tau) = 0")
    ratio = (1 - R) / ht
    feas = [a for a in range(1, MAX_DEPTH + 1) if ratio <= _depth_ratio(a, mode) * (1 + 1e-12)]
    if not feas:
        raise DepthInfeasible(f"no depth a satisfies the constraint at tau = {tau}")
    return max(feas)


def wagner_exponent(q: int, R: float, tau: float, mode: str = "one_solution"):
    """(time exponent, a): (1-R)/(a+1) for one solution, (1-R)/a amortized."""
    _check(R, tau)
    a = wagner_depth(q, R, tau, mode)
    return ((1 - R) / (a + 1) if mode == "one_solution" else (1 - R) / a), a


def wagner_isd_value(q: int, R: float, tau: float, lam: float, pi: float, a: int) -> float:
    rest = 1 - R - lam
    x = (tau - pi) / rest if rest > 0 else 0.0
    return lam / a + max(0.0, min(1 - R, h(q, tau)) - lam - rest * h(q, x) - lam / a)


def _wagner_pi_range(q, R, tau, lam, a):
    """Feasible interval for pi at (lam, a), or None."""
    m = R + lam
    c = (2 ** a) * lam / (a * m)
    if c > 1:
        return None
    lo = m * entropy_inv_minus(q, c)
    top_h = h(q, 1.0)
    hi = m if c <= top_h else m * entropy_inv_plus(q, c)
    lo = max(lo, tau - (1 - R - lam))
    hi = min(hi, tau)
    return (lo, hi) if lo <= hi + 1e-15 else None


def _wagner_best_pi(q, R, tau, lam, a):
    rng = _wagner_pi_range(q, R, tau, lam, a)
    if rng is None:
        return None
    # h((tau - pi)/(1-R-lam)) peaks where the argument equals (q-1)/q
    target = tau - (q - 1) * (1 - R - lam) / q
    return min(max(target, rng[0]), rng[1])


def wagner_isd_exponent(q: int, R: float, tau: float, tol: float = 1e-7) -> OptResult:
    """ISD with a Wagner sub-decoder; returns exponent and (lambda, pi, a)."""
    _check(R, tau)
    if q == 2 and tau > 0.5:
        tau = 1 - tau
    best = OptResult(prange_exponent(q, R, tau), {"lambda": 0.0, "pi": prange_gamma(q, R, tau), "a": 1})
    for a in range(1, MAX_DEPTH + 1):
        def ok(lam, a=a):
            return _wagner_best_pi(q, R, tau, lam, a) is not None
        hi = _feasible_upper(ok, 0.0, 1 - R)
        if hi <= tol:
            break

        def obj(lam, a=a):
            pi = _wagner_best_pi(q, R, tau, lam, a)
            return wagner_isd_value(q, R, tau, lam, pi, a)

        lam, val, fl = _minimize(obj, 0.0, hi, tol)
        if val < best.exponent:
            best = OptResult(val, {"lambda": lam, "pi": _wagner_best_pi(q, R, tau, lam, a),
                                   "a": a}, fl)
    return best


# curves -------------------------------------------------------------------------

ALGORITHMS = ("prange", "dumer", "isd-dumer", "wagner", "wagner-amortized", "isd-wagner",
              "expected")
PARAM_COLUMNS = {
    "prange": ["gamma"],
    "dumer": [],
    "isd-dumer": ["lambda", "pi", "sigma"],
    "wagner": ["a"],
    "wagner-amortized": ["a"],
    "isd-wagner": ["lambda", "pi", "a"],
    "expected": [],
}


@dataclass
class ExponentQuery:
    q: int
    R: float
    tau: float
    algorithm: str = "prange"
    base: str = "q"
    tol: float = 1e-7


def _warn_if_flagged(res: OptResult, query: ExponentQuery) -> None:
    if res.flagged:
        warnings.warn(f"{query.algorithm} at tau={query.tau}: golden-section minimum was "
                      f"beaten by the grid by more than {GRID_TOLERANCE}", RuntimeWarning,
                      stacklevel=3)


def evaluate(query: ExponentQuery) -> tuple[float, dict]:
    """Exponent (in the requested base) and the argmin parameters."""
    q, R, tau, alg = query.q, query.R, query.tau, query.algorithm
    if alg == "prange":
        val, params = prange_exponent(q, R, tau), {"gamma": prange_gamma(q, R, tau)}
    elif alg == "dumer":
        val, params = dumer_plain_exponent(q, R, tau), {}
    elif alg == "isd-dumer":
        res = isd_dumer_exponent(q, R, tau, query.tol)
        val, params = res.exponent, res.params
        _warn_if_flagged(res, query)
    elif alg in ("wagner", "wagner-amortized"):
        mode = "one_solution" if alg == "wagner" else "amortized"
        val, a = wagner_exponent(q, R, tau, mode)
        params = {"a": a}
    elif alg == "isd-wagner":
        res = wagner_isd_exponent(q, R, tau, query.tol)
        val, params = res.exponent, res.params
        _warn_if_flagged(res, query)
    elif alg == "expected":
        val, params = expected_solutions_exponent(q, R, tau), {}
    else:
        raise ValueError(f"unknown algorithm {alg!r}")
    if query.base == "2":
        val = val * math.log2(q)
    elif query.base != "q":
        raise ValueError("base must be '2' or 'q'")
    return val, params


@dataclass
class ExponentCurve:
    q: int
    R: float
    algorithm: str
    base: str
    rows: list = field(default_factory=list)  # (tau, exponent, params)

    def to_csv(self) -> str:
        cols = PARAM_COLUMNS[self.algorithm]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["tau", "exponent"] + cols)
        for tau, val, params in self.rows:
            w.writerow([_fmt(tau), _fmt(val)] + [_fmt(params.get(c)) for c in cols])
        return buf.getvalue()


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, int):
        return str(v)
    return f"{v:.12g}"


def tau_grid(lo: float, hi: float, step: float) -> list[float]:
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + i * step, 12) for i in range(count)]


def emit_curve(algorithm: str, q: int, R: float, taus, base: str = "q",
               tol: float = 1e-7) -> ExponentCurve:
    """Sample an exponent over increasing tau values; infeasible points get NaN."""
    curve = ExponentCurve(q, R, algorithm, base)
    prev = -math.inf
    for tau in taus:
        if tau <= prev:
            raise ValueError("tau values must be strictly increasing")
        prev = tau
        try:
            val, params = evaluate(ExponentQuery(q, R, tau, algorithm, base, tol))
        except DepthInfeasible:
            val, params = math.nan, {}
        curve.rows.append((tau, val, params))
    return curve
