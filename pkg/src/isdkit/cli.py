"""Command-line interface.

Exit codes: 0 success, 1 nothing found within budget, 2 usage or input error,
3 infeasible parameters.  Each command ends with one machine-readable line.
"""
from __future__ import annotations

import argparse
import math
import statistics
import sys
import time
from fractions import Fraction

from . import exponents as ex
from . import generic_decoders as gd
from . import instances as ins
from . import randcode_stats as rs
from . import reductions as red
from ._enum import sphere_count
from .algebraic_decoders import DecodingFailure, bw_decode
from .codes import grs_code
from .gf_linalg import FieldCtx


EXIT_OK, EXIT_NOT_FOUND, EXIT_USAGE, EXIT_INFEASIBLE = 0, 1, 2, 3
SOLVERS = ("prange", "dumer", "wagner", "isd-dumer", "isd-wagner")


class UsageError(Exception):
    pass


def _row(v) -> str:
    return " ".join(str(int(x)) for x in v)


def _ints(text: str) -> list[int]:
    return [int(v) for v in text.replace(",", " ").split()]


def _result(ok: bool, iters: int, ms: float) -> str:
    return f"RESULT ok={int(ok)} iters={iters} time_ms={int(round(ms))}"


# gen / solve ---------------------------------------------------------------------


def cmd_gen(args) -> int:
    inst = ins.gen_dp(FieldCtx(args.q), args.n, args.R, args.tau, seed=args.seed)
    ins.write_dpi(args.out, inst, with_planted=not args.no_planted)
    print(f"RESULT ok=1 q={args.q} n={inst.n} k={inst.k} t={inst.t}")
    return EXIT_OK


def _default_isd_dumer(inst):
    p = min(2, inst.t)
    ell = int(math.floor(math.log(max(1, sphere_count(inst.k // 2, p // 2, inst.ctx.q)))
                         / math.log(inst.ctx.q)))
    return p, min(ell, inst.n - inst.k)


def _default_isd_wagner(inst, a):
    p = min(inst.t, 1 << a)
    best = None
    for ell in range(0, inst.n - inst.k + 1):
        try:
            gd.wagner_check(inst.k + ell, p, inst.ctx.q, a, math.ceil(ell / a) if ell else 0)
        except gd.DepthInfeasible:
            continue
        best = ell
    if best is None:
        raise gd.DepthInfeasible("no merge width satisfies the depth constraint")
    return p, best


def run_solver(inst, alg: str, seed, args) -> gd.SolveReport:
    stop = not args.all
    if alg == "prange":
        cfg = gd.PrangeConfig(args.max_iters, seed, stop, args.workers)
        return gd.prange(inst, cfg)
    if alg == "dumer":
        return gd.dumer(inst, args.list_size, args.max_iters or 50, seed, stop,
                        workers=args.workers)
    if alg == "wagner":
        return gd.wagner(inst, args.a or 2, args.mode, seed, ell=args.ell,
                         list_size=args.list_size, max_iterations=args.max_iters or 1,
                         stop_on_success=stop and args.mode == "one_solution",
                         workers=args.workers)
    if alg == "isd-dumer":
        p, ell = _default_isd_dumer(inst)
        params = gd.IsdParams(args.p if args.p is not None else p,
                              args.ell if args.ell is not None else ell, "dumer",
                              args.list_size, 1, seed, args.max_iters, stop)
        return gd.isd(inst, params, workers=args.workers)
    if alg == "isd-wagner":
        a = args.a or 2
        if args.p is None or args.ell is None:
            p, ell = _default_isd_wagner(inst, a)
        params = gd.IsdParams(args.p if args.p is not None else p,
                              args.ell if args.ell is not None else ell, "wagner",
                              None, a, seed, args.max_iters, stop)
        return gd.isd(inst, params, workers=args.workers)
    raise UsageError(f"unknown algorithm {alg}")


def _solve_bw(args) -> int:
    if args.k is None or args.x is None or args.y is None:
        raise UsageError("--alg bw needs --k, --x and --y")
    ctx = FieldCtx(args.q)
    x = _ints(args.x)
    z = _ints(args.z) if args.z else [1] * len(x)
    code = grs_code(ctx, x, z, args.k)
    t0 = time.perf_counter()
    try:
        f, e = bw_decode(code, _ints(args.y))
    except DecodingFailure as exc:
        print(f"FAIL {exc}")
        print(_result(False, 1, (time.perf_counter() - t0) * 1000))
        return EXIT_NOT_FOUND
    print("f " + _row(f.coeffs))
    print(_row(e))
    print(_result(True, 1, (time.perf_counter() - t0) * 1000))
    return EXIT_OK


def cmd_solve(args) -> int:
    if args.alg == "bw":
        return _solve_bw(args)
    if args.instance is None:
        raise UsageError("--instance is required")
    inst = ins.read_dpi(args.instance)
    try:
        rep = run_solver(inst, args.alg, args.seed, args)
    except gd.IterationBudgetExceeded as exc:
        rep = exc.report
    ok = bool(rep.solutions) and all(ins.verify(inst, e) for e in rep.solutions)
    for e in rep.solutions:
        print(_row(e))
    print(_result(ok, rep.iterations, rep.wall_ms))
    return EXIT_OK if ok else EXIT_NOT_FOUND


# stats -----------------------------------------------------------------------------


def _kv(key: str, value) -> None:
    if isinstance(value, float):
        value = f"{value:.12g}"
    print(f"{key} {value}")


def cmd_stats(args) -> int:
    what = args.what
    if what == "gv":
        _kv("GV", rs.gv_distance(args.n, args.k, args.q))
    elif what == "tau":
        _kv("TAU_MINUS", rs.tau_minus(args.q, args.R))
        try:
            _kv("TAU_PLUS", rs.tau_plus(args.q, args.R))
        except rs.DomainError:
            _kv("TAU_PLUS", "undefined")
    elif what == "expected":
        val: Fraction = rs.expected_solutions(args.n, args.k, args.t, args.q)
        _kv("EXPECTED", f"{val.numerator}/{val.denominator}")
        _kv("EXPECTED_FLOAT", float(val))
    elif what == "lhl":
        _kv("LHL_BOUND", rs.lhl_bound(args.n, args.k, args.t, args.q))
        _kv("LHL_MEAN", rs.lhl_empirical(args.n, args.k, args.t, args.q, args.samples, args.seed))
    elif what == "mindist":
        frac = rs.min_distance_concentration(args.n, args.R, args.q, args.eps, args.samples,
                                             args.seed)
        _kv("TAU_MINUS", rs.tau_minus(args.q, args.R))
        _kv("FRACTION_NEAR_GV", frac)
    print("RESULT ok=1")
    return EXIT_OK


# exponent ---------------------------------------------------------------------------


def _parse_range(text: str) -> list[float]:
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise UsageError("--tau-range expects lo:hi[:step]")
    lo, hi = float(parts[0]), float(parts[1])
    step = float(parts[2]) if len(parts) == 3 else 1e-3
    if not 0 < lo <= hi < 1 or step <= 0:
        raise UsageError("need 0 < lo <= hi < 1 and a positive step")
    return ex.tau_grid(lo, hi, step)


def cmd_exponent(args) -> int:
    if (args.tau is None) == (args.tau_range is None):
        raise UsageError("give exactly one of --tau and --tau-range")
    taus = [args.tau] if args.tau is not None else _parse_range(args.tau_range)
    if not 0 < args.R < 1 or not all(0 < t < 1 for t in taus):
        raise UsageError("R and tau must lie in (0, 1)")
    curve = ex.emit_curve(args.alg, args.q, args.R, taus, base=args.base, tol=args.tol)
    text = curve.to_csv()
    if args.out:
        with open(args.out, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    finite = sum(1 for _, v, _ in curve.rows if not math.isnan(v))
    print(f"RESULT ok=1 points={len(curve.rows)} feasible={finite}")
    return EXIT_OK


# reduce / lpn ----------------------------------------------------------------------


def cmd_reduce(args) -> int:
    tdm = red.read_tdm(args.inp)
    inst = red.tdm_decoding_instance(tdm)
    ins.write_dpi(args.out, inst)
    print(f"RESULT ok=1 n={inst.n} rows={inst.H.shape[0]} t={inst.t}")
    return EXIT_OK


def cmd_lpn(args) -> int:
    oracle = red.LpnOracle(args.k, args.tau, seed=args.seed, white_box=args.white_box)
    noisy = red.lpn_collect(oracle, args.n)
    inst = ins.noisy_to_syndrome(noisy)
    ins.write_dpi(args.out, inst, with_planted=args.white_box)
    if args.white_box:
        print("SECRET " + _row(oracle.secret))
    print(f"RESULT ok=1 n={inst.n} k={inst.k} t={inst.t}")
    return EXIT_OK


# bench -----------------------------------------------------------------------------


def cmd_bench(args) -> int:
    inst = ins.gen_dp(FieldCtx(args.q), args.n, args.R, args.tau, seed=args.seed)
    times, iters, oks = [], [], []
    for i in range(args.repeats):
        try:
            rep = run_solver(inst, args.alg, args.seed + i, args)
        except gd.IterationBudgetExceeded as exc:
            rep = exc.report
        times.append(rep.wall_ms)
        iters.append(rep.iterations)
        oks.append(bool(rep.solutions))
    med = statistics.median(times)
    print(f"BENCH alg={args.alg} n={inst.n} k={inst.k} t={inst.t} q={args.q} "
          f"runs={args.repeats} solved={sum(oks)} median_ms={med:.3f}")
    print(_result(all(oks), int(statistics.median(iters)), med))
    return EXIT_OK if all(oks) else EXIT_NOT_FOUND


# parser ----------------------------------------------------------------------------


def _solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--p", type=int)
    p.add_argument("--ell", type=int)
    p.add_argument("--a", type=int)
    p.add_argument("--mode", choices=("one_solution", "amortized"), default="amortized")
    p.add_argument("--list-size", type=int)
    p.add_argument("--all", action="store_true", help="keep going after the first solution")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--max-iters", type=int)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="isdkit", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a random DP instance (.dpi)")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--R", type=float, required=True)
    g.add_argument("--tau", type=float, required=True)
    g.add_argument("--q", type=int, default=2)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.add_argument("--no-planted", action="store_true")
    g.set_defaults(fn=cmd_gen)

    s = sub.add_parser("solve", help="solve a .dpi instance, or GRS-decode with --alg bw")
    s.add_argument("--alg", choices=SOLVERS + ("bw",), required=True)
    s.add_argument("--instance")
    _solver_flags(s)
    s.add_argument("--q", type=int, default=2, help="field size for --alg bw")
    s.add_argument("--k", type=int, help="dimension for --alg bw")
    s.add_argument("--x", help="evaluation points for --alg bw")
    s.add_argument("--z", help="column multipliers for --alg bw (default all one)")
    s.add_argument("--y", help="received word for --alg bw")
    s.set_defaults(fn=cmd_solve)

    st = sub.add_parser("stats", help="random-code statistics")
    st.add_argument("what", choices=("gv", "tau", "expected", "lhl", "mindist"))
    st.add_argument("--n", type=int)
    st.add_argument("--k", type=int)
    st.add_argument("--t", type=int)
    st.add_argument("--q", type=int, default=2)
    st.add_argument("--R", type=float)
    st.add_argument("--eps", type=float, default=0.1)
    st.add_argument("--samples", type=int, default=100)
    st.add_argument("--seed", type=int, default=0)
    st.set_defaults(fn=cmd_stats)

    e = sub.add_parser("exponent", help="asymptotic exponent curves as CSV")
    e.add_argument("--alg", choices=ex.ALGORITHMS, required=True)
    e.add_argument("--q", type=int, required=True)
    e.add_argument("--R", type=float, required=True)
    e.add_argument("--tau", type=float)
    e.add_argument("--tau-range")
    e.add_argument("--base", choices=("2", "q"), default="q")
    e.add_argument("--tol", type=float, default=1e-7)
    e.add_argument("--out")
    e.set_defaults(fn=cmd_exponent)

    r = sub.add_parser("reduce", help="3DM to a decoding instance")
    r.add_argument("source", choices=("3dm",))
    r.add_argument("--in", dest="inp", required=True)
    r.add_argument("--out", required=True)
    r.set_defaults(fn=cmd_reduce)

    lp = sub.add_parser("lpn", help="collect LPN samples as a decoding instance")
    lp.add_argument("action", choices=("gen",))
    lp.add_argument("--k", type=int, required=True)
    lp.add_argument("--tau", type=float, required=True)
    lp.add_argument("--n", type=int, required=True)
    lp.add_argument("--seed", type=int, default=0)
    lp.add_argument("--out", required=True)
    lp.add_argument("--white-box", action="store_true",
                    help="record the realized error and print the secret (testing only)")
    lp.set_defaults(fn=cmd_lpn)

    b = sub.add_parser("bench", help="median-of-N wall time of a solver on a generated instance")
    b.add_argument("--alg", choices=SOLVERS, required=True)
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--R", type=float, required=True)
    b.add_argument("--tau", type=float, required=True)
    b.add_argument("--q", type=int, default=2)
    b.add_argument("--repeats", type=int, default=5)
    _solver_flags(b)
    b.set_defaults(fn=cmd_bench)
    return ap


_STATS_NEEDS = {
    "gv": ("n", "k"), "tau": ("R",), "expected": ("n", "k", "t"),
    "lhl": ("n", "k", "t"), "mindist": ("n", "R"),
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "stats":
        missing = [f"--{f}" for f in _STATS_NEEDS[args.what] if getattr(args, f) is None]
        if missing:
            parser.error(f"stats {args.what} needs {' '.join(missing)}")
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"isdkit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (gd.InfeasibleParameters, ins.DegenerateParams) as exc:
        print(f"isdkit: infeasible: {exc}", file=sys.stderr)
        print("RESULT ok=0 infeasible=1")
        return EXIT_INFEASIBLE
    except (ins.FormatError, OSError, ValueError) as exc:
        print(f"isdkit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
