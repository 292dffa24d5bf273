"""Command-line experiment harness.

Subcommands::

    lap-eig    eigenpairs of random dual quaternion graph Laplacians
    pentagon   the 5-cycle matrix with repeated standard eigenvalues
    pgo        pose graph optimization trials
    instance   generate / solve PGO instance files

Exit codes: 0 ok, 2 usage, 3 solver failure, 4 I/O or parse error.
"""

from __future__ import annotations

import argparse
import csv
import math
import statistics
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .apps.graphs import build_laplacian, build_pentagon, metric_e_lambda, random_graph, random_unit_dq_vector
from .apps.pgo import PGOConfig, dump_instance, load_instance, make_pgo_instance, pgo_solve
from .eig import PowerConfig, all_eigenpairs, all_eigenpairs_deflation, all_eigenpairs_power
from .errors import DQError, FormatError, NoConvergence
from .linalg import dump_matrix, load_matrix, mat_norms

EXIT_OK, EXIT_USAGE, EXIT_SOLVER, EXIT_IO = 0, 2, 3, 4

LAP_HEADER = ["trial", "n", "sparsity", "algo", "e_lambda", "time_s", "seed"]
PGO_HEADER = ["trial", "n", "obs_rate", "noise", "variant", "e_Q", "iters", "time_s", "success", "seed"]
ALGOS = ("power", "adjoint-power", "adjoint-direct")
VARIANTS = ("demp", "demp1", "dbdemp", "dbdemp1")


# ---------------------------------------------------------------------------
# argument types
# ---------------------------------------------------------------------------


def _rate(text):
    v = float(text)
    if not 0 < v <= 1:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1], got {text}")
    return v


def _nonneg(text):
    v = float(text)
    if v < 0 or not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"must be a finite value >= 0, got {text}")
    return v


def _positive(text):
    v = float(text)
    if not v > 0 or not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return v


def _int_at_least(lo):
    def parse(text):
        v = int(text)
        if v < lo:
            raise argparse.ArgumentTypeError(f"must be >= {lo}, got {text}")
        return v

    return parse


# ---------------------------------------------------------------------------
# lap-eig
# ---------------------------------------------------------------------------


def _lap_solve(L, algo, cfg):
    if algo == "adjoint-direct":
        return all_eigenpairs(L)
    if algo == "adjoint-power":
        return all_eigenpairs_deflation(L, cfg)
    return all_eigenpairs_power(L, cfg)


def _lap_trial(job):
    trial, args = job
    seed = args.seed + trial
    rng = np.random.default_rng(seed)
    if args.load:
        with open(args.load) as fp:
            L = load_matrix(fp)
    else:
        L = build_laplacian(random_graph(args.n, args.sparsity, False, rng), random_unit_dq_vector(args.n, rng))
    if args.dump_dir:
        with open(Path(args.dump_dir) / f"lap_trial{trial}.dqm", "w") as fp:
            dump_matrix(L, fp)
    cfg = PowerConfig(max_iters=args.max_iters, tol=args.tol, init="random", seed=seed, strict=False)
    t0 = time.perf_counter()
    try:
        e = metric_e_lambda(L, _lap_solve(L, args.algo, cfg))
        ok = True
    except DQError as exc:
        print(f"trial {trial}: {type(exc).__name__}: {exc}", file=sys.stderr)
        e, ok = float("nan"), False
    elapsed = time.perf_counter() - t0
    return [trial, L.shape[0], args.sparsity, args.algo, e, float("nan") if args.no_timing else elapsed, seed], ok


def _run_trials(fn, args):
    jobs = [(t, args) for t in range(args.trials)]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            return list(ex.map(fn, jobs))
    return [fn(j) for j in jobs]


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", newline=""), True


def _write_csv(path, header, rows):
    fp, close = _open_out(path)
    try:
        w = csv.writer(fp, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(x)) if isinstance(x, float) else x for x in row])
    finally:
        if close:
            fp.close()


def cmd_lap_eig(args) -> int:
    if args.load:
        args.trials = 1
    results = _run_trials(_lap_trial, args)
    rows = [r for r, _ in results]
    _write_csv(args.out, LAP_HEADER, rows)
    es = [r[4] for r in rows if not math.isnan(r[4])]
    mean_e = statistics.fmean(es) if es else float("nan")
    times = [r[5] for r in rows]
    summary = f"algo={args.algo} n={rows[0][1]} sparsity={args.sparsity} trials={len(rows)} mean_e_lambda={mean_e:.3e}"
    if not args.no_timing:
        summary += f" mean_time_s={statistics.fmean(times):.3e}"
    print(summary, file=sys.stderr if args.out in (None, "-") else sys.stdout)
    return EXIT_OK if all(ok for _, ok in results) else EXIT_SOLVER


# ---------------------------------------------------------------------------
# pentagon
# ---------------------------------------------------------------------------


def cmd_pentagon(args) -> int:
    P = build_pentagon()
    if args.dump:
        with open(args.dump, "w") as fp:
            dump_matrix(P, fp)
    t0 = time.perf_counter()
    spec = all_eigenpairs(P)
    elapsed = time.perf_counter() - t0
    print("eigenvalues (direct adjoint decomposition):")
    for p in spec:
        print(f"  {p.value:.4f}")
    print(f"e_lambda = {metric_e_lambda(P, spec):.4e}")
    print(f"time_s = {elapsed:.4e}")
    if args.try_deflation:
        print("deflation with adjoint power iteration:")
        try:
            all_eigenpairs_deflation(P, PowerConfig(max_iters=args.max_iters))
            print("  converged at every stage")
        except NoConvergence as exc:
            print(f"  stage {exc.stage}: no convergence, residual {exc.residual:.3e}")
        spec_d = all_eigenpairs_deflation(P, PowerConfig(max_iters=args.max_iters, strict=False))
        bad = 0
        thresh = 1e-6 * mat_norms(P, "FR")
        for p in spec_d:
            r = p.residual(P)
            flag = "ok" if r <= thresh else "UNRESOLVED"
            bad += r > thresh
            print(f"  {p.value:.4f}  residual={r:.3e}  {flag}")
        print(f"  unresolved eigenpairs: {bad}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# pgo
# ---------------------------------------------------------------------------


def _pgo_config(args) -> PGOConfig:
    inner = PowerConfig(max_iters=args.inner_max_iters, tol=args.inner_tol, strict=False)
    return PGOConfig(
        variant=args.variant,
        rho0=args.rho0,
        rho1=args.rho1,
        beta=args.beta,
        k_max=args.kmax,
        window=args.window,
        inner=inner,
    )


def _pgo_trial(job):
    trial, args = job
    seed = args.seed + trial
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    try:
        inst = make_pgo_instance(args.n, args.obs_rate, args.noise, rng)
        t0 = time.perf_counter()
        res = pgo_solve(inst, _pgo_config(args))
        e, iters, ok = res.e_Q, res.iterations, res.success
    except DQError as exc:
        print(f"trial {trial}: {type(exc).__name__}: {exc}", file=sys.stderr)
        e, iters, ok = float("nan"), 0, False
    elapsed = time.perf_counter() - t0
    t = float("nan") if args.no_timing else elapsed
    return [trial, args.n, args.obs_rate, args.noise, args.variant, e, iters, t, str(ok).lower(), seed]


def cmd_pgo(args) -> int:
    rows = _run_trials(_pgo_trial, args)
    _write_csv(args.out, PGO_HEADER, rows)
    es = [r[5] for r in rows if not math.isnan(r[5])]
    mean_e = statistics.fmean(es) if es else float("nan")
    succ = sum(r[8] == "true" for r in rows)
    summary = (
        f"variant={args.variant} n={args.n} obs_rate={args.obs_rate} noise={args.noise} "
        f"mean_e_Q={mean_e:.3e} mean_iters={statistics.fmean(r[6] for r in rows):.2f} "
        f"success={succ}/{len(rows)}"
    )
    print(summary, file=sys.stderr if args.out in (None, "-") else sys.stdout)
    return EXIT_OK


# ---------------------------------------------------------------------------
# instance
# ---------------------------------------------------------------------------


def cmd_instance_gen(args) -> int:
    inst = make_pgo_instance(args.n, args.obs_rate, args.noise, np.random.default_rng(args.seed))
    fp, close = _open_out(args.out)
    try:
        dump_instance(inst, fp)
    finally:
        if close:
            fp.close()
    return EXIT_OK


def cmd_instance_solve(args) -> int:
    try:
        with open(args.file) as fp:
            inst = load_instance(fp)
    except FormatError as exc:
        print(f"{args.file}: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        res = pgo_solve(inst, _pgo_config(args))
    except DQError as exc:
        print(f"solver failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    e = "nan" if res.e_Q is None else f"{res.e_Q:.6e}"
    print(f"variant={args.variant} iterations={res.iterations} residual={res.residual_history[-1]:.3e} e_Q={e} success={str(res.success).lower()}")
    if args.dump:
        with open(args.dump, "w") as fp:
            dump_matrix(res.X2, fp)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_common(p, trials=True):
    p.add_argument("--seed", type=_int_at_least(0), default=0, help="base seed; trial t uses seed + t")
    p.add_argument("--out", default=None, help="output path ('-' or omitted: stdout)")
    if trials:
        p.add_argument("--trials", type=_int_at_least(1), default=1)
        p.add_argument("--jobs", type=_int_at_least(1), default=1, help="worker processes")
        p.add_argument("--no-timing", action="store_true", help="write nan in time_s for byte-stable output")


def _add_pgo_solver(p):
    p.add_argument("--variant", choices=VARIANTS, default="dbdemp1")
    p.add_argument("--rho0", type=_positive, default=0.01)
    p.add_argument("--rho1", type=float, default=None, help="default 1.1 for demp, 1.0 otherwise")
    p.add_argument("--beta", type=_positive, default=1e-6)
    p.add_argument("--kmax", type=_int_at_least(1), default=200)
    p.add_argument("--window", type=_int_at_least(1), default=2, help="stagnation window d")
    p.add_argument("--inner-max-iters", type=_int_at_least(1), default=1000)
    p.add_argument("--inner-tol", type=_positive, default=1e-12)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dqadjoint", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lap-eig", help="eigenpairs of random graph Laplacians")
    p.add_argument("--n", type=_int_at_least(2), default=10)
    p.add_argument("--sparsity", type=_rate, default=0.3)
    p.add_argument("--algo", choices=ALGOS, default="adjoint-direct")
    p.add_argument("--max-iters", type=_int_at_least(1), default=10_000, help="power iterations per eigenpair")
    p.add_argument("--tol", type=_positive, default=1e-12, help="relative residual tolerance")
    p.add_argument("--load", default=None, help="run on a matrix file instead of a random Laplacian")
    p.add_argument("--dump-dir", default=None, help="write each generated Laplacian here")
    _add_common(p)
    p.set_defaults(func=cmd_lap_eig)

    p = sub.add_parser("pentagon", help="5-cycle matrix with repeated standard eigenvalues")
    p.add_argument("--try-deflation", action="store_true", help="also run deflation and report failures")
    p.add_argument("--max-iters", type=_int_at_least(1), default=10_000)
    p.add_argument("--dump", default=None, help="write the matrix to this file")
    p.set_defaults(func=cmd_pentagon)

    p = sub.add_parser("pgo", help="pose graph optimization trials")
    p.add_argument("--n", type=_int_at_least(2), default=10)
    p.add_argument("--obs-rate", type=_rate, default=0.4)
    p.add_argument("--noise", type=_nonneg, default=0.0)
    _add_pgo_solver(p)
    _add_common(p)
    p.set_defaults(func=cmd_pgo)

    p = sub.add_parser("instance", help="PGO instance files")
    isub = p.add_subparsers(dest="action", required=True)
    g = isub.add_parser("gen", help="write a random instance")
    g.add_argument("--n", type=_int_at_least(2), default=10)
    g.add_argument("--obs-rate", type=_rate, default=0.4)
    g.add_argument("--noise", type=_nonneg, default=0.0)
    _add_common(g, trials=False)
    g.set_defaults(func=cmd_instance_gen)
    s = isub.add_parser("solve", help="solve an instance file")
    s.add_argument("file")
    s.add_argument("--dump", default=None, help="write the final X2 matrix here")
    _add_pgo_solver(s)
    s.set_defaults(func=cmd_instance_solve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if hasattr(args, "variant"):
            _pgo_config(args)  # validate solver flags up front
    except ValueError as exc:
        parser.error(str(exc))
    try:
        return args.func(args)
    except FormatError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except DQError as exc:
        print(f"solver failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
