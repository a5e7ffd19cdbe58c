"""Command-line entry point: ``mkflats {fit,bench,stream,gen}``.

Exit status is 0 on success, 1 for usage errors and 2 for data errors.
"""

import argparse
import csv
import json
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import _kernels
from .exceptions import (
    DimMismatchError,
    InitializationError,
    InsufficientDataError,
    InvalidDimError,
    InvalidParamsError,
    NoInliersError,
    ParseError,
    RankDeficientError,
    ZeroVectorError,
)
from .geometry import homogenize, nearest_subspace, normalize_to_sphere, svd_project
from .initializers import random_init
from .kflats import kflats_with_restarts
from .matrixio import parse_row, read_labels, read_matrix, write_bases, write_labels, write_matrix
from .mkf import FitConfig, init_rng, mkf_feed, new_state, run_with_restarts
from .scoring import aggregate, misclassification_rate
from .synth import NOISE_MODES, generate_hlm

DATA_ERRORS = (ParseError, DimMismatchError, ZeroVectorError, RankDeficientError, InsufficientDataError,
               InitializationError, NoInliersError, OSError)
DEFAULT_RESTARTS = {"mkf": 5, "kf": 30}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def parse_setting(text):
    """Parse 'd=4,K=3,D=6' or 'dims=1,2,3;D=5' into (K, dims, D)."""
    parts = re.split(r"[;,](?=\s*\w+\s*=)", text.strip())
    values = {}
    for part in parts:
        key, sep, val = part.partition("=")
        if not sep:
            raise UsageError(f"cannot parse setting fragment {part!r}; expected key=value")
        values[key.strip()] = val.strip()
    try:
        D = int(values.pop("D"))
        if "dims" in values:
            dims = [int(v) for v in values.pop("dims").split(",")]
            K = int(values.pop("K", len(dims)))
        else:
            d = int(values.pop("d"))
            K = int(values.pop("K"))
            dims = [d] * K
    except KeyError as err:
        raise UsageError(f"setting {text!r} is missing {err.args[0]}") from None
    except ValueError:
        raise UsageError(f"setting {text!r} has a non-integer value") from None
    if values:
        raise UsageError(f"unknown setting keys: {', '.join(sorted(values))}")
    if len(dims) != K:
        raise UsageError(f"setting {text!r} lists {len(dims)} dimensions for K={K}")
    return K, dims, D


def _projection_dim(project, K):
    if project == "none":
        return None
    if project == "4K":
        return 4 * K
    try:
        m = int(project)
    except ValueError:
        raise UsageError(f"--project must be none, 4K or an integer, got {project!r}") from None
    return m


def _fit(points, K, d, algo, init, restarts, seed, dt, kf_sphere=False, backend=None):
    if algo == "mkf":
        return run_with_restarts(points, K, d, FitConfig(dt=dt, rng_seed=seed), restarts, init, "l1",
                                 backend=backend)
    return kflats_with_restarts(points, K, d, restarts, init, seed, sphere=kf_sphere)


def cmd_fit(args):
    points = read_matrix(args.input)
    N, D = points.shape
    m = _projection_dim(args.project, args.K)
    if m is not None:
        points = svd_project(points, m)
    d = args.d
    if args.affine:
        points = homogenize(points)
        d += 1
    restarts = args.restarts or DEFAULT_RESTARTS[args.algo]
    if not 1 <= d < points.shape[1]:
        raise UsageError(f"d={d} must be below the working dimension {points.shape[1]}")

    report = _fit(points, args.K, d, args.algo, args.init, restarts, args.seed, args.dt, args.kf_sphere)
    config = dict(input=str(args.input), K=args.K, d=args.d, algo=args.algo, init=args.init,
                  restarts=restarts, seed=args.seed, dt=args.dt, affine=args.affine,
                  project=args.project, kf_sphere=args.kf_sphere, backend=_kernels.BACKEND)
    record = dict(
        config=config,
        l1_energy=report.l1_energy,
        l2_energy=report.l2_energy,
        iters=report.iters,
        converged=report.converged,
        wall_ms=round(report.wall_time * 1000.0, 3) if args.timing else None,
    )
    if args.truth:
        truth = read_labels(args.truth)
        if len(truth) != N:
            raise DimMismatchError(0, N, len(truth))
        record["error_rate"] = misclassification_rate(report.labels, truth)
    if args.labels:
        write_labels(args.labels, report.labels)
    _emit_json(record, args.result)
    print(f"fit: {args.algo} l1={report.l1_energy:.6g} l2={report.l2_energy:.6g} iters={report.iters} "
          f"({report.wall_time:.2f} s)", file=sys.stderr)
    return 0


def run_trial(task):
    """One benchmark trial: generate data with ``seed``, fit every algorithm, score."""
    (K, dims, D, n_per, sigma, outliers, noise, seed, algos, restarts, inits, dt) = task
    ds = generate_hlm(K, dims, D, n_per=n_per, sigma_frac=sigma, outlier_frac=outliers, seed=seed, noise=noise)
    d = max(dims)
    out = {}
    for algo in algos:
        t0 = time.perf_counter()
        rep = _fit(ds.points, K, d, algo, inits[algo], restarts[algo], seed, dt)
        runtime = time.perf_counter() - t0
        out[algo] = dict(error=misclassification_rate(rep.labels, ds.truth), runtime=runtime,
                         l1_energy=rep.l1_energy, l2_energy=rep.l2_energy,
                         restart_iters=rep.restart_iters, restart_converged=rep.restart_converged)
    return out


def run_bench(K, dims, D, outliers, trials, algos=("mkf", "kf"), seed=0, n_per=250, sigma=0.05,
              noise="vector", restarts=None, inits=None, dt=0.01, jobs=1):
    """Run ``trials`` independent trials; trial t uses seed + t for data and fits."""
    restarts = {**DEFAULT_RESTARTS, **(restarts or {})}
    inits = {"mkf": "nn", "kf": "nn", **(inits or {})}
    tasks = [(K, list(dims), D, n_per, sigma, outliers, noise, seed + t, list(algos), restarts, inits, dt)
             for t in range(trials)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            per_trial = list(pool.map(run_trial, tasks))
    else:
        per_trial = [run_trial(task) for task in tasks]

    results = {}
    for algo in algos:
        rows = [trial[algo] for trial in per_trial]
        summary = aggregate([r["error"] for r in rows], [r["runtime"] for r in rows])
        iters = [it for r in rows for it, ok in zip(r["restart_iters"], r["restart_converged"]) if ok]
        results[algo] = dict(
            mean=summary.mean, median=summary.median, std=summary.std, mean_runtime=summary.mean_runtime,
            errors=[r["error"] for r in rows],
            restart_iters=[r["restart_iters"] for r in rows],
            restart_converged=[r["restart_converged"] for r in rows],
            converged_iters=iters,
        )
    return results


def cmd_bench(args):
    K, dims, D = parse_setting(args.setting)
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    for a in algos:
        if a not in DEFAULT_RESTARTS:
            raise UsageError(f"unknown algorithm {a!r}; choose from mkf, kf")
    generate_hlm(K, dims, D, n_per=1, seed=0)  # validates the setting up front
    results = run_bench(K, dims, D, args.outliers, args.trials, algos, args.seed, args.n_per, args.sigma,
                        args.noise, {"mkf": args.mkf_restarts, "kf": args.kf_restarts},
                        {"mkf": args.init, "kf": args.init}, args.dt, args.jobs)
    config = dict(setting=args.setting, K=K, dims=dims, D=D, outliers=args.outliers, sigma=args.sigma,
                  noise=args.noise, n_per=args.n_per, trials=args.trials, algos=algos, seed=args.seed,
                  mkf_restarts=args.mkf_restarts, kf_restarts=args.kf_restarts, init=args.init, dt=args.dt,
                  backend=_kernels.BACKEND)
    for algo, res in results.items():
        print(f"{algo:>4}: mean {100 * res['mean']:.2f}%  median {100 * res['median']:.2f}%  "
              f"std {100 * res['std']:.2f}%  {res['mean_runtime']:.2f} s/trial", file=sys.stderr)
        if not args.timing:
            res["mean_runtime"] = None
    record = dict(config=config, results=results)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["algo", "mean_error", "median_error", "std_error", "mean_runtime"])
            for algo, res in results.items():
                writer.writerow([algo, repr(res["mean"]), repr(res["median"]), repr(res["std"]),
                                 "" if res["mean_runtime"] is None else repr(res["mean_runtime"])])
    _emit_json(record, args.json)
    return 0


def cmd_stream(args):
    cfg = FitConfig(dt=args.dt, rng_seed=args.seed, check_interval=args.check_interval)
    state = None
    if args.D is not None:
        state = new_state(random_init(args.K, args.d, args.D, init_rng(args.seed)), cfg)
    out = sys.stdout
    try:
        for lineno, line in enumerate(args.input, 1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            x = np.array(parse_row(line, lineno))
            if state is None:
                if not 1 <= args.d < len(x):
                    raise UsageError(f"d={args.d} must be below the point dimension {len(x)}")
                state = new_state(random_init(args.K, args.d, len(x), init_rng(args.seed)), cfg)
            if len(x) != state.D:
                raise DimMismatchError(lineno, state.D, len(x))
            try:
                unit = normalize_to_sphere(x)[0]
            except ZeroVectorError:
                raise ParseError(lineno, "zero vector cannot be normalized") from None
            label = nearest_subspace(unit, state.bases)
            was_stopped = state.stopped
            mkf_feed(state, unit)
            out.write(f"{label + 1}\n")
            out.flush()
            if state.stopped and not was_stopped:
                print(f"stream: subspaces settled after {state.iters_done} points", file=sys.stderr)
    finally:
        if state is not None:
            write_bases(args.bases_out, state.bases)
    if state is None:
        print("stream: no input and no --D given; no bases written", file=sys.stderr)
    return 0


def cmd_gen(args):
    K, dims, D = parse_setting(args.setting)
    ds = generate_hlm(K, dims, D, n_per=args.n_per, sigma_frac=args.sigma, outlier_frac=args.outliers,
                      seed=args.seed, noise=args.noise)
    write_matrix(args.out, ds.points, header=f"setting {args.setting} outliers={args.outliers} seed={args.seed}")
    write_labels(args.truth, ds.truth)
    if args.bases:
        with open(args.bases, "w") as fh:
            for i, B in enumerate(ds.generating_bases, 1):
                fh.write(f"# flat {i} d={B.shape[0]}\n")
                for row in B:
                    fh.write(" ".join(repr(float(v)) for v in row) + "\n")
    print(f"gen: {len(ds.points)} points ({ds.n_outliers} outliers) -> {args.out}", file=sys.stderr)
    return 0


def _emit_json(record, path):
    text = json.dumps(record, sort_keys=True, indent=2) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def build_parser():
    parser = _Parser(prog="mkflats", description="Median K-flats subspace clustering")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fit", help="cluster a matrix file")
    p.add_argument("input", help="matrix file, one point per row")
    p.add_argument("-K", type=int, required=True, help="number of subspaces")
    p.add_argument("-d", type=int, required=True, help="subspace dimension (affine flat dimension with --affine)")
    p.add_argument("--algo", choices=["mkf", "kf"], default="mkf")
    p.add_argument("--init", choices=["random", "nn"], default="nn")
    p.add_argument("--restarts", type=int, default=None, help="default 5 for mkf, 30 for kf")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--affine", action="store_true", help="append a homogeneous coordinate; fits d+1 linear")
    p.add_argument("--project", default="none", help="none, 5, 4K or any integer m: SVD projection first")
    p.add_argument("--kf-sphere", action="store_true", help="run K-flats on sphere-normalized points")
    p.add_argument("--labels", help="write labels here (1..K, one per line)")
    p.add_argument("--result", help="write the JSON result record here (default stdout)")
    p.add_argument("--truth", help="truth label file; adds error_rate to the record")
    p.add_argument("--timing", action="store_true", help="record wall time (makes output non-reproducible)")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("bench", help="synthetic benchmark over repeated trials")
    p.add_argument("--setting", required=True, help="e.g. 'd=4,K=3,D=6' or 'dims=1,2,3;D=5'")
    p.add_argument("--outliers", type=float, default=0.05, help="outlier fraction of the total")
    p.add_argument("--sigma", type=float, default=0.05, help="noise as a fraction of the cube diameter")
    p.add_argument("--noise", choices=NOISE_MODES, default="vector")
    p.add_argument("--n-per", type=int, default=250)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--algos", default="mkf,kf")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mkf-restarts", type=int, default=DEFAULT_RESTARTS["mkf"])
    p.add_argument("--kf-restarts", type=int, default=DEFAULT_RESTARTS["kf"])
    p.add_argument("--init", choices=["random", "nn"], default="nn")
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--csv", help="write the summary table as CSV")
    p.add_argument("--json", help="write the full JSON record here (default stdout)")
    p.add_argument("--timing", action="store_true", help="include mean runtimes in the outputs")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("stream", help="online clustering of points read from stdin")
    p.add_argument("-K", type=int, required=True)
    p.add_argument("-d", type=int, required=True)
    p.add_argument("--D", type=int, default=None, help="ambient dimension (otherwise taken from the first point)")
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--check-interval", type=int, default=1000)
    p.add_argument("--bases-out", default="bases.txt")
    p.add_argument("--input", type=argparse.FileType("r"), default=sys.stdin, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_stream)

    p = sub.add_parser("gen", help="write a synthetic dataset and its truth labels")
    p.add_argument("--setting", required=True)
    p.add_argument("--outliers", type=float, default=0.05)
    p.add_argument("--sigma", type=float, default=0.05)
    p.add_argument("--noise", choices=NOISE_MODES, default="vector")
    p.add_argument("--n-per", type=int, default=250)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--bases", help="also write the generating bases")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, InvalidParamsError, InvalidDimError) as err:
        print(f"mkflats {args.command}: {err}", file=sys.stderr)
        return 1
    except DATA_ERRORS as err:
        print(f"mkflats {args.command}: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
