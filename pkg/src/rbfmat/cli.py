"""Command-line interface: generate, fit, factorize, convert, benchmark.

Subcommands
-----------
gen          write a target matrix (or point cloud) from a named family
fit          fit an RBF decomposition to a matrix file
svd          truncated factorization or full MSE-vs-rank curve
reconstruct  evaluate a saved model or factorization to a dense matrix
experiment   run a benchmark suite into an output directory
convert      translate between CSV, binary, and PGM matrix formats

Every subcommand accepts ``--config FILE`` holding ``key = value`` lines
(keys are the long option names); explicit command-line flags win over the
file.  Seeded commands print the effective seed, drawing one from entropy
when none is given, and produce byte-identical output files for a fixed
seed regardless of ``--threads``.

Exit codes: 0 success, 2 bad arguments, 3 unreadable or malformed data
files, 4 every restart of a fit diverged.
"""

from __future__ import annotations

import argparse
import inspect
import sys
from pathlib import Path

import numpy as np

from . import datagen, experiments, matio
from .analysis import image_to_matrix, matrix_to_image
from .model import evaluate_full
from .optimize import AllRunsDivergedError, FitConfig, fit
from .pgm import read_image, write_pgm
from .svd import reconstruct, svd_mse_curve, symmetric_lowrank, truncated_svd


class DataFileError(Exception):
    """A data file could not be read, parsed, or written."""


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _entropy_seed() -> int:
    return int(np.random.SeedSequence().generate_state(1, np.uint64)[0])


def _resolve_seed(args) -> int:
    seed = args.seed if args.seed is not None else _entropy_seed()
    print(f"seed {seed}")
    return seed


# -- config files -------------------------------------------------------------

def _coerce(text: str):
    text = text.strip()
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def _read_config(path) -> dict:
    try:
        with open(path, encoding="ascii") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise DataFileError(f"cannot read config: {exc}") from exc
    values = {}
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DataFileError(f"{path}:{lineno}: expected key = value")
        key, _, value = line.partition("=")
        values[key.strip().replace("-", "_")] = value
    return values


def _apply_config(args) -> None:
    """Fill options the command line left unset from the config file."""
    if args.config is None:
        return
    dests = {a.dest for a in args._subparser._actions}
    for key, raw in _read_config(args.config).items():
        if key not in dests:
            raise ValueError(f"unknown config key {key!r} for this command")
        current = getattr(args, key, None)
        if current is None or current is False:
            setattr(args, key, _coerce(raw))


# -- guarded file access ------------------------------------------------------

def _load_matrix(path) -> np.ndarray:
    try:
        return matio.load_matrix(path)
    except (OSError, ValueError) as exc:
        raise DataFileError(f"cannot load matrix {path}: {exc}") from exc


def _guard_write(write, path, *payload) -> None:
    try:
        write(path, *payload)
    except OSError as exc:
        raise DataFileError(f"cannot write {path}: {exc}") from exc


def _write_rows(path, header: str, rows) -> None:
    text = "\n".join([header] + list(rows)) + "\n"
    try:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(text)
    except OSError as exc:
        raise DataFileError(f"cannot write {path}: {exc}") from exc


def _sidecar(out_path, tag: str) -> Path:
    out_path = Path(out_path)
    return out_path.with_name(f"{out_path.stem}.{tag}.csv")


# -- gen ----------------------------------------------------------------------

def _save_matrix(args, matrix) -> None:
    writer = matio.save_matrix_bin if args.binary else matio.save_matrix_csv
    _guard_write(writer, args.out, matrix)
    n, m = matrix.shape
    print(f"{n}x{m} {matio.matrix_checksum(matrix)}")


def cmd_gen(args) -> int:
    seed = _resolve_seed(args)
    rng = np.random.default_rng(seed)
    family = args.family
    if family == "gaussian":
        matrix = datagen.gaussian_matrix(args.n, args.m or args.n, rng)
    elif family == "er":
        if args.p is None:
            raise ValueError("er needs --p")
        matrix = datagen.erdos_renyi(args.n, args.p, rng)
    elif family == "ba":
        matrix = datagen.barabasi_albert(args.n, args.attach, rng)
    elif family == "kexact2":
        matrix, u1, u2 = datagen.k_exact2(args.n, rng)
        _guard_write(matio.save_matrix_csv, _sidecar(args.out, "truth"),
                     np.stack((u1, u2)))
    elif family == "sbm":
        sizes = [int(s) for s in args.sizes.split(",")]
        matrix, labels = datagen.sbm(sizes, args.p_in, args.p_out, rng)
        _write_rows(_sidecar(args.out, "labels"), "label",
                    (str(v) for v in labels))
    elif family == "scurve":
        cloud = datagen.s_curve(args.n, args.delta, rng)
        _guard_write(matio.save_points_csv, args.out, cloud)
        stacked = np.column_stack((cloud.points, cloud.labels))
        print(f"{stacked.shape[0]}x{stacked.shape[1]} "
              f"{matio.matrix_checksum(stacked)}")
        return 0
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(f"unknown family {family!r}")
    _save_matrix(args, matrix)
    return 0


# -- fit ----------------------------------------------------------------------

_FIT_KEYS = (
    ("optimizer", "optimizer"),
    ("lr", "learning_rate"),
    ("runs", "batch_runs"),
    ("init_scale", "init_scale"),
    ("minibatch", "minibatch_size"),
    ("weight_decay", "weight_decay"),
    ("beta1", "beta1"),
    ("beta2", "beta2"),
    ("epsilon", "epsilon"),
    ("target_loss", "target_loss"),
    ("trace_stride", "trace_stride"),
)


def cmd_fit(args) -> int:
    target = _load_matrix(args.matrix)
    seed = _resolve_seed(args)
    kwargs = {"components": args.r, "symmetric": args.symmetric,
              "stochastic": args.stochastic, "seed": seed,
              "max_iters": args.iters if args.iters is not None
              else 10000 * max(args.r, 1)}
    for flag, field in _FIT_KEYS:
        value = getattr(args, flag)
        if value is not None:
            kwargs[field] = value
    config = FitConfig(**kwargs)
    report = fit(target, config, threads=args.threads)

    _guard_write(matio.save_model_csv, args.out, report.best_model)
    trace_path = args.trace or _sidecar(args.out, "trace")
    _write_rows(trace_path, "iteration,mse",
                (f"{i},{_fmt(l)}" for i, l in report.loss_trajectory))
    runs_path = args.run_losses or _sidecar(args.out, "runs")
    _write_rows(runs_path, "run,final_mse",
                (f"{i},{_fmt(l)}"
                 for i, l in enumerate(report.per_run_final_losses)))
    print(f"best mse {_fmt(report.best_loss)} after "
          f"{report.iterations_used} iterations")
    return 0


# -- svd ----------------------------------------------------------------------

def cmd_svd(args) -> int:
    matrix = _load_matrix(args.matrix)
    if args.rank is None and args.curve is None:
        raise ValueError("svd needs --rank or --curve")
    if args.curve is not None:
        curve = svd_mse_curve(matrix, args.curve)
        _write_rows(args.out, "rank,mse",
                    (f"{r},{_fmt(v)}" for r, v in enumerate(curve)))
        print(f"curve through rank {args.curve}")
        return 0
    factorize = symmetric_lowrank if args.symmetric else truncated_svd
    approx = factorize(matrix, args.rank)
    _guard_write(matio.save_svd_csv, args.out, approx)
    dense = reconstruct(approx)
    if args.recon:
        _guard_write(matio.save_matrix_csv, args.recon, dense)
    mse = float(np.mean((matrix - dense) ** 2))
    print(f"rank {args.rank} mse {_fmt(mse)}")
    return 0


# -- reconstruct --------------------------------------------------------------

def cmd_reconstruct(args) -> int:
    try:
        with open(args.model, encoding="ascii") as fh:
            header = fh.readline().split(",")
        if len(header) == 5:
            dense = evaluate_full(matio.load_model_csv(args.model))
        elif len(header) == 4:
            dense = reconstruct(matio.load_svd_csv(args.model))
        else:
            raise ValueError("header is neither a model nor a factorization")
    except (OSError, ValueError) as exc:
        raise DataFileError(f"cannot load {args.model}: {exc}") from exc
    _save_matrix(args, dense)
    return 0


# -- convert ------------------------------------------------------------------

def _load_any(path) -> np.ndarray:
    """Matrix from CSV, binary, or PGM/PPM (pixels mapped onto [0, 1])."""
    try:
        with open(path, "rb") as fh:
            magic = fh.read(4)
    except OSError as exc:
        raise DataFileError(f"cannot read {path}: {exc}") from exc
    if magic[:2] in (b"P2", b"P3", b"P5", b"P6"):
        try:
            return image_to_matrix(read_image(path))
        except (OSError, ValueError) as exc:
            raise DataFileError(f"cannot read image {path}: {exc}") from exc
    return _load_matrix(path)


def cmd_convert(args) -> int:
    matrix = _load_any(args.infile)
    out = Path(args.out)
    if out.suffix == ".pgm":
        _guard_write(write_pgm, out, matrix_to_image(matrix))
    elif out.suffix == ".csv":
        _guard_write(matio.save_matrix_csv, out, matrix)
    else:
        _guard_write(matio.save_matrix_bin, out, matrix)
    n, m = matrix.shape
    print(f"{n}x{m} -> {out}")
    return 0


# -- experiment ---------------------------------------------------------------

def cmd_experiment(args) -> int:
    if args.seed is not None:
        seed = args.seed
    elif args.suite in experiments.SUITES:
        # suites default to their calibrated seeds, not entropy
        seed = inspect.signature(
            experiments.SUITES[args.suite]
        ).parameters["seed"].default
    else:
        seed = None
    if seed is not None:
        print(f"seed {seed}")
    experiments.run_suite(args.suite, args.outdir, seed=seed,
                          threads=args.threads, image_path=args.input)
    print(f"wrote {Path(args.outdir) / args.suite}")
    return 0


# -- parser -------------------------------------------------------------------

def _add_common(sub, seed=False, threads=False) -> None:
    sub.add_argument("--config", metavar="FILE",
                     help="key = value file supplying defaults; flags win")
    if seed:
        sub.add_argument("--seed", type=int,
                         help="RNG seed (default: drawn from entropy)")
    if threads:
        sub.add_argument("--threads", type=int, default=1,
                         help="worker threads for restarts (default 1; "
                              "results are identical for any value)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rbfmat",
        description="RBF matrix decompositions versus truncated SVD.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    gen = subs.add_parser(
        "gen", help="generate a target matrix or point cloud",
        description="Families: gaussian (iid normal entries), er and ba "
        "(random graph adjacencies), kexact2 (two-component RBF target, "
        "writes *.truth.csv with the generating vectors), sbm (planted "
        "blocks, writes *.labels.csv), scurve (3-D point cloud CSV with a "
        "position label column).")
    gen.add_argument("family",
                     choices=("gaussian", "er", "ba", "kexact2", "sbm",
                              "scurve"))
    gen.add_argument("--n", type=int, required=True,
                     help="rows (gaussian), vertices (graphs), or points")
    gen.add_argument("--m", type=int, help="columns (gaussian; default n)")
    gen.add_argument("--p", type=float, help="er edge probability")
    gen.add_argument("--attach", type=int, default=3,
                     help="ba edges per new vertex (default 3)")
    gen.add_argument("--sizes", default="8,12,16,20,24",
                     help="sbm block sizes, comma separated")
    gen.add_argument("--p-in", type=float, default=0.8,
                     help="sbm within-block edge probability")
    gen.add_argument("--p-out", type=float, default=0.2,
                     help="sbm between-block edge probability")
    gen.add_argument("--delta", type=float, default=0.0,
                     help="scurve noise level (default 0)")
    gen.add_argument("--out", required=True, help="output path")
    gen.add_argument("--binary", action="store_true",
                     help="write the binary matrix format instead of CSV")
    _add_common(gen, seed=True)
    gen.set_defaults(func=cmd_gen)

    fit_p = subs.add_parser(
        "fit", help="fit an RBF decomposition to a matrix file",
        description="Runs batched random restarts and writes the best "
        "model, its loss trajectory (*.trace.csv), and the final loss of "
        "every restart (*.runs.csv).")
    fit_p.add_argument("matrix", help="target matrix file (CSV or binary)")
    fit_p.add_argument("--r", type=int, required=True,
                       help="number of RBF components")
    fit_p.add_argument("--symmetric", action="store_true",
                       help="share row and column coordinates")
    fit_p.add_argument("--optimizer",
                       choices=("adam", "adamw", "adagrad"))
    fit_p.add_argument("--lr", type=float, help="learning rate (default 0.1)")
    fit_p.add_argument("--iters", type=int,
                       help="iterations per run (default 10000 * r)")
    fit_p.add_argument("--runs", type=int,
                       help="random restarts (default 100)")
    fit_p.add_argument("--init-scale", type=float,
                       help="coordinate initialization scale (default 0.1)")
    fit_p.add_argument("--stochastic", action="store_true",
                       help="minibatch gradients instead of full")
    fit_p.add_argument("--minibatch", type=int,
                       help="entries per stochastic step")
    fit_p.add_argument("--weight-decay", type=float,
                       help="adamw coordinate decay (default 0.01)")
    fit_p.add_argument("--beta1", type=float)
    fit_p.add_argument("--beta2", type=float)
    fit_p.add_argument("--epsilon", type=float)
    fit_p.add_argument("--target-loss", type=float,
                       help="stop a run early at this full MSE")
    fit_p.add_argument("--trace-stride", type=int,
                       help="iterations between trajectory samples")
    fit_p.add_argument("--out", required=True, help="model output path")
    fit_p.add_argument("--trace", help="trajectory CSV path")
    fit_p.add_argument("--run-losses", help="per-restart losses CSV path")
    _add_common(fit_p, seed=True, threads=True)
    fit_p.set_defaults(func=cmd_fit)

    svd_p = subs.add_parser(
        "svd", help="truncated SVD baseline on a matrix file",
        description="--rank writes the factorization (and optionally a "
        "dense reconstruction); --curve writes MSE for every rank up to "
        "the bound.")
    svd_p.add_argument("matrix", help="target matrix file (CSV or binary)")
    svd_p.add_argument("--rank", type=int, help="truncation rank")
    svd_p.add_argument("--curve", type=int, metavar="MAX_RANK",
                       help="write the MSE-vs-rank curve instead")
    svd_p.add_argument("--symmetric", action="store_true",
                       help="eigendecomposition variant (symmetric input)")
    svd_p.add_argument("--out", required=True, help="output path")
    svd_p.add_argument("--recon", help="also write the dense reconstruction")
    _add_common(svd_p)
    svd_p.set_defaults(func=cmd_svd)

    rec = subs.add_parser(
        "reconstruct", help="dense matrix from a model or factorization")
    rec.add_argument("model", help="model or factorization CSV")
    rec.add_argument("--out", required=True, help="output matrix path")
    rec.add_argument("--binary", action="store_true",
                     help="write the binary matrix format instead of CSV")
    _add_common(rec)
    rec.set_defaults(func=cmd_reconstruct)

    exp = subs.add_parser(
        "experiment", help="run a benchmark suite",
        description="Writes results.csv, metrics.csv, artifacts, and PNG "
        "figures under OUTDIR/<suite>.  Without --seed a suite uses its "
        "calibrated default seed (printed).  Desk-scale designs: graphs "
        "and edges use 40-vertex adjacencies, gaussian 40x40 and 30x60, "
        "sbm 80 vertices in 5 blocks, scurve 256 points, kexact2 n=100.")
    exp.add_argument("suite",
                     choices=tuple(experiments.SUITES) + ("all",))
    exp.add_argument("--outdir", default="experiments",
                     help="parent output directory (default ./experiments)")
    exp.add_argument("--input",
                     help="input image (PGM or PPM), image suite only")
    _add_common(exp, seed=True, threads=True)
    exp.set_defaults(func=cmd_experiment)

    conv = subs.add_parser(
        "convert", help="translate between CSV, binary, and PGM",
        description="Input format is sniffed from the file content; the "
        "output format follows the extension (.csv, .pgm, else binary). "
        "PGM pixels map onto [0, 1] by dividing by 255.")
    conv.add_argument("infile", help="matrix or image file")
    conv.add_argument("out", help="output path")
    _add_common(conv)
    conv.set_defaults(func=cmd_convert)

    for sub in subs.choices.values():
        sub.set_defaults(_subparser=sub)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args)
        return args.func(args)
    except AllRunsDivergedError as exc:
        print(f"rbfmat: {exc}", file=sys.stderr)
        return 4
    except DataFileError as exc:
        print(f"rbfmat: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"rbfmat: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
