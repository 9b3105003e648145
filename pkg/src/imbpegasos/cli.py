"""Command-line front end.

Exit codes: 0 success, 2 bad flags or input, 3 numeric/degenerate failure.
"""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import json
import os
import sys
from pathlib import Path

import numpy as np

from .data import Dataset, load_csv, split_holdout
from .errors import DegenerateDataError, InputError
from .kernel import KernelModel, KernelSpec
from .linear import LinearModel
from .metrics import roc_auc, roc_curve
from .selection import (
    DEFAULT_LAMBDAS,
    DEFAULT_PROPORTIONS,
    GridSpec,
    evaluate_holdout,
    grid_search,
    learning_curve,
    validation_curve,
)
from .solvers import fit
from .stopping import MODES, select_stop_parameter

FORMAT_VERSION = 1
EXIT_INPUT = 2
EXIT_RUNTIME = 3


class _UsageError(Exception):
    pass


def _default_seed() -> int:
    raw = os.environ.get("PEGASOS_SEED")
    if raw is None or not raw.strip():
        return 0
    try:
        seed = int(raw)
    except ValueError:
        raise _UsageError(f"PEGASOS_SEED must be a non-negative integer, got {raw!r}") from None
    if seed < 0:
        raise _UsageError(f"PEGASOS_SEED must be a non-negative integer, got {raw!r}")
    return seed


def parse_grid(text: str) -> list[float]:
    """``"linspace:LO:HI:N"`` or a comma-separated list of numbers."""
    text = text.strip()
    try:
        if text.startswith("linspace:"):
            parts = text.split(":")
            if len(parts) != 4:
                raise ValueError
            lo, hi, n = float(parts[1]), float(parts[2]), int(parts[3])
            if n < 1:
                raise ValueError
            return np.linspace(lo, hi, n).tolist()
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise _UsageError(f"cannot parse value list {text!r}") from None
    if not values:
        raise _UsageError(f"empty value list {text!r}")
    return values


# ---------------------------------------------------------------------------
# argument wiring
# ---------------------------------------------------------------------------


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("seed must be non-negative")
    return value


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return value


def _add_data(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--data", required=required, help="CSV file with a header row")
    p.add_argument("--target-col", required=required, help="name of the label column")
    p.add_argument("--positive-label", required=required, help="target value that marks the minority class")


def _add_training(p: argparse.ArgumentParser, hyper: bool = True) -> None:
    if hyper:
        p.add_argument("--lambda", dest="lam", type=_positive_float, default=None, help="regularisation strength")
        p.add_argument("--bias", type=float, default=0.0, help="fixed intercept added to every score")
    p.add_argument("--iterations", type=_positive_int, default=1000)
    p.add_argument("--kernel", choices=("linear", "rbf", "poly"), default=None,
                   help="use kernel PEGASOS with this kernel (default: linear primal solver)")
    p.add_argument("--gamma", type=_positive_float, default=1.0)
    p.add_argument("--degree", type=_positive_int, default=2)
    p.add_argument("--coef0", type=float, default=1.0)
    p.add_argument("--projection", action="store_true", help="project w onto the 1/sqrt(lambda) ball")
    p.add_argument("--seed", type=_seed, default=None, help="RNG seed (default: $PEGASOS_SEED or 0)")


def _add_check_every(p: argparse.ArgumentParser) -> None:
    p.add_argument("--check-every", type=_positive_int, default=None,
                   help="AUC check interval X (default: --iterations, i.e. a single final check)")


def _add_jobs(p: argparse.ArgumentParser) -> None:
    p.add_argument("--jobs", type=_positive_int, default=os.cpu_count() or 1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="imbpegasos", description="Cost-sensitive PEGASOS SVM for imbalanced data")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train one model and save it as JSON")
    _add_data(p)
    _add_training(p)
    _add_check_every(p)
    p.add_argument("--output", required=True, help="model JSON path")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("cv", help="(lambda, bias) grid search with k-fold cross-validation")
    _add_data(p)
    _add_training(p, hyper=False)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--lambda-grid", default=None, help="comma list (default: 1e-4 ... 1e3)")
    p.add_argument("--bias-grid", default="linspace:-2:2:10", help='comma list or "linspace:LO:HI:N"')
    p.add_argument("--mode", choices=MODES, default="verbatim", help="stop-interval centring")
    p.add_argument("--output", required=True, help="per-fold scores CSV")
    p.add_argument("--summary-output", default=None, help="per-combination means CSV (default: <output>_summary.csv)")
    _add_jobs(p)
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("curves", help="learning or validation curves as CSV")
    _add_data(p)
    _add_training(p)
    _add_check_every(p)
    p.add_argument("--type", dest="curve", choices=("learning", "validation"), required=True)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--proportions", default=",".join(str(v) for v in DEFAULT_PROPORTIONS))
    p.add_argument("--vary", choices=("lambda", "bias"), default=None)
    p.add_argument("--values", default=None, help='comma list or "linspace:LO:HI:N"')
    p.add_argument("--output", required=True)
    _add_jobs(p)
    p.set_defaults(func=cmd_curves)

    p = sub.add_parser("evaluate", help="test ROC-AUC of a saved model or of a fresh holdout run")
    p.add_argument("--model", default=None, help="saved model JSON")
    _add_data(p, required=False)
    _add_training(p)
    _add_check_every(p)
    p.add_argument("--holdout", type=float, default=None, help="test fraction for a stratified split, e.g. 0.2")
    p.add_argument("--roc-out", default=None, help="write fpr,tpr points to this CSV")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("estimate-stop", help="estimate the AUC check interval from a probe run")
    _add_data(p)
    _add_training(p)
    p.add_argument("--mode", choices=MODES, default="verbatim")
    p.add_argument("--output", default=None, help="also write the statistics as JSON")
    _add_jobs(p)
    p.set_defaults(func=cmd_estimate_stop)
    return parser


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _kernel_from(args) -> KernelSpec | None:
    if args.kernel is None:
        return None
    return KernelSpec(args.kernel, gamma=args.gamma, degree=args.degree, coef0=args.coef0)


def _seed_from(args) -> int:
    return args.seed if args.seed is not None else _default_seed()


def _load(args) -> Dataset:
    if not (args.data and args.target_col and args.positive_label is not None):
        raise _UsageError("--data, --target-col and --positive-label are required")
    return load_csv(args.data, args.target_col, args.positive_label)


def _require_lambda(args) -> float:
    if args.lam is None:
        raise _UsageError("--lambda is required")
    return args.lam


def _check_every(args) -> int:
    return args.check_every if args.check_every is not None else args.iterations


def _write_csv(path, header, rows) -> None:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def model_to_dict(model, args, seed: int, check_every: int, kernel: KernelSpec | None) -> dict:
    is_kernel = isinstance(model, KernelModel)
    return {
        "format_version": FORMAT_VERSION,
        "model_type": "kernel" if is_kernel else "linear",
        "hyperparameters": {
            "lambda": model.lam,
            "bias": model.b,
            "iterations": args.iterations,
            "check_every": check_every,
            "seed": seed,
            "projection": bool(args.projection),
            "kernel": kernel.to_dict() if kernel is not None else None,
        },
        "linear": None if is_kernel else {"w": model.w.tolist(), "iterations_run": model.iterations_run},
        "kernel": {
            "alpha": model.alpha.tolist(),
            "support_points": model.support_points.tolist(),
            "labels": model.labels.astype(int).tolist(),
            "t_final": model.t_final,
        } if is_kernel else None,
        "provenance": {
            "data": str(args.data),
            "target_col": args.target_col,
            "positive_label": args.positive_label,
            "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        },
    }


def model_from_dict(doc: dict) -> LinearModel | KernelModel:
    try:
        if doc["format_version"] != FORMAT_VERSION:
            raise InputError(f"unsupported model format_version {doc['format_version']!r}")
        hp = doc["hyperparameters"]
        if doc["model_type"] == "linear":
            lin = doc["linear"]
            return LinearModel(
                w=np.asarray(lin["w"], dtype=np.float64), b=float(hp["bias"]), lam=float(hp["lambda"]),
                iterations_run=int(lin["iterations_run"]), seed=int(hp["seed"]),
            )
        if doc["model_type"] == "kernel":
            ker = doc["kernel"]
            spec = hp["kernel"]
            return KernelModel(
                alpha=np.asarray(ker["alpha"], dtype=np.float64),
                support_points=np.asarray(ker["support_points"], dtype=np.float64),
                labels=np.asarray(ker["labels"], dtype=np.float64),
                kernel=KernelSpec(spec["kind"], gamma=spec["gamma"], degree=spec["degree"], coef0=spec["coef0"]),
                b=float(hp["bias"]), lam=float(hp["lambda"]), t_final=int(ker["t_final"]), seed=int(hp["seed"]),
            )
        raise InputError(f"unknown model_type {doc['model_type']!r}")
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed model file: {exc}") from None


def save_model(doc: dict, path) -> None:
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def load_model(path) -> tuple[LinearModel | KernelModel, dict]:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such model file: {path}")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: not valid JSON ({exc})") from None
    return model_from_dict(doc), doc


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_train(args) -> int:
    lam = _require_lambda(args)
    ds = _load(args)
    seed = _seed_from(args)
    kernel = _kernel_from(args)
    x = _check_every(args)
    model, trace = fit(ds, lam, args.bias, args.iterations, x, seed, kernel=kernel, projection=args.projection)
    auc = roc_auc(model.decision_scores(ds.X), ds.y)
    save_model(model_to_dict(model, args, seed, x, kernel), args.output)
    print(f"training_auc={auc:.4f} iterations_run={trace.steps_run} halted_early={str(trace.halted_early).lower()}")
    return 0


def cmd_cv(args) -> int:
    if args.folds < 2:
        raise _UsageError(f"--folds must be >= 2, got {args.folds}")
    lambdas = parse_grid(args.lambda_grid) if args.lambda_grid else list(DEFAULT_LAMBDAS)
    biases = parse_grid(args.bias_grid)
    grid = GridSpec(tuple(lambdas), tuple(biases))
    ds = _load(args)
    result = grid_search(
        ds, grid, k=args.folds, T=args.iterations, seed=_seed_from(args), kernel=_kernel_from(args),
        projection=args.projection, mode=args.mode, jobs=args.jobs,
    )
    _write_csv(
        args.output,
        ["lambda", "bias", "stop_x", "fold", "auc"],
        [[r.lam, r.bias, r.stop_x, f, auc] for r in result.rows for f, auc in enumerate(r.fold_aucs)],
    )
    out = Path(args.output)
    summary = args.summary_output or out.with_name(out.stem + "_summary" + (out.suffix or ".csv"))
    _write_csv(summary, ["lambda", "bias", "stop_x", "mean_auc"],
               [[r.lam, r.bias, r.stop_x, r.mean_auc] for r in result.rows])
    best = result.best
    print(f"best lambda={best.lam:g} bias={best.bias:.4f} stop_x={best.stop_x} mean_auc={best.mean_auc:.4f}")
    return 0


def cmd_curves(args) -> int:
    if args.folds < 2:
        raise _UsageError(f"--folds must be >= 2, got {args.folds}")
    ds = _load(args)
    common = dict(k=args.folds, T=args.iterations, seed=_seed_from(args), kernel=_kernel_from(args),
                  projection=args.projection, jobs=args.jobs)
    x = _check_every(args)
    if args.curve == "learning":
        lam = _require_lambda(args)
        proportions = parse_grid(args.proportions)
        rows = learning_curve(ds, lam, args.bias, x, proportions, **common)
    else:
        if args.vary is None or args.values is None:
            raise _UsageError("validation curves need --vary and --values")
        values = parse_grid(args.values)
        fixed = _require_lambda(args) if args.vary == "bias" else args.bias
        rows = validation_curve(ds, args.vary, values, fixed, x, **common)
    _write_csv(args.output, ["proportion_or_value", "fold", "train_auc", "cv_auc"],
               [[r.value, r.fold, r.train_auc, r.val_auc] for r in rows])
    print(f"wrote {len(rows)} rows to {args.output}")
    return 0


def cmd_evaluate(args) -> int:
    if args.model:
        model, doc = load_model(args.model)
        prov = doc.get("provenance") or {}
        if args.data is None:
            raise _UsageError("--data is required with --model")
        target = args.target_col or prov.get("target_col")
        positive = args.positive_label if args.positive_label is not None else prov.get("positive_label")
        if target is None or positive is None:
            raise _UsageError("--target-col and --positive-label are required")
        test = load_csv(args.data, target, positive)
        scores = model.decision_scores(test.X)
    else:
        if args.holdout is None:
            raise _UsageError("give either --model or --holdout with training flags")
        if not 0.0 < args.holdout < 1.0:
            raise _UsageError(f"--holdout must lie in (0, 1), got {args.holdout}")
        lam = _require_lambda(args)
        ds = _load(args)
        seed = _seed_from(args)
        train, test = split_holdout(ds, 1.0 - args.holdout, seed)
        model, _ = fit(train, lam, args.bias, args.iterations, _check_every(args), seed,
                       kernel=_kernel_from(args), projection=args.projection)
        scores = model.decision_scores(test.X)
    auc = roc_auc(scores, test.y)
    if args.roc_out:
        curve = roc_curve(scores, test.y)
        _write_csv(args.roc_out, ["fpr", "tpr"], curve.points())
    print(f"test_auc={auc:.4f}")
    return 0


def cmd_estimate_stop(args) -> int:
    lam = _require_lambda(args)
    ds = _load(args)
    stats = select_stop_parameter(
        ds, lam, args.bias, T=args.iterations, seed=_seed_from(args), mode=args.mode,
        kernel=_kernel_from(args), projection=args.projection, jobs=args.jobs,
    )
    report = {
        "n": stats.n,
        "p_hat": stats.p_hat,
        "p_bias_corrected": stats.p_bc,
        "var_mleb": stats.var_mleb,
        "ci_low": stats.ci_low,
        "ci_high": stats.ci_high,
        "mode": stats.mode,
        "X_selected": stats.X_selected,
    }
    for key, value in report.items():
        print(f"{key}={'nan' if value is None else value}")
    if args.output:
        doc = dict(report, waiting_times=list(stats.waiting_times), candidates=stats.candidates,
                   candidate_aucs=stats.candidate_aucs)
        Path(args.output).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with 2 on flag errors
    try:
        return args.func(args)
    except (_UsageError, InputError, FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DegenerateDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as exc:  # numeric failures and anything unforeseen
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
