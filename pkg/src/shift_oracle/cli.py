"""Command-line interface.

Subcommands:
  estimate       accuracy estimates for one or more unlabeled target sets
  toy            spurious-feature simulation sweep (CSV table, optional figure)
  impossibility  covariate-vs-label-shift reweighted error comparison

Exit codes: 0 success, 2 malformed input or file format error, 3 missing labels.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import io
from .calibration import TemperatureModel, fit_temperature
from .data import PredictionSet, ScoreKind, correctness, error_rate, score, softmax_rows
from .errors import (
    FormatError,
    InvalidInput,
    MissingLabels,
    ShiftOracleError,
)
from .estimators import (
    METHOD_AC,
    METHOD_ATC_MC,
    METHOD_ATC_NE,
    METHOD_DOC,
    METHOD_GDE,
    METHOD_IM,
    ac_estimate,
    atc_estimate,
    doc_estimate,
    fit_atc,
    gde_estimate,
    im_estimate,
)
from .shift import Example1Result, GaussianMixtureSpec, example1_errors
from .toy import LinearSigmoidClassifier, ToyConfig, run_consistency_experiment

ALL_METHODS = [METHOD_ATC_MC, METHOD_ATC_NE, METHOD_AC, METHOD_DOC, METHOD_IM, METHOD_GDE]
LABELED_METHODS = {METHOD_ATC_MC, METHOD_ATC_NE, METHOD_DOC, METHOD_IM}
THREADS_ENV = "SHIFT_ORACLE_THREADS"


def _jsonable(value):
    """JSON-safe floats: non-finite values become '+inf'/'-inf'/'nan' strings."""
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "+inf" if v > 0 else "-inf"
        return v
    if isinstance(value, (np.integer,)):
        return int(value)
    return value


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        Path(out_path).write_text(text)
    else:
        sys.stdout.write(text)


def _resolve_threads(flag: int | None) -> int:
    if flag is not None:
        return max(1, flag)
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise InvalidInput(f"{THREADS_ENV} must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def _parse_methods(text: str) -> list[str]:
    methods = [m.strip() for m in text.split(",") if m.strip()]
    if not methods:
        raise InvalidInput("method list is empty")
    for m in methods:
        if m not in ALL_METHODS:
            raise InvalidInput(f"unknown method {m!r}; choose from {','.join(ALL_METHODS)}")
    return methods


def _load_prediction_set(path, is_logits, temperature, labels=None) -> PredictionSet:
    matrix = io.load_matrix(path)
    name = Path(path).name
    if is_logits:
        preds = softmax_rows(matrix, temperature, name=name)
        if labels is not None:
            preds = PredictionSet(preds.probs, labels=labels, name=name)
        return preds
    return PredictionSet(matrix, labels=labels, name=name)


def _run_estimate(args) -> int:
    methods = _parse_methods(args.method)
    threads = _resolve_threads(args.threads)
    is_logits = args.source_logits is not None
    source_path = args.source_logits if is_logits else args.source_probs

    labels = io.read_labels(args.source_labels) if args.source_labels else None
    needs_labels = bool(LABELED_METHODS.intersection(methods)) or args.calibrate
    if needs_labels and labels is None:
        raise MissingLabels("--source-labels is required for the requested pipeline")

    temperature = 1.0
    temp_model: TemperatureModel | None = None
    if args.calibrate:
        if not is_logits:
            raise InvalidInput("--calibrate requires logit inputs (--source-logits)")
        logits = io.load_matrix(source_path)
        temp_model = fit_temperature(logits, labels)
        temperature = temp_model.temperature

    source = _load_prediction_set(source_path, is_logits, temperature, labels=labels)

    atc_models = {}
    if METHOD_ATC_MC in methods or METHOD_ATC_NE in methods:
        flags = correctness(source)
        if METHOD_ATC_MC in methods:
            atc_models[METHOD_ATC_MC] = fit_atc(score(source, ScoreKind.MAX_CONFIDENCE), flags)
        if METHOD_ATC_NE in methods:
            atc_models[METHOD_ATC_NE] = fit_atc(score(source, ScoreKind.NEGATIVE_ENTROPY), flags)

    if METHOD_GDE in methods:
        if not args.target_b or len(args.target_b) != len(args.target):
            raise InvalidInput("gde needs one --target-b file per --target file")

    def estimate_one(index_path):
        index, path = index_path
        target = _load_prediction_set(path, is_logits, temperature)
        results = []
        for m in methods:
            if m in (METHOD_ATC_MC, METHOD_ATC_NE):
                kind = ScoreKind.MAX_CONFIDENCE if m == METHOD_ATC_MC else ScoreKind.NEGATIVE_ENTROPY
                est = atc_estimate(atc_models[m], score(target, kind))
            elif m == METHOD_AC:
                est = ac_estimate(target)
            elif m == METHOD_DOC:
                est = doc_estimate(source, target)
            elif m == METHOD_IM:
                est = im_estimate(source, target, bins=args.bins)
            else:
                target_b = _load_prediction_set(args.target_b[index], is_logits, temperature)
                est = gde_estimate(target, target_b)
            results.append(
                {
                    "target": target.name,
                    "method": m,
                    "predicted_error": est.predicted_error,
                    "predicted_accuracy": est.predicted_accuracy,
                    "diagnostics": est.diagnostics,
                }
            )
        return results

    with ThreadPoolExecutor(max_workers=threads) as pool:
        per_target = list(pool.map(estimate_one, enumerate(args.target)))

    report = {
        "schema": 1,
        "model": {
            "calibrated": bool(args.calibrate),
            "temperature": temperature,
            "temperature_clamped": bool(temp_model.clamped) if temp_model else False,
            "source_error": error_rate(source) if source.labels is not None else None,
            "atc_thresholds": {m: model.threshold for m, model in atc_models.items()},
        },
        "estimates": [row for rows in per_target for row in rows],
    }
    _emit(json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n", args.out)
    return 0


def _run_toy(args) -> int:
    p_grid = [float(v) for v in args.p_grid.split(",") if v.strip() != ""]
    if not p_grid:
        raise InvalidInput("empty p-grid")
    config = ToyConfig(
        gamma=args.gamma,
        c=args.c,
        p_spr=args.p_spr,
        p_spr_target=p_grid[0],
        n=args.n,
        seed=args.seed,
        c_target=args.c_target,
    )
    clf = LinearSigmoidClassifier(args.w_inv, args.w_spr)
    rows = run_consistency_experiment(clf, config, p_grid, im_bins=args.bins)
    lines = ["p_target,true_acc,atc_mc,atc_ne,ac,doc,im,gde"]
    for r in rows:
        lines.append(
            ",".join(
                repr(float(v))
                for v in (r.p_target, r.true_acc, r.atc_mc, r.atc_ne, r.ac, r.doc, r.im, r.gde)
            )
        )
    _emit("\n".join(lines) + "\n", args.out)
    if args.plot:
        from .plotting import plot_consistency_rows

        plot_consistency_rows(rows, args.plot)
    return 0


def _run_impossibility(args) -> int:
    spec = GaussianMixtureSpec(mu1=args.mu1, mu2=args.mu2, alpha=args.alpha, beta=args.beta)
    result: Example1Result = example1_errors(spec, args.tau, args.samples, args.seed)
    payload = {
        "schema": 1,
        "e1_covariate_shift": result.e1,
        "e2_label_shift": result.e2,
        "se_e1": result.se_e1,
        "se_e2": result.se_e2,
        "se_diff": result.se_diff,
    }
    _emit(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shift-oracle",
        description="Estimate classifier accuracy on unlabeled shifted data from softmax outputs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="run accuracy estimators on target sets")
    src = est.add_mutually_exclusive_group(required=True)
    src.add_argument("--source-logits", help="source validation logits (CSV or RawF32)")
    src.add_argument("--source-probs", help="source validation probabilities (CSV or RawF32)")
    est.add_argument("--source-labels", help="source labels CSV (header 'y')")
    est.add_argument("--target", action="append", required=True, help="target matrix file (repeatable)")
    est.add_argument("--target-b", action="append", help="second-model target file for gde (paired)")
    est.add_argument("--method", default="atc-mc,atc-ne,ac,doc,im", help="comma-separated method list")
    est.add_argument("--calibrate", action="store_true", help="temperature-scale on source before estimating")
    est.add_argument("--bins", type=int, default=10, help="histogram bins for im")
    est.add_argument("--seed", type=int, default=0)
    est.add_argument("--out", help="write JSON report here instead of stdout")
    est.add_argument("--threads", type=int, default=None)
    est.set_defaults(func=_run_estimate)

    toy = sub.add_parser("toy", help="spurious-feature simulation sweep")
    toy.add_argument("--gamma", type=float, default=0.1)
    toy.add_argument("--c", type=float, default=1.0)
    toy.add_argument("--c-target", type=float, default=None, help="shrunken target support bound")
    toy.add_argument("--p-spr", type=float, default=0.9)
    toy.add_argument("--p-grid", default="0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0")
    toy.add_argument("--w-inv", type=float, default=1.0)
    toy.add_argument("--w-spr", type=float, default=0.5)
    toy.add_argument("--n", type=int, default=100_000)
    toy.add_argument("--bins", type=int, default=10)
    toy.add_argument("--seed", type=int, default=0)
    toy.add_argument("--out", help="write CSV table here instead of stdout")
    toy.add_argument("--plot", help="also render the sweep figure to this path")
    toy.set_defaults(func=_run_toy)

    imp = sub.add_parser("impossibility", help="covariate vs label shift reweighted errors")
    imp.add_argument("--alpha", type=float, required=True)
    imp.add_argument("--beta", type=float, required=True)
    imp.add_argument("--mu1", type=float, default=-2.0)
    imp.add_argument("--mu2", type=float, default=2.0)
    imp.add_argument("--tau", type=float, default=0.0)
    imp.add_argument("--samples", type=int, default=1_000_000)
    imp.add_argument("--seed", type=int, default=0)
    imp.add_argument("--out", help="write JSON here instead of stdout")
    imp.set_defaults(func=_run_impossibility)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MissingLabels as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (FormatError, InvalidInput) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ShiftOracleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
