"""Batch command line: simulate, estimate, cv, benchmark, linkpred.

Every run resolves its settings from hard defaults, then a flat
key=value config file, then CLI flags (flags win), and writes a
manifest.json with the resolved values so the run can be replayed
bit-identically. All randomness flows from --seed; nothing reads the
clock. Exit codes: 0 ok, 1 usage error, 2 data error, 3 solver
non-convergence under --strict.
"""

import argparse
import json
import os
import sys
import warnings

import numpy as np

from . import __version__
from .estimator import EstimatorConfig, cross_validate_lambda, estimate, split_indices
from .evalbench import (
    benchmark_report,
    benchmark_table_csv,
    link_prediction_run,
    linkpred_report,
    monte_carlo_benchmark,
)
from .matio import load_matrix, save_dense_csv
from .metrics import metric_by_kind
from .rng import DEFAULT_SEED
from .sim import builtin_graphon, probability_matrix, sample_adjacency, sample_latents

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NONCONVERGED = 3

_NONCONV_MARK = "did not reach gap"


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


def _conv_int(s):
    return int(s)


def _conv_float(s):
    return float(s)


def _conv_str(s):
    return s


def _conv_lam(s):
    return s if s == "cv" else float(s)


def _conv_m(s):
    return s if s == "half" else int(s)


def _conv_start(s):
    if s in ("medoid", "random"):
        return s
    return int(s)


def _conv_methods(s):
    return tuple(p.strip() for p in str(s).split(",") if p.strip())


_REQUIRED = object()

_ESTIMATOR_FIELDS = {
    "method": (_conv_str, "nn_fl"),
    "mode": (_conv_str, "single"),
    "m": (_conv_m, "half"),
    "lam": (_conv_lam, "cv"),
    "cv_candidates": (_conv_int, 30),
    "cv_holdout": (_conv_float, 0.2),
    "cv_span": (_conv_float, 1e-4),
    "nn_start": (_conv_start, "medoid"),
    "inner_divisor": (_conv_float, None),
    "usvt_factor": (_conv_float, 2.02),
    "tol": (_conv_float, 1e-8),
    "max_iter": (_conv_int, 5000),
    "seed": (_conv_int, DEFAULT_SEED),
}

_FIELDS = {
    "simulate": {
        "graphon": (_conv_str, _REQUIRED),
        "n": (_conv_int, _REQUIRED),
        "seed": (_conv_int, DEFAULT_SEED),
    },
    "estimate": {"input": (_conv_str, _REQUIRED), "n": (_conv_int, None), **_ESTIMATOR_FIELDS},
    "cv": {"input": (_conv_str, _REQUIRED), "n": (_conv_int, None), **_ESTIMATOR_FIELDS},
    "benchmark": {
        "scenario": (_conv_str, _REQUIRED),
        "n": (_conv_int, _REQUIRED),
        "trials": (_conv_int, 10),
        "methods": (_conv_methods, ("nn_fl", "sas_fl", "l1_fl", "usvt")),
        "mode": (_conv_str, "single"),
        "seed": (_conv_int, DEFAULT_SEED),
    },
    "linkpred": {
        "scenario": (_conv_str, None),
        "input": (_conv_str, None),
        "n": (_conv_int, None),
        "trials": (_conv_int, 10),
        "methods": (_conv_methods, ("nn_fl",)),
        "keep_prob": (_conv_float, 0.8),
        "mode": (_conv_str, "single"),
        "seed": (_conv_int, DEFAULT_SEED),
    },
}

_HELP = {
    "graphon": "builtin graphon name",
    "scenario": "builtin graphon name",
    "n": "number of nodes (overrides edge-list inference)",
    "seed": f"base seed for all randomness (default {DEFAULT_SEED})",
    "input": "adjacency matrix file (.csv dense or .tsv edge list)",
    "method": "nn_fl | sas_fl | l1_fl | usvt",
    "mode": "single | split",
    "m": 'split point: integer or "half"',
    "lam": 'penalty level: number or "cv"',
    "cv_candidates": "number of lambda candidates",
    "cv_holdout": "fraction of pairs erased for CV",
    "cv_span": "grid bottom as fraction of the constant-fit lambda",
    "nn_start": 'tour start: "medoid", "random", or a node id',
    "inner_divisor": "normalizer of the inner-product metric (default n)",
    "usvt_factor": "singular-value threshold factor",
    "tol": "relative duality-gap tolerance",
    "max_iter": "sweep cap for the grid solver",
    "trials": "number of Monte-Carlo trials",
    "methods": "comma-separated method list",
    "keep_prob": "per-pair keep probability before estimation",
}


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value file merged under CLI flags")
    common.add_argument("--outdir", default=".", help="directory for output files")
    common.add_argument("--threads", type=int, default=1, help="worker thread cap")
    common.add_argument(
        "--strict", action="store_true", help="exit 3 if any solve misses its gap target"
    )
    parser = argparse.ArgumentParser(
        prog="graphonfl",
        description="Link-probability matrix estimation by node ordering plus grid fused lasso.",
    )
    parser.add_argument("--version", action="version", version=f"graphonfl {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    descr = {
        "simulate": "draw latent positions, theta*, and an adjacency matrix",
        "estimate": "estimate theta_hat from an observed adjacency matrix",
        "cv": "cross-validate the penalty level on an observed matrix",
        "benchmark": "paired Monte-Carlo MSE benchmark on a builtin scenario",
        "linkpred": "masked-pair link-prediction AUC benchmark",
    }
    for name, fields in _FIELDS.items():
        p = sub.add_parser(name, parents=[common], help=descr[name], description=descr[name])
        for key in fields:
            flag = "--lambda" if key == "lam" else "--" + key.replace("_", "-")
            p.add_argument(flag, dest=key, default=None, help=_HELP.get(key, ""))
        if name == "estimate":
            p.add_argument(
                "--dump-order", action="store_true", help="also write each ordering as a CSV line"
            )
            p.add_argument(
                "--dump-metric", action="store_true", help="also write each metric matrix as CSV"
            )
    return parser


def _read_config_file(path):
    if path is None:
        return {}
    if not os.path.exists(path):
        raise DataError(f"config file not found: {path}")
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def _resolve(subcommand, args, file_cfg):
    fields = _FIELDS[subcommand]
    unknown = sorted(set(file_cfg) - set(fields))
    if unknown:
        raise UsageError(f"unknown config keys for {subcommand}: {', '.join(unknown)}")
    vals = {}
    for key, (conv, default) in fields.items():
        raw = getattr(args, key)
        if raw is None and key in file_cfg:
            raw = file_cfg[key]
        if raw is None:
            if default is _REQUIRED:
                flag = "--lambda" if key == "lam" else "--" + key.replace("_", "-")
                raise UsageError(f"{subcommand} requires {flag}")
            vals[key] = default
            continue
        try:
            vals[key] = conv(raw) if isinstance(raw, str) else raw
        except ValueError:
            raise UsageError(f"invalid value for {key}: {raw!r}") from None
    return vals


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def _write_json(path, obj):
    with open(path, "w") as fh:
        fh.write(json.dumps(obj, sort_keys=True, indent=2, default=_json_default) + "\n")


def _write_manifest(outdir, subcommand, vals, outputs):
    manifest = {
        "tool": "graphonfl",
        "version": __version__,
        "subcommand": subcommand,
        "config": {k: (list(v) if isinstance(v, tuple) else v) for k, v in vals.items()},
        "outputs": sorted(outputs),
    }
    _write_json(os.path.join(outdir, "manifest.json"), manifest)


def _estimator_config(vals):
    try:
        return EstimatorConfig(**{k: vals[k] for k in _ESTIMATOR_FIELDS})
    except ValueError as e:
        raise UsageError(str(e)) from None


def _load_adjacency(vals):
    path = vals["input"]
    if not os.path.exists(path):
        raise DataError(f"input file not found: {path}")
    try:
        return load_matrix(path, n=vals.get("n"))
    except ValueError as e:
        raise DataError(str(e)) from None


def _tour_json(tour):
    return {
        "order": [int(v) for v in tour.order],
        "start": int(tour.start),
        "cost_open": tour.cost_open,
        "cost_closed": tour.cost_closed,
    }


def _metric_contexts(n, cfg):
    everyone = np.arange(n, dtype=np.int64)
    if cfg.mode == "single":
        return {"full": (everyone, everyone)}
    s1, s2 = split_indices(n, cfg.m)
    return {
        "diag_s1": (s1, s2),
        "diag_s2": (s2, s1),
        "rect_rows": (s1, s1),
        "rect_cols": (s2, s2),
    }


def _cmd_simulate(vals, args):
    try:
        g = builtin_graphon(vals["graphon"])
    except ValueError as e:
        raise UsageError(str(e)) from None
    xi = sample_latents(vals["n"], vals["seed"])
    theta = probability_matrix(g, xi)
    a = sample_adjacency(theta, vals["seed"])
    outputs = ["latents.csv", "theta_star.csv", "adjacency.csv"]
    save_dense_csv(os.path.join(args.outdir, "latents.csv"), xi.xi)
    save_dense_csv(os.path.join(args.outdir, "theta_star.csv"), theta)
    save_dense_csv(os.path.join(args.outdir, "adjacency.csv"), a)
    _write_manifest(args.outdir, "simulate", vals, outputs)
    print(f"wrote {', '.join(outputs)} to {args.outdir}")
    return EXIT_OK


def _cmd_estimate(vals, args):
    a = _load_adjacency(vals)
    cfg = _estimator_config(vals)
    est = estimate(a, cfg, threads=args.threads)
    outputs = ["theta_hat.csv", "estimate.json"]
    save_dense_csv(os.path.join(args.outdir, "theta_hat.csv"), est.theta_hat)
    sidecar = {
        "method": est.method,
        "mode": est.mode,
        "n": int(a.shape[0]),
        "lambda_chosen": est.lambda_chosen,
        "diagnostics": est.diagnostics,
        "orderings": {k: _tour_json(t) for k, t in est.orderings.items()},
        "cv_curve": None if est.cv_curve is None else est.cv_curve.tolist(),
    }
    _write_json(os.path.join(args.outdir, "estimate.json"), sidecar)
    if getattr(args, "dump_order", False):
        for name, tour in est.orderings.items():
            fname = f"order_{name}.csv"
            with open(os.path.join(args.outdir, fname), "w") as fh:
                fh.write(",".join(str(int(v)) for v in tour.order) + "\n")
            outputs.append(fname)
    if getattr(args, "dump_metric", False) and cfg.method != "usvt":
        for name, (targets, reference) in _metric_contexts(a.shape[0], cfg).items():
            kind = {"nn_fl": "inner", "sas_fl": "degree", "l1_fl": "l1"}[cfg.method]
            mm = metric_by_kind(kind, a, targets, reference, divisor=cfg.inner_divisor)
            fname = f"metric_{name}.csv"
            save_dense_csv(os.path.join(args.outdir, fname), mm.dist)
            outputs.append(fname)
    _write_manifest(args.outdir, "estimate", vals, outputs)
    lam = "none" if est.lambda_chosen is None else f"{est.lambda_chosen:g}"
    print(f"lambda_chosen={lam}")
    print(f"wrote {', '.join(sorted(outputs))} to {args.outdir}")
    if not all(d.get("converged", True) for d in est.diagnostics.values()):
        return EXIT_NONCONVERGED if args.strict else EXIT_OK
    return EXIT_OK


def _cmd_cv(vals, args):
    a = _load_adjacency(vals)
    cfg = _estimator_config(vals)
    if cfg.method == "usvt":
        raise UsageError("usvt has no lambda to cross-validate")
    lambda_star, curve = cross_validate_lambda(a, cfg, threads=args.threads)
    outputs = ["cv_curve.csv", "cv.json"]
    with open(os.path.join(args.outdir, "cv_curve.csv"), "w") as fh:
        fh.write("lambda,score\n")
        for lam, score in curve:
            fh.write(f"{lam:.17g},{score:.17g}\n")
    _write_json(
        os.path.join(args.outdir, "cv.json"),
        {"lambda_star": lambda_star, "curve": curve.tolist()},
    )
    _write_manifest(args.outdir, "cv", vals, outputs)
    print(f"lambda_star={lambda_star:g}")
    return EXIT_OK


def _cmd_benchmark(vals, args):
    try:
        builtin_graphon(vals["scenario"])
    except ValueError as e:
        raise UsageError(str(e)) from None
    results = monte_carlo_benchmark(
        vals["scenario"],
        vals["n"],
        vals["methods"],
        vals["trials"],
        vals["seed"],
        mode=vals["mode"],
        threads=args.threads,
    )
    outputs = ["benchmark.csv", "benchmark.json"]
    with open(os.path.join(args.outdir, "benchmark.csv"), "w") as fh:
        fh.write(benchmark_table_csv(results))
    _write_json(os.path.join(args.outdir, "benchmark.json"), benchmark_report(results))
    _write_manifest(args.outdir, "benchmark", vals, outputs)
    for r in results:
        print(f"{r.method}: mse_x1000 = {r.mse_mean_x1000:.1f} +- {r.mse_std_x1000:.1f}")
    if args.strict and not all(all(r.converged) for r in results):
        return EXIT_NONCONVERGED
    return EXIT_OK


def _cmd_linkpred(vals, args):
    if (vals["scenario"] is None) == (vals["input"] is None):
        raise UsageError("linkpred needs exactly one of --scenario or --input")
    kwargs = dict(
        methods=vals["methods"],
        n_trials=vals["trials"],
        base_seed=vals["seed"],
        keep_prob=vals["keep_prob"],
        mode=vals["mode"],
        threads=args.threads,
    )
    if vals["input"] is not None:
        results = link_prediction_run(a=_load_adjacency(vals), **kwargs)
    else:
        try:
            builtin_graphon(vals["scenario"])
        except ValueError as e:
            raise UsageError(str(e)) from None
        if vals["n"] is None:
            raise UsageError("linkpred with --scenario requires --n")
        results = link_prediction_run(scenario=vals["scenario"], n=vals["n"], **kwargs)
    outputs = ["linkpred.csv", "linkpred.json"]
    with open(os.path.join(args.outdir, "linkpred.csv"), "w") as fh:
        fh.write("scenario,method,n_trials,n_excluded,auc_mean\n")
        for r in results:
            fh.write(f"{r.scenario},{r.method},{r.n_trials},{r.n_excluded},{r.auc_mean:.6f}\n")
    _write_json(os.path.join(args.outdir, "linkpred.json"), linkpred_report(results))
    _write_manifest(args.outdir, "linkpred", vals, outputs)
    for r in results:
        print(f"{r.method}: auc = {r.auc_mean:.4f} over {r.n_trials} trials")
    return EXIT_OK


_COMMANDS = {
    "simulate": _cmd_simulate,
    "estimate": _cmd_estimate,
    "cv": _cmd_cv,
    "benchmark": _cmd_benchmark,
    "linkpred": _cmd_linkpred,
}


def run(argv):
    """Parse argv, execute, return the exit code (artifacts land on disk)."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if not e.code else EXIT_USAGE
    try:
        file_cfg = _read_config_file(args.config)
        vals = _resolve(args.subcommand, args, file_cfg)
        os.makedirs(args.outdir, exist_ok=True)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            code = _COMMANDS[args.subcommand](vals, args)
        nonconverged = False
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
            if _NONCONV_MARK in str(w.message):
                nonconverged = True
        if args.strict and nonconverged:
            return EXIT_NONCONVERGED
        return code
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
