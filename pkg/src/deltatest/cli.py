"""Command-line entry point.

Exit codes: 0 success / consistent batch, 2 inconsistent batch, 1 any error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .alternative import ShiftAlternative, min_batch_size, power
from .consistency import TestConfig, build_null, test_batch
from .core import Batch, SampleWindow
from .errors import DeltaTestError
from .experiments import ExperimentConfig, run_experiment
from .fileio import ReportDocument, array_digest, file_digest, ingest, write_plot_csv
from .generators import GeneratorSpec, standard_generator

EXIT_OK, EXIT_ERROR, EXIT_INCONSISTENT = 0, 1, 2


def _emit(doc: ReportDocument, out) -> None:
    text = doc.to_json()
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        sys.stdout.write(text + "\n")


def _digest(source, values):
    if source and source != "-":
        return file_digest(source)
    return array_digest(values)


def _add_test_options(p):
    p.add_argument("--level", type=float, default=0.05)
    p.add_argument("--tail", choices=["left", "right", "two"], default="two")
    p.add_argument("--backend", choices=["resample", "edgeworth", "gaussian_exact"],
                   default="resample")
    p.add_argument("--dist-class", choices=["cramer", "discrete_nonlattice", "gaussian"],
                   default="cramer")
    p.add_argument("--m", type=int, default=3, help="declared highest finite moment order")
    p.add_argument("--resamples", type=int, default=10_000)
    p.add_argument("--sigma-source", choices=["pooled", "window"], default="pooled")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", choices=["csv", "jsonl"], default=None)


def _test_config(args, **extra) -> TestConfig:
    return TestConfig(level=args.level, tail=args.tail, null_backend=args.backend,
                      dist_class=args.dist_class, declared_m=args.m,
                      resample_N=args.resamples, seed=args.seed,
                      sigma_source=args.sigma_source, workers=args.workers, **extra)


def cmd_test(args) -> int:
    t0 = time.perf_counter()
    w_values = ingest(args.window, args.format)
    b_values = ingest(args.batch, args.format)
    cfg = _test_config(args)
    report = test_batch(SampleWindow(w_values), Batch(b_values), cfg)
    doc = ReportDocument(
        command="test",
        config=vars_of(cfg),
        results=report.to_dict(),
        seeds={"master_seed": args.seed},
        input_digests={"window": _digest(args.window, w_values),
                       "batch": _digest(args.batch, b_values)},
        runtime_seconds=time.perf_counter() - t0,
    )
    _emit(doc, args.out)
    return EXIT_INCONSISTENT if report.inconsistent else EXIT_OK


def vars_of(cfg) -> dict:
    return {f: getattr(cfg, f) for f in cfg.__dataclass_fields__}


def _alternative(args) -> ShiftAlternative:
    return ShiftAlternative(args.mu0, args.mu1, args.sigma1, args.sigma0)


def _add_alt_options(p):
    p.add_argument("--mu0", type=float, required=True)
    p.add_argument("--mu1", type=float, required=True)
    p.add_argument("--sigma1", type=float, required=True)
    p.add_argument("--sigma0", type=float, default=None)
    p.add_argument("--level", type=float, default=0.05)
    p.add_argument("--tail", choices=["left", "right", "two"], default="right")
    p.add_argument("--form", choices=["full", "simplified"], default=None,
                   help="shift form; default full when --n is given, else simplified")
    p.add_argument("--null", choices=["normal", "gaussian_exact"], default=None,
                   help="null for critical values; default gaussian_exact with --n, else normal")
    p.add_argument("--variance-correction", action="store_true",
                   help="widen the H1 law by 1 + (1 + sigma0^2/sigma1^2) k/n (needs --sigma0)")


def _form_and_null(args):
    simplified = (args.form == "simplified") if args.form else args.n is None
    null = args.null or ("normal" if args.n is None else "gaussian_exact")
    return simplified, null


def cmd_mink(args) -> int:
    t0 = time.perf_counter()
    simplified, null = _form_and_null(args)
    alt = _alternative(args)
    res = min_batch_size(args.n, args.level, args.power, alt, args.tail, null, simplified,
                         args.dist_class, args.m, args.variance_correction)
    cfg = {"n": args.n, "level": args.level, "power": args.power, "mu0": args.mu0,
           "mu1": args.mu1, "sigma1": args.sigma1, "sigma0": args.sigma0, "tail": args.tail,
           "form": "simplified" if simplified else "full", "null": null,
           "dist_class": args.dist_class, "m": args.m}
    doc = ReportDocument("mink", cfg, {**res.to_dict(), "drift": alt.drift},
                         runtime_seconds=time.perf_counter() - t0)
    _emit(doc, args.out)
    return EXIT_OK


def cmd_power(args) -> int:
    t0 = time.perf_counter()
    simplified, null = _form_and_null(args)
    alt = _alternative(args)
    value = power(args.n, args.k, args.level, args.tail, alt, null, simplified,
                  args.variance_correction)
    cfg = {"n": args.n, "k": args.k, "level": args.level, "mu0": args.mu0, "mu1": args.mu1,
           "sigma1": args.sigma1, "sigma0": args.sigma0, "tail": args.tail,
           "form": "simplified" if simplified else "full", "null": null}
    doc = ReportDocument("power", cfg, {"power": value, "drift": alt.drift},
                         runtime_seconds=time.perf_counter() - t0)
    _emit(doc, args.out)
    return EXIT_OK


def cmd_null(args) -> int:
    t0 = time.perf_counter()
    values = ingest(args.window, args.format)
    cfg = _test_config(args, fold_on_accept=False)
    cfg = TestConfig(**{**vars_of(cfg), "sigma_source": "window"})
    null = build_null(SampleWindow(values), args.k, cfg)
    grid = np.arange(args.x_min, args.x_max + args.x_step / 2, args.x_step)
    cdf = np.asarray(null.cdf(grid), dtype=float)
    results = {
        "backend": args.backend,
        "n": int(values.size),
        "k": args.k,
        "sigma_hat": float(null.sigma_hat if args.backend == "resample" else null.sigma),
        "regime": null.regime.to_dict() if null.regime else None,
        "quantiles": {str(p): float(null.ppf(p)) for p in (0.025, 0.05, 0.5, 0.95, 0.975)},
        "grid": grid.tolist(),
        "cdf": cdf.tolist(),
    }
    if args.plot_csv:
        write_plot_csv([(x, v, args.backend) for x, v in zip(grid, cdf)], args.plot_csv)
    doc = ReportDocument("null", vars_of(cfg), results, seeds={"master_seed": args.seed},
                         input_digests={"window": _digest(args.window, values)},
                         runtime_seconds=time.perf_counter() - t0)
    _emit(doc, args.out)
    return EXIT_OK


_MC_OVERRIDES = ("n", "k", "level", "tail", "null_backend", "replicates", "resample_N",
                 "master_seed", "shift")


def cmd_mc(args) -> int:
    raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
    for name in _MC_OVERRIDES:
        value = getattr(args, name, None)
        if value is not None:
            raw[name] = value
    cfg = ExperimentConfig.from_dict(raw)
    result = run_experiment(cfg, workers=args.workers)
    if args.plot_csv:
        write_plot_csv(result.plot_rows, args.plot_csv)
    doc = ReportDocument("mc", cfg.to_dict(), result.summary, seeds=result.seeds,
                         input_digests={"config": file_digest(args.config)},
                         runtime_seconds=result.runtime_seconds)
    _emit(doc, args.out)
    return EXIT_OK


def cmd_gen(args) -> int:
    params = json.loads(args.params) if args.params else {}
    spec = GeneratorSpec(args.kind, params)
    x = standard_generator(spec, args.count, args.seed)
    fh = open(args.out, "w", encoding="utf-8", newline="") if args.out else sys.stdout
    try:
        if args.format == "jsonl":
            for v in x:
                fh.write(json.dumps({"value": float(v)}) + "\n")
        else:
            fh.write("value\n")
            for v in x:
                fh.write(repr(float(v)) + "\n")
    finally:
        if args.out:
            fh.close()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="deltatest",
        description="Test whether a new batch of observations is consistent with a reference window.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("test", help="test one batch against a window")
    p.add_argument("window", help="reference observations (path or - for stdin)")
    p.add_argument("batch", help="new observations (path)")
    _add_test_options(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("mink", help="smallest batch size reaching a target power")
    p.add_argument("--n", type=int, default=None, help="reference size (omit for the large-n limit)")
    p.add_argument("--power", type=float, default=0.8)
    p.add_argument("--dist-class", choices=["cramer", "discrete_nonlattice", "gaussian"],
                   default="cramer")
    p.add_argument("--m", type=int, default=3)
    _add_alt_options(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_mink)

    p = sub.add_parser("power", help="power of the test for a given batch size")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--k", type=int, required=True)
    _add_alt_options(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_power)

    p = sub.add_parser("null", help="tabulate the null CDF of the standardized statistic")
    p.add_argument("window")
    p.add_argument("--k", type=int, required=True)
    _add_test_options(p)
    p.add_argument("--x-min", type=float, default=-4.0)
    p.add_argument("--x-max", type=float, default=4.0)
    p.add_argument("--x-step", type=float, default=0.1)
    p.add_argument("--plot-csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_null)

    p = sub.add_parser("mc", help="run a Monte Carlo experiment from a JSON config")
    p.add_argument("config")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--plot-csv")
    p.add_argument("--out")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--level", type=float)
    p.add_argument("--tail", choices=["left", "right", "two"])
    p.add_argument("--null-backend", dest="null_backend",
                   choices=["resample", "edgeworth", "gaussian_exact"])
    p.add_argument("--replicates", type=int)
    p.add_argument("--resample-N", dest="resample_N", type=int)
    p.add_argument("--seed", dest="master_seed", type=int)
    p.add_argument("--shift", type=float)
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("gen", help="write synthetic observations")
    p.add_argument("kind", choices=list(GeneratorSpec.KINDS))
    p.add_argument("--params", help='JSON object, e.g. \'{"mu": 0, "sigma": 1}\'')
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["csv", "jsonl"], default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DeltaTestError, OSError, json.JSONDecodeError) as exc:
        print(f"deltatest {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
