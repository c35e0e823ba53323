"""``warpflow`` command line.

Exit codes: 0 ok, 1 configuration error, 2 input error, 3 no region left
after filtering, 4 anything else.
"""

import argparse
import logging
import os
import sys
from pathlib import Path

from . import export
from .analysis import classify_std, lag_sweep_all, run_all, run_diagnostics
from .config import RunConfig, load_config
from .errors import (
    ConfigError,
    EmptyAfterFilter,
    IngestError,
    LagTooLarge,
    ZeroSpread,
    ZeroVariance,
)
from .ingest import load_dataset, parse_regions
from .mobility import aggregate_all_mobility
from .preprocess import filter_regions
from .synth import ScenarioSpec, gen_dataset

log = logging.getLogger("warpflow")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INGEST = 2
EXIT_EMPTY = 3
EXIT_INTERNAL = 4


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def configure_logging():
    level = os.environ.get("WARPFLOW_LOG", "WARNING").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


# -- argument parsing -------------------------------------------------------


def _add_run_flags(p):
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--regions", help="regions.csv")
    p.add_argument("--flows", help="flows.csv")
    p.add_argument("--cases", help="cases.csv")
    p.add_argument("--out", help="output directory")
    p.add_argument("--lag", type=int, help="mobility -> cases lag in days (default 7)")
    p.add_argument("--window", type=int, help="mobility moving-average window (default 7)")
    p.add_argument("--metro-only", dest="metro_only", action=argparse.BooleanOptionalAction,
                   default=None, help="keep only metropolitan regions (default on)")
    p.add_argument("--min-case-filter", dest="min_case_filter",
                   help="'median' (default) or a numeric threshold on mean daily cases")
    p.add_argument("--resmooth-cases", dest="resmooth_cases",
                   action=argparse.BooleanOptionalAction, default=None,
                   help="apply the moving average to cases as well")
    p.add_argument("--fill-missing", dest="fill_missing", choices=("zero", "previous"),
                   help="fill gaps in case series instead of failing")
    p.add_argument("--start-date", dest="start_date", help="YYYY-MM-DD")
    p.add_argument("--end-date", dest="end_date", help="YYYY-MM-DD")
    p.add_argument("--band-radius", dest="band_radius", type=int,
                   help="Sakoe-Chiba radius (default: unconstrained)")
    p.add_argument("--workers", type=int, help="worker threads (default: all cores)")
    p.add_argument("--export-mobility", dest="export_mobility",
                   action=argparse.BooleanOptionalAction, default=None,
                   help="also write mobility_series.csv")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="warpflow",
        description="DTW similarity between regional mobility and case counts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="score every region at one lag")
    _add_run_flags(p_run)

    p_sweep = sub.add_parser("lag-sweep", help="score every region over a range of lags")
    _add_run_flags(p_sweep)
    p_sweep.add_argument("--lag-min", dest="lag_min", type=int, help="default 0")
    p_sweep.add_argument("--lag-max", dest="lag_max", type=int, help="default 30")

    p_synth = sub.add_parser("synth", help="write a synthetic dataset")
    p_synth.add_argument("spec", nargs="?", help="scenario JSON (omit for defaults)")
    p_synth.add_argument("--out", required=True, help="output directory")
    p_synth.add_argument("--seed", type=int, help="override the scenario seed")

    p_report = sub.add_parser("report", help="rebuild classified.csv/diagnostics.txt from results.csv")
    p_report.add_argument("--results", required=True)
    p_report.add_argument("--regions", required=True)
    p_report.add_argument("--out", help="output directory (default: next to results.csv)")
    return parser


_RUN_KEYS = ("regions", "flows", "cases", "out", "lag", "window", "metro_only",
             "min_case_filter", "resmooth_cases", "fill_missing", "start_date", "end_date",
             "band_radius", "workers", "export_mobility")


def config_from_args(args):
    overrides = {k: getattr(args, k, None) for k in _RUN_KEYS}
    for k in ("lag_min", "lag_max"):
        overrides[k] = getattr(args, k, None)
    return load_config(args.config, **overrides)


# -- commands ---------------------------------------------------------------


def _load(cfg: RunConfig):
    for key in ("regions", "flows", "cases"):
        value = getattr(cfg, key)
        if value is None:
            raise CliError(f"no {key} file given (--{key})", EXIT_CONFIG)
        if not Path(value).is_file():
            raise CliError(f"input file not found: {value}", EXIT_INGEST)
    dataset = load_dataset(cfg.regions, cfg.flows, cfg.cases, cfg.date_range, cfg.fill_missing)
    analysis = cfg.analysis_config(dataset.date_range)
    return dataset, analysis


def _write_log(path, cfg, extra_lines):
    body = [
        "# warpflow run log; the [warpflow] section below is the effective",
        "# configuration and can be passed back with --config",
        *[f"# {line}" for line in extra_lines],
        cfg.to_text(),
    ]
    Path(path).write_text("\n".join(body), encoding="utf-8")


def cmd_run(cfg: RunConfig):
    dataset, analysis = _load(cfg)
    results, report = run_all(dataset, analysis, cfg.band_radius, cfg.effective_workers,
                              return_report=True)
    kept = {r.region_id for r in results}
    filtered = sorted(rid for rid in dataset.regions if rid not in kept)

    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    export.write_results(out / "results.csv", results, filtered)
    export.write_filter_report(out / "filter_report.csv", report)
    notes = _write_report_files(out, results, dataset.regions)
    if cfg.export_mobility:
        mobility = aggregate_all_mobility(dataset.flows, dataset.regions, dataset.date_range)
        export.write_mobility(out / "mobility_series.csv", mobility)

    n_scored = sum(1 for r in results if r.scored)
    lines = [
        f"date_range={dataset.date_range[0].isoformat()}..{dataset.date_range[1].isoformat()}",
        *report.summary_lines(),
        f"effective_workers={cfg.effective_workers}",
        f"regions_scored={n_scored}",
        f"regions_skipped={len(results) - n_scored}",
        *notes,
    ]
    _write_log(out / "run.log", cfg, lines)
    for line in lines:
        log.info(line)
    return EXIT_OK


def _write_report_files(out, results, regions):
    notes = []
    try:
        classified = classify_std(results)
    except ZeroSpread as exc:
        classified = []
        notes.append(f"classification_unavailable={exc}")
        log.warning("classification skipped: %s", exc)
    export.write_classified(out / "classified.csv", classified)
    try:
        export.write_diagnostics(out / "diagnostics.txt", run_diagnostics(results, regions))
    except ZeroVariance as exc:
        export.write_diagnostics(out / "diagnostics.txt", reason=str(exc))
        notes.append(f"diagnostics_unavailable={exc}")
        log.warning("diagnostics skipped: %s", exc)
    return notes


def cmd_lag_sweep(cfg: RunConfig):
    if cfg.lag_min > cfg.lag_max:
        raise CliError(f"lag_min {cfg.lag_min} exceeds lag_max {cfg.lag_max}", EXIT_CONFIG)
    if cfg.lag_min < 0:
        raise CliError("lag_min must be >= 0", EXIT_CONFIG)
    dataset, analysis = _load(cfg)
    report = filter_regions(dataset.regions, dataset.cases, analysis)[1]
    sweeps = lag_sweep_all(dataset, analysis, cfg.lag_min, cfg.lag_max, cfg.band_radius,
                           cfg.effective_workers)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    export.write_lag_sweep(out / "lag_sweep.csv", sweeps)
    export.write_lag_best(out / "lag_sweep_best.csv", sweeps)
    export.write_filter_report(out / "filter_report.csv", report)
    lines = [
        f"date_range={dataset.date_range[0].isoformat()}..{dataset.date_range[1].isoformat()}",
        *report.summary_lines(),
        f"lags={cfg.lag_min}..{cfg.lag_max}",
        f"effective_workers={cfg.effective_workers}",
        f"regions_swept={len(sweeps)}",
    ]
    _write_log(out / "lag_sweep.log", cfg, lines)
    return EXIT_OK


def cmd_synth(spec_path, out_dir, seed=None):
    spec = ScenarioSpec.from_json(spec_path) if spec_path else ScenarioSpec()
    if seed is not None:
        spec = ScenarioSpec.from_dict({**spec.to_dict(), "seed": seed})
    paths = gen_dataset(spec).write(out_dir)
    for p in paths.values():
        log.info("wrote %s", p)
    return EXIT_OK


def cmd_report(results_path, regions_path, out_dir=None):
    for p in (results_path, regions_path):
        if not Path(p).is_file():
            raise CliError(f"input file not found: {p}", EXIT_INGEST)
    results = export.read_results(results_path)
    regions = parse_regions(regions_path)
    unknown = [r.region_id for r in results if r.region_id not in regions]
    if unknown:
        raise CliError(f"results mention unknown region(s): {', '.join(unknown[:5])}", EXIT_INGEST)
    out = Path(out_dir) if out_dir else Path(results_path).parent
    out.mkdir(parents=True, exist_ok=True)
    _write_report_files(out, results, regions)
    return EXIT_OK


def _dispatch(args):
    if args.command == "synth":
        return cmd_synth(args.spec, args.out, args.seed)
    if args.command == "report":
        return cmd_report(args.results, args.regions, args.out)
    cfg = config_from_args(args)
    if args.command == "run":
        return cmd_run(cfg)
    return cmd_lag_sweep(cfg)


def main(argv=None):
    configure_logging()
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except CliError as exc:
        print(f"warpflow: {exc}", file=sys.stderr)
        return exc.code
    except (ConfigError, LagTooLarge) as exc:
        print(f"warpflow: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IngestError as exc:
        print(f"warpflow: input error: {exc}", file=sys.stderr)
        return EXIT_INGEST
    except EmptyAfterFilter as exc:
        print(f"warpflow: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except Exception as exc:  # noqa: BLE001 - last-resort exit code
        log.debug("internal error", exc_info=True)
        print(f"warpflow: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
