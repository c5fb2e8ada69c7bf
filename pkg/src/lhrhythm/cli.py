"""Command-line entry point ``lhrhythm``.

Exit codes: 0 success, 2 usage, 3 configuration, 4 input data, 5 analysis stage.
Diagnostics go to stderr as ``lhrhythm: [stage] message``.
"""
from __future__ import annotations

import argparse
import os
import sys

from . import __version__
from .config import ConfigError, dumps_config, load_config, builtin_defaults
from .phases import cohort_summary, detect_phases, extract_phase_params
from .pipeline import StageError, analyze_cohort, provenance, run_cohort, run_scenario, simulate
from .report import emit_report, read_band, write_cohort, write_phases
from .tables import TableFormatError, export_series, import_series

EXIT_OK, EXIT_USAGE, EXIT_CONFIG, EXIT_INPUT, EXIT_STAGE = 0, 2, 3, 4, 5


class CliError(Exception):
    def __init__(self, stage, message, code):
        super().__init__(message)
        self.stage, self.code = stage, code


def _config(args):
    try:
        cfg = load_config(args.config) if args.config else builtin_defaults(args.profile)
    except ConfigError as exc:
        raise CliError("config", str(exc), EXIT_CONFIG) from exc
    except OSError as exc:
        raise CliError("config", f"{args.config}: {exc.strerror}", EXIT_CONFIG) from exc
    if getattr(args, "seed", None) is not None and len(args.seed) == 1:
        cfg = cfg.with_seed(args.seed[0])
    return cfg


def _seeds(args, cfg):
    return args.seed if args.seed else [cfg.schedule.seed]


def _out(args, cfg):
    return args.out or cfg.output_dir


def cmd_simulate(args):
    cfg = _config(args)
    series = {}
    for s in _seeds(args, cfg):
        raw = simulate(cfg.with_seed(s))
        series[str(s)] = raw
    path = args.out or os.path.join(cfg.output_dir, "series.csv")
    export_series(path, series)
    print(path)


def _read_series(paths):
    merged = {}
    for path in paths:
        try:
            got = import_series(path)
        except TableFormatError as exc:
            raise CliError("import", str(exc), EXIT_INPUT) from exc
        except OSError as exc:
            raise CliError("import", f"{path}: {exc.strerror}", EXIT_INPUT) from exc
        for name, s in got.items():
            key = name if len(paths) == 1 else f"{os.path.splitext(os.path.basename(path))[0]}:{name}"
            if key in merged:
                raise CliError("import", f"animal {key!r} appears twice", EXIT_INPUT)
            merged[key] = s
    return merged


def _animal_dir(root, name):
    safe = "".join(c if c.isalnum() or c in "-_." else "_" for c in name)
    return os.path.join(root, f"animal_{safe}")


def cmd_analyze(args):
    cfg = _config(args)
    series = _read_series(args.series)
    bundles, summary = analyze_cohort(series, cfg.analysis, workers=args.workers)
    out = _out(args, cfg)
    prov = provenance(cfg)
    for name, b in bundles.items():
        b.provenance = dict(prov, animal=name)
        b.config = cfg
        emit_report(b, _animal_dir(out, name))
    if len(bundles) > 1:
        os.makedirs(out, exist_ok=True)
        write_cohort(out, summary)
    print(out)


def cmd_phases(args):
    cfg = _config(args)
    records = []
    out = _out(args, cfg)
    for path in args.lf_tables:
        try:
            _, iamp, _ = read_band(path)
        except TableFormatError as exc:
            raise CliError("import", str(exc), EXIT_INPUT) from exc
        except OSError as exc:
            raise CliError("import", f"{path}: {exc.strerror}", EXIT_INPUT) from exc
        if abs(iamp.dt - 1.0) > 1e-6:
            raise CliError("import", f"{path}: LF table must be on a daily grid", EXIT_INPUT)
        try:
            recs = extract_phase_params(iamp, detect_phases(iamp, cfg.analysis.phase))
        except ValueError as exc:
            raise CliError("phases", f"{path}: {exc}", EXIT_STAGE) from exc
        records.append(recs)
        name = os.path.splitext(os.path.basename(path))[0]
        target = (os.path.join(out, "phases.csv") if len(args.lf_tables) == 1
                  else os.path.join(out, f"phases_{len(records)}_{name}.csv"))
        write_phases(target, recs)
    if len(records) > 1:
        write_cohort(out, cohort_summary(records))
    print(out)


def cmd_report(args):
    cfg = _config(args)
    out = _out(args, cfg)
    seeds = _seeds(args, cfg)
    if len(seeds) == 1:
        emit_report(run_scenario(cfg.with_seed(seeds[0]), workers=args.workers), out)
    else:
        bundles, summary = run_cohort(cfg, seeds, workers=args.workers)
        for s, b in zip(seeds, bundles):
            emit_report(b, _animal_dir(out, str(s)))
        write_cohort(out, summary)
    print(out)


def cmd_defaults(args):
    sys.stdout.write(dumps_config(builtin_defaults(args.profile)))


def build_parser():
    ap = argparse.ArgumentParser(prog="lhrhythm",
                                 description="Simulate and analyse seasonal LH secretion rhythms.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, seeds=True):
        p.add_argument("-c", "--config", help="TOML configuration (defaults to built-in set)")
        p.add_argument("--profile", choices=("damped", "sinusoid"), default="damped",
                       help="built-in parameter set when no --config is given")
        if seeds:
            p.add_argument("--seed", type=int, nargs="+",
                           help="sampling seed(s); several seeds simulate a cohort")
        p.add_argument("-o", "--out", help="output path (default from config)")

    p = sub.add_parser("simulate", help="config -> sampled LH series table")
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="series files -> LF/HF/phase tables")
    common(p, seeds=False)
    p.add_argument("series", nargs="+", help="long-format series tables")
    p.add_argument("-j", "--workers", type=int, default=1)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("phases", help="LF tables -> phase records and cohort statistics")
    common(p, seeds=False)
    p.add_argument("lf_tables", nargs="+", help="lf.csv tables written by analyze/report")
    p.set_defaults(func=cmd_phases)

    p = sub.add_parser("report", help="simulate, analyse and write all tables plus manifest")
    common(p)
    p.add_argument("-j", "--workers", type=int, default=1)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("defaults", help="print the built-in parameter set as TOML")
    p.add_argument("--profile", choices=("damped", "sinusoid"), default="damped")
    p.set_defaults(func=cmd_defaults)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    if getattr(args, "workers", 1) < 1:
        print("lhrhythm: [usage] --workers must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        args.func(args)
    except CliError as exc:
        print(f"lhrhythm: [{exc.stage}] {exc}", file=sys.stderr)
        return exc.code
    except StageError as exc:
        print(f"lhrhythm: {exc}", file=sys.stderr)
        return EXIT_STAGE
    except TableFormatError as exc:
        print(f"lhrhythm: [import] {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"lhrhythm: [output] {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
