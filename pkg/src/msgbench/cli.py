"""Command-line entry point: ``msgbench generate|run|sweep|verify|report``.

Settings resolve as command-line flag, then ``--config`` JSON file, then the
built-in defaults below.  Data goes to files or stdout, progress to stderr.
Exit status: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import harness, report
from .errors import DimensionTooHigh, InvalidSpec, MsgBenchError, UnknownAlgorithm
from .landscape import (
    LandscapeSpec,
    generate_landscape,
    load_landscape,
    save_landscape,
    verify_local_optima,
)
from .optimizers import ALGORITHM_ORDER, AlgorithmConfig

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2

DEFAULTS = {
    "local_optima": 3,
    "ratio": 0.5,
    "dims": 2,
    "boundary": 30.0,
    "smoothness": 15.0,
    "seed": 0,
    "algo": "rs",
    "algorithms": ",".join(ALGORITHM_ORDER),
    "runs": 100,
    "budget": 20_000,
    "population": 50,
    "range": 10.0,
    "tolerance": 1e-4,
    "characteristic": "all",
    "landscapes_per_value": 1,
    "jobs": 1,
    "out": None,
    "out_dir": "results",
    "grid": 300,
    "landscape": None,
    "records": None,
}

_SPEC_FLAGS = {
    "num_local_optima": "--local-optima",
    "ratio": "--ratio",
    "dimensions": "--dims",
    "boundary": "--boundary",
    "smoothness": "--smoothness",
    "seed": "--seed",
}


class UsageError(Exception):
    pass


def _flag(parser, name, type_, help_, dest=None):
    dest = dest or name.lstrip("-").replace("-", "_")
    default = DEFAULTS[dest]
    shown = "none" if default is None else default
    parser.add_argument(name, dest=dest, type=type_, default=None,
                        help=f"{help_} (default: {shown})")


def _spec_flags(parser):
    _flag(parser, "--local-optima", int, "number of local optima")
    _flag(parser, "--ratio", float, "average local-to-global optimum quality ratio")
    _flag(parser, "--dims", int, "dimensionality")
    _flag(parser, "--boundary", float, "domain width per dimension")
    _flag(parser, "--smoothness", float, "smoothness coefficient (larger = steeper)")


def _algo_flags(parser):
    _flag(parser, "--runs", int, "seeded runs per cell")
    _flag(parser, "--budget", int, "objective evaluations per run")
    _flag(parser, "--population", int, "population size")
    _flag(parser, "--range", float, "range/velocity parameter")
    _flag(parser, "--tolerance", float, "success tolerance on the error")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="msgbench",
        description="Characterise optimizers on max-set-of-Gaussians landscapes.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a landscape JSON file")
    _spec_flags(p)
    _flag(p, "--seed", int, "landscape seed")
    _flag(p, "--out", str, "output path; landscape.json when unset")
    p.add_argument("--config", help="JSON config file")

    p = sub.add_parser("run", help="run one algorithm on a landscape file")
    _flag(p, "--landscape", str, "landscape JSON file (required)")
    _flag(p, "--algo", str, f"algorithm, one of {', '.join(ALGORITHM_ORDER)}")
    _algo_flags(p)
    _flag(p, "--seed", int, "base seed of the batch")
    _flag(p, "--out", str, "records CSV path; stdout when unset")
    p.add_argument("--config", help="JSON config file")

    p = sub.add_parser("sweep", help="sweep landscape characteristics over their standard ranges")
    _flag(p, "--characteristic", str,
          f"one of {', '.join(harness.CHARACTERISTIC_ORDER)} or all")
    _flag(p, "--algorithms", str, "comma-separated algorithms")
    _algo_flags(p)
    _flag(p, "--landscapes-per-value", int, "landscapes generated per characteristic value")
    _flag(p, "--jobs", int, "worker processes")
    _flag(p, "--seed", int, "master seed")
    _spec_flags(p)
    _flag(p, "--out-dir", str, "output directory")
    p.add_argument("--config", help="JSON config file")

    p = sub.add_parser("verify", help="count basins of a landscape by grid descent")
    _flag(p, "--landscape", str, "landscape JSON file (required)")
    _flag(p, "--grid", int, "grid points per dimension")
    p.add_argument("--config", help="JSON config file")

    p = sub.add_parser("report", help="rebuild summary tables and radar plots from records CSV")
    _flag(p, "--records", str, "records CSV written by sweep (required)")
    _flag(p, "--tolerance", float, "success tolerance on the error")
    _flag(p, "--out-dir", str, "output directory")
    p.add_argument("--config", help="JSON config file")
    return parser


def resolve(args: argparse.Namespace) -> dict:
    """Merge flags over the config file over built-in defaults."""
    file_values = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                file_values = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"--config: cannot read {args.config}: {exc}") from None
        if not isinstance(file_values, dict):
            raise UsageError("--config: expected a JSON object")
        file_values = {k.replace("-", "_"): v for k, v in file_values.items()}
    settings = {}
    for key, default in DEFAULTS.items():
        flag = getattr(args, key, None)
        if flag is not None:
            settings[key] = flag
        elif key in file_values:
            settings[key] = file_values[key]
        else:
            settings[key] = default
    return settings


def _spec(settings) -> LandscapeSpec:
    spec = LandscapeSpec(
        num_local_optima=settings["local_optima"],
        ratio=settings["ratio"],
        dimensions=settings["dims"],
        boundary=settings["boundary"],
        smoothness=settings["smoothness"],
        seed=settings["seed"],
    )
    try:
        return spec.validate()
    except InvalidSpec as exc:
        field = str(exc).split("=", 1)[0]
        raise UsageError(f"{_SPEC_FLAGS.get(field, field)}: {exc}") from None


def _config(settings) -> AlgorithmConfig:
    if not isinstance(settings["population"], int) or settings["population"] < 1:
        raise UsageError(f"--population: must be an integer >= 1, got {settings['population']!r}")
    if not settings["range"] > 0:
        raise UsageError(f"--range: must be > 0, got {settings['range']!r}")
    return AlgorithmConfig(population_size=settings["population"],
                           range_param=float(settings["range"]))


def _positive(settings, key, flag):
    value = settings[key]
    if not isinstance(value, int) or value < 1:
        raise UsageError(f"{flag}: must be an integer >= 1, got {value!r}")
    return value


def _progress(message: str) -> None:
    print(message, file=sys.stderr, flush=True)


def cmd_generate(settings) -> int:
    spec = _spec(settings)
    landscape = generate_landscape(spec)
    out = settings["out"] or "landscape.json"
    save_landscape(landscape, out)
    optimum = ", ".join(repr(float(v)) for v in landscape.global_optimum)
    print(out)
    print(f"global optimum at ({optimum}), {len(landscape.components)} components")
    return EXIT_OK


def _load(settings):
    if not settings["landscape"]:
        raise UsageError("--landscape: required")
    return load_landscape(settings["landscape"])


def cmd_run(settings) -> int:
    config = _config(settings)
    runs = _positive(settings, "runs", "--runs")
    budget = _positive(settings, "budget", "--budget")
    algo = settings["algo"]
    if algo not in ALGORITHM_ORDER:
        raise UsageError(f"--algo: unknown algorithm {algo!r} (choose from {', '.join(ALGORITHM_ORDER)})")
    landscape = _load(settings)
    records = harness.run_batch(landscape, algo, config, runs, settings["seed"], budget)
    text = harness.records_csv((("", None, r) for r in records), settings["tolerance"])
    _write_text(settings["out"], text)
    return EXIT_OK


def _write_text(path, text):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_sweep(settings) -> int:
    characteristic = settings["characteristic"]
    if characteristic != harness.ALL and characteristic not in harness.CHARACTERISTICS:
        choices = ", ".join(harness.CHARACTERISTIC_ORDER + (harness.ALL,))
        raise UsageError(f"--characteristic: unknown {characteristic!r} (choose from {choices})")
    algorithms = [a.strip() for a in str(settings["algorithms"]).split(",") if a.strip()]
    unknown = [a for a in algorithms if a not in ALGORITHM_ORDER]
    if unknown or not algorithms:
        raise UsageError(f"--algorithms: unknown algorithm(s) {unknown}")
    jobs = _positive(settings, "jobs", "--jobs")
    plan = harness.SweepPlan(
        characteristic=characteristic,
        defaults=_spec(settings),
        algorithms=algorithms,
        runs_per_cell=_positive(settings, "runs", "--runs"),
        landscapes_per_value=_positive(settings, "landscapes_per_value", "--landscapes-per-value"),
        budget=_positive(settings, "budget", "--budget"),
        master_seed=settings["seed"],
        config=_config(settings),
        tolerance=float(settings["tolerance"]),
    )
    out_dir = Path(settings["out_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    result = harness.sweep(plan, jobs=jobs, progress=_progress)

    with open(out_dir / "config.json", "w", encoding="utf-8") as fh:
        resolved = {k: settings[k] for k in DEFAULTS
                    if k not in ("out", "grid", "landscape", "records", "jobs")}
        json.dump(resolved, fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(out_dir / "records.csv", "w", encoding="utf-8", newline="") as fh:
        result.write_records_csv(fh)
    if result.failures:
        with open(out_dir / "diagnostics.txt", "w", encoding="utf-8") as fh:
            for f in result.failures:
                fh.write(f"{f.characteristic}={harness.format_value(f.value)} "
                         f"landscape {f.landscape_index}: {f.message}\n")
        for f in result.failures:
            _progress(f"FAILED {f.characteristic}={f.value}: {f.message}")
    if not result.cells:
        _progress("no cell completed")
        return EXIT_FAILURE
    _emit_reports(result.summaries, out_dir)
    _progress(f"wrote {out_dir}")
    return EXIT_OK


def _emit_reports(summaries, out_dir):
    try:
        table = report.resilience(summaries)
    except MsgBenchError as exc:
        _progress(f"resilience skipped: {exc}")
        table = None
    report.emit_summary_tables(summaries, table, out_dir)


def cmd_verify(settings) -> int:
    landscape = _load(settings)
    grid = settings["grid"]
    if not isinstance(grid, int) or grid < 50:
        raise UsageError(f"--grid: must be an integer >= 50, got {grid!r}")
    try:
        found = verify_local_optima(landscape, grid)
    except DimensionTooHigh as exc:
        raise UsageError(f"--landscape: {exc}") from None
    expected = len(landscape.components)
    print(f"expected {expected}, found {found}")
    return EXIT_OK if found == expected else EXIT_FAILURE


def cmd_report(settings) -> int:
    if not settings["records"]:
        raise UsageError("--records: required")
    with open(settings["records"], encoding="utf-8", newline="") as fh:
        rows = harness.read_records_csv(fh)
    groups = {}
    for characteristic, value, record in rows:
        groups.setdefault((characteristic, value, record.algorithm), []).append(record)
    summaries = [harness.compute_metrics(recs, float(settings["tolerance"]), c, v)
                 for (c, v, _), recs in groups.items()]
    _emit_reports(summaries, Path(settings["out_dir"]))
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "run": cmd_run,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = resolve(args)
        return COMMANDS[args.command](settings)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"msgbench {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UnknownAlgorithm, DimensionTooHigh) as exc:
        print(f"msgbench {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (MsgBenchError, OSError, ValueError) as exc:
        print(f"msgbench {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
