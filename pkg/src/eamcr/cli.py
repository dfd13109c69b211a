"""Command-line entry point.

    eamcr validate --profiles corpus.json
    eamcr dlei     --profiles corpus.json --task eardrum --out dlei.csv
    eamcr simulate --scenario run.json --out results/ [--format svg] [--seed 7]
    eamcr compare  --scenario run.json --out results/ [--format svg]

Exit codes: 0 success, 1 I/O or parse failure, 2 validation or usage error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from importlib import resources
from pathlib import Path

from . import report
from .errors import (
    DomainError,
    InfeasibleScenario,
    NoCandidates,
    ParseError,
    UnknownModel,
    UnknownTask,
    ValidationError,
)
from .metrics import dlei_table
from .profiles import Severity, load_profiles, parse_json, profiles_from_dict, read_text, validate_profiles
from .scenario import load_scenario
from .sim import compare_policies, run_simulation

log = logging.getLogger("eamcr")

EXIT_OK, EXIT_IO, EXIT_INVALID = 0, 1, 2

_VALIDATION_ERRORS = (ValidationError, DomainError, UnknownTask, UnknownModel, NoCandidates, InfeasibleScenario)


def default_profiles_path() -> Path:
    return Path(str(resources.files("eamcr") / "data" / "profiles.json"))


def _u64(text):
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be a 64-bit unsigned integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eamcr", description="Energy-aware model selection toolkit.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for info, -vv for debug")
    sub = parser.add_subparsers(dest="command", required=True, metavar="{validate,dlei,simulate,compare}")

    p = sub.add_parser("validate", parents=[common], help="check a profile corpus")
    p.add_argument("--profiles", type=Path, default=None)

    p = sub.add_parser("dlei", parents=[common], help="efficiency index table for one task")
    p.add_argument("--profiles", type=Path, default=None)
    p.add_argument("--task", required=True)
    p.add_argument("--out", type=Path, default=None, help="output file (default: stdout)")
    p.add_argument("--format", choices=["csv", "json", "svg"], default="csv")

    for name, text in (("simulate", "run the first policy of a scenario"), ("compare", "run every policy of a scenario")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--scenario", type=Path, required=True)
        p.add_argument("--profiles", type=Path, default=None)
        p.add_argument("--out", type=Path, required=True, help="output directory")
        p.add_argument("--format", choices=["csv", "json", "svg"], default="csv")
        p.add_argument("--seed", type=_u64, default=None, help="override the workload seed")
    return parser


def _write(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8", newline="")
    log.info("wrote %s", path)


def cmd_validate(args) -> int:
    path = args.profiles or default_profiles_path()
    try:
        profiles = profiles_from_dict(parse_json(read_text(path), "profile file"), check=False)
    except ValidationError as e:
        print(f"error: {e}")
        return EXIT_INVALID
    diagnostics = validate_profiles(profiles)
    for d in diagnostics:
        print(d)
    errors = sum(d.severity is Severity.ERROR for d in diagnostics)
    print(f"{path}: {len(profiles.models)} models, {errors} errors, {len(diagnostics) - errors} warnings")
    return EXIT_INVALID if errors else EXIT_OK


def cmd_dlei(args) -> int:
    if args.format == "svg":
        print("error: --format svg is only available for simulate and compare", file=sys.stderr)
        return EXIT_INVALID
    profiles = load_profiles(args.profiles or default_profiles_path())
    table = dlei_table(profiles, args.task)
    rows = report.dlei_rows(table)
    if args.format == "json":
        text = report.to_json([dict(zip(report.DLEI_HEADER, r)) for r in rows])
    else:
        text = report.to_csv(report.DLEI_HEADER, rows)
    if args.out is None:
        sys.stdout.write(text)
    else:
        _write(args.out, text)
    return EXIT_OK


def _prepare(args):
    scenario = load_scenario(args.scenario)
    path = args.profiles or scenario.profiles_path or default_profiles_path()
    profiles = load_profiles(path)
    workload = scenario.workload
    if args.seed is not None:
        workload = replace(workload, seed=args.seed)
    args.out.mkdir(parents=True, exist_ok=True)
    return scenario, profiles, workload


def cmd_simulate(args) -> int:
    scenario, profiles, workload = _prepare(args)
    policy = scenario.policies(profiles)[0]
    result = run_simulation(
        profiles,
        scenario.task,
        scenario.accelerator,
        scenario.battery,
        policy,
        workload,
        noise_amplitude=scenario.noise_amplitude,
    )
    doc = {"scenario_id": scenario.scenario_id, "task": scenario.task, "seed": workload.seed}
    doc.update(report.result_to_dict(result))
    _write(args.out / "simulation.json", report.to_json(doc))
    _write(args.out / "energy_series.csv", report.to_csv(report.SERIES_HEADER, report.series_rows(result)))
    if args.format == "svg":
        title = f"{scenario.scenario_id}: {policy.label} on {scenario.accelerator.value}"
        _write(args.out / "energy_series.svg", report.energy_chart([(policy.label, result.energy_series)], title))
    print(
        f"{policy.label}: {result.operating_time_s / 3600:.3f} h, {result.inference_count} inferences, "
        f"{result.model_changes} model changes"
    )
    return EXIT_OK


def cmd_compare(args) -> int:
    scenario, profiles, workload = _prepare(args)
    policies = scenario.policies(profiles)
    if len(policies) < 2:
        print("error: compare needs a scenario with at least two policies", file=sys.stderr)
        return EXIT_INVALID
    rep = compare_policies(
        profiles,
        scenario.task,
        scenario.accelerator,
        scenario.battery,
        policies,
        workload,
        scenario_id=scenario.scenario_id,
        noise_amplitude=scenario.noise_amplitude,
    )
    _write(args.out / "comparison.json", report.to_json(report.report_to_dict(rep)))
    _write(args.out / "summary.csv", report.to_csv(report.SUMMARY_HEADER, report.summary_rows(rep)))
    if args.format == "svg":
        curves = [(r.policy.label, r.energy_series) for r in rep.results]
        title = f"{scenario.scenario_id}: policies on {scenario.accelerator.value}"
        chart = report.energy_chart(curves, title, mean_time_s=rep.fixed_mean_operating_time_s)
        _write(args.out / "comparison.svg", chart)
    for label, s in rep.summary.items():
        print(f"{label:28s} {s['operating_time_s'] / 3600:8.3f} h  utility {s['utility']:.1f}")
    if rep.fixed_mean_operating_time_s is not None:
        print(f"{'MEAN(FIXED)':28s} {rep.fixed_mean_operating_time_s / 3600:8.3f} h")
    return EXIT_OK


COMMANDS = {"validate": cmd_validate, "dlei": cmd_dlei, "simulate": cmd_simulate, "compare": cmd_compare}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except _VALIDATION_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except (OSError, ParseError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
