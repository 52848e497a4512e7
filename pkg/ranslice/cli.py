"""Command line interface for the RAN slicing flooding-attack simulator."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Sequence

from .attacker import WeightTableError
from .config import ConfigurationError, load_sim_config, sim_config_from_dict
from .engine import (
    SimConfig,
    SliceSimulator,
    UndefinedRatioError,
    report_to_dict,
    run as run_simulation,
    with_ratio,
)
from .events import SlotEventLog
from .model import AccountingError, AllocationError
from .rl import RLError
from .sweep import (
    DEFAULT_SEEDS,
    REPLICATE_TABLES,
    SweepAxis,
    SweepError,
    SweepSpec,
    parse_axis_value,
    replicate_spec,
    run_sweeps,
    summarize,
    validate_tables,
    write_results,
)

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

DEFAULT_MEASURE_WINDOW = 1_000


class CLIError(RuntimeError):
    """Raised for invalid command line input."""


def _split_list(raw: str, *, name: str) -> list[str]:
    items = [item.strip() for item in raw.split(",") if item.strip()]
    if not items:
        raise CLIError(f"{name} must list at least one value")
    return items


def _parse_seeds(raw: str | None) -> tuple[int, ...]:
    if raw is None:
        return DEFAULT_SEEDS
    seeds = []
    for item in _split_list(raw, name="--seeds"):
        try:
            seeds.append(int(item))
        except ValueError as exc:
            raise CLIError(f"Invalid seed {item!r}") from exc
    return tuple(seeds)


def _load_base(args: argparse.Namespace) -> SimConfig:
    overrides: dict[str, Any] = {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "slots", None) is not None:
        overrides["total_slots"] = args.slots
        overrides["measure_window"] = min(args.slots, DEFAULT_MEASURE_WINDOW)
    if getattr(args, "window", None) is not None:
        overrides["measure_window"] = args.window
    if getattr(args, "check_invariants", False):
        overrides["check_invariants"] = True
    if args.config:
        return load_sim_config(args.config, overrides=overrides)
    return sim_config_from_dict({}, overrides=overrides)


def _dump_json(payload: dict[str, Any]) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _dump_table(table: Any, path: str, label: str) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with target.open("w", encoding="utf-8") as handle:
        rows = table.dump(handle)
    logger.info("Wrote %d %s Q-table rows to %s", rows, label, target)


def cmd_run(args: argparse.Namespace) -> None:
    cfg = _load_base(args)
    event_log = SlotEventLog(args.event_log) if args.event_log else None
    try:
        simulator = SliceSimulator(cfg, event_log=event_log)
        report = simulator.run()
    finally:
        if event_log is not None:
            event_log.close()
    if args.reference:
        report = with_ratio(report, run_simulation(cfg.without_attack()))
    if args.dump_qtable:
        _dump_table(simulator.scheduler.table, args.dump_qtable, "gNodeB")
    if args.dump_attacker_qtable:
        _dump_table(simulator.attacker.table, args.dump_attacker_qtable, "attacker")
    text = _dump_json(report_to_dict(report))
    sys.stdout.write(text)
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")
        logger.info("Wrote report to %s", out)


def _emit_frame(args: argparse.Namespace, specs: Sequence[SweepSpec]) -> None:
    frame = run_sweeps(specs, workers=args.workers)
    path = write_results(frame, args.out)
    logger.info("Wrote %d result rows to %s", len(frame), path)
    if args.summary:
        print(summarize(frame).to_string(index=False))


def cmd_sweep(args: argparse.Namespace) -> None:
    axis = SweepAxis.parse(args.axis)
    values = tuple(
        parse_axis_value(axis, raw) for raw in _split_list(args.values, name="--values")
    )
    spec = SweepSpec(axis, values, _parse_seeds(args.seeds), _load_base(args), label=axis.value)
    _emit_frame(args, [spec])


def cmd_replicate(args: argparse.Namespace) -> None:
    specs = replicate_spec(args.table, _load_base(args), _parse_seeds(args.seeds))
    _emit_frame(args, specs)


def cmd_validate_dist(args: argparse.Namespace) -> None:
    paths = [(path, args.kind) for path in args.tables or []]
    checks = validate_tables(paths)
    failed = False
    for check in checks:
        status = "PASS" if check.passed else "FAIL"
        print(f"{status} {check.name}")
        for problem in check.problems:
            print(f"  - {problem}")
        failed = failed or not check.passed
    if failed:
        raise CLIError("Weight table validation failed")


def _add_config_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--config", help="Run configuration (JSON or YAML); defaults when omitted"
    )
    parser.add_argument(
        "--slots",
        type=int,
        help=(
            "Override total_slots; measure_window becomes min(slots, 1000) "
            "unless --window is set"
        ),
    )
    parser.add_argument("--window", type=int, help="Override measure_window")
    parser.add_argument(
        "--check-invariants",
        action="store_true",
        help="Verify resource conservation and service rules every slot",
    )


def _add_sweep_outputs(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seeds", help="Comma-separated seeds (default: 1,2,3,4,5)")
    parser.add_argument("--out", required=True, help="CSV file for the result rows")
    parser.add_argument("--workers", type=int, default=1, help="Parallel worker processes")
    parser.add_argument(
        "--summary", action="store_true", help="Print per-value medians after the sweep"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Simulate 5G RAN slicing under an RL flooding attack"
    )
    parser.add_argument(
        "--verbose",
        "--debug",
        action="store_true",
        help="Increase logging verbosity",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    run_parser = subparsers.add_parser("run", help="Run one simulation and print its report")
    _add_config_options(run_parser)
    run_parser.add_argument("--seed", type=int, help="Override the configured seed")
    run_parser.add_argument("--out", help="Also write the JSON report to this path")
    run_parser.add_argument(
        "--reference",
        action="store_true",
        help="Run the no-attack twin and fill ratio_percent",
    )
    run_parser.add_argument("--event-log", help="Write per-slot events as JSON lines")
    run_parser.add_argument("--dump-qtable", help="Write the gNodeB Q-table as text rows")
    run_parser.add_argument(
        "--dump-attacker-qtable", help="Write the attacker Q-table as text rows"
    )

    sweep_parser = subparsers.add_parser("sweep", help="Sweep one parameter over seeds")
    _add_config_options(sweep_parser)
    sweep_parser.add_argument(
        "--axis",
        required=True,
        choices=[axis.value for axis in SweepAxis],
        help="Parameter to vary",
    )
    sweep_parser.add_argument("--values", required=True, help="Comma-separated axis values")
    _add_sweep_outputs(sweep_parser)

    validate_parser = subparsers.add_parser(
        "validate-dist", help="Check weight tables keep the overall distribution on target"
    )
    validate_parser.add_argument(
        "--table",
        action="append",
        dest="tables",
        help="Weight matrix file (rows = weights, columns = RB states); can be repeated",
    )
    validate_parser.add_argument(
        "--kind",
        choices=["rdw", "rdlw"],
        default="rdw",
        help="Target for --table files: uniform (rdw) or high-weight (rdlw)",
    )

    replicate_parser = subparsers.add_parser(
        "replicate", help="Run the sweeps behind one results table"
    )
    replicate_parser.add_argument("--table", required=True, choices=list(REPLICATE_TABLES))
    _add_config_options(replicate_parser)
    _add_sweep_outputs(replicate_parser)
    return parser


def main(argv: Sequence[str] | None = None) -> None:
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.getLogger().setLevel(
        logging.DEBUG if getattr(args, "verbose", False) else logging.INFO
    )
    if getattr(args, "verbose", False):
        logger.debug("Verbose logging enabled; log level set to DEBUG")
    try:
        if args.command == "run":
            cmd_run(args)
        elif args.command == "sweep":
            cmd_sweep(args)
        elif args.command == "validate-dist":
            cmd_validate_dist(args)
        elif args.command == "replicate":
            cmd_replicate(args)
        else:  # pragma: no cover - argparse enforces choices
            raise CLIError(f"Unknown command: {args.command}")
    except KeyboardInterrupt:  # pragma: no cover - interactive use
        logger.info("Interrupted by user")
    except (
        CLIError,
        ConfigurationError,
        SweepError,
        WeightTableError,
        UndefinedRatioError,
        AccountingError,
        AllocationError,
        RLError,
        ValueError,
        OSError,
    ) as exc:
        logger.error(
            "Command failed: %s", exc, exc_info=logger.isEnabledFor(logging.DEBUG)
        )
        parser.exit(1, f"error: {exc}\n")


if __name__ == "__main__":
    main(sys.argv[1:])
