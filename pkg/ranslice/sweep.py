"""Multi-seed parameter sweeps and table replication."""

from __future__ import annotations

import logging
import time
from concurrent.futures import Executor, Future, ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Sequence

import pandas as pd

from .attacker import (
    HIGH_WEIGHT_TARGET,
    RDLW_TABLE,
    RDW_TABLE,
    UNIFORM_TARGET,
    AttackStrategy,
    SensingErrors,
    WeightPolicy,
    WeightTable,
    load_weight_table,
)
from .attacker.weights import weight_table_errors
from .engine import MetricsReport, SimConfig, UndefinedRatioError, compute_ratio
from .engine import run as run_simulation
from .schemes import Scheme

logger = logging.getLogger(__name__)

RESULT_COLUMNS = [
    "label",
    "axis",
    "value",
    "seed",
    "total_reward",
    "real_reward",
    "fake_reward",
    "requested_real_reward",
    "requested_fake_reward",
    "fake_emitted",
    "no_attack_reward",
    "ratio_percent",
    "wall_seconds",
]
SUMMARY_COLUMNS = [
    "total_reward",
    "real_reward",
    "fake_reward",
    "no_attack_reward",
    "ratio_percent",
]
DEFAULT_SEEDS = (1, 2, 3, 4, 5)


class SweepError(RuntimeError):
    """Raised when a sweep is malformed or one of its runs fails."""


class SweepAxis(str, Enum):
    FAKE_RATE = "fake_rate"
    RB_COUNT = "rb_count"
    UE_COUNT = "ue_count"
    SNR_BAND = "snr_band"
    SENSING_ERROR = "sensing_error"
    WEIGHT_POLICY = "weight_policy"
    SCHEME = "scheme"
    ATTACK_STRATEGY = "attack_strategy"

    @classmethod
    def parse(cls, raw: str | "SweepAxis") -> "SweepAxis":
        if isinstance(raw, SweepAxis):
            return raw
        try:
            return cls(str(raw).strip().lower().replace("-", "_"))
        except ValueError as exc:
            choices = ", ".join(member.value for member in cls)
            raise SweepError(f"Unknown sweep axis {raw!r}; expected one of {choices}") from exc


def parse_axis_value(axis: SweepAxis, raw: Any) -> Any:
    """Coerce a textual axis value to the type the axis expects."""

    try:
        if axis in (SweepAxis.FAKE_RATE, SweepAxis.SENSING_ERROR):
            return float(raw)
        if axis in (SweepAxis.RB_COUNT, SweepAxis.UE_COUNT):
            value = float(raw)
            if value != int(value):
                raise ValueError(f"{raw!r} is not an integer")
            return int(value)
        if axis is SweepAxis.WEIGHT_POLICY:
            return WeightPolicy.parse(raw).value
        if axis is SweepAxis.SCHEME:
            return Scheme.parse(raw).value
        if axis is SweepAxis.ATTACK_STRATEGY:
            return AttackStrategy.parse(raw).value
        return str(raw).strip().lower()
    except ValueError as exc:
        raise SweepError(f"Invalid value for axis {axis.value}: {exc}") from exc


def apply_axis(base: SimConfig, axis: SweepAxis, value: Any) -> SimConfig:
    """Return ``base`` with one sweep coordinate set."""

    try:
        if axis is SweepAxis.FAKE_RATE:
            return replace(base, attack=replace(base.attack, fake_rate=float(value)))
        if axis is SweepAxis.RB_COUNT:
            return replace(base, link=replace(base.link, rb_count=int(value)))
        if axis is SweepAxis.UE_COUNT:
            return replace(base, traffic=replace(base.traffic, ue_count=int(value)))
        if axis is SweepAxis.SNR_BAND:
            traffic = base.traffic.with_snr_band(str(value))
            return replace(
                base, traffic=traffic, link=replace(base.link, snr_range=traffic.snr_range)
            )
        if axis is SweepAxis.SENSING_ERROR:
            sensing = SensingErrors.symmetric(float(value))
            return replace(base, attack=replace(base.attack, sensing=sensing))
        if axis is SweepAxis.WEIGHT_POLICY:
            policy = WeightPolicy.parse(value)
            return replace(base, attack=replace(base.attack, weight_policy=policy))
        if axis is SweepAxis.SCHEME:
            return replace(base, scheme=Scheme.parse(value))
        strategy = AttackStrategy.parse(value)
        return replace(base, attack=replace(base.attack, strategy=strategy))
    except ValueError as exc:
        raise SweepError(f"Cannot apply {axis.value}={value!r}: {exc}") from exc


@dataclass(frozen=True)
class SweepSpec:
    axis: SweepAxis
    values: tuple[Any, ...]
    seeds: tuple[int, ...]
    base: SimConfig
    label: str = ""

    def __post_init__(self) -> None:
        if not self.values:
            raise SweepError("A sweep needs at least one value")
        if not self.seeds:
            raise SweepError("A sweep needs at least one seed")

    def points(self) -> Iterable[tuple[Any, int, SimConfig]]:
        for value in self.values:
            configured = apply_axis(self.base, self.axis, value)
            for seed in self.seeds:
                yield value, seed, replace(configured, seed=seed)


@dataclass(frozen=True)
class ResultRow:
    label: str
    axis: str
    value: Any
    seed: int
    total_reward: int
    real_reward: int
    fake_reward: int
    requested_real_reward: int
    requested_fake_reward: int
    fake_emitted: int
    no_attack_reward: int
    ratio_percent: float | None
    wall_seconds: float


def _timed_run(cfg: SimConfig) -> tuple[MetricsReport, float]:
    started = time.perf_counter()
    report = run_simulation(cfg)
    return report, time.perf_counter() - started


class _InlineExecutor(Executor):
    """Runs submitted calls immediately in the calling thread."""

    def submit(self, fn, /, *args, **kwargs):  # type: ignore[no-untyped-def]
        future: Future = Future()
        try:
            future.set_result(fn(*args, **kwargs))
        except Exception as exc:  # surfaced by result()
            future.set_exception(exc)
        return future


def _executor(workers: int) -> Executor:
    if workers < 1:
        raise SweepError(f"workers must be >= 1, got {workers}")
    if workers == 1:
        return _InlineExecutor()
    return ProcessPoolExecutor(max_workers=workers)


def _ratio(report: MetricsReport, reference: MetricsReport) -> float | None:
    try:
        return compute_ratio(report, reference)
    except UndefinedRatioError:
        logger.warning("No-attack reference earned no reward; ratio left empty")
        return None


def run_sweeps(specs: Sequence[SweepSpec], workers: int = 1) -> pd.DataFrame:
    """Run every (value, seed) point of ``specs`` plus their no-attack references.

    References are shared between points whose no-attack configuration is
    identical. Row order follows spec, value, then seed, whatever the
    completion order of the workers.
    """

    points = [
        (spec, value, seed, cfg) for spec in specs for value, seed, cfg in spec.points()
    ]
    references: dict[SimConfig, Future] = {}
    with _executor(workers) as pool:
        futures = [pool.submit(_timed_run, cfg) for _, _, _, cfg in points]
        for _, _, _, cfg in points:
            if cfg.attack.active:
                twin = cfg.without_attack()
                if twin not in references:
                    references[twin] = pool.submit(_timed_run, twin)
                else:
                    logger.debug("Reusing no-attack reference for seed %d", cfg.seed)
        rows: list[ResultRow] = []
        for (spec, value, seed, cfg), future in zip(points, futures):
            try:
                report, seconds = future.result()
                if cfg.attack.active:
                    reference, _ = references[cfg.without_attack()].result()
                else:
                    reference = report
            except Exception as exc:
                raise SweepError(
                    f"Run failed for {spec.axis.value}={value!r}, seed={seed}: {exc}"
                ) from exc
            rows.append(
                ResultRow(
                    label=spec.label,
                    axis=spec.axis.value,
                    value=value,
                    seed=seed,
                    total_reward=report.total_reward,
                    real_reward=report.real_reward,
                    fake_reward=report.fake_reward,
                    requested_real_reward=report.requested_real_reward,
                    requested_fake_reward=report.requested_fake_reward,
                    fake_emitted=report.fake_emitted,
                    no_attack_reward=reference.total_reward,
                    ratio_percent=_ratio(report, reference),
                    wall_seconds=round(seconds, 6),
                )
            )
            logger.info(
                "Finished %s=%s seed=%d: total=%d real=%d",
                spec.axis.value,
                value,
                seed,
                report.total_reward,
                report.real_reward,
            )
    frame = pd.DataFrame([asdict(row) for row in rows], columns=RESULT_COLUMNS)
    # Undefined ratios become NaN so the column stays numeric.
    return frame.astype({"ratio_percent": float})


def run_sweep(spec: SweepSpec, workers: int = 1) -> pd.DataFrame:
    return run_sweeps([spec], workers=workers)


def summarize(frame: pd.DataFrame) -> pd.DataFrame:
    """Median of each reward column per (label, axis, value)."""

    grouped = frame.groupby(["label", "axis", "value"], sort=False)[SUMMARY_COLUMNS]
    return grouped.median().reset_index()


def write_results(frame: pd.DataFrame, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False)
    return path


REPLICATE_TABLES = ("1", "2", "3", "4", "5", "6", "9", "sensing")


def replicate_spec(
    table_id: str, base: SimConfig, seeds: Sequence[int] = DEFAULT_SEEDS
) -> list[SweepSpec]:
    """Sweeps reproducing one results table of the flooding-attack study."""

    seeds = tuple(seeds)
    table_id = str(table_id).strip().lower()
    attacked = replace(base, attack=replace(base.attack, strategy=AttackStrategy.QLEARNING))

    def spec(axis: SweepAxis, values: Sequence[Any], cfg: SimConfig = attacked) -> SweepSpec:
        return SweepSpec(axis, tuple(values), seeds, cfg, label=f"table-{table_id}")

    if table_id == "1":
        return [spec(SweepAxis.ATTACK_STRATEGY, ["qlearning", "minres", "random", "none"])]
    if table_id == "2":
        return [spec(SweepAxis.SCHEME, [member.value for member in Scheme])]
    if table_id == "3":
        return [spec(SweepAxis.FAKE_RATE, [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0])]
    if table_id == "4":
        return [spec(SweepAxis.RB_COUNT, list(range(5, 16)))]
    if table_id == "5":
        return [spec(SweepAxis.UE_COUNT, [3, 4, 5, 6, 7, 8, 9, 10, 20, 50])]
    if table_id == "6":
        return [spec(SweepAxis.SNR_BAND, ["low", "medium", "high"])]
    if table_id == "9":
        return [spec(SweepAxis.WEIGHT_POLICY, [member.value for member in WeightPolicy])]
    if table_id == "sensing":
        return [spec(SweepAxis.SENSING_ERROR, [0.0, 0.05, 0.1, 0.15, 0.2])]
    raise SweepError(
        f"Unknown table {table_id!r}; expected one of {', '.join(REPLICATE_TABLES)}"
    )


@dataclass(frozen=True)
class TableCheck:
    name: str
    passed: bool
    problems: tuple[str, ...] = ()


_TARGETS = {"rdw": UNIFORM_TARGET, "rdlw": HIGH_WEIGHT_TARGET}


def check_table(table: WeightTable, kind: str) -> TableCheck:
    try:
        target = _TARGETS[kind]
    except KeyError as exc:
        raise SweepError(f"Unknown table kind {kind!r}; expected rdw or rdlw") from exc
    problems = tuple(weight_table_errors(table, target))
    return TableCheck(name=table.name, passed=not problems, problems=problems)


def validate_tables(
    paths: Sequence[tuple[str | Path, str]] | None = None,
) -> list[TableCheck]:
    """Check the embedded tables, or ``(path, kind)`` pairs when given."""

    if not paths:
        return [check_table(RDW_TABLE, "rdw"), check_table(RDLW_TABLE, "rdlw")]
    return [check_table(load_weight_table(path), kind) for path, kind in paths]
