from dataclasses import replace
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from ranslice import sweep
from ranslice.attacker import AttackStrategy, WeightPolicy
from ranslice.attacker.weights import RDW_TABLE
from ranslice.engine import SimConfig, run
from ranslice.sweep import (
    RESULT_COLUMNS,
    SweepAxis,
    SweepError,
    SweepSpec,
    apply_axis,
    parse_axis_value,
    replicate_spec,
    run_sweep,
    run_sweeps,
    summarize,
    validate_tables,
    write_results,
)
from ranslice.traffic import SNR_BANDS, TrafficConfig

BASE = SimConfig(total_slots=80, measure_window=40)


def test_rows_follow_value_then_seed_order() -> None:
    frame = run_sweep(SweepSpec(SweepAxis.FAKE_RATE, (0.0, 0.5), (1, 2), BASE, label="rate"))

    assert list(frame.columns) == RESULT_COLUMNS
    assert list(zip(frame["value"], frame["seed"])) == [(0.0, 1), (0.0, 2), (0.5, 1), (0.5, 2)]
    assert set(frame["label"]) == {"rate"}


def test_zero_rate_rows_are_all_real() -> None:
    frame = run_sweep(SweepSpec(SweepAxis.FAKE_RATE, (0.0,), (1, 2, 3), BASE))
    assert (frame["real_reward"] == frame["total_reward"]).all()
    assert (frame["no_attack_reward"] == frame["total_reward"]).all()
    assert (frame["fake_emitted"] == 0).all()


def test_rows_match_direct_runs() -> None:
    frame = run_sweep(SweepSpec(SweepAxis.FAKE_RATE, (0.5,), (7,), BASE))
    cfg = replace(BASE, seed=7)
    attacked = run(cfg)
    reference = run(cfg.without_attack())

    row = frame.iloc[0]
    assert row["total_reward"] == attacked.total_reward
    assert row["real_reward"] == attacked.real_reward
    assert row["no_attack_reward"] == reference.total_reward
    assert row["ratio_percent"] == pytest.approx(
        100.0 * attacked.real_reward / reference.total_reward
    )


def test_results_do_not_depend_on_worker_count() -> None:
    spec = SweepSpec(SweepAxis.RB_COUNT, (5, 11), (1, 2), BASE)
    serial = run_sweep(spec, workers=1).drop(columns="wall_seconds")
    parallel = run_sweep(spec, workers=2).drop(columns="wall_seconds")
    pd.testing.assert_frame_equal(serial, parallel)


def test_references_are_shared(monkeypatch: pytest.MonkeyPatch) -> None:
    calls = []

    def counting_run(cfg):
        calls.append(cfg)
        return run(cfg)

    monkeypatch.setattr(sweep, "run_simulation", counting_run)
    run_sweep(SweepSpec(SweepAxis.FAKE_RATE, (0.3, 0.6), (1, 2), BASE))

    assert len(calls) == 6
    assert sum(not cfg.attack.active for cfg in calls) == 2


def test_failed_run_names_the_point(monkeypatch: pytest.MonkeyPatch) -> None:
    def failing_run(cfg):
        if cfg.seed == 2:
            raise RuntimeError("boom")
        return run(cfg)

    monkeypatch.setattr(sweep, "run_simulation", failing_run)
    with pytest.raises(SweepError) as excinfo:
        run_sweep(SweepSpec(SweepAxis.FAKE_RATE, (0.5,), (1, 2), BASE))
    message = str(excinfo.value)
    assert "fake_rate=0.5" in message
    assert "seed=2" in message
    assert "boom" in message


def test_undefined_ratio_is_left_empty() -> None:
    silent = replace(BASE, traffic=TrafficConfig(ue_count=0))
    frame = run_sweep(SweepSpec(SweepAxis.FAKE_RATE, (0.5,), (1,), silent))
    assert frame["ratio_percent"].isna().all()
    assert (frame["real_reward"] == 0).all()


def test_summary_takes_medians(tmp_path: Path) -> None:
    frame = run_sweep(SweepSpec(SweepAxis.UE_COUNT, (1, 3), (1, 2, 3), BASE))
    summary = summarize(frame)

    assert list(summary["value"]) == [1, 3]
    expected = frame[frame["value"] == 3]["real_reward"].median()
    assert summary.loc[summary["value"] == 3, "real_reward"].item() == expected

    path = write_results(frame, tmp_path / "out" / "sweep.csv")
    reloaded = pd.read_csv(path)
    assert list(reloaded.columns) == RESULT_COLUMNS
    assert len(reloaded) == 6


def test_axis_values_are_parsed() -> None:
    assert parse_axis_value(SweepAxis.RB_COUNT, "7") == 7
    assert parse_axis_value(SweepAxis.FAKE_RATE, "0.25") == 0.25
    assert parse_axis_value(SweepAxis.WEIGHT_POLICY, "aw1") == "AW1"
    assert parse_axis_value(SweepAxis.ATTACK_STRATEGY, "MinRes") == "minres"
    with pytest.raises(SweepError):
        parse_axis_value(SweepAxis.UE_COUNT, "2.5")
    with pytest.raises(SweepError):
        SweepAxis.parse("bandwidth")
    assert SweepAxis.parse("sensing-error") is SweepAxis.SENSING_ERROR


def test_apply_axis_sets_one_coordinate() -> None:
    band = apply_axis(BASE, SweepAxis.SNR_BAND, "low")
    assert band.traffic.snr_range == SNR_BANDS["low"]
    assert band.link.snr_range == SNR_BANDS["low"]

    noisy = apply_axis(BASE, SweepAxis.SENSING_ERROR, 0.15)
    assert noisy.attack.sensing.p_false_alarm == noisy.attack.sensing.p_misdetect == 0.15

    policy = apply_axis(BASE, SweepAxis.WEIGHT_POLICY, "RDLW")
    assert policy.attack.weight_policy is WeightPolicy.RDLW

    with pytest.raises(SweepError):
        apply_axis(BASE, SweepAxis.SNR_BAND, "deafening")


def test_sweep_spec_needs_values_and_seeds() -> None:
    with pytest.raises(SweepError):
        SweepSpec(SweepAxis.FAKE_RATE, (), (1,), BASE)
    with pytest.raises(SweepError):
        SweepSpec(SweepAxis.FAKE_RATE, (0.1,), (), BASE)
    with pytest.raises(SweepError):
        run_sweeps([SweepSpec(SweepAxis.FAKE_RATE, (0.1,), (1,), BASE)], workers=0)


@pytest.mark.parametrize(
    ("table", "axis", "count"),
    [
        ("1", SweepAxis.ATTACK_STRATEGY, 4),
        ("2", SweepAxis.SCHEME, 4),
        ("3", SweepAxis.FAKE_RATE, 11),
        ("4", SweepAxis.RB_COUNT, 11),
        ("5", SweepAxis.UE_COUNT, 10),
        ("6", SweepAxis.SNR_BAND, 3),
        ("9", SweepAxis.WEIGHT_POLICY, 8),
        ("sensing", SweepAxis.SENSING_ERROR, 5),
    ],
)
def test_replicate_specs(table: str, axis: SweepAxis, count: int) -> None:
    base = replace(BASE, attack=replace(BASE.attack, strategy=AttackStrategy.NONE))
    (spec,) = replicate_spec(table, base, seeds=(1, 2))
    assert spec.axis is axis
    assert len(spec.values) == count
    assert spec.seeds == (1, 2)
    assert spec.label == f"table-{table}"
    assert spec.base.attack.strategy is AttackStrategy.QLEARNING


def test_unknown_replicate_table() -> None:
    with pytest.raises(SweepError):
        replicate_spec("7", BASE)


def test_validate_tables(tmp_path: Path) -> None:
    checks = validate_tables()
    assert [(check.name, check.passed) for check in checks] == [("rdw", True), ("rdlw", True)]

    perturbed = RDW_TABLE.probs.copy()
    perturbed[2, 4] += 0.1
    path = tmp_path / "perturbed.txt"
    np.savetxt(path, perturbed)
    (check,) = validate_tables([(path, "rdw")])
    assert not check.passed
    assert any("column 5" in problem for problem in check.problems)

    with pytest.raises(SweepError):
        validate_tables([(path, "zipf")])
