"""Seed-median trends of the flooding attack at full scale.

Each check runs 10^4-slot simulations over five seeds, so the module is
deselected by default; run it with ``pytest -m seed_trends``.
"""

from dataclasses import replace

import numpy as np
import pandas as pd
import pytest

from ranslice.attacker import UNIFORM_TARGET, WeightPolicy, aw_stationary_mix
from ranslice.engine import SimConfig, SliceSimulator
from ranslice.model import MAX_WEIGHT
from ranslice.sweep import DEFAULT_SEEDS, SweepAxis, SweepSpec, run_sweep

pytestmark = pytest.mark.seed_trends

BASE = SimConfig()


def _medians(axis: SweepAxis, values, column: str) -> pd.Series:
    frame = run_sweep(SweepSpec(axis, tuple(values), DEFAULT_SEEDS, BASE), workers=5)
    return frame.groupby("value", sort=False)[column].median()


def test_attack_strategy_ordering() -> None:
    frame = run_sweep(
        SweepSpec(
            SweepAxis.ATTACK_STRATEGY,
            ("qlearning", "minres", "random", "none"),
            DEFAULT_SEEDS,
            BASE,
        ),
        workers=5,
    )
    real = frame.groupby("value", sort=False)["real_reward"].median()
    total = frame.groupby("value", sort=False)["total_reward"].median()

    assert real["qlearning"] < real["minres"] < real["random"] < real["none"]
    assert total["qlearning"] > total["none"]
    assert total["minres"] > total["none"]
    assert frame["wall_seconds"].sum() < 60 * 5


def test_fake_rate_sweep() -> None:
    real = _medians(
        SweepAxis.FAKE_RATE, (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.7, 1.0), "real_reward"
    )
    head = [real[rate] for rate in (0.0, 0.1, 0.2, 0.3, 0.4, 0.5)]
    assert all(a > b for a, b in zip(head, head[1:]))
    assert abs(real[1.0] - real[0.7]) / real[0.7] < 0.15


def test_fewer_rbs_soften_the_attack() -> None:
    ratio = _medians(SweepAxis.RB_COUNT, (5, 12), "ratio_percent")
    assert ratio[5] > ratio[12]


def test_more_users_soften_the_attack() -> None:
    ratio = _medians(SweepAxis.UE_COUNT, (3, 50), "ratio_percent")
    assert ratio[50] > ratio[3]


def test_snr_band_ordering() -> None:
    ratio = _medians(SweepAxis.SNR_BAND, ("low", "medium", "high"), "ratio_percent")
    assert ratio["low"] < ratio["medium"] < ratio["high"]


def test_weight_policy_trade_off() -> None:
    policies = ("LW", "UW", "ULW", "RDW", "RDLW", "AW1", "AW2", "AW3")
    real = _medians(SweepAxis.WEIGHT_POLICY, policies, "real_reward")
    assert real["LW"] == real.min()
    assert real["ULW"] < real["UW"]
    assert real["RDLW"] < real["RDW"]


def test_scheme_ordering_without_attack() -> None:
    frame = run_sweep(
        SweepSpec(
            SweepAxis.SCHEME,
            ("qlearning", "myopic", "fcfs", "random"),
            DEFAULT_SEEDS,
            BASE.without_attack(),
        ),
        workers=5,
    )
    real = frame.groupby("value", sort=False)["real_reward"].median()
    assert real["qlearning"] >= real["myopic"] >= real["fcfs"] >= real["random"]


def test_adaptive_weights_follow_their_chain() -> None:
    # AW2 resets to 5 on admission and steps down otherwise, so weights 3..5
    # shrink geometrically and the mix cannot get close to uniform. The
    # observed mix must instead match the chain driven by the measured
    # same-slot admission rate of each weight.
    cfg = replace(BASE, attack=replace(BASE.attack, weight_policy=WeightPolicy.AW2))
    sent = np.zeros(MAX_WEIGHT)
    selected = np.zeros(MAX_WEIGHT)
    for seed in DEFAULT_SEEDS:
        sim = SliceSimulator(replace(cfg, seed=seed))
        for t in range(cfg.total_slots):
            outcome = sim.step(t)
            if outcome.fake is None or t < cfg.window_start:
                continue
            admitted = {item.request.id for item in outcome.decision.admitted}
            sent[outcome.fake.weight - 1] += 1
            selected[outcome.fake.weight - 1] += outcome.fake.id in admitted
    observed = sent / sent.sum()
    rates = np.divide(selected, sent, out=np.full(MAX_WEIGHT, 0.5), where=sent > 0)
    predicted = aw_stationary_mix(WeightPolicy.AW2, rates)
    assert 0.5 * np.abs(observed - predicted).sum() < 0.05
    assert 0.5 * np.abs(observed - UNIFORM_TARGET).sum() < 0.8



def test_sensing_errors_barely_move_real_reward() -> None:
    real = _medians(SweepAxis.SENSING_ERROR, (0.0, 0.2), "real_reward")
    assert abs(real[0.2] - real[0.0]) / real[0.0] <= 0.15
