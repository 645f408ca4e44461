from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from mirrorsqkd.adversary import build_depolarizing_attack
from mirrorsqkd.scenarios import (
    BracketError,
    ScenarioConfig,
    bb84_baseline,
    closed_form_statistics,
    fiber_loss,
    find_threshold,
    sweep_curve,
)
from mirrorsqkd.stats import FIELDS, analytic_statistics


def test_closed_form_example_dependent():
    s = closed_form_statistics(ScenarioConfig(qz=0.1))
    assert s.e00 == pytest.approx(0.225) and s.e11 == pytest.approx(0.225)
    assert s.e01 == pytest.approx(0.025) and s.e10 == pytest.approx(0.025)
    assert s.m_total == pytest.approx(0.5)
    assert s.p_plus_plus == pytest.approx(0.9)
    assert s.p_ctrl_0 == pytest.approx(0.5)
    assert s.p_double == 0.0 and s.p_create_0 == 0.0


def test_closed_form_zero_noise_mismatch_rate():
    s = closed_form_statistics(ScenarioConfig())
    assert s.p0_plus == s.p1_plus == pytest.approx(0.125)


def test_closed_form_lossy_throughput():
    cfg = ScenarioConfig(qz=0.1, loss_mode="explicit", p_loss_forward=0.5, p_loss_reverse=0.5)
    assert closed_form_statistics(cfg).m_total == pytest.approx(0.125)


def test_independent_model_qx():
    assert ScenarioConfig(model="independent", qz=0.1).effective_qx() == pytest.approx(0.18)


@pytest.mark.parametrize(
    "kw",
    [
        dict(qz=0.6),
        dict(model="nope"),
        dict(loss_mode="explicit", p_loss_forward=1.0),
        dict(model="explicit", qx=0.7),
        dict(alpha=-1.0),
    ],
)
def test_config_validation(kw):
    with pytest.raises(ValueError):
        ScenarioConfig(**kw)


def test_fiber_loss_conventions():
    assert fiber_loss(0.15, 0.0) == 0.0
    assert fiber_loss(0.15, 10.0) == pytest.approx(1 - 10**-1.5)
    assert fiber_loss(0.15, 10.0) == pytest.approx(0.96838, abs=1e-5)
    assert fiber_loss(0.15, 10.0, "db-per-10") == pytest.approx(0.29205, abs=1e-5)
    with pytest.raises(ValueError):
        fiber_loss(0.15, 10.0, "furlongs")


def test_fiber_config_uses_same_loss_both_ways():
    cfg = ScenarioConfig(loss_mode="fiber", length_km=10.0, db_convention="db-per-10")
    pf, pr = cfg.losses()
    assert pf == pr == pytest.approx(0.29205, abs=1e-5)


def test_bb84_baseline():
    assert bb84_baseline(0.0) == 2.0
    assert bb84_baseline(0.5) == pytest.approx(-2.0)
    assert -0.01 < bb84_baseline(0.11) < 0.01
    with pytest.raises(ValueError):
        bb84_baseline(0.6)


@pytest.mark.parametrize("seed", range(5))
def test_closed_form_matches_dilation(seed):
    rng = np.random.default_rng(seed)
    qz, qx = rng.uniform(0, 0.5, 2)
    pf, pr = rng.uniform(0, 0.9, 2)
    cfg = ScenarioConfig(model="explicit", qz=qz, qx=qx, loss_mode="explicit",
                         p_loss_forward=pf, p_loss_reverse=pr)
    exact, _ = analytic_statistics(*build_depolarizing_attack(cfg.noise_spec()))
    closed = closed_form_statistics(cfg)
    for name in FIELDS:
        assert getattr(closed, name) == pytest.approx(getattr(exact, name), abs=1e-12), name


def test_thresholds():
    assert find_threshold(ScenarioConfig()) == pytest.approx(0.110, abs=0.002)
    assert find_threshold(ScenarioConfig(model="independent")) == pytest.approx(0.079, abs=0.002)


def test_lossy_threshold_unchanged():
    lossy = ScenarioConfig(loss_mode="fiber", length_km=2.0)
    assert find_threshold(lossy) == pytest.approx(find_threshold(ScenarioConfig()), abs=1e-9)


def test_threshold_bracket_error():
    with pytest.raises(BracketError):
        find_threshold(ScenarioConfig(), bracket=(0.0, 0.05))
    with pytest.raises(BracketError):
        find_threshold(ScenarioConfig(), bracket=(0.2, 0.25))


def test_sweep_curve_rows():
    rows = sweep_curve(ScenarioConfig(), 0.0, 0.15, 4)
    assert len(rows) == 4
    assert rows[0].rate == pytest.approx(1.0)
    assert [r.qz for r in rows] == pytest.approx([0.0, 0.05, 0.1, 0.15])
    feasible = [r.rate for r in rows if r.feasible]
    assert all(a > b for a, b in zip(feasible, feasible[1:]))


def test_sweep_curve_monotone_dependent():
    rates = [r.rate for r in sweep_curve(ScenarioConfig(), 0.0, 0.11, 23)]
    assert np.all(np.diff(rates) < 0)


def test_sweep_curve_degenerate_range():
    assert len(sweep_curve(ScenarioConfig(), 0.0, 0.0, 2)) == 1


def test_sweep_curve_parallel_matches_serial():
    cfg = ScenarioConfig(model="independent")
    with ThreadPoolExecutor(4) as pool:
        par = sweep_curve(cfg, 0.0, 0.1, 11, executor=pool)
    assert par == sweep_curve(cfg, 0.0, 0.1, 11)


def test_sweep_needs_two_steps():
    with pytest.raises(ValueError):
        sweep_curve(ScenarioConfig(), 0.0, 0.1, 1)


def test_throughput_weighted_rate():
    cfg = ScenarioConfig(qz=0.05, loss_mode="explicit", p_loss_forward=0.5, p_loss_reverse=0.0)
    (row,) = sweep_curve(cfg, 0.05, 0.05, 2)
    assert row.rate_throughput_weighted == pytest.approx(row.rate * 0.25)
