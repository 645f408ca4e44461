import numpy as np
import pytest

from mirrorsqkd.adversary import NoiseChannelSpec, build_depolarizing_attack, random_attack
from mirrorsqkd.stats import (
    FIELDS,
    ObservedStatistics,
    StatisticsError,
    analytic_statistics,
    check_lemma1,
    eve_vectors,
    monte_carlo_counts,
    monte_carlo_statistics,
    statistics_from_counts,
)


def depolarizing(qz, qx, pf=0.0, pr=0.0):
    return analytic_statistics(*build_depolarizing_attack(NoiseChannelSpec(qz, qx, pf, pr)))[0]


def test_noiseless_statistics():
    s = depolarizing(0.0, 0.0)
    assert s.e00 == pytest.approx(0.25) and s.e11 == pytest.approx(0.25)
    assert s.e01 == pytest.approx(0.0, abs=1e-15)
    assert s.m_total == pytest.approx(0.5)
    assert s.p0_plus == pytest.approx(0.125)
    assert s.p_plus_plus == pytest.approx(1.0)
    assert s.p_ctrl_0 == pytest.approx(0.5)
    assert s.p_double == pytest.approx(0.0, abs=1e-15)


def test_lossy_statistics_hand_values():
    # eta = 0.8 * 0.7 = 0.56
    s = depolarizing(0.1, 0.13, 0.2, 0.3)
    assert s.e00 == pytest.approx(0.25 * 0.56 * 0.9)
    assert s.e01 == pytest.approx(0.25 * 0.56 * 0.1)
    assert s.m_total == pytest.approx(0.28)
    assert s.p_plus_plus == pytest.approx(0.56 * 0.87)
    assert s.p1_plus == pytest.approx(0.07)


def test_total_loss_gives_zero_everywhere():
    s = depolarizing(0.1, 0.1, 1.0, 0.0)
    assert max(s.as_dict().values()) == pytest.approx(0.0, abs=1e-15)


def test_validate_rejects_broken_sum():
    bad = dict(depolarizing(0.1, 0.1).as_dict(), m_total=0.4)
    with pytest.raises(StatisticsError):
        ObservedStatistics.from_dict(bad)


def test_validate_rejects_out_of_range():
    bad = dict(depolarizing(0.1, 0.1).as_dict(), p_plus_plus=1.2)
    with pytest.raises(StatisticsError):
        ObservedStatistics.from_dict(bad)


def test_from_dict_rejects_unknown_field():
    with pytest.raises(StatisticsError):
        ObservedStatistics.from_dict(dict(depolarizing(0.1, 0.1).as_dict(), extra=0.0))


def test_scaled():
    s = depolarizing(0.1, 0.1)
    assert s.scaled(0.5).e00 == pytest.approx(0.5 * s.e00)
    s.scaled(0.5).validate()


@pytest.mark.parametrize("seed", range(8))
def test_eve_vector_norms_match_statistics(seed):
    first, second = random_attack(seed, eve_dim=2, photon_cap=2)
    stats, _ = analytic_statistics(first, second)
    vecs = eve_vectors(first, second)
    for i, e in enumerate(stats.e):
        assert vecs.norm2(f"E{i}") == pytest.approx(e, abs=1e-12)
    assert check_lemma1(vecs, stats)


def test_double_click_check_detects_violation():
    first, second = random_attack(1, eve_dim=2, photon_cap=2)
    stats, vecs = analytic_statistics(first, second)
    assert stats.p_double > 0
    broken = ObservedStatistics(**dict(stats.as_dict(), p_double=0.0))
    assert not check_lemma1(vecs, broken)


def test_analytic_statistics_needs_isometry():
    first, second = build_depolarizing_attack(NoiseChannelSpec(0.1, 0.1))
    from mirrorsqkd.adversary import SecondAttack

    with pytest.raises(ValueError):
        analytic_statistics(first, SecondAttack(2.0 * np.asarray(second.action)))


def test_counts_shape_and_total():
    first, second = build_depolarizing_attack(NoiseChannelSpec(0.1, 0.1))
    counts = monte_carlo_counts(first, second, 10_000, seed=3)
    assert counts.shape == (4, 2, 4, 4)
    assert counts.sum() == 10_000


def test_monte_carlo_is_deterministic_in_seed_and_workers():
    first, second = build_depolarizing_attack(NoiseChannelSpec(0.1, 0.1))
    n = 200_000
    a = monte_carlo_counts(first, second, n, seed=5, workers=1)
    b = monte_carlo_counts(first, second, n, seed=5, workers=3)
    c = monte_carlo_counts(first, second, n, seed=6)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)


def test_monte_carlo_rejects_zero_rounds():
    first, second = build_depolarizing_attack(NoiseChannelSpec(0.1, 0.1))
    with pytest.raises(ValueError):
        monte_carlo_counts(first, second, 0)


def test_monte_carlo_agrees_with_analytic_on_random_attack():
    first, second = random_attack(4, eve_dim=2, photon_cap=2)
    exact, _ = analytic_statistics(first, second)
    mc, err = monte_carlo_statistics(first, second, 400_000, seed=1)
    for name in FIELDS:
        assert abs(getattr(mc, name) - getattr(exact, name)) <= 5 * err[name], name


def test_empty_tally_gives_zero_with_unit_error():
    stats, err = statistics_from_counts(np.zeros((4, 2, 4, 4), dtype=np.int64))
    assert stats.e00 == 0.0 and err["e00"] == 1.0
