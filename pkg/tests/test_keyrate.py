from math import log2, sqrt

import numpy as np
import pytest

from mirrorsqkd.keyrate import (
    DegenerateStatisticsError,
    binary_entropy,
    build_constraints,
    conditional_entropy_ab,
    key_rate,
    minimize_sae,
    sae_bound,
    shannon_entropy,
)
from mirrorsqkd.scenarios import ScenarioConfig, closed_form_statistics
from mirrorsqkd.stats import ObservedStatistics


def brute_force_sae(stats, n=1201):
    """Minimum of the entropy bound over a dense 2-D grid of the constraint set."""
    e0, e1, e2, e3 = stats.e
    cons = build_constraints(stats)
    a = np.linspace(-cons.cs_bound_03, cons.cs_bound_03, n)[:, None]
    b = np.linspace(-cons.cs_bound_12, cons.cs_bound_12, n)[None, :]

    def term(ea, eb, re):
        w = ea + eb
        lam = np.minimum(0.5 + np.sqrt((ea - eb) ** 2 + 4 * re**2) / (2 * w), 1.0)
        h = np.vectorize(binary_entropy)
        return w / stats.m_total * (binary_entropy(ea / w) - h(lam))

    s = term(e0, e3, a) + term(e1, e2, b)
    s = np.where(a + b >= cons.sum_lower_bound - 1e-12, s, np.inf)
    return float(s.min())


def test_binary_entropy_values():
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    assert binary_entropy(0.5) == pytest.approx(1.0)
    assert binary_entropy(0.11) == pytest.approx(0.49992, abs=1e-5)


def test_binary_entropy_domain():
    with pytest.raises(ValueError):
        binary_entropy(1.2)


def test_shannon_entropy_uniform():
    assert shannon_entropy([0.25] * 4) == pytest.approx(2.0)


def test_zero_noise_rate_is_one():
    r = key_rate(closed_form_statistics(ScenarioConfig(qz=0.0)))
    assert r.rate == pytest.approx(1.0, abs=1e-12)
    assert r.h_a_given_b == 0.0
    assert r.feasible


@pytest.mark.parametrize("q", [0.01, 0.03, 0.05, 0.08, 0.1])
def test_dependent_rate_matches_bb84_form(q):
    # with Qx = Qz the bound collapses to the one-way BB84 rate 1 - 2 H2(Q)
    r = key_rate(closed_form_statistics(ScenarioConfig(qz=q)))
    assert r.rate == pytest.approx(1.0 - 2.0 * binary_entropy(q), abs=1e-7)


@pytest.mark.parametrize("q", [0.02, 0.05, 0.09])
def test_minimizer_agrees_with_brute_force(q):
    stats = closed_form_statistics(ScenarioConfig(model="independent", qz=q))
    got = minimize_sae(stats).sae_lower
    assert got == pytest.approx(brute_force_sae(stats), abs=2e-4)
    assert got <= brute_force_sae(stats) + 1e-9


def test_frozen_rate_at_five_percent():
    r = key_rate(closed_form_statistics(ScenarioConfig(qz=0.05)))
    assert r.rate == pytest.approx(0.4272060857680875, abs=1e-9)
    assert r.lambda1 == pytest.approx(0.95)


def test_argmin_satisfies_constraints():
    stats = closed_form_statistics(ScenarioConfig(model="independent", qz=0.06))
    r = key_rate(stats)
    cons = build_constraints(stats)
    assert r.argmin_re03 + r.argmin_re12 >= cons.sum_lower_bound - 1e-9
    assert abs(r.argmin_re03) <= cons.cs_bound_03 + 1e-12
    assert abs(r.argmin_re12) <= cons.cs_bound_12 + 1e-12


def test_sae_bound_limits():
    stats = closed_form_statistics(ScenarioConfig(qz=0.1))
    cons = build_constraints(stats)
    # orthogonal Eve states leave Eve fully informed; parallel ones leave her nothing
    assert sae_bound(stats, 0.0, 0.0) == pytest.approx(0.0, abs=1e-15)
    assert sae_bound(stats, cons.cs_bound_03, cons.cs_bound_12) == pytest.approx(1.0)


def test_conditional_entropy_symmetric_errors():
    stats = closed_form_statistics(ScenarioConfig(qz=0.2))
    assert conditional_entropy_ab(stats) == pytest.approx(binary_entropy(0.2))


def test_infeasible_statistics_flagged():
    # a perfect CTRL record paired with maximally noisy raw key cannot come from any attack
    stats = ObservedStatistics(
        e00=0.125, e01=0.125, e10=0.125, e11=0.125, m_total=0.5,
        p0_plus=0.0, p1_plus=0.0, p_plus_plus=1.0, p_ctrl_0=0.0, p_ctrl_1=0.0,
        p_double=0.0, p_create_0=0.0, p_create_1=0.0,
    )
    r = key_rate(stats)
    assert not r.feasible
    assert np.isnan(r.rate)


def test_no_raw_key_is_degenerate():
    stats = ObservedStatistics(*([0.0] * 13))
    with pytest.raises(DegenerateStatisticsError):
        key_rate(stats)


def test_grid_too_small():
    with pytest.raises(ValueError):
        minimize_sae(closed_form_statistics(ScenarioConfig(qz=0.1)), grid_points=2)


def test_scale_invariance_single_case():
    stats = closed_form_statistics(ScenarioConfig(model="independent", qz=0.04))
    a, b = key_rate(stats).rate, key_rate(stats.scaled(0.3)).rate
    assert a == pytest.approx(b, abs=1e-10)
