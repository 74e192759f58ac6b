import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bribery.equilibrium import (
    MenuOffer, Scenario, bureaucrat_objective, entry_threshold, firm_payoff,
    outcome_record, solve_scenario, solve_swc_uncertain, validate_params,
)
from bribery.errors import DegenerateThresholdError, InvalidParametersError
from bribery.oracle import draw_valid_params

REL = 1e-9


def close(a, b, rel=REL):
    return math.isclose(a, b, rel_tol=rel, abs_tol=rel)


# -- validate_params ---------------------------------------------------------

def test_p0_is_valid(p0):
    assert validate_params(p0) == []


def test_large_s_n_violates_ordering(p0):
    names = {v.name: v for v in validate_params(replace(p0, s_N=60))}
    v = names["s_N < (Π_N−M−F_L)²/c"]
    assert v.slack == pytest.approx(49 - 60)


def test_zero_kappa_is_valid(p0):
    q = replace(p0, kappa=0)
    assert validate_params(q) == []
    assert q.lambda_ == 0


@pytest.mark.parametrize("field,value,name", [
    ("M", 90, "pi_N - M - F_L > 0"),
    ("s_P", 0.5, "s_P > s_N"),
    ("theta", 1.5, "theta in [0,1]"),
    ("mu", 0.0, "mu in (0,1]"),
    ("mu", 1.2, "mu in (0,1]"),
    ("t_min", 6.0, "sqrt(c/s_P) >= t_min"),
    ("delta_pi0", 100.0, "U_P(Γ=0) >= M at the screening menu"),
])
def test_each_violation_is_reported(p0, field, value, name):
    assert name in {v.name for v in validate_params(replace(p0, **{field: value}))}


def test_derived_identities(p0):
    assert p0.pi_P0 == 400
    assert p0.pi_P1 == 550
    assert p0.lambda_ * p0.pi_P1 == pytest.approx(p0.kappa * p0.V)


# -- solve_scenario: worked example ---------------------------------------------

def test_ns_worked_example(p0):
    out = solve_scenario(p0, "NS")
    assert out.menu_N == MenuOffer(70.0, 10.0)
    assert out.menu_P0.t == 5.0
    assert close(out.menu_P0.F, 360.0)
    assert close(out.bribe_P, 350.0)
    assert out.phi == 1 and out.bribe_N == 0


def test_sc_worked_example(p0):
    out = solve_scenario(p0, Scenario.SC)
    assert out.menu_P0 == MenuOffer(5.0, 270.0)
    assert close(out.bribe_P, 260.0)
    assert out.phi == 1


def test_swc_worked_example(p0):
    out = solve_scenario(p0, "swc")
    assert p0.pi_P1 == 550
    assert close(p0.lambda_, 50 / 550)
    assert close(out.bribe_P, 330.0)
    assert out.phi == 0 and out.won_contest == 1
    assert out.menu_P0 == out.menu_P1


def test_invalid_params_raise_with_violations(p0):
    with pytest.raises(InvalidParametersError) as err:
        solve_scenario(replace(p0, s_N=60), "SC")
    assert err.value.violations


def test_outcome_fields_consistent(p0):
    for s in Scenario:
        out = solve_scenario(p0, s)
        assert out.eb_N == 0
        assert out.m_N == out.menu_N.t - p0.t_min
        assert out.m_P >= 0 and out.m_N >= 0


def test_outcome_record_is_flat(p0):
    rec = outcome_record(solve_scenario(p0, "SC"))
    assert rec["t_N"] == 70 and rec["F_P0"] == 270 and rec["bribe_P"] == 260
    assert all(not isinstance(v, (dict, list)) for v in rec.values())


# -- uncertain contest --------------------------------------------------------

def test_entry_threshold_p0(p0):
    assert close(entry_threshold(p0), 0.2)


def test_uncertain_win_and_loss(p0):
    assert close(solve_swc_uncertain(p0, won=True).bribe_P, 330.0)
    lost = solve_swc_uncertain(p0, won=False)
    assert close(lost.bribe_P, 280.0)
    assert lost.phi == 0 and lost.won_contest == 0


def test_uncertain_below_threshold_matches_sc(p0):
    out = solve_swc_uncertain(replace(p0, mu=0.1))
    sc = solve_scenario(p0, "SC")
    assert out.phi == 1
    assert close(out.bribe_P, 260.0)
    assert replace(out, scenario=Scenario.SC, mu_star=None) == sc


def test_uncertain_degenerate_threshold(p0):
    with pytest.raises(DegenerateThresholdError):
        solve_swc_uncertain(replace(p0, kappa=0.5))


def test_mu_one_limit_bit_identical(p0):
    a = solve_swc_uncertain(p0, won=True)
    b = solve_scenario(p0, "SwC")
    assert replace(a, mu_star=None) == b


# -- payoffs and objective ------------------------------------------------------

def test_payoffs_worked_example(p0):
    sc = solve_scenario(p0, "SC")
    assert firm_payoff(p0, "P", sc.menu_P0) == pytest.approx(110)
    assert firm_payoff(p0, "N", sc.menu_N) == pytest.approx(20)
    ns = solve_scenario(p0, "NS")
    assert firm_payoff(p0, "P", ns.menu_P0) == pytest.approx(p0.M)


def test_two_period_payoff_subtracts_sunk_cost(p0):
    sc = solve_scenario(p0, "SwC")
    one = firm_payoff(p0, "P", sc.menu_P1, contract=True)
    two = firm_payoff(p0, "P", sc.menu_P1, contract=True, entered=True, two_period=True)
    assert one - two == pytest.approx(p0.g * p0.n_days)


def test_objective_sc_worked_example(p0):
    sc = solve_scenario(p0, "SC")
    assert round(bureaucrat_objective(p0, "SC", sc.menus, 1.0), 3) == 119.286


def test_objective_ns_worked_example(p0):
    ns = solve_scenario(p0, "NS")
    expected = -0.5 * 100 / 70 + 0.5 * (360 - 10 - 20)
    assert bureaucrat_objective(p0, "NS", ns.menus, 1.0) == pytest.approx(expected)


def test_objective_increases_with_t_n(p0):
    menus = dict(solve_scenario(p0, "SC").menus)
    vals = []
    for tN in (10.0, 100.0, 1e4, 1e8):
        menus["N"] = MenuOffer(tN, p0.F_L)
        vals.append(bureaucrat_objective(p0, "SC", menus, 1.0))
    assert np.all(np.diff(vals) > 0)


# -- properties over random parameter draws --------------------------------------

@pytest.fixture(scope="module")
def draws():
    rng = np.random.default_rng(20261016)
    return [draw_valid_params(rng) for _ in range(100)]


def test_binding_constraints(draws):
    for p in draws:
        for s in Scenario:
            out = solve_scenario(p, s)
            assert close(firm_payoff(p, "N", out.menu_N), p.M)
            if s is not Scenario.NS:
                own = p.pi_P0 - p.s_P * out.menu_P0.t - out.menu_P0.F
                mimic = p.pi_P0 - p.s_P * out.menu_N.t - p.F_L
                assert close(own, mimic)
            assert out.menu_N.t > out.menu_P0.t


def test_bribe_gap_identity(draws):
    for p in draws:
        ns, sc = solve_scenario(p, "NS"), solve_scenario(p, "SC")
        expected = p.delta_pi0 - (p.s_P / p.s_N - 1) * p.headroom
        assert math.isclose(ns.bribe_P - sc.bribe_P, expected, rel_tol=REL,
                            abs_tol=REL * p.pi_P1)


def test_swc_decomposition(draws):
    for p in draws:
        gap = solve_scenario(p, "SwC").bribe_P - solve_scenario(p, "SC").bribe_P
        assert math.isclose(gap, p.g * p.n_days + p.lambda_ * p.pi_P1,
                            rel_tol=REL, abs_tol=REL * p.pi_P1)


def test_designed_offers_respect_outside_option(draws):
    for p in draws:
        for s in Scenario:
            out = solve_scenario(p, s)
            assert out.bribe_N == 0
            slack = 1e-9 * p.pi_P1
            assert firm_payoff(p, "N", out.menu_N) >= p.M - slack
            assert firm_payoff(p, "P", out.menu_P0) >= p.M - slack
            assert firm_payoff(p, "P", out.menu_P1, contract=True) >= p.M - slack


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), k=st.floats(0.01, 100.0))
def test_scale_property(seed, k):
    p = draw_valid_params(np.random.default_rng(seed))
    for s in Scenario:
        a, b = solve_scenario(p, s), solve_scenario(p.scaled(k), s)
        assert math.isclose(b.menu_N.t, a.menu_N.t, rel_tol=1e-9)
        assert math.isclose(b.menu_P0.t, a.menu_P0.t, rel_tol=1e-9)
        for name in ("bribe_P", "eb_P", "nbc_P"):
            assert math.isclose(getattr(b, name), k * getattr(a, name),
                                rel_tol=1e-9, abs_tol=1e-9 * k * p.pi_P1)
        assert math.isclose(b.menu_P0.F, k * a.menu_P0.F, rel_tol=1e-9)
