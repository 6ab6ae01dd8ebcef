import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from corpus import power_spec, solved_corpus
from secgame import (
    BudgetDomain,
    DualPair,
    EfficiencyFunction as E,
    GameSpec,
    ModelKind,
    kkt_residual,
    per_target_solve_proportion,
    proportion_utility_sensitivity,
    solve_proportion,
)
from secgame.model import breach_probability
from secgame.proportion import (
    attacker_best_response_a1,
    d2_lambda_residual,
    d4_power_closed_form,
    matched_power,
    total_demand,
)


class TestPerTarget:
    def test_unconstrained_a1(self, frozen):
        x, y = per_target_solve_proportion(0, DualPair(), power_spec())
        assert (x, y) == pytest.approx((frozen["proportion"]["d1_a1"]["x"][0],) * 2, abs=1e-14)

    @pytest.mark.parametrize("method", ["auto", "numeric"])
    def test_price_ratio(self, method):
        x, y = per_target_solve_proportion(0, DualPair(1.0, 0.0), power_spec(), method=method)
        assert y / x == pytest.approx(2.0, rel=1e-9)

    @pytest.mark.parametrize("a", [0.3, 0.5, 0.8, 1.0])
    def test_symmetric_costs(self, a):
        x, y = per_target_solve_proportion(1, DualPair(), power_spec(c=0.7, ch=0.7, a=a), method="numeric")
        assert x == pytest.approx(y, rel=1e-9)

    def test_closed_form_d1_a05(self, frozen):
        spec = GameSpec((3.0, 2.0, 1.0), 0.5, 1.5, 50, 50, ModelKind.PROPORTION, E.power(0.5), E.power(0.5))
        xs = [per_target_solve_proportion(i, DualPair(), spec)[0] for i in range(3)]
        np.testing.assert_allclose(xs, frozen["proportion"]["d1_a05"], atol=1e-14)


class TestSolve:
    def test_d1(self, frozen):
        eq = solve_proportion(power_spec())
        ref = frozen["proportion"]["d1_a1"]
        np.testing.assert_allclose(eq.x, ref["x"], atol=1e-14)
        np.testing.assert_allclose(eq.y, ref["y"], atol=1e-14)
        assert (eq.lam, eq.rho, eq.budget_domain) == (0.0, 0.0, BudgetDomain.D1)
        assert eq.utility_attacker == pytest.approx(0.75, abs=1e-14)

    def test_d4(self, frozen):
        spec = power_spec(X=0.3, Y=0.6)
        eq = solve_proportion(spec)
        ref = frozen["proportion"]["d4_a1"]
        assert eq.budget_domain is BudgetDomain.D4
        np.testing.assert_allclose(eq.x, ref["x"], atol=1e-14)
        np.testing.assert_allclose(eq.y, ref["y"], atol=1e-14)
        np.testing.assert_allclose(breach_probability(spec, eq.x, eq.y), 1 / 3, atol=1e-14)

    def test_d4_closed_form_matches_numeric(self):
        for a in (1.0, 0.75, 0.5):
            spec = power_spec(X=0.1, Y=0.2, a=a)
            x, y, _ = d4_power_closed_form(spec)
            eq = solve_proportion(spec, method="numeric")
            assert np.abs(eq.x - x).max() <= 1e-8 and np.abs(eq.y - y).max() <= 1e-8

    def test_d2_lambda(self, frozen):
        spec = power_spec(X=0.3, Y=10.0)
        eq = solve_proportion(spec)
        assert eq.budget_domain is BudgetDomain.D2
        assert eq.lam == pytest.approx(frozen["proportion"]["d2_lambda_a1"], abs=1e-10)
        assert abs(d2_lambda_residual(spec, eq.lam)) <= 1e-8

    def test_d3_mirrors_d2(self):
        d2 = solve_proportion(power_spec(c=1.0, ch=1.0, X=0.3, Y=10.0))
        d3 = solve_proportion(power_spec(c=1.0, ch=1.0, X=10.0, Y=0.3))
        assert d3.budget_domain is BudgetDomain.D3
        np.testing.assert_allclose(d3.x, d2.y, atol=1e-12)
        np.testing.assert_allclose(d3.y, d2.x, atol=1e-12)
        assert d3.rho == pytest.approx(d2.lam, abs=1e-10)

    @pytest.mark.parametrize(
        "attack,defence",
        [(E.power(0.6), E.power(0.9)), (E.exp_attack(), E.inv_g(1.0)), (E.exp_attack(1.0), E.exp_g(0.7)), (E.power(0.5), E.quad_g(0.5))],
    )
    @pytest.mark.parametrize("budgets", [(20.0, 20.0), (0.2, 20.0), (20.0, 0.2), (0.2, 0.2)])
    def test_general_families(self, attack, defence, budgets):
        spec = GameSpec((2.0, 1.5, 0.7), 0.6, 0.4, *budgets, ModelKind.PROPORTION, attack, defence)
        eq = solve_proportion(spec)
        assert kkt_residual(spec, eq) <= 1e-9
        assert np.all(eq.x > 0) and np.all(eq.y > 0)

    def test_auto_and_numeric_agree(self):
        for X, Y in ((20, 20), (0.3, 20), (20, 0.3), (0.3, 0.3)):
            spec = power_spec(w=(3.0, 2.0, 1.0), c=0.5, ch=1.5, X=X, Y=Y, a=0.5)
            a = solve_proportion(spec)
            b = solve_proportion(spec, method="numeric")
            assert a.budget_domain is b.budget_domain
            np.testing.assert_allclose(a.x, b.x, atol=1e-9)
            np.testing.assert_allclose(a.y, b.y, atol=1e-9)

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            solve_proportion(power_spec(), method="magic")


def test_matched_power():
    assert matched_power(power_spec(a=0.5)) == 0.5
    spec = GameSpec((1.0,), 1, 1, 1, 1, ModelKind.PROPORTION, E.power(0.5), E.power(0.7))
    assert matched_power(spec) is None


def test_demand_decreases_with_price():
    spec = power_spec(a=0.5)
    demand = [total_demand(DualPair(lam, 0.0), spec)[0] for lam in np.linspace(0, 3, 10)]
    assert np.all(np.diff(demand) < 0)


def test_best_response_a1():
    w, g = np.array([2.0, 1.0]), np.array([0.5, 0.25])
    np.testing.assert_allclose(attacker_best_response_a1(w, g, 1.0), [0.5, 0.25])


class TestSensitivity:
    def test_cheap_attacker_always_gains(self):
        spec = power_spec(c=0.5, ch=1.0, Y=10.0)
        tab = proportion_utility_sensitivity(spec, np.linspace(0.05, 0.6, 15))
        assert set(tab.domain) == {"D2"}
        assert np.all(np.diff(tab.utility_attacker) >= 0)
        assert np.all(tab.dua_dlam <= 0)

    def test_expensive_attacker_can_lose(self):
        spec = power_spec(c=1.0, ch=0.5, Y=10.0)
        tab = proportion_utility_sensitivity(spec, np.linspace(0.4, 0.6, 8))
        assert np.all(tab.lam < 0.5)
        assert np.all(np.diff(tab.utility_attacker) < 0)

    def test_defender_loses(self):
        spec = power_spec(c=1.0, ch=0.5, Y=10.0)
        tab = proportion_utility_sensitivity(spec, np.linspace(0.05, 0.6, 12))
        assert np.all(np.diff(tab.utility_defender) < 0)

    def test_rows(self):
        tab = proportion_utility_sensitivity(power_spec(Y=10.0), [0.1, 0.2])
        assert len(tab.rows()) == 2 and len(tab.rows()[0]) == len(tab.columns)

    def test_needs_matched_power(self):
        spec = GameSpec((1.0,), 1, 1, 1, 1, ModelKind.PROPORTION, E.exp_attack(), E.inv_g(1.0))
        with pytest.raises(ValueError):
            proportion_utility_sensitivity(spec, [0.1])


PROP = [(s, e) for s, e in solved_corpus() if s.model is ModelKind.PROPORTION]


@pytest.mark.parametrize("spec,eq", PROP)
def test_full_support_and_weight_ordering(spec, eq):
    assert np.all(eq.x > 1e-12) and np.all(eq.y > 1e-12)
    assert np.all(np.diff(eq.x) < 0) and np.all(np.diff(eq.y) < 0)
    p = breach_probability(spec, eq.x, eq.y)
    assert np.all((p > 0) & (p < 1))


@settings(max_examples=30, deadline=None)
@given(
    a=st.floats(0.3, 1.0),
    c=st.floats(0.1, 2.0),
    ch=st.floats(0.1, 2.0),
    X=st.floats(0.02, 5.0),
    Y=st.floats(0.02, 5.0),
)
def test_random_power_instances(a, c, ch, X, Y):
    spec = power_spec(w=(3.0, 1.5, 1.0), c=c, ch=ch, X=X, Y=Y, a=a)
    eq = solve_proportion(spec)
    assert kkt_residual(spec, eq) <= 1e-6
