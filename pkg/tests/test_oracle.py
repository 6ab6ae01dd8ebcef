import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from corpus import linear_spec, power_spec, single_target
from secgame import Allocation, EfficiencyFunction as E, GameSpec, ModelKind, NotFound, solve
from secgame.model import make_equilibrium
from secgame.oracle import (
    BRMethod,
    Player,
    best_response,
    best_response_dynamics,
    brute_force_ne,
    epsilon_nash_check,
    player_utility,
    random_deviation_check,
    random_feasible_allocation,
    uniqueness_probe,
)

METHODS = list(BRMethod)


class TestBestResponse:
    @pytest.mark.parametrize("method", METHODS)
    def test_attacker_against_no_defence(self, method, frozen):
        br = best_response(Player.ATTACKER, [0.0], single_target(), method=method)
        tol = 1e-4 if method is BRMethod.GRID_REFINE else 1e-7
        assert br.alloc[0] == pytest.approx(frozen["undefended_x"], abs=tol)
        assert br.method is method

    @pytest.mark.parametrize("method", METHODS)
    def test_defender_against_no_attack(self, method):
        spec = GameSpec((2.0, 1.0), 0.3, 0.2, 5, 5, ModelKind.PRODUCT, E.exp_attack(), E.inv_g(1.0))
        br = best_response(Player.DEFENDER, [0.0, 0.0], spec, method=method)
        assert br.alloc.tolist() == [0.0, 0.0]

    def test_zero_budget(self):
        br = best_response(Player.ATTACKER, [0.3], single_target(), budget=0.0)
        assert br.alloc.tolist() == [0.0] and br.utility == 0.0

    def test_opponent_shape_checked(self):
        with pytest.raises(ValueError):
            best_response(Player.ATTACKER, [0.0, 0.0], single_target())

    @pytest.mark.parametrize(
        "spec",
        [
            GameSpec((2.0, 1.5, 0.5), 0.3, 0.2, 1.0, 0.7, ModelKind.PRODUCT, E.exp_attack(), E.quad_g(0.8)),
            power_spec(w=(3.0, 2.0, 1.0), X=0.8, Y=0.4, a=0.6),
            linear_spec(0.6, 0.4, w=(10.0, 5.0, 2.0)),
        ],
    )
    @pytest.mark.parametrize("player", list(Player))
    def test_beats_random_alternatives(self, spec, player):
        rng = np.random.default_rng(7)
        opp_alloc = random_feasible_allocation(spec, rng)
        opp = opp_alloc.y if player is Player.ATTACKER else opp_alloc.x
        for method in METHODS:
            br = best_response(player, opp, spec, method=method)
            assert br.utility == pytest.approx(player_utility(spec, player, br.alloc, opp), abs=1e-12)
            budget = spec.budget_attacker if player is Player.ATTACKER else spec.budget_defender
            assert br.alloc.min() >= 0 and br.alloc.sum() <= budget + 1e-9
            for _ in range(50):
                alt = random_feasible_allocation(spec, rng)
                own = alt.x if player is Player.ATTACKER else alt.y
                assert player_utility(spec, player, own, opp) <= br.utility + 1e-9

    def test_methods_agree(self):
        spec = power_spec(w=(3.0, 2.0, 1.0), X=0.8, Y=0.4, a=0.6)
        opp = np.array([0.2, 0.1, 0.05])
        us = [best_response(Player.ATTACKER, opp, spec, method=m).utility for m in METHODS]
        assert np.ptp(us) <= 1e-6


class TestEpsilonNash:
    def test_solver_output_passes(self):
        spec = GameSpec((2.0, 1.5, 0.5), 0.3, 0.2, 1.0, 0.7, ModelKind.PRODUCT, E.exp_attack(), E.quad_g(0.8))
        eq, _ = solve(spec)
        rep = epsilon_nash_check(spec, eq, methods=METHODS)
        assert rep.passed, rep.to_dict()

    def test_perturbation_detected(self):
        spec = single_target()
        eq, _ = solve(spec)
        bad = make_equilibrium(spec, eq.x + 0.1, eq.y, 0.0, 0.0)
        rep = epsilon_nash_check(spec, bad)
        assert rep.eps_attacker > 1e-4
        assert "epsilon_nash" in rep.failures

    def test_origin_when_priced_out(self):
        spec = single_target(c=1.2)
        rep = epsilon_nash_check(spec, Allocation.zeros(1))
        assert rep.passed

    def test_report_dict(self):
        spec = single_target()
        d = epsilon_nash_check(spec, solve(spec)[0]).to_dict()
        assert d["passed"] is True
        assert {i["name"] for i in d["invariants"]} >= {"feasible", "epsilon_nash", "kkt_residual"}

    def test_proportion_ordering_violation_named(self):
        spec = power_spec(X=0.3, Y=0.6)
        rep = epsilon_nash_check(spec, Allocation(np.array([0.1, 0.2]), np.array([0.4, 0.2])))
        assert "lemma7_ordering" in rep.failures

    @settings(max_examples=25, deadline=None)
    @given(
        x=st.lists(st.floats(0.01, 0.3), min_size=2, max_size=2),
        y=st.lists(st.floats(0.01, 0.3), min_size=2, max_size=2),
        a=st.floats(0.4, 1.0),
    )
    def test_swapped_roles_mirror(self, x, y, a):
        # matched Power with equal prices and budgets: the defender's problem is the attacker's mirrored
        spec = power_spec(c=0.8, ch=0.8, X=1.0, Y=1.0, a=a)
        x, y = np.array(x), np.array(y)
        r1 = epsilon_nash_check(spec, Allocation(x, y), lemmas=False)
        r2 = epsilon_nash_check(spec, Allocation(y, x), lemmas=False)
        assert r1.eps_attacker == pytest.approx(r2.eps_defender, abs=1e-9)
        assert r1.eps_defender == pytest.approx(r2.eps_attacker, abs=1e-9)


class TestDynamics:
    def test_start_at_equilibrium(self):
        spec = single_target(X=0.3, Y=0.1)
        eq, _ = solve(spec)
        traj, ok = best_response_dynamics(spec, eq.alloc)
        assert ok and len(traj) <= 3

    def test_converges_to_solver(self):
        spec = GameSpec((2.0, 1.5), 0.3, 0.2, 0.5, 0.4, ModelKind.PRODUCT, E.exp_attack(), E.inv_g(1.0))
        eq, _ = solve(spec)
        rng = np.random.default_rng(3)
        traj, ok = best_response_dynamics(spec, random_feasible_allocation(spec, rng))
        assert ok
        end = traj[-1]
        assert max(np.abs(end.x - eq.x).max(), np.abs(end.y - eq.y).max()) <= 1e-6

    def test_boundary_family_may_stall(self):
        spec = linear_spec(0.1, 1.0)
        traj, ok = best_response_dynamics(spec, Allocation(np.array([0.05, 0.05]), np.array([0.5, 0.5])), max_iters=50)
        assert isinstance(ok, bool) and len(traj) >= 2

    def test_uniqueness_probe(self):
        ends, spread = uniqueness_probe(power_spec(X=0.3, Y=0.6), starts=4)
        assert len(ends) == 4 and spread <= 1e-6


class TestBruteForce:
    def test_single_target(self, frozen):
        a = brute_force_ne(single_target(), 1e-3)
        assert np.concatenate([a.x, a.y]) == pytest.approx(frozen["single_target_ne"], abs=2e-3)

    def test_linear_case1(self, frozen):
        a = brute_force_ne(linear_spec(0.2, 1.0), 1e-3)
        ref = frozen["linear"]["case1"]
        assert np.abs(a.x - ref["x"]).max() <= 2e-3 and np.abs(a.y - ref["y"]).max() <= 2e-3

    def test_dominant_cost(self):
        a = brute_force_ne(single_target(c=1.2), 1e-3)
        assert a.x.tolist() == [0.0] and a.y.tolist() == [0.0]

    def test_not_found_at_impossible_tolerance(self):
        with pytest.raises(NotFound):
            brute_force_ne(single_target(), 1e-2, eps=1e-15)

    def test_limits(self):
        with pytest.raises(ValueError):
            brute_force_ne(single_target(), 1e-4)
        spec = power_spec(w=(4.0, 3.0, 2.0, 1.0))
        with pytest.raises(ValueError):
            brute_force_ne(spec)


def test_random_deviations():
    spec = power_spec(w=(3.0, 2.0, 1.0), X=0.8, Y=0.4, a=0.6)
    eq, _ = solve(spec)
    name, ok, _ = random_deviation_check(spec, eq, np.random.default_rng(0))
    assert name == "random_deviations" and ok
