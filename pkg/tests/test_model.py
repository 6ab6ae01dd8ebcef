import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from corpus import linear_spec, power_spec, single_target
from secgame import (
    Allocation,
    DomainError,
    EfficiencyFunction as E,
    GameSpec,
    ModelKind,
    RangeError,
    RIDClass,
    eval_eff,
    eval_eff_prime,
    inv_eff_prime,
    rid_class,
    utilities,
    validate_spec,
)
from secgame.model import breach_probability, recover_duals


class TestEvalEff:
    def test_exp_attack_zero(self):
        assert eval_eff(E.exp_attack(), 0.0) == 0.0

    def test_exp_g_half_at_ln2(self, frozen):
        assert eval_eff(E.exp_g(1.0), frozen["exp_g_inverse"]) == pytest.approx(0.5, abs=1e-15)

    def test_inv_g_one_at_zero(self):
        assert eval_eff(E.inv_g(2.0), 0.0) == 1.0

    def test_array_in_array_out(self):
        out = eval_eff(E.power(0.5), np.array([0.0, 4.0]))
        assert isinstance(out, np.ndarray)
        np.testing.assert_allclose(out, [0.0, 2.0])

    def test_negative_argument_rejected(self):
        with pytest.raises(DomainError):
            eval_eff(E.exp_attack(), -0.1)

    def test_quad_g_domain_edge(self):
        with pytest.raises(DomainError):
            eval_eff(E.quad_g(2.0), 0.5)

    def test_power_exponent_bounds(self):
        with pytest.raises(ValueError):
            E.power(1.5)


class TestDerivative:
    def test_exp_attack_at_zero(self):
        assert eval_eff_prime(E.exp_attack(), 0.0) == 1.0

    def test_quad_g(self):
        assert eval_eff_prime(E.quad_g(0.5), 1.0) == pytest.approx(-0.5)

    def test_power(self):
        assert eval_eff_prime(E.power(0.5), 4.0) == pytest.approx(0.25)


FAMILIES = [
    E.exp_attack(),
    E.exp_attack(1.0),
    E.exp_attack(2.5),
    E.inv_g(0.7),
    E.exp_g(1.3),
    E.quad_g(0.5),
    E.power(0.5),
    E.power(1.0),
]


@settings(max_examples=60, deadline=None)
@given(fam=st.sampled_from(FAMILIES), z=st.floats(0.01, 1.9))
def test_derivative_matches_finite_difference(fam, z):
    h = 1e-6
    fd = (eval_eff(fam, z + h) - eval_eff(fam, z - h)) / (2 * h)
    d = eval_eff_prime(fam, z)
    assert abs(fd - d) <= 1e-5 * (1 + abs(d))


@settings(max_examples=60, deadline=None)
@given(fam=st.sampled_from([f for f in FAMILIES if not (f.family.value == "Power" and f.a == 1.0)]), z=st.floats(0.0, 1.9))
def test_inverse_derivative_roundtrip(fam, z):
    if fam.family.value == "Power" and z == 0.0:
        return
    v = eval_eff_prime(fam, z)
    assert inv_eff_prime(fam, v) == pytest.approx(z, abs=1e-8, rel=1e-8)


class TestInverse:
    def test_clamps_at_origin(self):
        assert inv_eff_prime(E.exp_attack(), 1.0) == 0.0

    def test_exp_attack(self):
        assert inv_eff_prime(E.exp_attack(), 0.5) == pytest.approx(math.log(2), abs=1e-15)

    def test_exp_g(self, frozen):
        assert inv_eff_prime(E.exp_g(1.0), -0.5) == pytest.approx(frozen["exp_g_inverse"], abs=1e-15)

    def test_sign_checked(self):
        with pytest.raises(RangeError):
            inv_eff_prime(E.exp_g(1.0), 0.5)
        with pytest.raises(RangeError):
            inv_eff_prime(E.exp_attack(), -0.5)

    def test_linear_has_no_inverse(self):
        with pytest.raises(RangeError):
            inv_eff_prime(E.linear(), 1.0)


class TestRID:
    @pytest.mark.parametrize(
        "fam,label",
        [(E.inv_g(1.0), RIDClass.INCREASING), (E.exp_g(1.0), RIDClass.CONSTANT), (E.quad_g(1.0), RIDClass.DECREASING)],
    )
    def test_labels(self, fam, label):
        assert rid_class(fam) is label

    @pytest.mark.parametrize("fam", [E.inv_g(0.8), E.exp_g(0.8), E.quad_g(0.8)])
    def test_label_matches_sampled_ratio(self, fam):
        y = np.linspace(0.0, 0.95 / fam.theta, 20)
        ratio = eval_eff_prime(fam, y) / eval_eff(fam, y)
        d = np.diff(ratio)
        label = rid_class(fam)
        if label is RIDClass.INCREASING:
            assert np.all(d > 0)
        elif label is RIDClass.CONSTANT:
            assert np.allclose(d, 0.0, atol=1e-12)
        else:
            assert np.all(d < 0)

    def test_attack_family_rejected(self):
        with pytest.raises(ValueError):
            rid_class(E.exp_attack())


class TestUtilities:
    def test_zero_allocation(self):
        spec = single_target()
        assert utilities(spec, Allocation.zeros(1)) == (0.0, 0.0)

    def test_linear_arithmetic(self):
        spec = linear_spec(0.1, 0.5, w=(10.0,))
        u_a, u_d = utilities(spec, Allocation(np.array([0.1]), np.array([0.5])))
        assert u_a == pytest.approx(0.4, abs=1e-15)
        assert u_d == pytest.approx(-1.0, abs=1e-15)

    def test_linear_matches_matrix_expectation(self):
        # mixed 2x2 matrix: rows attack / no attack, columns monitor / not
        w, c, ch, x, y = 10.0, 1.0, 1.0, 0.1, 0.5
        ua_m = np.array([[-c, w - c], [0.0, 0.0]])
        ud_m = np.array([[-ch, -w], [-ch, 0.0]])
        px, py = np.array([x, 1 - x]), np.array([y, 1 - y])
        spec = linear_spec(x, y, w=(w,))
        u_a, u_d = utilities(spec, Allocation(np.array([x]), np.array([y])))
        assert u_a == pytest.approx(px @ ua_m @ py)
        assert u_d == pytest.approx(px @ ud_m @ py)

    def test_proportion_half_probability(self):
        spec = power_spec()
        alloc = Allocation(np.array([0.5, 0.25]), np.array([0.5, 0.25]))
        np.testing.assert_allclose(breach_probability(spec, alloc.x, alloc.y), 0.5)
        # loss 2*0.5 + 1*0.5 = 1.5, spend 0.75 each
        assert utilities(spec, alloc) == pytest.approx((0.75, -2.25), abs=1e-15)

    def test_proportion_origin_convention(self):
        spec = power_spec()
        assert breach_probability(spec, np.zeros(2), np.zeros(2)).tolist() == [0.0, 0.0]


class TestValidate:
    def test_unsorted_weights(self):
        spec = GameSpec((5.0, 10.0), 0.1, 0.1, 1.0, 1.0, ModelKind.PRODUCT, E.exp_attack(), E.exp_g(1.0))
        assert any("weights not descending" in v for v in validate_spec(spec))

    def test_linear_non_triviality(self):
        spec = linear_spec(0.2, 0.2, w=(10.0, 5.0), c=5.0)
        assert any("non-triviality w_i > c fails" in v for v in validate_spec(spec))

    def test_valid(self):
        assert validate_spec(single_target()) == []
        assert validate_spec(linear_spec(0.2, 1.0)) == []

    def test_probability_cap(self):
        spec = linear_spec(0.5, 1.8)
        assert validate_spec(spec)
        assert validate_spec(spec, probability_cap=False) == []

    def test_family_mismatch(self):
        spec = GameSpec((1.0,), 0.1, 0.1, 1.0, 1.0, ModelKind.PRODUCT, E.power(0.5), E.exp_g(1.0))
        assert any("attack family" in v for v in validate_spec(spec))

    def test_quad_g_needs_defence_cost(self):
        spec = GameSpec((1.0,), 0.1, 0.0, 1.0, 1.0, ModelKind.PRODUCT, E.exp_attack(), E.quad_g(1.0))
        assert any("QuadG" in v for v in validate_spec(spec))


class TestSerialization:
    def test_roundtrip(self):
        spec = GameSpec((2.0, 1.0), 0.3, 0.2, 1.0, 2.0, ModelKind.PRODUCT, E.exp_attack(1.5), E.quad_g(0.4))
        assert GameSpec.from_dict(spec.to_dict()) == spec

    def test_linear_defaults(self):
        data = {"weights": [10, 5], "cost_attacker": 1, "cost_defender": 1, "budget_attacker": 0.2,
                "budget_defender": 1, "model": "LinearMatrix", "gamma": 0.1}
        assert GameSpec.from_dict(data) == linear_spec(0.2, 1.0, gamma=0.1)

    def test_unknown_key(self):
        data = single_target().to_dict()
        data["extra"] = 1
        with pytest.raises(ValueError):
            GameSpec.from_dict(data)


def test_recover_duals_single_target(frozen):
    ref = frozen["single_target_d2"]
    spec = single_target(0.3, 0.2, X=0.3, Y=10.0)
    lam, rho = recover_duals(spec, Allocation(np.array([ref["x"]]), np.array([ref["y"]])))
    assert lam == pytest.approx(ref["lambda"], abs=1e-12)
    assert rho == pytest.approx(0.0, abs=1e-12)
