"""Seeded randomized instance corpus shared by the acceptance and lemma suites."""
from __future__ import annotations

import functools

import numpy as np

from secgame import DualPair, EfficiencyFunction as E, GameSpec, ModelKind
from secgame.linear import thresholds
from secgame.product import total_demand
from secgame.proportion import total_demand as prop_demand

SEED = 20240611
N_PRODUCT, N_PROPORTION, N_LINEAR = 20, 15, 15
# budget scale per target domain: (attacker factor, defender factor)
_SCALES = {"D1": (1.6, 1.6), "D2": (0.45, 3.0), "D3": (3.0, 0.45), "D4": (0.35, 0.35)}


def _r3(v: float) -> float:
    return max(round(float(v), 3), 0.001)


def _weights(rng, n, lo, hi):
    w = np.sort(rng.uniform(lo, hi, n))[::-1]
    while np.any(np.diff(w) >= -1e-3):
        w = np.sort(rng.uniform(lo, hi, n))[::-1]
    return tuple(round(float(v), 3) for v in w)


def _product(rng, k):
    n = int(rng.integers(1, 4))
    attack = [E.exp_attack(), E.exp_attack(1.0), E.exp_attack(2.0)][int(rng.integers(3))]
    theta = round(float(rng.uniform(0.5, 2.0)), 3)
    defence = [E.inv_g(theta), E.exp_g(theta), E.quad_g(theta)][k % 3]
    base = GameSpec(_weights(rng, n, 0.6, 3.0), round(float(rng.uniform(0.05, 0.4)), 3),
                    round(float(rng.uniform(0.05, 0.4)), 3), 1.0, 1.0, ModelKind.PRODUCT, attack, defence)
    xs, ys = total_demand(DualPair(), n, n, base)
    fa, fd = _SCALES[("D1", "D2", "D3", "D4")[k % 4]]
    return base.with_budgets(_r3(fa * xs), _r3(fd * ys))


def _proportion(rng, k):
    n = int(rng.integers(1, 4))
    kind = k % 3
    if kind == 0:
        a = [1.0, 0.75, 0.5][int(rng.integers(3))]
        attack, defence = E.power(a), E.power(a)
    elif kind == 1:
        attack, defence = E.power(round(float(rng.uniform(0.4, 1.0)), 3)), E.power(round(float(rng.uniform(0.4, 1.0)), 3))
    else:
        attack, defence = E.exp_attack(), E.inv_g(round(float(rng.uniform(0.5, 2.0)), 3))
    base = GameSpec(_weights(rng, n, 0.6, 3.0), round(float(rng.uniform(0.2, 1.0)), 3),
                    round(float(rng.uniform(0.2, 1.0)), 3), 1.0, 1.0, ModelKind.PROPORTION, attack, defence)
    xs, ys = prop_demand(DualPair(), base)
    fa, fd = _SCALES[("D1", "D2", "D3", "D4")[k % 4]]
    return base.with_budgets(_r3(fa * xs), _r3(fd * ys))


def _linear(rng):
    n = int(rng.integers(1, 4))
    w = _weights(rng, n, 2.0, 10.0)
    gamma = round(float(rng.uniform(0.0, 0.5 * min(w) / w[0])), 3)
    lo = gamma * w[0]
    c = round(float(rng.uniform(lo, min(w) * 0.9)), 3)
    while not (lo <= c < min(w)):
        c = round(float(rng.uniform(lo, min(w) * 0.9)), 3)
    ch = round(float(rng.uniform(0.2, 1.5)), 3)
    while True:
        spec = GameSpec.linear_matrix(w, c, ch, _r3(rng.uniform(0.02, 1.0)), _r3(rng.uniform(0.02, 1.0)), gamma)
        t = thresholds(spec)
        gaps = np.concatenate([np.abs(spec.budget_attacker - t.p_attacker), np.abs(spec.budget_defender - t.p_defender)])
        if gaps.min() > 1e-6:
            return spec


def single_target(c=0.3, ch=0.2, X=10.0, Y=10.0):
    """``1 - e^-x`` attack against ``e^-y`` defence on one unit-weight target."""
    return GameSpec((1.0,), c, ch, X, Y, ModelKind.PRODUCT, E.exp_attack(), E.exp_g(1.0))


def power_spec(w=(2.0, 1.0), c=1.0, ch=1.0, X=10.0, Y=10.0, a=1.0):
    return GameSpec(tuple(w), c, ch, X, Y, ModelKind.PROPORTION, E.power(a), E.power(a))


def linear_spec(X, Y, w=(10.0, 5.0), c=1.0, ch=1.0, gamma=0.0):
    return GameSpec.linear_matrix(w, c, ch, X, Y, gamma)


@functools.lru_cache(maxsize=None)
def corpus() -> tuple[GameSpec, ...]:
    rng = np.random.default_rng(SEED)
    specs = [_product(rng, k) for k in range(N_PRODUCT)]
    specs += [_proportion(rng, k) for k in range(N_PROPORTION)]
    specs += [_linear(rng) for _ in range(N_LINEAR)]
    return tuple(specs)


@functools.lru_cache(maxsize=None)
def solved_corpus():
    from secgame.solve import solve

    return tuple((spec, solve(spec)[0]) for spec in corpus())
