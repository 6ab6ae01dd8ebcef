"""Unique equilibrium of the product-form game (strictly concave efficiencies).

Given shadow prices ``(lam, rho)`` every target decouples into a
two-player problem whose solution is the clamped fixed point of

    x = h_A((c + lam) / (w g~(y))),    y = h_D(-(rho + c^) / (w f(x))).

The prices themselves are found by bisection on the binding budgets,
following the support enumeration order ``K_A = N..1``, ``K_D = K_A..0``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from ._roots import bisect_decreasing
from .model import (
    BudgetDomain,
    ConvergenceError,
    Equilibrium,
    GameSpec,
    InfeasibleSpec,
    ModelKind,
    NoEquilibriumFound,
    eval_eff,
    eval_eff_prime,
    inv_eff_prime,
    make_equilibrium,
    marginals,
    validate_spec,
)

log = logging.getLogger(__name__)

INNER_MAX_ITER = 10_000
ACCEPT_TOL = 1e-6


@dataclass(frozen=True)
class DualPair:
    lam: float = 0.0
    rho: float = 0.0

    def __post_init__(self) -> None:
        if self.lam < 0 or self.rho < 0:
            raise ValueError("shadow prices must be nonnegative")


@dataclass(frozen=True)
class BudgetDomainReport:
    domain: BudgetDomain
    x_suf: float
    y_suf: float
    x_hat_suf: float | None = None
    y_hat_suf: float | None = None


def _undefended_x(spec: GameSpec, i: int, lam: float) -> float:
    price = spec.cost_attacker + lam
    if price <= 0:
        return math.inf
    g0 = eval_eff(spec.defence_eff, 0.0)
    return inv_eff_prime(spec.attack_eff, price / (spec.weights[i] * g0))


def _defender_reply(spec: GameSpec, i: int, x: float, rho: float) -> float:
    price = spec.cost_defender + rho
    fx = eval_eff(spec.attack_eff, x) if math.isfinite(x) else 1.0
    if fx <= 0:
        return 0.0
    if price <= 0:
        return math.inf
    return inv_eff_prime(spec.defence_eff, -price / (spec.weights[i] * fx))


def per_target_point(
    i: int, duals: DualPair, spec: GameSpec, defended: bool = True
) -> tuple[float, float]:
    """Equilibrium ``(x_i, y_i)`` of target ``i`` at fixed shadow prices.

    With ``defended=False`` the defender is held at ``y_i = 0``.
    """
    x_cap = _undefended_x(spec, i, duals.lam)
    if x_cap == 0.0:
        return 0.0, 0.0
    if not defended:
        return x_cap, 0.0
    if not math.isfinite(x_cap):
        return x_cap, _defender_reply(spec, i, x_cap, duals.rho)
    if spec.cost_defender + duals.rho <= 0:
        return 0.0, math.inf

    w = spec.weights[i]
    price = spec.cost_attacker + duals.lam

    def gap(x: float) -> float:
        y = _defender_reply(spec, i, x, duals.rho)
        gt = eval_eff(spec.defence_eff, y) if math.isfinite(y) else 0.0
        if gt <= 0:
            return -x
        return inv_eff_prime(spec.attack_eff, price / (w * gt)) - x

    if gap(x_cap) >= 0:
        x = x_cap
    else:
        try:
            x = brentq(gap, 0.0, x_cap, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=INNER_MAX_ITER)
        except RuntimeError as exc:
            raise ConvergenceError(f"per-target fixed point failed on target {i}") from exc
    return x, _defender_reply(spec, i, x, duals.rho)


def allocation_at(
    duals: DualPair, spec: GameSpec, k_a: int | None = None, k_d: int | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Allocation with targets ``< k_d`` defended, ``< k_a`` attacked, rest zero."""
    n = spec.n
    k_a = n if k_a is None else k_a
    k_d = k_a if k_d is None else k_d
    x = np.zeros(n)
    y = np.zeros(n)
    for i in range(k_a):
        x[i], y[i] = per_target_point(i, duals, spec, defended=i < k_d)
    return x, y


def total_demand(duals: DualPair, k_a: int, k_d: int, spec: GameSpec) -> tuple[float, float]:
    if not 0 <= k_d <= k_a <= spec.n:
        raise ValueError("support sizes must satisfy 0 <= k_d <= k_a <= n")
    x, y = allocation_at(duals, spec, k_a, k_d)
    return float(x.sum()), float(y.sum())


def lambda_upper(spec: GameSpec) -> float:
    """Attacker price above which nobody is attacked."""
    g0 = eval_eff(spec.defence_eff, 0.0)
    f0 = eval_eff_prime(spec.attack_eff, 0.0)
    return max(0.0, spec.weights[0] * f0 * g0 - spec.cost_attacker)


def rho_upper(spec: GameSpec, lam: float) -> float:
    """Defender price above which no target is defended at attacker price ``lam``."""
    gp0 = -eval_eff_prime(spec.defence_eff, 0.0)
    best = 0.0
    for i in range(spec.n):
        xc = _undefended_x(spec, i, lam)
        fx = eval_eff(spec.attack_eff, xc) if math.isfinite(xc) else 1.0
        best = max(best, spec.weights[i] * fx * gp0 - spec.cost_defender)
    return best


def _solve_lambda(spec: GameSpec, k_a: int, k_d: int, rho: float = 0.0) -> float:
    return bisect_decreasing(
        lambda lam: total_demand(DualPair(lam, rho), k_a, k_d, spec)[0],
        spec.budget_attacker,
        0.0,
        lambda_upper(spec),
    )


def _solve_rho(spec: GameSpec, k_a: int, k_d: int, lam: float = 0.0) -> float:
    return bisect_decreasing(
        lambda rho: total_demand(DualPair(lam, rho), k_a, k_d, spec)[1],
        spec.budget_defender,
        0.0,
        rho_upper(spec, lam),
    )


def rho_attacker_binding(spec: GameSpec, lam: float, k_a: int | None = None, k_d: int | None = None) -> float:
    """``rho`` keeping the attacker budget exactly spent at price ``lam``; NaN if none exists."""
    k_a = spec.n if k_a is None else k_a
    k_d = k_a if k_d is None else k_d
    hi = rho_upper(spec, lam)
    xs = lambda rho: total_demand(DualPair(lam, rho), k_a, k_d, spec)[0]  # noqa: E731
    X = spec.budget_attacker
    if xs(0.0) > X or xs(hi) < X:
        return math.nan
    # attacker demand grows with rho
    return bisect_decreasing(lambda rho: -xs(rho), -X, 0.0, hi)


def rho_defender_binding(spec: GameSpec, lam: float, k_a: int | None = None, k_d: int | None = None) -> float:
    """``rho`` keeping the defender budget exactly spent at price ``lam``; NaN if none exists."""
    k_a = spec.n if k_a is None else k_a
    k_d = k_a if k_d is None else k_d
    if total_demand(DualPair(lam, 0.0), k_a, k_d, spec)[1] < spec.budget_defender:
        return math.nan
    return _solve_rho(spec, k_a, k_d, lam)


def dual_curves(spec: GameSpec, lambdas: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sample both binding curves ``rho1(lam)`` (attacker) and ``rho2(lam)`` (defender)."""
    r1 = np.array([rho_attacker_binding(spec, float(l)) for l in lambdas])
    r2 = np.array([rho_defender_binding(spec, float(l)) for l in lambdas])
    return r1, r2


def _solve_both(spec: GameSpec, k_a: int, k_d: int) -> DualPair:
    # Bisect lam on the sign of rho2(lam) - rho1(lam): attacker demand along
    # the defender-binding curve falls as lam rises.
    def demand(lam: float) -> float:
        rho = _solve_rho(spec, k_a, k_d, lam)
        return total_demand(DualPair(lam, rho), k_a, k_d, spec)[0]

    lam = bisect_decreasing(demand, spec.budget_attacker, 0.0, lambda_upper(spec))
    return DualPair(lam, _solve_rho(spec, k_a, k_d, lam))


def classify_budget_domain(spec: GameSpec) -> BudgetDomainReport:
    """Place ``(X_A, Y_D)`` in one of the four sufficiency domains."""
    n = spec.n
    X, Y = spec.budget_attacker, spec.budget_defender
    x_suf, y_suf = total_demand(DualPair(), n, n, spec)
    if X >= x_suf and Y >= y_suf:
        return BudgetDomainReport(BudgetDomain.D1, x_suf, y_suf)
    y_hat = x_hat = None
    if X < x_suf:
        lam = _solve_lambda(spec, n, n)
        y_hat = total_demand(DualPair(lam, 0.0), n, n, spec)[1]
    if Y < y_suf:
        rho = _solve_rho(spec, n, n)
        x_hat = total_demand(DualPair(0.0, rho), n, n, spec)[0]
    if X < x_suf and Y >= y_hat:
        dom = BudgetDomain.D2
    elif Y < y_suf and X >= x_hat:
        dom = BudgetDomain.D3
    else:
        dom = BudgetDomain.D4
    return BudgetDomainReport(dom, x_suf, y_suf, x_hat, y_hat)


def kkt_residual(spec: GameSpec, eq: Equilibrium) -> float:
    """Largest violation of the stationarity, sign and slackness conditions.

    Works for every model; marginals are taken from the game's breaching model.
    """
    x, y = eq.x, eq.y
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        return math.inf
    lam, rho = eq.lam, eq.rho
    m_a, m_d = marginals(spec, x, y)
    r_a = np.where(x > 0, np.abs(m_a - lam), np.maximum(0.0, m_a - lam))
    r_d = np.where(y > 0, np.abs(m_d - rho), np.maximum(0.0, m_d - rho))
    sx, sy = float(x.sum()), float(y.sum())
    parts = [
        float(np.max(r_a, initial=0.0)),
        float(np.max(r_d, initial=0.0)),
        lam * abs(spec.budget_attacker - sx),
        rho * abs(spec.budget_defender - sy),
        max(0.0, sx - spec.budget_attacker),
        max(0.0, sy - spec.budget_defender),
        max(0.0, -float(x.min(initial=0.0))),
        max(0.0, -float(y.min(initial=0.0))),
        max(0.0, -lam),
        max(0.0, -rho),
    ]
    return max(parts)


def _supports_fig1(n: int):
    for k_a in range(n, 0, -1):
        for k_d in range(k_a, -1, -1):
            yield k_a, k_d


def solve_product(spec: GameSpec, *, tol: float = ACCEPT_TOL, check: bool = True) -> Equilibrium:
    """Unique equilibrium of a product-form instance."""
    if check:
        problems = validate_spec(spec)
        if problems:
            raise InfeasibleSpec(problems)
    if spec.model is not ModelKind.PRODUCT:
        raise ValueError(f"solve_product needs a ProductForm spec, got {spec.model.value}")
    report = classify_budget_domain(spec)
    n = spec.n
    if report.domain is BudgetDomain.D1:
        x, y = allocation_at(DualPair(), spec)
        return make_equilibrium(spec, x, y, 0.0, 0.0, BudgetDomain.D1)

    last_res = math.inf
    for k_a, k_d in _supports_fig1(n):
        try:
            if report.domain is BudgetDomain.D2:
                duals = DualPair(_solve_lambda(spec, k_a, k_d), 0.0)
            elif report.domain is BudgetDomain.D3:
                duals = DualPair(0.0, _solve_rho(spec, k_a, k_d))
            else:
                duals = _solve_both(spec, k_a, k_d)
        except ConvergenceError as exc:
            log.debug("support (%d, %d) rejected: %s", k_a, k_d, exc)
            continue
        x, y = allocation_at(duals, spec, k_a, k_d)
        eq = make_equilibrium(spec, x, y, duals.lam, duals.rho, report.domain)
        res = kkt_residual(spec, eq)
        last_res = min(last_res, res)
        if res <= tol and np.all(x >= 0) and np.all(y >= 0):
            return eq
        log.debug("support (%d, %d) rejected: residual %.3g", k_a, k_d, res)
    raise NoEquilibriumFound(f"no support pair satisfies the KKT system (best residual {last_res:.3g})")


