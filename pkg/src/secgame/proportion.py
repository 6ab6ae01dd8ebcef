"""Unique equilibrium of the proportion-form (contest) game.

Breaching probability is ``f(x) / (f(x) + g(y))``. Both players spread over
every target, so there is no support enumeration: the solver only has to
find the shadow prices. Matched power families ``f = x^a``, ``g = y^a``
admit closed forms; everything else goes through nested 1-D root finding.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from ._roots import bracket_root, root_decreasing
from .model import (
    BudgetDomain,
    ConvergenceError,
    Equilibrium,
    Family,
    GameSpec,
    InfeasibleSpec,
    ModelKind,
    defence_gain,
    defence_gain_prime,
    eval_eff,
    eval_eff_prime,
    make_equilibrium,
    validate_spec,
)
from .product import ACCEPT_TOL, BudgetDomainReport, DualPair, kkt_residual

_TINY = 1e-300
_RTOL = 4 * np.finfo(float).eps


def matched_power(spec: GameSpec) -> float | None:
    """Common exponent ``a`` when both efficiencies are ``Power`` with the same ``a``."""
    f, g = spec.attack_eff, spec.defence_eff
    if f.family is Family.POWER and g.family is Family.POWER and f.a == g.a:
        return float(f.a)
    return None


def _power_point(w: float, a: float, price_a: float, price_d: float) -> tuple[float, float]:
    if price_a <= 0 or price_d <= 0:
        return math.inf, math.inf
    r = price_a / price_d
    ra = r**a
    x = w * a * ra / ((1.0 + ra) ** 2 * price_a)
    return x, r * x


def _defender_reply(spec: GameSpec, w: float, x: float, price_d: float) -> float:
    fx = eval_eff(spec.attack_eff, x)
    if fx <= 0:
        return 0.0
    if price_d <= 0:
        return math.inf
    g = spec.defence_eff

    def foc(y: float) -> float:
        return w * fx * defence_gain_prime(g, y) / (fx + defence_gain(g, y)) ** 2 - price_d

    f0 = foc(0.0)
    if f0 <= 0:
        return 0.0
    upper = g.domain_upper
    if upper is not None:
        hi = upper * (1.0 - 1e-12)
    else:
        hi = 1.0
        while foc(hi) > 0:
            hi *= 2.0
            if hi > 1e300:
                raise ConvergenceError("defender reply unbounded")
    lo = 0.0 if math.isfinite(f0) else min(_TINY, hi)
    return brentq(foc, lo, hi, xtol=1e-15, rtol=_RTOL, maxiter=1000)


def _general_point(spec: GameSpec, w: float, price_a: float, price_d: float) -> tuple[float, float]:
    if price_a <= 0:
        return math.inf, math.inf
    f, g = spec.attack_eff, spec.defence_eff

    def foc(x: float) -> float:
        y = _defender_reply(spec, w, x, price_d)
        fx = eval_eff(f, x)
        return w * eval_eff_prime(f, x) * defence_gain(g, y) / (fx + defence_gain(g, y)) ** 2 - price_a

    lo, hi = bracket_root(foc, 1.0, 1.0, max_grow=1000)
    x = brentq(foc, lo, hi, xtol=1e-15, rtol=_RTOL, maxiter=1000)
    return x, _defender_reply(spec, w, x, price_d)


def _log_residuals(spec: GameSpec, w, x, y, price_a: float, price_d: float):
    """Log-ratio of each player's marginal to its price; zero at the target equilibrium."""
    g_fam = spec.defence_eff
    upper = g_fam.domain_upper
    bad = ~(np.isfinite(x) & np.isfinite(y) & (x > 0) & (y > 0))
    if upper is not None:
        bad |= y >= upper
    xs = np.where(bad, 1.0, x)
    ys = np.where(bad, 0.5 * upper if upper is not None else 1.0, y)
    f = eval_eff(spec.attack_eff, xs)
    fp = eval_eff_prime(spec.attack_eff, xs)
    g = defence_gain(g_fam, ys)
    gp = defence_gain_prime(g_fam, ys)
    den = (f + g) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        r1 = np.log(w * fp * g / den) - math.log(price_a)
        r2 = np.log(w * f * gp / den) - math.log(price_d)
    r1 = np.where(bad | ~np.isfinite(r1), np.inf, r1)
    r2 = np.where(bad | ~np.isfinite(r2), np.inf, r2)
    return r1, r2


def _newton_points(
    spec: GameSpec, w: np.ndarray, price_a: float, price_d: float, *, max_iter: int = 100, tol: float = 1e-13
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Damped Newton on ``(log x, log y)`` for all targets at once.

    Started from the ``a = 1`` power closed form; the step is halved while
    the residual grows. Returns ``x, y`` and a convergence mask.
    """
    r = price_a / price_d
    u = np.log(w * r / ((1.0 + r) ** 2 * price_a))
    v = u + math.log(r)
    upper = spec.defence_eff.domain_upper
    if upper is not None:
        v = np.minimum(v, math.log(0.5 * upper))
    h = 1e-7
    r1, r2 = _log_residuals(spec, w, np.exp(u), np.exp(v), price_a, price_d)
    norm = np.maximum(np.abs(r1), np.abs(r2))
    for _ in range(max_iter):
        done = norm <= tol
        if np.all(done):
            break
        a1, a2 = _log_residuals(spec, w, np.exp(u + h), np.exp(v), price_a, price_d)
        b1, b2 = _log_residuals(spec, w, np.exp(u), np.exp(v + h), price_a, price_d)
        j11, j21 = (a1 - r1) / h, (a2 - r2) / h
        j12, j22 = (b1 - r1) / h, (b2 - r2) / h
        det = j11 * j22 - j12 * j21
        with np.errstate(invalid="ignore", divide="ignore"):
            du = -(j22 * r1 - j12 * r2) / det
            dv = -(-j21 * r1 + j11 * r2) / det
        ok = np.isfinite(du) & np.isfinite(dv) & ~done
        du = np.where(ok, np.clip(du, -5.0, 5.0), 0.0)
        dv = np.where(ok, np.clip(dv, -5.0, 5.0), 0.0)
        t = np.ones_like(u)
        for _ in range(40):
            n1, n2 = _log_residuals(spec, w, np.exp(u + t * du), np.exp(v + t * dv), price_a, price_d)
            new_norm = np.maximum(np.abs(n1), np.abs(n2))
            worse = ok & ~(new_norm < norm)
            if not np.any(worse):
                break
            t = np.where(worse, 0.5 * t, t)
        accept = ok & (new_norm < norm)
        if not np.any(accept):
            break
        u = np.where(accept, u + t * du, u)
        v = np.where(accept, v + t * dv, v)
        r1, r2 = np.where(accept, n1, r1), np.where(accept, n2, r2)
        norm = np.where(accept, new_norm, norm)
    return np.exp(u), np.exp(v), norm <= tol


def _numeric_points(spec: GameSpec, duals: DualPair) -> tuple[np.ndarray, np.ndarray]:
    price_a = spec.cost_attacker + duals.lam
    price_d = spec.cost_defender + duals.rho
    w = spec.w
    if price_a <= 0 or price_d <= 0:
        return np.full(spec.n, math.inf), np.full(spec.n, math.inf)
    x, y, conv = _newton_points(spec, w, price_a, price_d)
    for i in np.flatnonzero(~conv):
        x[i], y[i] = _general_point(spec, float(w[i]), price_a, price_d)
    return x, y


def per_target_solve_proportion(
    i: int, duals: DualPair, spec: GameSpec, *, method: str = "auto"
) -> tuple[float, float]:
    """Per-target equilibrium ``(x_i, y_i)`` at fixed shadow prices."""
    x, y = allocation_at(duals, spec, method)
    return float(x[i]), float(y[i])


def allocation_at(duals: DualPair, spec: GameSpec, method: str = "auto") -> tuple[np.ndarray, np.ndarray]:
    """Per-target equilibria at fixed shadow prices, all targets at once."""
    if method not in ("auto", "numeric"):
        raise ValueError(f"unknown method {method!r}")
    a = matched_power(spec)
    if method == "auto" and a is not None:
        pts = [
            _power_point(w, a, spec.cost_attacker + duals.lam, spec.cost_defender + duals.rho)
            for w in spec.weights
        ]
        return np.array([p[0] for p in pts]), np.array([p[1] for p in pts])
    return _numeric_points(spec, duals)


def total_demand(duals: DualPair, spec: GameSpec, method: str = "auto") -> tuple[float, float]:
    x, y = allocation_at(duals, spec, method)
    return float(x.sum()), float(y.sum())


def _lambda_for(spec: GameSpec, rho: float, method: str) -> float:
    return root_decreasing(lambda lam: total_demand(DualPair(lam, rho), spec, method)[0], spec.budget_attacker)


def _rho_for(spec: GameSpec, lam: float, method: str) -> float:
    return root_decreasing(lambda rho: total_demand(DualPair(lam, rho), spec, method)[1], spec.budget_defender)


def classify_budget_domain(spec: GameSpec, method: str = "auto") -> BudgetDomainReport:
    X, Y = spec.budget_attacker, spec.budget_defender
    x_suf, y_suf = total_demand(DualPair(), spec, method)
    if X >= x_suf and Y >= y_suf:
        return BudgetDomainReport(BudgetDomain.D1, x_suf, y_suf)
    x_hat = y_hat = None
    if X < x_suf:
        y_hat = total_demand(DualPair(_lambda_for(spec, 0.0, method), 0.0), spec, method)[1]
    if Y < y_suf:
        x_hat = total_demand(DualPair(0.0, _rho_for(spec, 0.0, method)), spec, method)[0]
    if X < x_suf and Y >= y_hat:
        dom = BudgetDomain.D2
    elif Y < y_suf and X >= x_hat:
        dom = BudgetDomain.D3
    else:
        dom = BudgetDomain.D4
    return BudgetDomainReport(dom, x_suf, y_suf, x_hat, y_hat)


def d4_power_closed_form(spec: GameSpec) -> tuple[np.ndarray, np.ndarray, DualPair]:
    """Both budgets spent in proportion to the weights, with the implied prices."""
    a = matched_power(spec)
    if a is None:
        raise ValueError("closed form needs matched Power efficiencies")
    w = spec.w
    W = float(w.sum())
    X, Y = spec.budget_attacker, spec.budget_defender
    r = Y / X
    ra = r**a
    price_a = W * a * ra / ((1.0 + ra) ** 2 * X)
    price_d = price_a / r
    duals = DualPair(max(price_a - spec.cost_attacker, 0.0), max(price_d - spec.cost_defender, 0.0))
    return w * X / W, w * Y / W, duals


def d2_lambda_residual(spec: GameSpec, lam: float) -> float:
    """Scalar D2 condition for matched power families (zero at the equilibrium price)."""
    a = matched_power(spec)
    if a is None:
        raise ValueError("D2 equation needs matched Power efficiencies")
    c, ch = spec.cost_attacker, spec.cost_defender
    lhs = (1.0 + ((c + lam) / ch) ** a) ** 2 * ch**a * (c + lam) ** (1.0 - a) * spec.budget_attacker
    return lhs - float(spec.w.sum()) * a


def solve_proportion(spec: GameSpec, *, method: str = "auto", tol: float = ACCEPT_TOL, check: bool = True) -> Equilibrium:
    """Unique equilibrium of a proportion-form instance.

    ``method="numeric"`` ignores the power-family closed forms.
    """
    if check:
        problems = validate_spec(spec)
        if problems:
            raise InfeasibleSpec(problems)
    if spec.model is not ModelKind.PROPORTION:
        raise ValueError(f"solve_proportion needs a ProportionForm spec, got {spec.model.value}")
    report = classify_budget_domain(spec, method)
    dom = report.domain
    if dom is BudgetDomain.D4 and method == "auto" and matched_power(spec) is not None:
        x, y, duals = d4_power_closed_form(spec)
    else:
        if dom is BudgetDomain.D1:
            duals = DualPair()
        elif dom is BudgetDomain.D2:
            duals = DualPair(_lambda_for(spec, 0.0, method), 0.0)
        elif dom is BudgetDomain.D3:
            duals = DualPair(0.0, _rho_for(spec, 0.0, method))
        else:
            # attacker demand along the defender-binding curve falls with lam
            lam = root_decreasing(
                lambda l: total_demand(DualPair(l, _rho_for(spec, l, method)), spec, method)[0],
                spec.budget_attacker,
            )
            duals = DualPair(lam, _rho_for(spec, lam, method))
        x, y = allocation_at(duals, spec, method)
    eq = make_equilibrium(spec, x, y, duals.lam, duals.rho, dom)
    res = kkt_residual(spec, eq)
    if not res <= tol:
        raise ConvergenceError(f"proportion-form solve left KKT residual {res:.3g}")
    return eq


@dataclass(frozen=True, eq=False)
class SensitivityTable:
    budget_attacker: np.ndarray
    lam: np.ndarray
    utility_attacker: np.ndarray
    utility_defender: np.ndarray
    dua_dlam: np.ndarray
    domain: tuple[str, ...]

    columns = ("budget_attacker", "lambda", "utility_attacker", "utility_defender", "dUA_dlambda", "domain")

    def rows(self) -> list[tuple]:
        return list(
            zip(
                self.budget_attacker.tolist(),
                self.lam.tolist(),
                self.utility_attacker.tolist(),
                self.utility_defender.tolist(),
                self.dua_dlam.tolist(),
                self.domain,
            )
        )


def dua_dlambda(spec: GameSpec, lam: float) -> float:
    """Analytic derivative of the attacker's D2 utility in its own price (``a = 1``)."""
    c, ch = spec.cost_attacker, spec.cost_defender
    s = c + lam + ch
    return float(spec.w.sum()) * ch * (c - lam - ch) / s**3


def proportion_utility_sensitivity(spec: GameSpec, budgets_attacker) -> SensitivityTable:
    """Equilibrium price and utilities across a sweep of attacker budgets."""
    a = matched_power(spec)
    if a is None:
        raise ValueError("sensitivity analysis needs matched Power efficiencies")
    xs = np.asarray(budgets_attacker, dtype=float)
    lam, ua, ud, der, dom = [], [], [], [], []
    for X in xs:
        eq = solve_proportion(spec.with_budgets(budget_attacker=float(X)))
        lam.append(eq.lam)
        ua.append(eq.utility_attacker)
        ud.append(eq.utility_defender)
        ok = a == 1.0 and eq.budget_domain is BudgetDomain.D2
        der.append(dua_dlambda(spec, eq.lam) if ok else math.nan)
        dom.append(eq.budget_domain.value)
    return SensitivityTable(xs, np.array(lam), np.array(ua), np.array(ud), np.array(der), tuple(dom))


def attacker_best_response_a1(w: np.ndarray, g: np.ndarray, price: float) -> np.ndarray:
    """Unconstrained-per-target attacker reply ``sqrt(w g / price) - g`` for ``f(x) = x``."""
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.maximum(np.sqrt(w * g / price) - g, 0.0)
