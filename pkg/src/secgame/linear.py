"""Closed-form equilibria of the matrix-form intrusion detection game.

Attack and detection probabilities enter linearly, so the game is concave
but not strictly concave: best responses are step functions and on two
families of budget boundaries a whole segment of equilibria exists.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .model import (
    Equilibrium,
    GameSpec,
    InfeasibleSpec,
    ModelKind,
    Multiplicity,
    UnhandledBudgetPoint,
    make_equilibrium,
    recover_duals,
    validate_spec,
    Allocation,
)
from .product import kkt_residual

BOUNDARY_TOL = 1e-12
CLOSED_FORM_TOL = 1e-9


class FamilyKind(str, enum.Enum):
    INTERIOR = "Interior"
    ATTACKER_BOUNDARY = "AttackerBoundary"
    DEFENDER_BOUNDARY = "DefenderBoundary"


@dataclass(frozen=True, eq=False)
class ThresholdTable:
    """Budget breakpoints; ``p_attacker[k]`` is P_A(k) for k=0..N and
    ``p_defender[k-1]`` is P_D(k) for k=1..N+1."""

    p_attacker: np.ndarray
    p_defender: np.ndarray

    def pa(self, k: int) -> float:
        return float(self.p_attacker[k])

    def pd(self, k: int) -> float:
        return float(self.p_defender[k - 1])


@dataclass(frozen=True, eq=False)
class LinearNEFamily:
    kind: FamilyKind
    k: int
    case: int
    representative: Equilibrium
    spec: GameSpec
    free_interval: tuple[float, float] | None = None


def thresholds(spec: GameSpec) -> ThresholdTable:
    w = spec.w
    gbar = 1.0 - spec.gamma
    pa = np.concatenate([[0.0], np.cumsum(spec.cost_defender / (w * gbar))])
    n = spec.n
    pd = np.empty(n + 1)
    for k in range(1, n + 1):
        pd[k - 1] = np.sum(1.0 - w[k - 1] / w[: k - 1]) / gbar
    pd[n] = n / gbar - np.sum(spec.cost_attacker / (w * gbar))
    return ThresholdTable(pa, pd)


def _gbar(spec: GameSpec) -> float:
    return 1.0 - spec.gamma


def case1(spec: GameSpec, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Attacker short of budget, spills onto target k+1 (0 <= k <= N-1)."""
    w, gb, n = spec.w, _gbar(spec), spec.n
    x, y = np.zeros(n), np.zeros(n)
    x[:k] = spec.cost_defender / (w[:k] * gb)
    # budget exhaustion over the support keeps the 1/(1-gamma) factor
    x[k] = spec.budget_attacker - float(np.sum(x[:k]))
    y[:k] = (1.0 - w[k] / w[:k]) / gb
    return x, y


def case2(spec: GameSpec, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Both budgets spent on the top k targets (1 <= k <= N)."""
    w, gb, n = spec.w, _gbar(spec), spec.n
    s = np.sum(1.0 / w[:k])
    x, y = np.zeros(n), np.zeros(n)
    x[:k] = spec.budget_attacker / (w[:k] * s)
    y[:k] = (spec.budget_defender - k / gb) / (w[:k] * s) + 1.0 / gb
    return x, y


def case3(spec: GameSpec) -> tuple[np.ndarray, np.ndarray]:
    w, gb = spec.w, _gbar(spec)
    return spec.cost_defender / (w * gb), 1.0 / gb - spec.cost_attacker / (w * gb)


def case4(spec: GameSpec, k: int, y_used: float) -> tuple[np.ndarray, np.ndarray]:
    """Attacker budget exactly P_A(k); defender spends ``y_used``."""
    w, gb, n = spec.w, _gbar(spec), spec.n
    s = np.sum(1.0 / w[:k])
    x, y = np.zeros(n), np.zeros(n)
    x[:k] = spec.cost_defender / (w[:k] * gb)
    y[:k] = 1.0 / gb + (y_used - k / gb) / (w[:k] * s)
    return x, y


def case5(spec: GameSpec, k: int, x_top: float) -> tuple[np.ndarray, np.ndarray]:
    """Defender budget exactly P_D(k) (2 <= k <= N).

    The attacker puts ``x_top`` on the k-1 defended targets and the rest of
    the budget on the undefended target k.
    """
    w, gb, n = spec.w, _gbar(spec), spec.n
    m = k - 1
    s = np.sum(1.0 / w[:m])
    x, y = np.zeros(n), np.zeros(n)
    x[:m] = x_top / (w[:m] * s)
    x[m] = spec.budget_attacker - x_top
    y[:m] = (1.0 - w[m] / w[:m]) / gb
    return x, y


def _clean(v: np.ndarray) -> np.ndarray:
    # closed forms can land a hair below zero on exact boundaries
    return np.where(np.abs(v) < 1e-15, 0.0, v)


def _equilibrium(spec, x, y, multiplicity=Multiplicity.UNIQUE, free_interval=None) -> Equilibrium:
    x, y = _clean(x), _clean(y)
    lam, rho = recover_duals(spec, Allocation(x, y))
    return make_equilibrium(spec, x, y, lam, rho, multiplicity=multiplicity, free_interval=free_interval)


def _ok(spec: GameSpec, eq: Equilibrium) -> bool:
    return bool(np.all(eq.x >= 0) and np.all(eq.y >= 0)) and kkt_residual(spec, eq) <= CLOSED_FORM_TOL


def solve_linear(
    spec: GameSpec, *, boundary_tol: float = BOUNDARY_TOL, probability_cap: bool = True
) -> LinearNEFamily:
    """Identify the budget case and return its equilibrium (or family of them)."""
    problems = validate_spec(spec, probability_cap=probability_cap)
    if problems:
        raise InfeasibleSpec(problems)
    if spec.model is not ModelKind.LINEAR:
        raise ValueError(f"solve_linear needs a LinearMatrix spec, got {spec.model.value}")
    t = thresholds(spec)
    n = spec.n
    X, Y = spec.budget_attacker, spec.budget_defender

    for k in range(1, n + 1):
        if abs(X - t.pa(k)) <= boundary_tol and Y >= t.pd(k) - boundary_tol:
            lo, hi = t.pd(k), min(Y, t.pd(k + 1))
            rep = _equilibrium(spec, *case4(spec, k, 0.5 * (lo + hi)), Multiplicity.BOUNDARY_FAMILY, (lo, hi))
            return LinearNEFamily(FamilyKind.ATTACKER_BOUNDARY, k, 4, rep, spec, (lo, hi))
    for k in range(2, n + 1):
        if abs(Y - t.pd(k)) <= boundary_tol and t.pa(k - 1) - boundary_tol <= X <= t.pa(k) + boundary_tol:
            lo, hi = t.pa(k - 1), X
            rep = _equilibrium(spec, *case5(spec, k, 0.5 * (lo + hi)), Multiplicity.BOUNDARY_FAMILY, (lo, hi))
            return LinearNEFamily(FamilyKind.DEFENDER_BOUNDARY, k, 5, rep, spec, (lo, hi))

    if X > t.pa(n) and Y > t.pd(n + 1):
        return LinearNEFamily(FamilyKind.INTERIOR, n, 3, _equilibrium(spec, *case3(spec)), spec)
    for k in range(0, n):
        if t.pa(k) < X < t.pa(k + 1) and Y > t.pd(k + 1):
            return LinearNEFamily(FamilyKind.INTERIOR, k, 1, _equilibrium(spec, *case1(spec, k)), spec)
    for k in range(1, n + 1):
        if t.pd(k) < Y < t.pd(k + 1) and X > t.pa(k):
            return LinearNEFamily(FamilyKind.INTERIOR, k, 2, _equilibrium(spec, *case2(spec, k)), spec)

    # Points on a case boundary that is not a multiplicity boundary: the
    # neighbouring closed form stays valid with weak inequalities.
    candidates = [(3, n, case3(spec))]
    candidates += [(1, k, case1(spec, k)) for k in range(n)]
    candidates += [(2, k, case2(spec, k)) for k in range(1, n + 1)]
    for case, k, (x, y) in candidates:
        eq = _equilibrium(spec, x, y)
        if _ok(spec, eq):
            return LinearNEFamily(FamilyKind.INTERIOR, k, case, eq, spec)
    raise UnhandledBudgetPoint(f"(X_A, Y_D) = ({X:g}, {Y:g}) matches no closed-form case")


def family_member(family: LinearNEFamily, parameter: float) -> Equilibrium:
    spec = family.spec
    if family.kind is FamilyKind.ATTACKER_BOUNDARY:
        x, y = case4(spec, family.k, parameter)
    elif family.kind is FamilyKind.DEFENDER_BOUNDARY:
        x, y = case5(spec, family.k, parameter)
    else:
        raise ValueError("interior families have no free parameter")
    return _equilibrium(spec, x, y, Multiplicity.BOUNDARY_FAMILY, family.free_interval)


def enumerate_boundary_nes(family: LinearNEFamily, samples: int) -> list[Equilibrium]:
    """``samples`` equally spaced members of a boundary family."""
    if family.kind is FamilyKind.INTERIOR:
        raise ValueError("interior families have no free parameter")
    if samples < 1:
        raise ValueError("samples must be positive")
    lo, hi = family.free_interval
    params = np.linspace(lo, hi, samples) if samples > 1 else np.array([0.5 * (lo + hi)])
    return [family_member(family, float(p)) for p in params]


def boundary_parameters(family: LinearNEFamily, samples: int) -> np.ndarray:
    lo, hi = family.free_interval
    return np.linspace(lo, hi, samples)
