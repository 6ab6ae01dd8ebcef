"""Model dispatch and budget sweeps."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np

from .linear import LinearNEFamily, solve_linear
from .model import Equilibrium, GameSpec, ModelKind, SecGameError
from .product import ACCEPT_TOL, solve_product
from .proportion import solve_proportion
from .validation import check_grid, check_spec


def solve(
    spec: GameSpec,
    *,
    tol: float = ACCEPT_TOL,
    method: str = "auto",
    probability_cap: bool = True,
) -> tuple[Equilibrium, LinearNEFamily | None]:
    """Equilibrium of any supported model; the linear game also returns its family."""
    if spec.model is ModelKind.PRODUCT:
        return solve_product(spec, tol=tol), None
    if spec.model is ModelKind.PROPORTION:
        return solve_proportion(spec, method=method, tol=tol), None
    fam = solve_linear(spec, probability_cap=probability_cap)
    return fam.representative, fam


class SweepAxis(str, enum.Enum):
    ATTACKER = "BudgetAttacker"
    DEFENDER = "BudgetDefender"
    BOTH = "Both"


class SweepOutput(str, enum.Enum):
    NE = "NE"
    UTILITIES = "Utilities"
    DUALS = "Duals"
    DOMAIN = "Domain"


@dataclass(frozen=True, eq=False)
class SweepRequest:
    spec: GameSpec
    axis: SweepAxis
    range: tuple[float, float, int]
    outputs: tuple[SweepOutput, ...] = tuple(SweepOutput)
    range_defender: tuple[float, float, int] | None = None
    probability_cap: bool = True
    method: str = "auto"

    def grid(self) -> list[tuple[float, ...]]:
        """Budget points in row order: attacker values outermost."""
        main = check_grid(*self.range)
        if self.axis is SweepAxis.BOTH:
            other = check_grid(*(self.range_defender or self.range))
            return [(float(a), float(b)) for a in main for b in other]
        return [(float(v),) for v in main]

    def columns(self) -> list[str]:
        if self.axis is SweepAxis.ATTACKER:
            cols = ["budget_attacker"]
        elif self.axis is SweepAxis.DEFENDER:
            cols = ["budget_defender"]
        else:
            cols = ["budget_attacker", "budget_defender"]
        out = set(self.outputs)
        n = self.spec.n
        if SweepOutput.DUALS in out:
            cols += ["lambda", "rho"]
        if SweepOutput.NE in out:
            cols += ["k_attacker", "k_defender"]
        if SweepOutput.DOMAIN in out:
            cols += ["domain"]
        if SweepOutput.UTILITIES in out:
            cols += ["utility_attacker", "utility_defender"]
        if SweepOutput.NE in out:
            cols += [f"x_{i + 1}" for i in range(n)] + [f"y_{i + 1}" for i in range(n)]
        return cols + ["error"]

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> SweepRequest:
        known = {"spec", "axis", "range", "range_defender", "outputs", "probability_cap", "method"}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown sweep request keys: {sorted(unknown)}")
        cap = bool(data.get("probability_cap", True))
        lo, hi, steps = data["range"]
        rd = data.get("range_defender")
        check_grid(float(lo), float(hi), int(steps))
        if rd is not None:
            check_grid(float(rd[0]), float(rd[1]), int(rd[2]))
        return cls(
            spec=check_spec(data["spec"], probability_cap=cap),
            axis=SweepAxis(data["axis"]),
            range=(float(lo), float(hi), int(steps)),
            outputs=tuple(SweepOutput(o) for o in data.get("outputs", [o.value for o in SweepOutput])),
            range_defender=None if rd is None else (float(rd[0]), float(rd[1]), int(rd[2])),
            probability_cap=cap,
            method=str(data.get("method", "auto")),
        )


def _point_spec(req: SweepRequest, point: tuple[float, ...]) -> GameSpec:
    if req.axis is SweepAxis.ATTACKER:
        return req.spec.with_budgets(budget_attacker=point[0])
    if req.axis is SweepAxis.DEFENDER:
        return req.spec.with_budgets(budget_defender=point[0])
    return req.spec.with_budgets(point[0], point[1])


def run_sweep(req: SweepRequest, *, tol: float = ACCEPT_TOL) -> tuple[list[str], list[list[Any]]]:
    """One row per grid point; failures are recorded in the ``error`` column."""
    cols = req.columns()
    rows = []
    n = req.spec.n
    for point in req.grid():
        values: dict[str, Any] = {c: "" for c in cols}
        keys = cols[: len(point)]
        values.update(dict(zip(keys, point)))
        try:
            spec = _point_spec(req, point)
            eq, _ = solve(spec, tol=tol, method=req.method, probability_cap=req.probability_cap)
        except (SecGameError, ValueError) as exc:
            values["error"] = f"{type(exc).__name__}: {exc}"
        else:
            values.update(
                {
                    "lambda": eq.lam,
                    "rho": eq.rho,
                    "k_attacker": eq.k_attacker,
                    "k_defender": eq.k_defender,
                    "domain": eq.budget_domain.value,
                    "utility_attacker": eq.utility_attacker,
                    "utility_defender": eq.utility_defender,
                }
            )
            values.update({f"x_{i + 1}": float(eq.x[i]) for i in range(n)})
            values.update({f"y_{i + 1}": float(eq.y[i]) for i in range(n)})
        rows.append([values[c] for c in cols])
    return cols, rows


def sweep_matrix(spec: GameSpec, budgets: np.ndarray, **kw) -> np.ndarray:
    """Numeric sweep: rows ``lambda, rho, K_A, K_D, U_A, U_D, x.., y..``; NaN on failure."""
    budgets = np.atleast_2d(np.asarray(budgets, dtype=float))
    n = spec.n
    out = np.full((len(budgets), 6 + 2 * n), math.nan)
    for r, (X, Y) in enumerate(budgets):
        try:
            eq, _ = solve(spec.with_budgets(float(X), float(Y)), **kw)
        except (SecGameError, ValueError):
            continue
        out[r] = [eq.lam, eq.rho, eq.k_attacker, eq.k_defender, eq.utility_attacker, eq.utility_defender, *eq.x, *eq.y]
    return out
