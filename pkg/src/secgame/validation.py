"""Input checking shared by the estimators and the command line."""
from __future__ import annotations

from typing import Any, Mapping

import numpy as np

from .model import Allocation, GameSpec, InfeasibleSpec, validate_spec


def check_spec(spec: GameSpec | Mapping[str, Any], *, probability_cap: bool = True) -> GameSpec:
    """Coerce ``spec`` to a :class:`GameSpec` and raise on any violated assumption."""
    if not isinstance(spec, GameSpec):
        if not isinstance(spec, Mapping):
            raise TypeError(f"expected a GameSpec or a mapping, got {type(spec).__name__}")
        try:
            spec = GameSpec.from_dict(dict(spec))
        except (KeyError, TypeError, ValueError) as exc:
            raise InfeasibleSpec([f"malformed spec: {exc}"]) from exc
    problems = validate_spec(spec, probability_cap=probability_cap)
    if problems:
        raise InfeasibleSpec(problems)
    return spec


def check_allocation(spec: GameSpec, x, y, *, tol: float = 1e-9) -> Allocation:
    """Validate an allocation profile against the game's budgets."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != (spec.n,) or y.shape != (spec.n,):
        raise ValueError(f"allocations must have length {spec.n}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("allocations must be finite")
    alloc = Allocation(x, y)
    if not alloc.is_feasible(spec, tol):
        raise ValueError("allocation violates nonnegativity or a budget")
    return alloc


def check_grid(lo: float, hi: float, steps: int) -> np.ndarray:
    if not (np.isfinite(lo) and np.isfinite(hi)) or not lo < hi:
        raise ValueError(f"range needs lo < hi, got ({lo}, {hi})")
    if int(steps) != steps or steps < 2:
        raise ValueError(f"range needs at least 2 steps, got {steps}")
    return np.linspace(float(lo), float(hi), int(steps))
