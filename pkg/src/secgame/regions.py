"""Per-target regions of the shadow-price plane for the product-form game.

At prices ``(lam, rho)`` a target is abandoned by both players (R1),
attacked but undefended (R2), defended but unattacked (R3) or contested
(R4). Because ``f(0) = 0`` a target nobody attacks is never worth
defending, so R3 is always empty.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .model import GameSpec, ModelKind, eval_eff, eval_eff_prime, inv_eff_prime
from .product import DualPair


class RegionLabel(str, enum.Enum):
    R1 = "R1"
    R2 = "R2"
    R3 = "R3"
    R4 = "R4"


def _require_product(spec: GameSpec) -> None:
    if spec.model is not ModelKind.PRODUCT:
        raise ValueError("regions are defined for the product-form model only")


def r1_threshold(i: int, spec: GameSpec) -> float:
    """Attacker price at and above which target ``i`` is abandoned."""
    _require_product(spec)
    w = spec.weights[i]
    f0p = eval_eff_prime(spec.attack_eff, 0.0)
    return max(w * f0p * eval_eff(spec.defence_eff, 0.0) - spec.cost_attacker, 0.0)


def r2_boundary_raw(i: int, spec: GameSpec, lam: float) -> float:
    """Defender marginal at ``y = 0`` against the undefended attack, net of cost.

    The defender leaves target ``i`` alone iff ``rho`` is at least this value.
    """
    _require_product(spec)
    w = spec.weights[i]
    price = spec.cost_attacker + lam
    if price <= 0:
        fx = 1.0
    else:
        fx = eval_eff(spec.attack_eff, inv_eff_prime(spec.attack_eff, price / (w * eval_eff(spec.defence_eff, 0.0))))
    return -w * fx * eval_eff_prime(spec.defence_eff, 0.0) - spec.cost_defender


def r3_upper(i: int, spec: GameSpec) -> float:
    """Upper ``rho`` limit of R3; nonpositive whenever ``f(0) = 0``."""
    _require_product(spec)
    w = spec.weights[i]
    return -w * eval_eff(spec.attack_eff, 0.0) * eval_eff_prime(spec.defence_eff, 0.0) - spec.cost_defender


def classify_target(i: int, duals: DualPair, spec: GameSpec) -> RegionLabel:
    """Region of target ``i``; ties go to R1, then R2, then R4."""
    lam, rho = duals.lam, duals.rho
    if lam >= r1_threshold(i, spec):
        return RegionLabel.R1
    if rho >= max(r2_boundary_raw(i, spec, lam), 0.0):
        return RegionLabel.R2
    if rho < r3_upper(i, spec):
        return RegionLabel.R3
    return RegionLabel.R4


@dataclass(frozen=True, eq=False)
class RegionBoundaryTable:
    target: int
    lam: np.ndarray
    r1_threshold: np.ndarray
    r2_boundary_raw: np.ndarray
    r2_boundary: np.ndarray

    columns = ("lambda", "r1_threshold", "r2_boundary_raw", "r2_boundary")

    def rows(self) -> list[tuple[float, float, float, float]]:
        return list(zip(*(arr.tolist() for arr in (self.lam, self.r1_threshold, self.r2_boundary_raw, self.r2_boundary))))


def region_boundaries(i: int, spec: GameSpec, lambda_grid) -> RegionBoundaryTable:
    """Boundary curves of target ``i`` over a grid of attacker prices.

    ``r2_boundary`` is the clipped value ``max(raw, 0)``; for ``lam`` beyond
    the R1 threshold R2 is closed and the boundary is 0.
    """
    lams = np.asarray(lambda_grid, dtype=float)
    if np.any(lams < 0) or np.any(~np.isfinite(lams)):
        raise ValueError("lambda grid must be nonnegative and finite")
    thr = r1_threshold(i, spec)
    raw = np.array([r2_boundary_raw(i, spec, float(l)) for l in lams])
    clipped = np.where(lams >= thr, 0.0, np.maximum(raw, 0.0))
    return RegionBoundaryTable(i, lams, np.full_like(lams, thr), raw, clipped)


def region_map(spec: GameSpec, duals: DualPair) -> list[RegionLabel]:
    return [classify_target(i, duals, spec) for i in range(spec.n)]


def expected_pattern(label: RegionLabel) -> tuple[bool, bool]:
    """``(attacked, defended)`` implied by a region."""
    return {
        RegionLabel.R1: (False, False),
        RegionLabel.R2: (True, False),
        RegionLabel.R3: (False, True),
        RegionLabel.R4: (True, True),
    }[label]
