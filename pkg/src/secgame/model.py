"""Game description, efficiency families and utility evaluation.

Targets are indexed ``0..n-1`` in code and kept sorted by strictly
descending weight. Attack efficiencies are increasing concave maps ``f``;
defence families are given either as the defence *inefficiency*
``g~ = 1 - g`` (InvG, ExpG, QuadG, Linear) or directly as an increasing
defence efficiency ``g`` (Power).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Any, Iterable, Sequence

import numpy as np

__all__ = [
    "Family",
    "ModelKind",
    "RIDClass",
    "BudgetDomain",
    "Multiplicity",
    "EfficiencyFunction",
    "GameSpec",
    "Allocation",
    "Equilibrium",
    "VerificationReport",
    "SecGameError",
    "DomainError",
    "RangeError",
    "ConvergenceError",
    "NoEquilibriumFound",
    "UnhandledBudgetPoint",
    "InfeasibleSpec",
    "eval_eff",
    "eval_eff_prime",
    "inv_eff_prime",
    "rid_class",
    "defence_gain",
    "defence_gain_prime",
    "breach_probability",
    "utilities",
    "validate_spec",
    "recover_duals",
]


class SecGameError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(SecGameError, ValueError):
    """Efficiency evaluated outside its valid argument range."""


class RangeError(SecGameError, ValueError):
    """Derivative value cannot be inverted for this family."""


class ConvergenceError(SecGameError, RuntimeError):
    pass


class NoEquilibriumFound(SecGameError, RuntimeError):
    pass


class UnhandledBudgetPoint(SecGameError, RuntimeError):
    """Budget pair not covered by any closed-form case of the linear game."""


class InfeasibleSpec(SecGameError, ValueError):
    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class Family(str, enum.Enum):
    EXP_ATTACK = "ExpAttack"
    INV_G = "InvG"
    EXP_G = "ExpG"
    QUAD_G = "QuadG"
    POWER = "Power"
    LINEAR = "Linear"


class ModelKind(str, enum.Enum):
    PRODUCT = "ProductForm"
    PROPORTION = "ProportionForm"
    LINEAR = "LinearMatrix"


class RIDClass(str, enum.Enum):
    INCREASING = "Increasing"
    CONSTANT = "Constant"
    DECREASING = "Decreasing"


class BudgetDomain(str, enum.Enum):
    D1 = "D1"
    D2 = "D2"
    D3 = "D3"
    D4 = "D4"


class Multiplicity(str, enum.Enum):
    UNIQUE = "Unique"
    BOUNDARY_FAMILY = "BoundaryFamily"


ATTACK_FAMILIES = frozenset({Family.EXP_ATTACK, Family.POWER})
INEFFICIENCY_FAMILIES = frozenset({Family.INV_G, Family.EXP_G, Family.QUAD_G})


def _positive(name: str, value: float | None) -> float:
    if value is None or not value > 0 or not math.isfinite(value):
        raise ValueError(f"{name} must be a positive finite number, got {value!r}")
    return float(value)


@dataclass(frozen=True)
class EfficiencyFunction:
    """One member of a parametric efficiency family.

    ``ExpAttack`` without ``a`` is ``1 - exp(-x)``; with ``a`` it is
    ``1 - (1 + x)**(-a)``. ``Linear`` is ``intercept + slope * z``.
    """

    family: Family
    a: float | None = None
    theta: float | None = None
    slope: float | None = None
    intercept: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", Family(self.family))
        fam = self.family
        if fam is Family.EXP_ATTACK and self.a is not None:
            _positive("a", self.a)
        elif fam is Family.POWER:
            a = _positive("a", self.a)
            if a > 1:
                raise ValueError(f"Power efficiency needs 0 < a <= 1, got a={a}")
        elif fam in INEFFICIENCY_FAMILIES:
            _positive("theta", self.theta)
        elif fam is Family.LINEAR:
            if self.slope is None or self.intercept is None:
                raise ValueError("Linear efficiency needs slope and intercept")

    # -- convenience constructors -------------------------------------
    @classmethod
    def exp_attack(cls, a: float | None = None) -> EfficiencyFunction:
        return cls(Family.EXP_ATTACK, a=a)

    @classmethod
    def inv_g(cls, theta: float) -> EfficiencyFunction:
        return cls(Family.INV_G, theta=theta)

    @classmethod
    def exp_g(cls, theta: float) -> EfficiencyFunction:
        return cls(Family.EXP_G, theta=theta)

    @classmethod
    def quad_g(cls, theta: float) -> EfficiencyFunction:
        return cls(Family.QUAD_G, theta=theta)

    @classmethod
    def power(cls, a: float) -> EfficiencyFunction:
        return cls(Family.POWER, a=a)

    @classmethod
    def linear(cls, slope: float = 1.0, intercept: float = 0.0) -> EfficiencyFunction:
        return cls(Family.LINEAR, slope=slope, intercept=intercept)

    @property
    def domain_upper(self) -> float | None:
        if self.family is Family.QUAD_G:
            return 1.0 / self.theta
        return None

    @property
    def is_inefficiency(self) -> bool:
        """True when the family describes ``g~`` (decreasing) rather than an increasing map."""
        if self.family is Family.LINEAR:
            return self.slope < 0
        return self.family in INEFFICIENCY_FAMILIES

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"family": self.family.value}
        for key in ("a", "theta", "slope", "intercept"):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        return out

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> EfficiencyFunction:
        unknown = set(data) - {"family", "a", "theta", "slope", "intercept"}
        if unknown:
            raise ValueError(f"unknown efficiency keys: {sorted(unknown)}")
        return cls(
            Family(data["family"]),
            a=data.get("a"),
            theta=data.get("theta"),
            slope=data.get("slope"),
            intercept=data.get("intercept"),
        )


def _check_domain(fn: EfficiencyFunction, z: np.ndarray) -> None:
    if np.any(np.isnan(z)) or np.any(z < 0):
        raise DomainError(f"{fn.family.value} evaluated at negative argument")
    upper = fn.domain_upper
    if upper is not None and np.any(z >= upper):
        raise DomainError(f"QuadG argument must stay below 1/theta = {upper:g}")


def _out(z_in: Any, result: np.ndarray) -> Any:
    return float(result) if np.ndim(z_in) == 0 else result


def eval_eff(fn: EfficiencyFunction, z: Any) -> Any:
    """Value of the efficiency (``f``, ``g~`` or ``g``) at ``z``; scalar or array."""
    zz = np.asarray(z, dtype=float)
    _check_domain(fn, zz)
    fam = fn.family
    with np.errstate(over="ignore"):
        if fam is Family.EXP_ATTACK:
            res = -np.expm1(-zz) if fn.a is None else 1.0 - (1.0 + zz) ** (-fn.a)
        elif fam is Family.INV_G:
            res = 1.0 / (1.0 + fn.theta * zz)
        elif fam is Family.EXP_G:
            res = np.exp(-fn.theta * zz)
        elif fam is Family.QUAD_G:
            res = (1.0 - fn.theta * zz) ** 2
        elif fam is Family.POWER:
            res = zz**fn.a
        else:
            res = fn.intercept + fn.slope * zz
    return _out(z, np.asarray(res, dtype=float))


def eval_eff_prime(fn: EfficiencyFunction, z: Any) -> Any:
    """Analytic first derivative of :func:`eval_eff`."""
    zz = np.asarray(z, dtype=float)
    _check_domain(fn, zz)
    fam = fn.family
    with np.errstate(divide="ignore", over="ignore"):
        if fam is Family.EXP_ATTACK:
            res = np.exp(-zz) if fn.a is None else fn.a * (1.0 + zz) ** (-fn.a - 1.0)
        elif fam is Family.INV_G:
            res = -fn.theta / (1.0 + fn.theta * zz) ** 2
        elif fam is Family.EXP_G:
            res = -fn.theta * np.exp(-fn.theta * zz)
        elif fam is Family.QUAD_G:
            res = -2.0 * fn.theta * (1.0 - fn.theta * zz)
        elif fam is Family.POWER:
            res = np.where(zz > 0, fn.a * zz ** (fn.a - 1.0), np.inf if fn.a < 1 else 1.0)
        else:
            res = np.full_like(zz, fn.slope)
    return _out(z, np.asarray(res, dtype=float))


def inv_eff_prime(fn: EfficiencyFunction, v: Any) -> Any:
    """Argument at which the derivative equals ``v`` (``h_A`` / ``h_D``).

    Values beyond the derivative at the origin clamp to 0: ``v >= f'(0)``
    for attack families, ``v <= g~'(0)`` for inefficiency families. The
    limit ``v -> 0`` maps to ``inf`` where the family is unbounded.
    """
    vv = np.asarray(v, dtype=float)
    fam = fn.family
    if np.any(np.isnan(vv)):
        raise RangeError("derivative value is NaN")
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if fam is Family.EXP_ATTACK:
            if np.any(vv < 0):
                raise RangeError("attack derivative must be nonnegative")
            if fn.a is None:
                res = np.where(vv >= 1.0, 0.0, -np.log(vv))
            else:
                a = fn.a
                res = np.where(vv >= a, 0.0, (vv / a) ** (-1.0 / (a + 1.0)) - 1.0)
        elif fam is Family.POWER:
            if fn.a == 1.0:
                raise RangeError("Power a=1 has a constant derivative")
            if np.any(vv < 0):
                raise RangeError("attack derivative must be nonnegative")
            res = (vv / fn.a) ** (1.0 / (fn.a - 1.0))
        elif fam in INEFFICIENCY_FAMILIES:
            if np.any(vv > 0):
                raise RangeError("inefficiency derivative must be nonpositive")
            th = fn.theta
            if fam is Family.INV_G:
                res = np.where(vv <= -th, 0.0, (np.sqrt(-th / vv) - 1.0) / th)
            elif fam is Family.EXP_G:
                res = np.where(vv <= -th, 0.0, -np.log(-vv / th) / th)
            else:
                if np.any(vv == 0):
                    raise RangeError("QuadG derivative 0 lies at the domain edge 1/theta")
                res = np.where(vv <= -2 * th, 0.0, (1.0 + vv / (2 * th)) / th)
        else:
            raise RangeError("Linear efficiency has a constant derivative")
    return _out(v, np.asarray(res, dtype=float))


def rid_class(fn: EfficiencyFunction) -> RIDClass:
    """Monotonicity class of ``g~'(y) / g~(y)`` for a defence family."""
    fam = fn.family
    if fam is Family.INV_G:
        return RIDClass.INCREASING
    if fam is Family.EXP_G:
        return RIDClass.CONSTANT
    if fam is Family.QUAD_G:
        return RIDClass.DECREASING
    if fam is Family.LINEAR:
        # d/dy [s / (b + s y)] = -s^2 / (b + s y)^2
        return RIDClass.CONSTANT if fn.slope == 0 else RIDClass.DECREASING
    raise ValueError(f"{fam.value} is not a defence family")


def defence_gain(fn: EfficiencyFunction, y: Any) -> Any:
    """Increasing defence efficiency ``g`` regardless of how the family is stated."""
    val = eval_eff(fn, y)
    return 1.0 - val if fn.is_inefficiency else val


def defence_gain_prime(fn: EfficiencyFunction, y: Any) -> Any:
    d = eval_eff_prime(fn, y)
    return -d if fn.is_inefficiency else d


@dataclass(frozen=True)
class GameSpec:
    """Complete description of one attacker/defender instance."""

    weights: tuple[float, ...]
    cost_attacker: float
    cost_defender: float
    budget_attacker: float
    budget_defender: float
    model: ModelKind
    attack_eff: EfficiencyFunction
    defence_eff: EfficiencyFunction
    gamma: float = 0.0
    n: int = field(default=-1)

    def __post_init__(self) -> None:
        w = tuple(float(v) for v in np.ravel(self.weights))
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "model", ModelKind(self.model))
        if self.n == -1:
            object.__setattr__(self, "n", len(w))
        for name in ("cost_attacker", "cost_defender", "budget_attacker", "budget_defender", "gamma"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @classmethod
    def linear_matrix(
        cls,
        weights: Sequence[float],
        cost_attacker: float,
        cost_defender: float,
        budget_attacker: float,
        budget_defender: float,
        gamma: float = 0.0,
    ) -> GameSpec:
        """Matrix-form intrusion detection game: ``f(x) = x``, ``g~(y) = 1 - (1-gamma) y``."""
        return cls(
            weights=tuple(weights),
            cost_attacker=cost_attacker,
            cost_defender=cost_defender,
            budget_attacker=budget_attacker,
            budget_defender=budget_defender,
            model=ModelKind.LINEAR,
            attack_eff=EfficiencyFunction.linear(1.0, 0.0),
            defence_eff=EfficiencyFunction.linear(-(1.0 - gamma), 1.0),
            gamma=gamma,
        )

    @property
    def w(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=float)

    def with_budgets(self, budget_attacker: float | None = None, budget_defender: float | None = None) -> GameSpec:
        return replace(
            self,
            budget_attacker=self.budget_attacker if budget_attacker is None else budget_attacker,
            budget_defender=self.budget_defender if budget_defender is None else budget_defender,
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "weights": list(self.weights),
            "cost_attacker": self.cost_attacker,
            "cost_defender": self.cost_defender,
            "budget_attacker": self.budget_attacker,
            "budget_defender": self.budget_defender,
            "model": self.model.value,
            "attack_eff": self.attack_eff.to_dict(),
            "defence_eff": self.defence_eff.to_dict(),
            "gamma": self.gamma,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> GameSpec:
        known = {
            "n", "weights", "cost_attacker", "cost_defender", "budget_attacker",
            "budget_defender", "model", "attack_eff", "defence_eff", "gamma",
        }
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown GameSpec keys: {sorted(unknown)}")
        model = ModelKind(data["model"])
        gamma = float(data.get("gamma", 0.0))
        if model is ModelKind.LINEAR:
            attack = data.get("attack_eff") or {"family": "Linear", "slope": 1.0, "intercept": 0.0}
            defence = data.get("defence_eff") or {
                "family": "Linear", "slope": -(1.0 - gamma), "intercept": 1.0,
            }
        else:
            attack, defence = data["attack_eff"], data["defence_eff"]
        return cls(
            weights=tuple(data["weights"]),
            cost_attacker=data["cost_attacker"],
            cost_defender=data["cost_defender"],
            budget_attacker=data["budget_attacker"],
            budget_defender=data["budget_defender"],
            model=model,
            attack_eff=EfficiencyFunction.from_dict(attack),
            defence_eff=EfficiencyFunction.from_dict(defence),
            gamma=gamma,
            n=int(data.get("n", len(data["weights"]))),
        )


@dataclass(frozen=True, eq=False)
class Allocation:
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float).copy())
        object.__setattr__(self, "y", np.asarray(self.y, dtype=float).copy())
        if self.x.shape != self.y.shape or self.x.ndim != 1:
            raise ValueError("x and y must be 1-D arrays of equal length")

    @classmethod
    def zeros(cls, n: int) -> Allocation:
        return cls(np.zeros(n), np.zeros(n))

    def is_feasible(self, spec: GameSpec, tol: float = 1e-9) -> bool:
        return bool(
            np.all(self.x >= -tol)
            and np.all(self.y >= -tol)
            and self.x.sum() <= spec.budget_attacker + tol
            and self.y.sum() <= spec.budget_defender + tol
        )


@dataclass(frozen=True, eq=False)
class Equilibrium:
    """Equilibrium allocation together with its shadow prices and summary data."""

    alloc: Allocation
    lam: float
    rho: float
    k_attacker: int
    k_defender: int
    budget_domain: BudgetDomain
    utility_attacker: float
    utility_defender: float
    multiplicity: Multiplicity = Multiplicity.UNIQUE
    free_interval: tuple[float, float] | None = None

    @property
    def x(self) -> np.ndarray:
        return self.alloc.x

    @property
    def y(self) -> np.ndarray:
        return self.alloc.y

    def to_dict(self) -> dict[str, Any]:
        return {
            "x": self.x.tolist(),
            "y": self.y.tolist(),
            "lambda": self.lam,
            "rho": self.rho,
            "k_attacker": self.k_attacker,
            "k_defender": self.k_defender,
            "domain": self.budget_domain.value,
            "utility_attacker": self.utility_attacker,
            "utility_defender": self.utility_defender,
            "multiplicity": self.multiplicity.value,
            "free_interval": None if self.free_interval is None else list(self.free_interval),
        }


@dataclass
class VerificationReport:
    eps_attacker: float
    eps_defender: float
    kkt_max_residual: float
    invariant_results: list[tuple[str, bool, str]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.invariant_results)

    @property
    def failures(self) -> list[str]:
        return [name for name, ok, _ in self.invariant_results if not ok]

    def to_dict(self) -> dict[str, Any]:
        return {
            "eps_attacker": self.eps_attacker,
            "eps_defender": self.eps_defender,
            "kkt_max_residual": self.kkt_max_residual,
            "passed": self.passed,
            "invariants": [
                {"name": name, "passed": ok, "detail": detail}
                for name, ok, detail in self.invariant_results
            ],
        }


def breach_probability(spec: GameSpec, x: Any, y: Any) -> np.ndarray:
    """Per-target breaching probability ``p_i``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    fx = np.asarray(eval_eff(spec.attack_eff, x), dtype=float)
    if spec.model is ModelKind.PROPORTION:
        gy = np.asarray(defence_gain(spec.defence_eff, y), dtype=float)
        den = fx + gy
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(den > 0, fx / np.where(den > 0, den, 1.0), 0.0)
    return fx * np.asarray(eval_eff(spec.defence_eff, y), dtype=float)


def utilities(spec: GameSpec, alloc: Allocation) -> tuple[float, float]:
    """Attacker profit ``U_A`` and defender disutility ``U_D``."""
    p = breach_probability(spec, alloc.x, alloc.y)
    loss = float(np.dot(spec.w, p))
    u_a = loss - spec.cost_attacker * float(alloc.x.sum())
    u_d = -loss - spec.cost_defender * float(alloc.y.sum())
    return u_a, u_d


_ALLOWED = {
    ModelKind.PRODUCT: ({Family.EXP_ATTACK}, INEFFICIENCY_FAMILIES),
    ModelKind.PROPORTION: ({Family.POWER, Family.EXP_ATTACK}, INEFFICIENCY_FAMILIES | {Family.POWER}),
    ModelKind.LINEAR: ({Family.LINEAR}, {Family.LINEAR}),
}


def validate_spec(spec: GameSpec, *, probability_cap: bool = True) -> list[str]:
    """List every violated modelling assumption; empty when the game is usable.

    ``probability_cap`` enforces ``X_A, Y_D <= 1`` for the matrix-form game.
    """
    out: list[str] = []
    w = spec.w
    if spec.n != len(w) or spec.n < 1:
        out.append(f"n={spec.n} does not match {len(w)} weights")
    if np.any(~np.isfinite(w)) or np.any(w <= 0):
        out.append("weights must be positive")
    if np.any(np.diff(w) >= 0):
        out.append("weights not descending (strict order w_i > w_j for i < j required)")
    if spec.cost_attacker < 0 or spec.cost_defender < 0:
        out.append("unit costs must be nonnegative")
    for name in ("budget_attacker", "budget_defender"):
        val = getattr(spec, name)
        if not (0 < val < math.inf):
            out.append(f"{name} must satisfy 0 < budget < inf")

    attack_ok, defence_ok = _ALLOWED[spec.model]
    if spec.attack_eff.family not in attack_ok:
        out.append(f"attack family {spec.attack_eff.family.value} not allowed for {spec.model.value}")
    if spec.defence_eff.family not in defence_ok:
        out.append(f"defence family {spec.defence_eff.family.value} not allowed for {spec.model.value}")
    if spec.defence_eff.family is Family.QUAD_G and spec.cost_defender <= 0:
        out.append("QuadG defence needs cost_defender > 0 (unpriced defence hits the domain edge)")

    if spec.model is ModelKind.LINEAR:
        g = spec.gamma
        if not (0 <= g < 1):
            out.append("gamma must lie in [0, 1)")
        else:
            att, dfn = spec.attack_eff, spec.defence_eff
            if att.family is Family.LINEAR and (att.slope != 1.0 or att.intercept != 0.0):
                out.append("LinearMatrix attack efficiency must be f(x) = x")
            if dfn.family is Family.LINEAR and (
                not math.isclose(dfn.slope, -(1.0 - g), abs_tol=1e-15) or dfn.intercept != 1.0
            ):
                out.append("LinearMatrix defence must be g~(y) = 1 - (1-gamma) y")
            if np.any(w <= spec.cost_attacker):
                out.append("non-triviality w_i > c fails")
            if np.any(g * w > spec.cost_attacker):
                out.append("non-triviality gamma*w_i <= c fails")
        if probability_cap:
            if spec.budget_attacker > 1:
                out.append("LinearMatrix needs budget_attacker <= 1 (attack probabilities)")
            if spec.budget_defender > 1:
                out.append("LinearMatrix needs budget_defender <= 1 (detection probabilities)")
    return out


def marginals(spec: GameSpec, x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-target marginal profit of each player net of unit cost."""
    w = spec.w
    fx = np.asarray(eval_eff(spec.attack_eff, x), dtype=float)
    fpx = np.asarray(eval_eff_prime(spec.attack_eff, x), dtype=float)
    if spec.model is ModelKind.PROPORTION:
        gy = np.asarray(defence_gain(spec.defence_eff, y), dtype=float)
        gpy = np.asarray(defence_gain_prime(spec.defence_eff, y), dtype=float)
        den = (fx + gy) ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            m_a = np.where(den > 0, w * fpx * gy / np.where(den > 0, den, 1.0), np.inf)
            m_d = np.where(den > 0, w * fx * gpy / np.where(den > 0, den, 1.0), 0.0)
            # y = 0 with x > 0: marginal of g at 0 may be infinite while f > 0
            m_d = np.where(np.isnan(m_d), np.inf, m_d)
        return m_a - spec.cost_attacker, m_d - spec.cost_defender
    gt = np.asarray(eval_eff(spec.defence_eff, y), dtype=float)
    gtp = np.asarray(eval_eff_prime(spec.defence_eff, y), dtype=float)
    return w * fpx * gt - spec.cost_attacker, -w * fx * gtp - spec.cost_defender


def recover_duals(spec: GameSpec, alloc: Allocation) -> tuple[float, float]:
    """Shadow prices implied by an allocation: the largest net marginal, floored at 0."""
    m_a, m_d = marginals(spec, alloc.x, alloc.y)
    lam = max(0.0, float(np.max(m_a[alloc.x > 0]))) if np.any(alloc.x > 0) else 0.0
    rho = max(0.0, float(np.max(m_d[alloc.y > 0]))) if np.any(alloc.y > 0) else 0.0
    return lam, rho


def domain_from_duals(lam: float, rho: float, tol: float = 1e-12) -> BudgetDomain:
    if lam > tol and rho > tol:
        return BudgetDomain.D4
    if lam > tol:
        return BudgetDomain.D2
    if rho > tol:
        return BudgetDomain.D3
    return BudgetDomain.D1


def make_equilibrium(
    spec: GameSpec,
    x: Iterable[float],
    y: Iterable[float],
    lam: float,
    rho: float,
    budget_domain: BudgetDomain | None = None,
    multiplicity: Multiplicity = Multiplicity.UNIQUE,
    free_interval: tuple[float, float] | None = None,
) -> Equilibrium:
    alloc = Allocation(np.asarray(list(x), dtype=float), np.asarray(list(y), dtype=float))
    u_a, u_d = utilities(spec, alloc)
    return Equilibrium(
        alloc=alloc,
        lam=float(lam),
        rho=float(rho),
        k_attacker=int(np.count_nonzero(alloc.x > 0)),
        k_defender=int(np.count_nonzero(alloc.y > 0)),
        budget_domain=budget_domain if budget_domain is not None else domain_from_duals(lam, rho),
        utility_attacker=u_a,
        utility_defender=u_d,
        multiplicity=multiplicity,
        free_interval=free_interval,
    )
