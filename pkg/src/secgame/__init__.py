"""Nash equilibria of constrained attacker/defender resource-allocation games."""
from __future__ import annotations

__version__ = "0.1.0"

from .model import (  # noqa: E402
    Allocation,
    BudgetDomain,
    ConvergenceError,
    DomainError,
    EfficiencyFunction,
    Equilibrium,
    Family,
    GameSpec,
    InfeasibleSpec,
    ModelKind,
    Multiplicity,
    NoEquilibriumFound,
    RangeError,
    RIDClass,
    SecGameError,
    UnhandledBudgetPoint,
    VerificationReport,
    eval_eff,
    eval_eff_prime,
    inv_eff_prime,
    rid_class,
    utilities,
    validate_spec,
)
from .product import (  # noqa: E402
    BudgetDomainReport,
    DualPair,
    classify_budget_domain,
    kkt_residual,
    per_target_point,
    solve_product,
    total_demand,
)
from .regions import RegionLabel, classify_target, region_boundaries  # noqa: E402
from .linear import LinearNEFamily, ThresholdTable, enumerate_boundary_nes, solve_linear, thresholds  # noqa: E402
from .proportion import (  # noqa: E402
    per_target_solve_proportion,
    proportion_utility_sensitivity,
    solve_proportion,
)
from .oracle import (  # noqa: E402
    BestResponseResult,
    NotFound,
    best_response,
    best_response_dynamics,
    brute_force_ne,
    epsilon_nash_check,
)
from .solve import SweepRequest, solve  # noqa: E402
from .estimators import (  # noqa: E402
    EquilibriumSweep,
    LinearMatrixSolver,
    NashSolver,
    ProductFormSolver,
    ProportionFormSolver,
)

__all__ = [
    "__version__",
    "Allocation",
    "BudgetDomain",
    "ConvergenceError",
    "DomainError",
    "EfficiencyFunction",
    "Equilibrium",
    "Family",
    "GameSpec",
    "InfeasibleSpec",
    "ModelKind",
    "Multiplicity",
    "NoEquilibriumFound",
    "RangeError",
    "RIDClass",
    "SecGameError",
    "UnhandledBudgetPoint",
    "VerificationReport",
    "eval_eff",
    "eval_eff_prime",
    "inv_eff_prime",
    "rid_class",
    "utilities",
    "validate_spec",
    "BudgetDomainReport",
    "DualPair",
    "classify_budget_domain",
    "kkt_residual",
    "per_target_point",
    "solve_product",
    "total_demand",
    "per_target_solve_proportion",
    "proportion_utility_sensitivity",
    "solve_proportion",
    "BestResponseResult",
    "NotFound",
    "best_response",
    "best_response_dynamics",
    "brute_force_ne",
    "epsilon_nash_check",
    "EquilibriumSweep",
    "LinearMatrixSolver",
    "NashSolver",
    "ProductFormSolver",
    "ProportionFormSolver",
    "RegionLabel",
    "classify_target",
    "region_boundaries",
    "LinearNEFamily",
    "ThresholdTable",
    "enumerate_boundary_nes",
    "solve_linear",
    "thresholds",
    "SweepRequest",
    "solve",
]
