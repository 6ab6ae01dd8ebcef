"""scikit-learn style facades over the functional solvers.

``fit`` takes a :class:`GameSpec` (or its dict form) in place of a data
matrix; constructor arguments are solver settings, so ``get_params`` /
``set_params`` / ``clone`` work as usual and fitted results live in
trailing-underscore attributes.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .linear import enumerate_boundary_nes, solve_linear
from .model import ModelKind, VerificationReport
from .oracle import EPS_REL, epsilon_nash_check
from .product import classify_budget_domain, kkt_residual, solve_product
from .proportion import solve_proportion
from .solve import solve, sweep_matrix
from .validation import check_spec


class _EquilibriumMixin:
    """Shared post-fit helpers; subclasses set ``spec_`` and ``equilibrium_``."""

    def verify(self, *, eps_rel: float = EPS_REL) -> VerificationReport:
        check_is_fitted(self, "equilibrium_")
        return epsilon_nash_check(self.spec_, self.equilibrium_, eps_rel=eps_rel)

    def score(self, spec=None, y=None) -> float:
        """Negative largest best-response gain (0 is a perfect equilibrium)."""
        report = self.verify()
        return -max(report.eps_attacker, report.eps_defender)


class ProductFormSolver(_EquilibriumMixin, BaseEstimator):
    def __init__(self, tol: float = 1e-6):
        self.tol = tol

    def fit(self, spec, y=None):
        spec = check_spec(spec)
        if spec.model is not ModelKind.PRODUCT:
            raise ValueError("ProductFormSolver needs a ProductForm spec")
        self.spec_ = spec
        self.budget_report_ = classify_budget_domain(spec)
        self.equilibrium_ = solve_product(spec, tol=self.tol, check=False)
        self.kkt_residual_ = kkt_residual(spec, self.equilibrium_)
        return self


class ProportionFormSolver(_EquilibriumMixin, BaseEstimator):
    def __init__(self, method: str = "auto", tol: float = 1e-6):
        self.method = method
        self.tol = tol

    def fit(self, spec, y=None):
        spec = check_spec(spec)
        if spec.model is not ModelKind.PROPORTION:
            raise ValueError("ProportionFormSolver needs a ProportionForm spec")
        self.spec_ = spec
        self.equilibrium_ = solve_proportion(spec, method=self.method, tol=self.tol, check=False)
        self.kkt_residual_ = kkt_residual(spec, self.equilibrium_)
        return self


class LinearMatrixSolver(_EquilibriumMixin, BaseEstimator):
    def __init__(self, boundary_tol: float = 1e-12, probability_cap: bool = True, samples: int | None = None):
        self.boundary_tol = boundary_tol
        self.probability_cap = probability_cap
        self.samples = samples

    def fit(self, spec, y=None):
        spec = check_spec(spec, probability_cap=self.probability_cap)
        if spec.model is not ModelKind.LINEAR:
            raise ValueError("LinearMatrixSolver needs a LinearMatrix spec")
        self.spec_ = spec
        self.family_ = solve_linear(spec, boundary_tol=self.boundary_tol, probability_cap=self.probability_cap)
        self.equilibrium_ = self.family_.representative
        self.boundary_nes_ = (
            enumerate_boundary_nes(self.family_, self.samples)
            if self.samples and self.family_.free_interval is not None
            else []
        )
        self.kkt_residual_ = kkt_residual(spec, self.equilibrium_)
        return self


class NashSolver(_EquilibriumMixin, BaseEstimator):
    """Dispatches on the game's breaching model."""

    def __init__(self, tol: float = 1e-6, method: str = "auto", probability_cap: bool = True):
        self.tol = tol
        self.method = method
        self.probability_cap = probability_cap

    def fit(self, spec, y=None):
        spec = check_spec(spec, probability_cap=self.probability_cap)
        self.spec_ = spec
        self.equilibrium_, self.family_ = solve(
            spec, tol=self.tol, method=self.method, probability_cap=self.probability_cap
        )
        self.kkt_residual_ = kkt_residual(spec, self.equilibrium_)
        return self


class EquilibriumSweep(TransformerMixin, BaseEstimator):
    """Maps rows of ``(X_A, Y_D)`` budget pairs to equilibrium summaries.

    Output columns: ``lambda, rho, K_A, K_D, U_A, U_D, x_1..x_N, y_1..y_N``;
    rows whose solve fails are NaN.
    """

    def __init__(self, spec=None, tol: float = 1e-6, method: str = "auto", probability_cap: bool = True):
        self.spec = spec
        self.tol = tol
        self.method = method
        self.probability_cap = probability_cap

    def fit(self, X=None, y=None):
        if self.spec is None:
            raise ValueError("EquilibriumSweep needs a spec")
        self.spec_ = check_spec(self.spec, probability_cap=self.probability_cap)
        self.n_features_in_ = 2
        return self

    def transform(self, X):
        check_is_fitted(self, "spec_")
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != 2:
            raise ValueError("expected an array of (budget_attacker, budget_defender) rows")
        return sweep_matrix(
            self.spec_, X, tol=self.tol, method=self.method, probability_cap=self.probability_cap
        )

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "spec_")
        n = self.spec_.n
        base = ["lambda", "rho", "k_attacker", "k_defender", "utility_attacker", "utility_defender"]
        return np.array(base + [f"x_{i + 1}" for i in range(n)] + [f"y_{i + 1}" for i in range(n)], dtype=object)
