"""Bivariate linear baselines: CCRM, CRM, and MinMax.

CCRM fits ordinary least squares to the centers and nonnegative least
squares to the radii (intercept constrained along with the slopes), so its
predicted radii stay nonnegative for nonnegative inputs. CRM drops the
constraint; MinMax regresses the lower and upper bounds separately. CRM and
MinMax can therefore predict incoherent intervals; predictions are returned
raw with a per-row flag, never clipped.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NumericError, UnderdeterminedError
from .frame import IntervalFrame

VARIANTS = ("ccrm", "crm", "minmax")

_NNLS_TOL_FACTOR = 1e-10


@dataclass(frozen=True)
class OlsResult:
    coeffs: np.ndarray
    rss: float
    rank: int
    rank_deficient: bool


@dataclass(frozen=True)
class NnlsResult:
    coeffs: np.ndarray
    rss: float
    active: tuple[int, ...]  # indices pinned at zero


@dataclass(frozen=True)
class LinearFit:
    """Fitted linear model for interval responses."""

    variant: str
    predictor_names: tuple[str, ...]
    # ccrm/crm use (center, radius); minmax uses (lower, upper)
    first_coeffs: np.ndarray
    second_coeffs: np.ndarray
    first_rss: float
    second_rss: float
    active_constraints: tuple[int, ...] = ()
    rank_deficient: bool = False

    @property
    def p(self) -> int:
        return len(self.predictor_names)


def design(features: np.ndarray) -> np.ndarray:
    """Prepend the intercept column."""
    features = np.atleast_2d(np.asarray(features, dtype=float))
    return np.hstack([np.ones((features.shape[0], 1)), features])


def ols(X: np.ndarray, y: np.ndarray) -> OlsResult:
    """Least squares via SVD; minimum-norm solution on rank deficiency."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise NumericError("ols: non-finite entries")
    n, k = X.shape
    if n < k:
        raise UnderdeterminedError(f"ols needs n >= {k} rows, got {n}")
    coeffs, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ coeffs
    return OlsResult(coeffs, float(resid @ resid), int(rank), int(rank) < k)


def nnls(X: np.ndarray, y: np.ndarray, max_iter: int | None = None) -> NnlsResult:
    """Least squares under beta >= 0, by the active-set method.

    Iterates: solve the unconstrained problem on the free set, move any
    variable that went nonpositive back to the active (zero) set along the
    feasible segment, admit the best violating variable by dual value.
    Terminates at the KKT point: free gradients zero, active gradients
    nonnegative.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise NumericError("nnls: non-finite entries")
    n, k = X.shape
    if max_iter is None:
        max_iter = 10 * k

    beta = np.zeros(k)
    free = np.zeros(k, dtype=bool)
    w = X.T @ y  # negative gradient at beta = 0
    tol = _NNLS_TOL_FACTOR * max(1.0, float(np.abs(w).max(initial=0.0)))

    for _ in range(max_iter):
        candidates = ~free & (w > tol)
        if not candidates.any():
            break
        j = int(np.argmax(np.where(candidates, w, -np.inf)))
        free[j] = True
        while True:
            trial = np.zeros(k)
            sol, _, _, _ = np.linalg.lstsq(X[:, free], y, rcond=None)
            trial[free] = sol
            if trial[free].min() > tol:
                beta = trial
                break
            # step toward trial until the first free coefficient hits zero
            shrink = free & (trial <= tol)
            ratios = beta[shrink] / (beta[shrink] - trial[shrink])
            alpha = float(ratios.min())
            beta = beta + alpha * (trial - beta)
            newly_zero = free & (beta <= tol)
            beta[newly_zero] = 0.0
            free[newly_zero] = False
            if not free.any():
                beta = np.zeros(k)
                break
        w = X.T @ (y - X @ beta)

    beta[~free] = 0.0
    resid = y - X @ beta
    active = tuple(int(i) for i in np.nonzero(~free)[0])
    return NnlsResult(beta, float(resid @ resid), active)


def fit_linear(variant: str, train: IntervalFrame) -> LinearFit:
    """Fit one of the linear variants to a training frame."""
    variant = variant.lower()
    if variant not in VARIANTS:
        raise ValueError(f"unknown linear variant {variant!r}")
    if train.n < train.p + 2:
        raise UnderdeterminedError(
            f"{variant} needs at least p + 2 = {train.p + 2} rows, got {train.n}"
        )
    if variant == "minmax":
        xl = design(train.x_center - train.x_radius)
        xu = design(train.x_center + train.x_radius)
        lo = ols(xl, train.y_center - train.y_radius)
        up = ols(xu, train.y_center + train.y_radius)
        return LinearFit(
            variant,
            train.predictor_names,
            lo.coeffs,
            up.coeffs,
            lo.rss,
            up.rss,
            rank_deficient=lo.rank_deficient or up.rank_deficient,
        )
    xc = design(train.x_center)
    xr = design(train.x_radius)
    center = ols(xc, train.y_center)
    if variant == "ccrm":
        radius = nnls(xr, train.y_radius)
        return LinearFit(
            variant,
            train.predictor_names,
            center.coeffs,
            radius.coeffs,
            center.rss,
            radius.rss,
            active_constraints=radius.active,
            rank_deficient=center.rank_deficient,
        )
    radius = ols(xr, train.y_radius)
    return LinearFit(
        variant,
        train.predictor_names,
        center.coeffs,
        radius.coeffs,
        center.rss,
        radius.rss,
        rank_deficient=center.rank_deficient or radius.rank_deficient,
    )


@dataclass(frozen=True)
class PredictionSet:
    """Predicted intervals in raw center/radius form with incoherence flags."""

    center: np.ndarray
    radius: np.ndarray
    incoherent: np.ndarray  # bool per row
    extrapolated: np.ndarray | None = None  # kernel far-query fallback rows

    @property
    def lower(self) -> np.ndarray:
        return self.center - self.radius

    @property
    def upper(self) -> np.ndarray:
        return self.center + self.radius


def predict_linear(fit: LinearFit, x_center: np.ndarray, x_radius: np.ndarray) -> PredictionSet:
    """Predict response intervals for rows given as center/radius arrays.

    Incoherent rows (predicted radius < 0, equivalently upper < lower) are
    flagged, not repaired.
    """
    x_center = np.atleast_2d(np.asarray(x_center, dtype=float))
    x_radius = np.atleast_2d(np.asarray(x_radius, dtype=float))
    if x_center.shape[1] != fit.p or x_radius.shape[1] != fit.p:
        raise DimensionError(
            f"model has {fit.p} predictors, rows have {x_center.shape[1]}"
        )
    if fit.variant == "minmax":
        lo = design(x_center - x_radius) @ fit.first_coeffs
        up = design(x_center + x_radius) @ fit.second_coeffs
        center = 0.5 * (lo + up)
        radius = 0.5 * (up - lo)
    else:
        center = design(x_center) @ fit.first_coeffs
        radius = design(x_radius) @ fit.second_coeffs
    return PredictionSet(center, radius, radius < 0.0)


def predict_linear_frame(fit: LinearFit, frame: IntervalFrame) -> PredictionSet:
    return predict_linear(fit, frame.x_center, frame.x_radius)


def linear_to_json(fit: LinearFit) -> str:
    doc = {
        "format_version": 1,
        "model": fit.variant,
        "predictors": list(fit.predictor_names),
        "equations": ["lower", "upper"] if fit.variant == "minmax" else ["center", "radius"],
        "coefficients": [list(map(float, fit.first_coeffs)), list(map(float, fit.second_coeffs))],
        "diagnostics": {
            "rss": [fit.first_rss, fit.second_rss],
            "active_constraints": list(fit.active_constraints),
            "rank_deficient": bool(fit.rank_deficient),
        },
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def linear_from_json(text: str) -> LinearFit:
    doc = json.loads(text)
    if doc.get("model") not in VARIANTS:
        raise ValueError(f"not a linear model document: {doc.get('model')!r}")
    diag = doc["diagnostics"]
    return LinearFit(
        doc["model"],
        tuple(doc["predictors"]),
        np.asarray(doc["coefficients"][0], dtype=float),
        np.asarray(doc["coefficients"][1], dtype=float),
        float(diag["rss"][0]),
        float(diag["rss"][1]),
        tuple(diag["active_constraints"]),
        bool(diag["rank_deficient"]),
    )
