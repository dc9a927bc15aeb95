"""L2-regularized L2-loss linear SVM with a dual coordinate descent solver,
plus stratified k-fold cross-validation.

The primal problem over examples (x_d, y_d), y_d in {-1, +1}:

    min_{w, b}  (1/2) ||w||^2  +  C * sum_d max(0, 1 - y_d (w.x_d - b))^2

The bias is folded in as an augmented constant feature of value 1 (so it is
regularized like any weight; at the hard-margin scale used for evaluation
the difference from an unregularized bias is below tolerance).  The dual
has one box-free nonnegative variable per example and diagonal damping
1/(2C); exact coordinate minimization makes the dual objective monotone
non-increasing, which the trainer asserts every outer pass.

Feature values are expected to be fractions in [0, 1]; no internal scaling
is applied.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .features import FeatureMatrix
from .lda import chain_seed, make_rng

logger = logging.getLogger(__name__)

DEFAULT_C = 1.0
DEFAULT_TOL = 1e-4
DEFAULT_MAX_ITER = 10_000


@dataclass(frozen=True)
class SvmModel:
    """Trained linear separator; decision value is w.x - b."""

    w: np.ndarray
    b: float
    C: float
    converged: bool
    iterations: int
    objective_history: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if not np.isfinite(self.w).all() or not np.isfinite(self.b):
            raise ValueError("model parameters must be finite")

    @property
    def num_features(self) -> int:
        return len(self.w)


@dataclass(frozen=True)
class CvReport:
    """Cross-validation outcome with the fold layout that produced it."""

    fold_accuracies: tuple[float, ...]
    mean_accuracy: float
    seed: int
    fold_assignment: np.ndarray

    def to_dict(self) -> dict:
        return {
            "fold_accuracies": [float(a) for a in self.fold_accuracies],
            "mean_accuracy": float(self.mean_accuracy),
            "seed": int(self.seed),
            "fold_assignment": [int(f) for f in self.fold_assignment],
        }


def _validate_training_set(x: np.ndarray, y: np.ndarray) -> None:
    if x.ndim != 2:
        raise ValueError("training features must be a 2-d array")
    if len(y) != x.shape[0]:
        raise ValueError("label count does not match example count")
    if not np.isfinite(x).all():
        raise ValueError("training features must be finite")
    if not np.isin(y, (-1, 1)).all():
        raise ValueError("labels must be -1 or +1")
    if len(np.unique(y)) < 2:
        raise ValueError("training needs at least one example of each class")


def train_arrays(
    x: np.ndarray,
    y: Sequence[int],
    C: float = DEFAULT_C,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    seed: int = 0,
) -> SvmModel:
    """Fit the SVM on a raw (n_examples, n_features) array."""
    if C <= 0:
        raise ValueError(f"C must be positive, got {C}")
    x = np.ascontiguousarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    _validate_training_set(x, y)

    n = x.shape[0]
    augmented = np.hstack([x, np.ones((n, 1))])
    half_inv_c = 1.0 / (2.0 * C)
    q_diag = np.einsum("ij,ij->i", augmented, augmented) + half_inv_c
    w = np.zeros(augmented.shape[1])
    alpha = np.zeros(n)
    rng = make_rng(seed)

    converged = False
    iterations = max_iter
    history: list[float] = []
    for outer in range(max_iter):
        max_violation = 0.0
        for i in rng.permutation(n):
            xi = augmented[i]
            grad = y[i] * (w @ xi) - 1.0 + alpha[i] * half_inv_c
            projected = grad if alpha[i] > 0.0 else min(grad, 0.0)
            if projected != 0.0:
                max_violation = max(max_violation, abs(projected))
                updated = max(alpha[i] - grad / q_diag[i], 0.0)
                step = updated - alpha[i]
                if step != 0.0:
                    alpha[i] = updated
                    w += (step * y[i]) * xi
        dual = 0.5 * (w @ w) + 0.5 * half_inv_c * (alpha @ alpha) - alpha.sum()
        if history and dual > history[-1] + 1e-9 * max(1.0, abs(history[-1])):
            raise AssertionError(
                f"dual objective increased: {history[-1]!r} -> {dual!r}"
            )
        history.append(dual)
        if max_violation < tol:
            converged = True
            iterations = outer + 1
            break
    if not converged:
        logger.warning("SVM did not converge within %d iterations", max_iter)

    return SvmModel(
        w=w[:-1].copy(),
        b=float(-w[-1]),
        C=float(C),
        converged=converged,
        iterations=iterations,
        objective_history=tuple(history),
    )


def train(
    features: FeatureMatrix,
    C: float = DEFAULT_C,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    seed: int = 0,
) -> SvmModel:
    """Fit the SVM on a labeled feature matrix."""
    return train_arrays(features.values, features.labels, C=C, tol=tol,
                        max_iter=max_iter, seed=seed)


def decision_function(model: SvmModel, x: np.ndarray) -> np.ndarray | float:
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != model.num_features:
        raise ValueError(
            f"expected {model.num_features} features, got {x.shape[-1]}"
        )
    return x @ model.w - model.b


def predict(model: SvmModel, x: np.ndarray) -> int | np.ndarray:
    """Label of x by the sign of the decision value; exactly 0 maps to +1."""
    decision = decision_function(model, x)
    if np.ndim(decision) == 0:
        return 1 if decision >= 0 else -1
    return np.where(decision >= 0, 1, -1).astype(np.int64)


def feature_weights(model: SvmModel) -> tuple[np.ndarray, float]:
    """The separator's internal parameters (w, b), verbatim."""
    return model.w, model.b


def primal_objective(model: SvmModel, x: np.ndarray, y: Sequence[int]) -> float:
    """Value of the regularized-bias primal objective at the model's parameters."""
    y = np.asarray(y, dtype=np.float64)
    margins = 1.0 - y * decision_function(model, np.asarray(x, dtype=np.float64))
    hinge = np.maximum(margins, 0.0)
    return float(
        0.5 * (model.w @ model.w + model.b * model.b) + model.C * (hinge @ hinge)
    )


def stratified_folds(labels: np.ndarray, k: int, seed: int) -> np.ndarray:
    """Per-example fold indices: each class is shuffled with the seeded
    generator and dealt round-robin, so class balance carries into folds."""
    labels = np.asarray(labels)
    if k < 2:
        raise ValueError(f"need k >= 2 folds, got {k}")
    assignment = np.full(len(labels), -1, dtype=np.int64)
    rng = make_rng(chain_seed(seed, 0))
    for cls in sorted(np.unique(labels).tolist()):
        idx = np.flatnonzero(labels == cls)
        if len(idx) < k:
            raise ValueError(
                f"class {cls} has {len(idx)} example(s); cannot fill {k} folds"
            )
        rng.shuffle(idx)
        assignment[idx] = np.arange(len(idx)) % k
    return assignment


def cross_validate(
    features: FeatureMatrix,
    k: int = 5,
    C: float = DEFAULT_C,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    seed: int = 0,
) -> CvReport:
    """Stratified k-fold accuracy of the SVM on the feature matrix."""
    x, y = features.values, features.labels
    assignment = stratified_folds(y, k, seed)
    accuracies = []
    for fold in range(k):
        test = assignment == fold
        model = train_arrays(
            x[~test], y[~test], C=C, tol=tol, max_iter=max_iter,
            seed=chain_seed(seed, 1 + fold),
        )
        predicted = predict(model, x[test])
        accuracies.append(float(np.mean(predicted == y[test])))
    return CvReport(
        fold_accuracies=tuple(accuracies),
        mean_accuracy=float(np.mean(accuracies)),
        seed=int(seed),
        fold_assignment=assignment,
    )


def write_weight_report(
    model: SvmModel, feature_names: Sequence[str], path: str | Path
) -> None:
    """CSV of one weight per feature row plus a final bias row."""
    if len(feature_names) != model.num_features:
        raise ValueError("feature name count does not match model width")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["feature_name", "weight"])
        for name, weight in zip(feature_names, model.w):
            writer.writerow([name, repr(float(weight))])
        writer.writerow(["bias", repr(float(model.b))])
