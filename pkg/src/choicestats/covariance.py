"""Covariance estimators for the MLE and Delta-method errors for functions
of it.

Three estimators of the same asymptotic covariance: classical (inverse
negative Hessian), BHHH (inverse score outer product), and the robust
sandwich. Under correct specification they agree asymptotically; their
divergence in finite samples is diagnostic, so all three are always
computed together.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CovarianceError
from .linalg import invert_symmetric, require_symmetric

DELTA_STEP_SCALE = 1e-7
# Quadratic forms this far below zero indicate a broken covariance matrix
# rather than rounding noise.
NEGATIVE_VARIANCE_TOLERANCE = -1e-12


@dataclass(frozen=True)
class CovarianceSet:
    classical: np.ndarray
    bhhh: np.ndarray
    robust: np.ndarray
    se_classical: np.ndarray
    se_bhhh: np.ndarray
    se_robust: np.ndarray
    grouping: str

    def matrix(self, method):
        return {"classical": self.classical, "bhhh": self.bhhh, "robust": self.robust}[method]

    def se(self, method):
        return {
            "classical": self.se_classical,
            "bhhh": self.se_bhhh,
            "robust": self.se_robust,
        }[method]


def standard_errors(cov, names=None):
    """Square roots of the diagonal. Negative entries are a hard error."""
    cov = np.asarray(cov, dtype=float)
    diagonal = np.diag(cov)
    bad = np.flatnonzero(diagonal < 0)
    if bad.size:
        label = names[bad[0]] if names is not None else f"index {bad[0]}"
        raise CovarianceError(
            f"negative variance for {label}: {diagonal[bad[0]]:.3e}; "
            "covariance matrix is not positive on its diagonal"
        )
    return np.sqrt(diagonal)


def covariance_set(hessian, scores, grouping="person", names=None):
    """The three standard covariance estimators from H and grouped scores.

    classical = (-H)^-1, bhhh = (S'S)^-1, robust = classical (S'S) classical.
    ``scores`` must already be grouped (one row per person by default, per
    observation on the override); no degrees-of-freedom correction.
    """
    if grouping not in ("person", "observation"):
        raise ValueError(f"grouping must be 'person' or 'observation', got '{grouping}'")
    hessian = require_symmetric(np.asarray(hessian, dtype=float), tolerance=1e-10, name="hessian")
    scores = np.asarray(scores, dtype=float)
    if scores.ndim != 2 or scores.shape[1] != hessian.shape[0]:
        raise ValueError(
            f"scores must be (groups, {hessian.shape[0]}), got shape {scores.shape}"
        )
    outer = scores.T @ scores
    classical = invert_symmetric(-hessian, name="negative hessian")
    bhhh = invert_symmetric(outer, name="score outer product")
    robust = classical @ outer @ classical
    robust = (robust + robust.T) / 2.0
    return CovarianceSet(
        classical=classical,
        bhhh=bhhh,
        robust=robust,
        se_classical=standard_errors(classical, names),
        se_bhhh=standard_errors(bhhh, names),
        se_robust=standard_errors(robust, names),
        grouping=grouping,
    )


def delta_method(params_hat, cov, func):
    """Value and standard error of a scalar function of the parameters.

    The gradient is taken by central finite differences with step
    1e-7 * max(1, |beta_k|); se = sqrt(g' cov g) for whichever covariance
    matrix the caller supplies.
    """
    params_hat = np.asarray(params_hat, dtype=float)
    cov = np.asarray(cov, dtype=float)
    value = float(func(params_hat))
    if not np.isfinite(value):
        raise ValueError(f"function value at the estimate is not finite: {value}")
    k = params_hat.shape[0]
    gradient = np.empty(k)
    for i in range(k):
        step = DELTA_STEP_SCALE * max(1.0, abs(params_hat[i]))
        up = params_hat.copy()
        down = params_hat.copy()
        up[i] += step
        down[i] -= step
        gradient[i] = (float(func(up)) - float(func(down))) / (2.0 * step)
    if not np.all(np.isfinite(gradient)):
        raise ValueError("function is not finite near the estimate; gradient undefined")
    variance = float(gradient @ cov @ gradient)
    if variance < NEGATIVE_VARIANCE_TOLERANCE:
        raise CovarianceError(
            f"Delta-method variance is negative ({variance:.3e}); the supplied "
            "covariance matrix is not positive semi-definite"
        )
    return value, float(np.sqrt(max(variance, 0.0)))
