"""Maximum likelihood estimation.

Newton ascent on the sample log-likelihood with the analytic Hessian,
step-halving line search, a BHHH fallback direction, multi-start against
local optima, and an eigenvalue-based identification check.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConvergenceError,
    DivergenceWarning,
    EstimationDisagreementWarning,
    IdentificationError,
    ProbabilityUnderflowWarning,
)
from .linalg import require_symmetric, solve_positive_definite
from .model import build_design
from .util import seed_from

STATUS_CONVERGED = "converged"
STATUS_MAX_ITERATIONS = "max_iterations"
STATUS_SINGULAR_HESSIAN = "singular_hessian"
STATUS_LINE_SEARCH_FAILURE = "line_search_failure"

#: Any |coefficient| beyond this at termination is treated as divergence
#: (empirically unidentified parameters drift toward +-infinity).
DIVERGENCE_BOUND = 50.0

#: Converged multi-start runs whose best log-likelihoods spread by more than
#: this are flagged as disagreeing.
DISAGREEMENT_TOLERANCE = 1e-4


@dataclass(frozen=True)
class EstimationOptions:
    max_iterations: int = 200
    gradient_tolerance: float = 1e-6
    step_halving_max: int = 25
    n_starts: int = 1
    start_perturbation_scale: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.max_iterations < 1 or self.step_halving_max < 1 or self.n_starts < 1:
            raise ValueError("max_iterations, step_halving_max and n_starts must be >= 1")
        if not (self.gradient_tolerance > 0 and self.start_perturbation_scale > 0):
            raise ValueError("tolerances and perturbation scale must be positive")


@dataclass(frozen=True)
class IdentificationReport:
    hessian_rank: int
    condition_number: float
    is_identified: bool
    suspect_parameters: tuple[str, ...]


@dataclass
class EstimationResult:
    params_hat: np.ndarray
    names: list[str]
    ll_hat: float
    ll_0: float
    gradient_norm: float
    hessian_at_optimum: np.ndarray
    iterations: int
    status: str
    start_index: int = 0
    identification: IdentificationReport | None = None

    @property
    def converged(self):
        return self.status == STATUS_CONVERGED

    @property
    def diverged(self):
        return bool(np.any(np.abs(self.params_hat) > DIVERGENCE_BOUND))

    def params_dict(self):
        return {name: float(v) for name, v in zip(self.names, self.params_hat)}


def check_identification(hessian, threshold=1e-10, names=None):
    """Eigenvalue-based identification report for a (negative) Hessian.

    identified <=> min|eigenvalue| / max|eigenvalue| > threshold and full
    rank. Suspects are the parameters loading heaviest on eigenvectors of
    near-zero eigenvalues.
    """
    h = require_symmetric(np.asarray(hessian, dtype=float), name="hessian")
    eigenvalues, eigenvectors = np.linalg.eigh(h)
    magnitude = np.abs(eigenvalues)
    largest = float(magnitude.max())
    if largest == 0.0:
        rank = 0
        condition = np.inf
        near_null = np.ones(len(eigenvalues), dtype=bool)
    else:
        near_null = magnitude <= threshold * largest
        rank = int(np.sum(~near_null))
        smallest = float(magnitude.min())
        condition = np.inf if smallest == 0.0 else largest / smallest
    identified = (not np.any(near_null)) and rank == h.shape[0]
    suspects = []
    if names is None:
        names = [f"param_{i}" for i in range(h.shape[0])]
    for idx in np.flatnonzero(near_null):
        loadings = np.abs(eigenvectors[:, idx])
        heavy = loadings >= 0.5 * loadings.max()
        for pos in np.flatnonzero(heavy):
            if names[pos] not in suspects:
                suspects.append(names[pos])
    return IdentificationReport(
        hessian_rank=rank,
        condition_number=condition,
        is_identified=bool(identified),
        suspect_parameters=tuple(suspects),
    )


def _ascent_direction(design, params, gradient):
    # Newton when -H is positive definite, else the BHHH direction built
    # from person-grouped score outer products.
    hessian = design.hessian(params)
    try:
        return solve_positive_definite(-hessian, gradient, name="negative hessian"), hessian
    except IdentificationError:
        scores = design.score(params, grouping="person")
        bhhh = scores.T @ scores
        return solve_positive_definite(bhhh, gradient, name="bhhh matrix"), hessian


def estimate_design(design, options=None, start=None, start_index=0):
    """Run the optimiser against an already compiled design."""
    options = options or EstimationOptions()
    params = design.start_values.copy() if start is None else np.asarray(start, dtype=float).copy()
    if params.shape != (design.k,):
        raise ValueError(f"start vector must have length {design.k}, got shape {params.shape}")
    ll = design.log_likelihood(params)
    if not np.isfinite(ll):
        raise ValueError("log-likelihood is not finite at the start point")

    status = STATUS_MAX_ITERATIONS
    iterations = 0
    for _ in range(options.max_iterations):
        gradient = design.gradient(params)
        if np.linalg.norm(gradient, np.inf) <= options.gradient_tolerance:
            status = STATUS_CONVERGED
            break
        try:
            direction, _ = _ascent_direction(design, params, gradient)
        except IdentificationError:
            status = STATUS_SINGULAR_HESSIAN
            break
        step = 1.0
        accepted = False
        full_candidate = None
        full_ll = -np.inf
        for halving in range(options.step_halving_max):
            candidate = params + step * direction
            ll_candidate = design.log_likelihood(candidate)
            if halving == 0:
                full_candidate, full_ll = candidate, ll_candidate
            if np.isfinite(ll_candidate) and ll_candidate > ll:
                params = candidate
                ll = ll_candidate
                accepted = True
                break
            step *= 0.5
        if not accepted:
            # Near the optimum the concave likelihood flattens below float
            # resolution before the gradient test fires. Accept a full step
            # that moves the point without materially losing likelihood so
            # the quadratic phase can finish; the gradient check still
            # decides convergence.
            plateau_slack = 1e-13 * max(1.0, abs(ll))
            if (
                full_candidate is not None
                and np.isfinite(full_ll)
                and full_ll >= ll - plateau_slack
                and np.any(full_candidate != params)
            ):
                params = full_candidate
                ll = full_ll
                accepted = True
        if not accepted:
            status = STATUS_LINE_SEARCH_FAILURE
            break
        iterations += 1
    else:
        gradient = design.gradient(params)
        if np.linalg.norm(gradient, np.inf) <= options.gradient_tolerance:
            status = STATUS_CONVERGED

    gradient = design.gradient(params)
    hessian = design.hessian(params)
    ll, floored = design.log_likelihood(params, return_floored=True)
    if floored:
        warnings.warn(
            "chosen-alternative probability underflowed at the final point",
            ProbabilityUnderflowWarning,
            stacklevel=2,
        )

    identification = None
    if status == STATUS_SINGULAR_HESSIAN:
        identification = check_identification(hessian, names=design.free_names)

    result = EstimationResult(
        params_hat=params,
        names=list(design.free_names),
        ll_hat=ll,
        ll_0=design.null_log_likelihood(),
        gradient_norm=float(np.linalg.norm(gradient, np.inf)),
        hessian_at_optimum=hessian,
        iterations=iterations,
        status=status,
        start_index=start_index,
        identification=identification,
    )
    if result.diverged:
        runaway = [
            name
            for name, v in zip(result.names, result.params_hat)
            if abs(v) > DIVERGENCE_BOUND
        ]
        warnings.warn(
            f"coefficients {runaway} exceed |{DIVERGENCE_BOUND:g}|; the model "
            "may be empirically unidentified on this sample",
            DivergenceWarning,
            stacklevel=2,
        )
    return result


def estimate(dataset, spec, options=None):
    """Maximise the sample log-likelihood for ``spec`` on ``dataset``."""
    return estimate_design(build_design(dataset, spec), options)


def multi_start(dataset, spec, options=None):
    """Estimate from several starting points; return (best, all runs).

    Start 0 uses the declared start values; later starts perturb them with
    seeded normal noise. The best run is the converged one with the highest
    log-likelihood. Converged runs disagreeing by more than 1e-4 in their
    final log-likelihood raise EstimationDisagreementWarning.
    """
    options = options or EstimationOptions()
    design = build_design(dataset, spec)
    runs = []
    for i in range(options.n_starts):
        if i == 0:
            start = design.start_values.copy()
        else:
            rng = np.random.default_rng(seed_from(options.seed, i))
            start = design.start_values + options.start_perturbation_scale * rng.standard_normal(
                design.k
            )
        runs.append(estimate_design(design, options, start=start, start_index=i))

    converged = [r for r in runs if r.converged]
    if not converged:
        raise ConvergenceError(
            "no start converged", statuses=tuple(r.status for r in runs)
        )
    lls = [r.ll_hat for r in converged]
    if max(lls) - min(lls) > DISAGREEMENT_TOLERANCE:
        warnings.warn(
            f"converged starts disagree: log-likelihood spread "
            f"{max(lls) - min(lls):.3e} exceeds {DISAGREEMENT_TOLERANCE:g}",
            EstimationDisagreementWarning,
            stacklevel=2,
        )
    best = max(converged, key=lambda r: r.ll_hat)
    return best, runs
