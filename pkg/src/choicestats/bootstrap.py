"""Person-level bootstrap: resampling, replicate estimation, covariance,
empirical and highest-density intervals, empirical p-values, asymmetry.

Resampling draws whole persons with replacement, so within-person
correlation across repeated choices survives into the replicate datasets.
Each replicate's seed derives deterministically from (base_seed, replicate
index); results are identical under any degree of parallelism.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ChoiceStatsError, ReplicateFailureWarning
from .estimation import EstimationOptions, estimate_design
from .inference import ConfidenceInterval
from .model import Dataset, Observation, build_design
from .util import parallel_map, seed_from

#: Below this many draws, empirical quantiles are too coarse to report.
MIN_DRAWS = 10

# Positions within 1e-9 of an integer use exact order statistics.
_INTEGRAL_TOLERANCE = 1e-9


@dataclass
class BootstrapResult:
    s_samples: int
    base_seed: int | None
    draws: np.ndarray
    converged: np.ndarray
    n_failed: int
    names: list[str]
    statuses: tuple[str, ...]

    def converged_draws(self):
        return self.draws[self.converged]

    @property
    def s_converged(self):
        return int(self.converged.sum())


def _resample_indices(n_persons, seed):
    return np.random.default_rng(seed).integers(0, n_persons, n_persons)


def resample_persons(dataset, seed):
    """One person-level resample of the same person count as the original.

    A person drawn m times contributes m full copies of their observations;
    identifiers get a "~slot" suffix so the copies stay distinct.
    """
    dataset.validate()
    persons = dataset.persons()
    by_person = {pid: [] for pid in persons}
    for obs in dataset.observations:
        by_person[obs.person_id].append(obs)
    indices = _resample_indices(len(persons), seed)
    observations = []
    for slot, idx in enumerate(indices):
        for obs in by_person[persons[idx]]:
            observations.append(
                Observation(
                    person_id=f"{obs.person_id}~{slot}",
                    obs_id=f"{obs.obs_id}~{slot}",
                    chosen=obs.chosen,
                    availability=obs.availability,
                    attributes=obs.attributes,
                )
            )
    return Dataset(list(dataset.alternatives), observations)


def _run_replicates(job):
    design, options, base_seed, first, count = job
    out = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for s in range(first, first + count):
            indices = _resample_indices(design.n_persons, seed_from(base_seed, s))
            try:
                result = estimate_design(design.take_persons(indices), options)
                out.append((result.params_hat, result.status, result.converged))
            except (ChoiceStatsError, ValueError):
                out.append((np.full(design.k, np.nan), "failed", False))
    return out


def bootstrap_run(dataset, spec, options=None, s_samples=400, base_seed=0, jobs=1):
    """Estimate on s_samples person-level resamples.

    Replicate s resamples with a seed derived from (base_seed, s) and
    estimates from the declared start values. Failed replicates are kept as
    NaN rows, flagged not-converged, and excluded downstream; more than 10%
    failures raises ReplicateFailureWarning.
    """
    if s_samples < 2:
        raise ValueError(f"s_samples must be >= 2, got {s_samples}")
    options = options or EstimationOptions()
    design = build_design(dataset, spec)

    jobs = max(1, int(jobs))
    n_chunks = min(jobs, s_samples) if jobs > 1 else 1
    bounds = np.linspace(0, s_samples, n_chunks + 1).astype(int)
    chunks = [
        (design, options, base_seed, int(a), int(b - a))
        for a, b in zip(bounds[:-1], bounds[1:])
        if b > a
    ]
    results = []
    for chunk_out in parallel_map(_run_replicates, chunks, jobs=jobs):
        results.extend(chunk_out)

    draws = np.vstack([r[0] for r in results])
    statuses = tuple(r[1] for r in results)
    converged = np.array([r[2] for r in results], dtype=bool)
    n_failed = int(s_samples - converged.sum())
    if n_failed > 0.1 * s_samples:
        tally = {}
        for status, ok in zip(statuses, converged):
            if not ok:
                tally[status] = tally.get(status, 0) + 1
        warnings.warn(
            f"{n_failed} of {s_samples} bootstrap replicates failed "
            f"(by status: {tally}); downstream statistics use the "
            f"{s_samples - n_failed} converged replicates only",
            ReplicateFailureWarning,
            stacklevel=2,
        )
    return BootstrapResult(
        s_samples=int(s_samples),
        base_seed=int(base_seed),
        draws=draws,
        converged=converged,
        n_failed=n_failed,
        names=list(design.free_names),
        statuses=statuses,
    )


def bootstrap_covariance(result):
    """Sample covariance of the converged draws (divisor S_conv - 1)."""
    draws = result.converged_draws()
    if draws.shape[0] < 2:
        raise ValueError(
            f"need at least 2 converged replicates for a covariance, got {draws.shape[0]}"
        )
    centered = draws - draws.mean(axis=0)
    cov = centered.T @ centered / (draws.shape[0] - 1)
    return (cov + cov.T) / 2.0


def _check_draws(draws):
    draws = np.asarray(draws, dtype=float).ravel()
    draws = draws[np.isfinite(draws)]
    if draws.size < MIN_DRAWS:
        raise ValueError(f"need at least {MIN_DRAWS} draws, got {draws.size}")
    return np.sort(draws)


def _position_value(sorted_draws, position, notes):
    # 1-indexed position into the order statistics, linearly interpolated.
    s = sorted_draws.size
    if position < 1.0 or position > s:
        notes.append("requested level needs positions outside the sample; bound clamped")
        position = min(max(position, 1.0), float(s))
    nearest = round(position)
    if abs(position - nearest) <= _INTEGRAL_TOLERANCE:
        return float(sorted_draws[int(nearest) - 1])
    low = math.floor(position)
    frac = position - low
    return float(sorted_draws[low - 1] + frac * (sorted_draws[low] - sorted_draws[low - 1]))


def quantile_interval(draws, level, center):
    """Empirical CI from the alpha/2 and 1 - alpha/2 quantiles of the draws.

    With k = alpha/2 * S integral, the bounds are the k-th and (S-k+1)-th
    order statistics exactly; otherwise linear interpolation between
    neighbouring order statistics, with a note saying so. The asymmetry
    index is computed against the supplied center (the full-data MLE).
    """
    level = float(level)
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must be in (0, 1), got {level}")
    sorted_draws = _check_draws(draws)
    s = sorted_draws.size
    alpha = 1.0 - level
    k = alpha / 2.0 * s
    notes = []
    if abs(k - round(k)) > _INTEGRAL_TOLERANCE:
        notes.append(
            f"alpha/2 * S = {k:.6g} is non-integral; bounds linearly "
            "interpolated between order statistics"
        )
    lower = _position_value(sorted_draws, k, notes)
    upper = _position_value(sorted_draws, (1.0 - alpha / 2.0) * s + 1.0, notes)
    return ConfidenceInterval(
        lower=lower,
        upper=upper,
        level=level,
        method="bootstrap_quantile",
        asymmetry_index=asymmetry_index(lower, float(center), upper) if upper > lower else 0.0,
        notes=tuple(notes),
    )


def hpd_interval(draws, level, center):
    """Narrowest interval spanned by ceil(level * S) consecutive order
    statistics; ties broken toward the lower window start."""
    level = float(level)
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must be in (0, 1), got {level}")
    sorted_draws = _check_draws(draws)
    s = sorted_draws.size
    m = math.ceil(level * s)
    m = max(m, 2)
    widths = sorted_draws[m - 1 :] - sorted_draws[: s - m + 1]
    best = int(np.argmin(widths))
    lower = float(sorted_draws[best])
    upper = float(sorted_draws[best + m - 1])
    return ConfidenceInterval(
        lower=lower,
        upper=upper,
        level=level,
        method="hpd",
        asymmetry_index=asymmetry_index(lower, float(center), upper) if upper > lower else 0.0,
    )


@dataclass(frozen=True)
class EmpiricalPValue:
    """Share of draws on the other side of zero from the MLE.

    A zero count means "no crossing observed in S draws", reported as the
    resolution bound "< 1/S" rather than an exact 0.
    """

    crossings: int
    s_converged: int

    @property
    def value(self):
        return self.crossings / self.s_converged

    @property
    def below_resolution(self):
        return self.crossings == 0

    def display(self, digits=3):
        if self.below_resolution:
            return f"< {1.0 / self.s_converged:.{digits}g}"
        return f"{self.value:.{digits}f}"


def empirical_p_value(draws, mle):
    """Empirical one-sided p: draws with sign opposite the MLE, over S_conv.

    Draws exactly at zero count as crossings (the conservative reading).
    """
    mle = float(mle)
    if mle == 0.0:
        raise ValueError("empirical p-value is undefined for an MLE of exactly 0")
    sorted_draws = _check_draws(draws)
    if mle > 0.0:
        crossings = int(np.sum(sorted_draws <= 0.0))
    else:
        crossings = int(np.sum(sorted_draws >= 0.0))
    return EmpiricalPValue(crossings=crossings, s_converged=sorted_draws.size)


def asymmetry_index(lower, center, upper):
    """((U - M) - (M - L)) / (U - L); 0 for an interval centred on M."""
    lower = float(lower)
    upper = float(upper)
    if not lower < upper:
        raise ValueError(f"bounds must satisfy lower < upper, got [{lower}, {upper}]")
    center = float(center)
    return ((upper - center) - (center - lower)) / (upper - lower)


def save_draws(result, path):
    """Persist draws to CSV: replicate, converged, one column per parameter."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["replicate", "converged"] + list(result.names))
        for s in range(result.s_samples):
            writer.writerow(
                [s, int(result.converged[s])] + [repr(float(v)) for v in result.draws[s]]
            )


def load_draws(path):
    """Rebuild a BootstrapResult from a draws CSV (base seed unknown)."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        names = header[2:]
        draws = []
        converged = []
        for row in reader:
            converged.append(bool(int(row[1])))
            draws.append([float(v) for v in row[2:]])
    draws = np.asarray(draws, dtype=float)
    converged = np.asarray(converged, dtype=bool)
    return BootstrapResult(
        s_samples=draws.shape[0],
        base_seed=None,
        draws=draws,
        converged=converged,
        n_failed=int(draws.shape[0] - converged.sum()),
        names=names,
        statuses=(),
    )
