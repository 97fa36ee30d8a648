"""Distribution kernels, hypothesis tests, and asymptotic intervals.

The normal CDF is evaluated through the complementary error function, always
at |x|, so the two tails come from the same computation and Φ(x) + Φ(-x)
sums to 1.0 exactly in floating point. The chi-square CDF is a regularized
incomplete gamma evaluated by series or continued fraction, with the upper
tail computed directly so small p-values keep relative precision.

Tests: t-ratio (with explicit one/two-sided handling), scalar Wald,
likelihood ratio, Lagrange multiplier, and the two-one-sided procedure for
parameters constrained to an interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import IdentificationError, NestingError
from .linalg import solve_positive_definite

_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)

# Incomplete-gamma evaluation: relative convergence target and iteration cap.
_GAMMA_EPS = 1e-16
_GAMMA_MAX_ITER = 600
_FPMIN = 1e-300

#: Log-likelihood slack allowed before a "restricted" model beating the
#: general one is treated as a nesting violation.
NESTING_TOLERANCE = 1e-8

T_SIDEDNESS = ("less", "greater", "two_sided", "auto")


def normal_cdf(x):
    """Standard normal CDF Φ(x).

    The tail is computed once at |x| via erfc and reflected, so the pair
    (Φ(x), Φ(-x)) always sums to exactly 1.0.
    """
    x = float(x)
    if math.isnan(x):
        raise ValueError("normal_cdf requires a finite argument")
    tail = 0.5 * math.erfc(abs(x) / _SQRT2)
    return tail if x < 0 else 1.0 - tail


def normal_pdf(x):
    x = float(x)
    return math.exp(-0.5 * x * x) / _SQRT2PI


def normal_quantile(p):
    """Inverse of normal_cdf by bisection plus Newton polish.

    Root-finding on the forward CDF keeps quantiles and the CDF mutually
    consistent to 1e-12; there is no separate approximation to disagree with.
    """
    p = float(p)
    if not 0.0 < p < 1.0:
        raise ValueError(f"quantile level must be in (0, 1), got {p}")
    lo, hi = -40.0, 40.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if normal_cdf(mid) < p:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    for _ in range(8):
        err = normal_cdf(x) - p
        slope = normal_pdf(x)
        if slope <= 0.0:
            break
        step = err / slope
        x -= step
        x = min(max(x, lo), hi)
        if abs(step) <= 1e-13 * max(1.0, abs(x)):
            break
    return x


def z_for_level(level):
    """Two-sided critical value z with Φ(z) = 1 - (1-level)/2."""
    level = float(level)
    if not 0.0 < level < 1.0:
        raise ValueError(f"confidence level must be in (0, 1), got {level}")
    return normal_quantile(1.0 - (1.0 - level) / 2.0)


def _gamma_p_series(a, x):
    # Lower regularized gamma by power series; valid fastest for x < a + 1.
    if x == 0.0:
        return 0.0
    log_prefactor = a * math.log(x) - x - math.lgamma(a)
    term = 1.0 / a
    total = term
    n = a
    for _ in range(_GAMMA_MAX_ITER):
        n += 1.0
        term *= x / n
        total += term
        if abs(term) < abs(total) * _GAMMA_EPS:
            return total * math.exp(log_prefactor)
    raise ArithmeticError(f"incomplete gamma series did not converge for a={a}, x={x}")


def _gamma_q_continued_fraction(a, x):
    # Upper regularized gamma by Lentz's continued fraction; for x >= a + 1.
    log_prefactor = a * math.log(x) - x - math.lgamma(a)
    b = x + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / b if b != 0.0 else 1.0 / _FPMIN
    h = d
    for i in range(1, _GAMMA_MAX_ITER + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _GAMMA_EPS:
            return math.exp(log_prefactor) * h
    raise ArithmeticError(f"incomplete gamma fraction did not converge for a={a}, x={x}")


def _check_chisq_args(x, df):
    x = float(x)
    if math.isnan(x) or x < 0.0:
        raise ValueError(f"chi-square statistic must be >= 0, got {x}")
    df_value = float(df)
    if not df_value.is_integer() or df_value < 1:
        raise ValueError(f"degrees of freedom must be a positive integer, got {df}")
    return x, df_value


def chisq_cdf(x, df):
    """Chi-square CDF: regularized lower incomplete gamma P(df/2, x/2)."""
    x, df = _check_chisq_args(x, df)
    a = df / 2.0
    half = x / 2.0
    if half < a + 1.0:
        return _gamma_p_series(a, half)
    return 1.0 - _gamma_q_continued_fraction(a, half)


def chisq_sf(x, df):
    """Upper tail 1 - chisq_cdf, computed directly for far-tail precision."""
    x, df = _check_chisq_args(x, df)
    a = df / 2.0
    half = x / 2.0
    if half < a + 1.0:
        return 1.0 - _gamma_p_series(a, half)
    return _gamma_q_continued_fraction(a, half)


@dataclass(frozen=True)
class TestResult:
    method: str
    statistic: float
    df: int | None
    sidedness: str
    p_value: float
    h0_description: str
    notes: tuple[str, ...] = ()


@dataclass(frozen=True)
class ConfidenceInterval:
    lower: float
    upper: float
    level: float
    method: str
    asymmetry_index: float
    notes: tuple[str, ...] = ()

    @property
    def width(self):
        return self.upper - self.lower


def t_test(estimate, se, h0_value=0.0, sidedness="auto"):
    """t-ratio test of H0: value = h0_value.

    "auto" resolves to the one-sided alternative matching the sign of
    (estimate - h0_value); a declared direction is honoured even when the
    estimate falls on the null side, with a note flagging the sign conflict.
    The resolved direction is always recorded.
    """
    se = float(se)
    if not se > 0.0:
        raise ValueError(f"standard error must be positive, got {se}")
    if sidedness not in T_SIDEDNESS:
        raise ValueError(f"sidedness must be one of {T_SIDEDNESS}, got '{sidedness}'")
    estimate = float(estimate)
    h0_value = float(h0_value)
    t = (estimate - h0_value) / se
    notes = ()

    resolved = sidedness
    if sidedness == "auto":
        resolved = "less" if t < 0.0 else "greater"
    elif sidedness == "less" and t > 0.0:
        notes = ("estimate lies on the null side of the declared one-sided alternative",)
    elif sidedness == "greater" and t < 0.0:
        notes = ("estimate lies on the null side of the declared one-sided alternative",)

    if resolved == "less":
        p = normal_cdf(t)
        tag = "one_sided_less"
        h1 = f"value < {h0_value:g}"
    elif resolved == "greater":
        p = normal_cdf(-t)
        tag = "one_sided_greater"
        h1 = f"value > {h0_value:g}"
    else:
        p = 2.0 * normal_cdf(-abs(t))
        tag = "two_sided"
        h1 = f"value != {h0_value:g}"

    return TestResult(
        method="t_ratio",
        statistic=t,
        df=None,
        sidedness=tag,
        p_value=p,
        h0_description=f"H0: value = {h0_value:g} vs H1: {h1}",
        notes=notes,
    )


def wald_test(estimate, se, h0_value=0.0):
    """Scalar Wald test: W = t^2 against chi-square with 1 df.

    Equals the two-sided t-ratio p-value, since the square of a standard
    normal is chi-square(1).
    """
    se = float(se)
    if not se > 0.0:
        raise ValueError(f"standard error must be positive, got {se}")
    t = (float(estimate) - float(h0_value)) / se
    w = t * t
    return TestResult(
        method="wald",
        statistic=w,
        df=1,
        sidedness="chi_square",
        p_value=chisq_sf(w, 1),
        h0_description=f"H0: value = {float(h0_value):g} vs H1: value != {float(h0_value):g}",
    )


def lr_test(ll_general, ll_restricted, d):
    """Likelihood ratio test: LR = 2(LL_general - LL_restricted) ~ chi2(d).

    The general model must nest the restricted one, so its log-likelihood can
    fall below the restricted one only by optimizer noise; beyond 1e-8 that
    is treated as a nesting violation.
    """
    ll_general = float(ll_general)
    ll_restricted = float(ll_restricted)
    d_value = float(d)
    if not d_value.is_integer() or d_value < 1:
        raise ValueError(f"number of restrictions must be a positive integer, got {d}")
    if ll_general < ll_restricted - NESTING_TOLERANCE:
        raise NestingError(
            f"general log-likelihood {ll_general:.6f} is below the restricted "
            f"one {ll_restricted:.6f}; the models are not nested or an "
            "optimisation failed"
        )
    statistic = max(0.0, 2.0 * (ll_general - ll_restricted))
    return TestResult(
        method="lr",
        statistic=statistic,
        df=int(d_value),
        sidedness="chi_square",
        p_value=chisq_sf(statistic, int(d_value)),
        h0_description=f"H0: {int(d_value)} restriction(s) hold",
    )


def lm_test(score_at_restricted, info_at_restricted, d):
    """Lagrange multiplier test: LM = G' I^-1 G ~ chi2(d).

    Score and information must belong to the GENERAL model evaluated at the
    restricted estimates.
    """
    g = np.asarray(score_at_restricted, dtype=float)
    info = np.asarray(info_at_restricted, dtype=float)
    d_value = float(d)
    if not d_value.is_integer() or d_value < 1:
        raise ValueError(f"number of restrictions must be a positive integer, got {d}")
    if g.ndim != 1 or info.shape != (g.size, g.size):
        raise ValueError(
            f"score of length {g.size} needs a {g.size}x{g.size} information "
            f"matrix, got shape {info.shape}"
        )
    solved = solve_positive_definite(info, g, name="information matrix")
    statistic = max(0.0, float(g @ solved))
    return TestResult(
        method="lm",
        statistic=statistic,
        df=int(d_value),
        sidedness="chi_square",
        p_value=chisq_sf(statistic, int(d_value)),
        h0_description=f"H0: {int(d_value)} restriction(s) hold",
    )


def lm_test_at(design, params, d):
    """LM test from a compiled general-model design at restricted estimates.

    Information defaults to the negative analytic Hessian; when that is not
    invertible the BHHH outer product of person-grouped scores substitutes.
    """
    params = np.asarray(params, dtype=float)
    gradient = design.gradient(params)
    try:
        return lm_test(gradient, -design.hessian(params), d)
    except IdentificationError:
        rows = design.score(params, grouping="person")
        return lm_test(gradient, rows.T @ rows, d)


def asymptotic_ci(estimate, se, level=0.95, method="asymptotic_classical"):
    """Normal-theory interval estimate +- z * se at the given level."""
    estimate = float(estimate)
    se = float(se)
    if se < 0.0:
        raise ValueError(f"standard error must be >= 0, got {se}")
    z = z_for_level(level)
    return ConfidenceInterval(
        lower=estimate - z * se,
        upper=estimate + z * se,
        level=float(level),
        method=method,
        asymmetry_index=0.0,
    )


def bounded_parameter_test(estimate, se, lower_bound, upper_bound):
    """Two one-sided tests for a parameter constrained to an interval.

    Returns (test against the upper bound with H1 below it, test against the
    lower bound with H1 above it, probability mass outside the interval under
    the asymptotic normal).
    """
    lower_bound = float(lower_bound)
    upper_bound = float(upper_bound)
    if not lower_bound < upper_bound:
        raise ValueError(
            f"bounds must satisfy lower < upper, got [{lower_bound}, {upper_bound}]"
        )
    se = float(se)
    if not se > 0.0:
        raise ValueError(f"standard error must be positive, got {se}")
    estimate = float(estimate)
    at_upper = t_test(estimate, se, h0_value=upper_bound, sidedness="less")
    at_lower = t_test(estimate, se, h0_value=lower_bound, sidedness="greater")
    p_outside = normal_cdf((lower_bound - estimate) / se) + normal_cdf(
        -(upper_bound - estimate) / se
    )
    return at_upper, at_lower, p_outside
