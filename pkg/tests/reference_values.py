"""Frozen reference fit for a six-mode commuter mode-choice model.

Fourteen coefficients: five mode constants (car is the base), six in-vehicle
travel-time coefficients, two out-of-vehicle time coefficients, and a cost
coefficient. The estimates and the three standard-error columns are input
fixtures; every derived column (t ratios, p values, interval limits, width
ratios, asymmetry indices) follows from them by the conventions under test
and is frozen here so regressions cannot drift silently. Standard errors are
reported to four significant digits, so derived quantities are checked to
the tolerances that survive that input rounding.

The bootstrap interval limits and the highest-density interval limits come
from a resampling run on the original data, which is not shipped; they are
used only as inputs to the pure-arithmetic checks (width ratios, asymmetry
indices), never as targets the estimator must reproduce.
"""

PARAM_NAMES = (
    "asc_bus",
    "asc_rail",
    "asc_taxi",
    "asc_cycle",
    "asc_walk",
    "b_tt_car",
    "b_tt_bus",
    "b_tt_rail",
    "b_tt_taxi",
    "b_tt_cycle",
    "b_tt_walk",
    "b_ovt_bus",
    "b_ovt_rail",
    "b_cost",
)

BETA_HAT = (
    -1.946, -0.4801, -4.927, -3.223, 0.2193,
    -0.1236, -0.04388, -0.04328, -0.01418, -0.07446, -0.1107,
    -0.07922, -0.1088, -0.2230,
)

SE_CLASSICAL = (
    1.507e-01, 3.119e-01, 2.970e-01, 2.140e-01, 2.447e-01,
    9.631e-03, 5.116e-03, 9.736e-03, 1.648e-02, 8.783e-03, 9.317e-03,
    9.391e-03, 1.046e-02, 1.638e-02,
)

SE_ROBUST = (
    4.977e-01, 5.793e-01, 8.850e-01, 5.122e-01, 4.431e-01,
    2.561e-02, 9.346e-03, 2.348e-02, 5.087e-02, 1.659e-02, 2.002e-02,
    5.650e-02, 2.129e-02, 3.696e-02,
)

SE_BOOTSTRAP = (
    4.772e-01, 6.067e-01, 1.014e+00, 5.307e-01, 4.451e-01,
    2.496e-02, 9.365e-03, 2.475e-02, 6.181e-02, 1.694e-02, 2.076e-02,
    5.429e-02, 2.274e-02, 3.938e-02,
)

T_CLASSICAL = (
    -12.91, -1.54, -16.59, -15.06, 0.90,
    -12.83, -8.58, -4.45, -0.86, -8.48, -11.88,
    -8.44, -10.40, -13.61,
)

T_ROBUST = (
    -3.91, -0.83, -5.57, -6.29, 0.49,
    -4.83, -4.70, -1.84, -0.28, -4.49, -5.53,
    -1.40, -5.11, -6.03,
)

T_BOOTSTRAP = (
    -4.08, -0.791, -4.86, -6.07, 0.493,
    -4.95, -4.69, -1.75, -0.229, -4.40, -5.33,
    -1.46, -4.79, -5.66,
)

# 95% interval limits implied by (estimate, se) at z = 1.9599639845400545.
CI_CLASSICAL_LOWER = (
    -2.242e+00, -1.092e+00, -5.509e+00, -3.642e+00, -2.602e-01,
    -1.425e-01, -5.391e-02, -6.237e-02, -4.647e-02, -9.168e-02, -1.290e-01,
    -9.763e-02, -1.293e-01, -2.551e-01,
)
CI_CLASSICAL_UPPER = (
    -1.651e+00, 1.313e-01, -4.345e+00, -2.803e+00, 6.988e-01,
    -1.047e-01, -3.386e-02, -2.420e-02, 1.812e-02, -5.725e-02, -9.244e-02,
    -6.082e-02, -8.833e-02, -1.909e-01,
)
CI_ROBUST_LOWER = (
    -2.922e+00, -1.616e+00, -6.662e+00, -4.226e+00, -6.491e-01,
    -1.738e-01, -6.220e-02, -8.931e-02, -1.139e-01, -1.070e-01, -1.499e-01,
    -1.900e-01, -1.506e-01, -2.955e-01,
)
CI_ROBUST_UPPER = (
    -9.709e-01, 6.553e-01, -3.192e+00, -2.219e+00, 1.088e+00,
    -7.339e-02, -2.557e-02, 2.739e-03, 8.553e-02, -4.194e-02, -7.145e-02,
    3.151e-02, -6.712e-02, -1.506e-01,
)

# Resampling-run interval limits (inputs to arithmetic checks only).
CI_BOOT_QUANTILE_LOWER = (
    -2.793e+00, -1.672e+00, -7.008e+00, -4.332e+00, -6.158e-01,
    -1.774e-01, -6.619e-02, -9.559e-02, -1.606e-01, -1.141e-01, -1.578e-01,
    -1.800e-01, -1.554e-01, -3.129e-01,
)
CI_BOOT_QUANTILE_UPPER = (
    -9.863e-01, 7.287e-01, -3.043e+00, -2.276e+00, 1.141e+00,
    -8.045e-02, -2.847e-02, 4.217e-03, 7.661e-02, -4.570e-02, -7.413e-02,
    -5.520e-04, -7.422e-02, -1.552e-01,
)
CI_HPD_LOWER = (
    -2.747e+00, -1.488e+00, -6.891e+00, -4.212e+00, -5.746e-01,
    -1.689e-01, -6.387e-02, -9.161e-02, -1.464e-01, -1.091e-01, -1.608e-01,
    -1.744e-01, -1.577e-01, -3.040e-01,
)
CI_HPD_UPPER = (
    -9.574e-01, 8.339e-01, -3.024e+00, -2.209e+00, 1.150e+00,
    -7.474e-02, -2.653e-02, 8.041e-03, 7.949e-02, -4.120e-02, -7.887e-02,
    1.767e-03, -7.482e-02, -1.501e-01,
)

WIDTH_RATIO_ROBUST_CLASSICAL = (
    3.30, 1.86, 2.98, 2.39, 1.81,
    2.66, 1.83, 2.41, 3.09, 1.89, 2.15,
    6.02, 2.03, 2.26,
)

WIDTH_RATIO_BOOT_ROBUST = (
    0.93, 1.06, 1.14, 1.02, 1.01,
    0.97, 1.03, 1.08, 1.19, 1.05, 1.07,
    0.81, 0.97, 1.09,
)

WIDTH_RATIO_HPD_QUANTILE = (
    0.99, 0.97, 0.98, 0.97, 0.98,
    0.97, 0.99, 1.00, 0.95, 0.99, 0.98,
    0.98, 1.02, 0.98,
)

ASYMMETRY_BOOT_QUANTILE = (
    0.06, 0.01, -0.05, -0.08, 0.05,
    -0.11, -0.18, -0.05, -0.23, -0.16, -0.13,
    -0.12, -0.15, -0.14,
)

ASYMMETRY_HPD = (
    0.11, 0.13, -0.02, 0.01, 0.08,
    0.04, -0.07, 0.03, -0.17, -0.02, -0.22,
    -0.08, -0.18, -0.05,
)

# One-sided/two-sided p fixtures for the coefficients not significant at 1%.
# Keyed by name: (p one-sided, p two-sided) from the classical t ratio.
P_CLASSICAL_PAIRS = {
    "asc_rail": (0.062, 0.124),
    "asc_walk": (0.185, 0.370),
    "b_tt_taxi": (0.195, 0.390),
}
