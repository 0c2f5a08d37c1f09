"""Closed-form bias and error bounds, each a small pure function.

Every bound converts an information quantity (in nats) into a limit on the
bias or error of the reported statistic.  Bounds are returned in the same
units as sigma (or sigma squared); lower bounds may be negative (vacuous)
and are returned unclamped.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InputError

__all__ = [
    "BoundReport",
    "bias_bound",
    "bias_bound_hetero",
    "bias_bound_subexp",
    "abs_error_bound",
    "sq_error_bound",
    "sq_error_lower_bound",
    "sq_error_upper_bound_entropy",
    "topk_bound",
    "pvalue_bound",
    "regret_bound",
    "vc_info_bound",
    "overfit_bound",
    "multistep_error_bound",
    "fourth_root_schedule",
    "FOURTH_ROOT",
]

# operative universal constants for the absolute/squared error bounds
C_ABS = 36.0
C_SQ = 10.0


@dataclass(frozen=True)
class BoundReport:
    """Pairs a bound value with the empirical quantity it limits."""

    name: str
    value: float
    empirical: float
    satisfied: bool
    slack: float
    lower: bool = False

    @classmethod
    def check(cls, name, value, empirical, tolerance=0.0, lower=False):
        if lower:
            ok = empirical >= value - tolerance
        else:
            ok = empirical <= value + tolerance
        return cls(
            name=name,
            value=float(value),
            empirical=float(empirical),
            satisfied=bool(ok),
            slack=float(value - empirical),
            lower=lower,
        )


def _check_sigma_I(sigma, I):
    if np.any(np.asarray(sigma) <= 0):
        raise InputError("sigma must be positive")
    if I < 0:
        raise InputError("information must be non-negative")


def bias_bound(sigma, I):
    """Bias limit sigma * sqrt(2 I) for sigma-sub-Gaussian statistics."""
    _check_sigma_I(sigma, I)
    return sigma * np.sqrt(2.0 * I)


def bias_bound_hetero(sigmas, selection_pmf, I):
    """Unequal-variance bias limit sqrt(sum_i p_i sigma_i^2) * sqrt(2 I)."""
    sigmas = np.asarray(sigmas, dtype=float)
    p = np.asarray(selection_pmf, dtype=float)
    if sigmas.shape != p.shape:
        raise InputError("sigmas and selection_pmf must have matching shape")
    _check_sigma_I(sigmas, I)
    return float(np.sqrt(p @ sigmas ** 2) * np.sqrt(2.0 * I))


def bias_bound_subexp(sigma, b, I):
    """Bias limit for (sigma, b)-sub-exponential statistics.

    Always b*I + sigma^2/(2b); when b < 1 the tighter tail parameter sqrt(b)
    is also admissible, giving sqrt(b)*I + sigma^2/(2 sqrt(b)).
    """
    _check_sigma_I(sigma, I)
    if b <= 0:
        raise InputError("b must be positive")
    value = b * I + sigma ** 2 / (2.0 * b)
    if b < 1.0:
        rb = np.sqrt(b)
        value = min(value, rb * I + sigma ** 2 / (2.0 * rb))
    return value


def abs_error_bound(sigma, I):
    """Absolute-error limit sigma + 36 sigma sqrt(2 I)."""
    _check_sigma_I(sigma, I)
    return sigma + C_ABS * sigma * np.sqrt(2.0 * I)


def sq_error_bound(sigma, I):
    """Squared-error limit 1.25 sigma^2 + 10 sigma^2 I."""
    _check_sigma_I(sigma, I)
    return 1.25 * sigma ** 2 + C_SQ * sigma ** 2 * I


def sq_error_lower_bound(H):
    """Entropy lower bound H/8 - 2.5 on the MSE; may be negative (vacuous)."""
    if H < 0:
        raise InputError("entropy must be non-negative")
    return H / 8.0 - 2.5


def sq_error_upper_bound_entropy(H):
    """Entropy upper bound 10 H + 1.5 on the MSE (unit-variance statistics)."""
    if H < 0:
        raise InputError("entropy must be non-negative")
    return 10.0 * H + 1.5


def topk_bound(sigma, m, m0):
    """Bias limit sigma * sqrt(2 ln(m/m0)) for top-m0 uniform selection."""
    if not 1 <= m0 <= m:
        raise InputError(f"m0={m0} out of range for m={m}")
    _check_sigma_I(sigma, 0.0)
    return sigma * np.sqrt(2.0 * np.log(m / m0))


def pvalue_bound(epsilon, I_TZ):
    """Limit eps + sqrt(I(T;Z_eps) / ln(1/(2 eps))) on P(p_T < eps), capped at 1."""
    if not 0.0 < epsilon < 0.5:
        raise InputError("epsilon must lie in (0, 1/2)")
    if I_TZ < 0:
        raise InputError("information must be non-negative")
    return min(1.0, epsilon + np.sqrt(I_TZ / np.log(1.0 / (2.0 * epsilon))))


def regret_bound(sigma, H_xstar):
    """Bayes-regret limit sigma * sqrt(2 H(X*))."""
    _check_sigma_I(sigma, H_xstar)
    return sigma * np.sqrt(2.0 * H_xstar)


def vc_info_bound(d, n):
    """Information cap d * max(1, ln(n e / d)) for a VC-dimension-d class."""
    if d < 1 or n < 1:
        raise InputError("d and n must be >= 1")
    return d * max(1.0, np.log(n * np.e / d))


def overfit_bound(I, n):
    """Generalization-gap limit sqrt(I / (2n))."""
    if I < 0 or n < 1:
        raise InputError("need I >= 0 and n >= 1")
    return np.sqrt(I / (2.0 * n))


FOURTH_ROOT = "fourth_root"


def fourth_root_schedule(sigma, k):
    """Noise schedule omega_j = sigma * j^(1/4) for j = 1..k."""
    if k < 1:
        raise InputError("k must be >= 1")
    return sigma * np.arange(1, k + 1) ** 0.25


def multistep_error_bound(sigma, n, k, schedule=FOURTH_ROOT):
    """Error limit after k noisy queries plus one final report.

    Evaluates sigma/sqrt(n) + sqrt(2 omega_{k+1} / (pi n)) + 36 sigma
    sqrt(2 I_hat / n) with the budget I_hat = (sigma^2 / 2) sum_j omega_j^{-2}
    over the first k queries.  ``schedule`` is either the literal string
    ``fourth_root`` (omega_j = sigma j^{1/4}) or an explicit list of at
    least k+1 noise levels.
    """
    if sigma <= 0 or n < 1 or k < 0:
        raise InputError("need sigma > 0, n >= 1, k >= 0")
    if schedule == FOURTH_ROOT:
        omegas = fourth_root_schedule(sigma, k + 1)
    else:
        omegas = np.asarray(schedule, dtype=float)
        if omegas.size < k + 1:
            raise InputError(f"schedule must cover k+1 = {k + 1} queries")
        if np.any(omegas <= 0):
            raise InputError("noise levels must be positive")
    info = 0.5 * sigma ** 2 * np.sum(omegas[:k] ** -2.0)
    return (
        sigma / np.sqrt(n)
        + np.sqrt(2.0 * omegas[k] / (np.pi * n))
        + C_ABS * sigma * np.sqrt(2.0 * info / n)
    )
