"""Entropy and mutual-information estimation for selection processes.

The central quantity is the information usage I(T; phi) = H(T) - H(T|phi)
of a selection rule T applied to the statistic vector phi.  H(T) is
estimated by the plug-in entropy of the selection counts; H(T|phi) is
exact, because every randomized rule exposes its conditional selection
distribution.  The module also estimates the compressed-indicator
information I(T; Z_eps) used by the p-value bound, binned mutual
information between continuous pairs, and the worst-case (max-)
information of a selection distribution.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, InputError
from .ensemble import BERNOULLI_UNIFORM_PVALUE, GAUSSIAN_CORRELATED, GAUSSIAN_IID

__all__ = [
    "InfoEstimate",
    "plugin_entropy",
    "estimate_information_usage",
    "binned_mutual_information",
    "pvalue_information",
    "max_information_rank",
    "kl_selection_decomposition",
]

CORRECTION_NONE = "none"
CORRECTION_MILLER_MADOW = "miller_madow"


@dataclass(frozen=True)
class InfoEstimate:
    """An entropy/mutual-information estimate plus its provenance."""

    H_T: float
    H_T_given_phi: float
    I: float
    R: int
    correction: str
    support_size: int


def plugin_entropy(counts, correction=CORRECTION_NONE):
    """Plug-in entropy (nats) of a histogram, optionally Miller-Madow corrected.

    The Miller-Madow correction adds (support_size - 1) / (2R) to offset the
    downward bias of the plug-in estimator.
    """
    counts = np.asarray(counts, dtype=float).ravel()
    if counts.size == 0 or counts.sum() <= 0:
        raise InputError("histogram must contain at least one observation")
    if np.any(counts < 0):
        raise InputError("counts must be non-negative")
    total = counts.sum()
    p = counts[counts > 0] / total
    h = float(-(p * np.log(p)).sum())
    if correction == CORRECTION_MILLER_MADOW:
        h += (p.size - 1) / (2.0 * total)
    elif correction != CORRECTION_NONE:
        raise InputError(f"unknown correction {correction!r}")
    return h


def estimate_information_usage(batch, correction=CORRECTION_NONE):
    """Estimate I(T; phi) from a replication batch.

    H(T) comes from the plug-in entropy of the selection counts (including
    the fallback sentinel as its own outcome).  H(T|phi) is the exact mean
    of the per-replication conditional entropies, so the only estimation
    error lives in H(T).  I is floored at 0 because the correction can push
    the difference slightly negative.
    """
    counts = np.bincount(batch.selections, minlength=batch.m + 1)
    h_t = plugin_entropy(counts, correction)
    h_cond = float(batch.rule_conditional_entropy.mean())
    return InfoEstimate(
        H_T=h_t,
        H_T_given_phi=h_cond,
        I=max(0.0, h_t - h_cond),
        R=batch.R,
        correction=correction,
        support_size=int((counts > 0).sum()),
    )


def _quantile_bin(x, bins):
    # equal-probability marginal bins; interior edges only
    edges = np.quantile(x, np.linspace(0, 1, bins + 1)[1:-1])
    return np.searchsorted(edges, x, side="right")


def binned_mutual_information(x, y, bins=16):
    """Plug-in MI (nats) of the 2-D histogram on marginal quantile bins."""
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.size != y.size:
        raise InputError("x and y must have equal length")
    if x.size < 1000:
        raise InputError("binned MI needs at least 1000 samples")
    if bins < 4:
        raise InputError("bins must be >= 4")
    bx = _quantile_bin(x, bins)
    by = _quantile_bin(y, bins)
    joint = np.bincount(bx * bins + by, minlength=bins * bins)
    h_x = plugin_entropy(np.bincount(bx, minlength=bins))
    h_y = plugin_entropy(np.bincount(by, minlength=bins))
    return max(0.0, h_x + h_y - plugin_entropy(joint))


def pvalue_information(batch, ensemble, epsilon):
    """Information between the selection and the small-p-value indicators.

    Builds Z_{eps,i} = 1(phi_i < eps), estimates I(T; Z_eps) by plug-in over
    the joint distribution of (T, Z row pattern), and reports the empirical
    frequency of the selected p-value falling below eps.
    """
    if ensemble.noise_kind != BERNOULLI_UNIFORM_PVALUE:
        raise ConfigurationError(
            "p-value information is defined for uniform p-value ensembles"
        )
    if not 0.0 < epsilon < 0.5:
        raise InputError("epsilon must lie in (0, 1/2)")
    m = batch.m
    if m > 20:
        warnings.warn(
            "with m > 20 the hashed pattern entropy is a lower bound on the "
            "true pattern entropy; I(T; Z_eps) may be underestimated",
            stacklevel=2,
        )
    Z = batch.phi < epsilon
    # hash each binary row to an integer pattern (exact for m <= 20)
    weights = np.uint64(1) << np.arange(min(m, 62), dtype=np.uint64)
    pattern = (Z[:, : weights.size].astype(np.uint64) * weights).sum(axis=1)
    sel = batch.effective_selections().astype(np.uint64)

    def entropy_of(codes):
        _, counts = np.unique(codes, return_counts=True)
        return plugin_entropy(counts)

    h_t = entropy_of(sel)
    h_z = entropy_of(pattern)
    h_tz = entropy_of(pattern * np.uint64(m + 1) + sel)
    i_tz = max(0.0, h_t + h_z - h_tz)
    p_small = float(Z[np.arange(batch.R), batch.effective_selections()].mean())
    return {"I_TZ": i_tz, "P_small": p_small}


def max_information_rank(selection_pmf, signal_index=None):
    """Worst-case information of a selection distribution.

    Returns max over the support of -ln P(T=i); zero-probability cells are
    unreachable and excluded.  When ``signal_index`` designates the single
    true signal, also returns the signal form ln((m-1) / P(T != signal)).
    """
    p = np.asarray(selection_pmf, dtype=float).ravel()
    if p.size == 0 or np.any(p < 0) or not np.isclose(p.sum(), 1.0, atol=1e-9):
        raise InputError("selection_pmf must be a valid probability vector")
    support = p[p > 0]
    i_inf = float(-np.log(support.min()))
    if signal_index is None:
        return i_inf
    if not 0 <= signal_index < p.size:
        raise InputError("signal_index out of range")
    p_miss = 1.0 - p[signal_index]
    signal_form = np.inf if p_miss <= 0 else float(np.log((p.size - 1) / p_miss))
    return {"I_inf": i_inf, "signal_form": signal_form}


def kl_selection_decomposition(batch, ensemble, min_count=30):
    """Per-index Gaussian KL decomposition of the information usage.

    For each selected index i, fits Gaussians to phi_i | T=i and to phi_i
    marginally and evaluates the closed-form KL divergence.  Indices
    selected fewer than ``min_count`` times are omitted (flagged).  Returns
    the selection frequencies, per-index divergences, their weighted sum,
    and the weighted mean-shift bound sum_i P(T=i) * Delta_i^2.
    """
    if ensemble.noise_kind not in (GAUSSIAN_IID, GAUSSIAN_CORRELATED):
        raise ConfigurationError(
            "the Gaussian KL decomposition needs a Gaussian ensemble"
        )
    sel = batch.effective_selections()
    counts = np.bincount(sel, minlength=batch.m)
    p_t = counts / batch.R
    mu = ensemble.means
    s = ensemble.per_sigma
    kl = np.full(batch.m, np.nan)
    delta_sq = np.full(batch.m, np.nan)
    omitted = []
    for i in np.flatnonzero(counts):
        if counts[i] < min_count:
            omitted.append(int(i))
            continue
        vals = batch.phi[sel == i, i]
        m1, v1 = vals.mean(), vals.var(ddof=1)
        m0, v0 = mu[i], s[i] ** 2
        kl[i] = 0.5 * (np.log(v0 / v1) + (v1 + (m1 - m0) ** 2) / v0 - 1.0)
        delta_sq[i] = (m1 - m0) ** 2
    valid = ~np.isnan(kl)
    return {
        "P_T": p_t,
        "D": kl,
        "weighted_sum": float(np.nansum(p_t[valid] * kl[valid])),
        "weighted_delta_sq": float(np.nansum(p_t[valid] * delta_sq[valid])),
        "omitted": omitted,
    }
