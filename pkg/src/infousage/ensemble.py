"""Generative models for candidate-statistic vectors and replication batches.

A :class:`StatisticEnsemble` describes the joint distribution of the
candidate statistics phi = (phi_1, ..., phi_m); :func:`sample_batch` draws
R independent replications of phi, feeds each to a selection rule and
returns a :class:`ReplicationBatch` holding the draws, the selections and
the exact per-replication conditional selection entropies.

All randomness is keyed by (seed, replication index) through the
counter-based scheme in :mod:`infousage.rng`, so batches are reproducible
bit for bit regardless of chunking or parallelism.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigurationError, InputError
from .rng import TAG_PHI, TAG_RAW, normal_rows, uniform_rows
from .selection import SelectionRule, VarianceFilterRule

GAUSSIAN_IID = "gaussian_iid"
GAUSSIAN_CORRELATED = "gaussian_correlated"
SHIFTED_EXPONENTIAL = "shifted_exponential"
BERNOULLI_UNIFORM_PVALUE = "bernoulli_uniform_pvalue"

_KINDS = (
    GAUSSIAN_IID,
    GAUSSIAN_CORRELATED,
    SHIFTED_EXPONENTIAL,
    BERNOULLI_UNIFORM_PVALUE,
)

_PSD_TOL = 1e-10


@dataclass(frozen=True)
class StatisticEnsemble:
    """Distribution of the m candidate statistics.

    ``sigma`` may be a scalar or a length-m vector of per-statistic scales.
    When ``n`` is set, the per-statistic variance is sigma^2 / n (the
    sample-mean regime used by the multi-step and classification studies).
    ``covariance`` applies to the gaussian_correlated kind only and is used
    as given (divided by n when n is set).
    """

    m: int
    means: np.ndarray
    noise_kind: str = GAUSSIAN_IID
    sigma: np.ndarray = 1.0
    covariance: Optional[np.ndarray] = None
    n: Optional[int] = None
    _chol: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.m < 1:
            raise InputError("m must be >= 1")
        if self.noise_kind not in _KINDS:
            raise InputError(f"unknown noise_kind {self.noise_kind!r}")
        means = np.broadcast_to(np.asarray(self.means, dtype=float), (self.m,)).copy()
        object.__setattr__(self, "means", means)
        sigma = np.asarray(self.sigma, dtype=float)
        if sigma.ndim not in (0, 1) or (sigma.ndim == 1 and sigma.size != self.m):
            raise InputError("sigma must be a scalar or a length-m vector")
        if np.any(sigma <= 0):
            raise InputError("sigma must be positive")
        object.__setattr__(self, "sigma", sigma)
        if self.n is not None and self.n < 1:
            raise InputError("n must be >= 1 when given")
        if self.noise_kind == BERNOULLI_UNIFORM_PVALUE and not np.allclose(means, 0.5):
            raise InputError("uniform p-value statistics have mean 1/2")
        if self.covariance is not None:
            if self.noise_kind != GAUSSIAN_CORRELATED:
                raise InputError("covariance is only valid for gaussian_correlated")
            cov = np.asarray(self.covariance, dtype=float)
            if cov.shape != (self.m, self.m) or not np.allclose(cov, cov.T):
                raise InputError("covariance must be a symmetric m x m matrix")
            if np.linalg.eigvalsh(cov).min() < -_PSD_TOL:
                raise ConfigurationError("covariance is not positive semidefinite")
            object.__setattr__(self, "covariance", cov)
            scale = 1.0 / self.n if self.n else 1.0
            # tiny jitter keeps Cholesky defined for PSD-but-singular inputs
            jitter = _PSD_TOL * max(1.0, np.trace(cov) / self.m)
            chol = np.linalg.cholesky(cov * scale + jitter * np.eye(self.m))
            object.__setattr__(self, "_chol", chol)
        elif self.noise_kind == GAUSSIAN_CORRELATED:
            raise InputError("gaussian_correlated requires a covariance matrix")

    # -- convenience constructors ------------------------------------------

    @classmethod
    def gaussian(cls, m, means=0.0, sigma=1.0, n=None):
        return cls(m=m, means=means, sigma=sigma, n=n)

    @classmethod
    def gaussian_correlated(cls, means, covariance, n=None):
        means = np.asarray(means, dtype=float)
        return cls(
            m=means.size,
            means=means,
            noise_kind=GAUSSIAN_CORRELATED,
            covariance=covariance,
            n=n,
        )

    @classmethod
    def shifted_exponential(cls, means):
        means = np.asarray(means, dtype=float)
        return cls(m=means.size, means=means, noise_kind=SHIFTED_EXPONENTIAL)

    @classmethod
    def uniform_pvalues(cls, m):
        return cls(m=m, means=0.5, noise_kind=BERNOULLI_UNIFORM_PVALUE)

    # -- sampling ----------------------------------------------------------

    @property
    def per_sigma(self):
        """Effective per-statistic noise scale (after the 1/sqrt(n) divisor)."""
        s = np.broadcast_to(self.sigma, (self.m,))
        if self.noise_kind == GAUSSIAN_CORRELATED:
            s = np.sqrt(np.diag(self.covariance))
        return s / np.sqrt(self.n) if self.n else s.copy()

    def draw(self, seed, start_rep, n_reps):
        """Rows [start_rep, start_rep + n_reps) of the phi matrix."""
        if self.noise_kind == GAUSSIAN_IID:
            z = normal_rows(seed, TAG_PHI, start_rep, n_reps, self.m)
            return self.means + z * self.per_sigma
        if self.noise_kind == GAUSSIAN_CORRELATED:
            z = normal_rows(seed, TAG_PHI, start_rep, n_reps, self.m)
            return self.means + z @ self._chol.T
        if self.noise_kind == SHIFTED_EXPONENTIAL:
            u = uniform_rows(seed, TAG_PHI, start_rep, n_reps, self.m)
            return (self.means - 1.0) - np.log(u)
        # uniform p-values
        return uniform_rows(seed, TAG_PHI, start_rep, n_reps, self.m)

    def draw_raw(self, seed, start_rep, n_reps):
        """Raw (n_reps, m, n) sample tensor for raw-data selection rules."""
        if self.n is None or self.n < 2:
            raise ConfigurationError("raw-data draws need an ensemble with n >= 2")
        if self.noise_kind != GAUSSIAN_IID:
            raise ConfigurationError("raw-data draws are defined for gaussian_iid")
        z = normal_rows(seed, TAG_RAW, start_rep, n_reps, self.m * self.n)
        z = z.reshape(n_reps, self.m, self.n)
        s = np.broadcast_to(self.sigma, (self.m,))
        return self.means[:, None] + z * s[:, None]


@dataclass
class ReplicationBatch:
    """R replications of (phi, T) plus exact conditional selection entropies.

    ``selections[r] == m`` is the fallback sentinel (threshold rules with an
    empty exceedance set); ``fallback_statistic`` names the ordinary
    coordinate that stands in for the sentinel when values are needed.
    """

    phi: np.ndarray
    selections: np.ndarray
    rule_conditional_entropy: np.ndarray
    seed: int
    R: int
    m: int
    fallback_statistic: Optional[int] = None

    def effective_selections(self):
        """Selections with the sentinel mapped to the fallback statistic."""
        sel = self.selections
        if self.fallback_statistic is None:
            return sel
        return np.where(sel == self.m, self.fallback_statistic, sel)

    def selected_values(self):
        return self.phi[np.arange(self.R), self.effective_selections()]


# default chunk keeps peak memory modest without hurting throughput
_CHUNK = 4096


def sample_batch(ensemble, rule, R, seed, chunk=_CHUNK):
    """Draw R replications of phi and apply the rule to each.

    Per-replication randomness is derived from (seed, replication index),
    so the result is independent of ``chunk`` and of execution order.
    """
    if R < 1:
        raise InputError("R must be >= 1")
    if not isinstance(rule, SelectionRule):
        raise InputError(f"rule must be a SelectionRule, got {type(rule).__name__}")
    raw = isinstance(rule, VarianceFilterRule)
    if raw and (ensemble.n is None or ensemble.n < 2):
        raise ConfigurationError(
            f"rule kind {rule.kind!r} needs a raw-data ensemble (n >= 2); "
            f"got ensemble kind {ensemble.noise_kind!r} with n={ensemble.n}"
        )
    phi = np.empty((R, ensemble.m))
    sel = np.empty(R, dtype=np.int64)
    cond = np.empty(R)
    for start in range(0, R, chunk):
        stop = min(start + chunk, R)
        if raw:
            X = ensemble.draw_raw(seed, start, stop - start)
            phi[start:stop] = X.mean(axis=2)
            sel[start:stop], cond[start:stop] = rule.select_batch_raw(X)
        else:
            block = ensemble.draw(seed, start, stop - start)
            phi[start:stop] = block
            sel[start:stop], cond[start:stop] = rule.select_batch(block, seed, start)
    return ReplicationBatch(
        phi=phi,
        selections=sel,
        rule_conditional_entropy=cond,
        seed=seed,
        R=R,
        m=ensemble.m,
        fallback_statistic=rule.fallback_statistic,
    )


def empirical_bias(batch, ensemble):
    """Monte Carlo bias/error estimates of the reported value phi_T.

    Returns a dict with ``bias`` (mean of phi_T - mu_T), ``abs_error``,
    ``sq_error`` and ``std_error`` (MC standard error of the bias).
    """
    if batch.m != ensemble.m:
        raise InputError("batch and ensemble dimensions disagree")
    idx = batch.effective_selections()
    err = batch.phi[np.arange(batch.R), idx] - ensemble.means[idx]
    return {
        "bias": float(err.mean()),
        "abs_error": float(np.abs(err).mean()),
        "sq_error": float((err ** 2).mean()),
        "std_error": float(err.std(ddof=1) / np.sqrt(batch.R)) if batch.R > 1 else 0.0,
    }
