"""Least Angle Regression on synthetic sparse data, with the information
usage of its selection path.

The experiment: a fixed design X (iid standard normal entries, rows then
normalized to unit sample variance), a sparse coefficient vector whose
first ``n_signals`` entries equal the signal strength s, and Gaussian
response noise.  LARS enters features in order of maximal absolute
correlation with the residual; each entry event is an adaptive selection,
so the per-step entry distribution under noise resampling gives a plug-in
information estimate and a matching bias bound for the univariate
coefficient of the entered feature.

The path implementation follows the classical equiangular construction:
at each step, move along the direction making equal angles with all active
(sign-adjusted) columns until an inactive column reaches the active
correlation level.
"""

from dataclasses import dataclass

import numpy as np

from .bounds import bias_bound_hetero
from .errors import InputError
from .infotheory import plugin_entropy
from .rng import TAG_NOISE, TAG_PHI, normal_rows

__all__ = [
    "LarsExperimentConfig",
    "LarsPathResult",
    "generate_lars_data",
    "lars_path",
    "univariate_coefficients",
    "lars_information_curve",
]


@dataclass(frozen=True)
class LarsExperimentConfig:
    n_rows: int = 100
    n_features: int = 1000
    n_signals: int = 20
    signal_strength: float = 0.04
    noise_variance: float = 0.1
    n_steps: int = 20
    replications: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.n_signals > self.n_features:
            raise InputError("n_signals must not exceed n_features")
        if self.signal_strength <= 0:
            raise InputError("signal_strength must be positive")
        if self.noise_variance < 0:
            raise InputError("noise_variance must be non-negative")


@dataclass
class LarsPathResult:
    entry_order: np.ndarray
    entry_signs: np.ndarray
    univariate_true: np.ndarray
    univariate_fitted: np.ndarray
    per_step_bias: np.ndarray
    truncated: bool = False


def generate_lars_data(config, seed=None):
    """Design, responses, and true coefficients for one experiment.

    X entries are iid N(0,1); rows are then scaled to unit sample variance.
    y* = X beta is the noiseless response, y adds N(0, noise_variance)
    coordinates.
    """
    seed = config.seed if seed is None else seed
    X = normal_rows(seed, TAG_PHI, 0, config.n_rows, config.n_features)
    row_sd = X.std(axis=1, ddof=0)
    X = X / row_sd[:, None]
    beta = np.zeros(config.n_features)
    beta[: config.n_signals] = config.signal_strength
    y_star = X @ beta
    eps = np.sqrt(config.noise_variance) * normal_rows(
        seed, TAG_NOISE, 0, 1, config.n_rows
    )[0]
    return {"X": X, "y": y_star + eps, "y_star": y_star, "beta": beta}


def lars_path(X, y, n_steps, return_signs=False):
    """Ordered feature entries of the LARS path.

    Columns are centered and scaled to unit norm internally (the path is
    computed in standardized coordinates; entry order is what matters
    here).  Stops early, with a flag, if the active set becomes rank
    deficient before n_steps entries.

    Returns (entry_order, truncated), or (entry_order, entry_signs,
    truncated) with ``return_signs=True`` where entry_signs[i] is the sign
    of the entering feature's correlation with the residual at entry.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, p = X.shape
    max_steps = min(n - 1, p)
    if n_steps > max_steps:
        raise InputError(f"n_steps must be <= min(rows-1, cols) = {max_steps}")
    Xc = X - X.mean(axis=0)
    norms = np.linalg.norm(Xc, axis=0)
    scale = np.abs(X).max() + 1.0
    if np.any(norms <= 1e-12 * scale):
        raise InputError("constant column: zero norm after centering")
    Xc = Xc / norms
    r = y - y.mean()

    active = []
    signs = []
    inactive = np.ones(p, dtype=bool)
    order = np.empty(n_steps, dtype=np.int64)
    for step in range(n_steps):
        c = Xc.T @ r
        c[~inactive] = 0.0
        j = int(np.argmax(np.abs(c)))
        active.append(j)
        signs.append(np.sign(c[j]) if c[j] != 0 else 1.0)
        inactive[j] = False
        order[step] = j

        # equiangular direction over the sign-adjusted active columns
        Xa = Xc[:, active] * np.asarray(signs)
        G = Xa.T @ Xa
        try:
            ginv_one = np.linalg.solve(G, np.ones(len(active)))
        except np.linalg.LinAlgError:
            return _path_return(order[: step + 1], signs, True, return_signs)
        denom = ginv_one.sum()
        if denom <= 1e-12:
            return _path_return(order[: step + 1], signs, True, return_signs)
        A = 1.0 / np.sqrt(denom)
        u = Xa @ (A * ginv_one)

        C = float(np.abs(Xc[:, active[0]] @ r))
        if step == n_steps - 1:
            break
        a = Xc.T @ u
        # smallest positive step at which an inactive column catches up
        cj = Xc.T @ r
        with np.errstate(divide="ignore", invalid="ignore"):
            g1 = (C - cj) / (A - a)
            g2 = (C + cj) / (A + a)
        candidates = np.concatenate([g1[inactive], g2[inactive]])
        candidates = candidates[candidates > 1e-12]
        if candidates.size == 0:
            gamma = C / A  # full least-squares step; path ends after this
        else:
            gamma = min(candidates.min(), C / A)
        r = r - gamma * u
    return _path_return(order, signs, False, return_signs)


def _path_return(order, signs, truncated, return_signs):
    if return_signs:
        return order, np.asarray(signs[: len(order)]), truncated
    return order, truncated


def univariate_coefficients(X, target):
    """Per-column simple least-squares slopes <x_j, t> / <x_j, x_j>."""
    X = np.asarray(X, dtype=float)
    target = np.asarray(target, dtype=float)
    ss = (X ** 2).sum(axis=0)
    if np.any(ss == 0):
        raise InputError("zero-norm column")
    return (X.T @ target) / ss


def run_lars_replication(X, y, y_star, n_steps):
    """One LARS path plus its per-step univariate coefficient errors.

    The per-step bias is measured in the entry direction: the entering
    feature was chosen for a large absolute correlation, so the noise
    inflation of its coefficient points along the entry sign.  Raw signed
    differences cancel across replications at low signal-to-noise (entry
    signs are then symmetric), hiding the inflation.
    """
    order, signs, truncated = lars_path(X, y, n_steps, return_signs=True)
    b_true = univariate_coefficients(X, y_star)
    b_fit = univariate_coefficients(X, y)
    return LarsPathResult(
        entry_order=order,
        entry_signs=signs,
        univariate_true=b_true[order],
        univariate_fitted=b_fit[order],
        per_step_bias=signs * (b_fit[order] - b_true[order]),
        truncated=truncated,
    )


def lars_information_curve(config):
    """Per-step information, bias, and bound under noise resampling.

    X and y* stay fixed; the response noise is regenerated per replication
    (the path's randomness is then exactly the selection randomness).  For
    step i the plug-in entropy of the entry distribution estimates the
    information usage of that selection, and the matching bias bound uses
    per-feature coefficient standard deviations weighted by the empirical
    entry frequencies.  Bias is measured in the entry direction (see
    :func:`run_lars_replication`).

    Two running summaries over steps 1..i are reported: the running mean of
    the per-step bias, and the per-feature share of the joint path
    information, sqrt(2 H(T_1..T_i) / i) in coefficient units, the
    average-per-selected-feature information usage of reporting i
    coefficients.
    """
    if config.replications < 200:
        raise InputError("need at least 200 replications")
    data = generate_lars_data(config)
    X, y_star = data["X"], data["y_star"]
    R, k = config.replications, config.n_steps
    b_true = univariate_coefficients(X, y_star)

    entries = np.empty((R, k), dtype=np.int64)
    signs = np.empty((R, k))
    errs = np.empty((R, k))
    # univariate slopes are linear in y, so the coefficient error of the
    # entered feature is x_j' eps / ||x_j||^2
    ss = (X ** 2).sum(axis=0)
    noise_sd = np.sqrt(config.noise_variance)
    for r in range(R):
        eps = noise_sd * normal_rows(config.seed, TAG_NOISE, r, 1, config.n_rows)[0]
        y = y_star + eps
        order, sgn, _ = lars_path(X, y, k, return_signs=True)
        entries[r] = order[:k]
        signs[r] = sgn[:k]
        errs[r] = ((X.T @ eps) / ss)[order[:k]]
    bias = signs * errs
    sigma_coef = noise_sd / np.sqrt(ss)

    per_step_I = np.empty(k)
    per_step_bound = np.empty(k)
    per_step_bias = bias.mean(axis=0)
    per_step_se = bias.std(axis=0, ddof=1) / np.sqrt(R)
    avg_sigma_sq = np.empty(k)
    for i in range(k):
        counts = np.bincount(entries[:, i], minlength=config.n_features)
        per_step_I[i] = plugin_entropy(counts)
        pmf = counts / R
        per_step_bound[i] = bias_bound_hetero(sigma_coef, pmf, per_step_I[i])
        avg_sigma_sq[i] = pmf @ sigma_coef ** 2

    # joint path information per selected feature
    joint_H = np.empty(k)
    for i in range(k):
        _, counts = np.unique(entries[:, : i + 1], axis=0, return_counts=True)
        joint_H[i] = plugin_entropy(counts)

    steps = np.arange(1, k + 1)
    sigma_run = np.sqrt(np.cumsum(avg_sigma_sq) / steps)
    return {
        "step": steps,
        "I_hat": per_step_I,
        "bound": per_step_bound,
        "mean_bias": per_step_bias,
        "bias_se": per_step_se,
        "running_bias": np.cumsum(per_step_bias) / steps,
        "running_bound": sigma_run * np.sqrt(2.0 * joint_H / steps),
        "running_se": np.sqrt(np.cumsum(per_step_se ** 2)) / steps,
        "joint_H": joint_H,
    }
