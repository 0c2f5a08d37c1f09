"""Named experiments: each returns a tabular result ready for the CLI.

Every experiment is a pure function of (parameters, seed) and returns a
dict with ``columns``, ``rows``, and optionally ``checks`` (a list of
bound-vs-empirical reports used by the runner's --check mode).
"""

import numpy as np

from . import bounds as bd
from .classify import ClassificationSetup, overfitting_audit
from .ensemble import StatisticEnsemble, empirical_bias, sample_batch
from .errors import InputError
from .infotheory import (
    CORRECTION_MILLER_MADOW,
    estimate_information_usage,
    max_information_rank,
    pvalue_information,
)
from .lars import LarsExperimentConfig, lars_information_curve
from .multistep import greedy_error_curve, linear_reconstruction_demo
from .rng import TAG_PHI, normal_rows
from .selection import ArgmaxRule, ArgminRule, GroupedMaxRule, VarianceFilterRule

__all__ = ["EXPERIMENTS", "run_experiment"]


def _signal_ensemble(m, mu, sigma=1.0):
    means = np.zeros(m)
    means[0] = mu
    return StatisticEnsemble.gaussian(m, means=means, sigma=sigma)


def figure1(seed=0, reps=1000, m=1000, mu_grid=None):
    """Bias, information, and entropy of argmax selection vs signal strength.

    One statistic carries mean mu, the rest are nulls; selection is the
    plain argmax.  As the signal grows the selection concentrates, so the
    entropy, the information bound, and the bias all fall.
    """
    if mu_grid is None:
        mu_grid = np.linspace(1.0, 4.0, 9)
    rows = []
    checks = []
    for j, mu in enumerate(mu_grid):
        ens = _signal_ensemble(m, mu)
        batch = sample_batch(ens, ArgmaxRule(), reps, seed + j)
        est = estimate_information_usage(batch, CORRECTION_MILLER_MADOW)
        stats = empirical_bias(batch, ens)
        bound = bd.bias_bound(1.0, est.I)
        rows.append([
            float(mu), stats["bias"], stats["std_error"],
            est.H_T, est.I, bound,
        ])
        checks.append(bd.BoundReport.check(
            f"bias_bound(mu={mu:g})", bound, stats["bias"],
            tolerance=3 * stats["std_error"],
        ))
    return {
        "columns": ["mu", "bias", "bias_se", "H_T", "I_hat", "bound"],
        "rows": rows,
        "checks": checks,
    }


def figure2(seed=0, reps=200, n_steps=20):
    """Running-average bias and information bound of the LARS path."""
    rows = []
    checks = []
    for s in (0.04, 0.06, 0.08):
        cfg = LarsExperimentConfig(
            signal_strength=s, n_steps=n_steps, replications=reps, seed=seed
        )
        curve = lars_information_curve(cfg)
        for i in range(n_steps):
            rows.append([
                s, int(curve["step"][i]), curve["I_hat"][i],
                curve["bound"][i], curve["mean_bias"][i], curve["bias_se"][i],
                curve["running_bias"][i], curve["running_bound"][i],
            ])
            checks.append(bd.BoundReport.check(
                f"lars_bias(s={s:g}, step={i + 1})",
                curve["bound"][i], curve["mean_bias"][i],
                tolerance=3 * curve["bias_se"][i],
            ))
    return {
        "columns": ["s", "step", "I_hat", "bound", "bias", "bias_se",
                    "running_bias", "running_bound"],
        "rows": rows,
        "checks": checks,
    }


def _topk_indices_by_value(phi, K):
    part = np.argpartition(-phi, K - 1, axis=1)[:, :K]
    return part


def figure3(seed=0, reps=100, n_signals=1000, n_nulls=100_000, beta=2.0,
            K=100, mu_grid=(1.0, 2.0, 3.0, 4.0, 5.0), chunk=50):
    """Randomized (exponential-weights) vs deterministic top-K selection.

    n_signals statistics carry mean mu among n_nulls nulls.  The
    deterministic baseline reports the K largest values; the randomized
    rule samples K indices without replacement with probability
    proportional to exp(beta * phi).  Per selection, bias is the mean of
    phi - mu over the K picks and accuracy the fraction of true signals
    among them.
    """
    m = n_signals + n_nulls
    rows = []
    for j, mu in enumerate(mu_grid):
        means = np.zeros(m)
        means[:n_signals] = mu
        gb = np.empty(reps)
        ab = np.empty(reps)
        ga = np.empty(reps)
        aa = np.empty(reps)
        for start in range(0, reps, chunk):
            stop = min(start + chunk, reps)
            phi = means + normal_rows(seed + j, TAG_PHI, start, stop - start, m)
            top = _topk_indices_by_value(phi, K)
            rr = np.arange(stop - start)[:, None]
            ab[start:stop] = (phi[rr, top] - means[top]).mean(axis=1)
            aa[start:stop] = (top < n_signals).mean(axis=1)
            # without-replacement exponential-weights draw via Gumbel keys
            u = np.maximum(
                _gumbel_uniforms(seed + j, start, stop - start, m), 2.0 ** -54
            )
            keys = beta * phi - np.log(-np.log(u))
            pick = _topk_indices_by_value(keys, K)
            gb[start:stop] = (phi[rr, pick] - means[pick]).mean(axis=1)
            ga[start:stop] = (pick < n_signals).mean(axis=1)
        rows.append([
            float(mu),
            ab.mean(), ab.std(ddof=1) / np.sqrt(reps),
            gb.mean(), gb.std(ddof=1) / np.sqrt(reps),
            aa.mean(), ga.mean(),
        ])
    return {
        "columns": ["mu", "argmax_bias", "argmax_bias_se", "gibbs_bias",
                    "gibbs_bias_se", "argmax_acc", "gibbs_acc"],
        "rows": rows,
    }


def _gumbel_uniforms(seed, start, n, m):
    from .rng import TAG_SELECT, uniform_rows

    return uniform_rows(seed, TAG_SELECT, start, n, m)


def bounds_table(seed=0, reps=20_000):
    """Every closed-form bound against a matched empirical quantity."""
    rows = []
    checks = []

    def record(name, bound, empirical, se, extra=""):
        rows.append([name, float(bound), float(empirical), float(se), extra])
        checks.append(bd.BoundReport.check(name, bound, empirical, tolerance=3 * se))

    # argmax over nulls: bias, absolute and squared error
    m = 1000
    ens = StatisticEnsemble.gaussian(m)
    batch = sample_batch(ens, ArgmaxRule(), reps, seed)
    est = estimate_information_usage(batch, CORRECTION_MILLER_MADOW)
    stats = empirical_bias(batch, ens)
    record("bias:argmax_null", bd.bias_bound(1.0, est.I), stats["bias"],
           stats["std_error"], f"I_hat={est.I:.3f}")
    record("abs_error:argmax_null", bd.abs_error_bound(1.0, est.I),
           stats["abs_error"], stats["std_error"])
    record("sq_error:argmax_null", bd.sq_error_bound(1.0, est.I),
           stats["sq_error"], 3 * stats["std_error"])

    # grouped-max vs the top-m0 bound
    gens = StatisticEnsemble.gaussian(4096)
    gbatch = sample_batch(gens, GroupedMaxRule(16), reps, seed + 1)
    gstats = empirical_bias(gbatch, gens)
    record("bias:grouped_max", bd.topk_bound(1.0, 4096, 16), gstats["bias"],
           gstats["std_error"])

    # shifted-exponential argmax vs the sub-exponential bound
    sens = StatisticEnsemble.shifted_exponential(np.zeros(100))
    sbatch = sample_batch(sens, ArgmaxRule(), min(reps, 10_000), seed + 2)
    sest = estimate_information_usage(sbatch, CORRECTION_MILLER_MADOW)
    sstats = empirical_bias(sbatch, sens)
    record("bias:subexp_argmax", bd.bias_bound_subexp(2.0, 2.0, sest.I),
           sstats["bias"], sstats["std_error"], f"I_hat={sest.I:.3f}")

    # unequal variances: argmax over a sigma spread
    sigmas = np.linspace(0.5, 2.0, 50)
    hens = StatisticEnsemble.gaussian(50, sigma=sigmas)
    hbatch = sample_batch(hens, ArgmaxRule(), reps, seed + 3)
    hest = estimate_information_usage(hbatch, CORRECTION_MILLER_MADOW)
    hstats = empirical_bias(hbatch, hens)
    pmf = np.bincount(hbatch.selections, minlength=50)[:50] / hbatch.R
    record("bias:hetero_argmax", bd.bias_bound_hetero(sigmas, pmf, hest.I),
           hstats["bias"], hstats["std_error"])

    # variance filter: no information about the means, no bias
    vens = StatisticEnsemble.gaussian(200, n=50)
    vbatch = sample_batch(vens, VarianceFilterRule(), min(reps, 10_000), seed + 4)
    vstats = empirical_bias(vbatch, vens)
    record("bias:variance_filter", 0.0, abs(vstats["bias"]), vstats["std_error"])

    return {
        "columns": ["name", "bound", "empirical", "se", "notes"],
        "rows": rows,
        "checks": checks,
    }


def multistep_experiment(seed=0, reps=2000, ks=(16, 64, 256, 1024), n=1_000_000,
                         sigma=1.0):
    """Final-report error of the greedy analyst vs query count."""
    curve = greedy_error_curve(ks, n, sigma, reps, seed)
    rows = []
    checks = []
    for k, err, se in zip(curve["k"], curve["error"], curve["error_se"]):
        bound = bd.multistep_error_bound(sigma, n, k)
        rows.append([k, err, se, float(bound)])
        checks.append(bd.BoundReport.check(
            f"multistep_error(k={k})", bound, err, tolerance=3 * se
        ))
    demo = linear_reconstruction_demo(100, 10_000, sigma, with_noise=False,
                                      reps=reps * 10, seed=seed)
    rows.append(["reconstruction_no_noise", demo["expected_inner_product"],
                 demo["se"], float(np.sqrt(100 / 10_000))])
    return {
        "columns": ["k", "error", "error_se", "bound"],
        "rows": rows,
        "checks": checks,
        "exponent": curve["exponent"],
    }


def pvalue_experiment(seed=0, reps=100_000, m=5, epsilon=0.05):
    """Selected-p-value inflation and its information bound."""
    ens = StatisticEnsemble.uniform_pvalues(m)
    batch = sample_batch(ens, ArgminRule(), reps, seed)
    info = pvalue_information(batch, ens, epsilon)
    bound = bd.pvalue_bound(epsilon, info["I_TZ"])
    mean_p = float(batch.selected_values().mean())
    rows = [[m, epsilon, info["P_small"], info["I_TZ"], float(bound), mean_p]]
    checks = [bd.BoundReport.check(
        "pvalue_bound", bound, info["P_small"],
        tolerance=3 * np.sqrt(info["P_small"] * (1 - info["P_small"]) / reps),
    )]
    return {
        "columns": ["m", "epsilon", "P_small", "I_TZ", "bound", "mean_p"],
        "rows": rows,
        "checks": checks,
    }


def classify_experiment(seed=0, reps=10_000, n=16):
    """ERM overfitting gap vs the information and VC bounds."""
    xs = np.linspace(-1.0, 1.0, n)
    setup = ClassificationSetup(xs=xs, label_probs=0.5)
    audit = overfitting_audit(setup, reps, seed)
    rows = [[n, audit["gap"], audit["gap_se"], audit["I_hat"], audit["bound"],
             audit["vc_cap"], audit["vc_bound"], audit["exact_joint"]]]
    checks = [
        bd.BoundReport.check("overfit_gap", audit["bound"], audit["gap"],
                             tolerance=3 * audit["gap_se"]),
        bd.BoundReport.check("vc_cap", audit["vc_cap"], audit["I_hat"]),
    ]
    return {
        "columns": ["n", "gap", "gap_se", "I_hat", "bound", "vc_cap",
                    "vc_bound", "exact_joint"],
        "rows": rows,
        "checks": checks,
    }


def maxinfo_experiment(seed=0, reps=20_000, m=20, mu_grid=(0.0, 1.0, 2.0, 3.0)):
    """Average-case vs worst-case information of rank selection.

    As the designated signal strengthens, the selection concentrates on it:
    the average-case information I(T; phi) falls while the worst-case
    (signal-form) information grows.
    """
    rows = []
    for j, mu in enumerate(mu_grid):
        ens = _signal_ensemble(m, mu)
        batch = sample_batch(ens, ArgmaxRule(), reps, seed + j)
        est = estimate_information_usage(batch)
        pmf = np.bincount(batch.selections, minlength=m)[:m] / batch.R
        mi = max_information_rank(pmf, signal_index=0)
        rows.append([float(mu), est.I, mi["I_inf"], mi["signal_form"]])
    return {
        "columns": ["mu", "I_hat", "I_inf", "I_inf_signal"],
        "rows": rows,
    }


def sandwich_experiment(seed=0, reps=50_000, n_vectors=100, max_m=64):
    """Two-sided entropy sandwich on the MSE of argmax selection.

    Random mean vectors (entries uniform on [-3, 3], random dimension up to
    max_m), unit-variance independent Gaussians.  Checks H/8 - 2.5 <=
    empirical MSE <= 10 H + 1.5 with plug-in H.
    """
    rng = np.random.Generator(np.random.Philox(key=[seed, 977]))
    rows = []
    checks = []
    for v in range(n_vectors):
        m = int(rng.integers(2, max_m + 1))
        means = rng.uniform(-3.0, 3.0, size=m)
        ens = StatisticEnsemble.gaussian(m, means=means)
        batch = sample_batch(ens, ArgmaxRule(), reps, seed + v)
        est = estimate_information_usage(batch)
        idx = batch.effective_selections()
        err_sq = (batch.selected_values() - ens.means[idx]) ** 2
        mse = float(err_sq.mean())
        mse_se = float(err_sq.std(ddof=1) / np.sqrt(batch.R))
        lo = bd.sq_error_lower_bound(est.H_T)
        hi = bd.sq_error_upper_bound_entropy(est.H_T)
        rows.append([v, m, est.H_T, float(lo), mse, float(hi)])
        checks.append(bd.BoundReport.check(
            f"sandwich_upper(v={v})", hi, mse, tolerance=3 * mse_se
        ))
        checks.append(bd.BoundReport.check(
            f"sandwich_lower(v={v})", lo, mse,
            tolerance=3 * mse_se, lower=True,
        ))
    return {
        "columns": ["vector", "m", "H_T", "lower", "mse", "upper"],
        "rows": rows,
        "checks": checks,
    }


EXPERIMENTS = {
    "figure1": figure1,
    "figure2": figure2,
    "figure3": figure3,
    "bounds-table": bounds_table,
    "multistep": multistep_experiment,
    "pvalue": pvalue_experiment,
    "classify": classify_experiment,
    "maxinfo": maxinfo_experiment,
    "sq-error-sandwich": sandwich_experiment,
}


def run_experiment(name, seed=0, reps=None, **params):
    if name not in EXPERIMENTS:
        raise InputError(f"unknown experiment {name!r}; "
                         f"choose from {sorted(EXPERIMENTS)}")
    fn = EXPERIMENTS[name]
    kwargs = dict(params)
    kwargs["seed"] = seed
    if reps is not None:
        kwargs["reps"] = reps
    return fn(**kwargs)
