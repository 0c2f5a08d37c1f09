"""Overfitting of empirical risk minimization over a small function class.

The training inputs x_1..x_n are fixed; only the labels Y_i in {-1,+1} are
random, drawn independently with P(Y_i = 1) = label_probs[i].  ERM picks
the label pattern in the class with the fewest training mismatches.  The
information I(f_hat(x); Y) between the chosen pattern and the labels then
caps the expected generalization gap via sqrt(I / (2n)), and the class's
VC dimension caps the information itself.
"""

from dataclasses import dataclass

import numpy as np

from .bounds import overfit_bound, vc_info_bound
from .errors import InputError
from .infotheory import plugin_entropy
from .rng import TAG_LABELS, uniform_rows

__all__ = ["ClassificationSetup", "erm_train", "overfitting_audit"]

THRESHOLD_1D = "threshold_1d"
EXPLICIT_FINITE = "explicit_finite"


@dataclass(frozen=True)
class ClassificationSetup:
    """Fixed inputs, label noise, and a finite class of label patterns.

    ``patterns`` is the class restricted to the inputs: one row of +/-1
    labels per function.  The 1-D threshold class (f_t(x) = +1 iff x >= t)
    is generated by sweeping t across the sorted inputs and has VC
    dimension 1.
    """

    xs: np.ndarray
    label_probs: np.ndarray
    function_class: str = THRESHOLD_1D
    patterns: np.ndarray = None

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        probs = np.broadcast_to(
            np.asarray(self.label_probs, dtype=float), xs.shape
        ).copy()
        if xs.ndim != 1 or xs.size == 0:
            raise InputError("xs must be a nonempty 1-D vector")
        if np.any(probs < 0) or np.any(probs > 1):
            raise InputError("label_probs must lie in [0, 1]")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "label_probs", probs)
        if self.function_class == THRESHOLD_1D:
            object.__setattr__(self, "patterns", _threshold_patterns(xs))
        elif self.function_class == EXPLICIT_FINITE:
            pats = np.asarray(self.patterns)
            if pats is None or pats.ndim != 2 or pats.shape[1] != xs.size:
                raise InputError("explicit_finite needs a patterns matrix")
            if not np.all(np.isin(pats, (-1, 1))):
                raise InputError("patterns must be +/-1 valued")
            object.__setattr__(self, "patterns", pats.astype(np.int8))
        else:
            raise InputError(f"unknown function_class {self.function_class!r}")

    @property
    def n(self):
        return self.xs.size

    @property
    def vc_dimension(self):
        return 1 if self.function_class == THRESHOLD_1D else None


def _threshold_patterns(xs):
    """The n+1 distinct label patterns of f_t(x) = +1 iff x >= t."""
    cuts = np.concatenate([np.sort(xs), [np.inf]])
    pats = np.where(xs >= cuts[:, None], 1, -1).astype(np.int8)
    # duplicate cut points collapse to identical patterns; keep one of each
    _, keep = np.unique(pats, axis=0, return_index=True)
    return pats[np.sort(keep)]


def erm_train(setup, labels):
    """Index of the class pattern with the fewest training mismatches.

    Ties break to the smallest pattern index.
    """
    labels = np.asarray(labels)
    if labels.shape != (setup.n,) or not np.all(np.isin(labels, (-1, 1))):
        raise InputError("labels must be a +/-1 vector matching xs")
    mismatches = (setup.n - setup.patterns @ labels) // 2
    return int(np.argmin(mismatches))


def overfitting_audit(setup, replications=10_000, seed=0):
    """Generalization gap vs its information and VC bounds.

    Resamples labels, trains by ERM, and estimates I(f_hat(x); Y).  For
    n <= 16 the estimate is exact plug-in over the joint (pattern, label
    vector) distribution; beyond that the H(pattern) upper bound is used
    and flagged (``exact_joint = False``), which preserves the bound
    direction since I <= H(pattern).
    """
    if replications < 10_000:
        raise InputError("the audit needs at least 10^4 replications")
    n = setup.n
    if len(setup.patterns) > 2 ** 16:
        raise InputError("pattern count too large for plug-in joint entropy")
    u = uniform_rows(seed, TAG_LABELS, 0, replications, n)
    labels = np.where(u < setup.label_probs, 1, -1).astype(np.int8)

    # vectorized ERM: mismatch counts for all replications at once
    mism = (n - labels @ setup.patterns.T.astype(np.int64)) // 2
    chosen = np.argmin(mism, axis=1)
    train_err = mism[np.arange(replications), chosen] / n
    # true risk of the chosen pattern given the label probabilities
    p1 = setup.label_probs
    risk_per_pattern = np.where(setup.patterns == 1, 1 - p1, p1).mean(axis=1)
    gap = float((risk_per_pattern[chosen] - train_err).mean())
    gap_se = float(
        (risk_per_pattern[chosen] - train_err).std(ddof=1) / np.sqrt(replications)
    )

    h_pattern = plugin_entropy(np.bincount(chosen, minlength=len(setup.patterns)))
    exact_joint = n <= 16
    if exact_joint:
        weights = np.uint64(1) << np.arange(n, dtype=np.uint64)
        label_code = ((labels == 1).astype(np.uint64) * weights).sum(axis=1)
        joint_code = label_code * np.uint64(len(setup.patterns)) + chosen.astype(
            np.uint64
        )
        _, jc = np.unique(joint_code, return_counts=True)
        _, lc = np.unique(label_code, return_counts=True)
        h_labels = plugin_entropy(lc)
        h_joint = plugin_entropy(jc)
        i_hat = max(0.0, h_pattern + h_labels - h_joint)
    else:
        i_hat = h_pattern

    vc_cap = (
        vc_info_bound(setup.vc_dimension, n)
        if setup.vc_dimension
        else np.log(len(setup.patterns))
    )
    return {
        "gap": gap,
        "gap_se": gap_se,
        "I_hat": i_hat,
        "H_pattern": h_pattern,
        "bound": float(overfit_bound(i_hat, n)),
        "vc_cap": float(vc_cap),
        "vc_bound": float(overfit_bound(vc_cap, n)),
        "exact_joint": exact_joint,
    }
