"""Selection rules: adaptive procedures that pick which statistic to report.

Each rule exposes

* ``select(phi, rng)`` -- draw one selected index for a single statistic
  vector,
* ``conditional_entropy(phi)`` -- the exact entropy (nats) of the rule's
  conditional selection distribution given ``phi`` (0 for deterministic
  rules),
* ``select_batch(phi, seed, start_rep)`` -- vectorized selection for a
  block of replications, with randomness keyed per replication index so
  that chunked and serial execution agree bit for bit,

and randomized rules additionally expose ``conditional_pmf(phi)``.

Tie-breaking is deterministic everywhere: the smallest index wins an
argmax/argmin, and candidate sets are ordered by index before any uniform
draw.  All entropies are in nats.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import InputError
from .rng import TAG_SELECT, substream, uniform_rows

__all__ = [
    "SelectionRule",
    "ArgmaxRule",
    "ArgminRule",
    "TopKUniformRule",
    "ThresholdRule",
    "GibbsRule",
    "GroupedMaxRule",
    "VarianceFilterRule",
    "RawDataEnsembleView",
    "argmax_select",
    "argmin_select",
    "top_k_uniform_select",
    "threshold_select",
    "gibbs_select",
    "grouped_max_select",
    "variance_filter_select",
    "solve_gibbs_beta",
    "rule_from_dict",
]


def _as_vector(phi):
    phi = np.asarray(phi, dtype=float)
    if phi.ndim != 1 or phi.size == 0:
        raise InputError("phi must be a nonempty 1-D vector")
    return phi


class SelectionRule:
    """Base class.  Rules are immutable value objects."""

    kind = "abstract"
    randomized = False
    requires_raw_data = False
    fallback_statistic = None  # index mapped to the sentinel, if any

    def select(self, phi, rng=None):
        raise NotImplementedError

    def conditional_entropy(self, phi):
        raise NotImplementedError

    def select_batch(self, phi, seed, start_rep):
        """Default per-row loop; vectorized in subclasses where it matters."""
        R = phi.shape[0]
        sel = np.empty(R, dtype=np.int64)
        cond = np.empty(R, dtype=float)
        for r in range(R):
            rng = substream(seed, TAG_SELECT, start_rep + r)
            sel[r] = self.select(phi[r], rng)
            cond[r] = self.conditional_entropy(phi[r])
        return sel, cond

    def to_dict(self):
        return {"kind": self.kind}


@dataclass(frozen=True)
class ArgmaxRule(SelectionRule):
    kind = "argmax"

    def select(self, phi, rng=None):
        return int(np.argmax(_as_vector(phi)))

    def conditional_entropy(self, phi):
        return 0.0

    def select_batch(self, phi, seed, start_rep):
        return np.argmax(phi, axis=1).astype(np.int64), np.zeros(phi.shape[0])


@dataclass(frozen=True)
class ArgminRule(SelectionRule):
    kind = "argmin"

    def select(self, phi, rng=None):
        return int(np.argmin(_as_vector(phi)))

    def conditional_entropy(self, phi):
        return 0.0

    def select_batch(self, phi, seed, start_rep):
        return np.argmin(phi, axis=1).astype(np.int64), np.zeros(phi.shape[0])


@dataclass(frozen=True)
class TopKUniformRule(SelectionRule):
    """Uniform draw among the m0 largest entries (index order before the draw)."""

    m0: int
    kind = "top_k_uniform"
    randomized = True

    def _check(self, m):
        if not 1 <= self.m0 <= m:
            raise InputError(f"m0={self.m0} out of range for m={m}")

    def conditional_pmf(self, phi):
        phi = _as_vector(phi)
        self._check(phi.size)
        top = np.argsort(-phi, kind="stable")[: self.m0]
        pmf = np.zeros(phi.size)
        pmf[top] = 1.0 / self.m0
        return pmf

    def select(self, phi, rng):
        phi = _as_vector(phi)
        self._check(phi.size)
        top = np.argsort(-phi, kind="stable")[: self.m0]
        return int(top[rng.integers(self.m0)])

    def conditional_entropy(self, phi):
        self._check(_as_vector(phi).size)
        return float(np.log(self.m0))

    def select_batch(self, phi, seed, start_rep):
        R, m = phi.shape
        self._check(m)
        top = np.argsort(-phi, axis=1, kind="stable")[:, : self.m0]
        u = uniform_rows(seed, TAG_SELECT, start_rep, R, 1)[:, 0]
        pick = np.minimum((u * self.m0).astype(np.int64), self.m0 - 1)
        return top[np.arange(R), pick], np.full(R, np.log(self.m0))

    def to_dict(self):
        return {"kind": self.kind, "m0": self.m0}


@dataclass(frozen=True)
class ThresholdRule(SelectionRule):
    """Uniform draw among entries >= M (fallback excluded); sentinel m if none.

    In batches the empty-exceedance case is recorded as the sentinel index m
    (one past the end); consumers map the sentinel to ``fallback_index``.
    """

    M: float
    fallback_index: int
    kind = "threshold"
    randomized = True

    @property
    def fallback_statistic(self):
        return self.fallback_index

    def _exceedance(self, phi):
        mask = phi >= self.M
        if not 0 <= self.fallback_index < phi.size:
            raise InputError(f"fallback_index={self.fallback_index} invalid")
        mask[self.fallback_index] = False
        return np.flatnonzero(mask)

    def conditional_pmf(self, phi):
        """Length m+1 pmf; the last cell is the fallback sentinel."""
        phi = _as_vector(phi)
        s = self._exceedance(phi)
        pmf = np.zeros(phi.size + 1)
        if s.size:
            pmf[s] = 1.0 / s.size
        else:
            pmf[-1] = 1.0
        return pmf

    def select(self, phi, rng=None):
        phi = _as_vector(phi)
        s = self._exceedance(phi)
        if s.size == 0:
            return phi.size  # sentinel
        if s.size == 1:
            return int(s[0])
        return int(s[rng.integers(s.size)])

    def conditional_entropy(self, phi):
        s = self._exceedance(_as_vector(phi))
        return float(np.log(s.size)) if s.size else 0.0

    def select_batch(self, phi, seed, start_rep):
        R, m = phi.shape
        if not 0 <= self.fallback_index < m:
            raise InputError(f"fallback_index={self.fallback_index} invalid")
        mask = phi >= self.M
        mask[:, self.fallback_index] = False
        counts = mask.sum(axis=1)
        u = uniform_rows(seed, TAG_SELECT, start_rep, R, 1)[:, 0]
        pick = np.minimum((u * np.maximum(counts, 1)).astype(np.int64), counts - 1)
        # index of the pick-th qualifying column per row
        order = np.cumsum(mask, axis=1)
        sel = np.full(R, m, dtype=np.int64)
        hit = counts > 0
        if hit.any():
            want = pick[hit] + 1
            sel[hit] = np.argmax(order[hit] == want[:, None], axis=1)
        cond = np.where(counts > 0, np.log(np.maximum(counts, 1)), 0.0)
        return sel, cond

    def to_dict(self):
        return {"kind": self.kind, "M": self.M, "fallback_index": self.fallback_index}


def _softmax(z):
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def _entropy_rows(p):
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(p > 0, p * np.log(p), 0.0)
    return -t.sum(axis=-1)


@dataclass(frozen=True)
class GibbsRule(SelectionRule):
    """Exponential-weights selection: first index ~ softmax(beta * phi).

    K indices are drawn without replacement by sequential renormalization
    (Plackett-Luce), realized through the equivalent Gumbel top-K sort.
    ``select`` returns the first draw; ``select_k`` returns all K.
    """

    beta: float
    K: int = 1
    kind = "gibbs"
    randomized = True

    def _check(self, m):
        if self.beta < 0:
            raise InputError("beta must be >= 0 (use an argmin framing instead)")
        if not 1 <= self.K <= m:
            raise InputError(f"K={self.K} out of range for m={m}")

    def conditional_pmf(self, phi):
        phi = _as_vector(phi)
        self._check(phi.size)
        return _softmax(self.beta * phi)

    def select_k(self, phi, rng):
        phi = _as_vector(phi)
        self._check(phi.size)
        g = -np.log(-np.log(np.maximum(rng.random(phi.size), 2.0 ** -54)))
        scores = self.beta * phi + g
        if self.K == 1:
            return np.array([np.argmax(scores)], dtype=np.int64)
        part = np.argpartition(-scores, self.K - 1)[: self.K]
        return part[np.argsort(-scores[part], kind="stable")].astype(np.int64)

    def select(self, phi, rng):
        return int(self.select_k(phi, rng)[0])

    def conditional_entropy(self, phi):
        """Entropy of the first draw's conditional distribution."""
        return float(_entropy_rows(self.conditional_pmf(phi)))

    def select_batch(self, phi, seed, start_rep):
        R, m = phi.shape
        self._check(m)
        u = uniform_rows(seed, TAG_SELECT, start_rep, R, m)
        g = -np.log(-np.log(u))
        sel = np.argmax(self.beta * phi + g, axis=1).astype(np.int64)
        cond = _entropy_rows(_softmax(self.beta * phi))
        return sel, cond

    def to_dict(self):
        return {"kind": self.kind, "beta": self.beta, "K": self.K}


@dataclass(frozen=True)
class GroupedMaxRule(SelectionRule):
    """Random partition into m0 groups; uniform draw among the group maxima."""

    m0: int
    kind = "grouped_max"
    randomized = True

    def _group_size(self, m):
        if not 1 <= self.m0 <= m or m % self.m0:
            raise InputError(f"m={m} must be divisible by m0={self.m0}")
        return m // self.m0

    def conditional_pmf(self, phi):
        """P(T=i | phi) = (1/m0) * C(rank_i, g-1) / C(m-1, g-1).

        rank_i counts entries strictly below phi_i (ties broken to the
        smaller index): i is selected iff it beats the g-1 other members of
        its random group and its group's leader is the one reported.
        """
        phi = _as_vector(phi)
        m = phi.size
        g = self._group_size(m)
        order = np.argsort(phi, kind="stable")
        rank = np.empty(m, dtype=np.int64)
        rank[order] = np.arange(m)
        with np.errstate(invalid="ignore"):
            logc = np.where(
                rank >= g - 1,
                gammaln(rank + 1) - gammaln(rank - g + 2) - gammaln(g),
                -np.inf,
            )
        denom = gammaln(m) - gammaln(m - g + 1) - gammaln(g)
        pmf = np.exp(logc - denom) / self.m0
        pmf[rank < g - 1] = 0.0
        return pmf / pmf.sum()

    def select(self, phi, rng):
        phi = _as_vector(phi)
        g = self._group_size(phi.size)
        perm = rng.permutation(phi.size).reshape(self.m0, g)
        winners = perm[np.arange(self.m0), np.argmax(phi[perm], axis=1)]
        return int(winners[rng.integers(self.m0)])

    def conditional_entropy(self, phi):
        return float(_entropy_rows(self.conditional_pmf(phi)))

    def _rank_entropy(self, m):
        """Conditional entropy for any tie-free phi of length m.

        The pmf is a function of ranks alone and ranks are a permutation,
        so the entropy is the same for every tie-free vector.
        """
        g = m // self.m0
        ranks = np.arange(m)
        with np.errstate(invalid="ignore"):
            logc = np.where(
                ranks >= g - 1,
                gammaln(ranks + 1) - gammaln(ranks - g + 2) - gammaln(g),
                -np.inf,
            )
        denom = gammaln(m) - gammaln(m - g + 1) - gammaln(g)
        p = np.exp(logc - denom) / self.m0
        p = p[p > 0]
        p = p / p.sum()
        return float(-(p * np.log(p)).sum())

    def select_batch(self, phi, seed, start_rep):
        R, m = phi.shape
        g = self._group_size(m)
        u = uniform_rows(seed, TAG_SELECT, start_rep, R, m + 1)
        perm = np.argsort(u[:, :m], axis=1).reshape(R, self.m0, g)
        grouped = np.take_along_axis(phi[:, None, :], perm, axis=2)
        winners = np.take_along_axis(
            perm, np.argmax(grouped, axis=2)[:, :, None], axis=2
        )[:, :, 0]
        pick = np.minimum((u[:, m] * self.m0).astype(np.int64), self.m0 - 1)
        sel = winners[np.arange(R), pick]
        cond = np.full(R, self._rank_entropy(m))
        return sel.astype(np.int64), cond

    def to_dict(self):
        return {"kind": self.kind, "m0": self.m0}


@dataclass
class RawDataEnsembleView:
    """Raw m x n sample matrix with its per-feature means and variances."""

    X: np.ndarray

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        if self.X.ndim != 2:
            raise InputError("X must be an m x n matrix")
        self.phi = self.X.mean(axis=1)
        self.V = ((self.X - self.phi[:, None]) ** 2).sum(axis=1)


@dataclass(frozen=True)
class VarianceFilterRule(SelectionRule):
    """Select the feature with the largest sample variance; report its mean."""

    kind = "variance_filter"
    requires_raw_data = True

    def select_view(self, view):
        if view.X.shape[1] < 2:
            raise InputError("variance filtering needs n >= 2 samples per feature")
        return int(np.argmax(view.V))

    def select(self, phi, rng=None):
        raise InputError(
            "variance_filter selects on raw data, not on statistic vectors; "
            "use select_view or a raw-data ensemble"
        )

    def conditional_entropy(self, phi):
        return 0.0

    def select_batch_raw(self, X):
        """X has shape (R, m, n)."""
        if X.shape[2] < 2:
            raise InputError("variance filtering needs n >= 2 samples per feature")
        V = ((X - X.mean(axis=2, keepdims=True)) ** 2).sum(axis=2)
        return np.argmax(V, axis=1).astype(np.int64), np.zeros(X.shape[0])


# ---------------------------------------------------------------------------
# Functional entry points
# ---------------------------------------------------------------------------

def argmax_select(phi):
    return ArgmaxRule().select(phi)


def argmin_select(phi):
    return ArgminRule().select(phi)


def top_k_uniform_select(phi, m0, rng):
    return TopKUniformRule(m0).select(phi, rng)


def threshold_select(phi, M, fallback_index, rng):
    rule = ThresholdRule(M, fallback_index)
    sel = rule.select(phi, rng)
    return fallback_index if sel == len(phi) else sel


def gibbs_select(phi, beta, K, rng):
    return GibbsRule(beta, K).select_k(phi, rng)


def grouped_max_select(phi, m0, rng):
    return GroupedMaxRule(m0).select(phi, rng)


def variance_filter_select(view):
    return VarianceFilterRule().select_view(view)


def solve_gibbs_beta(phi, b, beta_max=1e4, tol=1e-10):
    """Find beta >= 0 with sum_i softmax(beta*phi)_i * phi_i = b by bisection.

    The constraint value is monotone increasing in beta, from mean(phi) at
    beta=0 toward max(phi).
    """
    phi = _as_vector(phi)
    lo, hi = 0.0, beta_max

    def value(beta):
        return float(_softmax(beta * phi) @ phi)

    if b <= value(lo):
        return 0.0
    if b >= phi.max():
        raise InputError(f"target b={b} unreachable (max phi = {phi.max()})")
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if value(mid) < b:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


_RULE_KINDS = {
    "argmax": lambda d: ArgmaxRule(),
    "argmin": lambda d: ArgminRule(),
    "top_k_uniform": lambda d: TopKUniformRule(int(d["m0"])),
    "threshold": lambda d: ThresholdRule(float(d["M"]), int(d["fallback_index"])),
    "gibbs": lambda d: GibbsRule(float(d["beta"]), int(d.get("K", 1))),
    "grouped_max": lambda d: GroupedMaxRule(int(d["m0"])),
    "variance_filter": lambda d: VarianceFilterRule(),
}


def rule_from_dict(d):
    try:
        return _RULE_KINDS[d["kind"]](d)
    except KeyError as exc:
        raise InputError(f"unknown selection rule: {d!r}") from exc
