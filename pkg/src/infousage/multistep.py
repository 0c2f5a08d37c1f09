"""Multi-step noisy-query protocol with information-budget accounting.

An analyst interacts with a :class:`QuerySession`: at step j it names a
statistic index and receives Y = phi_i + W_j with fresh Gaussian noise
W_j ~ N(0, omega_j^2 / n).  Each answered query charges sigma^2 / (2
omega_j^2) nats to the session's information budget, the per-query cap on
the conditional mutual information between the response and phi.  The
budget is therefore an upper bound on the information usage of any
selection the analyst makes from the visible history, no matter how
adaptive the analyst is.

Scripted analysts (a fixed query sequence, a greedy max-response follower,
and a coordinate-wise linear reconstructor) exercise the protocol;
:func:`greedy_error_curve` and :func:`composition_audit` run vectorized
replications of whole sessions for the scaling and budget checks.
"""

from dataclasses import dataclass

import numpy as np

from .bounds import FOURTH_ROOT, fourth_root_schedule
from .errors import BudgetExhaustedError, InputError
from .infotheory import plugin_entropy
from .rng import TAG_NOISE, TAG_PHI, normal_rows, substream

__all__ = [
    "QuerySession",
    "FixedSequence",
    "GreedyMaxResponse",
    "LinearReconstructor",
    "run_analyst",
    "greedy_error_curve",
    "linear_reconstruction_demo",
    "composition_audit",
]


def _resolve_schedule(schedule, sigma, length):
    """Noise levels omega_1..omega_length as a positive array."""
    if isinstance(schedule, str):
        if schedule != FOURTH_ROOT:
            raise InputError(f"unknown schedule {schedule!r}")
        return fourth_root_schedule(sigma, length)
    if callable(schedule):
        omegas = np.array([schedule(j) for j in range(1, length + 1)], dtype=float)
    else:
        # an explicit list defines its own horizon
        omegas = np.asarray(schedule, dtype=float)
        if omegas.size == 0:
            raise InputError("schedule must not be empty")
    if np.any(omegas <= 0):
        raise InputError("noise levels must be positive (use noiseless=True "
                         "for the no-noise baseline)")
    return omegas


class QuerySession:
    """State of one analyst interaction with a fixed realization of phi.

    The statistic vector is drawn once at construction, keyed by
    (seed, session_index); query noise comes from an independent stream, so
    re-querying an index always yields fresh noise.  ``noiseless=True`` is
    an explicit separate mode (exact responses, no budget charged) since
    omega = 0 is outside the schedule's domain.
    """

    def __init__(self, ensemble, schedule, seed, session_index=0,
                 budget_limit=None, noiseless=False, max_queries=10_000):
        sigma = np.asarray(ensemble.sigma, dtype=float)
        if sigma.ndim != 0:
            raise InputError("query sessions need a scalar-sigma ensemble")
        self.ensemble = ensemble
        self.sigma = float(sigma)
        self.n = ensemble.n or 1
        self.noiseless = noiseless
        self.schedule = (
            None if noiseless
            else _resolve_schedule(schedule, self.sigma, max_queries)
        )
        self.budget_limit = budget_limit
        self.budget_spent = 0.0
        self.history = []
        self._phi = ensemble.draw(seed, session_index, 1)[0]
        self._noise = substream(seed, TAG_NOISE, session_index)

    @property
    def step(self):
        return len(self.history)

    def next_omega(self):
        if self.noiseless:
            return None
        if self.step >= self.schedule.size:
            raise InputError(
                f"noise schedule covers only {self.schedule.size} queries"
            )
        return float(self.schedule[self.step])

    def answer_query(self, i):
        """Respond to a query for statistic i; charges the budget."""
        if not 0 <= i < self.ensemble.m:
            raise InputError(f"query index {i} out of range")
        if self.noiseless:
            increment = 0.0
            y = float(self._phi[i])
        else:
            omega = self.next_omega()
            increment = self.sigma ** 2 / (2.0 * omega ** 2)
            if (self.budget_limit is not None
                    and self.budget_spent + increment > self.budget_limit + 1e-12):
                raise BudgetExhaustedError(self.budget_spent, self.budget_limit)
            y = float(self._phi[i] + self._noise.normal(0.0, omega / np.sqrt(self.n)))
        self.budget_spent += increment
        self.history.append((i, y))
        return y

    def transcript(self):
        """Ordered (step, query index, response, budget after) records."""
        rows = []
        spent = 0.0
        for j, (i, y) in enumerate(self.history):
            if not self.noiseless:
                spent += self.sigma ** 2 / (2.0 * self.schedule[j] ** 2)
            rows.append({"step": j + 1, "query": i, "response": y,
                         "budget_after": spent})
        return rows


# ---------------------------------------------------------------------------
# Scripted analysts.  A script sees only the visible history, never phi.
# ---------------------------------------------------------------------------

@dataclass
class FixedSequence:
    """Non-adaptive analyst: a predetermined query list and final pick."""

    indices: list
    final_index: int = None
    kind = "fixed_sequence"

    def next_query(self, history, m):
        return self.indices[len(history) % len(self.indices)]

    def final_selection(self, history):
        if self.final_index is not None:
            return self.final_index
        return self.indices[0]


@dataclass
class GreedyMaxResponse:
    """Queries fresh indices in order, then picks the largest response seen."""

    kind = "greedy_max_response"

    def next_query(self, history, m):
        return len(history) % m

    def final_selection(self, history):
        responses = [y for _, y in history]
        return history[int(np.argmax(responses))][0]


@dataclass
class LinearReconstructor:
    """Queries each of the first k_dims coordinates once."""

    k_dims: int
    kind = "linear_reconstructor"

    def next_query(self, history, m):
        if self.k_dims > m:
            raise InputError("k_dims exceeds the number of statistics")
        return len(history) % self.k_dims

    def final_selection(self, history):
        responses = [y for _, y in history]
        return history[int(np.argmax(responses))][0]

    def reconstruction(self, history):
        """Normalized coordinate-estimate vector from the first pass."""
        est = np.array([y for _, y in history[: self.k_dims]])
        norm = np.linalg.norm(est)
        return est / norm if norm > 0 else est


def run_analyst(script, session, k):
    """Run k scripted queries plus one final selection query.

    The final report is a fresh (k+1)-th query of the selected index; the
    returned error is |Y_final - mu_final|.
    """
    if k < 1:
        raise InputError("k must be >= 1")
    for _ in range(k):
        session.answer_query(script.next_query(session.history, session.ensemble.m))
    final = script.final_selection(session.history)
    y = session.answer_query(final)
    return {
        "final_selection": int(final),
        "final_report_error": abs(y - session.ensemble.means[final]),
    }


# ---------------------------------------------------------------------------
# Vectorized replication studies
# ---------------------------------------------------------------------------

def _greedy_sessions(k, n, sigma, reps, seed, omega_scale=None):
    """Replicated greedy sessions over k null statistics, vectorized.

    Returns (selection index, final report error) arrays of length reps.
    Matches the per-session greedy protocol exactly in distribution: each
    of the k statistics is queried once with noise omega_j, the largest
    response is re-queried with noise omega_{k+1}.
    """
    omegas = (fourth_root_schedule(sigma, k + 1) if omega_scale is None
              else np.asarray(omega_scale, dtype=float)[: k + 1])
    rtn = np.sqrt(n)
    phi = (sigma / rtn) * normal_rows(seed, TAG_PHI, 0, reps, k)
    w = normal_rows(seed, TAG_NOISE, 0, reps, k + 1)
    y = phi + w[:, :k] * (omegas[:k] / rtn)
    sel = np.argmax(y, axis=1)
    y_final = phi[np.arange(reps), sel] + w[:, k] * (omegas[k] / rtn)
    return sel, np.abs(y_final)


def greedy_error_curve(ks, n, sigma=1.0, reps=2000, seed=0):
    """Mean final-report error of the greedy analyst for each k in ks.

    Uses the fourth-root noise schedule.  Returns per-k mean errors, their
    MC standard errors, and the least-squares exponent of error vs k on a
    log-log scale.
    """
    ks = [int(k) for k in ks]
    errors, ses = [], []
    for j, k in enumerate(ks):
        _, err = _greedy_sessions(k, n, sigma, reps, seed + j)
        errors.append(err.mean())
        ses.append(err.std(ddof=1) / np.sqrt(reps))
    if len(ks) >= 2:
        exponent = float(np.polyfit(np.log(ks), np.log(errors), 1)[0])
    else:
        exponent = float("nan")
    return {
        "k": ks,
        "error": [float(e) for e in errors],
        "error_se": [float(s) for s in ses],
        "exponent": exponent,
    }


def linear_reconstruction_demo(k_dims, n, sigma=1.0, with_noise=False,
                               reps=20_000, seed=0):
    """Expected inner product <x, theta_hat> for the reconstruction analyst.

    theta_hat ~ N(0, (sigma^2/n) Id).  Without noise the analyst learns
    theta_hat exactly and reports x = theta_hat/||theta_hat||, so the value
    is E||theta_hat||.  With the fourth-root schedule the analyst normalizes
    its noisy coordinate estimates instead.
    """
    if k_dims < 1 or n < 1:
        raise InputError("need k_dims >= 1 and n >= 1")
    theta = (sigma / np.sqrt(n)) * normal_rows(seed, TAG_PHI, 0, reps, k_dims)
    if with_noise:
        omegas = fourth_root_schedule(sigma, k_dims)
        w = normal_rows(seed, TAG_NOISE, 0, reps, k_dims)
        est = theta + w * (omegas / np.sqrt(n))
    else:
        est = theta
    norms = np.linalg.norm(est, axis=1)
    x = est / np.where(norms > 0, norms, 1.0)[:, None]
    inner = (x * theta).sum(axis=1)
    return {
        "expected_inner_product": float(inner.mean()),
        "se": float(inner.std(ddof=1) / np.sqrt(reps)),
    }


def composition_audit(m, k, omega, n=1, sigma=1.0, reps=10_000, seed=0):
    """Budget vs estimated information for replicated greedy sessions.

    Runs ``reps`` greedy sessions over m null statistics with a constant
    noise level omega, estimates the information usage of the final
    selection by its plug-in entropy (an upper bound, since the final pick
    is deterministic given the history), and compares each step's
    accumulated budget.
    """
    if reps < 10_000:
        raise InputError("the audit needs at least 10^4 session replications")
    if k > m:
        raise InputError("the greedy script queries k distinct indices; k <= m")
    omegas = np.full(k + 1, float(omega))
    sel, _ = _greedy_sessions(k, n, sigma, reps, seed, omega_scale=omegas)
    per_step = sigma ** 2 / (2.0 * omegas[:k] ** 2)
    budget = float(per_step.sum())
    h_t = plugin_entropy(np.bincount(sel, minlength=m))
    slack = np.sqrt(np.log(max(m, 2)) / reps)  # rough MC scale for plug-in H
    return {
        "budget_per_step": np.cumsum(per_step).tolist(),
        "budget_total": budget,
        "I_estimate": h_t,
        "satisfied": bool(h_t <= budget + 3 * slack),
    }
