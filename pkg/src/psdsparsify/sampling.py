"""Random-sampling baseline and its greedy derandomization.

``aw_sample`` draws T i.i.d. indices with probability proportional to
trace(C_i) and succeeds with probability > 1/2; ``pe_sparsify`` replaces
the coin flips by a greedy walk that always moves the sum of two
pessimistic estimators (one per spectral tail event) downward, turning
the same quantized weights into a deterministic guarantee.

RNG contract: PCG64 via ``numpy.random.default_rng(seed)``; indices come
from inverse-CDF lookups against the cumulative probability vector, so
runs are bit-reproducible for a fixed seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import TNotLargeEnough
from .linalg import (
    ReducedInstance,
    SandwichCertificate,
    SparsifierResult,
    eigh,
    symmetrize,
)


def aw_iteration_count(rank: int, eps: float) -> int:
    """Smallest integer above (2 ln 2)(ln r + 2 ln 2) / (eps^2 mu), mu = 1/r."""
    raw = 2.0 * math.log(2.0) * (math.log(rank) + 2.0 * math.log(2.0)) * rank / eps**2
    return math.floor(raw) + 1


def pe_iteration_count(rank: int, eps: float) -> int:
    """Smallest integer above (2 ln 2) r ln(2r) / eps^2."""
    raw = 2.0 * math.log(2.0) * rank * math.log(2.0 * rank) / eps**2
    return math.floor(raw) + 1


def pe_exponents(mu: float, eps: float) -> tuple[float, float]:
    """Tail exponents (t, t') for the lower and upper spectral events."""
    t_minus = math.log((1.0 - (1.0 - eps) * mu) / ((1.0 - mu) * (1.0 - eps)))
    t_plus = math.log(((1.0 + eps) * (1.0 - mu)) / (1.0 - (1.0 + eps) * mu))
    return t_minus, t_plus


@dataclass(frozen=True)
class SamplingPlan:
    """Sampling distribution and iteration budgets for both methods."""

    probabilities: np.ndarray
    mu: float
    eps: float
    seed: int
    t_random: int
    t_derand: int

    @staticmethod
    def from_instance(reduced: ReducedInstance, eps: float, seed: int = 0) -> "SamplingPlan":
        # closed right endpoint: the plan formulas stay finite at 1/2
        if not 0.0 < eps <= 0.5:
            raise ValueError("eps must lie in (0, 1/2]")
        r = reduced.rank
        mu = 1.0 / r
        p = reduced.traces / r
        total = float(p.sum())
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"trace probabilities sum to {total}, expected 1")
        return SamplingPlan(
            probabilities=p,
            mu=mu,
            eps=eps,
            seed=seed,
            t_random=aw_iteration_count(r, eps),
            t_derand=pe_iteration_count(r, eps),
        )


def _quantized_weights(counts: np.ndarray, reduced: ReducedInstance, t_total: int) -> np.ndarray:
    """y_j = count_j * r / (T * trace(C_j)); zero where nothing was picked."""
    traces = reduced.traces
    y = np.zeros(len(reduced))
    picked = counts > 0
    y[picked] = counts[picked] * reduced.rank / (t_total * traces[picked])
    return y


def _result_from_counts(
    counts: np.ndarray, reduced: ReducedInstance, t_total: int
) -> SparsifierResult:
    y = _quantized_weights(counts, reduced, t_total)
    w = eigh(reduced.weighted_sum(y)).eigenvalues
    cert = SandwichCertificate(
        lambda_min=float(w[0]),
        lambda_max=float(w[-1]),
        support_size=int(np.count_nonzero(y > 0.0)),
    )
    return SparsifierResult(weights=y, certificate=cert)


def aw_sample(reduced: ReducedInstance, eps: float, seed: int = 0) -> SparsifierResult:
    """Draw T indices i.i.d. by trace weight and return the quantized result.

    Success (all certificate eigenvalues inside [1-eps, 1+eps]) holds with
    probability above 1/2; the caller checks the certificate rather than
    trusting the draw.
    """
    plan = SamplingPlan.from_instance(reduced, eps, seed=seed)
    rng = np.random.default_rng(seed)
    cum = np.cumsum(plan.probabilities)
    draws = rng.random(plan.t_random)
    idx = np.searchsorted(cum, draws, side="right")
    # a draw landing past cum[-1] (rounding shortfall) must clamp to the
    # last index that actually has probability mass
    last = int(np.flatnonzero(plan.probabilities > 0.0)[-1])
    idx = np.minimum(idx, last)
    counts = np.bincount(idx, minlength=len(reduced))
    return _result_from_counts(counts, reduced, plan.t_random)


def _ln_trace_exp(w: np.ndarray) -> float:
    """log(sum exp(w_i)) computed stably."""
    top = float(np.max(w))
    return top + math.log(float(np.sum(np.exp(w - top))))


@dataclass
class PeState:
    """Greedy derandomization state.

    ``t_minus`` scales the lower-tail exponent exp(-t X) and ``t_plus``
    the upper-tail exponent exp(+t' X).  The two exponent accumulators
    hold -t * sum(picks) and +t' * sum(picks); the estimator values are
    assembled in log space so the norm powers cannot underflow.
    """

    plan: SamplingPlan
    t_total: int
    t_minus: float
    t_plus: float
    log_norm_minus: float
    log_norm_plus: float
    exp_sum_lower: np.ndarray
    exp_sum_upper: np.ndarray
    picks: list = field(default_factory=list)
    estimator_trace: list = field(default_factory=list)

    @property
    def t(self) -> int:
        return len(self.picks)

    def _value(self, exp_lower: np.ndarray, exp_upper: np.ndarray, i: int) -> float:
        plan = self.plan
        t_total = self.t_total
        c_phi = self.t_minus * t_total * (1.0 - plan.eps) * plan.mu
        c_psi = -self.t_plus * t_total * (1.0 + plan.eps) * plan.mu
        ln_phi = (
            c_phi
            + _ln_trace_exp(eigh(exp_lower).eigenvalues)
            + (t_total - i) * self.log_norm_minus
        )
        ln_psi = (
            c_psi
            + _ln_trace_exp(eigh(exp_upper).eigenvalues)
            + (t_total - i) * self.log_norm_plus
        )
        return math.exp(ln_phi) + math.exp(ln_psi)

    def current_value(self) -> float:
        return self._value(self.exp_sum_lower, self.exp_sum_upper, self.t)


def pe_params(reduced: ReducedInstance, eps: float, t_total: int | None = None) -> PeState:
    """Initialize the pessimistic-estimator state and check phi_0 + psi_0 < 1.

    When the budget fails the check, the raised TNotLargeEnough carries a
    ``suggested_t`` computed from the measured per-step decay rates of the
    two estimators, which does satisfy it.
    """
    plan = SamplingPlan.from_instance(reduced, eps)
    mu = plan.mu
    if mu >= 1.0:
        raise ValueError("derandomization needs rank at least 2")
    if (1.0 + eps) * mu >= 1.0:
        raise ValueError("(1 + eps) * mu must stay below 1 for a finite exponent")
    t_minus, t_plus = pe_exponents(mu, eps)

    r = reduced.rank
    mean_minus = np.zeros((r, r))
    mean_plus = np.zeros((r, r))
    for prob, c, tr in zip(plan.probabilities, reduced.matrices, reduced.traces):
        if prob <= 0.0:
            continue
        spec = eigh(c / tr)
        q = spec.eigenvectors
        mean_minus += prob * ((q * np.exp(-t_minus * spec.eigenvalues)) @ q.T)
        mean_plus += prob * ((q * np.exp(t_plus * spec.eigenvalues)) @ q.T)
    log_norm_minus = math.log(float(eigh(symmetrize(mean_minus)).eigenvalues[-1]))
    log_norm_plus = math.log(float(eigh(symmetrize(mean_plus)).eigenvalues[-1]))

    state = PeState(
        plan=plan,
        t_total=plan.t_derand if t_total is None else int(t_total),
        t_minus=t_minus,
        t_plus=t_plus,
        log_norm_minus=log_norm_minus,
        log_norm_plus=log_norm_plus,
        exp_sum_lower=np.zeros((r, r)),
        exp_sum_upper=np.zeros((r, r)),
    )
    start = state.current_value()
    if start >= 1.0:
        # per-step decay rates of ln phi and ln psi; both are positive
        rate_lower = -(t_minus * (1.0 - eps) * mu + log_norm_minus)
        rate_upper = t_plus * (1.0 + eps) * mu - log_norm_plus
        suggested = math.floor(math.log(2.0 * r) / min(rate_lower, rate_upper)) + 1
        raise TNotLargeEnough(
            f"phi_0 + psi_0 = {start} >= 1 for T = {state.t_total}",
            suggested_t=max(suggested, state.t_total + 1),
        )
    state.estimator_trace.append(start)
    return state


def pe_greedy_step(state: PeState, reduced: ReducedInstance) -> int:
    """Append the pick minimizing phi + psi (lowest index on ties).

    The estimator property guarantees the minimum does not exceed the
    probability-weighted average, hence never exceeds the current value.
    """
    i_next = state.t + 1
    best_j = -1
    best_val = math.inf
    for j, (prob, c, tr) in enumerate(
        zip(state.plan.probabilities, reduced.matrices, reduced.traces)
    ):
        if prob <= 0.0:
            continue
        x = c / tr
        val = state._value(
            symmetrize(state.exp_sum_lower - state.t_minus * x),
            symmetrize(state.exp_sum_upper + state.t_plus * x),
            i_next,
        )
        if val < best_val:
            best_val = val
            best_j = j
    x = reduced.matrices[best_j] / reduced.traces[best_j]
    state.exp_sum_lower = symmetrize(state.exp_sum_lower - state.t_minus * x)
    state.exp_sum_upper = symmetrize(state.exp_sum_upper + state.t_plus * x)
    state.picks.append(best_j)
    state.estimator_trace.append(best_val)
    return best_j


def pe_sparsify(
    reduced: ReducedInstance, eps: float, t_total: int | None = None
) -> SparsifierResult:
    """Deterministic sparsifier via T greedy pessimistic-estimator steps.

    Output weights use the same quantization as ``aw_sample``; because the
    final estimator value stays below 1, the certificate eigenvalues are
    guaranteed to lie inside [1-eps, 1+eps] with no randomness involved.
    Raises TNotLargeEnough when the budget cannot force success; retry
    once with the exception's ``suggested_t``.
    """
    state = pe_params(reduced, eps, t_total=t_total)
    counts = np.zeros(len(reduced), dtype=int)
    for _ in range(state.t_total):
        counts[pe_greedy_step(state, reduced)] += 1
    return _result_from_counts(counts, reduced, state.t_total)
