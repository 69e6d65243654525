"""Deterministic barrier-potential sparsifier with O(n/eps^2) support.

The algorithm grows A = sum(y_i C_i) one rank-restricted step at a time
while two moving barriers u_t = u_0 + t*delta_U and ell_t = ell_0 +
t*delta_L trap the spectrum.  Trace-inverse potentials measure how close
eigenvalues crowd each barrier; the shift bounds U_A(X) and L_A(X) give
the closed-form step-size window that keeps both potentials from rising.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .errors import (
    BarrierViolated,
    PotentialTooLarge,
    StepNotFound,
    TimeBudgetExceeded,
    ZeroDirection,
)
from .linalg import (
    ReducedInstance,
    SandwichCertificate,
    SparsifierResult,
    eigh,
    symmetrize,
)


@dataclass(frozen=True)
class BssParams:
    """Barrier schedule derived from (eps, n).

    The choices keep 1/delta_U + eps_U = 1/delta_L - eps_L, the balance
    that guarantees an admissible step exists at every iteration.
    """

    eps: float
    n: int
    delta_L: float
    eps_L: float
    ell_0: float
    delta_U: float
    eps_U: float
    u_0: float
    T: int

    @staticmethod
    def from_epsilon(eps: float, n: int) -> "BssParams":
        if not 0.0 < eps < 1.0:
            raise ValueError("eps must lie in (0, 1)")
        if n < 1:
            raise ValueError("n must be positive")
        delta_L = 1.0
        eps_L = eps / 2.0
        ell_0 = -n / eps_L
        delta_U = (2.0 + eps) / (2.0 - eps)
        eps_U = eps / (2.0 * delta_U)
        u_0 = n / eps_U
        t_count = math.ceil(4.0 * n / eps**2)
        return BssParams(
            eps=eps,
            n=n,
            delta_L=delta_L,
            eps_L=eps_L,
            ell_0=ell_0,
            delta_U=delta_U,
            eps_U=eps_U,
            u_0=u_0,
            T=t_count,
        )

    def __post_init__(self):
        lhs = 1.0 / self.delta_U + self.eps_U
        rhs = 1.0 / self.delta_L - self.eps_L
        if abs(lhs - rhs) > 1e-12 * max(1.0, abs(rhs)):
            raise ValueError(f"barrier balance violated: {lhs} != {rhs}")
        if self.T < 1:
            raise ValueError("iteration count must be at least 1")

    def upper_barrier(self, t: int) -> float:
        return self.u_0 + t * self.delta_U

    def lower_barrier(self, t: int) -> float:
        return self.ell_0 + t * self.delta_L


@dataclass
class BssState:
    """Mutable loop state: accumulated A, weights, and iteration count."""

    A: np.ndarray
    y: np.ndarray
    t: int = 0


def phi_upper(a: np.ndarray, u: float) -> float:
    """Upper barrier potential trace((uI - A)^-1) = sum 1/(u - lambda_i)."""
    w = eigh(a).eigenvalues
    if u <= w[-1]:
        raise BarrierViolated(f"u = {u} is not above lambda_max = {w[-1]}")
    return float(np.sum(1.0 / (u - w)))


def phi_lower(a: np.ndarray, ell: float) -> float:
    """Lower barrier potential trace((A - ell*I)^-1) = sum 1/(lambda_i - ell)."""
    w = eigh(a).eigenvalues
    if ell >= w[0]:
        raise BarrierViolated(f"ell = {ell} is not below lambda_min = {w[0]}")
    return float(np.sum(1.0 / (w - ell)))


def _upper_score_matrix(a: np.ndarray, u: float, delta_U: float) -> np.ndarray:
    """Matrix V with U_A(X) = <V, X> for the barrier shift u -> u + delta_U."""
    spec = eigh(a)
    w, q = spec.eigenvalues, spec.eigenvectors
    if u <= w[-1]:
        raise BarrierViolated(f"u = {u} is not above lambda_max = {w[-1]}")
    u_next = u + delta_U
    inv = 1.0 / (u_next - w)
    drop = float(np.sum(1.0 / (u - w)) - np.sum(inv))
    coeff = inv**2 / drop + inv
    return symmetrize((q * coeff) @ q.T)


def _lower_score_matrix(a: np.ndarray, ell: float, delta_L: float) -> np.ndarray:
    """Matrix V with L_A(X) = <V, X> for the barrier shift ell -> ell + delta_L."""
    spec = eigh(a)
    w, q = spec.eigenvalues, spec.eigenvectors
    if ell >= w[0]:
        raise BarrierViolated(f"ell = {ell} is not below lambda_min = {w[0]}")
    phi_here = float(np.sum(1.0 / (w - ell)))
    if phi_here > 1.0 / delta_L:
        raise PotentialTooLarge(
            f"phi_lower = {phi_here} exceeds 1/delta_L = {1.0 / delta_L}"
        )
    ell_next = ell + delta_L
    inv = 1.0 / (w - ell_next)
    rise = float(np.sum(inv) - phi_here)
    coeff = inv**2 / rise - inv
    return symmetrize((q * coeff) @ q.T)


def upper_shift_bound(a: np.ndarray, x: np.ndarray, u: float, delta_U: float) -> float:
    """U_A(X): any 1/alpha >= U_A(X) keeps lambda_max below the raised barrier
    and does not increase the upper potential."""
    x = np.asarray(x, dtype=float)
    if not np.any(x):
        raise ZeroDirection("direction matrix X is zero")
    return float(np.sum(_upper_score_matrix(a, u, delta_U) * x))


def lower_shift_bound(a: np.ndarray, x: np.ndarray, ell: float, delta_L: float) -> float:
    """L_A(X): any 0 < 1/alpha <= L_A(X) lifts lambda_min past the raised
    barrier without increasing the lower potential."""
    x = np.asarray(x, dtype=float)
    return float(np.sum(_lower_score_matrix(a, ell, delta_L) * x))


def bss_step(
    state: BssState, reduced: ReducedInstance, params: BssParams
) -> tuple[int, float]:
    """Pick the next (index, step size) pair.

    Scores every candidate by the feasibility gap L_A(C_j) - U_A(C_j) and
    returns the widest gap (lowest index on ties) with 1/alpha set to the
    midpoint (U + L)/2, the point of maximal margin for both one-sided
    guarantees.
    """
    u = params.upper_barrier(state.t)
    ell = params.lower_barrier(state.t)
    v_upper = _upper_score_matrix(state.A, u, params.delta_U)
    v_lower = _lower_score_matrix(state.A, ell, params.delta_L)
    scores_u = reduced.score_all(v_upper)
    scores_l = reduced.score_all(v_lower)
    nonzero = reduced.traces > 0.0
    feasible = nonzero & (scores_u > 0.0) & (scores_l >= scores_u)
    if not np.any(feasible):
        raise StepNotFound(
            "no candidate satisfies L >= U > 0 "
            f"(sum U = {scores_u[nonzero].sum()}, sum L = {scores_l[nonzero].sum()})",
            sum_upper=float(scores_u[nonzero].sum()),
            sum_lower=float(scores_l[nonzero].sum()),
        )
    gaps = np.where(feasible, scores_l - scores_u, -np.inf)
    j = int(np.argmax(gaps))
    alpha = 2.0 / (scores_u[j] + scores_l[j])
    return j, alpha


@dataclass(frozen=True)
class BssIterate:
    """Per-iteration trace record used by the property and acceptance tests."""

    t: int
    j: int
    alpha: float
    u: float
    ell: float
    phi_u: float
    phi_l: float
    lam_min: float
    lam_max: float
    sum_upper: float
    sum_lower: float


def bss_sparsify(
    reduced: ReducedInstance,
    eps: float,
    history: list | None = None,
    max_seconds: float | None = None,
) -> SparsifierResult:
    """Run the barrier-potential sparsifier to completion.

    Returns weights scaled by 1/lambda_min(A(T)), so the certificate has
    lambda_min = 1 and lambda_max <= ((2+eps)/(2-eps))^2 up to rounding.
    Support is at most T = ceil(4r/eps^2).
    """
    params = BssParams.from_epsilon(eps, reduced.rank)
    state = BssState(
        A=np.zeros((reduced.rank, reduced.rank)),
        y=np.zeros(len(reduced)),
    )
    deadline = None if max_seconds is None else time.monotonic() + max_seconds
    for t in range(1, params.T + 1):
        if deadline is not None and time.monotonic() > deadline:
            raise TimeBudgetExceeded(f"bss exceeded {max_seconds} s at iteration {t}")
        j, alpha = bss_step(state, reduced, params)
        state.A = symmetrize(state.A + alpha * reduced.matrices[j])
        state.y[j] += alpha
        state.t = t
        if history is not None:
            u_t = params.upper_barrier(t)
            ell_t = params.lower_barrier(t)
            w = eigh(state.A).eigenvalues
            # post-hoc scan sums for the feasibility invariant
            v_upper = _upper_score_matrix(state.A, u_t, params.delta_U)
            v_lower = _lower_score_matrix(state.A, ell_t, params.delta_L)
            sum_u = float(reduced.score_all(v_upper).sum())
            sum_l = float(reduced.score_all(v_lower).sum())
            history.append(
                BssIterate(
                    t=t,
                    j=j,
                    alpha=alpha,
                    u=u_t,
                    ell=ell_t,
                    phi_u=phi_upper(state.A, u_t),
                    phi_l=phi_lower(state.A, ell_t),
                    lam_min=float(w[0]),
                    lam_max=float(w[-1]),
                    sum_upper=sum_u,
                    sum_lower=sum_l,
                )
            )
    w = eigh(state.A).eigenvalues
    lam_min = float(w[0])
    y = state.y / lam_min
    cert = SandwichCertificate(
        lambda_min=float(w[0] / lam_min),
        lambda_max=float(w[-1] / lam_min),
        support_size=int(np.count_nonzero(y > 0.0)),
    )
    return SparsifierResult(weights=y, certificate=cert)
