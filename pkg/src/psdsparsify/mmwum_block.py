"""Two-block matrix multiplicative weights sparsifier, O(n log n / eps^3).

Block 1 tracks sum(y_i C_i) - I from below and block 2 tracks its
negation, each through an exponential weight matrix
W_k = exp(-beta/(ell+rho) * S_k) over its accumulated loss S_k.  The
oracle answers with a single index chosen by two Markov-style conditions
and a step alpha = 1/p_j, whose width alpha*trace(C_j) never exceeds
rho = (1+eta) n / eta.  ``oracle_width_fixture`` builds the rank-one
instance showing that no oracle can do better than rho = Omega(n/eta).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .errors import OracleInfeasible, TimeBudgetExceeded
from .linalg import (
    PsdCollection,
    ReducedInstance,
    SandwichCertificate,
    SparsifierResult,
    eigh,
    sym_exp,
    symmetrize,
)

NUM_BLOCKS = 2  # block 1 carries (C_i, I), block 2 the negated copy


@dataclass(frozen=True)
class BlockParams:
    """Schedule derived from (eps, n) keeping the error sum below eps."""

    eps: float
    n: int
    beta: float
    eta: float
    ell: float
    rho: float
    T: int

    @staticmethod
    def from_epsilon(eps: float, n: int) -> "BlockParams":
        if not 0.0 < eps < 1.0:
            raise ValueError("eps must lie in (0, 1)")
        if n < 1:
            raise ValueError("n must be positive")
        beta = eps / 4.0
        eta = eps / 8.0
        ell = 1.0
        rho = (1.0 + eta) * n / eta
        t_count = max(1, math.ceil(2.0 * (rho + ell) * math.log(n) / (beta * eps)))
        return BlockParams(eps=eps, n=n, beta=beta, eta=eta, ell=ell, rho=rho, T=t_count)

    def error_bound(self) -> float:
        """beta*ell + (rho+ell) ln n / (T beta) + (1+beta) eta; at most eps."""
        return (
            self.beta * self.ell
            + (self.rho + self.ell) * math.log(self.n) / (self.T * self.beta)
            + (1.0 + self.beta) * self.eta
        )

    def __post_init__(self):
        if self.error_bound() > self.eps:
            raise ValueError(
                f"error bound {self.error_bound()} exceeds eps = {self.eps}"
            )


def block_oracle(
    x1: np.ndarray,
    x2: np.ndarray,
    reduced: ReducedInstance,
    eta: float,
) -> tuple[int, float]:
    """Single-index oracle for the two-block update.

    With p_i = <X1, C_i>/trace(X1), a feasible j must satisfy both Markov
    conditions <X2, C_j>/p_j <= (1+eta) trace(X2) and trace(C_j)/p_j <=
    (1+eta) n / eta.  Among the feasible, the smallest width user
    trace(C_j)/p_j wins, lowest index on ties; alpha = 1/p_j.
    """
    traces = reduced.traces
    nonzero = traces > 0.0
    tr_x1 = float(np.trace(x1))
    tr_x2 = float(np.trace(x2))
    p = reduced.score_all(x1) / tr_x1
    with np.errstate(divide="ignore", invalid="ignore"):
        cond_x2 = reduced.score_all(x2) / p
        widths = traces / p
    rho = (1.0 + eta) * reduced.rank / eta
    feasible = nonzero & (p > 0.0) & (cond_x2 <= (1.0 + eta) * tr_x2) & (widths <= rho)
    if not np.any(feasible):
        raise OracleInfeasible("no index satisfies both Markov conditions")
    widths = np.where(feasible, widths, np.inf)
    j = int(np.argmin(widths))
    return j, float(1.0 / p[j])


@dataclass(frozen=True)
class BlockIterate:
    """Per-iteration record: chosen pair and its width alpha * trace(C_j)."""

    t: int
    j: int
    alpha: float
    width: float


def block_sparsify(
    reduced: ReducedInstance,
    eps: float,
    history: list | None = None,
    max_seconds: float | None = None,
) -> SparsifierResult:
    """Run the two-block update for T rounds and average the oracle answers.

    Certificate eigenvalues land inside [1 - eps, 1 + eps]; support is at
    most T = ceil(2 (rho + ell) ln n / (beta eps)).
    """
    params = BlockParams.from_epsilon(eps, reduced.rank)
    r = reduced.rank
    eye = np.eye(r)
    # accumulated losses per block; block signs mirror (C_i, I) vs (-C_i, -I)
    exponent_sums = [np.zeros((r, r)) for _ in range(NUM_BLOCKS)]
    block_sign = [1.0, -1.0]
    block_level = [params.ell, -params.ell]
    y_sum = np.zeros(len(reduced))
    scale = -params.beta / (params.ell + params.rho)
    deadline = None if max_seconds is None else time.monotonic() + max_seconds
    for t in range(1, params.T + 1):
        if deadline is not None and time.monotonic() > deadline:
            raise TimeBudgetExceeded(
                f"mmwum-block exceeded {max_seconds} s at iteration {t}"
            )
        weight_mats = [sym_exp(scale * exponent_sums[k]) for k in range(NUM_BLOCKS)]
        j, alpha = block_oracle(weight_mats[0], weight_mats[1], reduced, params.eta)
        step = alpha * reduced.matrices[j]
        for k in range(NUM_BLOCKS):
            loss = block_sign[k] * step - block_sign[k] * eye + block_level[k] * eye
            exponent_sums[k] = symmetrize(exponent_sums[k] + loss)
        y_sum[j] += alpha
        if history is not None:
            history.append(
                BlockIterate(t=t, j=j, alpha=alpha, width=alpha * reduced.traces[j])
            )
    y_bar = y_sum / params.T
    w = eigh(reduced.weighted_sum(y_bar)).eigenvalues
    cert = SandwichCertificate(
        lambda_min=float(w[0]),
        lambda_max=float(w[-1]),
        support_size=int(np.count_nonzero(y_bar > 0.0)),
    )
    return SparsifierResult(weights=y_bar, certificate=cert)


@dataclass(frozen=True)
class WidthFixture:
    """Hard instance for the oracle width: only the k 'tail' vectors are
    feasible and every feasible answer spends width at least lower_bound."""

    collection: PsdCollection
    x1: np.ndarray
    x2: np.ndarray
    lower_bound: float
    k: int

    def matrix_type(self, index: int) -> int:
        """1, 2 or 3: position of the block the index-th vector lives in."""
        return index // self.k + 1


def oracle_width_fixture(k: int, eta: float) -> WidthFixture:
    """Rank-one instance of dimension n = 3k forcing width >= (1-eta) n/(9 eta).

    The densities are X1 = Diag(1, z^3, z) (x) I_k and X2 its entrywise
    reciprocal with z = 3 eta; the 3k unit vectors split into two rotated
    pairs plus the bare third coordinate, and only the third type admits a
    feasible step.  Matrices are ordered type-major: indices [0, k) are
    type 1, [k, 2k) type 2, [2k, 3k) type 3.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if not 0.0 < eta <= 0.2:
        raise ValueError("eta must lie in (0, 0.2] for the separation to hold")
    zeta = 3.0 * eta
    eye_k = np.eye(k)
    x1 = np.kron(np.diag([1.0, zeta**3, zeta]), eye_k)
    x2 = np.kron(np.diag([1.0, zeta**-3, 1.0 / zeta]), eye_k)
    s = 1.0 / math.sqrt(2.0)
    profiles = [
        np.array([s, -s, 0.0]),
        np.array([s, s, 0.0]),
        np.array([0.0, 0.0, 1.0]),
    ]
    mats = []
    factors = []
    for profile in profiles:
        for jj in range(k):
            v = np.kron(profile, eye_k[jj])
            mats.append(np.outer(v, v))
            factors.append(v[np.newaxis, :])
    coll = PsdCollection.from_matrices(mats, factors=factors)
    n = 3 * k
    return WidthFixture(
        collection=coll,
        x1=x1,
        x2=x2,
        lower_bound=(1.0 - eta) * n / (9.0 * eta),
        k=k,
    )
