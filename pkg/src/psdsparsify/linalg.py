"""Dense symmetric linear algebra and the reduction to the isotropic case.

Every algorithm in this package works on a collection of positive
semidefinite matrices B_1, ..., B_m whose sum is B.  The reduction
conjugates each B_i by the pseudoinverse square root of B restricted to
range(B), producing matrices C_1, ..., C_m of dimension r = rank(B) with
sum(C_i) = I_r.  All matrices are plain float64 ``numpy`` arrays kept
exactly symmetric.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import (
    DimMismatch,
    EmptyProblem,
    ExpOverflow,
    InvalidMatrix,
    NegativeWeight,
    NotPsd,
)

DEFAULT_PSD_TOL = 1e-9

# exp(710) overflows float64; stay a little below
EXP_OVERFLOW_LIMIT = 700.0


def default_rank_tol(dim: int) -> float:
    """Relative rank cutoff, scaled with dimension to absorb rounding."""
    return 1e-10 * dim


def symmetrize(m: np.ndarray) -> np.ndarray:
    """Return 0.5*(M + M^T), which is exactly symmetric entrywise."""
    m = np.asarray(m, dtype=float)
    return 0.5 * (m + m.T)


@dataclass(frozen=True)
class Spectrum:
    """Full eigendecomposition of a symmetric matrix.

    ``eigenvalues`` is ascending; ``eigenvectors`` has the matching
    orthonormal columns, so Q diag(w) Q^T reconstructs the input.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def eigh(m: np.ndarray) -> Spectrum:
    """Eigendecompose a symmetric matrix, ascending eigenvalue order."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidMatrix(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidMatrix("matrix has non-finite entries")
    w, q = np.linalg.eigh(m)
    return Spectrum(eigenvalues=w, eigenvectors=q)


def is_psd(m: np.ndarray, tol: float = DEFAULT_PSD_TOL) -> bool:
    """True iff lambda_min(M) >= -tol * max(1, spectral radius of M)."""
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    w = eigh(m).eigenvalues
    scale = max(1.0, float(np.max(np.abs(w))) if w.size else 0.0)
    return bool(w[0] >= -tol * scale)


def pinv_sqrt(m: np.ndarray, rank_tol: float | None = None) -> tuple[np.ndarray, int]:
    """Pseudoinverse square root of a PSD matrix.

    Eigenvalues at or below ``rank_tol * lambda_max`` are treated as zero.
    Returns the matrix Q diag(w_kept^-1/2) Q^T and the retained rank.
    """
    spec = eigh(m)
    n = spec.eigenvalues.size
    if rank_tol is None:
        rank_tol = default_rank_tol(n)
    w, q = spec.eigenvalues, spec.eigenvectors
    lam_max = float(w[-1]) if n else 0.0
    cutoff = rank_tol * max(lam_max, 0.0)
    if w[0] < -max(cutoff, rank_tol):
        raise NotPsd(f"lambda_min = {w[0]:.3e} below PSD tolerance")
    keep = w > cutoff
    inv_sqrt = np.zeros_like(w)
    inv_sqrt[keep] = 1.0 / np.sqrt(w[keep])
    root = symmetrize((q * inv_sqrt) @ q.T)
    return root, int(np.count_nonzero(keep))


def sym_exp(m: np.ndarray) -> np.ndarray:
    """Matrix exponential via eigendecomposition (exact for symmetric M)."""
    spec = eigh(m)
    if float(spec.eigenvalues[-1]) > EXP_OVERFLOW_LIMIT:
        raise ExpOverflow(
            f"largest exponent {spec.eigenvalues[-1]:.2f} exceeds {EXP_OVERFLOW_LIMIT}"
        )
    q = spec.eigenvectors
    return symmetrize((q * np.exp(spec.eigenvalues)) @ q.T)


def trace_inner(x: np.ndarray, y: np.ndarray) -> float:
    """Trace inner product <X, Y> = sum_ij X_ij Y_ij = trace(XY)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise DimMismatch(f"shapes {x.shape} and {y.shape} differ")
    return float(np.sum(x * y))


@dataclass(frozen=True)
class PsdCollection:
    """Ordered list of PSD matrices sharing one dimension.

    ``factors`` optionally stores, for each member, a (k_i, n) array of
    row vectors v with B_i = sum_v v v^T; graph builders populate it so
    callers can recover the rank-one structure cheaply.
    """

    dim: int
    matrices: list[np.ndarray]
    factors: list[np.ndarray] | None = None

    def __len__(self) -> int:
        return len(self.matrices)

    @staticmethod
    def from_matrices(
        matrices,
        psd_tol: float = DEFAULT_PSD_TOL,
        factors=None,
        validate: bool = True,
    ) -> "PsdCollection":
        mats = [symmetrize(m) for m in matrices]
        if not mats:
            raise EmptyProblem("collection has no matrices")
        dim = mats[0].shape[0]
        for i, m in enumerate(mats):
            if m.shape != (dim, dim):
                raise DimMismatch(f"matrix {i} has shape {m.shape}, expected {(dim, dim)}")
            if validate and not is_psd(m, psd_tol):
                raise NotPsd(f"matrix {i} is not PSD at tolerance {psd_tol}")
        return PsdCollection(dim=dim, matrices=mats, factors=factors)

    def total(self) -> np.ndarray:
        """B = sum_i B_i."""
        out = np.zeros((self.dim, self.dim))
        for m in self.matrices:
            out += m
        return symmetrize(out)


@dataclass(frozen=True)
class ReducedInstance:
    """Whitened collection C_1..C_m with sum(C_i) = I on range(B).

    ``basis`` holds the n x r orthonormal range basis P and ``whitener``
    the composed map (B^+)^{1/2} P, so C_i = whitener^T B_i whitener and
    any weight vector found for the C_i applies verbatim to the B_i.
    """

    rank: int
    matrices: list[np.ndarray]
    basis: np.ndarray
    whitener: np.ndarray

    def __len__(self) -> int:
        return len(self.matrices)

    @cached_property
    def flattened(self) -> np.ndarray:
        """(m, r*r) stack of the whitened matrices for fast batch scoring."""
        return np.stack(self.matrices).reshape(len(self.matrices), -1)

    @cached_property
    def traces(self) -> np.ndarray:
        return np.array([float(np.trace(c)) for c in self.matrices])

    def score_all(self, v: np.ndarray) -> np.ndarray:
        """Trace inner product of every member with the matrix v."""
        return self.flattened @ v.ravel()

    def weighted_sum(self, y: np.ndarray) -> np.ndarray:
        out = np.zeros((self.rank, self.rank))
        for yi, c in zip(y, self.matrices):
            if yi != 0.0:
                out += yi * c
        return symmetrize(out)


def reduce_to_identity(
    coll: PsdCollection, rank_tol: float | None = None
) -> ReducedInstance:
    """Whiten a collection so its members sum to the identity on range(B)."""
    if rank_tol is None:
        rank_tol = default_rank_tol(coll.dim)
    b = coll.total()
    spec = eigh(b)
    w, q = spec.eigenvalues, spec.eigenvectors
    lam_max = float(w[-1])
    if lam_max <= 0.0 or not np.any(w > rank_tol * lam_max):
        raise EmptyProblem("sum of the collection is numerically zero")
    keep = w > rank_tol * lam_max
    basis = q[:, keep]
    whitener = basis / np.sqrt(w[keep])  # = (B^+)^{1/2} P column-scaled
    rank = int(np.count_nonzero(keep))

    # range(B_i) must lie inside range(B); failure means a non-PSD member
    # slipped past validation.
    residual_proj = np.eye(coll.dim) - basis @ basis.T
    mats = []
    for i, m in enumerate(coll.matrices):
        outside = residual_proj @ m @ residual_proj
        if np.linalg.norm(outside, "fro") > 1e-8 * max(1.0, lam_max):
            raise NotPsd(f"matrix {i} has range outside range(B)")
        mats.append(symmetrize(whitener.T @ m @ whitener))
    return ReducedInstance(rank=rank, matrices=mats, basis=basis, whitener=whitener)


@dataclass(frozen=True)
class SandwichCertificate:
    """Extreme eigenvalues of the whitened reweighted sum on range(B)."""

    lambda_min: float
    lambda_max: float
    support_size: int

    @property
    def epsilon_achieved(self) -> float:
        return self.lambda_max / self.lambda_min - 1.0

    def passes(self, eps: float, tol: float = 1e-6) -> bool:
        """B <= sum(y_i B_i) <= (1+eps) B up to relative slack tol."""
        return self.lambda_min >= 1.0 - tol and self.lambda_max <= (1.0 + eps) * (1.0 + tol)

    def within_window(self, lo: float, hi: float, tol: float = 1e-6) -> bool:
        return self.lambda_min >= lo - tol and self.lambda_max <= hi + tol


@dataclass(frozen=True)
class SparsifierResult:
    """Nonnegative weights, their support, and the spectral certificate.

    ``reduced_rank`` records the whitened dimension the run worked in when
    the caller went through the reduction wrapper.
    """

    weights: np.ndarray
    certificate: SandwichCertificate
    reduced_rank: int | None = None

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.weights > 0.0)


def certificate_for(reduced: ReducedInstance, y: np.ndarray) -> SandwichCertificate:
    """Certificate of an already-whitened instance under weights y."""
    s = reduced.weighted_sum(y)
    w = eigh(s).eigenvalues
    return SandwichCertificate(
        lambda_min=float(w[0]),
        lambda_max=float(w[-1]),
        support_size=int(np.count_nonzero(np.asarray(y) > 0.0)),
    )


def verify_sandwich(
    coll: PsdCollection,
    y: np.ndarray,
    rank_tol: float | None = None,
) -> SandwichCertificate:
    """Whiten sum(y_i B_i) against B = sum(B_i) and report the extremes.

    The returned certificate ``passes(eps, tol)`` iff
    lambda_min >= 1 - tol and lambda_max <= (1+eps)(1+tol).
    """
    y = np.asarray(y, dtype=float)
    if y.shape != (len(coll),):
        raise DimMismatch(f"weight vector has shape {y.shape}, expected ({len(coll)},)")
    if np.any(y < 0.0):
        raise NegativeWeight("weight vector has a negative entry")
    reduced = reduce_to_identity(coll, rank_tol=rank_tol)
    return certificate_for(reduced, y)
