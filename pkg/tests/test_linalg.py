"""Core symmetric linear algebra and the whitening reduction."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from psdsparsify.errors import (
    DimMismatch,
    EmptyProblem,
    ExpOverflow,
    InvalidMatrix,
    NegativeWeight,
    NotPsd,
)
from psdsparsify.linalg import (
    PsdCollection,
    certificate_for,
    eigh,
    is_psd,
    pinv_sqrt,
    reduce_to_identity,
    sym_exp,
    symmetrize,
    trace_inner,
    verify_sandwich,
)

from conftest import random_psd


class TestEigh:
    def test_diagonal(self):
        spec = eigh(np.diag([2.0, 1.0]))
        np.testing.assert_allclose(spec.eigenvalues, [1.0, 2.0])
        # eigenvectors are signed permutation columns
        np.testing.assert_allclose(np.abs(spec.eigenvectors), np.eye(2)[:, ::-1])

    def test_zero(self):
        spec = eigh(np.zeros((3, 3)))
        np.testing.assert_allclose(spec.eigenvalues, np.zeros(3))

    def test_off_diagonal_pair(self):
        # characteristic polynomial x^2 - 1 by hand
        spec = eigh(np.array([[0.0, 1.0], [1.0, 0.0]]))
        np.testing.assert_allclose(spec.eigenvalues, [-1.0, 1.0], atol=1e-14)

    def test_nonfinite_rejected(self):
        with pytest.raises(InvalidMatrix):
            eigh(np.array([[np.nan, 0.0], [0.0, 1.0]]))

    @given(st.integers(min_value=1, max_value=8), st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=50, deadline=None)
    def test_reconstruction_and_orthonormality(self, n, seed):
        rng = np.random.default_rng(seed)
        m = random_psd(rng, n)
        spec = eigh(m)
        q, w = spec.eigenvectors, spec.eigenvalues
        rebuilt = (q * w) @ q.T
        assert np.linalg.norm(rebuilt - m, "fro") <= 1e-9 * (1 + np.linalg.norm(m, "fro"))
        assert np.max(np.abs(q.T @ q - np.eye(n))) <= 1e-9
        assert np.all(np.diff(w) >= 0)


class TestIsPsd:
    def test_identity_zero_tol(self):
        assert is_psd(np.eye(4), tol=0.0)

    def test_indefinite(self):
        assert not is_psd(np.diag([1.0, -1.0]), tol=1e-12)

    def test_edge_laplacian_zero_tol(self):
        # eigenvalues {0, 2} by hand
        assert is_psd(np.array([[1.0, -1.0], [-1.0, 1.0]]), tol=0.0)

    @given(st.integers(min_value=1, max_value=7), st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=50, deadline=None)
    def test_gram_matrices_pass(self, n, seed):
        rng = np.random.default_rng(seed)
        assert is_psd(random_psd(rng, n), tol=1e-9)


class TestPinvSqrt:
    def test_rank_deficient_diagonal(self):
        root, rank = pinv_sqrt(np.diag([4.0, 0.0]), rank_tol=1e-10)
        np.testing.assert_allclose(root, np.diag([0.5, 0.0]), atol=1e-14)
        assert rank == 1

    def test_identity(self):
        root, rank = pinv_sqrt(np.eye(3))
        np.testing.assert_allclose(root, np.eye(3), atol=1e-14)
        assert rank == 3

    def test_two_by_two(self):
        # [[2,1],[1,2]] has eigenvalues {1, 3}; result keeps the
        # eigenvectors with eigenvalues {1, 1/sqrt(3)}
        root, rank = pinv_sqrt(np.array([[2.0, 1.0], [1.0, 2.0]]))
        assert rank == 2
        w = np.linalg.eigvalsh(root)
        np.testing.assert_allclose(sorted(w), sorted([1.0, 1.0 / np.sqrt(3.0)]), atol=1e-12)

    def test_rejects_indefinite(self):
        with pytest.raises(NotPsd):
            pinv_sqrt(np.diag([1.0, -1.0]))

    @given(
        st.integers(min_value=1, max_value=7),
        st.integers(min_value=1, max_value=4),
        st.integers(min_value=0, max_value=2**32 - 1),
    )
    @settings(max_examples=50, deadline=None)
    def test_projector_identity(self, n, rank, seed):
        # R M R equals the projector onto the retained eigenspace
        rng = np.random.default_rng(seed)
        m = random_psd(rng, n, rank=min(rank, n))
        root, r = pinv_sqrt(m)
        spec = eigh(m)
        keep = spec.eigenvalues > 1e-10 * n * spec.eigenvalues[-1]
        p = spec.eigenvectors[:, keep]
        assert r == int(np.count_nonzero(keep))
        assert np.linalg.norm(root @ m @ root - p @ p.T, "fro") <= 1e-7


class TestReduceToIdentity:
    def test_diagonal_pair(self, diag_split):
        red = reduce_to_identity(diag_split)
        assert red.rank == 2
        np.testing.assert_allclose(red.matrices[0], np.diag([1.0, 0.0]), atol=1e-12)
        np.testing.assert_allclose(red.matrices[1], np.diag([0.0, 1.0]), atol=1e-12)

    def test_identity_collection(self):
        red = reduce_to_identity(PsdCollection.from_matrices([np.eye(4)]))
        assert red.rank == 4
        np.testing.assert_allclose(red.matrices[0], np.eye(4), atol=1e-12)

    def test_rank_deficient_collapses(self):
        red = reduce_to_identity(PsdCollection.from_matrices([np.diag([1.0, 0.0])]))
        assert red.rank == 1
        np.testing.assert_allclose(red.matrices[0], [[1.0]], atol=1e-12)

    def test_zero_sum_rejected(self):
        coll = PsdCollection.from_matrices([np.zeros((2, 2))], validate=False)
        with pytest.raises(EmptyProblem):
            reduce_to_identity(coll)

    @given(
        st.integers(min_value=2, max_value=7),
        st.integers(min_value=2, max_value=20),
        st.integers(min_value=0, max_value=2**32 - 1),
    )
    @settings(max_examples=40, deadline=None)
    def test_members_sum_to_identity(self, n, m, seed):
        rng = np.random.default_rng(seed)
        coll = PsdCollection.from_matrices(
            [random_psd(rng, n, rank=int(rng.integers(1, 4))) for _ in range(m)],
            validate=False,
        )
        red = reduce_to_identity(coll)
        total = sum(red.matrices)
        assert np.linalg.norm(total - np.eye(red.rank), "fro") <= 1e-8 * red.rank
        for c in red.matrices:
            assert is_psd(c, tol=1e-9)


class TestSymExp:
    def test_zero(self):
        np.testing.assert_allclose(sym_exp(np.zeros((2, 2))), np.eye(2), atol=1e-15)

    def test_scalar(self):
        np.testing.assert_allclose(sym_exp(np.array([[1.0]])), [[np.e]], atol=1e-14)

    def test_log_diagonal(self):
        out = sym_exp(np.diag([np.log(2.0), np.log(3.0)]))
        np.testing.assert_allclose(out, np.diag([2.0, 3.0]), atol=1e-12)

    def test_overflow_guard(self):
        with pytest.raises(ExpOverflow):
            sym_exp(np.diag([800.0, 0.0]))


class TestTraceInner:
    def test_identity_pair(self):
        assert trace_inner(np.eye(5), np.eye(5)) == 5.0

    def test_diagonal(self):
        assert trace_inner(np.diag([1.0, 2.0]), np.diag([3.0, 4.0])) == 11.0

    def test_zero(self):
        rng = np.random.default_rng(0)
        x = random_psd(rng, 4)
        assert trace_inner(x, np.zeros((4, 4))) == 0.0

    def test_dim_mismatch(self):
        with pytest.raises(DimMismatch):
            trace_inner(np.eye(2), np.eye(3))

    @given(st.integers(min_value=1, max_value=8), st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=60, deadline=None)
    def test_exact_symmetry_and_trace_identity(self, n, seed):
        rng = np.random.default_rng(seed)
        x = symmetrize(rng.standard_normal((n, n)))
        y = symmetrize(rng.standard_normal((n, n)))
        assert trace_inner(x, y) == trace_inner(y, x)
        assert trace_inner(x, y) == pytest.approx(np.trace(x @ y), rel=1e-12, abs=1e-12)


class TestVerifySandwich:
    def test_all_ones_is_exact(self, diag_split):
        cert = verify_sandwich(diag_split, np.ones(2))
        assert cert.lambda_min == pytest.approx(1.0, abs=1e-7)
        assert cert.lambda_max == pytest.approx(1.0, abs=1e-7)
        assert cert.passes(0.0, tol=1e-6)

    def test_doubled_weights_fail_small_eps(self, diag_split):
        cert = verify_sandwich(diag_split, 2.0 * np.ones(2))
        assert cert.lambda_min == pytest.approx(2.0, abs=1e-9)
        assert not cert.passes(0.5)

    def test_diagonal_window(self):
        coll = PsdCollection.from_matrices([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
        cert = verify_sandwich(coll, np.array([1.0, 1.3]))
        assert cert.lambda_max == pytest.approx(1.3, abs=1e-12)
        assert cert.passes(0.5)
        assert cert.support_size == 2

    def test_negative_weight_rejected(self, diag_split):
        with pytest.raises(NegativeWeight):
            verify_sandwich(diag_split, np.array([1.0, -0.1]))

    @given(
        st.integers(min_value=2, max_value=6),
        st.integers(min_value=2, max_value=15),
        st.integers(min_value=0, max_value=2**32 - 1),
    )
    @settings(max_examples=40, deadline=None)
    def test_all_ones_property(self, n, m, seed):
        rng = np.random.default_rng(seed)
        coll = PsdCollection.from_matrices(
            [random_psd(rng, n, rank=int(rng.integers(1, 4))) for _ in range(m)],
            validate=False,
        )
        cert = verify_sandwich(coll, np.ones(m))
        assert cert.lambda_min == pytest.approx(1.0, abs=1e-7)
        assert cert.lambda_max == pytest.approx(1.0, abs=1e-7)

    def test_certificate_for_matches(self, diag_split, reduced_pair):
        y = np.array([1.0, 1.2])
        a = verify_sandwich(diag_split, y)
        b = certificate_for(reduced_pair, y)
        assert a.lambda_min == pytest.approx(b.lambda_min, abs=1e-12)
        assert a.lambda_max == pytest.approx(b.lambda_max, abs=1e-12)


class TestPsdCollection:
    def test_rejects_non_psd_members(self):
        with pytest.raises(NotPsd):
            PsdCollection.from_matrices([np.diag([1.0, -1.0])])

    def test_rejects_dim_mismatch(self):
        with pytest.raises(DimMismatch):
            PsdCollection.from_matrices([np.eye(2), np.eye(3)])

    def test_total(self, diag_split):
        np.testing.assert_allclose(diag_split.total(), np.diag([1.0, 2.0]))
