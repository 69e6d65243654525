"""Width-free multiplicative weights: oracle, potentials, equivalence."""

import math

import numpy as np
import pytest

from psdsparsify.errors import ExpOverflow
from psdsparsify.linalg import PsdCollection, eigh, reduce_to_identity, symmetrize
from psdsparsify.mmwum_wf import (
    WfParams,
    check_potential_equivalence,
    psi_lower,
    psi_upper,
    wf_oracle,
    wf_sparsify,
)

from conftest import random_psd


def scalar_params():
    # hand-picked schedule satisfying 1/delta_L - n = 1/delta_U at n = 1
    return WfParams(eps=0.5, n=1, eta=0.25, delta_U=1.0, delta_L=0.5, T=1, gamma=1.0)


class TestParams:
    @pytest.mark.parametrize("eps", [0.1, 0.3, 0.5, 0.9])
    @pytest.mark.parametrize("n", [1, 2, 7, 20])
    def test_delta_identity(self, eps, n):
        p = WfParams.from_epsilon(eps, n)
        assert 1.0 / p.delta_L - n == pytest.approx(1.0 / p.delta_U, rel=1e-9)

    def test_schedule_r2(self):
        p = WfParams.from_epsilon(0.5, 2)
        assert p.eta == 0.25
        assert p.delta_U == 0.125
        assert p.delta_L == pytest.approx(0.25 / (1.25 * 2.0), rel=1e-15)
        assert p.T == 23
        assert p.gamma == 0.125

    def test_minimum_one_iteration(self):
        assert WfParams.from_epsilon(0.5, 1).T == 1

    def test_rejects_imbalanced(self):
        with pytest.raises(ValueError):
            WfParams(eps=0.5, n=2, eta=0.25, delta_U=1.0, delta_L=0.5, T=1, gamma=1.0)


class TestOracle:
    def test_scalar_instance(self):
        red = reduce_to_identity(PsdCollection.from_matrices([np.array([[1.0]])]))
        one = np.array([[1.0]])
        j, alpha = wf_oracle(one, one, red, scalar_params())
        assert j == 0
        assert alpha == pytest.approx(math.log(2.0), rel=1e-12)

    def test_tie_break_on_symmetric_instance(self):
        n = 4
        mats = [np.diag((np.arange(n) == i).astype(float)) for i in range(n)]
        red = reduce_to_identity(PsdCollection.from_matrices(mats))
        params = WfParams.from_epsilon(0.5, n)
        x = np.eye(n) / n
        j, _ = wf_oracle(x, x, red, params)
        assert j == 0

    @pytest.mark.parametrize("seed", range(6))
    def test_returned_pair_satisfies_both_inequalities(self, seed):
        rng = np.random.default_rng(seed)
        n, m = 5, 17
        coll = PsdCollection.from_matrices(
            [random_psd(rng, n, rank=int(rng.integers(1, 4))) for _ in range(m)],
            validate=False,
        )
        red = reduce_to_identity(coll)
        params = WfParams.from_epsilon(0.4, red.rank)
        a = random_psd(rng, red.rank, rank=2) * 0.1
        spec = eigh(a)
        q = spec.eigenvectors
        ex_u = np.exp(params.gamma * spec.eigenvalues)
        ex_l = np.exp(-params.gamma * spec.eigenvalues)
        x_u = symmetrize((q * (ex_u / ex_u.sum())) @ q.T)
        x_l = symmetrize((q * (ex_l / ex_l.sum())) @ q.T)
        j, alpha = wf_oracle(x_u, x_l, red, params)
        c = red.matrices[j]
        tr = float(np.trace(c))
        growth = (math.exp(params.gamma * alpha * tr) - 1.0) / tr
        shrink = (1.0 - math.exp(-params.gamma * alpha * tr)) / tr
        # the growth inequality is pinned with equality by the alpha choice
        assert growth * float(np.sum(x_u * c)) == pytest.approx(params.delta_U, rel=1e-9)
        assert shrink * float(np.sum(x_l * c)) >= params.delta_L * (1 - 1e-9)


class TestPsi:
    def test_zero_matrix(self):
        assert psi_upper(np.zeros((3, 3)), 0.0, 0.7) == pytest.approx(3.0)

    def test_scalar_shift(self):
        n = 4
        assert psi_upper(np.zeros((n, n)), math.log(2.0), 1.0) == pytest.approx(n / 2.0)

    def test_lower_at_shift_one(self):
        assert psi_lower(np.zeros((2, 2)), 1.0, 1.0) == pytest.approx(2.0 * math.e)

    def test_overflow(self):
        with pytest.raises(ExpOverflow):
            psi_upper(np.diag([800.0, 0.0]), 0.0, 1.0)


class TestEquivalence:
    def test_zero_step_agrees(self):
        # both formulations reject a zero step identically
        params = WfParams.from_epsilon(0.5, 3)
        assert check_potential_equivalence(np.zeros((3, 3)), np.eye(3), 0.0, 0, params)

    def test_huge_step_agrees_on_reject(self):
        params = WfParams.from_epsilon(0.5, 3)
        a = np.eye(3) * 0.2
        assert check_potential_equivalence(a, np.eye(3), 1e6, 1, params)

    def test_accepted_steps_hold(self, reduced_random):
        params = WfParams.from_epsilon(0.5, reduced_random.rank)
        history = []
        wf_sparsify(reduced_random, 0.5, history=history)
        a = np.zeros((reduced_random.rank, reduced_random.rank))
        for rec in history[:40]:
            x = reduced_random.matrices[rec.j]
            assert check_potential_equivalence(a, x, rec.alpha, rec.t - 1, params)
            a = symmetrize(a + rec.alpha * x)


class TestSparsify:
    def test_identity_pair(self, reduced_pair):
        res = wf_sparsify(reduced_pair, 0.5)
        cert = res.certificate
        assert cert.support_size <= 23
        assert cert.lambda_min >= 0.5 - 1e-6
        assert cert.lambda_max <= 1.5 + 1e-6

    def test_single_matrix(self):
        red = reduce_to_identity(PsdCollection.from_matrices([np.eye(3)]))
        res = wf_sparsify(red, 0.5)
        assert res.support.tolist() == [0]
        cert = res.certificate
        assert 0.5 <= cert.lambda_min == cert.lambda_max <= 1.5

    def test_width_free_upper_bound(self, reduced_random):
        params = WfParams.from_epsilon(0.5, reduced_random.rank)
        history = []
        res = wf_sparsify(reduced_random, 0.5, history=history)
        # rebuild A(T) from the raw picks and compare against the bound
        a = np.zeros((reduced_random.rank, reduced_random.rank))
        for rec in history:
            a = symmetrize(a + rec.alpha * reduced_random.matrices[rec.j])
        lam_max = float(np.linalg.eigvalsh(a)[-1]) / params.T
        bound = (
            math.log1p(params.delta_U) / params.gamma
            + math.log(reduced_random.rank) / (params.T * params.gamma)
        )
        assert lam_max <= bound * (1 + 1e-9)
        assert res.certificate.lambda_max <= 1.5 + 1e-6

    def test_multiplicative_potential_chain(self, reduced_random):
        params = WfParams.from_epsilon(0.5, reduced_random.rank)
        history = []
        wf_sparsify(reduced_random, 0.5, history=history)
        for rec in history:
            assert rec.phi_u_after <= (1.0 + params.delta_U) * rec.phi_u_before * (1 + 1e-8)
            assert rec.phi_l_after <= (1.0 - params.delta_L) * rec.phi_l_before * (1 + 1e-8)

    def test_gamma_invariance(self, reduced_random):
        params = WfParams.from_epsilon(0.5, reduced_random.rank)
        hist_a, hist_b = [], []
        res_a = wf_sparsify(reduced_random, 0.5, history=hist_a)
        res_b = wf_sparsify(reduced_random, 0.5, gamma=10.0 * params.gamma, history=hist_b)
        assert [r.j for r in hist_a] == [r.j for r in hist_b]
        np.testing.assert_allclose(res_a.weights, res_b.weights, rtol=1e-9)
        assert res_a.certificate.lambda_max == pytest.approx(
            res_b.certificate.lambda_max, rel=1e-9
        )
