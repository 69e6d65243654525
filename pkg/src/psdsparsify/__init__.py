"""Sparsify sums of positive semidefinite matrices.

Given B_1, ..., B_m with B = sum(B_i) and eps in (0, 1), the solvers here
find a nonnegative vector y of small support with
B <= sum(y_i B_i) <= (1 + eps) B, via four interchangeable algorithms:
a deterministic barrier-potential method (``bss``), two matrix
multiplicative weights variants (``mmwum-wf``, ``mmwum-block``), and
trace-weighted sampling with an optional pessimistic-estimator
derandomization (``aw-sample``, ``pe``).
"""

from .bss import BssParams, bss_sparsify, phi_lower, phi_upper
from .linalg import (
    PsdCollection,
    ReducedInstance,
    SandwichCertificate,
    SparsifierResult,
    Spectrum,
    eigh,
    is_psd,
    pinv_sqrt,
    reduce_to_identity,
    sym_exp,
    symmetrize,
    trace_inner,
    verify_sandwich,
)
from .mmwum_block import BlockParams, block_sparsify, oracle_width_fixture
from .mmwum_wf import WfParams, check_potential_equivalence, wf_sparsify
from .sampling import SamplingPlan, aw_sample, pe_sparsify
from .solve import ALGORITHMS, run_algorithm, sparsify_sum

__all__ = [
    "ALGORITHMS",
    "BlockParams",
    "BssParams",
    "PsdCollection",
    "ReducedInstance",
    "SamplingPlan",
    "SandwichCertificate",
    "SparsifierResult",
    "Spectrum",
    "WfParams",
    "aw_sample",
    "block_sparsify",
    "bss_sparsify",
    "check_potential_equivalence",
    "eigh",
    "is_psd",
    "oracle_width_fixture",
    "pe_sparsify",
    "phi_lower",
    "phi_upper",
    "pinv_sqrt",
    "reduce_to_identity",
    "run_algorithm",
    "sparsify_sum",
    "sym_exp",
    "symmetrize",
    "trace_inner",
    "verify_sandwich",
    "wf_sparsify",
]
