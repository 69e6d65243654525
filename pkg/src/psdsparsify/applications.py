"""Applications of the sparsifier: graphs, hypergraphs, and thinned SDPs.

Every construction here reduces to one call of ``sparsify_sum`` on a
purpose-built PSD collection: per-edge Laplacians for graphs, clique
Laplacians for hyperedges, and block-diagonal liftings that append scalar
slots carrying costs, SDP objective terms, simplex weights, or restricted
Laplacians for a subgraph family.  Because every lifted matrix is block
diagonal, the single sandwich certificate splits into one certificate per
block.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import (
    InfeasibleInput,
    InvalidColoring,
    InvalidCost,
    InvalidFamily,
    InvalidSimplexPoint,
)
from .linalg import (
    DEFAULT_PSD_TOL,
    PsdCollection,
    SandwichCertificate,
    certificate_for,
    is_psd,
    reduce_to_identity,
    symmetrize,
)
from .solve import sparsify_sum

CUT_ENUMERATION_LIMIT = 20


@dataclass(frozen=True)
class WeightedGraph:
    """Vertices 1..n and weighted edges (u, v, w) with u < v, w > 0."""

    n: int
    edges: list

    def __post_init__(self):
        seen = set()
        for u, v, w in self.edges:
            if not (1 <= u < v <= self.n):
                raise ValueError(f"edge ({u}, {v}) out of range for n = {self.n}")
            if w <= 0:
                raise ValueError(f"edge ({u}, {v}) has nonpositive weight {w}")
            if (u, v) in seen:
                raise ValueError(f"duplicate edge ({u}, {v})")
            seen.add((u, v))

    @property
    def m(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class WeightedHypergraph:
    """Vertices 1..n and weighted hyperedges (vertex tuple, w) with w > 0."""

    n: int
    hyperedges: list

    def __post_init__(self):
        for verts, w in self.hyperedges:
            if len(verts) < 2:
                raise ValueError(f"hyperedge {verts} has fewer than two vertices")
            if len(set(verts)) != len(verts):
                raise ValueError(f"hyperedge {verts} repeats a vertex")
            if any(not 1 <= v <= self.n for v in verts):
                raise ValueError(f"hyperedge {verts} out of range for n = {self.n}")
            if w <= 0:
                raise ValueError(f"hyperedge {verts} has nonpositive weight {w}")

    @property
    def m(self) -> int:
        return len(self.hyperedges)


@dataclass(frozen=True)
class SdpInstance:
    """min c^T z s.t. sum(z_i A_i) >= B, z >= 0, with a feasible z_star."""

    matrices: list
    target: np.ndarray
    cost: np.ndarray
    z_star: np.ndarray


def _edge_vector(n: int, u: int, v: int) -> np.ndarray:
    x = np.zeros(n)
    x[u - 1] = 1.0
    x[v - 1] = -1.0
    return x


def laplacian(g: WeightedGraph) -> np.ndarray:
    """sum over edges of w * (e_u - e_v)(e_u - e_v)^T."""
    out = np.zeros((g.n, g.n))
    for u, v, w in g.edges:
        x = _edge_vector(g.n, u, v)
        out += w * np.outer(x, x)
    return symmetrize(out)


def edge_collection(g: WeightedGraph) -> PsdCollection:
    """One rank-one Laplacian per edge, in edge order."""
    mats = []
    factors = []
    for u, v, w in g.edges:
        x = _edge_vector(g.n, u, v)
        mats.append(w * np.outer(x, x))
        factors.append((np.sqrt(w) * x)[np.newaxis, :])
    return PsdCollection.from_matrices(mats, factors=factors, validate=False)


def graph_cut_weight(g: WeightedGraph, s) -> float:
    """Total weight of edges with exactly one endpoint in s."""
    s = set(s)
    return float(sum(w for u, v, w in g.edges if (u in s) != (v in s)))


def _reweighted_graph(g: WeightedGraph, y: np.ndarray) -> WeightedGraph:
    edges = [
        (u, v, yi * w) for (u, v, w), yi in zip(g.edges, y) if yi > 0.0
    ]
    return WeightedGraph(n=g.n, edges=edges)


@dataclass(frozen=True)
class CostWindow:
    """One linear functional before and after reweighting."""

    original: float
    sparsified: float

    def within(self, eps: float, tol: float = 1e-6) -> bool:
        lo = self.original * (1.0 - tol)
        hi = (1.0 + eps) * self.original * (1.0 + tol) + tol
        return lo <= self.sparsified <= hi


@dataclass(frozen=True)
class GraphSparsification:
    """Reweighted subgraph plus the certificates backing it.

    ``weights`` is the per-edge multiplier vector y (edge order of the
    input graph); ``cost_windows`` and ``member_certificates`` are filled
    by the cost/rainbow and subgraph-family variants respectively.
    """

    subgraph: WeightedGraph
    certificate: SandwichCertificate
    weights: np.ndarray
    lifted_rank: int
    cost_windows: list | None = None
    member_certificates: list | None = None


@dataclass(frozen=True)
class HypergraphSparsification:
    subhypergraph: WeightedHypergraph
    certificate: SandwichCertificate
    weights: np.ndarray
    lifted_rank: int


def sparsify_graph(
    g: WeightedGraph, eps: float, algo: str = "bss", seed: int = 0
) -> GraphSparsification:
    """Spectral sparsifier: L_G(w) <= L_H(w_H) <= (1+eps) L_G(w)."""
    result = sparsify_sum(edge_collection(g), eps, algo=algo, seed=seed)
    return GraphSparsification(
        subgraph=_reweighted_graph(g, result.weights),
        certificate=result.certificate,
        weights=result.weights,
        lifted_rank=result.reduced_rank,
    )


def cost_lifted_collection(g: WeightedGraph, costs) -> PsdCollection:
    """Edge Laplacians extended with one diagonal slot per cost function."""
    costs = [np.asarray(c, dtype=float) for c in costs]
    for i, c in enumerate(costs):
        if c.shape != (g.m,):
            raise InvalidCost(f"cost {i} has shape {c.shape}, expected ({g.m},)")
        if np.any(c < 0.0):
            raise InvalidCost(f"cost {i} has a negative entry")
    dim = g.n + len(costs)
    mats = []
    for idx, (u, v, w) in enumerate(g.edges):
        block = np.zeros((dim, dim))
        x = _edge_vector(g.n, u, v)
        block[: g.n, : g.n] = np.outer(x, x)
        for i, c in enumerate(costs):
            block[g.n + i, g.n + i] = c[idx]
        mats.append(w * block)
    return PsdCollection.from_matrices(mats, validate=False)


def sparsify_with_costs(
    g: WeightedGraph,
    costs,
    eps: float,
    algo: str = "bss",
    seed: int = 0,
) -> GraphSparsification:
    """Sparsify while preserving each cost total within [1, 1+eps].

    Each edge matrix gains one diagonal slot per cost function holding
    w_e * c_{i,e}; the block-diagonal sandwich then bounds every cost sum
    alongside the Laplacian.
    """
    costs = [np.asarray(c, dtype=float) for c in costs]
    coll = cost_lifted_collection(g, costs)
    result = sparsify_sum(coll, eps, algo=algo, seed=seed)
    y = result.weights

    lap_cert = certificate_for(reduce_to_identity(edge_collection(g)), y)
    base = np.array([w for _, _, w in g.edges])
    windows = [
        CostWindow(
            original=float(np.sum(base * c)),
            sparsified=float(np.sum(y * base * c)),
        )
        for c in costs
    ]
    return GraphSparsification(
        subgraph=_reweighted_graph(g, y),
        certificate=lap_cert,
        weights=y,
        lifted_rank=result.reduced_rank,
        cost_windows=windows,
    )


def rainbow_sparsify(
    g: WeightedGraph,
    coloring,
    eps: float,
    algo: str = "bss",
    seed: int = 0,
) -> GraphSparsification:
    """Sparsify while preserving each color class weight within [1-eps, 1+eps].

    ``coloring`` lists, per class, the edge indices it contains; classes
    must partition the edge set.  Implemented as costs with indicator
    vectors, whose [1, 1+eps] windows imply the stated two-sided ones.
    """
    covered = [0] * g.m
    indicators = []
    for cls in coloring:
        c = np.zeros(g.m)
        for idx in cls:
            if not 0 <= idx < g.m:
                raise InvalidColoring(f"edge index {idx} out of range")
            covered[idx] += 1
            c[idx] = 1.0
        indicators.append(c)
    if any(count != 1 for count in covered):
        bad = [i for i, count in enumerate(covered) if count != 1]
        raise InvalidColoring(f"edges {bad} are not covered exactly once")
    return sparsify_with_costs(g, indicators, eps, algo=algo, seed=seed)


def clique_laplacian(vertices, n: int) -> np.ndarray:
    """Laplacian of the complete graph on the given vertices inside [1..n]."""
    out = np.zeros((n, n))
    for u, v in itertools.combinations(sorted(vertices), 2):
        x = _edge_vector(n, u, v)
        out += np.outer(x, x)
    return symmetrize(out)


def hypergraph_laplacian(h: WeightedHypergraph) -> np.ndarray:
    """sum over hyperedges of w_E times the clique Laplacian on E."""
    out = np.zeros((h.n, h.n))
    for verts, w in h.hyperedges:
        out += w * clique_laplacian(verts, h.n)
    return symmetrize(out)


def hyperedge_collection(h: WeightedHypergraph) -> PsdCollection:
    mats = [w * clique_laplacian(verts, h.n) for verts, w in h.hyperedges]
    return PsdCollection.from_matrices(mats, validate=False)


def sparsify_hypergraph(
    h: WeightedHypergraph, eps: float, algo: str = "bss", seed: int = 0
) -> HypergraphSparsification:
    """Sub-hypergraph whose clique-expansion Laplacian sandwiches the input."""
    result = sparsify_sum(hyperedge_collection(h), eps, algo=algo, seed=seed)
    kept = [
        (verts, yi * w)
        for (verts, w), yi in zip(h.hyperedges, result.weights)
        if yi > 0.0
    ]
    return HypergraphSparsification(
        subhypergraph=WeightedHypergraph(n=h.n, hyperedges=kept),
        certificate=result.certificate,
        weights=result.weights,
        lifted_rank=result.reduced_rank,
    )


def cut_weight(h: WeightedHypergraph, s) -> float:
    """Total weight of hyperedges crossing the cut (at least one vertex on
    each side)."""
    s = set(s)
    total = 0.0
    for verts, w in h.hyperedges:
        inside = sum(1 for v in verts if v in s)
        if 0 < inside < len(verts):
            total += w
    return float(total)


def cut_weight_star(h: WeightedHypergraph, s) -> float:
    """sum over hyperedges of w_E * |S cap E| * |E \\ S|; equals the
    Laplacian quadratic form at the indicator of S."""
    s = set(s)
    total = 0.0
    for verts, w in h.hyperedges:
        inside = sum(1 for v in verts if v in s)
        total += w * inside * (len(verts) - inside)
    return float(total)


@dataclass(frozen=True)
class CutReport:
    """Outcome of exhaustive cut checking; empty violations means pass."""

    cuts_checked: int
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations


def _all_nontrivial_subsets(n: int):
    for mask in range(1, 2**n - 1):
        yield tuple(v + 1 for v in range(n) if mask >> v & 1)


def cut_sparsifier_report(
    h: WeightedHypergraph,
    sub: WeightedHypergraph,
    eps: float,
    r: int | None = None,
    tol: float = 1e-6,
) -> CutReport:
    """Enumerate every nontrivial cut and check the preservation windows.

    Always checks the crossing-pair value w* within ratio [1, 1+eps].  For
    an r-uniform input also checks the hyperedge-count value w within
    [(r-1)/(r^2/4), (1+eps) r^2/(4(r-1))] and the definitional window
    (r-1) w <= w* <= floor(r/2) ceil(r/2) w on both hypergraphs; for r = 3
    additionally requires w* = 2w exactly and w within [1, 1+eps].
    """
    if h.n > CUT_ENUMERATION_LIMIT:
        raise ValueError(
            f"refusing to enumerate 2^{h.n} cuts; limit is n <= {CUT_ENUMERATION_LIMIT}"
        )
    violations = []
    count = 0
    for s in _all_nontrivial_subsets(h.n):
        count += 1
        ws_orig = cut_weight_star(h, s)
        ws_sub = cut_weight_star(sub, s)
        if ws_orig == 0.0:
            if abs(ws_sub) > tol:
                violations.append((s, "star-zero", ws_sub))
        elif not ws_orig * (1.0 - tol) <= ws_sub <= (1.0 + eps) * ws_orig * (1.0 + tol):
            violations.append((s, "star-window", ws_sub / ws_orig))
        if r is None:
            continue
        w_orig = cut_weight(h, s)
        w_sub = cut_weight(sub, s)
        lo = (r - 1.0) / (r**2 / 4.0)
        hi = (1.0 + eps) * r**2 / (4.0 * (r - 1.0))
        if w_orig == 0.0:
            if abs(w_sub) > tol:
                violations.append((s, "count-zero", w_sub))
        elif not lo * (1.0 - tol) <= w_sub / w_orig <= hi * (1.0 + tol):
            violations.append((s, "count-window", w_sub / w_orig))
        pairs = float((r // 2) * (r - r // 2))
        for label, wv, wsv in (("input", w_orig, ws_orig), ("output", w_sub, ws_sub)):
            if not (r - 1.0) * wv - tol <= wsv <= pairs * wv + tol:
                violations.append((s, f"definitional-{label}", (wv, wsv)))
        if r == 3:
            if abs(ws_orig - 2.0 * w_orig) > tol or abs(ws_sub - 2.0 * w_sub) > tol:
                violations.append((s, "three-uniform-identity", (w_orig, ws_orig)))
            if w_orig > 0.0 and not w_orig * (1.0 - tol) <= w_sub <= (
                1.0 + eps
            ) * w_orig * (1.0 + tol):
                violations.append((s, "three-uniform-window", w_sub / w_orig))
    return CutReport(cuts_checked=count, violations=violations)


def sdp_lifted_collection(inst: SdpInstance) -> PsdCollection:
    """Blocks diag(z*_i A_i, c_i z*_i) after validating the instance."""
    m = len(inst.matrices)
    cost = np.asarray(inst.cost, dtype=float)
    z_star = np.asarray(inst.z_star, dtype=float)
    if cost.shape != (m,) or z_star.shape != (m,):
        raise InfeasibleInput("cost and z_star must have one entry per matrix")
    if np.any(cost < 0.0) or np.any(z_star < 0.0):
        raise InfeasibleInput("cost and z_star must be nonnegative")
    n = inst.matrices[0].shape[0]
    dominant = sum(z * a for z, a in zip(z_star, inst.matrices))
    if not is_psd(symmetrize(dominant - inst.target), DEFAULT_PSD_TOL):
        raise InfeasibleInput("z_star does not dominate the target matrix")
    mats = []
    for a, zi, ci in zip(inst.matrices, z_star, cost):
        block = np.zeros((n + 1, n + 1))
        block[:n, :n] = zi * a
        block[n, n] = ci * zi
        mats.append(block)
    return PsdCollection.from_matrices(mats, validate=False)


def sparse_sdp(
    inst: SdpInstance, eps: float, algo: str = "bss", seed: int = 0
) -> np.ndarray:
    """Thin a feasible SDP solution to O(n/eps^2) support.

    Returns z_bar with sum(z_bar_i A_i) >= B and
    c^T z_bar <= (1+eps) c^T z_star, built by sparsifying the blocks
    diag(z*_i A_i, c_i z*_i).
    """
    coll = sdp_lifted_collection(inst)
    result = sparsify_sum(coll, eps, algo=algo, seed=seed)
    return result.weights * np.asarray(inst.z_star, dtype=float)


def renormalize_simplex(vec: np.ndarray) -> np.ndarray:
    """Scale a nonnegative vector to sum exactly to 1.0 in float64."""
    out = vec / vec.sum()
    for _ in range(4):
        delta = 1.0 - float(out.sum())
        if delta == 0.0:
            break
        out[int(np.argmax(out))] += delta
    return out


def caratheodory_lifted(lambdas, coll: PsdCollection) -> PsdCollection:
    """Blocks diag(lambda_i B_i, lambda_i) after validating the simplex point."""
    lam = np.asarray(lambdas, dtype=float)
    if lam.shape != (len(coll),):
        raise InvalidSimplexPoint("lambda must have one entry per matrix")
    if np.any(lam < 0.0) or abs(float(lam.sum()) - 1.0) > 1e-9:
        raise InvalidSimplexPoint("lambda must be nonnegative and sum to 1")
    n = coll.dim
    mats = []
    for li, b in zip(lam, coll.matrices):
        block = np.zeros((n + 1, n + 1))
        block[:n, :n] = li * b
        block[n, n] = li
        mats.append(block)
    return PsdCollection.from_matrices(mats, validate=False)


def caratheodory(
    lambdas, coll: PsdCollection, eps: float, algo: str = "bss", seed: int = 0
) -> np.ndarray:
    """Sparse convex reweighting mu with (1-eps) B <= sum(mu_i B_i) <= (1+eps) B
    where B = sum(lambda_i B_i)."""
    lifted = caratheodory_lifted(lambdas, coll)
    result = sparsify_sum(lifted, eps, algo=algo, seed=seed)
    return renormalize_simplex(result.weights * np.asarray(lambdas, dtype=float))


def family_lifted_collection(g: WeightedGraph, family):
    """Edge Laplacians extended with one diagonal section per family member.

    Returns the collection plus the normalized members, each a pair of
    (sorted edge list, vertex -> local position map).
    """
    edge_index = {(u, v): i for i, (u, v, _) in enumerate(g.edges)}
    members = []
    for fi, f_edges in enumerate(family):
        normalized = set()
        verts = set()
        for u, v in f_edges:
            u, v = (u, v) if u < v else (v, u)
            if (u, v) not in edge_index:
                raise InvalidFamily(f"family member {fi} uses non-edge ({u}, {v})")
            normalized.add((u, v))
            verts.update((u, v))
        order = {vtx: pos for pos, vtx in enumerate(sorted(verts))}
        members.append((sorted(normalized), order))

    offsets = [g.n]
    for _, order in members:
        offsets.append(offsets[-1] + len(order))
    dim = offsets[-1]

    mats = []
    for u, v, w in g.edges:
        block = np.zeros((dim, dim))
        x = _edge_vector(g.n, u, v)
        block[: g.n, : g.n] = np.outer(x, x)
        for fi, (f_edges, order) in enumerate(members):
            if (u, v) in f_edges:
                local = np.zeros(len(order))
                local[order[u]] = 1.0
                local[order[v]] = -1.0
                lo = offsets[fi]
                hi = lo + len(order)
                block[lo:hi, lo:hi] = np.outer(local, local)
        mats.append(w * block)
    return PsdCollection.from_matrices(mats, validate=False), members


def subgraph_family_sparsify(
    g: WeightedGraph,
    family,
    eps: float,
    algo: str = "bss",
    seed: int = 0,
) -> GraphSparsification:
    """One reweighting that sparsifies G and every family member at once.

    Each family member is a list of (u, v) pairs that must be edges of G;
    its weights are inherited from G.  Edge blocks get one extra diagonal
    section per member holding the edge's Laplacian restricted to the
    member's vertex set.  Returns the subgraph, the certificate for G, and
    one certificate per family member.
    """
    edge_index = {(u, v): i for i, (u, v, _) in enumerate(g.edges)}
    coll, members = family_lifted_collection(g, family)
    result = sparsify_sum(coll, eps, algo=algo, seed=seed)
    y = result.weights

    cert_g = certificate_for(reduce_to_identity(edge_collection(g)), y)
    member_certs = []
    for f_edges, order in members:
        f_dim = len(order)
        f_mats = []
        f_weights = []
        for u, v in f_edges:
            idx = edge_index[(u, v)]
            local = np.zeros(f_dim)
            local[order[u]] = 1.0
            local[order[v]] = -1.0
            f_mats.append(g.edges[idx][2] * np.outer(local, local))
            f_weights.append(y[idx])
        f_coll = PsdCollection.from_matrices(f_mats, validate=False)
        member_certs.append(
            certificate_for(reduce_to_identity(f_coll), np.array(f_weights))
        )
    return GraphSparsification(
        subgraph=_reweighted_graph(g, y),
        certificate=cert_g,
        weights=y,
        lifted_rank=result.reduced_rank,
        member_certificates=member_certs,
    )


def psd_counterexample(n: int) -> list:
    """{2I} plus all symmetric basis pairs E_ij = e_i e_j^T + e_j e_i^T.

    The E_ij are indefinite, the sum is I + J, and any reweighting whose
    E_ij coordinate vanishes cannot satisfy the lower sandwich bound: PSD
    inputs are necessary for the sparsification guarantee.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    mats = [2.0 * np.eye(n)]
    for i in range(n):
        for j in range(i + 1, n):
            e = np.zeros((n, n))
            e[i, j] = 1.0
            e[j, i] = 1.0
            mats.append(e)
    return mats
