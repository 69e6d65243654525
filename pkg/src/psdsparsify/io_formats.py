"""Whitespace-delimited text formats for every input kind.

All formats share the conventions: blank lines and full-line ``#``
comments are ignored, matrix indices are 0-based, vertex indices are
1-based, and matrices are given by upper-triangle entries that are
mirrored on parse.  The ``emit_*`` functions produce the canonical form
(sorted nonzero entries, shortest round-trip float repr), so parsing an
emitted file reproduces the object bit for bit.

matrices     n m | repeated blocks:  mat <k>  then  i j value
graph        n   | lines:  u v weight
hypergraph   n   | lines:  k v1 ... vk weight
costs        k m | k lines of m values (edge order of the graph file)
family       f   | per member:  e  then e lines of  u v
sdp          sdp n m | m mat blocks | target block | cost ... | feasible ...
simplex      simplex n m | lambda ... | m mat blocks
"""

from __future__ import annotations

import numpy as np

from .applications import SdpInstance, WeightedGraph, WeightedHypergraph
from .errors import ParseError
from .linalg import PsdCollection, symmetrize


def _content_lines(text: str):
    """Yield (1-based line number, stripped content) skipping blanks/comments."""
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield no, line


def _parse_float(token: str, no: int, what: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(no, f"bad {what} {token!r}") from None
    if not np.isfinite(value):
        raise ParseError(no, f"non-finite {what} {token!r}")
    return value


def _parse_int(token: str, no: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(no, f"bad {what} {token!r}") from None


class _Cursor:
    def __init__(self, text: str):
        self.lines = list(_content_lines(text))
        self.pos = 0

    def done(self) -> bool:
        return self.pos >= len(self.lines)

    def peek(self):
        return self.lines[self.pos]

    def take(self, what: str):
        if self.done():
            last = self.lines[-1][0] if self.lines else 1
            raise ParseError(last, f"unexpected end of input, expected {what}")
        item = self.lines[self.pos]
        self.pos += 1
        return item


def _parse_entry_block(cur: _Cursor, n: int, context: str) -> np.ndarray:
    """Read 'i j value' lines until the next keyword line; mirror entries."""
    mat = np.zeros((n, n))
    seen = {}
    while not cur.done():
        no, line = cur.peek()
        parts = line.split()
        if not parts[0].lstrip("+-").isdigit():
            break
        cur.take("entry")
        if len(parts) != 3:
            raise ParseError(no, f"expected 'i j value' in {context}")
        i = _parse_int(parts[0], no, "row index")
        j = _parse_int(parts[1], no, "column index")
        if not (0 <= i < n and 0 <= j < n):
            raise ParseError(no, f"entry ({i}, {j}) out of range for n = {n}")
        v = _parse_float(parts[2], no, "entry value")
        key = (min(i, j), max(i, j))
        if key in seen and seen[key] != v:
            raise ParseError(no, f"asymmetric duplicate entry at {key}")
        seen[key] = v
        mat[key[0], key[1]] = v
        mat[key[1], key[0]] = v
    return mat


def parse_matrix_collection(text: str) -> PsdCollection:
    cur = _Cursor(text)
    no, header = cur.take("header 'n m'")
    parts = header.split()
    if len(parts) != 2:
        raise ParseError(no, "header must be 'n m'")
    n = _parse_int(parts[0], no, "dimension")
    m = _parse_int(parts[1], no, "matrix count")
    if n < 1 or m < 1:
        raise ParseError(no, "n and m must be positive")
    mats = _parse_mat_blocks(cur, n, m)
    if not cur.done():
        no, line = cur.peek()
        raise ParseError(no, f"unexpected trailing content {line!r}")
    return PsdCollection.from_matrices(mats)


def _parse_mat_blocks(cur: _Cursor, n: int, m: int) -> list:
    mats = []
    for k in range(m):
        no, line = cur.take(f"'mat {k}' header")
        parts = line.split()
        if parts[0] != "mat" or len(parts) != 2:
            raise ParseError(no, f"expected 'mat {k}' header, got {line!r}")
        if _parse_int(parts[1], no, "matrix index") != k:
            raise ParseError(no, f"matrix headers must run 0..{m - 1} in order")
        mats.append(_parse_entry_block(cur, n, f"mat {k}"))
    return mats


def parse_graph(text: str) -> WeightedGraph:
    cur = _Cursor(text)
    no, header = cur.take("vertex count")
    if len(header.split()) != 1:
        raise ParseError(no, "graph header must be a single vertex count")
    n = _parse_int(header, no, "vertex count")
    edges = []
    seen = set()
    while not cur.done():
        no, line = cur.take("edge")
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(no, "expected 'u v weight'")
        u = _parse_int(parts[0], no, "vertex")
        v = _parse_int(parts[1], no, "vertex")
        w = _parse_float(parts[2], no, "weight")
        if u == v:
            raise ParseError(no, f"self-loop at vertex {u}")
        u, v = (u, v) if u < v else (v, u)
        if not 1 <= u < v <= n:
            raise ParseError(no, f"edge ({u}, {v}) out of range for n = {n}")
        if (u, v) in seen:
            raise ParseError(no, f"duplicate edge ({u}, {v})")
        if w <= 0:
            raise ParseError(no, f"edge weight must be positive, got {w}")
        seen.add((u, v))
        edges.append((u, v, w))
    return WeightedGraph(n=n, edges=edges)


def parse_hypergraph(text: str) -> WeightedHypergraph:
    cur = _Cursor(text)
    no, header = cur.take("vertex count")
    if len(header.split()) != 1:
        raise ParseError(no, "hypergraph header must be a single vertex count")
    n = _parse_int(header, no, "vertex count")
    hyperedges = []
    while not cur.done():
        no, line = cur.take("hyperedge")
        parts = line.split()
        k = _parse_int(parts[0], no, "hyperedge size")
        if k < 2:
            raise ParseError(no, f"hyperedge size must be at least 2, got {k}")
        if len(parts) != k + 2:
            raise ParseError(no, f"expected {k} vertices and a weight")
        verts = tuple(_parse_int(p, no, "vertex") for p in parts[1 : 1 + k])
        if len(set(verts)) != k:
            raise ParseError(no, f"hyperedge {verts} repeats a vertex")
        if any(not 1 <= v <= n for v in verts):
            raise ParseError(no, f"hyperedge {verts} out of range for n = {n}")
        w = _parse_float(parts[1 + k], no, "weight")
        if w <= 0:
            raise ParseError(no, f"hyperedge weight must be positive, got {w}")
        hyperedges.append((tuple(sorted(verts)), w))
    return WeightedHypergraph(n=n, hyperedges=hyperedges)


def parse_costs(text: str) -> list:
    cur = _Cursor(text)
    no, header = cur.take("header 'k m'")
    parts = header.split()
    if len(parts) != 2:
        raise ParseError(no, "costs header must be 'k m'")
    k = _parse_int(parts[0], no, "cost count")
    m = _parse_int(parts[1], no, "edge count")
    costs = []
    for i in range(k):
        no, line = cur.take(f"cost vector {i}")
        values = line.split()
        if len(values) != m:
            raise ParseError(no, f"cost vector {i} has {len(values)} entries, expected {m}")
        costs.append(np.array([_parse_float(v, no, "cost") for v in values]))
    if not cur.done():
        no, line = cur.peek()
        raise ParseError(no, f"unexpected trailing content {line!r}")
    return costs


def parse_family(text: str) -> list:
    cur = _Cursor(text)
    no, header = cur.take("member count")
    count = _parse_int(header, no, "member count")
    family = []
    for i in range(count):
        no, line = cur.take(f"edge count of member {i}")
        e = _parse_int(line, no, "edge count")
        member = []
        for _ in range(e):
            no, line = cur.take("edge")
            parts = line.split()
            if len(parts) != 2:
                raise ParseError(no, "expected 'u v'")
            member.append(
                (_parse_int(parts[0], no, "vertex"), _parse_int(parts[1], no, "vertex"))
            )
        family.append(member)
    if not cur.done():
        no, line = cur.peek()
        raise ParseError(no, f"unexpected trailing content {line!r}")
    return family


def parse_sdp(text: str) -> SdpInstance:
    cur = _Cursor(text)
    no, header = cur.take("header 'sdp n m'")
    parts = header.split()
    if len(parts) != 3 or parts[0] != "sdp":
        raise ParseError(no, "sdp header must be 'sdp n m'")
    n = _parse_int(parts[1], no, "dimension")
    m = _parse_int(parts[2], no, "matrix count")
    mats = _parse_mat_blocks(cur, n, m)
    no, line = cur.take("'target' header")
    if line != "target":
        raise ParseError(no, f"expected 'target', got {line!r}")
    target = _parse_entry_block(cur, n, "target")
    no, line = cur.take("'cost ...' line")
    parts = line.split()
    if parts[0] != "cost" or len(parts) != m + 1:
        raise ParseError(no, f"expected 'cost' with {m} values")
    cost = np.array([_parse_float(v, no, "cost") for v in parts[1:]])
    no, line = cur.take("'feasible ...' line")
    parts = line.split()
    if parts[0] != "feasible" or len(parts) != m + 1:
        raise ParseError(no, f"expected 'feasible' with {m} values")
    z_star = np.array([_parse_float(v, no, "feasible value") for v in parts[1:]])
    if not cur.done():
        no, line = cur.peek()
        raise ParseError(no, f"unexpected trailing content {line!r}")
    return SdpInstance(
        matrices=[symmetrize(a) for a in mats], target=target, cost=cost, z_star=z_star
    )


def parse_simplex(text: str) -> tuple[np.ndarray, PsdCollection]:
    cur = _Cursor(text)
    no, header = cur.take("header 'simplex n m'")
    parts = header.split()
    if len(parts) != 3 or parts[0] != "simplex":
        raise ParseError(no, "simplex header must be 'simplex n m'")
    n = _parse_int(parts[1], no, "dimension")
    m = _parse_int(parts[2], no, "matrix count")
    no, line = cur.take("'lambda ...' line")
    parts = line.split()
    if parts[0] != "lambda" or len(parts) != m + 1:
        raise ParseError(no, f"expected 'lambda' with {m} values")
    lam = np.array([_parse_float(v, no, "lambda value") for v in parts[1:]])
    mats = _parse_mat_blocks(cur, n, m)
    if not cur.done():
        no, line = cur.peek()
        raise ParseError(no, f"unexpected trailing content {line!r}")
    return lam, PsdCollection.from_matrices(mats)


def _fmt(value: float) -> str:
    return repr(float(value))


def _entry_lines(mat: np.ndarray) -> list:
    n = mat.shape[0]
    lines = []
    for i in range(n):
        for j in range(i, n):
            if mat[i, j] != 0.0:
                lines.append(f"{i} {j} {_fmt(mat[i, j])}")
    return lines


def emit_matrix_collection(coll: PsdCollection) -> str:
    lines = [f"{coll.dim} {len(coll)}"]
    for k, mat in enumerate(coll.matrices):
        lines.append(f"mat {k}")
        lines.extend(_entry_lines(mat))
    return "\n".join(lines) + "\n"


def emit_graph(g: WeightedGraph) -> str:
    lines = [str(g.n)]
    lines.extend(f"{u} {v} {_fmt(w)}" for u, v, w in g.edges)
    return "\n".join(lines) + "\n"


def emit_hypergraph(h: WeightedHypergraph) -> str:
    lines = [str(h.n)]
    for verts, w in h.hyperedges:
        lines.append(f"{len(verts)} " + " ".join(str(v) for v in verts) + f" {_fmt(w)}")
    return "\n".join(lines) + "\n"


def emit_costs(costs) -> str:
    costs = [np.asarray(c, dtype=float) for c in costs]
    m = costs[0].size if costs else 0
    lines = [f"{len(costs)} {m}"]
    lines.extend(" ".join(_fmt(v) for v in c) for c in costs)
    return "\n".join(lines) + "\n"
