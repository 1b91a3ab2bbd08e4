"""Exact small-n expansion of Laplacian trace moments over edge circuits.

Every edge ``a = (hi, lo)`` with ``hi > lo`` carries the signed
incidence vector ``d_a = e_hi - e_lo``.  The rank-one matrices
``-d_a d_b^T`` generate the expansion: the negated Laplacian is
``sum_a xi_a * (-d_a d_a^T)``, products contract through the trace
pairing ``edge_trace(a, b) = -<d_a, d_b> in {-2, -1, 0, 1}``, and

    E tr(L^r) = (-1)^r * sum over circuits (a_1 ~ ... ~ a_r ~ a_1) of
                prod_j edge_trace(a_j, a_{j+1}) * prod_e E[xi^mult(e)]

where a circuit is a cyclic edge sequence in which consecutive edges
share a vertex (every edge shares a vertex with itself).  With exact
entry moments (e.g. Rademacher) the whole computation stays in integer
arithmetic, which makes this module a brute-force oracle for the
Monte Carlo paths.
"""
from __future__ import annotations

from collections import Counter
from typing import Iterator, Tuple

import numpy as np

from .errors import ConfigError

Edge = Tuple[int, int]  # (hi, lo) with hi > lo, vertices 1..n

MAX_N = 6
MAX_R = 6


def make_edge(hi: int, lo: int) -> Edge:
    if not lo < hi:
        raise ConfigError(f"edge needs hi > lo, got ({hi}, {lo})")
    if lo < 1:
        raise ConfigError("vertices are numbered from 1")
    return (hi, lo)


def edges_of(n: int) -> list:
    """All edges on n vertices, lexicographic: (2,1), (3,1), (3,2), ..."""
    if n < 2:
        raise ConfigError("need at least 2 vertices")
    return [(hi, lo) for hi in range(2, n + 1) for lo in range(1, hi)]


def edges_adjacent(a: Edge, b: Edge) -> bool:
    """Do the two edges share a vertex?  (Every edge is adjacent to
    itself.)"""
    return a[0] in b or a[1] in b


def edge_trace(a: Edge, b: Edge) -> int:
    """Trace pairing of two edges: -<d_a, d_b>.

    -2 when the edges coincide; -1 when they share their high or their
    low vertex; +1 when the high vertex of one is the low vertex of the
    other; 0 when disjoint.  Symmetric in its arguments.
    """
    if a == b:
        return -2
    if a[1] == b[1] or a[0] == b[0]:
        return -1
    if a[1] == b[0] or a[0] == b[1]:
        return 1
    return 0


def edge_pair_matrix(a: Edge, b: Edge, n: int) -> np.ndarray:
    """The rank-one signed matrix ``-d_a d_b^T`` as a dense integer
    array: -1 at (hi,hi') and (lo,lo'), +1 at (hi,lo') and (lo,hi').

    Its trace equals :func:`edge_trace`, and products contract as
    ``M(a,b) @ M(c,d) == edge_trace(b, c) * M(a,d)``.
    """
    if a[0] > n or b[0] > n:
        raise ConfigError("edge vertices exceed matrix dimension")
    q = np.zeros((n, n), dtype=np.int64)
    ap, am = a[0] - 1, a[1] - 1
    bp, bm = b[0] - 1, b[1] - 1
    q[ap, bp] = -1
    q[am, bm] = -1
    q[ap, bm] = 1
    q[am, bp] = 1
    return q


def laplacian_from_edge_weights(weights: dict, n: int) -> np.ndarray:
    """Negated sum ``-sum_a xi_a * edge_pair_matrix(a, a)``: the
    Laplacian of the weighted graph, in exact integer/float arithmetic."""
    dtype = np.int64 if all(isinstance(v, (int, np.integer))
                            for v in weights.values()) else float
    out = np.zeros((n, n), dtype=dtype)
    for edge, xi in weights.items():
        out -= xi * edge_pair_matrix(edge, edge, n)
    return out


def enumerate_circuits(n: int, r: int) -> Iterator[tuple]:
    """All circuits of length r on the edges of n vertices, in
    lexicographic order of their edge-index tuples.

    A circuit is an edge sequence ``(a_1, ..., a_r)`` with consecutive
    edges (cyclically) sharing a vertex.  Enumeration is capped at
    ``n <= 6, r <= 6``.
    """
    if n > MAX_N or r > MAX_R:
        raise ConfigError(f"enumeration capped at n <= {MAX_N}, r <= {MAX_R}")
    if r < 1:
        raise ConfigError("circuit length must be positive")
    edges = edges_of(n)
    adjacency = {a: [b for b in edges if edges_adjacent(a, b)] for a in edges}

    def extend(prefix):
        if len(prefix) == r:
            if edges_adjacent(prefix[-1], prefix[0]):
                yield tuple(prefix)
            return
        for nxt in adjacency[prefix[-1]]:
            prefix.append(nxt)
            yield from extend(prefix)
            prefix.pop()

    for first in edges:
        yield from extend([first])


def is_vertex_matched(circuit) -> bool:
    """Every edge value in the circuit appears at least twice."""
    counts = Counter(circuit)
    return all(c >= 2 for c in counts.values())


def has_order3_match(circuit) -> bool:
    """Some edge value appears at least three times."""
    counts = Counter(circuit)
    return any(c >= 3 for c in counts.values())


def expected_trace_moment(n: int, r: int, profile: dict):
    """E tr(L^r) for i.i.d. entries with the given raw-moment profile.

    ``profile`` maps power m (1..r) to E[xi^m]; independence across
    edges factorizes each circuit's expectation over its distinct
    edges.  Exact when the profile values are exact.
    """
    for m in range(1, r + 1):
        if m not in profile:
            raise ConfigError(f"moment profile missing power {m}")
    total = 0
    for circuit in enumerate_circuits(n, r):
        t_prod = 1
        for j in range(r):
            t_prod *= edge_trace(circuit[j], circuit[(j + 1) % r])
        factor = 1
        for mult in Counter(circuit).values():
            factor = factor * profile[mult]
            if factor == 0:
                break
        if factor == 0:
            continue
        total = total + t_prod * factor
    return total if r % 2 == 0 else -total


def circuit_summary(n: int, r: int, profile: dict) -> dict:
    """Counts and the expected trace moment in one pass (CLI oracle)."""
    circuits = 0
    matched = 0
    order3 = 0
    for circuit in enumerate_circuits(n, r):
        circuits += 1
        if is_vertex_matched(circuit):
            matched += 1
        if has_order3_match(circuit):
            order3 += 1
    return {
        "n": n,
        "r": r,
        "circuit_count": circuits,
        "vertex_matched_count": matched,
        "order3_match_count": order3,
        "expected_trace_moment": expected_trace_moment(n, r, profile),
    }
