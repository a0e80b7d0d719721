"""Shared test helpers: random planar graphs and a geometric crossing oracle."""

from __future__ import annotations

import numpy as np

from planarlearn import Graph, PlanarEmbedding, is_planar


def random_connected_planar_graph(
    n: int, rng: np.random.Generator, extra_edge_trials: int | None = None
) -> Graph:
    """Random spanning tree plus random planarity-preserving extra edges."""
    edges = set()
    order = rng.permutation(n)
    for k in range(1, n):
        parent = order[rng.integers(0, k)]
        edges.add((min(order[k], parent), max(order[k], parent)))
    g = Graph.make(n, edges)
    trials = extra_edge_trials if extra_edge_trials is not None else 2 * n
    for _ in range(trials):
        i, j = rng.integers(0, n, size=2)
        if i == j or g.has_edge(i, j):
            continue
        cand = g.add_edge(i, j)
        if is_planar(cand):
            g = cand
    return g


def _orient(a, b, c) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _on_segment(a, b, p) -> bool:
    """p collinear with a-b: is p within the closed segment?"""
    return (
        min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
        and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])
    )


def _segments_conflict(p1, p2, q1, q2) -> bool:
    """Proper crossing or collinear overlap of closed segments (disjoint endpoints)."""
    d1 = _orient(q1, q2, p1)
    d2 = _orient(q1, q2, p2)
    d3 = _orient(p1, p2, q1)
    d4 = _orient(p1, p2, q2)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 != 0 and d2 != 0 and d3 != 0 and d4 != 0:
        return True
    for a, b, p in ((q1, q2, p1), (q1, q2, p2), (p1, p2, q1), (p1, p2, q2)):
        if _orient(a, b, p) == 0 and _on_segment(a, b, p):
            return True
    return False


def assert_valid_drawing(emb: PlanarEmbedding) -> None:
    """Brute-force O(|E|^2) validity check of a straight-line drawing."""
    g = emb.graph
    pts = emb.coords
    for v in range(g.n):
        for w in range(v + 1, g.n):
            assert not np.array_equal(pts[v], pts[w]), f"vertices {v},{w} coincide"
    edges = g.edges
    for a in range(len(edges)):
        i, j = edges[a]
        for b in range(a + 1, len(edges)):
            k, l = edges[b]
            if len({i, j, k, l}) < 4:
                # shared endpoint: only forbid collinear overlap
                shared = ({i, j} & {k, l}).pop()
                p = pts[[e for e in (i, j) if e != shared][0]]
                q = pts[[e for e in (k, l) if e != shared][0]]
                s = pts[shared]
                if _orient(s, p, q) == 0:
                    # q on ray s->p beyond s means overlap
                    dot = (p - s) @ (q - s)
                    assert dot <= 0, f"edges {edges[a]} and {edges[b]} overlap"
                continue
            assert not _segments_conflict(pts[i], pts[j], pts[k], pts[l]), (
                f"edges {edges[a]} and {edges[b]} intersect"
            )
    for v in range(g.n):
        for i, j in edges:
            if v in (i, j):
                continue
            if _orient(pts[i], pts[j], pts[v]) == 0 and _on_segment(
                pts[i], pts[j], pts[v]
            ):
                assert False, f"vertex {v} lies on edge ({i},{j})"
