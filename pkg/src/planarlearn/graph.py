"""Graph representation, planarity testing and straight-line planar embedding.

The embedding pipeline produces integer grid coordinates via a shift-style
drawing of a triangulated supergraph (networkx), then discards the helper
edges.  Integer coordinates keep turning-angle arithmetic exact for the
degenerate cases (collinear continuation, reversal).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator

import networkx as nx
import numpy as np

from .errors import NotPlanarError

Edge = tuple[int, int]


def _canon(i: int, j: int) -> Edge:
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices ``0 .. n-1``.

    ``edges`` is a sorted tuple of pairs ``(i, j)`` with ``i < j``.  Use
    :meth:`make` to build one from an arbitrary edge iterable.
    """

    n: int
    edges: tuple[Edge, ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"vertex count must be >= 1, got {self.n}")
        seen = set()
        for i, j in self.edges:
            if i == j:
                raise ValueError(f"self-loop at vertex {i}")
            if not (0 <= i < j < self.n):
                raise ValueError(f"edge ({i}, {j}) out of range for n={self.n}")
            if (i, j) in seen:
                raise ValueError(f"duplicate edge ({i}, {j})")
            seen.add((i, j))

    @classmethod
    def make(cls, n: int, edges: Iterable[Iterable[int]]) -> "Graph":
        canon = sorted({_canon(int(i), int(j)) for i, j in edges})
        return cls(n, tuple(canon))

    @cached_property
    def edge_set(self) -> frozenset[Edge]:
        return frozenset(self.edges)

    @cached_property
    def edge_index(self) -> dict[Edge, int]:
        """Position of each canonical edge in ``self.edges``."""
        return {e: k for k, e in enumerate(self.edges)}

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        nbrs: list[list[int]] = [[] for _ in range(self.n)]
        for i, j in self.edges:
            nbrs[i].append(j)
            nbrs[j].append(i)
        return tuple(tuple(sorted(a)) for a in nbrs)

    def has_edge(self, i: int, j: int) -> bool:
        return _canon(i, j) in self.edge_set

    def add_edge(self, i: int, j: int) -> "Graph":
        e = _canon(i, j)
        if e in self.edge_set:
            raise ValueError(f"edge {e} already present")
        return Graph(self.n, tuple(sorted(self.edges + (e,))))

    def non_edges(self) -> Iterator[Edge]:
        for i in range(self.n):
            for j in range(i + 1, self.n):
                if (i, j) not in self.edge_set:
                    yield (i, j)

    def components(self) -> list[list[int]]:
        """Connected components, each sorted, ordered by smallest vertex."""
        seen = [False] * self.n
        comps = []
        for s in range(self.n):
            if seen[s]:
                continue
            stack, comp = [s], []
            seen[s] = True
            while stack:
                v = stack.pop()
                comp.append(v)
                for w in self.adjacency[v]:
                    if not seen[w]:
                        seen[w] = True
                        stack.append(w)
            comps.append(sorted(comp))
        return comps

    def component_labels(self) -> np.ndarray:
        labels = np.empty(self.n, dtype=np.int64)
        for c, comp in enumerate(self.components()):
            labels[list(comp)] = c
        return labels

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges)
        return g


def is_planar(g: Graph) -> bool:
    """Whether ``g`` admits a plane embedding (left-right criterion)."""
    if g.n >= 3 and len(g.edges) > 3 * g.n - 6:
        return False
    ok, _ = nx.check_planarity(g.to_networkx(), counterexample=False)
    return ok


def planar_candidates(g: Graph) -> list[Edge]:
    """All non-edges whose addition keeps ``g`` planar, in lexicographic order.

    Raises :class:`NotPlanarError` if ``g`` itself is not planar.
    """
    if not is_planar(g):
        raise NotPlanarError("candidate enumeration requires a planar graph")
    base = g.to_networkx()
    out = []
    for i, j in g.non_edges():
        base.add_edge(i, j)
        if len(base.edges) <= max(3 * g.n - 6, 0):
            ok, _ = nx.check_planarity(base, counterexample=False)
        else:
            ok = False
        base.remove_edge(i, j)
        if ok:
            out.append((i, j))
    return out


@dataclass(frozen=True)
class PlanarEmbedding:
    """Straight-line plane drawing of a planar graph.

    ``coords`` has shape ``(n, 2)``; ``rotation[v]`` lists the neighbours of
    ``v`` in counterclockwise angular order around ``v``.
    """

    graph: Graph
    coords: np.ndarray
    rotation: tuple[tuple[int, ...], ...]

    @classmethod
    def from_coords(cls, graph: Graph, coords: np.ndarray) -> "PlanarEmbedding":
        coords = np.asarray(coords, dtype=float)
        if coords.shape != (graph.n, 2):
            raise ValueError(f"coords must have shape ({graph.n}, 2)")
        rotation = []
        for v in range(graph.n):
            nbrs = graph.adjacency[v]
            angles = [
                math.atan2(coords[w, 1] - coords[v, 1], coords[w, 0] - coords[v, 0])
                for w in nbrs
            ]
            rotation.append(tuple(w for _, w in sorted(zip(angles, nbrs))))
        return cls(graph, coords, tuple(rotation))


def straight_line_embed(g: Graph) -> PlanarEmbedding:
    """Crossing-free straight-line drawing of a planar graph.

    Connected components are drawn independently and stacked in disjoint
    horizontal bands; isolated vertices go into a band of their own.
    """
    if not is_planar(g):
        raise NotPlanarError("cannot embed a non-planar graph")
    coords = np.zeros((g.n, 2), dtype=float)
    y_offset = 0.0
    isolated = []
    for comp in g.components():
        if len(comp) == 1:
            isolated.append(comp[0])
            continue
        if len(comp) == 2:
            coords[comp[0]] = (0.0, y_offset)
            coords[comp[1]] = (1.0, y_offset)
            y_offset += 2.0
            continue
        local = {v: k for k, v in enumerate(comp)}
        sub = nx.Graph()
        sub.add_nodes_from(range(len(comp)))
        sub.add_edges_from(
            (local[i], local[j]) for i, j in g.edges if i in local and j in local
        )
        _, emb = nx.check_planarity(sub, counterexample=False)
        pos = nx.combinatorial_embedding_to_pos(emb, fully_triangulate=False)
        xs = [p[0] for p in pos.values()]
        ys = [p[1] for p in pos.values()]
        for v in comp:
            x, y = pos[local[v]]
            coords[v] = (float(x - min(xs)), float(y - min(ys) + y_offset))
        y_offset += float(max(ys) - min(ys)) + 2.0
    for k, v in enumerate(isolated):
        coords[v] = (float(k), y_offset)
    return PlanarEmbedding.from_coords(g, coords)


def turning_angle(emb: PlanarEmbedding, i: int, j: int, l: int) -> float:
    """Signed angle rotating direction (i->j) onto direction (j->l).

    Counterclockwise positive, in ``(-pi, pi]``; immediate reversal
    (``l == i``) maps to ``+pi``.
    """
    if not emb.graph.has_edge(i, j) or not emb.graph.has_edge(j, l):
        raise ValueError(f"({i},{j}) and ({j},{l}) must both be edges")
    a = emb.coords[j] - emb.coords[i]
    b = emb.coords[l] - emb.coords[j]
    return math.atan2(a[0] * b[1] - a[1] * b[0], a[0] * b[0] + a[1] * b[1])


def faces(emb: PlanarEmbedding) -> list[list[tuple[int, int]]]:
    """Directed-edge walks bounding each face of the embedding.

    Each face is returned as the list of directed edges traversed; every
    directed edge appears in exactly one face.
    """
    g = emb.graph
    succ_in_rotation = []
    for v in range(g.n):
        rot = emb.rotation[v]
        succ_in_rotation.append({u: rot[(k + 1) % len(rot)] for k, u in enumerate(rot)})
    remaining = set()
    for i, j in g.edges:
        remaining.add((i, j))
        remaining.add((j, i))
    out = []
    while remaining:
        start = min(remaining)
        walk = []
        cur = start
        while True:
            walk.append(cur)
            remaining.discard(cur)
            u, v = cur
            cur = (v, succ_in_rotation[v][u])
            if cur == start:
                break
        out.append(walk)
    return out


@dataclass(frozen=True)
class DirectedEdgeIndex:
    """Indexing of the ``2|E|`` directed edges of a graph.

    Edge ``k = (i, j)`` (with ``i < j``) maps to directed indices ``2k`` for
    ``(i, j)`` and ``2k + 1`` for ``(j, i)``; ``reversal`` is the involutive
    permutation exchanging the two.
    """

    edges: tuple[Edge, ...]
    index: dict[tuple[int, int], int]
    reversal: np.ndarray

    @classmethod
    def from_graph(cls, g: Graph) -> "DirectedEdgeIndex":
        index: dict[tuple[int, int], int] = {}
        for k, (i, j) in enumerate(g.edges):
            index[(i, j)] = 2 * k
            index[(j, i)] = 2 * k + 1
        m = len(g.edges)
        reversal = np.arange(2 * m)
        reversal[0::2] += 1
        reversal[1::2] -= 1
        return cls(g.edges, index, reversal)

    @property
    def size(self) -> int:
        return 2 * len(self.edges)
