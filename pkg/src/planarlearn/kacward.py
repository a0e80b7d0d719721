"""Exact inference for zero-field planar Ising models.

The log-partition function is evaluated through the determinant of
``I - W`` where ``W = A D`` is the phase-adjacency matrix over directed
edges, ``A`` carrying half turning-angle phases and ``D`` the per-edge
``tanh`` weights.  Moments and the Hessian of the log-partition function
come from the resolvent ``S = (I - W)^{-1} A``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InfeasibleMarginalError,
    NonZeroFieldError,
    NumericalConsistencyError,
)
from .graph import DirectedEdgeIndex, Graph, PlanarEmbedding, straight_line_embed, turning_angle

# tanh saturates to 1.0 in double precision near 19; the cap leaves headroom
# while turning silent w = +-1 singularities into a clear construction error.
THETA_CAP = 30.0

IMAG_TOL = 1e-8


@dataclass(frozen=True)
class IsingModel:
    """Ising model: graph, per-edge couplings and optional per-vertex fields.

    ``theta_edges[k]`` couples the endpoints of ``graph.edges[k]``;
    ``theta_nodes`` is all-zero for a zero-field model.
    """

    graph: Graph
    theta_edges: np.ndarray
    theta_nodes: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        te = np.asarray(self.theta_edges, dtype=float)
        if te.shape != (len(self.graph.edges),):
            raise ValueError(
                f"expected {len(self.graph.edges)} couplings, got shape {te.shape}"
            )
        tn = self.theta_nodes
        tn = np.zeros(self.graph.n) if tn is None else np.asarray(tn, dtype=float)
        if tn.shape != (self.graph.n,):
            raise ValueError(f"expected {self.graph.n} fields, got shape {tn.shape}")
        for arr, what in ((te, "coupling"), (tn, "field")):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"non-finite {what}")
            if np.any(np.abs(arr) > THETA_CAP):
                raise ValueError(f"|{what}| exceeds cap {THETA_CAP}")
        object.__setattr__(self, "theta_edges", te)
        object.__setattr__(self, "theta_nodes", tn)

    @property
    def is_zero_field(self) -> bool:
        return bool(np.all(self.theta_nodes == 0.0))

    def theta_of(self, i: int, j: int) -> float:
        e = (i, j) if i < j else (j, i)
        return float(self.theta_edges[self.graph.edge_index[e]])


@dataclass(frozen=True)
class KacWardSystem:
    """Directed-edge phase system of a zero-field planar model."""

    index: DirectedEdgeIndex
    A: np.ndarray  # complex (2|E|, 2|E|), unit-modulus phases on adjacencies
    D: np.ndarray  # real (2|E|,), tanh of the couplings
    W: np.ndarray  # A @ diag(D)


def build_system(model: IsingModel, emb: PlanarEmbedding) -> KacWardSystem:
    """Assemble the Kac-Ward matrices for a zero-field embedded model."""
    if not model.is_zero_field:
        raise NonZeroFieldError(
            "Kac-Ward inference requires a zero-field model; apply the "
            "auxiliary-node extension (learn.extend_model) first"
        )
    if emb.graph is not model.graph and emb.graph != model.graph:
        raise ValueError("embedding does not match the model's graph")
    g = model.graph
    idx = DirectedEdgeIndex.from_graph(g)
    m2 = idx.size
    A = np.zeros((m2, m2), dtype=complex)
    for j in range(g.n):
        nbrs = g.adjacency[j]
        for i in nbrs:
            d_in = idx.index[(i, j)]
            for l in nbrs:
                if l == i:
                    continue
                phi = turning_angle(emb, i, j, l)
                A[d_in, idx.index[(j, l)]] = np.exp(0.5j * phi)
    D = np.repeat(np.tanh(model.theta_edges), 2)
    return KacWardSystem(idx, A, D, A * D[np.newaxis, :])


def _log_det_i_minus_w(sys: KacWardSystem) -> float:
    """log det(I - W) via complex dense LU; must be real positive."""
    m2 = sys.W.shape[0]
    if m2 == 0:
        return 0.0
    sign, logabs = np.linalg.slogdet(np.eye(m2) - sys.W)
    if not np.isfinite(logabs):
        raise NumericalConsistencyError("singular I - W matrix")
    phase = abs(np.angle(sign))
    if phase > IMAG_TOL:
        raise NumericalConsistencyError(
            f"det(I - W) is not real positive (phase {phase:.3e}); "
            "embedding or matrix construction is broken"
        )
    return float(logabs)


def log_partition(model: IsingModel, emb: PlanarEmbedding | None = None) -> float:
    """Log-partition function of a zero-field planar Ising model."""
    if emb is None:
        emb = straight_line_embed(model.graph)
    sys = build_system(model, emb)
    return float(
        model.graph.n * np.log(2.0)
        + np.sum(np.log(np.cosh(model.theta_edges)))
        + 0.5 * _log_det_i_minus_w(sys)
    )


def _resolvent(sys: KacWardSystem) -> np.ndarray:
    """S = (I - W)^{-1} A (full solve; n stays desk-scale here)."""
    m2 = sys.W.shape[0]
    try:
        return np.linalg.solve(np.eye(m2) - sys.W, sys.A)
    except np.linalg.LinAlgError as exc:
        raise NumericalConsistencyError(f"I - W solve failed: {exc}") from exc


def moments(model: IsingModel, emb: PlanarEmbedding | None = None) -> np.ndarray:
    """Pairwise moments ``E[x_i x_j]`` for every edge, aligned with ``graph.edges``."""
    if emb is None:
        emb = straight_line_embed(model.graph)
    sys = build_system(model, emb)
    if sys.W.shape[0] == 0:
        return np.zeros(0)
    diag = np.diag(_resolvent(sys))
    w = np.tanh(model.theta_edges)
    pair_sum = diag[0::2] + diag[1::2]
    if np.max(np.abs(pair_sum.imag), initial=0.0) > IMAG_TOL:
        raise NumericalConsistencyError("moment computation left an imaginary residue")
    return w - 0.5 * (1.0 - w**2) * pair_sum.real


def hessian(model: IsingModel, emb: PlanarEmbedding | None = None) -> np.ndarray:
    """Hessian of the log-partition function in the edge couplings.

    Symmetric positive definite: it is the covariance matrix of the edge
    statistics ``x_i x_j``.
    """
    if emb is None:
        emb = straight_line_embed(model.graph)
    sys = build_system(model, emb)
    m = len(model.graph.edges)
    if m == 0:
        return np.zeros((0, 0))
    S = _resolvent(sys)
    M = S * S.T
    rev = sys.index.reversal
    B = M + M[rev, :]
    T = B + B[:, rev]
    w = np.tanh(model.theta_edges)
    fac = 1.0 - w**2
    T_rep = T[0::2, 0::2]
    if np.max(np.abs(T_rep.imag)) > IMAG_TOL:
        raise NumericalConsistencyError("Hessian computation left an imaginary residue")
    H = -0.5 * np.outer(fac, fac) * T_rep.real
    mu = moments(model, emb)
    np.fill_diagonal(H, 1.0 - mu**2)
    return H


def edge_marginal(mu_i: float, mu_j: float, mu_ij: float) -> np.ndarray:
    """2x2 marginal table over ``(x_i, x_j)``; index 0 is -1, index 1 is +1."""
    table = np.empty((2, 2))
    for a, xi in enumerate((-1.0, 1.0)):
        for b, xj in enumerate((-1.0, 1.0)):
            table[a, b] = 0.25 * (1.0 + mu_i * xi + mu_j * xj + mu_ij * xi * xj)
    if np.any(table < -1e-12):
        raise InfeasibleMarginalError(
            f"moment triple ({mu_i}, {mu_j}, {mu_ij}) is not realizable"
        )
    return np.clip(table, 0.0, None)
