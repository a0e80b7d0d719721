"""Brute-force enumeration over all spin configurations (small n only).

Ground truth for the partition function, moments, entropy and KL
divergence.  Everything here is exponential in n and guarded by
:data:`MAX_ENUM_VARS`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AbsoluteContinuityError, EnumerationSizeError
from .kacward import IsingModel

MAX_ENUM_VARS = 24

_CHUNK_BITS = 16  # enumerate at most 2^16 states per block


@dataclass(frozen=True)
class StateDistribution:
    """Probabilities over all ``2^n`` spin states.

    State ``s`` has ``x_b = +1`` iff bit ``b`` of ``s`` is set.
    """

    n: int
    p: np.ndarray

    def __post_init__(self):
        if self.n > MAX_ENUM_VARS:
            raise EnumerationSizeError(f"n={self.n} exceeds cap {MAX_ENUM_VARS}")
        if self.p.shape != (2**self.n,):
            raise ValueError("probability vector has wrong length")
        if np.any(self.p < 0) or abs(float(np.sum(self.p)) - 1.0) > 1e-12:
            raise ValueError("probabilities must be nonnegative and sum to 1")


def _check_size(model: IsingModel) -> None:
    if model.graph.n > MAX_ENUM_VARS:
        raise EnumerationSizeError(
            f"n={model.graph.n} exceeds enumeration cap {MAX_ENUM_VARS}"
        )


def _spin_blocks(n: int):
    """Yield (states, offset) blocks of +-1 spin matrices, chunked."""
    total = 2**n
    block = min(total, 2**_CHUNK_BITS)
    bits = np.arange(n, dtype=np.int64)
    for start in range(0, total, block):
        idx = np.arange(start, min(start + block, total), dtype=np.int64)
        states = ((idx[:, None] >> bits[None, :]) & 1).astype(np.float64) * 2.0 - 1.0
        yield states, start


def _energies(model: IsingModel, states: np.ndarray) -> np.ndarray:
    e = states @ model.theta_nodes
    for k, (i, j) in enumerate(model.graph.edges):
        e += model.theta_edges[k] * states[:, i] * states[:, j]
    return e


def enum_log_partition(model: IsingModel) -> float:
    """log of the exact partition function, max-shifted for stability."""
    _check_size(model)
    best = -math.inf
    partials: list[tuple[float, float]] = []  # (block max, sum of shifted exps)
    for states, _ in _spin_blocks(model.graph.n):
        e = _energies(model, states)
        m = float(np.max(e))
        partials.append((m, float(np.sum(np.exp(e - m)))))
        best = max(best, m)
    acc = math.fsum(s * math.exp(m - best) for m, s in partials)
    return best + math.log(acc)


def enum_distribution(model: IsingModel) -> StateDistribution:
    """Exact Gibbs distribution of the model as a dense state table."""
    _check_size(model)
    n = model.graph.n
    logits = np.empty(2**n)
    for states, off in _spin_blocks(n):
        logits[off : off + states.shape[0]] = _energies(model, states)
    logits -= np.max(logits)
    p = np.exp(logits)
    p /= np.sum(p)
    return StateDistribution(n, p)


def enum_moments(model: IsingModel) -> tuple[np.ndarray, np.ndarray]:
    """Exact first moments and the full symmetric pairwise-moment matrix.

    Returns ``(mu_nodes, mu_pairs)`` with ``mu_pairs`` covering all vertex
    pairs (unit diagonal), not only model edges.
    """
    _check_size(model)
    n = model.graph.n
    dist = enum_distribution(model)
    node_parts: list[list[float]] = [[] for _ in range(n)]
    pair_parts: dict[tuple[int, int], list[float]] = {
        (i, j): [] for i in range(n) for j in range(i + 1, n)
    }
    for states, off in _spin_blocks(n):
        p = dist.p[off : off + states.shape[0]]
        first = p @ states
        second = (states * p[:, None]).T @ states
        for i in range(n):
            node_parts[i].append(float(first[i]))
            for j in range(i + 1, n):
                pair_parts[(i, j)].append(float(second[i, j]))
    mu_nodes = np.array([math.fsum(parts) for parts in node_parts])
    mu_pairs = np.eye(n)
    for (i, j), parts in pair_parts.items():
        mu_pairs[i, j] = mu_pairs[j, i] = math.fsum(parts)
    return mu_nodes, mu_pairs


def entropy(dist: StateDistribution) -> float:
    """Shannon entropy in nats."""
    p = dist.p[dist.p > 0]
    return float(-math.fsum((p * np.log(p)).tolist()))


def enum_divergence(p: StateDistribution, q: StateDistribution) -> float:
    """KL divergence D(p, q) in nats."""
    if p.n != q.n:
        raise ValueError("distributions live on different state spaces")
    support = p.p > 0
    if np.any(q.p[support] <= 0):
        raise AbsoluteContinuityError("q vanishes on the support of p")
    ps = p.p[support]
    return float(math.fsum((ps * (np.log(ps) - np.log(q.p[support]))).tolist()))


def pair_marginal(dist: StateDistribution, i: int, j: int) -> np.ndarray:
    """Exact 2x2 marginal of ``(x_i, x_j)``; index 0 is -1, index 1 is +1."""
    table = np.zeros((2, 2))
    for states, off in _spin_blocks(dist.n):
        p = dist.p[off : off + states.shape[0]]
        a = ((states[:, i] + 1) / 2).astype(int)
        b = ((states[:, j] + 1) / 2).astype(int)
        np.add.at(table, (a, b), p)
    return table


def log_likelihood(dist: StateDistribution, model_dist: StateDistribution) -> float:
    """Expected log-likelihood  sum_x p(x) log q(x)."""
    if dist.n != model_dist.n:
        raise ValueError("distributions live on different state spaces")
    support = dist.p > 0
    if np.any(model_dist.p[support] <= 0):
        raise AbsoluteContinuityError("model vanishes on the support of the target")
    ps = dist.p[support]
    return float(math.fsum((ps * np.log(model_dist.p[support])).tolist()))
