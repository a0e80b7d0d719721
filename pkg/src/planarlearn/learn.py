"""Greedy planarity-preserving structure learning.

Grows a planar graph one edge at a time, scoring every addable pair by the
KL divergence between its target pairwise marginal and the current model's
pairwise marginal (a lower bound on the realized likelihood gain), then
refitting couplings by Newton maximum likelihood.  Non-zero-mean variables
are handled through the auxiliary-node construction: a zero-field model on
an extended graph whose star couplings play the role of fields.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from .errors import LearnError, NotPlanarError
from .fit import FitConfig, fit_ml
from .graph import Edge, Graph, straight_line_embed
from .kacward import IsingModel, edge_marginal, moments

_LOG2 = math.log(2.0)

MODES = ("zero-field-planar", "outer-planar", "partial-outer-planar")


@dataclass(frozen=True)
class MomentSet:
    """First moments and the full symmetric pairwise-moment matrix."""

    n: int
    mu_nodes: np.ndarray
    mu_pairs: np.ndarray

    def __post_init__(self):
        mn = np.asarray(self.mu_nodes, dtype=float)
        mp = np.asarray(self.mu_pairs, dtype=float)
        if mn.shape != (self.n,) or mp.shape != (self.n, self.n):
            raise ValueError("moment arrays have wrong shape")
        object.__setattr__(self, "mu_nodes", mn)
        object.__setattr__(self, "mu_pairs", mp)

    def validate(self) -> None:
        if np.max(np.abs(self.mu_pairs - self.mu_pairs.T)) > 0:
            raise ValueError("pairwise moments must be symmetric")
        if np.any(np.diag(self.mu_pairs) != 1.0):
            raise ValueError("pairwise moment diagonal must be exactly 1")
        if np.max(np.abs(self.mu_nodes)) > 1 or np.max(np.abs(self.mu_pairs)) > 1:
            raise ValueError("moments must lie in [-1, 1]")
        for i in range(self.n):
            for j in range(i + 1, self.n):
                edge_marginal(self.mu_nodes[i], self.mu_nodes[j], self.mu_pairs[i, j])

    def cleaned(self, clamp: float = 1e-6) -> "MomentSet":
        """Symmetrized copy with off-diagonal entries clamped away from +-1.

        Finite-sample moment matrices can violate the invariants at
        round-off scale; this restores them before learning.
        """
        mp = 0.5 * (self.mu_pairs + self.mu_pairs.T)
        mp = np.clip(mp, -1.0 + clamp, 1.0 - clamp)
        np.fill_diagonal(mp, 1.0)
        mn = np.clip(self.mu_nodes, -1.0 + clamp, 1.0 - clamp)
        return MomentSet(self.n, mn, mp)


@dataclass(frozen=True)
class LearnConfig:
    """Structure-learning options.

    ``max_edges`` caps the number of edges *selected* by the greedy loop
    (the outer-planar star initialization does not count); ``None`` runs to
    a maximal planar graph.  ``gain_threshold`` is compared against the
    pairwise-KL lower bound of the best candidate; 0 disables the stopping
    rule (every addition improves the likelihood).
    """

    mode: str = "zero-field-planar"
    gain_threshold: float = 0.0
    max_edges: int | None = None
    fit: FitConfig = field(default_factory=FitConfig)
    moment_clamp: float = 1e-6

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.gain_threshold < 0:
            raise ValueError("gain_threshold must be nonnegative")
        if self.moment_clamp <= 0:
            raise ValueError("moment_clamp must be positive")


@dataclass(frozen=True)
class LearnStep:
    edge: Edge
    score: float
    log_likelihood: float  # mu.theta - Phi(theta) after the refit
    candidate_count: int


@dataclass(frozen=True)
class LearnTrace:
    initial_log_likelihood: float
    steps: tuple[LearnStep, ...]
    stop_reason: str


def pairwise_kl(
    target: tuple[float, float, float], model: tuple[float, float, float]
) -> float:
    """KL divergence between the 2x2 marginals of two moment triples.

    Returns ``inf`` when the model marginal vanishes where the target does
    not (support violation; such an edge is maximally favored).
    """
    p = edge_marginal(*target)
    q = edge_marginal(*model)
    total = 0.0
    for a in range(2):
        for b in range(2):
            if p[a, b] <= 0.0:
                continue
            if q[a, b] <= 0.0:
                return math.inf
            total += p[a, b] * math.log(p[a, b] / q[a, b])
    return max(total, 0.0)


def _face_walks(g: Graph) -> list[list[int]]:
    """Vertex walks of the faces of some planar embedding of ``g``."""
    ok, emb = nx.check_planarity(g.to_networkx(), counterexample=False)
    if not ok:
        raise NotPlanarError("face enumeration requires a planar graph")
    half_edges = {(u, v) for u, v in emb.edges()}
    walks = []
    while half_edges:
        u, v = next(iter(half_edges))
        used: set[tuple[int, int]] = set()
        walk = emb.traverse_face(u, v, mark_half_edges=used)
        half_edges -= used
        walks.append(walk)
    return walks


def _pack_chords(
    walks: list[list[int]], remaining: list[Edge]
) -> tuple[list[Edge], list[Edge]]:
    """Greedily insert non-crossing chords from ``remaining`` into faces.

    A pair is accepted when both endpoints lie on a common face walk; the
    walk is split in place so later chords cannot cross earlier ones.
    Returns ``(accepted, leftover)`` preserving input order.
    """
    member: list[set[int]] = [set(w) for w in walks]
    accepted: list[Edge] = []
    leftover: list[Edge] = []
    for u, v in remaining:
        hit = None
        for fid, verts in enumerate(member):
            if u in verts and v in verts:
                hit = fid
                break
        if hit is None:
            leftover.append((u, v))
            continue
        walk = walks[hit]
        pu, qv = walk.index(u), walk.index(v)
        p, q = min(pu, qv), max(pu, qv)
        first = walk[p : q + 1]
        second = walk[q:] + walk[: p + 1]
        walks[hit] = first
        member[hit] = set(first)
        walks.append(second)
        member.append(set(second))
        accepted.append((u, v))
    return accepted, leftover


def candidate_moments(
    g: Graph, theta: np.ndarray, delta: list[Edge]
) -> dict[Edge, float]:
    """Model correlations ``E_theta[x_i x_j]`` for every candidate pair.

    Pairs spanning distinct components are independent (correlation 0).
    The rest are covered by batches of zero-coupling edges packed into a
    planar supergraph of ``g``, one inference run per batch; zero edges do
    not perturb the distribution, so batching is exact.
    """
    labels = g.component_labels()
    out: dict[Edge, float] = {}
    remaining = []
    for i, j in sorted(delta):
        if labels[i] != labels[j]:
            out[(i, j)] = 0.0
        else:
            remaining.append((i, j))
    while remaining:
        # Seed each batch with the first pair (addable by precondition),
        # then pack as many further pairs as fit into the faces of one
        # embedding of the seeded graph.
        seed = remaining[0]
        aug = g.add_edge(*seed)
        batch, remaining = _pack_chords(_face_walks(aug), remaining[1:])
        for e in batch:
            aug = aug.add_edge(*e)
        batch.append(seed)
        theta_aug = np.zeros(len(aug.edges))
        for k, e in enumerate(g.edges):
            theta_aug[aug.edge_index[e]] = theta[k]
        mu = moments(IsingModel(aug, theta_aug), straight_line_embed(aug))
        for e in batch:
            out[e] = float(mu[aug.edge_index[e]])
    return out


def _edge_targets(g: Graph, mu_pairs: np.ndarray) -> np.ndarray:
    return np.array([mu_pairs[i, j] for i, j in g.edges])


def _scan_candidates(g: Graph, rejected: set[Edge]) -> list[Edge]:
    """Non-edges whose addition keeps ``g`` planar, skipping known rejects.

    Rejections are permanent across greedy iterations: the graph only
    grows, and a supergraph of a non-planar graph stays non-planar.
    """
    cap = 3 * g.n - 6 if g.n >= 3 else 1
    base = g.to_networkx()
    out = []
    for e in g.non_edges():
        if e in rejected:
            continue
        if len(g.edges) + 1 > cap:
            rejected.add(e)
            continue
        base.add_edge(*e)
        ok, _ = nx.check_planarity(base, counterexample=False)
        base.remove_edge(*e)
        if ok:
            out.append(e)
        else:
            rejected.add(e)
    return out


def _greedy_loop(
    mu_pairs: np.ndarray,
    g: Graph,
    theta_init: np.ndarray,
    cfg: LearnConfig,
    max_added: int | None,
    step_callback=None,
) -> tuple[IsingModel, LearnTrace]:
    """Greedy edge selection over zero-field pairwise targets.

    ``g``/``theta_init`` give the initial graph, which is fitted before the
    first selection step.  ``step_callback(model, step)``, when given, is
    invoked after every accepted edge (used by diagnostics and tests).
    """
    n = g.n
    if max_added is None:
        max_added = max(3 * n - 6, 0)
    report = fit_ml(g, _edge_targets(g, mu_pairs), cfg.fit, init_theta=theta_init)
    if not report.converged:
        raise LearnError(
            f"initial fit did not converge: {report.message}",
            LearnTrace(-math.inf, (), "initial fit failed"),
        )
    theta = report.theta
    initial_ll = report.log_likelihood - n * _LOG2
    steps: list[LearnStep] = []
    rejected: set[Edge] = set()
    stop = "edge budget reached"
    while len(steps) < max_added:
        delta = _scan_candidates(g, rejected)
        if not delta:
            stop = "no planarity-preserving candidates"
            break
        model_mu = candidate_moments(g, theta, delta)
        best_edge, best_score = None, -math.inf
        for e in delta:  # lexicographic order; first strict max wins ties
            score = pairwise_kl(
                (0.0, 0.0, mu_pairs[e[0], e[1]]), (0.0, 0.0, model_mu[e])
            )
            if score > best_score:
                best_edge, best_score = e, score
        if cfg.gain_threshold > 0 and not best_score > cfg.gain_threshold:
            stop = "no candidate exceeds the gain threshold"
            break
        g = g.add_edge(*best_edge)
        warm = np.zeros(len(g.edges))
        for k, e in enumerate(g.edges):
            if e != best_edge:
                warm[k] = theta[g.edge_index[e] - (1 if e > best_edge else 0)]
        report = fit_ml(g, _edge_targets(g, mu_pairs), cfg.fit, init_theta=warm)
        if not report.converged:
            raise LearnError(
                f"refit after adding edge {best_edge} failed: {report.message}",
                LearnTrace(initial_ll, tuple(steps), "fit failed"),
            )
        theta = report.theta
        step = LearnStep(
            best_edge, best_score, report.log_likelihood - n * _LOG2, len(delta)
        )
        steps.append(step)
        if step_callback is not None:
            step_callback(IsingModel(g, theta), step)
    return IsingModel(g, theta), LearnTrace(initial_ll, tuple(steps), stop)


def greedy_select(
    ms: MomentSet, cfg: LearnConfig | None = None, step_callback=None
) -> tuple[IsingModel, LearnTrace]:
    """Greedy planar structure selection in the configured mode.

    Zero-field mode ignores first moments; the outer-planar modes delegate
    to :func:`outer_planar_learn`.
    """
    cfg = cfg or LearnConfig()
    if cfg.mode != "zero-field-planar":
        return outer_planar_learn(ms, cfg, step_callback)
    ms = ms.cleaned(cfg.moment_clamp)
    g = Graph(ms.n, ())
    return _greedy_loop(
        ms.mu_pairs, g, np.zeros(0), cfg, cfg.max_edges, step_callback
    )


def extend_moments(ms: MomentSet) -> MomentSet:
    """Zero-mean moment set on ``n + 1`` variables (auxiliary-node trick).

    First moments become correlations with the auxiliary variable ``n``.
    """
    n = ms.n
    mp = np.eye(n + 1)
    mp[:n, :n] = ms.mu_pairs
    mp[:n, n] = mp[n, :n] = ms.mu_nodes
    return MomentSet(n + 1, np.zeros(n + 1), mp)


def extend_model(model: IsingModel) -> IsingModel:
    """Equivalent zero-field model with an auxiliary vertex ``n``.

    Fields become couplings on the star edges ``{i, n}``; the extended
    partition function is exactly twice the original.
    """
    n = model.graph.n
    edges = list(model.graph.edges) + [(i, n) for i in range(n)]
    g = Graph.make(n + 1, edges)
    theta = np.zeros(len(g.edges))
    for k, e in enumerate(model.graph.edges):
        theta[g.edge_index[e]] = model.theta_edges[k]
    for i in range(n):
        theta[g.edge_index[(i, n)]] = model.theta_nodes[i]
    return IsingModel(g, theta)


def contract_model(extended: IsingModel, aux: int) -> IsingModel:
    """Fold the auxiliary vertex of a zero-field model back into fields.

    The result's distribution is the extended model's conditional given
    ``x_aux = +1``.
    """
    if not extended.is_zero_field:
        raise ValueError("contract_model expects a zero-field extended model")
    n = extended.graph.n - 1
    relabel = lambda v: v if v < aux else v - 1  # noqa: E731
    fields = np.zeros(n)
    edges, thetas = [], []
    for k, (i, j) in enumerate(extended.graph.edges):
        if j == aux:
            fields[relabel(i)] = extended.theta_edges[k]
        elif i == aux:
            fields[relabel(j)] = extended.theta_edges[k]
        else:
            edges.append((relabel(i), relabel(j)))
            thetas.append(extended.theta_edges[k])
    g = Graph.make(n, edges)
    theta = np.zeros(len(g.edges))
    for e, t in zip(edges, thetas):
        theta[g.edge_index[e]] = t
    return IsingModel(g, theta, fields)


def outer_planar_learn(
    ms: MomentSet, cfg: LearnConfig | None = None, step_callback=None
) -> tuple[IsingModel, LearnTrace]:
    """Learn a (possibly non-zero-mean) outer-planar Ising model.

    Extends the moments with an auxiliary variable, runs the greedy loop
    from the star graph (fitted first, so all first moments are matched
    before any selection), and contracts the result back.  The
    ``partial-outer-planar`` mode skips the star initialization.
    """
    cfg = cfg or LearnConfig(mode="outer-planar")
    ms = ms.cleaned(cfg.moment_clamp)
    ext = extend_moments(ms)
    n, aux = ms.n, ms.n
    if cfg.mode == "partial-outer-planar":
        g0 = Graph(n + 1, ())
        default_budget = max(3 * (n + 1) - 6, 0)
    else:
        g0 = Graph.make(n + 1, [(i, aux) for i in range(n)])
        default_budget = max(3 * (n + 1) - 6 - n, 0)
    budget = default_budget if cfg.max_edges is None else cfg.max_edges
    ext_model, trace = _greedy_loop(
        ext.mu_pairs, g0, np.zeros(len(g0.edges)), cfg, budget, step_callback
    )
    return contract_model(ext_model, aux), trace
