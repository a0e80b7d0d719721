"""File formats: graph/model/moments JSON, sample CSV, DOT export.

Floats are written with Python's shortest round-trip representation, so a
read-write cycle reproduces the file byte for byte.  All writes are atomic
(temp file + rename).
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import DataError
from .graph import Graph
from .kacward import IsingModel
from .learn import LearnTrace, MomentSet


def write_atomic(path: str | Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def graph_to_json(g: Graph) -> str:
    return json.dumps({"n": g.n, "edges": [list(e) for e in g.edges]}, indent=2) + "\n"


def graph_from_json(text: str) -> Graph:
    try:
        obj = json.loads(text)
        return Graph.make(int(obj["n"]), obj["edges"])
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise DataError(f"malformed graph JSON: {exc}") from exc


def model_to_json(model: IsingModel) -> str:
    obj = {
        "n": model.graph.n,
        "edges": [
            [i, j, float(t)] for (i, j), t in zip(model.graph.edges, model.theta_edges)
        ],
    }
    if not model.is_zero_field:
        obj["fields"] = [float(t) for t in model.theta_nodes]
    return json.dumps(obj, indent=2) + "\n"


def model_from_json(text: str) -> IsingModel:
    try:
        obj = json.loads(text)
        n = int(obj["n"])
        edges = [(int(i), int(j)) for i, j, _ in obj["edges"]]
        g = Graph.make(n, edges)
        theta = np.zeros(len(g.edges))
        for i, j, t in obj["edges"]:
            e = (int(i), int(j)) if i < j else (int(j), int(i))
            theta[g.edge_index[e]] = float(t)
        fields = obj.get("fields")
        fields = np.array(fields, dtype=float) if fields is not None else None
        return IsingModel(g, theta, fields)
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise DataError(f"malformed model JSON: {exc}") from exc


def moments_to_json(ms: MomentSet) -> str:
    obj = {
        "n": ms.n,
        "mu_nodes": [float(v) for v in ms.mu_nodes],
        "mu_pairs": [[float(v) for v in row] for row in ms.mu_pairs],
    }
    return json.dumps(obj, indent=2) + "\n"


def moments_from_json(text: str) -> MomentSet:
    try:
        obj = json.loads(text)
        return MomentSet(
            int(obj["n"]),
            np.array(obj["mu_nodes"], dtype=float),
            np.array(obj["mu_pairs"], dtype=float),
        )
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise DataError(f"malformed moments JSON: {exc}") from exc


def moments_from_csv(text: str) -> MomentSet:
    """CSV form: the n x n pairwise matrix only; first moments default to 0."""
    try:
        rows = [
            [float(v) for v in line.split(",")]
            for line in text.strip().splitlines()
            if line.strip()
        ]
        mp = np.array(rows, dtype=float)
        if mp.ndim != 2 or mp.shape[0] != mp.shape[1]:
            raise ValueError("moment CSV must be a square matrix")
        return MomentSet(mp.shape[0], np.zeros(mp.shape[0]), mp)
    except ValueError as exc:
        raise DataError(f"malformed moments CSV: {exc}") from exc


def load_moments(path: str | Path) -> MomentSet:
    text = Path(path).read_text()
    if str(path).endswith(".csv"):
        return moments_from_csv(text)
    return moments_from_json(text)


def samples_to_csv(samples: np.ndarray) -> str:
    return "\n".join(",".join(str(int(v)) for v in row) for row in samples) + "\n"


def samples_from_csv(text: str) -> np.ndarray:
    """Entries must be +-1; {0, 1} data is accepted with 0 mapped to -1."""
    rows = []
    for line in text.strip().splitlines():
        if line.strip():
            rows.append([int(float(v)) for v in line.split(",")])
    arr = np.array(rows, dtype=np.int8)
    if arr.size == 0:
        raise DataError("empty sample CSV")
    values = set(np.unique(arr).tolist())
    if values <= {0, 1}:
        arr = (2 * arr - 1).astype(np.int8)
    elif not values <= {-1, 1}:
        raise DataError(f"sample entries must be in {{-1, +1}} or {{0, 1}}, got {sorted(values)}")
    return arr


def trace_to_json(trace: LearnTrace) -> str:
    obj = {
        "initial_log_likelihood": trace.initial_log_likelihood,
        "stop_reason": trace.stop_reason,
        "steps": [
            {
                "edge": list(s.edge),
                "score": s.score,
                "log_likelihood": s.log_likelihood,
                "candidate_count": s.candidate_count,
            }
            for s in trace.steps
        ],
    }
    return json.dumps(obj, indent=2) + "\n"


def model_to_dot(model: IsingModel, names: list[str] | None = None) -> str:
    """DOT graph with |theta| as edge intensity and sign as color.

    Positive couplings are blue, negative red; pen width scales with the
    coupling magnitude relative to the largest one.
    """
    g = model.graph
    names = names or [str(v) for v in range(g.n)]
    if len(names) != g.n:
        raise DataError("need one name per vertex")
    tmax = float(np.max(np.abs(model.theta_edges), initial=0.0)) or 1.0
    lines = ["graph ising {"]
    for v in range(g.n):
        lines.append(f'  {v} [label="{names[v]}"];')
    for (i, j), t in zip(g.edges, model.theta_edges):
        color = "blue" if t >= 0 else "red"
        width = 0.5 + 2.5 * abs(float(t)) / tmax
        lines.append(f'  {i} -- {j} [color={color}, penwidth={width:.3f}, weight=1];')
    lines.append("}")
    return "\n".join(lines) + "\n"
