"""Command-line interface: learn, fit, sample, eval, ingest-votes.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
Failures emit a machine-readable JSON object on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import fit as fitmod
from . import kacward, learn, oracle, sample, serialize
from .errors import (
    DataError,
    EnumerationSizeError,
    FitError,
    LearnError,
    NumericalConsistencyError,
    PlanarLearnError,
)
from .graph import straight_line_embed

EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3


def ingest_votes(text: str, min_participation: float = 0.75):
    """Parse a roll-call CSV into a sample matrix.

    Rows are voters (first column the name), columns are votes; cells are
    Yea/Nay (case-insensitive), anything else counts as Absent.  Voters
    below the participation threshold are dropped; Yea maps to +1, Nay and
    Absent to -1.  Returns (samples, names) with rows = votes and columns =
    retained voters.
    """
    try:
        rows = list(csv.reader(io.StringIO(text)))
    except csv.Error as exc:
        raise DataError(f"malformed vote CSV: {exc}") from exc
    if len(rows) < 2 or len(rows[0]) < 2:
        raise DataError("vote CSV needs a header row and at least one voter row")
    width = len(rows[0])
    names, columns = [], []
    for row in rows[1:]:
        if len(row) != width:
            raise DataError(f"ragged vote CSV row for {row[0] if row else '?'!r}")
        name = row[0].strip()
        if name in names:
            raise DataError(f"duplicate voter name {name!r}")
        cast = 0
        spins = np.full(width - 1, -1, dtype=np.int8)
        for k, cell in enumerate(row[1:]):
            token = cell.strip().lower()
            if token == "yea":
                spins[k] = 1
                cast += 1
            elif token == "nay":
                cast += 1
        if cast / (width - 1) >= min_participation:
            names.append(name)
            columns.append(spins)
    if not names:
        raise DataError("no voter meets the participation threshold")
    return np.stack(columns, axis=1), names


def _load_learn_input(args) -> learn.MomentSet:
    if args.samples:
        samples = serialize.samples_from_csv(Path(args.samples).read_text())
        return sample.empirical_moments(samples)
    return serialize.load_moments(args.moments)


def _cmd_learn(args) -> None:
    ms = _load_learn_input(args)
    cfg = learn.LearnConfig(
        mode=args.mode,
        gain_threshold=args.gamma,
        max_edges=args.stop_at_edges,
        moment_clamp=args.moment_clamp,
    )
    model, trace = learn.greedy_select(ms, cfg)
    serialize.write_atomic(args.model_out, serialize.model_to_json(model))
    if args.trace_out:
        serialize.write_atomic(args.trace_out, serialize.trace_to_json(trace))
    if args.dot_out:
        names = None
        if args.names:
            names = Path(args.names).read_text().split("\n")
            names = [n for n in names if n.strip()]
        serialize.write_atomic(args.dot_out, serialize.model_to_dot(model, names))
    print(
        json.dumps(
            {
                "edges": len(model.graph.edges),
                "stop_reason": trace.stop_reason,
                "final_log_likelihood": trace.steps[-1].log_likelihood
                if trace.steps
                else trace.initial_log_likelihood,
            }
        )
    )


def _cmd_fit(args) -> None:
    g = serialize.graph_from_json(Path(args.graph).read_text())
    ms = serialize.load_moments(args.moments)
    if ms.n != g.n:
        raise DataError("graph and moments disagree on the variable count")
    target = np.array([ms.mu_pairs[i, j] for i, j in g.edges])
    cfg = fitmod.FitConfig(
        gradient_tolerance=args.tolerance, max_newton_iters=args.max_iters
    )
    report = fitmod.fit_ml(g, target, cfg)
    if not report.converged:
        raise FitError(f"fit did not converge: {report.message}")
    serialize.write_atomic(
        args.model_out,
        serialize.model_to_json(kacward.IsingModel(g, report.theta)),
    )
    payload = {
        "log_likelihood": report.log_likelihood,
        "grad_norm": report.grad_norm,
        "iterations": report.iterations,
        "converged": report.converged,
    }
    if args.report_out:
        serialize.write_atomic(args.report_out, json.dumps(payload, indent=2) + "\n")
    print(json.dumps(payload))


def _cmd_sample(args) -> None:
    if args.gen_grid:
        rows, cols = (int(v) for v in args.gen_grid.split("x"))
        model = sample.random_grid_model(rows, cols, seed=args.gen_seed)
    elif args.gen_outer is not None:
        model = sample.random_outer_planar_model(args.gen_outer, seed=args.gen_seed)
    else:
        if not args.model:
            raise DataError("provide --model or one of the generators")
        model = serialize.model_from_json(Path(args.model).read_text())
    if args.model_out:
        serialize.write_atomic(args.model_out, serialize.model_to_json(model))
    cfg = sample.SamplerConfig(
        burn_in=args.burn_in, thin=args.thin, seed=args.seed, init=args.init
    )
    samples = sample.gibbs_sample(model, args.num_samples, cfg)
    serialize.write_atomic(args.out, serialize.samples_to_csv(samples))
    print(json.dumps({"samples": int(samples.shape[0]), "variables": int(samples.shape[1]), "seed": args.seed}))


def _cmd_eval(args) -> None:
    model = serialize.model_from_json(Path(args.model).read_text())
    result: dict = {"n": model.graph.n, "edges": len(model.graph.edges)}
    zero_field = model.is_zero_field
    if zero_field:
        emb = straight_line_embed(model.graph)
        phi = kacward.log_partition(model, emb)
        mu = kacward.moments(model, emb)
    else:
        ext = learn.extend_model(model)
        emb = straight_line_embed(ext.graph)
        phi = kacward.log_partition(ext, emb) - np.log(2.0)
        mu_ext = kacward.moments(ext, emb)
        mu = np.array(
            [mu_ext[ext.graph.edge_index[e]] for e in model.graph.edges]
        )
    result["log_partition"] = float(phi)
    result["edge_moments"] = {
        f"{i}-{j}": float(m) for (i, j), m in zip(model.graph.edges, mu)
    }
    if args.samples:
        samples = serialize.samples_from_csv(Path(args.samples).read_text())
        if samples.shape[1] != model.graph.n:
            raise DataError("samples and model disagree on the variable count")
        x = samples.astype(float)
        energy = x @ model.theta_nodes
        for k, (i, j) in enumerate(model.graph.edges):
            energy += model.theta_edges[k] * x[:, i] * x[:, j]
        result["mean_log_likelihood"] = float(np.mean(energy) - phi)
    if args.exact:
        exact_phi = oracle.enum_log_partition(model)
        result["exact_log_partition"] = float(exact_phi)
        result["log_partition_abs_error"] = abs(float(exact_phi) - float(phi))
        if args.samples:
            counts = np.zeros(2 ** model.graph.n)
            bits = (samples > 0).astype(np.int64)
            states = bits @ (1 << np.arange(model.graph.n, dtype=np.int64))
            np.add.at(counts, states, 1.0)
            emp = oracle.StateDistribution(model.graph.n, counts / counts.sum())
            result["kl_empirical_vs_model"] = oracle.enum_divergence(
                emp, oracle.enum_distribution(model)
            )
    if args.out:
        serialize.write_atomic(args.out, json.dumps(result, indent=2) + "\n")
    print(json.dumps(result))


def _cmd_ingest_votes(args) -> None:
    samples, names = ingest_votes(
        Path(args.votes).read_text(), args.min_participation
    )
    serialize.write_atomic(args.out, serialize.samples_to_csv(samples))
    if args.names_out:
        serialize.write_atomic(args.names_out, "\n".join(names) + "\n")
    print(json.dumps({"votes": int(samples.shape[0]), "voters": len(names)}))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="planarlearn",
        description="Learn planar and outer-planar Ising models with exact "
        "Kac-Ward inference.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    pl = sub.add_parser("learn", help="greedy planar structure learning")
    src = pl.add_mutually_exclusive_group(required=True)
    src.add_argument("--moments", help="moments file (JSON or CSV matrix)")
    src.add_argument("--samples", help="sample CSV (rows = samples)")
    pl.add_argument("--mode", choices=learn.MODES, default="zero-field-planar")
    pl.add_argument("--gamma", type=float, default=0.0, help="gain threshold")
    pl.add_argument(
        "--stop-at-edges", type=int, default=None, help="stop after selecting this many edges"
    )
    pl.add_argument("--moment-clamp", type=float, default=1e-6)
    pl.add_argument("--names", help="optional newline-separated vertex names for DOT")
    pl.add_argument("--model-out", required=True)
    pl.add_argument("--trace-out")
    pl.add_argument("--dot-out")
    pl.set_defaults(func=_cmd_learn)

    pf = sub.add_parser("fit", help="maximum-likelihood fit on a fixed graph")
    pf.add_argument("--graph", required=True, help="graph JSON")
    pf.add_argument("--moments", required=True)
    pf.add_argument("--tolerance", type=float, default=1e-8)
    pf.add_argument("--max-iters", type=int, default=50)
    pf.add_argument("--model-out", required=True)
    pf.add_argument("--report-out")
    pf.set_defaults(func=_cmd_fit)

    ps = sub.add_parser("sample", help="Gibbs sampling from a model")
    ps.add_argument("--model", help="model JSON")
    ps.add_argument("--gen-grid", metavar="RxC", help="generate a random grid model")
    ps.add_argument(
        "--gen-outer", type=int, metavar="N", help="generate a random outer-planar model"
    )
    ps.add_argument("--gen-seed", type=int, default=0)
    ps.add_argument("--model-out", help="where to save a generated model")
    ps.add_argument("--num-samples", type=int, required=True)
    ps.add_argument("--burn-in", type=int, default=1000)
    ps.add_argument("--thin", type=int, default=10)
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--init", choices=("ones", "random"), default="ones")
    ps.add_argument("--out", required=True)
    ps.set_defaults(func=_cmd_sample)

    pe = sub.add_parser("eval", help="report log-partition, moments, likelihood")
    pe.add_argument("--model", required=True)
    pe.add_argument("--samples")
    pe.add_argument(
        "--exact", action="store_true", help="brute-force cross-checks (n <= 24)"
    )
    pe.add_argument("--out")
    pe.set_defaults(func=_cmd_eval)

    pv = sub.add_parser("ingest-votes", help="roll-call CSV to sample matrix")
    pv.add_argument("--votes", required=True)
    pv.add_argument("--min-participation", type=float, default=0.75)
    pv.add_argument("--out", required=True)
    pv.add_argument("--names-out")
    pv.set_defaults(func=_cmd_ingest_votes)
    return p


def _fail(code: int, kind: str, message: str) -> int:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)
    return code


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on bad usage; fold that into our usage code
        return EXIT_USAGE if exc.code else 0
    try:
        args.func(args)
        return 0
    except (NumericalConsistencyError, FitError, LearnError, EnumerationSizeError) as exc:
        return _fail(EXIT_NUMERICAL, type(exc).__name__, str(exc))
    except (DataError, OSError, PlanarLearnError, ValueError) as exc:
        return _fail(EXIT_DATA, type(exc).__name__, str(exc))


if __name__ == "__main__":
    sys.exit(main())
