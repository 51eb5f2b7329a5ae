"""Command-line interface: ``trihybrid {model,group,qubo,vqe,survey,replay}``.

Exit codes: 0 success, 1 internal error, 2 usage error, 3 the annealer found
no valid colouring.
"""

from __future__ import annotations

import argparse
import datetime
import hashlib
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .anneal import (
    AnnealConfig,
    SampleSet,
    render_sampleset_tsv,
    sample_statistics,
    simulated_annealing_sample,
)
from .commgraph import (
    Coloring,
    build_noncommutation_graph,
    exhaustive_chromatic,
    greedy_coloring,
    grouping_from_coloring,
    render_edge_list,
)
from .pauli import HamiltonianParseError, read_hamiltonian, render_hamiltonian, write_hamiltonian
from .qubo import DEFAULT_PENALTY, decode_coloring, graph_coloring_qubo, render_qubo
from .survey import (
    DEFAULT_MANIFEST,
    ManifestError,
    build_hamiltonian,
    parse_manifest,
    preprocess,
    render_fig_csv,
    render_table_tsv,
    run_survey,
)
from .vqe import AnnealingFailure, VqeConfig, run_vqe

EXIT_OK, EXIT_INTERNAL, EXIT_USAGE, EXIT_NO_VALID = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(output, args, argv, inputs=()) -> None:
    """Sidecar ``<output>.manifest.json`` recording how the output was made."""
    flags = {k: v for k, v in vars(args).items() if k != "func"}
    manifest = {
        "command": args.command,
        "argv": list(argv),
        "flags": flags,
        "seed": flags.get("seed"),
        "version": __version__,
        "inputs": {str(p): _digest(p) for p in inputs if p},
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    Path(f"{output}.manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n"
    )


def _load(path):
    try:
        return read_hamiltonian(path)
    except FileNotFoundError:
        raise UsageError(f"no such file: {path}") from None
    except HamiltonianParseError as exc:
        raise UsageError(f"{path}: {exc}") from None


def cmd_model(args, argv) -> int:
    periodic = True if args.periodic else False if args.open else None
    if args.kind != "h2" and (args.rows is None or args.cols is None):
        raise UsageError(f"--kind {args.kind} needs --rows and --cols")
    try:
        h = build_hamiltonian(args.kind, args.rows, args.cols, periodic, args.t, args.u, args.coupling)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.output:
        write_hamiltonian(h, args.output)
        write_manifest(args.output, args, argv)
    else:
        sys.stdout.write(render_hamiltonian(h))
    print(f"terms {len(h)} n_qubits {h.n_qubits}", file=sys.stderr if not args.output else sys.stdout)
    return EXIT_OK


def _group_report(h, grouping, universal, z_group) -> dict:
    return {
        "terms": len(h),
        "groups": [
            [{"index": i, "coefficient": h[i].coefficient, "string": h[i].string.sparse_label()} for i in grp]
            for grp in grouping.groups
        ],
        "n_groups": len(grouping),
        "speedup": len(h) / len(grouping),
        "removed_universal": [str(t) for t in universal],
        "z_group": [str(t) for t in z_group],
    }


def cmd_group(args, argv) -> int:
    h0 = _load(args.input)
    h, universal, z_group = preprocess(h0, args.mode, args.strip_universal, args.strip_z)
    if len(h) == 0:
        raise UsageError("no terms left to group after preprocessing")
    g = build_noncommutation_graph(h, args.mode)
    greedy = greedy_coloring(g)
    k = args.colors or greedy.n_colors
    status = EXIT_OK
    extra = {}
    if args.solver == "greedy":
        coloring = greedy
    elif args.solver == "exact":
        res = exhaustive_chromatic(g, max(k, greedy.n_colors), time_limit=args.time_limit)
        extra["exact_status"] = res.status
        if res.coloring is None:
            print(f"exact search: {res.status}", file=sys.stderr)
            return EXIT_INTERNAL
        coloring = res.coloring
    else:
        q = graph_coloring_qubo(g, k, args.penalty)
        cfg = AnnealConfig(num_reads=args.reads, sweeps_per_read=args.sweeps, seed=args.seed)
        samples = simulated_annealing_sample(q, cfg)
        stats = sample_statistics(samples, g, k, ground_energy=-args.penalty * g.n_vertices)
        samples_path = args.samples or f"{args.input}.samples.tsv"
        Path(samples_path).write_text(render_sampleset_tsv(SampleSet(stats.rows, stats.total_reads)))
        extra.update(
            colors=k,
            n_qubits=stats.n_qubits,
            valid_count=stats.valid_count,
            total_reads=stats.total_reads,
            ground_hit_rate=stats.ground_hit_rate,
            samples_file=samples_path,
        )
        print(
            f"annealer: {stats.valid_count}/{stats.total_reads} valid, "
            f"{stats.n_qubits} binary variables, samples -> {samples_path}"
        )
        row = next((r for r in stats.rows if r.valid), None)
        if row is not None:
            coloring = Coloring.compact(decode_coloring(row.bits, g.n_vertices, k).color_of)
        elif args.fallback == "greedy":
            print("annealer found no valid colouring; falling back to greedy", file=sys.stderr)
            coloring = greedy
            extra["fallback"] = "greedy"
        else:
            print("annealer found no valid colouring", file=sys.stderr)
            return EXIT_NO_VALID

    grouping = grouping_from_coloring(h, coloring, args.mode)
    report = _group_report(h, grouping, universal, z_group)
    report.update(mode=args.mode, solver=args.solver, greedy_colors=greedy.n_colors, **extra)
    for n, grp in enumerate(report["groups"]):
        body = " | ".join(f"{t['index']}: {t['string']}" for t in grp)
        print(f"group {n}: {body}")
    print(f"terms {report['terms']} groups {report['n_groups']} speedup {report['speedup']:.6g}")
    if args.graph:
        Path(args.graph).write_text(render_edge_list(g))
    if args.output:
        Path(args.output).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
        write_manifest(args.output, args, argv, [args.input])
    return status


def cmd_qubo(args, argv) -> int:
    h = _load(args.input)
    h, _, _ = preprocess(h, args.mode, args.strip_universal, args.strip_z)
    g = build_noncommutation_graph(h, args.mode)
    try:
        q = graph_coloring_qubo(g, args.colors, args.penalty)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    Path(args.output).write_text(render_qubo(q))
    write_manifest(args.output, args, argv, [args.input])
    print(f"dim {q.dim} ({g.n_vertices} vertices x {args.colors} colours) offset {q.offset:g}")
    return EXIT_OK


def cmd_vqe(args, argv) -> int:
    h = _load(args.input)
    mode = args.grouping.replace("-", "_")
    cfg = VqeConfig(
        shots_per_group=args.shots,
        max_iterations=args.max_iterations,
        seed=args.seed,
        grouping_mode=mode,
        exact=args.exact,
        anneal=AnnealConfig(num_reads=args.reads, seed=args.seed),
        penalty=args.penalty,
    )
    try:
        report = run_vqe(h, cfg)
    except AnnealingFailure as exc:
        if args.fallback != "greedy":
            print(str(exc), file=sys.stderr)
            return EXIT_NO_VALID
        print(f"{exc}; falling back to greedy", file=sys.stderr)
        report = run_vqe(h, replace(cfg, grouping_mode="qwc_greedy"))
    if args.output:
        Path(args.output).write_text(report.to_json())
        write_manifest(args.output, args, argv, [args.input])
    print("grouping\truns\tenergy")
    print(f"{args.grouping}\t{report.runs_per_evaluation}\t{report.best_energy:.6f}")
    return EXIT_OK


def cmd_survey(args, argv) -> int:
    if args.manifest:
        text = Path(args.manifest).read_text()
    else:
        text = DEFAULT_MANIFEST
    try:
        rows = parse_manifest(text)
    except ManifestError as exc:
        raise UsageError(str(exc)) from None
    results = run_survey(rows, jobs=args.jobs)
    table = render_table_tsv(results)
    Path(args.tsv).write_text(table)
    Path(args.csv).write_text(render_fig_csv(results))
    write_manifest(args.tsv, args, argv, [args.manifest] if args.manifest else [])
    sys.stdout.write(table)
    for r in results:
        if r.error:
            print(f"{r.row.label}: {r.error}", file=sys.stderr)
    return EXIT_OK


def cmd_replay(args, argv) -> int:
    manifest = json.loads(Path(args.manifest).read_text())
    return main(manifest["argv"])


def _add_preprocess(p) -> None:
    p.add_argument("--strip-z", action="store_true", help="pull Z-only terms into their own group")
    p.add_argument(
        "--strip-universal", action="store_true", help="drop terms that commute with all others"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trihybrid", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("model", help="write a benchmark Hamiltonian")
    p.add_argument("--kind", choices=["h2", "heisenberg", "hubbard"], required=True)
    p.add_argument("--rows", type=int)
    p.add_argument("--cols", type=int)
    bc = p.add_mutually_exclusive_group()
    bc.add_argument("--periodic", action="store_true")
    bc.add_argument("--open", action="store_true")
    p.add_argument("--t", type=float, default=1.0, help="Hubbard hopping")
    p.add_argument("--u", type=float, default=2.0, help="Hubbard on-site interaction")
    p.add_argument("--coupling", type=float, default=1.0, help="Heisenberg coupling")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("group", help="group commuting terms")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--mode", choices=["qwc", "gc"], default="qwc")
    p.add_argument("--solver", choices=["greedy", "exact", "anneal"], default="greedy")
    p.add_argument("--colors", type=int, help="colours for the annealer (default: greedy count)")
    p.add_argument("--penalty", type=float, default=DEFAULT_PENALTY)
    p.add_argument("--reads", type=int, default=1000)
    p.add_argument("--sweeps", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--time-limit", type=float, default=30.0, help="exact solver budget, seconds")
    p.add_argument("--fallback", choices=["greedy"])
    p.add_argument("--samples", help="sample-set TSV path (anneal)")
    p.add_argument("--graph", help="write the non-commutation edge list here")
    p.add_argument("-o", "--output", help="JSON grouping report")
    _add_preprocess(p)
    p.set_defaults(func=cmd_group)

    p = sub.add_parser("qubo", help="export the colouring QUBO")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--mode", choices=["qwc", "gc"], default="qwc")
    p.add_argument("--colors", type=int, required=True)
    p.add_argument("--penalty", type=float, default=DEFAULT_PENALTY)
    p.add_argument("-o", "--output", required=True)
    _add_preprocess(p)
    p.set_defaults(func=cmd_qubo)

    p = sub.add_parser("vqe", help="run the grouped-measurement VQE")
    p.add_argument("-i", "--input", required=True)
    p.add_argument(
        "--grouping", choices=["naive", "qwc-greedy", "qwc-anneal", "qwc-exact"], default="qwc-greedy"
    )
    p.add_argument("--shots", type=int, default=2**13)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iterations", type=int, default=100)
    p.add_argument("--reads", type=int, default=1000, help="annealer reads (qwc-anneal)")
    p.add_argument("--penalty", type=float, default=DEFAULT_PENALTY)
    p.add_argument("--exact", action="store_true", help="noise-free objective")
    p.add_argument("--fallback", choices=["greedy"])
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_vqe)

    p = sub.add_parser("survey", help="grouping survey over a manifest of models")
    p.add_argument("--manifest", help="manifest file (default: built-in)")
    p.add_argument("--tsv", default="survey.tsv")
    p.add_argument("--csv", default="valid_samples.csv")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_survey)

    p = sub.add_parser("replay", help="re-run the command recorded in a manifest")
    p.add_argument("manifest")
    p.set_defaults(func=cmd_replay)
    return parser


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    for name in ("shots", "reads", "sweeps", "jobs", "max_iterations"):
        if getattr(args, name, 1) is not None and getattr(args, name, 1) < 1:
            parser.print_usage(sys.stderr)
            print(f"trihybrid: error: --{name.replace('_', '-')} must be >= 1", file=sys.stderr)
            return EXIT_USAGE
    try:
        return args.func(args, argv)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"trihybrid {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:
        print(f"trihybrid {args.command}: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
