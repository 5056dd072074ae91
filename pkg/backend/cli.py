# backend/cli.py
"""
Command-line entry point.

Exit codes: 0 success, 1 negative result (e.g. the set does not resolve),
2 usage or input error. Results go to standard output, logs to standard error.
"""
import argparse
import logging
import sys
import time
from pathlib import Path
from typing import List, Optional

from application_service import canonical_form, embed_sequences, hamming_landmarks, locate_source
from approx_service import sbm_allocate, sbm_failure_bound
from config import get_settings
from errors import InputError, MetricDimensionError
from exact_service import diameter_lower_bound, is_n_minus_two_family, solve_graph, twin_lower_bound, unicyclic_interval
from experiment_service import EXPERIMENTS, parse_params, run_experiment, store_report
from family_schema import FamilySpec
from family_service import generate_from_string, parse_spec
from graph_service import format_edge_list, is_connected, parse_vertex_list, read_edge_list, write_edge_list
from reduction_service import assignment_to_resolving_set, parse_dimacs, sat_to_graph
from resolving_service import verify

logger = logging.getLogger("cli")

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE = 0, 1, 2


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}")


def _load(args) -> tuple:
    """Graph from --graph FILE or --family SPEC, plus the family spec if known."""
    if getattr(args, "family", None):
        g, spec = generate_from_string(args.family)
    elif getattr(args, "graph", None):
        try:
            g, metadata = read_edge_list(args.graph)
        except OSError as e:
            raise InputError(f"cannot read {args.graph}: {e.strerror}")
        spec = parse_spec(metadata["family"]) if "family" in metadata else None
    else:
        raise InputError("give --graph FILE or --family SPEC")
    return g, spec if isinstance(spec, FamilySpec) else None


def _emit(text: str, out: Optional[str]):
    if out:
        Path(out).write_text(text, encoding="utf-8")
        logger.info(f"wrote {out}")
    else:
        sys.stdout.write(text)


def cmd_generate(args) -> int:
    g, spec = generate_from_string(args.family)
    key = "family" if isinstance(spec, FamilySpec) else "random"
    _emit(format_edge_list(g, {key: spec.label}), args.out)
    return EXIT_OK


def cmd_solve(args) -> int:
    g, spec = _load(args)
    if args.method in ("brute", "ich") and g.n > args.max_vertices:
        raise InputError(f"{args.method} is limited to {args.max_vertices} vertices (raise --max-vertices)")
    started = time.perf_counter()
    result = solve_graph(g, args.method, spec=spec, variant=args.variant)
    elapsed = time.perf_counter() - started
    print(f"{result.summary()} method={result.method.value} time={elapsed:.3f}s")
    return EXIT_OK


def cmd_verify(args) -> int:
    g, _ = _load(args)
    members = parse_vertex_list(args.set)
    check = verify(g, members, args.variant)
    if check:
        print(f"resolving: {args.variant}")
        return EXIT_OK
    u, v = check.witness
    print(f"not resolving: vertices {u} and {v} are not separated")
    return EXIT_NEGATIVE


def cmd_bounds(args) -> int:
    g, _ = _load(args)
    print(f"twin_lower_bound={twin_lower_bound(g)}")
    if is_connected(g) and g.n >= 2:
        print(f"diameter_lower_bound={diameter_lower_bound(g)}")
        print(f"n_minus_two_family={str(is_n_minus_two_family(g)).lower()}")
        if g.m == g.n and g.n >= 3:
            interval = unicyclic_interval(g)
            print(f"unicyclic_interval={interval.lo}..{interval.hi}")
    return EXIT_OK


def cmd_reduce_sat(args) -> int:
    rg = sat_to_graph(parse_dimacs(_read_text(args.cnf)))
    if args.out:
        write_edge_list(args.out, rg.graph)
    if args.labels:
        Path(args.labels).write_text(rg.label_text(), encoding="utf-8")
    print(f"vertices={rg.graph.n} edges={rg.graph.m} target_beta={rg.formula.num_vars + rg.formula.num_clauses}")
    if args.assignment is None:
        return EXIT_OK
    values = [tok.strip().lower() in ("1", "t", "true") for tok in args.assignment.split(",")]
    witness = assignment_to_resolving_set(rg, values)
    print(f"satisfies={str(witness.satisfies).lower()} set={','.join(str(v) for v in witness.members)}")
    if witness.resolution:
        print("resolving: true")
        return EXIT_OK
    u, v = witness.resolution.witness
    print(f"resolving: false ({rg.label_of(u)} and {rg.label_of(v)} collide)")
    return EXIT_NEGATIVE


def cmd_locate(args) -> int:
    g, _ = _load(args)
    observers = parse_vertex_list(args.observers)
    try:
        times = [int(t) for t in args.times.split(",")]
    except ValueError:
        raise InputError(f"--times must be comma-separated integers, got {args.times!r}")
    print(f"source={locate_source(g, observers, times)}")
    return EXIT_OK


def cmd_canon(args) -> int:
    g, _ = _load(args)
    if g.n > args.max_vertices:
        raise InputError(f"canonical labelling is limited to {args.max_vertices} vertices")
    form = canonical_form(g)
    print("\n".join(form.rows()))
    print("labeling=" + ",".join(str(x) for x in form.labeling))
    return EXIT_OK


def _lines(path: str) -> List[str]:
    return [line.strip() for line in _read_text(path).splitlines() if line.strip()]


def cmd_embed(args) -> int:
    landmarks = _lines(args.landmarks) if args.landmarks else hamming_landmarks(args.a, args.k)
    sequences = _lines(args.sequences) if args.sequences else None
    embedding = embed_sequences(args.a, args.k, landmarks, sequences)
    _emit(embedding.to_csv(), args.out)
    logger.info(f"{len(landmarks)} landmarks, injective={embedding.injective}")
    return EXIT_OK if embedding.injective else EXIT_NEGATIVE


def _floats(text: str, flag: str) -> List[float]:
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise InputError(f"{flag} must be comma-separated numbers, got {text!r}")


def cmd_sbm_bound(args) -> int:
    sizes = [int(x) for x in _floats(args.sizes, "--sizes")]
    flat = _floats(args.p, "--p")
    c = len(sizes)
    if len(flat) != c * c:
        raise InputError(f"--p needs {c * c} entries for {c} communities, got {len(flat)}")
    probs = [flat[i * c:(i + 1) * c] for i in range(c)]
    if args.k:
        k = [int(x) for x in _floats(args.k, "--k")]
        print(f"bound={sbm_failure_bound(sizes, probs, k):.6g}")
        return EXIT_OK
    if args.threshold is None:
        raise InputError("give --threshold (allocate) or --k (evaluate)")
    allocation = sbm_allocate(sizes, probs, args.threshold)
    print(f"k={','.join(str(x) for x in allocation.k)} total={allocation.total} bound={allocation.bound:.6g}")
    return EXIT_OK


def cmd_experiment(args) -> int:
    report = run_experiment(args.name, parse_params(args.param), args.seed)
    text = report.to_tsv()
    _emit(text, args.out)
    if args.store:
        from db import SessionLocal, init_db

        init_db()
        db = SessionLocal()
        try:
            report = store_report(db, report)
        finally:
            db.close()
        logger.info(f"stored as report {report.id}")
    print(report.summary())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    parser = argparse.ArgumentParser(prog="metricdim", description="Metric dimension toolkit")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    def graph_args(p):
        src = p.add_mutually_exclusive_group()
        src.add_argument("--graph", help="edge-list file")
        src.add_argument("--family", help="family or random spec, e.g. fan:12")

    p = sub.add_parser("generate", help="write a family or random graph as an edge list")
    p.add_argument("--family", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("solve", help="metric dimension with a witness")
    graph_args(p)
    p.add_argument("--method", choices=["brute", "family", "tree", "ich"], default="brute")
    p.add_argument("--variant", default="resolving", help="resolving | doubly | strong | truncated:k")
    p.add_argument("--max-vertices", type=int, default=settings.BRUTE_FORCE_MAX_VERTICES)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check a vertex set")
    graph_args(p)
    p.add_argument("--set", required=True)
    p.add_argument("--variant", default="resolving")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bounds", help="lower bounds and structural checks")
    graph_args(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("reduce-sat", help="3-SAT formula to reduction graph")
    p.add_argument("--cnf", required=True)
    p.add_argument("--out")
    p.add_argument("--labels")
    p.add_argument("--assignment", help="comma-separated truth values, e.g. 1,1,0,0")
    p.set_defaults(func=cmd_reduce_sat)

    p = sub.add_parser("locate", help="source of a unit-speed spread")
    graph_args(p)
    p.add_argument("--observers", required=True)
    p.add_argument("--times", required=True)
    p.set_defaults(func=cmd_locate)

    p = sub.add_parser("canon", help="canonical adjacency matrix")
    graph_args(p)
    p.add_argument("--max-vertices", type=int, default=settings.CANONICAL_MAX_VERTICES)
    p.set_defaults(func=cmd_canon)

    p = sub.add_parser("embed", help="Hamming embedding of sequences")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--landmarks", help="file with one landmark per line (default: greedy landmarks)")
    p.add_argument("--sequences", help="file with one sequence per line (default: all strings)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("sbm-bound", help="first-moment bound and landmark allocation")
    p.add_argument("--sizes", required=True)
    p.add_argument("--p", required=True)
    p.add_argument("--threshold", type=float)
    p.add_argument("--k")
    p.set_defaults(func=cmd_sbm_bound)

    p = sub.add_parser("experiment", help="seeded experiment, TSV rows then a summary line")
    p.add_argument("name", choices=sorted(EXPERIMENTS))
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--store", action="store_true", help="save the report to the database")
    p.add_argument("--out")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else get_settings().LOG_LEVEL,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except MetricDimensionError as e:
        logger.error(str(e))
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
