"""Command-line front end.

Exit codes: 0 success, 1 a verification found violations (report still
written), 2 usage or parse error, 3 input outside an operation's domain
(e.g. disconnected graph), 4 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import enumeration as en
from .errors import DomainError, NumericError, ParseError, UsageError
from .formats import from_graph6, parse_graph, to_edge_list, to_graph6
from .graph import FamilyTag, Graph, make_family
from .linalg import CLUSTER_TOL, cluster, eigenvalues_sym
from .spectral import (
    HALF_TOL,
    build_M,
    build_M_by_squaring,
    epsilon_direct,
    epsilon_via_M,
    gap_minimizer,
    neighborhood_gap_check,
    neighborhood_laplacian,
    rayleigh_gap_quotient,
)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_NUMERIC = 4

CSV_FIELDS = ["graph6", "n", "d_min", "epsilon", "family"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _add_input(p: argparse.ArgumentParser) -> None:
    src = p.add_argument_group("graph input (exactly one)")
    src.add_argument("--family", metavar="NAME:PARAM", help="e.g. petal:4, book:2, cycle:5, complete-bipartite:2,3")
    src.add_argument("--edges", metavar="PATH", help="edge-list file ('-' for stdin)")
    src.add_argument("--graph6", metavar="PATH", help="file holding one graph6 line ('-' for stdin)")
    src.add_argument("--g6", metavar="STRING", help="graph6 string given inline")


def _add_output(p: argparse.ArgumentParser, formats=("text", "json")) -> None:
    p.add_argument("--format", choices=formats, default=formats[0])
    p.add_argument("--out", metavar="PATH", help="write the result here instead of stdout")
    p.add_argument("--tol-cluster", type=float, default=CLUSTER_TOL)
    p.add_argument("--tol-half", type=float, default=HALF_TOL)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def load_graph(args) -> Graph:
    given = [k for k in ("family", "edges", "graph6", "g6") if getattr(args, k, None) is not None]
    if len(given) != 1:
        raise UsageError("give exactly one of --family, --edges, --graph6, --g6")
    if args.family is not None:
        return make_family(FamilyTag.parse(args.family))
    if args.edges is not None:
        return parse_graph(_read(args.edges))
    if args.graph6 is not None:
        lines = [ln for ln in _read(args.graph6).splitlines() if ln.strip()]
        if len(lines) != 1:
            raise ParseError("expected exactly one graph6 line")
        return from_graph6(lines[0])
    return from_graph6(args.g6)


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _tolerances(args) -> dict:
    return {"cluster": args.tol_cluster, "half": args.tol_half}


# ---------------------------------------------------------------------------
# commands


def cmd_spectrum(args) -> int:
    g = load_graph(args)
    rep = epsilon_direct(g, tol_half=args.tol_half, tol_cluster=args.tol_cluster)
    if args.format == "json":
        d = rep.as_dict()
        d.update(n=g.n, graph6=to_graph6(g), tolerances=_tolerances(args), schema_version=en.SCHEMA_VERSION)
        _emit(args, json.dumps(d, indent=2, sort_keys=True) + "\n")
        return EXIT_OK
    lines = [f"n = {g.n}", "eigenvalues: " + " ".join(_fmt(x) for x in rep.spectrum.values), "groups:"]
    lines += [f"  {_fmt(v)} x{k}" for v, k in rep.spectrum.groups]
    lines += [f"epsilon = {_fmt(rep.epsilon)}", f"nearest eigenvalue = {_fmt(rep.nearest_eigenvalue)}",
              f"family = {rep.family}", f"achieves 1/2 = {rep.achieves_half}"]
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


cmd_gap = cmd_spectrum


def cmd_m_matrix(args) -> int:
    g = load_graph(args)
    m = build_M(g)
    spec = eigenvalues_sym(m, args.tol_cluster)
    eps_m = epsilon_via_M(g)
    eps = epsilon_direct(g).epsilon
    square_dev = float(np.max(np.abs(m.entries - build_M_by_squaring(g))))
    result = {
        "n": g.n,
        "M": m.entries.tolist(),
        "eigenvalues": list(spec.values),
        "mu_min": spec[0],
        "epsilon_via_M": eps_m,
        "epsilon_direct": eps,
        "deviation": abs(eps - eps_m),
        "entrywise_vs_square_max_dev": square_dev,
        "schema_version": en.SCHEMA_VERSION,
    }
    if args.format == "json":
        _emit(args, json.dumps(result, indent=2, sort_keys=True) + "\n")
    else:
        rows = ["  " + " ".join(f"{x:9.6f}" for x in r) for r in m.entries]
        _emit(args, "\n".join(
            ["M ="] + rows + [
                "eigenvalues: " + " ".join(_fmt(x) for x in spec.values),
                f"sqrt(mu_min) = {_fmt(eps_m)}",
                f"epsilon (spectrum) = {_fmt(eps)}",
                f"entrywise vs squared max deviation = {square_dev:.3e}",
            ]) + "\n")
    return EXIT_OK


def cmd_rayleigh(args) -> int:
    g = load_graph(args)
    if args.f is not None:
        try:
            f = [float(x) for x in args.f.split(",")]
        except ValueError:
            raise UsageError("--f must be a comma-separated list of numbers") from None
    else:
        f = list(gap_minimizer(g))
    q = rayleigh_gap_quotient(g, f)
    eps = epsilon_direct(g).epsilon
    result = {"f": f, "quotient": q, "epsilon_squared": eps * eps, "at_least_epsilon_squared": bool(q >= eps * eps - 1e-9)}
    if args.format == "json":
        _emit(args, json.dumps(result, indent=2, sort_keys=True) + "\n")
    else:
        _emit(args, f"f = {', '.join(_fmt(x) for x in f)}\nquotient = {_fmt(q)}\nepsilon^2 = {_fmt(eps * eps)}\n")
    return EXIT_OK


def cmd_neighborhood(args) -> int:
    g = load_graph(args)
    if args.ell < 1:
        raise UsageError("--ell must be >= 1")
    spec = eigenvalues_sym(neighborhood_laplacian(g, args.ell), args.tol_cluster)
    min_dist, holds = neighborhood_gap_check(g, args.ell)
    bound = 0.5**args.ell
    result = {
        "n": g.n,
        "ell": args.ell,
        "eigenvalues": list(spec.values),
        "groups": [[v, k] for v, k in spec.groups],
        "min_dist": min_dist,
        "bound": bound,
        "holds": holds,
        "schema_version": en.SCHEMA_VERSION,
    }
    if args.format == "json":
        _emit(args, json.dumps(result, indent=2, sort_keys=True) + "\n")
    else:
        _emit(args, "\n".join([
            f"ell = {args.ell}",
            "eigenvalues: " + " ".join(_fmt(x) for x in spec.values),
            f"min |1 - lambda| = {_fmt(min_dist)}",
            f"bound 2^-ell = {_fmt(bound)}",
            "pass" if holds else "FAIL",
        ]) + "\n")
    return EXIT_OK if holds else EXIT_VIOLATION


def _mode(args) -> str:
    return args.mode.replace("-", "_")


def cmd_verify(args) -> int:
    threads = args.threads
    mode = _mode(args)
    if args.suite == "gap":
        report = en.verify_gap_theorem(args.n, mode, args.prune, threads, tol_half=args.tol_half)
    elif args.suite == "degree-bound":
        report = en.verify_degree_bound(args.n, mode, threads)
    elif args.suite == "neighborhood":
        report = en.verify_neighborhood_theorem(args.n, args.ell, mode, threads)
    elif args.suite == "lemma1":
        report = en.verify_lemma1(args.n, mode, threads)
    else:
        report = en.verify_max_dist(args.n, mode, threads)
    print(f"{args.suite} n={args.n}: {report.wall_time:.2f}s", file=sys.stderr)
    if args.format == "csv":
        rows = en.threshold_rows(args.n, args.threshold, mode, threads)
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        _emit(args, buf.getvalue())
    elif args.format == "json":
        _emit(args, report.to_json(args.timing))
    else:
        status = "ok" if report.ok else f"{report.violation_count} violation(s)"
        _emit(args, f"{args.suite} n={args.n} mode={mode}: {report.connected_count} connected graphs, {status}\n")
    return EXIT_OK if report.ok else EXIT_VIOLATION


def cmd_enumerate(args) -> int:
    mode = _mode(args)
    stream = en.labeled_connected_stream(args.n) if mode == "labeled" else en.isomorph_free_stream(args.n)
    if args.count:
        _emit(args, f"{sum(1 for _ in stream)}\n")
    else:
        _emit(args, "".join(to_graph6(g) + "\n" for g in stream))
    return EXIT_OK


def cmd_encode(args) -> int:
    g = load_graph(args)
    _emit(args, to_graph6(g) + "\n")
    return EXIT_OK


def cmd_decode(args) -> int:
    g = load_graph(args)
    _emit(args, to_edge_list(g))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="specgap", description="Normalized-Laplacian spectral gap at 1: analysis and exhaustive checks.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name, func, helptext in (
        ("spectrum", cmd_spectrum, "eigenvalues with multiplicities, epsilon and family"),
        ("gap", cmd_gap, "alias of spectrum"),
        ("m-matrix", cmd_m_matrix, "the common-neighbour matrix M and sqrt of its smallest eigenvalue"),
        ("encode", cmd_encode, "print the graph as graph6"),
        ("decode", cmd_decode, "print the graph as an edge list"),
    ):
        p = sub.add_parser(name, help=helptext)
        _add_input(p)
        _add_output(p)
        p.set_defaults(func=func)

    p = sub.add_parser("rayleigh", help="gap quotient of a function (default: the minimizer)")
    _add_input(p)
    _add_output(p)
    p.add_argument("--f", metavar="V0,V1,...", help="function values by vertex")
    p.set_defaults(func=cmd_rayleigh)

    p = sub.add_parser("neighborhood", help="spectrum of I - (I - L)^ell and the 2^-ell bound")
    _add_input(p)
    _add_output(p)
    p.add_argument("--ell", type=int, required=True)
    p.set_defaults(func=cmd_neighborhood)

    p = sub.add_parser("verify", help="exhaustive checks over connected graphs on n vertices")
    p.add_argument("suite", choices=["gap", "degree-bound", "neighborhood", "lemma1", "max-dist"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--ell", type=int, default=10, help="largest ell for the neighborhood suite")
    p.add_argument("--mode", choices=["labeled", "isomorph-free"], default="labeled")
    p.add_argument("--threads", type=int, default=en.default_threads())
    p.add_argument("--prune", action="store_true")
    p.add_argument("--threshold", type=float, default=0.5 - 1e-6, help="epsilon cut-off for CSV rows")
    p.add_argument("--timing", action="store_true", help="include wall_time in the JSON report")
    _add_output(p, ("json", "csv", "text"))
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("enumerate", help="stream connected graphs as graph6 lines")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mode", choices=["labeled", "isomorph-free"], default="isomorph-free")
    p.add_argument("--count", action="store_true", help="print only the number of graphs")
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_enumerate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "threads", 1) < 1:
            raise UsageError("--threads must be >= 1")
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
