"""Command-line surface.

Exit codes: 0 success, 2 validation error (bad flags or malformed files),
3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import fileio
from .percolation import sample_config
from .features import InterfaceError
from .estimator import (run_moments, run_arms, fit_exponent, exact_enumeration,
                        worker_count)


def _parse_taus(text: str) -> tuple[int, ...]:
    return tuple(int(t) for t in text.split(","))


def _parse_ladder(text: str) -> tuple[int, ...]:
    return tuple(int(t) for t in text.split(","))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="perctri",
                                 description="critical site percolation "
                                             "laboratory on the triangular "
                                             "lattice")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("sample", help="sample one configuration to a file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--trial", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("features", help="feature-size moments over trials")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--tau", type=_parse_taus, default=(1,))
    p.add_argument("--out", required=True)

    p = sub.add_parser("arms", help="arm event probabilities along a ladder")
    p.add_argument("--kappa", type=int, default=3)
    p.add_argument("--pattern", default=None,
                   help="state pattern such as ooc (defaults to the "
                        "canonical pattern for kappa)")
    p.add_argument("--inner", type=int, default=0)
    p.add_argument("--ladder", type=_parse_ladder, required=True)
    p.add_argument("--variant", default="annulus",
                   choices=("annulus", "point", "halfplane", "horseshoe"))
    p.add_argument("--rho", type=int, default=1,
                   help="inner exponent for the horseshoe variant")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("fit", help="log-log slope of one quantity in a table")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--quantity", required=True)
    p.add_argument("--tau", type=int, default=1)
    p.add_argument("--weighting", default="none",
                   choices=("none", "inverse-relvar"))
    p.add_argument("--out", required=True,
                   help="output prefix: writes <out>.json and <out>.gp")

    p = sub.add_parser("oracle", help="exact enumeration at n = 1 or 2")
    p.add_argument("--n", type=int, required=True, choices=(1, 2))
    p.add_argument("--tau", type=_parse_taus, default=(1, 2, 3))
    p.add_argument("--out", required=True)

    p = sub.add_parser("graph", help="chain graph of a vertex tuple")
    p.add_argument("--tuple-file", required=True,
                   help="JSON: {\"n\": ..., \"vertices\": [[x, y], ...]}")
    p.add_argument("--tau", type=int, default=None,
                   help="expected tuple size (validated against the file)")
    p.add_argument("--n", type=int, default=None,
                   help="override the ambient radius from the file")
    p.add_argument("--check", action="store_true",
                   help="also build the box family and verify disjointness")
    p.add_argument("--out", required=True)

    p = sub.add_parser("render", help="render a configuration file to SVG")
    p.add_argument("--config", required=True)
    p.add_argument("--overlays", default="",
                   help="subset of LFQG: lowest crossing, fringe, pivotal "
                        "dots, crossing path")
    p.add_argument("--out", required=True)
    return ap


def _pattern_needs(kappa: int, pattern: str | None) -> tuple[int, int]:
    if pattern is None:
        pattern = {2: "oc", 3: "ooc", 4: "oocc"}[kappa]
    pattern = pattern.lower()
    if set(pattern) - {"o", "c"}:
        raise ValueError("pattern must use only 'o' and 'c'")
    if len(pattern) != kappa:
        raise ValueError("pattern length must equal kappa")
    no, nc = pattern.count("o"), pattern.count("c")
    if no == 0 or nc == 0:
        raise ValueError("monochrome patterns are not an arm event")
    if no > 2 or nc > 2:
        raise ValueError("at most two chains per state are supported")
    return no, nc


def _cmd_sample(args) -> int:
    config = sample_config(args.n, args.seed, args.trial)
    fileio.write_config(config, args.out)
    fileio.write_manifest([args.out], "sample",
                          {"n": args.n, "trial": args.trial},
                          args.seed, args.out + ".manifest.json")
    return 0


def _cmd_features(args) -> int:
    table = run_moments([args.n], args.tau, args.trials, args.seed,
                        workers=worker_count())
    fileio.write_csv(table.csv_lines(), args.out)
    fileio.write_manifest([args.out], "features",
                          {"n": args.n, "trials": args.trials,
                           "tau": list(args.tau)},
                          args.seed, args.out + ".manifest.json")
    return 0


def _cmd_arms(args) -> int:
    needs = _pattern_needs(args.kappa, args.pattern)
    table = run_arms(args.variant, args.ladder, args.trials, args.seed,
                     kappa=args.kappa, inner=args.inner, rho=args.rho,
                     needs=needs, workers=worker_count())
    fileio.write_csv(table.csv_lines(), args.out)
    fileio.write_manifest([args.out], "arms",
                          {"variant": args.variant, "kappa": args.kappa,
                           "pattern": args.pattern, "inner": args.inner,
                           "rho": args.rho, "ladder": list(args.ladder),
                           "trials": args.trials},
                          args.seed, args.out + ".manifest.json")
    return 0


def _cmd_fit(args) -> int:
    table = fileio.read_table_csv(args.input)
    rows = table.select(args.quantity, args.tau)
    if not rows:
        raise fileio.FormatError(
            f"no rows for quantity {args.quantity!r} tau={args.tau}")
    fit = fit_exponent(rows, weighting=args.weighting)
    Path(args.out + ".json").write_text(fileio.fit_json(fit))
    Path(args.out + ".gp").write_text(
        fileio.gnuplot_script(rows, fit, args.quantity, args.input))
    fileio.write_manifest([args.out + ".json", args.out + ".gp"], "fit",
                          {"in": args.input, "quantity": args.quantity,
                           "tau": args.tau, "weighting": args.weighting},
                          None, args.out + ".manifest.json")
    return 0


def _cmd_oracle(args) -> int:
    result = exact_enumeration(args.n, taus=args.tau)
    Path(args.out).write_text(fileio.oracle_json(result))
    fileio.write_manifest([args.out], "oracle",
                          {"n": args.n, "tau": list(args.tau)},
                          None, args.out + ".manifest.json")
    return 0


def _cmd_graph(args) -> int:
    from .boxgraph import VertexTuple, build_chain_graph, disjoint_box_family
    try:
        doc = json.loads(Path(args.tuple_file).read_text())
        n = args.n if args.n is not None else int(doc["n"])
        vertices = [tuple(map(int, v)) for v in doc["vertices"]]
    except (KeyError, ValueError, TypeError, json.JSONDecodeError) as exc:
        raise fileio.FormatError(f"bad tuple file: {exc}") from exc
    if args.tau is not None and len(vertices) != args.tau:
        raise fileio.FormatError(
            f"tuple has {len(vertices)} vertices, expected tau={args.tau}")
    tup = VertexTuple.build(n, vertices, c=doc.get("c"))
    graph = build_chain_graph(tup)
    if args.check:
        disjoint_box_family(graph)
    Path(args.out).write_text(fileio.graph_json(graph))
    fileio.write_manifest([args.out], "graph",
                          {"tuple_file": args.tuple_file, "n": n,
                           "check": bool(args.check)},
                          None, args.out + ".manifest.json")
    return 0


def _cmd_render(args) -> int:
    from .render import render_svg
    config = fileio.read_config(args.config)
    svg = render_svg(config, args.overlays)
    Path(args.out).write_text(svg)
    fileio.write_manifest([args.out], "render",
                          {"config": args.config, "overlays": args.overlays},
                          None, args.out + ".manifest.json")
    return 0


_COMMANDS = {
    "sample": _cmd_sample,
    "features": _cmd_features,
    "arms": _cmd_arms,
    "fit": _cmd_fit,
    "oracle": _cmd_oracle,
    "graph": _cmd_graph,
    "render": _cmd_render,
}


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return _COMMANDS[args.cmd](args)
    except (fileio.FormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (AssertionError, InterfaceError, RuntimeError) as exc:
        print(f"internal invariant violation: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
