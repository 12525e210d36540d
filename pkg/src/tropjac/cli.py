"""Command-line front end: JSON/DOT I/O and reproducible run reports.

Exit codes: 0 success, 2 parse error, 3 graph invariant violation,
4 not a tree, 5 degenerate divisor, 6 out of supported range, 1 other.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
import time
from typing import Optional

from . import __version__
from .divisor import (
    Multidegree,
    make_divisor,
    multidegree,
    target_multidegree,
    tree_twist,
)
from .enumeration import brute_force_slopes, certified_bound, enumerate_slopes
from .errors import (
    DegenerateDivisor,
    GraphError,
    NotATree,
    OutOfSupportedRange,
    TropJacError,
)
from .graph import TropicalGraph, enumerate_stable_graphs, validate
from .rubber import (
    chain_curve,
    division_of,
    is_aligned,
    obstruction_ranks,
    rub_subdivision,
    subdivide_curve,
)

log = logging.getLogger("tropjac")

EXIT_OK = 0
EXIT_GENERIC = 1
EXIT_PARSE = 2
EXIT_GRAPH = 3
EXIT_NOT_A_TREE = 4
EXIT_DEGENERATE = 5
EXIT_RANGE = 6


class ParseFailure(Exception):
    pass


def _digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _read_json(path: str):
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
        return json.loads(raw.decode("utf-8")), _digest(raw)
    except (OSError, ValueError, UnicodeDecodeError) as exc:
        raise ParseFailure(f"cannot read JSON from {path}: {exc}") from exc


def _load_graph(path: str) -> tuple[TropicalGraph, str]:
    data, dig = _read_json(path)
    if not isinstance(data, dict):
        raise ParseFailure(f"{path}: top-level JSON object expected")
    return validate(data), dig


def _load_slopes(g: TropicalGraph, path: Optional[str]) -> dict[str, int]:
    if path is None:
        raise ParseFailure("a --slopes file is required")
    data, _ = _read_json(path)
    if isinstance(data, dict) and "slopes" in data:
        data = data["slopes"]
    if not isinstance(data, dict):
        raise ParseFailure(f"{path}: slope map expected")
    try:
        return {str(e): int(s) for e, s in data.items()}
    except (TypeError, ValueError) as exc:
        raise ParseFailure(f"{path}: integer slopes expected: {exc}") from exc


def _resolve_target(g: TropicalGraph, choice: str) -> Multidegree:
    if choice in ("zero", "canonical"):
        return target_multidegree(g, choice)
    data, _ = _read_json(choice)
    if not isinstance(data, dict):
        raise ParseFailure(f"{choice}: vertex->degree map expected")
    try:
        per = {str(v): int(x) for v, x in data.items()}
    except (TypeError, ValueError) as exc:
        raise ParseFailure(f"{choice}: integer degrees expected: {exc}") from exc
    missing = set(g.vertex_ids) - set(per)
    if missing:
        raise ParseFailure(f"{choice}: missing vertices {sorted(missing)}")
    return Multidegree(tuple((v, per[v]) for v in g.vertex_ids))


def _report(command: str, digest: str, results, started: float, out=None) -> None:
    body = {
        "command": command,
        "input_digest": digest,
        "tool_version": __version__,
        "results": results,
        "timing": {"seconds": round(time.monotonic() - started, 6)},
    }
    full = json.dumps(body, sort_keys=True, indent=2)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(full + "\n")
    print(full)


# -- commands ---------------------------------------------------------------

def cmd_validate(args, started) -> int:
    g, dig = _load_graph(args.path)
    if args.format == "dot":
        print(g.to_dot())
        return EXIT_OK
    results = {
        "vertices": len(g.vertices),
        "edges": len(g.edges),
        "legs": len(g.legs),
        "b1": g.b1,
        "genus": g.genus,
        "stable": g.is_stable(),
        "graph": g.to_json(),
    }
    _report("validate", dig, results, started, args.out)
    return EXIT_OK


def cmd_twist(args, started) -> int:
    g, dig = _load_graph(args.path)
    target = _resolve_target(g, args.target)
    d = tree_twist(g, target)
    results = {
        "target": target.to_json(),
        "divisor": d.to_json(),
        "multidegree": multidegree(d).to_json(),
    }
    _report("twist", dig, results, started, args.out)
    return EXIT_OK


def cmd_degree(args, started) -> int:
    g, dig = _load_graph(args.path)
    slopes = _load_slopes(g, args.slopes)
    d = make_divisor(g, slopes)
    results = {"multidegree": multidegree(d).to_json(), "divisor": d.to_json()}
    _report("degree", dig, results, started, args.out)
    return EXIT_OK


def cmd_enumerate(args, started) -> int:
    g, dig = _load_graph(args.path)
    target = _resolve_target(g, args.target)
    assignments = enumerate_slopes(g, target)
    results = {
        "target": target.to_json(),
        "count": len(assignments),
        "nondegenerate_count": sum(1 for a in assignments if a.nondegenerate),
        "relationless_count": sum(1 for a in assignments if a.relationless),
        "assignments": [a.to_json() for a in assignments],
        "certified_bound": certified_bound(g, target),
    }
    if args.oracle is not None:
        oracle = brute_force_slopes(g, target, args.oracle)
        results["oracle_bound"] = args.oracle
        results["oracle_equal"] = oracle == assignments
    _report("enumerate", dig, results, started, args.out)
    return EXIT_OK


def cmd_minmonoid(args, started) -> int:
    g, dig = _load_graph(args.path)
    slopes = _load_slopes(g, args.slopes)
    d = make_divisor(g, slopes)
    results = {
        "base": d.base.to_json(),
        "degenerate_edges": sorted(d.degenerate_edges),
        "sharp": d.sharp,
        "relationless": d.relationless,
    }
    _report("minmonoid", dig, results, started, args.out)
    return EXIT_OK


def cmd_align(args, started) -> int:
    g, dig = _load_graph(args.path)
    slopes = _load_slopes(g, args.slopes)
    d = make_divisor(g, slopes)
    results = {"aligned": is_aligned(d)}
    _report("align", dig, results, started, args.out)
    return EXIT_OK


def cmd_subdivide(args, started) -> int:
    g, dig = _load_graph(args.path)
    slopes = _load_slopes(g, args.slopes)
    d = make_divisor(g, slopes)
    fan = rub_subdivision(d)
    _report("subdivide", dig, {"fan": fan.to_json()}, started, args.out)
    return EXIT_OK


def _rubber_pipeline(g: TropicalGraph, slopes: dict[str, int]) -> dict:
    d = make_divisor(g, slopes)
    if d.degenerate_edges:
        raise DegenerateDivisor(
            f"degenerate edges {sorted(d.degenerate_edges)} admit no rubber model"
        )
    fan = rub_subdivision(d)
    cells_out = []
    for cell in fan.maximal_cells():
        dv = division_of(d, cell)
        chain = chain_curve(dv)
        rd = subdivide_curve(d, cell)
        cells_out.append(
            {
                "cell": cell.to_json(),
                "division": dv.to_json(),
                "chain": chain.to_json(),
                "rubber": rd.to_json(),
                "ranks": obstruction_ranks(rd, g.genus, len(g.legs)),
            }
        )
    return {
        "aligned": is_aligned(d),
        "maximal_cells": len(fan.maximal_cells()),
        "cells": cells_out,
    }


def cmd_rubber(args, started) -> int:
    g, dig = _load_graph(args.path)
    slopes = _load_slopes(g, args.slopes)
    results = _rubber_pipeline(g, slopes)
    _report("rubber", dig, results, started, args.out)
    return EXIT_OK


def cmd_ranks(args, started) -> int:
    g, dig = _load_graph(args.path)
    slopes = _load_slopes(g, args.slopes)
    full = _rubber_pipeline(g, slopes)
    results = {
        "maximal_cells": full["maximal_cells"],
        "ranks": [c["ranks"] for c in full["cells"]],
    }
    _report("ranks", dig, results, started, args.out)
    return EXIT_OK


def cmd_catalog(args, started) -> int:
    graphs = enumerate_stable_graphs(args.genus, args.legs)
    dig = _digest(f"catalog:{args.genus},{args.legs}".encode())
    index = []
    if args.out:
        os.makedirs(args.out, exist_ok=True)
    for i, g in enumerate(graphs):
        name = f"g{args.genus}n{args.legs}_{i:03d}.json"
        blob = json.dumps(g.to_json(), sort_keys=True, indent=2)
        index.append({"file": name, "vertices": len(g.vertices), "edges": len(g.edges)})
        if args.out:
            with open(os.path.join(args.out, name), "w", encoding="utf-8") as fh:
                fh.write(blob + "\n")
            if args.format == "dot":
                with open(os.path.join(args.out, name[:-5] + ".dot"), "w", encoding="utf-8") as fh:
                    fh.write(g.to_dot() + "\n")
    results = {"count": len(graphs), "index": index}
    if args.out:
        with open(os.path.join(args.out, "index.json"), "w", encoding="utf-8") as fh:
            fh.write(json.dumps(results, sort_keys=True, indent=2) + "\n")
    _report("catalog", dig, results, started)
    return EXIT_OK


# -- entry point --------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tropjac", description=__doc__)
    p.add_argument("--seed", type=int, default=0, help="seed for randomized runs")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, **kw):
        sp = sub.add_parser(name, **kw)
        sp.set_defaults(fn=fn)
        sp.add_argument("--out", help="write the report or files here")
        sp.add_argument("--format", choices=("json", "dot"), default="json")
        return sp

    sp = add("validate", cmd_validate, help="check a graph JSON file")
    sp.add_argument("path")

    sp = add("twist", cmd_twist, help="solve the tree twist for a target multidegree")
    sp.add_argument("path")
    sp.add_argument("--target", default="zero")

    sp = add("degree", cmd_degree, help="multidegree of a slope assignment")
    sp.add_argument("path")
    sp.add_argument("--slopes", required=True)

    sp = add("enumerate", cmd_enumerate, help="enumerate slope assignments")
    sp.add_argument("path")
    sp.add_argument("--target", default="zero")
    sp.add_argument("--oracle", type=int, default=None, help="run the brute-force oracle with this bound")

    sp = add("minmonoid", cmd_minmonoid, help="minimal base monoid of a slope assignment")
    sp.add_argument("path")
    sp.add_argument("--slopes", required=True)

    sp = add("align", cmd_align, help="check alignment of a divisor")
    sp.add_argument("path")
    sp.add_argument("--slopes", required=True)

    sp = add("subdivide", cmd_subdivide, help="alignment subdivision fan")
    sp.add_argument("path")
    sp.add_argument("--slopes", required=True)

    sp = add("rubber", cmd_rubber, help="full rubber pipeline per maximal cell")
    sp.add_argument("path")
    sp.add_argument("--slopes", required=True)

    sp = add("ranks", cmd_ranks, help="obstruction rank bookkeeping")
    sp.add_argument("path")
    sp.add_argument("--slopes", required=True)

    sp = add("catalog", cmd_catalog, help="enumerate stable graphs")
    sp.add_argument("--genus", type=int, required=True)
    sp.add_argument("--legs", type=int, required=True)

    return p


def main(argv=None) -> int:
    level = os.environ.get("TROPJAC_LOG", "warn").upper()
    logging.basicConfig(level=getattr(logging, level if level != "WARN" else "WARNING", logging.WARNING))
    parser = _build_parser()
    args = parser.parse_args(argv)
    started = time.monotonic()
    try:
        return args.fn(args, started)
    except ParseFailure as exc:
        log.error("%s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except GraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GRAPH
    except NotATree as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_A_TREE
    except DegenerateDivisor as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except OutOfSupportedRange as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RANGE
    except TropJacError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GENERIC


if __name__ == "__main__":
    sys.exit(main())
