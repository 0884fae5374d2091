"""Command line driver.

Every subcommand reads colored graphs as JSON objects ``{"n": n, "colors": [[...]]}``
(a Cartan bundle written by ``build-cartan`` is accepted too; its ``scheme`` is
used) and prints one JSON document with sorted keys.

Exit codes: 0 positive result, 1 negative but valid result, 2 input or budget error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .analysis import base_number, criterion_report, separability_certificate
from .cartan import VARIANTS, cartan_scheme
from .core import BudgetExceeded, CoherentConfiguration, ColoredGraph, InputError, verify_coherence
from .lie import FAMILIES, lie_bound_check
from .permgroup import DEFAULT_ORDER_BUDGET
from .recognition import MAX_NODES, MAX_POINTS, aut_group, iso_graphs, recognize_cartan
from .wl import m_extension, point_extension, wl_closure

OK, NEGATIVE, ERROR = 0, 1, 2


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def _read_json(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON ({exc.msg}, line {exc.lineno})") from exc
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc


def read_graph(path: str) -> ColoredGraph:
    obj = _read_json(path)
    if isinstance(obj, dict) and "scheme" in obj:
        obj = obj["scheme"]
    return ColoredGraph.from_json(obj)


def read_configuration(path: str) -> CoherentConfiguration:
    result = verify_coherence(read_graph(path))
    if not result:
        raise InputError(f"{path}: not a coherent configuration ({result.message}); run wl-close first")
    return result


def _emit(args, obj):
    text = dumps(obj)
    if getattr(args, "out", None):
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise InputError(f"{args.out}: {exc.strerror}") from exc
    else:
        sys.stdout.write(text)


def _points(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise InputError(f"bad point list {text!r}") from exc


def _positive(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _budget(args) -> dict:
    return {"max_points": args.max_degree, "max_nodes": args.max_nodes}


# -- subcommands ---------------------------------------------------------------

def cmd_build_cartan(args) -> int:
    variant = args.group or args.variant
    modulus = _points(args.modulus) if args.modulus else None
    bundle = cartan_scheme(args.q, variant, modulus)
    _emit(args, bundle.to_json())
    return OK


def cmd_wl_close(args) -> int:
    x, trace = wl_closure(read_graph(args.input))
    out = x.to_json()
    if args.trace:
        out["trace"] = trace.to_json()
    _emit(args, out)
    return OK


def cmd_extend(args) -> int:
    x = read_configuration(args.input)
    _emit(args, point_extension(x, _points(args.points)).to_json())
    return OK


def cmd_m_extend(args) -> int:
    x = read_configuration(args.input)
    _emit(args, m_extension(x, args.m, args.extension_budget).to_json())
    return OK


def cmd_analyze(args) -> int:
    x = read_configuration(args.input)
    points = _points(args.points) if args.points else None
    rep = criterion_report(x, points, base_cap=args.cap)
    out = rep.to_json()
    if args.separability:
        out["separability"] = separability_certificate(x, 2).to_json()
    _emit(args, out)
    return NEGATIVE if rep.violations else OK


def cmd_base_number(args) -> int:
    bn = base_number(read_configuration(args.input), args.cap)
    _emit(args, bn.to_json())
    return OK if bn.value is not None else NEGATIVE


def cmd_recognize(args) -> int:
    rep = recognize_cartan(read_graph(args.input), **_budget(args))
    if rep.group is not None and rep.group.order > args.max_order:
        raise BudgetExceeded("automorphism group exceeds order budget", rep.group.order, args.max_order)
    _emit(args, rep.to_json())
    return OK if rep.accepted else NEGATIVE


def cmd_iso(args) -> int:
    psi = _points(args.psi) if args.psi else None
    res = iso_graphs(read_graph(args.a), read_graph(args.b), psi, first_only=not args.all, **_budget(args))
    _emit(args, res.to_json(all_maps=args.all))
    return OK if res.isomorphisms else NEGATIVE


def cmd_aut(args) -> int:
    x, _ = wl_closure(read_graph(args.input))
    G = aut_group(x, **_budget(args))
    if G.order > args.max_order:
        raise BudgetExceeded("automorphism group exceeds order budget", G.order, args.max_order)
    out = {"order": G.order, "group": G.to_json()}
    if args.all:
        out["elements"] = G.elements.tolist()
    _emit(args, out)
    return OK


def cmd_lie_bound(args) -> int:
    rep = lie_bound_check(args.family, args.l, args.q)
    _emit(args, rep.to_json())
    return OK if rep.holds else NEGATIVE


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--out", help="write JSON here instead of stdout")
    common.add_argument("--threads", type=_positive, default=1,
                        help="worker cap (accepted for compatibility; all work is single-threaded)")
    common.add_argument("--max-order", type=_positive, default=DEFAULT_ORDER_BUDGET,
                        help="largest group order to enumerate (default %(default)s)")
    common.add_argument("--max-degree", type=_positive, default=MAX_POINTS,
                        help="largest point count for isomorphism search (default %(default)s)")
    common.add_argument("--max-nodes", type=_positive, default=MAX_NODES,
                        help="search-tree node budget for isomorphism search (default %(default)s)")
    common.add_argument("--extension-budget", type=_positive, default=1100,
                        help="largest point count of a 2-extension (default %(default)s)")

    p = argparse.ArgumentParser(prog="cohconf", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("build-cartan", parents=[common], help="Cartan scheme of SL(2,q) or a relative")
    s.add_argument("--q", type=int, required=True, help="field size, a prime power 4 <= q <= 32")
    s.add_argument("--variant", choices=VARIANTS, default="sl2", help="group acting (default %(default)s)")
    s.add_argument("--group", choices=VARIANTS, help="alias of --variant")
    s.add_argument("--modulus", help="defining polynomial coefficients, constant term first, comma separated")
    s.set_defaults(func=cmd_build_cartan)

    s = sub.add_parser("wl-close", parents=[common], help="coherent closure of a colored graph")
    s.add_argument("input", help="colored graph JSON, or - for stdin")
    s.add_argument("--trace", action="store_true", help="include the refinement trace")
    s.set_defaults(func=cmd_wl_close)

    s = sub.add_parser("extend", parents=[common], help="point extension")
    s.add_argument("input")
    s.add_argument("--points", required=True, help="comma separated points to individualize")
    s.set_defaults(func=cmd_extend)

    s = sub.add_parser("m-extend", parents=[common], help="2-extension on ordered pairs of points")
    s.add_argument("input")
    s.add_argument("--m", type=int, default=2, help="only 2 is supported")
    s.set_defaults(func=cmd_m_extend)

    s = sub.add_parser("analyze", parents=[common], help="indistinguishing number, s_max and base checks")
    s.add_argument("input")
    s.add_argument("--points", help="restrict per-point checks to these points")
    s.add_argument("--cap", type=_positive, default=5, help="base-number search cap (default %(default)s)")
    s.add_argument("--separability", action="store_true", help="also certify 2-separability")
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("base-number", parents=[common], help="least base size, up to a cap")
    s.add_argument("input")
    s.add_argument("--cap", type=_positive, default=5, help="largest base size tried (default %(default)s)")
    s.set_defaults(func=cmd_base_number)

    s = sub.add_parser("recognize", parents=[common], help="decide whether the input is a Cartan scheme")
    s.add_argument("input")
    s.set_defaults(func=cmd_recognize)

    s = sub.add_parser("iso", parents=[common], help="isomorphisms between two colored graphs")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--all", action="store_true", help="list every isomorphism")
    s.add_argument("--psi", help="color map as comma separated images of colors 0, 1, ...")
    s.set_defaults(func=cmd_iso)

    s = sub.add_parser("aut", parents=[common], help="automorphism group of the coherent closure")
    s.add_argument("input")
    s.add_argument("--all", action="store_true", help="list every element")
    s.set_defaults(func=cmd_aut)

    s = sub.add_parser("lie-bound", parents=[common], help="exact check of the class-size inequality")
    s.add_argument("--family", required=True, help=f"one of {', '.join(FAMILIES)} (E8, 2A etc.)")
    s.add_argument("--l", type=int, help="Lie rank (implied by exceptional families)")
    s.add_argument("--q", type=int, required=True)
    s.set_defaults(func=cmd_lie_bound)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return ERROR if exc.code else OK
    try:
        return args.func(args)
    except (InputError, BudgetExceeded) as exc:
        kind = "budget exceeded" if isinstance(exc, BudgetExceeded) else "input error"
        sys.stderr.write(f"cohconf: {kind}: {exc}\n")
        return ERROR


if __name__ == "__main__":
    sys.exit(main())
