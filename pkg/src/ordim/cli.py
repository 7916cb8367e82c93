"""Command-line entry point: ``ordim <command> ...``.

Exit codes: 0 success or valid, 1 refuted or invalid, 2 usage or input
error, 3 search budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import formats
from .adversary import Certificate, run_adversary
from .constructions import abstract_core, kelly, kelly_rec, standard_example
from .errors import OrdimError, Overflow
from .poset import antichain, chain, random_poset
from .ramsey import MonoBox, extract_mono_box, find_mono_box_exact, pram_bound
from .realizers import (
    kelly_boolean_realizer,
    kelly_local_realizer,
    verify_boolean_realizer,
    verify_local_realizer,
    verify_realizer,
)
from .solvers import Budget, bdim_decide, bdim_exact, dim_exact, ldim_exact
from .structure import (
    blocks,
    components,
    cover_graph,
    is_planar,
    kelly_tree_decomposition,
    verify_tree_decomposition,
)

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3

log = logging.getLogger("ordim")


def _count(text: str) -> int:
    """Integers that may be written in float notation, e.g. ``1e7``."""
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if value != int(value) or value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return int(value)


def _emit(args, payload: dict, text: str | None = None) -> None:
    if args.json:
        sys.stdout.write(formats.dumps(payload))
    elif text is not None:
        print(text)


def _write_or_print(path, payload: dict) -> None:
    if path:
        formats.write(path, payload)
    else:
        sys.stdout.write(formats.dumps(payload))


# -- gen ------------------------------------------------------------------------

def cmd_gen(args) -> int:
    kind = args.family
    if kind == "standard":
        out = formats.poset_to_dict(standard_example(args.n))
    elif kind == "kelly":
        P = kelly(args.n) if args.d == 1 else kelly_rec(args.n, args.d)
        out = formats.poset_to_dict(P)
    elif kind == "core":
        out = formats.poset_to_dict(abstract_core(args.n, args.d))
    elif kind == "chain":
        out = formats.poset_to_dict(chain(args.n))
    elif kind == "antichain":
        out = formats.poset_to_dict(antichain(args.n))
    elif kind == "random":
        out = formats.poset_to_dict(random_poset(args.n, args.p, args.seed))
    elif kind == "kelly-local":
        out = formats.local_realizer_to_dict(kelly_local_realizer(args.n))
    else:  # kelly-boolean
        out = formats.boolean_realizer_to_dict(kelly_boolean_realizer(args.n))
    _write_or_print(args.output, out)
    return EXIT_OK


# -- verify ---------------------------------------------------------------------

def cmd_verify(args) -> int:
    P = formats.load_poset(args.poset)
    data = formats.read(args.realizer)
    if args.what == "realizer":
        report = verify_realizer(P, formats.realizer_from_dict(data))
        extra = {}
    elif args.what == "local":
        report = verify_local_realizer(P, formats.local_realizer_from_dict(data))
        extra = {"mu_max": report.mu_max}
    else:
        report = verify_boolean_realizer(P, formats.boolean_realizer_from_dict(data))
        extra = {}
    payload = {"kind": "verification", "valid": report.valid, "reason": report.reason,
               "witness": list(report.witness) if report.witness else None, **extra}
    text = "valid" if report.valid else f"invalid: {report.reason} at {report.witness}"
    if report.valid and "mu_max" in extra:
        text += f" (mu_max = {extra['mu_max']})"
    _emit(args, payload, text)
    return EXIT_OK if report.valid else EXIT_NEGATIVE


# -- solve ------------------------------------------------------------------------

def cmd_solve(args) -> int:
    P = formats.load_poset(args.poset)
    budget = Budget(args.budget_nodes) if args.budget_nodes else Budget()
    if args.problem == "bdim" and args.k is not None:
        dec = bdim_decide(P, args.k, budget)
        payload = {"kind": "bdim_decision", "k": args.k, "status": dec.status, "nodes": dec.nodes}
        if dec.certificate is not None and args.certificate:
            formats.write(args.certificate, formats.boolean_realizer_to_dict(dec.certificate))
        _emit(args, payload, f"bdim <= {args.k}: {dec.status}")
        return {"yes": EXIT_OK, "no": EXIT_NEGATIVE}.get(dec.status, EXIT_BUDGET)
    solver = {"dim": dim_exact, "ldim": ldim_exact, "bdim": bdim_exact}[args.problem]
    res = solver(P, budget)
    payload = {"kind": f"{args.problem}_result", "lo": res.lo, "hi": res.hi,
               "value": res.value, "nodes": res.nodes}
    if args.certificate and res.certificate is not None:
        if args.problem == "dim":
            cert = formats.realizer_to_dict(res.certificate)
        elif args.problem == "ldim":
            cert = formats.local_realizer_to_dict(res.certificate)
        else:
            cert = formats.boolean_realizer_to_dict(res.certificate)
        formats.write(args.certificate, cert)
    text = f"{args.problem} = {res.value}" if res.exact else f"{args.problem} in [{res.lo}, {res.hi}] (budget exhausted)"
    _emit(args, payload, text)
    return EXIT_OK if res.exact else EXIT_BUDGET


# -- ramsey -----------------------------------------------------------------------

def cmd_ramsey(args) -> int:
    if args.action == "bound":
        try:
            value = pram_bound(args.r, args.t, args.m)
            payload = {"kind": "pram_bound", "r": args.r, "t": args.t, "m": args.m, "value": value}
            text = str(value)
        except Overflow as exc:
            payload = {"kind": "pram_bound", "r": args.r, "t": args.t, "m": args.m,
                       "value": None, "expression": exc.expression}
            text = f"overflow: {exc.expression}"
        _emit(args, payload, text)
        return EXIT_OK
    g = formats.grid_from_dict(formats.read(args.grid))
    box = find_mono_box_exact(g, args.m) if args.exact else extract_mono_box(g, args.m)
    if box is None:
        payload = {"kind": "mono_box", "found": False}
        _emit(args, payload, "no monochromatic box")
        return EXIT_NEGATIVE
    payload = formats.box_to_dict(box)
    if isinstance(box, MonoBox):
        _emit(args, payload, f"color {box.color}: " + " x ".join(str(list(s)) for s in box.subsets))
        return EXIT_OK
    _emit(args, payload, f"size insufficient at stage {box.stage}; {box.required} would suffice")
    return EXIT_NEGATIVE


# -- adversary -------------------------------------------------------------------

def cmd_adversary(args) -> int:
    ples = formats.local_realizer_from_dict(formats.read(args.realizer))
    targets = [int(x) for x in args.targets.split(",")] if args.targets else None
    if targets is not None and len(targets) != args.d - 1:
        raise OrdimError(f"--targets needs {args.d - 1} entries")
    run = run_adversary(args.n, args.d, ples, constructive=args.constructive_ramsey,
                        enforce_mu_bound=not args.no_mu_check, targets=targets)
    res = run.result
    if isinstance(res, Certificate):
        payload = {"kind": "adversary_certificate", "witness": res.witness,
                   "ple_indices": list(res.ple_indices), "trace": run.trace}
        _emit(args, payload, f"certificate: element {res.witness} lies in ples {list(res.ple_indices)}")
        code = EXIT_OK
    else:
        payload = {"kind": "adversary_failure", "stage": res.stage, "reason": res.reason,
                   "witness": res.witness, "required_size": res.required_size, "trace": run.trace}
        _emit(args, payload, f"failure at stage {res.stage}: {res.reason} {res.witness}")
        code = EXIT_NEGATIVE
    if args.output:
        formats.write(args.output, payload)
    return code


# -- structure --------------------------------------------------------------------

def cmd_structure(args) -> int:
    if args.action == "treedecomp":
        td = kelly_tree_decomposition(args.n, args.d)
        payload = formats.td_to_dict(td)
        if args.output:
            formats.write(args.output, payload)
        _emit(args, payload, f"{len(td.bags)} bags, width {td.width}")
        return EXIT_OK
    P = formats.load_poset(args.poset)
    if args.action == "components":
        comps = components(P)
        _emit(args, {"kind": "components", "components": comps}, "\n".join(map(str, comps)))
        return EXIT_OK
    if args.action == "blocks":
        bd = blocks(P)
        payload = {"kind": "blocks", "blocks": bd.blocks, "cut_vertices": bd.cut_vertices}
        text = f"{len(bd.blocks)} blocks, {len(bd.cut_vertices)} cut vertices"
        _emit(args, payload, text)
        return EXIT_OK
    if args.action == "planar":
        res = is_planar(cover_graph(P))
        payload = {"kind": "planarity", "planar": res.planar}
        if res.planar:
            payload["rotation"] = {str(k): v for k, v in res.embedding.items()}
        else:
            payload["kuratowski"] = {"kind": res.kind, "edges": sorted(sorted(e) for e in res.kuratowski.edges())}
        _emit(args, payload, "planar" if res.planar else f"not planar ({res.kind} subdivision)")
        return EXIT_OK if res.planar else EXIT_NEGATIVE
    # verify-td
    td = formats.td_from_dict(formats.read(args.td))
    rep = verify_tree_decomposition(cover_graph(P), td)
    payload = {"kind": "td_verification", "valid": rep.valid, "width": rep.width,
               "violation": list(rep.violation) if rep.violation else None}
    _emit(args, payload, f"valid, width {rep.width}" if rep.valid else f"invalid: {rep.violation}")
    return EXIT_OK if rep.valid else EXIT_NEGATIVE


def cmd_export(args) -> int:
    text = formats.to_dot(formats.load_poset(args.poset))
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# -- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the result as JSON")
    common.add_argument("--threads", type=int, default=1,
                        help="worker cap (searches run sequentially, so results never depend on it)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="ordim", description="Dimension-theory toolkit for finite posets.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="generate a poset or canned realizer")
    p.add_argument("family", choices=["standard", "kelly", "core", "chain", "antichain", "random",
                                      "kelly-local", "kelly-boolean"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--p", type=float, default=0.3, help="edge probability for random posets")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify", parents=[common], help="check a realizer against a poset")
    p.add_argument("what", choices=["realizer", "local", "boolean"])
    p.add_argument("poset")
    p.add_argument("realizer")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("solve", parents=[common], help="exact dim, ldim or bdim")
    p.add_argument("problem", choices=["dim", "ldim", "bdim"])
    p.add_argument("poset")
    p.add_argument("--budget-nodes", type=_count, default=None)
    p.add_argument("--certificate", help="write the certificate to this file")
    p.add_argument("--k", type=int, help="for bdim: decide bdim <= k only")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("ramsey", parents=[common], help="product Ramsey bounds and boxes")
    rsub = p.add_subparsers(dest="action", required=True)
    q = rsub.add_parser("bound", parents=[common])
    q.add_argument("-r", type=int, required=True)
    q.add_argument("-t", type=int, required=True)
    q.add_argument("-m", type=int, required=True)
    q.set_defaults(func=cmd_ramsey)
    q = rsub.add_parser("extract", parents=[common])
    q.add_argument("--grid", required=True)
    q.add_argument("-m", type=int, required=True)
    q.add_argument("--exact", action="store_true", help="exhaustive search instead of the constructive extractor")
    q.set_defaults(func=cmd_ramsey)

    p = sub.add_parser("adversary", parents=[common], help="run the stage adversary on a ple family")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--realizer", required=True)
    p.add_argument("--constructive-ramsey", action="store_true")
    p.add_argument("--no-mu-check", action="store_true", help="run the stages even if some point lies in d ples")
    p.add_argument("--targets", help="comma-separated box sizes for stages 1..d-1")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_adversary)

    p = sub.add_parser("structure", parents=[common], help="cover-graph structure")
    ssub = p.add_subparsers(dest="action", required=True)
    for name in ("blocks", "planar", "components"):
        q = ssub.add_parser(name, parents=[common])
        q.add_argument("poset")
        q.set_defaults(func=cmd_structure)
    q = ssub.add_parser("treedecomp", parents=[common])
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--d", type=int, default=1)
    q.add_argument("-o", "--output")
    q.set_defaults(func=cmd_structure)
    q = ssub.add_parser("verify-td", parents=[common])
    q.add_argument("poset")
    q.add_argument("td")
    q.set_defaults(func=cmd_structure)

    p = sub.add_parser("export", parents=[common], help="export a poset")
    p.add_argument("format", choices=["dot"])
    p.add_argument("poset")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_export)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.threads < 1:
        parser.error("--threads must be at least 1")
    try:
        return args.func(args)
    except (OrdimError, ValueError, KeyError, TypeError, OSError, json.JSONDecodeError) as exc:
        print(f"ordim: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
