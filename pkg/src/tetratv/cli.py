"""Command line interface: ``tetratv sixj | verify | tv | tri``.

Reports go to stdout as JSON, short summaries to stderr.  Exit codes:
0 success, 1 residual above tolerance, 2 input error, 3 precondition failure.
"""
from __future__ import annotations

import argparse
import json
import re
import sys

import numpy as np

from . import simplicial, sixjcore, statesum, suites
from .errors import InputError, ParseError, PreconditionError, TetraTVError
from .qarith import FLAVORS, UNROLLED, RootData, parse_complex

EXIT_OK, EXIT_BREACH, EXIT_INPUT, EXIT_PRECOND = 0, 1, 2, 3


def _cx(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _emit(obj, out=None):
    text = json.dumps(obj, indent=2, sort_keys=False)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    sys.stdout.write(text + "\n")


def _note(msg):
    sys.stderr.write(msg + "\n")


def _rd(args) -> RootData:
    try:
        return RootData(args.r, args.k)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def _colors(text, count=6):
    if text is None:
        raise ParseError("--colors is required")
    try:
        vals = [parse_complex(p) for p in text.split(",")]
    except ValueError as exc:
        raise ParseError(f"bad color list {text!r}: {exc}") from exc
    if len(vals) != count:
        raise ParseError(f"expected {count} colors, got {len(vals)}")
    return vals


# ---------------------------------------------------------------------------
# sixj


def cmd_sixj(args) -> int:
    rd = _rd(args)
    cols = _colors(args.colors)
    sv = sixjcore.modified_sixj(*cols, flavor=args.flavor, rd=rd)
    rep = sixjcore.goodness(sv.colors, args.flavor, rd)
    out = {
        "flavor": args.flavor,
        "r": rd.r,
        "k": rd.k,
        "colors": [_cx(c) for c in sv.colors],
        "value": _cx(sv.value),
        "zero": sv.is_zero(),
        "triples": [[_cx(c) for c in t] for t in sv.triples],
        "dims": list(sv.dims),
        "goodness": rep.classification(),
    }
    if args.flavor == UNROLLED and rd.r == 3 and rd.k == 1:
        out["table_r3"] = _cx(sixjcore.table_r3(*sv.colors, rd=rd))
    _emit(out, args.out)
    _note(f"6j = {sv.value:.12g} ({rep.classification()})")
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args) -> int:
    rd = _rd(args)
    if args.suite not in suites.SUITES:
        raise ParseError(f"unknown suite {args.suite!r}; choose from {sorted(suites.SUITES)}")
    rep = suites.run_suite(args.suite, rd, args.samples, args.seed, args.tol)
    _emit(rep, args.out)
    _note(f"{args.suite}: max residual {rep['max_residual']:.3e} "
          f"(tol {rep['tolerance']:.1e}) -> {'ok' if rep['pass'] else 'FAIL'}")
    return EXIT_OK if rep["pass"] else EXIT_BREACH


# ---------------------------------------------------------------------------
# triangulations


def _load(args, need_cocycle=True):
    if not args.tri:
        raise ParseError("--tri is required")
    ht = simplicial.load_validate(args.tri, getattr(args, "link", None))
    if getattr(args, "cocycle", None):
        ht = ht.with_coloring(simplicial.load_cocycle(ht.tri, args.cocycle))
    elif need_cocycle:
        raise ParseError("--cocycle is required")
    return ht


def _tri_report(ht):
    out = {"counts": ht.counts(), "euler": ht.tri.euler_characteristic(),
           "link_edges": len(ht.link)}
    if ht.coloring is not None:
        out["cocycle"] = simplicial.cocycle_check(ht.tri, ht.coloring)
        out["admissible"] = simplicial.is_admissible(ht.tri, ht.coloring)
        out["bad_vertices"] = simplicial.bad_vertices(ht.tri, ht.coloring)
    return out


def _write_tri(ht, prefix):
    tri_path, coc_path = f"{prefix}.json", f"{prefix}.cocycle.json"
    with open(tri_path, "w", encoding="utf-8") as fh:
        json.dump(ht.tri.to_json(ht.link), fh, indent=2)
        fh.write("\n")
    files = [tri_path]
    if ht.coloring is not None:
        with open(coc_path, "w", encoding="utf-8") as fh:
            json.dump(simplicial.cocycle_to_json(ht.tri, ht.coloring), fh, indent=2)
            fh.write("\n")
        files.append(coc_path)
    return files


_MOVE_RE = re.compile(r"^(?P<kind>[a-z0-9+\-_]+):(?P<site>.+)$")


def parse_move(text: str) -> dict:
    """``pachner23:tet0.face2``, ``pachner32:tet0.edge01``, ``bubble+:tet0.face2``,
    ``bubble-:vertex4``, ``lune+:tet0.edge01[.steps1]``, ``lune-:tet0.edge01``,
    ``shift:vertex0=0.3+0.1i``."""
    m = _MOVE_RE.match(text.strip())
    if not m:
        raise ParseError(f"bad move {text!r}")
    kind, site = m.group("kind"), m.group("site")
    fields = {}
    for part in site.split("."):
        mm = re.match(r"^(tet|face|vertex|steps)(\d+)$", part) or re.match(r"^(edge)(\d)(\d)$", part)
        if mm and mm.group(1) == "edge":
            fields["corners"] = [int(mm.group(2)), int(mm.group(3))]
        elif mm:
            fields[mm.group(1)] = int(mm.group(2))
        elif "=" in part or kind == "shift":
            continue
        else:
            raise ParseError(f"bad move site {part!r} in {text!r}")
    names = {"pachner23": "pachner_23", "pachner32": "pachner_32", "bubble+": "bubble_add",
             "bubble-": "bubble_remove", "lune+": "lune_add", "lune-": "lune_remove",
             "shift": "coboundary_shift"}
    if kind not in names:
        raise ParseError(f"unknown move kind {kind!r}")
    out = {"move": names[kind], **fields}
    if kind == "shift":
        mm = re.match(r"^vertex(\d+)=(.+)$", site)
        if not mm:
            raise ParseError(f"bad shift {text!r}")
        out["vertex"] = int(mm.group(1))
        out["value"] = _cx(parse_complex(mm.group(2)))
    need = {"pachner_23": ("tet", "face"), "pachner_32": ("tet", "corners"),
            "bubble_add": ("tet", "face"), "bubble_remove": ("vertex",),
            "lune_add": ("tet", "corners"), "lune_remove": ("tet", "corners"),
            "coboundary_shift": ("vertex", "value")}[out["move"]]
    for key in need:
        if key not in out:
            raise ParseError(f"move {text!r} lacks {key}")
    return out


def cmd_tri(args) -> int:
    sub = args.action
    if sub == "validate":
        if args.file and not args.tri:
            args.tri = args.file
        ht = _load(args, need_cocycle=False)
        rep = {"ok": True, **_tri_report(ht)}
        _emit(rep)
        _note("ok")
        return EXIT_OK
    ht = _load(args)
    rng = np.random.default_rng(args.seed)
    if sub == "make-admissible":
        col, shifts = simplicial.make_admissible(ht.tri, ht.coloring, rng)
        ht = ht.with_coloring(col)
        rep = {"shifts": [{"vertex": v, "value": _cx(g)} for v, g in shifts], **_tri_report(ht)}
    elif sub == "apply-move":
        if not args.move:
            raise ParseError("--move is required")
        ht = statesum.apply_move(ht, parse_move(args.move), rng)
        rep = {"move": args.move, **_tri_report(ht)}
    else:  # pragma: no cover - argparse restricts choices
        raise ParseError(f"unknown tri action {sub!r}")
    if args.out:
        rep["files"] = _write_tri(ht, args.out)
    else:
        rep["triangulation"] = ht.tri.to_json(ht.link)
        rep["cocycle_values"] = simplicial.cocycle_to_json(ht.tri, ht.coloring)
    _emit(rep)
    return EXIT_OK


# ---------------------------------------------------------------------------
# tv


def cmd_tv(args) -> int:
    rd = _rd(args)
    ht = _load(args)
    opts = statesum.TVOptions(max_states=args.max_states)
    if args.moves:
        try:
            with open(args.moves, encoding="utf-8") as fh:
                script = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot read move script {args.moves}: {exc}") from exc
        script = [parse_move(m) if isinstance(m, str) and ":" in m else m for m in script]
        rep = statesum.tv_invariance_suite(ht, script, rd, seed=args.seed, options=opts)
        out = {"deviation": rep["deviation"], "steps": rep["steps"], "tolerance": args.tol,
               "pass": bool(rep["deviation"] <= args.tol)}
        _emit(out, args.out)
        _note(f"max deviation {rep['deviation']:.3e}")
        return EXIT_OK if out["pass"] else EXIT_BREACH
    res = statesum.tv(ht, rd, opts)
    out = res.to_json()
    if not args.timing:
        out.pop("seconds")
    _emit(out, args.out)
    _note(f"TV = {res.value:.12g}  ({res.states} states, {res.pruned} pruned, {res.seconds:.2f}s)")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--r", type=int, default=3)
    common.add_argument("--k", type=int, default=1)
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int, default=None)
    common.add_argument("--max-states", dest="max_states", type=int, default=statesum.MAX_STATES)
    common.add_argument("--flavor", choices=FLAVORS, default=UNROLLED)
    common.add_argument("--colors")
    common.add_argument("--tri")
    common.add_argument("--cocycle")
    common.add_argument("--link")
    common.add_argument("--moves")
    common.add_argument("--out")

    p = argparse.ArgumentParser(prog="tetratv", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("sixj", parents=[common], help="evaluate one modified 6j-symbol")
    s.set_defaults(func=cmd_sixj)
    v = sub.add_parser("verify", parents=[common], help="run a residual suite")
    v.add_argument("--suite", required=True)
    v.set_defaults(func=cmd_verify)
    t = sub.add_parser("tv", parents=[common], help="state sum of an H-triangulation")
    t.add_argument("--timing", action="store_true", help="include wall time in the report")
    t.set_defaults(func=cmd_tv)
    tr = sub.add_parser("tri", parents=[common], help="validate / repair / move triangulations")
    tr.add_argument("action", choices=("validate", "make-admissible", "apply-move"))
    tr.add_argument("file", nargs="?")
    tr.add_argument("--move")
    tr.set_defaults(func=cmd_tri)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if args.command == "tv" and args.tol is None:
        args.tol = 1e-8
    try:
        return args.func(args)
    except InputError as exc:
        _note(f"input error ({type(exc).__name__}): {exc}")
        return EXIT_INPUT
    except PreconditionError as exc:
        _note(f"precondition failed ({type(exc).__name__}): {exc}")
        return EXIT_PRECOND
    except TetraTVError as exc:
        _note(f"error ({type(exc).__name__}): {exc}")
        return EXIT_PRECOND
    except OSError as exc:
        _note(f"input error: {exc}")
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
