"""Authoring helper: search row layouts for the cut theta/tetrahedron graphs
and write them out as slice programs.

A layout is a left-to-right row of vertex coupons (each with a rotation of
its legs) plus the open input strand; the remaining edges must then close
up as non-crossing nested caps.  Coupon legs read left to right are the
vertex's cyclic order.  Run from the repo root:

    python3 tools/gen_programs.py src/tetratv/programs
"""
import itertools
import sys
from pathlib import Path

# graph name -> (coupons {name: [slot, slot, slot]}, edges {edge: (head, tail)})
# where head/tail are (coupon, leg index) and the legs carry colors e / e*.
GRAPHS = {
    "theta": (
        {"x": ["i", "j", "k"], "y": ["k*", "j*", "i*"]},
        {"i": (("x", 0), ("y", 2)), "j": (("x", 1), ("y", 1)), "k": (("x", 2), ("y", 0))},
    ),
    "tetra": (
        {
            "x1": ["i", "j", "k*"],
            "x2": ["k", "l", "m*"],
            "x3": ["n", "l*", "j*"],
            "x4": ["m", "n*", "i*"],
        },
        {
            "i": (("x1", 0), ("x4", 2)),
            "j": (("x1", 1), ("x3", 2)),
            "k": (("x2", 0), ("x1", 2)),
            "l": (("x2", 1), ("x3", 1)),
            "m": (("x4", 0), ("x2", 2)),
            "n": (("x3", 0), ("x4", 1)),
        },
    ),
}


def flip(s):
    return s[:-1] if s.endswith("*") else s + "*"


def layouts(coupons, edges, cut):
    head = edges[cut][0]
    others = [c for c in coupons if c != head[0]]
    for perm in itertools.permutations(others):
        for rots in itertools.product(range(3), repeat=len(others)):
            for inpos in range(1, len(others) + 2):
                items = [(head[0], head[1])] + list(zip(perm, rots))
                items.insert(inpos, ("IN", None))
                yield items


def solve(coupons, edges, cut):
    partner = {}
    for e, (h, t) in edges.items():
        if e == cut:
            partner[t] = "IN"
            partner["IN"] = t
        else:
            partner[h] = t
            partner[t] = h
    best = None
    for items in layouts(coupons, edges, cut):
        legs = []
        for name, rot in items:
            if name == "IN":
                legs.append(("IN", None))
            else:
                legs.extend((name, (rot + s) % 3) for s in range(3))
        out, rest = legs[0], legs[1:]
        if out != edges[cut][0]:
            continue
        stack = []
        ok = True
        for leg in rest:
            key = "IN" if leg[0] == "IN" else leg
            if stack and partner.get(stack[-1]) == key:
                stack.pop()
            else:
                stack.append(key)
        if stack:
            continue
        prog, width = emit(coupons, edges, cut, items, partner)
        if best is None or width < best[0]:
            best = (width, items, prog)
    return best


def leg_color(coupons, leg):
    name, idx = leg
    return coupons[name][idx]


def edge_of(edges, leg):
    for e, (h, t) in edges.items():
        if leg in (h, t):
            return e
    raise KeyError(leg)


def emit(coupons, edges, cut, items, partner):
    """Slice layers (lists of tokens) realising the layout."""
    row = [("IN", None)]
    layers = []
    processed = []  # stack of legs waiting for their partner

    def obj(leg):
        if leg[0] == "IN":
            return "V:" + cut
        return "V:" + leg_color(coupons, leg)

    def ids(objs):
        return ["id:" + o.split(":")[1] if o.startswith("V") else "idd:" + o.split(":")[1] for o in objs]

    def cap(left, right):
        nonlocal row
        p = row.index(left)
        assert row[p + 1] == right
        # the w coupon sits on the head end of the edge (the input strand is a head end)
        if left == ("IN", None):
            e, left_is_head = cut, True
        elif right == ("IN", None):
            e, left_is_head = cut, False
        else:
            e = edge_of(edges, left)
            left_is_head = edges[e][0] == left
        objs = [obj(x) for x in row]
        if left_is_head:
            layers.append(ids(objs[:p]) + [f"w:{e}={e}"] + ids(objs[p + 1:]))
            layers.append(ids(objs[:p]) + [f"d:{e}*={e}"] + ids(objs[p + 2:]))
        else:
            layers.append(ids(objs[:p + 1]) + [f"w:{e}={e}"] + ids(objs[p + 2:]))
            layers.append(ids(objs[:p]) + [f"dp:{e}*={e}"] + ids(objs[p + 2:]))
        row = row[:p] + row[p + 2:]

    def settle(leg):
        if processed and partner.get(processed[-1] if processed[-1][0] != "IN" else "IN") == (
            "IN" if leg[0] == "IN" else leg
        ):
            left = processed.pop()
            cap(left, leg)
        else:
            processed.append(leg)

    seen_in = False
    width = 1
    for name, rot in items:
        if name == "IN":
            seen_in = True
            settle(("IN", None))
            continue
        legs = [(name, (rot + s) % 3) for s in range(3)]
        pos = row.index(("IN", None)) if not seen_in else len(row)
        objs = [obj(x) for x in row]
        token = f"{name}@{rot}" if rot else name
        layers.append(ids(objs[:pos]) + [token] + ids(objs[pos:]))
        row = row[:pos] + legs + row[pos:]
        width = max(width, len(row))
        for leg in legs:
            if leg == edges[cut][0]:
                continue  # the output strand
            settle(leg)
    assert row == [edges[cut][0]], row
    return layers, width


def main(outdir):
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for gname, (coupons, edges) in GRAPHS.items():
        for cut in edges:
            found = solve(coupons, edges, cut)
            if found is None:
                raise SystemExit(f"no planar layout for {gname} cut {cut}")
            width, items, prog = found
            lines = [f"# {gname} graph cut open along edge {cut}",
                     "# layout: " + " ".join(n if n == "IN" else f"{n}@{r}" for n, r in items),
                     f"graph {gname}", f"cut {cut}"]
            for name, slots in coupons.items():
                lines.append(f"coupon {name} " + " ".join(slots))
            lines.append(f"input V:{cut}")
            lines.append(f"output V:{cut}")
            lines.extend("layer " + " ".join(layer) for layer in prog)
            (outdir / f"{gname}_{cut}.slice").write_text("\n".join(lines) + "\n")
            print(gname, cut, "width", width, "layers", len(prog))


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "src/tetratv/programs")
