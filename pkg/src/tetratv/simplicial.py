"""Closed oriented triangulations with a Hamiltonian link and a G-coloring.

Tetrahedra are numbered 0..N-1; corners 0..3 of each one are listed in
positive order.  Face ``f`` of a tetrahedron is the face opposite corner
``f``.  A gluing sends face ``f`` of ``t`` to face ``f'`` of ``t'`` through a
corner permutation ``perm`` (``perm[x]`` is the image of corner ``x``, and
``perm[f] = f'``); orientation compatibility means ``perm`` is odd.

Vertex and edge classes are numbered by first appearance when scanning
tetrahedra and corners in order.  An edge class is oriented from its lower
numbered vertex to the higher one, which is well defined because every
edge has distinct ends.  Colorings store the grade of each edge class in
that orientation.

Moves return new objects; the local rebuild shared by all of them removes
some tetrahedra, adds new ones described by local vertex names and glues
them to the surviving faces by names.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import (
    AdmissibilityLost,
    BadSite,
    LinkObstruction,
    MissingEdge,
    NoLinkEdge,
    NotClosed,
    NotCocycle,
    NotHamiltonian,
    NotOrientable,
    NotQuasiRegular,
    ParseError,
)
from .graded import Grade, in_X

MARGIN = 1e-3


def perm_parity(p) -> int:
    p = list(p)
    sign = 1
    for a in range(len(p)):
        for b in range(a + 1, len(p)):
            if p[a] > p[b]:
                sign = -sign
    return sign


def face_corners(f: int):
    return tuple(c for c in range(4) if c != f)


class _UF:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


# ---------------------------------------------------------------------------
# triangulations


@dataclass(frozen=True, eq=False)
class Triangulation:
    ntet: int
    glue: tuple  # glue[t][f] = (t2, f2, perm) or None

    # ----- derived combinatorics
    @cached_property
    def vertex_of(self):
        uf = _UF()
        for t in range(self.ntet):
            for c in range(4):
                uf.find((t, c))
        for t in range(self.ntet):
            for f in range(4):
                g = self.glue[t][f]
                if g is None:
                    continue
                t2, _, perm = g
                for c in face_corners(f):
                    uf.union((t, c), (t2, perm[c]))
        ids: dict = {}
        out = []
        for t in range(self.ntet):
            row = []
            for c in range(4):
                root = uf.find((t, c))
                if root not in ids:
                    ids[root] = len(ids)
                row.append(ids[root])
            out.append(tuple(row))
        return tuple(out)

    @property
    def nvert(self) -> int:
        return 1 + max(v for row in self.vertex_of for v in row)

    @cached_property
    def _edges(self):
        uf = _UF()
        for t in range(self.ntet):
            for a, b in itertools.combinations(range(4), 2):
                uf.find((t, a, b))
        for t in range(self.ntet):
            for f in range(4):
                g = self.glue[t][f]
                if g is None:
                    continue
                t2, _, perm = g
                for a, b in itertools.combinations(face_corners(f), 2):
                    a2, b2 = perm[a], perm[b]
                    uf.union((t, a, b), (t2, min(a2, b2), max(a2, b2)))
        ids: dict = {}
        reps = []
        eid = {}
        for t in range(self.ntet):
            for a, b in itertools.combinations(range(4), 2):
                root = uf.find((t, a, b))
                if root not in ids:
                    ids[root] = len(ids)
                    reps.append((t, a, b))
                eid[(t, a, b)] = ids[root]
        return eid, tuple(reps)

    @property
    def nedge(self) -> int:
        return len(self._edges[1])

    def edge_id(self, t, a, b) -> int:
        return self._edges[0][(t, min(a, b), max(a, b))]

    def edge_rep(self, e):
        return self._edges[1][e]

    def edge_ends(self, e):
        t, a, b = self.edge_rep(e)
        u, v = self.vertex_of[t][a], self.vertex_of[t][b]
        return (min(u, v), max(u, v))

    def edge_sign(self, t, a, b) -> int:
        """+1 when corner a -> corner b agrees with the class orientation."""
        u, v = self.vertex_of[t][a], self.vertex_of[t][b]
        return 1 if u < v else -1

    def edges_of_tet(self, t):
        return [self.edge_id(t, a, b) for a, b in itertools.combinations(range(4), 2)]

    @cached_property
    def faces(self):
        """Face classes as ((t, f), (t2, f2)) with the first side minimal."""
        out = []
        for t in range(self.ntet):
            for f in range(4):
                g = self.glue[t][f]
                if g is None:
                    continue
                if (t, f) <= (g[0], g[1]):
                    out.append(((t, f), (g[0], g[1])))
        return tuple(out)

    def euler_characteristic(self) -> int:
        return self.nvert - self.nedge + len(self.faces) - self.ntet

    def edge_degree(self, e) -> int:
        return sum(1 for t in range(self.ntet) for x in self.edges_of_tet(t) if x == e)

    def edge_cycle(self, t, a, b):
        """The tetrahedra around the edge of corners a, b of t, as states
        (tet, a, b, c, d): exit through the face containing a, b, c."""
        c, d = (x for x in range(4) if x not in (a, b))
        start = (t, a, b, c, d)
        states = [start]
        cur = start
        for _ in range(4 * self.ntet + 4):
            tt, aa, bb, cc, dd = cur
            t2, f2, perm = self.glue[tt][dd]
            nxt = (t2, perm[aa], perm[bb], f2, perm[cc])
            if nxt == start:
                return states
            # the same cycle may be entered with a, b swapped
            if nxt[0] == start[0] and {nxt[1], nxt[2]} == {a, b} and nxt[3] == c:
                return states
            states.append(nxt)
            cur = nxt
        raise BadSite("edge cycle does not close")

    # ----- serialisation
    def to_json(self, link=None) -> dict:
        gl = []
        for (t, f), (t2, f2) in self.faces:
            perm = self.glue[t][f][2]
            gl.append({"tet": t, "face": f, "to_tet": t2, "to_face": f2,
                       "corner_map": [perm[c] for c in face_corners(f)]})
        out = {"tetrahedra": self.ntet, "gluings": gl}
        if link is not None:
            out["link"] = [{"tet": self.edge_rep(e)[0], "corners": list(self.edge_rep(e)[1:])}
                           for e in sorted(link)]
        return out


def make_triangulation(ntet: int, gluings) -> Triangulation:
    """Build from (t, f, t2, f2, perm4) records; each face glued once."""
    glue = [[None] * 4 for _ in range(ntet)]
    for t, f, t2, f2, perm in gluings:
        perm = tuple(int(x) for x in perm)
        for x, y in ((t, f), (t2, f2)):
            if not (0 <= x < ntet and 0 <= y < 4):
                raise ParseError(f"face ({x}, {y}) out of range")
        if sorted(perm) != [0, 1, 2, 3] or perm[f] != f2:
            raise ParseError(f"bad corner map for ({t}, {f}) -> ({t2}, {f2})")
        if (t, f) == (t2, f2):
            raise ParseError(f"face ({t}, {f}) glued to itself")
        inv = [0] * 4
        for x in range(4):
            inv[perm[x]] = x
        for (a, b, g) in ((t, f, (t2, f2, perm)), (t2, f2, (t, f, tuple(inv)))):
            old = glue[a][b]
            if old is not None and old != g:
                raise ParseError(f"face ({a}, {b}) glued twice")
            glue[a][b] = g
    return Triangulation(ntet, tuple(tuple(row) for row in glue))


def validate(tri: Triangulation):
    for t in range(tri.ntet):
        for f in range(4):
            if tri.glue[t][f] is None:
                raise NotClosed(f"face {f} of tetrahedron {t} is not glued")
    for t in range(tri.ntet):
        for f in range(4):
            if perm_parity(tri.glue[t][f][2]) != -1:
                raise NotOrientable(f"gluing of face ({t}, {f}) preserves orientation")
    for e in range(tri.nedge):
        t, a, b = tri.edge_rep(e)
        if tri.vertex_of[t][a] == tri.vertex_of[t][b]:
            raise NotQuasiRegular(f"edge {e} has both ends at vertex {tri.vertex_of[t][a]}")
    for t in range(tri.ntet):
        for a, b in itertools.combinations(range(4), 2):
            if tri.vertex_of[t][a] == tri.vertex_of[t][b]:
                raise NotQuasiRegular(f"tetrahedron {t} has a repeated vertex")
    return tri


def check_hamiltonian(tri: Triangulation, link):
    deg = [0] * tri.nvert
    for e in link:
        u, v = tri.edge_ends(e)
        deg[u] += 1
        deg[v] += 1
    bad = [v for v, d in enumerate(deg) if d != 2]
    if bad:
        raise NotHamiltonian(f"vertices {bad} do not lie on exactly two link edges")
    return link


# ---------------------------------------------------------------------------
# colorings


@dataclass(frozen=True, eq=False)
class Coloring:
    """Grades on edge classes in their canonical orientation."""

    values: tuple  # Grade per edge class

    def value(self, tri: Triangulation, t, a, b) -> Grade:
        g = self.values[tri.edge_id(t, a, b)]
        return g if tri.edge_sign(t, a, b) > 0 else -g


def coloring_from_vertices(tri: Triangulation, vals) -> Coloring:
    """The coboundary of a vertex function: value(u -> v) = c(v) - c(u)."""
    out = []
    for e in range(tri.nedge):
        u, v = tri.edge_ends(e)
        out.append(Grade(complex(vals[v]) - complex(vals[u])))
    return Coloring(tuple(out))


def cocycle_residual(tri: Triangulation, col: Coloring) -> float:
    worst = 0.0
    for t in range(tri.ntet):
        for f in range(4):
            a, b, c = face_corners(f)
            s = col.value(tri, t, a, b) + col.value(tri, t, b, c) + col.value(tri, t, c, a)
            d = s.rep
            # distance of the class to 0 mod 2
            worst = max(worst, abs(d.imag), min(abs(d.real), abs(2 - d.real)))
    return worst


def cocycle_check(tri, col) -> bool:
    if len(col.values) != tri.nedge:
        raise MissingEdge("coloring does not cover every edge class")
    return cocycle_residual(tri, col) <= 1e-9


def far_from_X(g, margin: float = MARGIN) -> bool:
    z = Grade(g).rep
    return abs(z.imag) > margin or min(abs(z.real), abs(1 - z.real), abs(2 - z.real)) > margin


def is_admissible(tri, col) -> bool:
    return cocycle_check(tri, col) and not any(in_X(g) for g in col.values)


def bad_vertices(tri, col):
    bad = set()
    for e, g in enumerate(col.values):
        if in_X(g):
            bad.update(tri.edge_ends(e))
    return sorted(bad)


def coboundary_shift(tri, col: Coloring, vertex: int, g) -> Coloring:
    """col + delta(c) with c = g at ``vertex`` and 0 elsewhere."""
    out = list(col.values)
    for e in range(tri.nedge):
        u, v = tri.edge_ends(e)
        if v == vertex:
            out[e] = out[e] + g
        elif u == vertex:
            out[e] = out[e] - g
    return Coloring(tuple(out))


def _sample_grade(rng) -> complex:
    return complex(rng.uniform(0, 2), rng.uniform(-1, 1))


def make_admissible(tri, col: Coloring, rng, max_tries: int = 1000):
    """A cohomologous admissible coloring and the vertex shifts used."""
    if not cocycle_check(tri, col):
        raise NotCocycle("input coloring is not a cocycle")
    shifts = []
    bad = bad_vertices(tri, col)
    while bad:
        v = bad[0]
        incident = [e for e in range(tri.nedge) if v in tri.edge_ends(e)]
        for _ in range(max_tries):
            g = _sample_grade(rng)
            trial = coboundary_shift(tri, col, v, g)
            if all(far_from_X(trial.values[e]) for e in incident):
                break
        else:  # pragma: no cover - measure zero
            raise AdmissibilityLost("could not repair a bad vertex")
        col = trial
        shifts.append((v, g))
        nbad = bad_vertices(tri, col)
        assert len(nbad) < len(bad)
        bad = nbad
    return col, shifts


# ---------------------------------------------------------------------------
# H-triangulations


@dataclass(frozen=True, eq=False)
class HTriangulation:
    tri: Triangulation
    link: frozenset
    coloring: Coloring | None = None

    def with_coloring(self, col):
        return HTriangulation(self.tri, self.link, col)

    def validate(self):
        validate(self.tri)
        check_hamiltonian(self.tri, self.link)
        if self.coloring is not None and not cocycle_check(self.tri, self.coloring):
            raise NotCocycle("coloring is not a cocycle")
        return self

    def counts(self):
        t = self.tri
        return {"vertices": t.nvert, "edges": t.nedge, "faces": len(t.faces), "tetrahedra": t.ntet}


# ---------------------------------------------------------------------------
# file formats


def _load_json(src):
    if isinstance(src, (dict, list)):
        return src
    try:
        with open(src, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise ParseError(f"cannot open {src}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{src}: invalid JSON ({exc})") from exc


def parse_triangulation(data) -> tuple:
    try:
        n = int(data["tetrahedra"])
        recs = []
        for g in data["gluings"]:
            t, f, t2, f2 = int(g["tet"]), int(g["face"]), int(g["to_tet"]), int(g["to_face"])
            cm = [int(x) for x in g["corner_map"]]
            if len(cm) != 3:
                raise ParseError("corner_map needs three entries")
            perm = [0] * 4
            for c, img in zip(face_corners(f), cm):
                perm[c] = img
            perm[f] = f2
            recs.append((t, f, t2, f2, perm))
        link_recs = [(int(x["tet"]), [int(c) for c in x["corners"]]) for x in data.get("link", [])]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed triangulation: {exc}") from exc
    return n, recs, link_recs


def load_validate(src, link_src=None) -> HTriangulation:
    data = _load_json(src)
    n, recs, link_recs = parse_triangulation(data)
    if link_src is not None:
        link_recs = [(int(x["tet"]), [int(c) for c in x["corners"]]) for x in _load_json(link_src)]
    tri = make_triangulation(n, recs)
    validate(tri)
    link = set()
    for t, (a, b) in link_recs:
        if not (0 <= t < n) or a == b or not (0 <= a < 4 and 0 <= b < 4):
            raise ParseError(f"bad link edge {(t, a, b)}")
        link.add(tri.edge_id(t, a, b))
    link = frozenset(link)
    check_hamiltonian(tri, link)
    return HTriangulation(tri, link)


def load_cocycle(tri: Triangulation, src) -> Coloring:
    data = _load_json(src)
    vals: dict = {}
    try:
        for rec in data:
            t = int(rec["tet"])
            a, b = (int(c) for c in rec["corners"])
            re, im = rec["value"]
            g = Grade(complex(float(re), float(im)))
            lo, hi = min(a, b), max(a, b)
            e = tri.edge_id(t, lo, hi)
            if tri.edge_sign(t, lo, hi) < 0:
                g = -g
            if e in vals and not vals[e] == g:
                raise ParseError(f"conflicting values for edge class {e}")
            vals[e] = g
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed cocycle file: {exc}") from exc
    missing = [e for e in range(tri.nedge) if e not in vals]
    if missing:
        raise MissingEdge(f"no value for edge classes {missing}")
    return Coloring(tuple(vals[e] for e in range(tri.nedge)))


def cocycle_to_json(tri: Triangulation, col: Coloring):
    out = []
    for e in range(tri.nedge):
        t, a, b = tri.edge_rep(e)
        g = col.value(tri, t, a, b)
        out.append({"tet": t, "corners": [a, b],
                    "value": [round(g.rep.real, 15) + 0.0, round(g.rep.imag, 15) + 0.0]})
    return out


# ---------------------------------------------------------------------------
# the local rebuild behind every move


@dataclass
class _Port:
    """A surviving face whose old gluing is cut; ``names`` maps its corners."""

    tet: int
    face: int
    names: dict


@dataclass
class _Rebuild:
    removed: set
    new_tets: list                     # lists of 4 local names
    ports: list = field(default_factory=list)
    # (new tet, face names) -> port index, or (new tet, names) -> (new tet, names, name map)
    to_port: dict = field(default_factory=dict)
    pairs: list = field(default_factory=list)
    coords: dict | None = None         # name -> R^3 point, for orientation
    coord_ref: tuple | None = None     # (old tet, its corner names) to calibrate


def _det_sign(pts) -> int:
    a, b, c, d = (np.asarray(p, dtype=float) for p in pts)
    det = float(np.linalg.det(np.array([b - a, c - a, d - a])))
    if abs(det) < 1e-12:
        raise BadSite("degenerate local picture")
    return 1 if det > 0 else -1


def _apply_rebuild(tri: Triangulation, rb: _Rebuild):
    survivors = [t for t in range(tri.ntet) if t not in rb.removed]
    new_id = {t: s for s, t in enumerate(survivors)}
    base = len(survivors)
    tets = [list(n) for n in rb.new_tets]

    # orientation of the new tetrahedra
    if rb.coords is not None:
        ref_t, ref_names = rb.coord_ref
        flip = _det_sign([rb.coords[n] for n in ref_names])
        for T in tets:
            if _det_sign([rb.coords[n] for n in T]) * flip < 0:
                T[0], T[1] = T[1], T[0]
    else:
        _orient_by_ports(tri, rb, tets)

    glue = [[None] * 4 for _ in range(base + len(tets))]
    cut = {(p.tet, p.face) for p in rb.ports}
    for t in survivors:
        for f in range(4):
            if (t, f) in cut:
                continue
            t2, f2, perm = tri.glue[t][f]
            if t2 in rb.removed:
                continue
            glue[new_id[t]][f] = (new_id[t2], f2, perm)

    def face_of(T, names):
        (f,) = [c for c in range(4) if tets[T][c] not in names]
        return f

    for (T, names), pidx in rb.to_port.items():
        p = rb.ports[pidx]
        f = face_of(T, names)
        pos = {n: c for c, n in enumerate(tets[T])}
        perm = [0] * 4
        for corner, n in p.names.items():
            perm[pos[n]] = corner
        perm[f] = p.face
        inv = [0] * 4
        for x in range(4):
            inv[perm[x]] = x
        glue[base + T][f] = (new_id[p.tet], p.face, tuple(perm))
        glue[new_id[p.tet]][p.face] = (base + T, f, tuple(inv))
    for (T, names), (T2, names2, nmap) in rb.pairs:
        f, f2 = face_of(T, names), face_of(T2, names2)
        pos2 = {n: c for c, n in enumerate(tets[T2])}
        perm = [0] * 4
        for c, n in enumerate(tets[T]):
            if c != f:
                perm[c] = pos2[nmap.get(n, n)]
        perm[f] = f2
        inv = [0] * 4
        for x in range(4):
            inv[perm[x]] = x
        glue[base + T][f] = (base + T2, f2, tuple(perm))
        glue[base + T2][f2] = (base + T, f, tuple(inv))
    for row in glue:
        if any(g is None for g in row):
            raise BadSite("rebuild left an unglued face")
    new = Triangulation(len(glue), tuple(tuple(r) for r in glue))
    return new, new_id, [[*T] for T in tets], base


def _orient_by_ports(tri, rb: _Rebuild, tets):
    """Fix corner orders so that every gluing to a port (and between new
    tetrahedra) reverses orientation; propagates breadth first."""
    fixed = [False] * len(tets)
    adj = {}
    for (T, names), (T2, names2, nmap) in rb.pairs:
        adj.setdefault(T, []).append((T2, names, names2, nmap, False))
        inv = {v: k for k, v in nmap.items()}
        adj.setdefault(T2, []).append((T, names2, names, inv, False))

    def port_parity(T, names, p):
        f = next(c for c in range(4) if tets[T][c] not in names)
        pos = {n: c for c, n in enumerate(tets[T])}
        perm = [0] * 4
        for corner, n in p.names.items():
            perm[pos[n]] = corner
        perm[f] = p.face
        return perm_parity(perm)

    def pair_parity(T, names, T2, names2, nmap):
        f = next(c for c in range(4) if tets[T][c] not in names)
        f2 = next(c for c in range(4) if tets[T2][c] not in names2)
        pos2 = {n: c for c, n in enumerate(tets[T2])}
        perm = [0] * 4
        for c, n in enumerate(tets[T]):
            if c != f:
                perm[c] = pos2[nmap.get(n, n)]
        perm[f] = f2
        return perm_parity(perm)

    queue = []
    for (T, names), pidx in rb.to_port.items():
        if fixed[T]:
            continue
        if port_parity(T, names, rb.ports[pidx]) != -1:
            tets[T][0], tets[T][1] = tets[T][1], tets[T][0]
        fixed[T] = True
        queue.append(T)
    while queue:
        T = queue.pop(0)
        for T2, names, names2, nmap, _ in adj.get(T, []):
            if fixed[T2]:
                continue
            if pair_parity(T, names, T2, names2, nmap) != -1:
                tets[T2][0], tets[T2][1] = tets[T2][1], tets[T2][0]
            fixed[T2] = True
            queue.append(T2)
    if not all(fixed):
        raise BadSite("new tetrahedra not connected to the rest")


def _corner_names(tri, tets, internal):
    """Union-find names for the corners of ``tets`` joined across the listed
    internal faces (pairs of (tet, face))."""
    uf = _UF()
    for t in tets:
        for c in range(4):
            uf.find((t, c))
    for t, f in internal:
        t2, _, perm = tri.glue[t][f]
        for c in face_corners(f):
            uf.union((t, c), (t2, perm[c]))
    ids: dict = {}
    out = {}
    for t in tets:
        for c in range(4):
            root = uf.find((t, c))
            ids.setdefault(root, f"v{len(ids)}")
            out[(t, c)] = ids[root]
    return out


def _region_boundary(tri, region, names, internal, rb: _Rebuild):
    """Register the outer faces of the removed region as ports / pairs."""
    internal = set(internal) | {(tri.glue[t][f][0], tri.glue[t][f][1]) for t, f in internal}
    by_names = {}
    for t in sorted(region):
        for f in range(4):
            if (t, f) in internal:
                continue
            key = frozenset(names[(t, c)] for c in face_corners(f))
            if key in by_names:
                raise BadSite("two boundary faces of the move region share their vertices")
            by_names[key] = (t, f)
    seen = set()
    for key, (t, f) in by_names.items():
        t2, f2, perm = tri.glue[t][f]
        if t2 in region:
            if (t, f) in seen:
                continue
            key2 = frozenset(names[(t2, c)] for c in face_corners(f2))
            nmap = {names[(t, c)]: names[(t2, perm[c])] for c in face_corners(f)}
            seen.add((t2, f2))
            rb.pairs.append((key, key2, nmap))
        else:
            pidx = len(rb.ports)
            rb.ports.append(_Port(t2, f2, {perm[c]: names[(t, c)] for c in face_corners(f)}))
            rb.to_port[key] = pidx
    return by_names


def _attach(rb: _Rebuild):
    """Resolve face-name keys against the new tetrahedra."""
    owners = {}
    for T, names in enumerate(rb.new_tets):
        for f in range(4):
            key = frozenset(n for c, n in enumerate(names) if c != f)
            owners.setdefault(key, []).append(T)
    to_port = {}
    for key, pidx in rb.to_port.items():
        own = owners.get(key, [])
        if len(own) != 1:
            raise BadSite("boundary face not matched by exactly one new face")
        to_port[(own[0], key)] = pidx
        owners[key] = []
    pairs = []
    for key, key2, nmap in rb.pairs:
        (T,) = owners[key]
        (T2,) = owners[key2]
        pairs.append(((T, key), (T2, key2, nmap)))
        owners[key] = []
        owners[key2] = []
    for key, own in owners.items():
        if not own:
            continue
        if len(own) != 2:
            raise BadSite("interior face of the new region not shared by two tetrahedra")
        pairs.append(((own[0], key), (own[1], key, {})))
    rb.to_port = to_port
    rb.pairs = pairs


# ----- transport of link and coloring


def _transport(old: HTriangulation, new_tri, new_id, tets, base, name_edges, new_values):
    """Map old edge data to the rebuilt triangulation.

    ``name_edges`` maps a frozenset of two local names to (old class, sign of
    the name order sorted lexicographically); ``new_values`` gives grades for
    name pairs of new edges, oriented from the first to the second name.
    """
    otri = old.tri
    inv_id = {v: k for k, v in new_id.items()}
    src = {}
    for e in range(new_tri.nedge):
        src[e] = set()
    for t in range(new_tri.ntet):
        for a, b in itertools.combinations(range(4), 2):
            e = new_tri.edge_id(t, a, b)
            if t < base:
                src[e].add(otri.edge_id(inv_id[t], a, b))
            else:
                key = frozenset((tets[t - base][a], tets[t - base][b]))
                if key in name_edges:
                    src[e].add(name_edges[key][0])
    link = {e for e, olds in src.items() if any(o in old.link for o in olds)}
    col = None
    if old.coloring is not None:
        vals = [None] * new_tri.nedge
        for e, olds in src.items():
            if olds:
                o = min(olds)
                g_old = old.coloring.values[o]
                same = _same_orientation(otri, o, new_tri, e, inv_id, tets, base, name_edges)
                vals[e] = g_old if same else -g_old
        for t in range(base, new_tri.ntet):
            T = tets[t - base]
            for a, b in itertools.combinations(range(4), 2):
                e = new_tri.edge_id(t, a, b)
                if vals[e] is not None:
                    continue
                g = new_values.get((T[a], T[b]))
                if g is None and (T[b], T[a]) in new_values:
                    g = -Grade(new_values[(T[b], T[a])])
                if g is None:
                    continue
                vals[e] = Grade(g) if new_tri.edge_sign(t, a, b) > 0 else -Grade(g)
        if any(v is None for v in vals):
            raise BadSite("coloring transport left an edge without value")
        col = Coloring(tuple(vals))
    return frozenset(link), col


def _same_orientation(otri, o, ntri, e, inv_id, tets, base, name_edges) -> bool:
    """Whether the canonical orientation of old class o matches new class e."""
    for t in range(ntri.ntet):
        for a, b in itertools.combinations(range(4), 2):
            if ntri.edge_id(t, a, b) != e:
                continue
            if t < base:
                ot = inv_id[t]
                if otri.edge_id(ot, a, b) != o:
                    continue
                return otri.edge_sign(ot, a, b) == ntri.edge_sign(t, a, b)
            T = tets[t - base]
            key = frozenset((T[a], T[b]))
            if key in name_edges and name_edges[key][0] == o:
                nfrom, _, osign = name_edges[key][1]
                sgn_new = ntri.edge_sign(t, a, b) if T[a] == nfrom else -ntri.edge_sign(t, a, b)
                return sgn_new == osign
    raise BadSite("lost track of an edge during transport")


def _name_edges(otri, tets, names):
    """Old edge classes seen by named corners: {names}: (class, (n1, n2, sign))."""
    out = {}
    for t in tets:
        for a, b in itertools.combinations(range(4), 2):
            key = frozenset((names[(t, a)], names[(t, b)]))
            e = otri.edge_id(t, a, b)
            val = (e, (names[(t, a)], names[(t, b)], otri.edge_sign(t, a, b)))
            if key in out and out[key][0] != e:
                raise BadSite("two old edges with the same local ends")
            out[key] = val
    return out


def _port_names(otri, ports, name_map):
    """Add the edges of port faces to ``name_map``."""
    for p in ports:
        cs = sorted(p.names)
        for a, b in itertools.combinations(cs, 2):
            key = frozenset((p.names[a], p.names[b]))
            e = otri.edge_id(p.tet, a, b)
            val = (e, (p.names[a], p.names[b], otri.edge_sign(p.tet, a, b)))
            if key in name_map and name_map[key][0] != e:
                raise BadSite("two old edges with the same local ends")
            name_map[key] = val
    return name_map


def _finish(old: HTriangulation, new_tri, link, col, strict_admissible=True):
    out = HTriangulation(new_tri, link, col)
    validate(new_tri)
    check_hamiltonian(new_tri, link)
    if col is not None:
        if not cocycle_check(new_tri, col):
            raise NotCocycle("transported coloring is not a cocycle")
        if strict_admissible and any(in_X(g) for g in col.values):
            err = AdmissibilityLost("a transported edge value lies in X")
            err.result = out
            raise err
    return out


def _grade_between(ht: HTriangulation, t, a, b) -> Grade:
    return ht.coloring.value(ht.tri, t, a, b)


# ---------------------------------------------------------------------------
# H-Pachner moves


def pachner_23(ht: HTriangulation, tet: int, face: int) -> HTriangulation:
    tri = ht.tri
    t2, f2, _ = tri.glue[tet][face]
    if t2 == tet:
        raise BadSite("the face is glued to its own tetrahedron")
    region = {tet, t2}
    names = _corner_names(tri, sorted(region), [(tet, face)])
    p, q = names[(tet, face)], names[(t2, f2)]
    abc = [names[(tet, c)] for c in face_corners(face)]
    if len(set(names.values())) != 5:
        raise BadSite("the two tetrahedra do not form a bipyramid")
    if tri.vertex_of[tet][face] == tri.vertex_of[t2][f2]:
        raise BadSite("the apexes coincide; the new edge would be a loop")
    a, b, c = abc
    rb = _Rebuild(removed=region, new_tets=[[a, b, p, q], [b, c, p, q], [c, a, p, q]])
    _region_boundary(tri, region, names, [(tet, face)], rb)
    rb.coords = {a: (1, 0, 0), b: (-0.5, 0.8660254, 0), c: (-0.5, -0.8660254, 0),
                 p: (0, 0, 1), q: (0, 0, -1)}
    rb.coord_ref = (tet, [names[(tet, x)] for x in range(4)])
    _attach(rb)
    new_tri, new_id, tets, base = _apply_rebuild(tri, rb)
    nmap = _name_edges(tri, sorted(region), names)
    new_vals = {}
    if ht.coloring is not None:
        new_vals[(p, q)] = (_grade_between(ht, tet, face, face_corners(face)[0])
                            + _grade_between(ht, t2, tri.glue[tet][face][2][face_corners(face)[0]], f2))
    link, col = _transport(ht, new_tri, new_id, tets, base, nmap, new_vals)
    return _finish(ht, new_tri, link, col)


def pachner_32(ht: HTriangulation, tet: int, a: int, b: int) -> HTriangulation:
    tri = ht.tri
    e = tri.edge_id(tet, a, b)
    if e in ht.link:
        raise LinkObstruction("the edge of a 3-2 move must not lie in the link")
    cyc = tri.edge_cycle(tet, a, b)
    if len(cyc) != 3 or len({s[0] for s in cyc}) != 3:
        raise BadSite(f"edge has {len(cyc)} incident tetrahedra; need three distinct ones")
    region = {s[0] for s in cyc}
    internal = [(s[0], s[4]) for s in cyc]
    names = _corner_names(tri, sorted(region), internal)
    if len(set(names.values())) != 5:
        raise BadSite("the three tetrahedra do not form a 3-2 configuration")
    p, q = names[(tet, a)], names[(tet, b)]
    ring = []
    for s in cyc:
        ring.append(names[(s[0], s[3])])
    x, y, z = ring
    if len({x, y, z}) != 3:
        raise BadSite("degenerate ring around the edge")
    rb = _Rebuild(removed=region, new_tets=[[x, y, z, p], [x, y, z, q]])
    _region_boundary(tri, region, names, internal, rb)
    rb.coords = {p: (0, 0, 1), q: (0, 0, -1), x: (1, 0, 0), y: (-0.5, 0.8660254, 0),
                 z: (-0.5, -0.8660254, 0)}
    rb.coord_ref = (tet, [names[(tet, c)] for c in range(4)])
    _attach(rb)
    new_tri, new_id, tets, base = _apply_rebuild(tri, rb)
    nmap = _name_edges(tri, sorted(region), names)
    nmap.pop(frozenset((p, q)))
    link, col = _transport(ht, new_tri, new_id, tets, base, nmap, {})
    return _finish(ht, new_tri, link, col, strict_admissible=False)


# ---------------------------------------------------------------------------
# H-bubble moves


def _pillow(tri, face_a, face_b, v_names, apex):
    """Rebuild inserting two tetrahedra (v1, v2, v3, apex) between two cut
    faces.  face_a / face_b are (tet, face, {corner: name})."""
    v1, v2, v3 = v_names
    rb = _Rebuild(removed=set(), new_tets=[[v1, v2, v3, apex], [v1, v2, v3, apex]])
    rb.ports = [_Port(*face_a), _Port(*face_b)]
    key = frozenset(v_names)
    rb.to_port = {(0, key): 0, (1, key): 1}
    for pair in itertools.combinations(v_names, 2):
        k = frozenset(pair + (apex,))
        rb.pairs.append(((0, k), (1, k, {})))
    return rb


def bubble_add(ht: HTriangulation, tet: int, face: int, rng, link_edge=None) -> HTriangulation:
    """Positive H-bubble on the face (tet, face).  ``link_edge`` is a pair of
    corners of ``tet`` naming the link edge v2v3 of that face (default: the
    first one found)."""
    tri = ht.tri
    corners = face_corners(face)
    if link_edge is None:
        cand = [pr for pr in itertools.combinations(corners, 2) if tri.edge_id(tet, *pr) in ht.link]
        if not cand:
            raise NoLinkEdge("the chosen face has no link edge")
        link_edge = cand[0]
    c2, c3 = link_edge
    if tri.edge_id(tet, c2, c3) not in ht.link:
        raise NoLinkEdge("the named edge is not in the link")
    (c1,) = [c for c in corners if c not in (c2, c3)]
    t2, f2, perm = tri.glue[tet][face]
    nm = {c1: "v1", c2: "v2", c3: "v3"}
    face_a = (tet, face, dict(nm))
    face_b = (t2, f2, {perm[c]: n for c, n in nm.items()})
    rb = _pillow(tri, face_a, face_b, ("v1", "v2", "v3"), "v")
    new_tri, new_id, tets, base = _apply_rebuild(tri, rb)
    name_map = _port_names(tri, rb.ports, {})
    new_vals = {}
    if ht.coloring is not None:
        g21 = _grade_between(ht, tet, c2, c1)
        g31 = _grade_between(ht, tet, c3, c1)
        for _ in range(1000):
            g = Grade(complex(rng.uniform(0, 2), rng.uniform(-1, 1)))
            vals = (g, g21 + g, g31 + g)
            if all(far_from_X(x) for x in vals):
                break
        new_vals = {("v1", "v"): vals[0], ("v2", "v"): vals[1], ("v3", "v"): vals[2]}
    link, col = _transport(ht, new_tri, new_id, tets, base, name_map, new_vals)
    # the link edge v2v3 is replaced by v v2 and v v3
    link = set(link)
    for t in range(base, new_tri.ntet):
        T = tets[t - base]
        pos = {n: c for c, n in enumerate(T)}
        old_link_edge = new_tri.edge_id(t, pos["v2"], pos["v3"])
        link.add(new_tri.edge_id(t, pos["v2"], pos["v"]))
        link.add(new_tri.edge_id(t, pos["v3"], pos["v"]))
    link.discard(old_link_edge)
    return _finish(ht, new_tri, frozenset(link), col)


def bubble_remove(ht: HTriangulation, vertex: int) -> HTriangulation:
    tri = ht.tri
    occ = [(t, c) for t in range(tri.ntet) for c in range(4) if tri.vertex_of[t][c] == vertex]
    if len(occ) != 2 or occ[0][0] == occ[1][0]:
        raise BadSite("vertex is not the center of a two-tetrahedron pillow")
    (t1, a1), (t2, a2) = occ
    for f in face_corners(a1):
        g = tri.glue[t1][f]
        if g[0] != t2:
            raise BadSite("pillow tetrahedra not glued along the faces at the vertex")
    inc = [e for e in range(tri.nedge) if vertex in tri.edge_ends(e)]
    if len(inc) != 3:
        raise BadSite("vertex must have exactly three edges")
    lk = [e for e in inc if e in ht.link]
    if len(lk) != 2:
        raise BadSite("vertex must lie on two link edges")
    # outer faces
    fa = (t1, a1)
    ga = tri.glue[t1][a1]
    gb = tri.glue[t2][a2]
    if ga[0] in (t1, t2) or gb[0] in (t1, t2):
        raise BadSite("the pillow is glued to itself")
    # corners of t1's base carry names through t1 -> outer A and t1 -> t2 -> outer B
    names1 = {c: f"w{c}" for c in face_corners(a1)}
    # t1 corner c equals t2 corner perm12[c] (through any face at the vertex)
    f0 = face_corners(a1)[0]
    perm12 = tri.glue[t1][f0][2]
    if any(tri.glue[t1][f][2] != perm12 for f in face_corners(a1)) or perm12[a1] != a2:
        raise BadSite("the two tetrahedra do not form a pillow")
    ta, fa_, perma = ga
    tb, fb_, permb = gb
    namesA = {perma[c]: names1[c] for c in names1}
    namesB = {permb[perm12[c]]: names1[c] for c in names1}
    # link check: the two link edges go to v2, v3; v2v3 must not be in the link yet
    ends = []
    for e in lk:
        u, v = tri.edge_ends(e)
        ends.append(v if u == vertex else u)
    w_of = {}
    for c in names1:
        w_of[tri.vertex_of[t1][c]] = c
    c2, c3 = w_of[ends[0]], w_of[ends[1]]
    base_edge = tri.edge_id(t1, c2, c3)
    if base_edge in ht.link:
        raise LinkObstruction("the base edge is already in the link")
    survivors = [t for t in range(tri.ntet) if t not in (t1, t2)]
    new_id = {t: s for s, t in enumerate(survivors)}
    glue = [[None] * 4 for _ in survivors]
    for t in survivors:
        for f in range(4):
            if (t, f) in ((ta, fa_), (tb, fb_)):
                continue
            t_, f_, p_ = tri.glue[t][f]
            glue[new_id[t]][f] = (new_id[t_], f_, p_)
    inv_b = {n: c for c, n in namesB.items()}
    perm = [0] * 4
    for c, n in namesA.items():
        perm[c] = inv_b[n]
    perm[fa_] = fb_
    inv = [0] * 4
    for x in range(4):
        inv[perm[x]] = x
    glue[new_id[ta]][fa_] = (new_id[tb], fb_, tuple(perm))
    glue[new_id[tb]][fb_] = (new_id[ta], fa_, tuple(inv))
    new_tri = Triangulation(len(glue), tuple(tuple(r) for r in glue))
    link, col = _transport_restrict(ht, new_tri, new_id, add_link_rep=(ta, *[
        next(c for c, n in namesA.items() if n == names1[cc]) for cc in (c2, c3)]),
        drop=set(lk))
    return _finish(ht, new_tri, link, col, strict_admissible=False)


def _transport_restrict(ht, new_tri, new_id, add_link_rep=None, drop=()):
    """Transport when the new triangulation only keeps old tetrahedra."""
    otri = ht.tri
    inv_id = {v: k for k, v in new_id.items()}
    olds = {e: set() for e in range(new_tri.nedge)}
    for t in range(new_tri.ntet):
        for a, b in itertools.combinations(range(4), 2):
            olds[new_tri.edge_id(t, a, b)].add((otri.edge_id(inv_id[t], a, b),
                                                otri.edge_sign(inv_id[t], a, b)
                                                * new_tri.edge_sign(t, a, b)))
    link = set()
    vals = []
    for e in range(new_tri.nedge):
        classes = {o for o, _ in olds[e]}
        inl = [o for o in classes if o in ht.link and o not in drop]
        if len(inl) > 1:
            raise LinkObstruction("two link edges would merge")
        if inl:
            link.add(e)
        if ht.coloring is not None:
            o, s = sorted(olds[e])[0]
            g = ht.coloring.values[o]
            vals.append(g if s > 0 else -g)
    if add_link_rep is not None:
        t, a, b = add_link_rep
        link.add(new_tri.edge_id(new_id[t], a, b))
    col = Coloring(tuple(vals)) if ht.coloring is not None else None
    return frozenset(link), col


# ---------------------------------------------------------------------------
# H-lune moves


def lune_add(ht: HTriangulation, tet: int, a: int, b: int, steps: int = 1) -> HTriangulation:
    """Positive lune on the edge of corners a, b of ``tet``.

    The two faces cut open are the face of ``tet`` through a, b by which the
    edge cycle enters it, and the face ``steps`` positions further around
    the edge.  A new edge cd joins their third vertices and ab is split in
    two; the copy on the side of ``tet`` keeps the link.
    """
    tri = ht.tri
    if a == b:
        raise BadSite("an edge needs two distinct corners")
    # state (t, a, b, c, d): enter t through the face opposite c, leave
    # through the face opposite d
    cyc = tri.edge_cycle(tet, a, b)
    deg = len(cyc)
    if not (1 <= steps < deg):
        raise BadSite(f"lune steps must be in [1, {deg - 1}]")
    t0, a0, b0, c0, d0 = cyc[0]
    tl, al, bl, cl, dl = cyc[steps - 1]
    # side 1 holds cyc[0 .. steps-1]
    fs_side1 = (t0, c0, {a0: "a", b0: "b", d0: "c"})
    g = tri.glue[t0][c0]
    fs_side2 = (g[0], g[1], {g[2][a0]: "a", g[2][b0]: "b", g[2][d0]: "c"})
    ft_side1 = (tl, dl, {al: "a", bl: "b", cl: "d"})
    g2 = tri.glue[tl][dl]
    ft_side2 = (g2[0], g2[1], {g2[2][al]: "a", g2[2][bl]: "b", g2[2][cl]: "d"})
    if tri.vertex_of[t0][d0] == tri.vertex_of[tl][cl]:
        raise BadSite("the new edge would be a loop")
    rb = _Rebuild(removed=set(), new_tets=[["a", "b", "c", "d"], ["a", "b", "c", "d"]])
    rb.ports = [_Port(*fs_side1), _Port(*ft_side1), _Port(*fs_side2), _Port(*ft_side2)]
    rb.to_port = {(0, frozenset("abc")): 0, (0, frozenset("abd")): 1,
                  (1, frozenset("abc")): 2, (1, frozenset("abd")): 3}
    rb.pairs = [((0, frozenset("acd")), (1, frozenset("acd"), {})),
                ((0, frozenset("bcd")), (1, frozenset("bcd"), {}))]
    if len({(p.tet, p.face) for p in rb.ports}) != 4:
        raise BadSite("the two faces must be distinct and not glued to each other")
    new_tri, new_id, tets, base = _apply_rebuild(tri, rb)
    # old edges through named corners (ab from side 1 only for the link)
    name_map = _port_names(tri, rb.ports, {})
    new_vals = {}
    if ht.coloring is not None:
        new_vals[("c", "d")] = (_grade_between(ht, t0, d0, a0) + _grade_between(ht, tl, al, cl))
    link, col = _transport(ht, new_tri, new_id, tets, base, name_map, new_vals)
    e_old = tri.edge_id(t0, a0, b0)
    if e_old in ht.link:
        # keep the link on the copy of ab belonging to side 1
        link = set(link)
        t1 = base
        pos = {n: c for c, n in enumerate(tets[0])}
        t2b = base + 1
        pos2 = {n: c for c, n in enumerate(tets[1])}
        e1 = new_tri.edge_id(t1, pos["a"], pos["b"])
        e2 = new_tri.edge_id(t2b, pos2["a"], pos2["b"])
        side1 = new_tri.edge_id(new_id[t0], a0, b0)
        keep = e1 if e1 == side1 else e2
        link.discard(e1)
        link.discard(e2)
        link.add(keep)
        link = frozenset(link)
    return _finish(ht, new_tri, link, col)


def lune_remove(ht: HTriangulation, tet: int, a: int, b: int) -> HTriangulation:
    """Negative lune removing the degree two edge of corners a, b of ``tet``."""
    tri = ht.tri
    e = tri.edge_id(tet, a, b)
    if e in ht.link:
        raise LinkObstruction("the disappearing edge lies in the link")
    cyc = tri.edge_cycle(tet, a, b)
    if len(cyc) != 2 or cyc[0][0] == cyc[1][0]:
        raise BadSite("edge must have exactly two distinct incident tetrahedra")
    t1, _, _, c1, d1 = cyc[0]
    t2 = cyc[1][0]
    # t1: corners a, b (the edge cd of the pillow), c1, d1 (the split edge ab)
    # faces through c1, d1 and one of a, b go outside
    outer = [(t1, a), (t1, b)]
    p12 = tri.glue[t1][d1][2]
    if tri.glue[t1][c1][0] != t2 or tri.glue[t1][c1][2] != p12:
        raise BadSite("the two tetrahedra do not form a pillow")
    outer2 = [(t2, p12[a]), (t2, p12[b])]
    for t, f in outer + outer2:
        if tri.glue[t][f][0] in (t1, t2):
            raise BadSite("the pillow is glued to itself")
    e1 = tri.edge_id(t1, c1, d1)
    e2 = tri.edge_id(t2, p12[c1], p12[d1])
    if e1 == e2:
        raise BadSite("the two split copies are already one edge")
    if e1 in ht.link and e2 in ht.link:
        raise LinkObstruction("both copies of the split edge lie in the link")
    survivors = [t for t in range(tri.ntet) if t not in (t1, t2)]
    new_id = {t: s for s, t in enumerate(survivors)}
    glue = [[None] * 4 for _ in survivors]
    for t in survivors:
        for f in range(4):
            t_, f_, p_ = tri.glue[t][f]
            if t_ in (t1, t2):
                continue
            glue[new_id[t]][f] = (new_id[t_], f_, p_)
    for (ta, fa), (tb, fb) in zip(outer, outer2):
        oa, ofa, pa = tri.glue[ta][fa]      # pillow face -> outside A
        ob, ofb, pb = tri.glue[tb][fb]
        # corner identification: pillow t1 corner x <-> t2 corner p12[x]
        ia = {pa[x]: x for x in face_corners(fa)}          # outside A corner -> t1 corner
        perm = [0] * 4
        for ca, x in ia.items():
            perm[ca] = pb[p12[x]]
        perm[ofa] = ofb
        inv = [0] * 4
        for x in range(4):
            inv[perm[x]] = x
        if oa in (t1, t2) or ob in (t1, t2):
            raise BadSite("the pillow is glued to itself")
        glue[new_id[oa]][ofa] = (new_id[ob], ofb, tuple(perm))
        glue[new_id[ob]][ofb] = (new_id[oa], ofa, tuple(inv))
    new_tri = Triangulation(len(glue), tuple(tuple(r) for r in glue))
    link, col = _transport_restrict(ht, new_tri, new_id, drop={e})
    return _finish(ht, new_tri, link, col, strict_admissible=False)


# ---------------------------------------------------------------------------
# relabelling


def relabel(ht: HTriangulation, perms) -> HTriangulation:
    """Renumber corners of every tetrahedron t by the even permutation
    perms[t] (new corner = perms[t][old corner])."""
    tri = ht.tri
    for p in perms:
        if perm_parity(p) != 1:
            raise BadSite("relabelling must use even permutations")
    glue = []
    for t in range(tri.ntet):
        pt = perms[t]
        row = [None] * 4
        for f in range(4):
            t2, f2, perm = tri.glue[t][f]
            p2 = perms[t2]
            newperm = [0] * 4
            for x in range(4):
                newperm[pt[x]] = p2[perm[x]]
            row[pt[f]] = (t2, p2[f2], tuple(newperm))
        glue.append(tuple(row))
    new_tri = Triangulation(tri.ntet, tuple(glue))
    link = set()
    vals = [None] * new_tri.nedge
    for e in range(tri.nedge):
        t, a, b = tri.edge_rep(e)
        ne = new_tri.edge_id(t, perms[t][a], perms[t][b])
        if e in ht.link:
            link.add(ne)
        if ht.coloring is not None:
            g = ht.coloring.value(tri, t, a, b)
            s = new_tri.edge_sign(t, perms[t][a], perms[t][b])
            vals[ne] = g if s > 0 else -g
    col = Coloring(tuple(vals)) if ht.coloring is not None else None
    return _finish(ht, new_tri, frozenset(link), col, strict_admissible=False)


# ---------------------------------------------------------------------------
# coboundaries between colorings


def coboundary_between(tri: Triangulation, c1: Coloring, c2: Coloring):
    """Vertex values h with c2 - c1 = delta h (h = 0 on vertex 0), or None."""
    n = tri.nvert
    h = [None] * n
    h[0] = Grade(0)
    changed = True
    while changed:
        changed = False
        for e in range(tri.nedge):
            u, v = tri.edge_ends(e)
            diff = c2.values[e] - c1.values[e]
            if h[u] is not None and h[v] is None:
                h[v] = h[u] + diff
                changed = True
            elif h[v] is not None and h[u] is None:
                h[u] = h[v] - diff
                changed = True
    if any(x is None for x in h):
        return None
    for e in range(tri.nedge):
        u, v = tri.edge_ends(e)
        if not ((h[v] - h[u]) == (c2.values[e] - c1.values[e])):
            return None
    return h


def same_class(tri, c1, c2) -> bool:
    return coboundary_between(tri, c1, c2) is not None


# ---------------------------------------------------------------------------
# fixture


def s3_unknot_json() -> dict:
    """Two tetrahedra glued along their boundaries (S^3) with the 4-cycle
    v0 v1 v2 v3 as link.  Tet 1 carries the vertices (1, 0, 2, 3) so that the
    identity on vertex labels reverses orientation."""
    lab1 = (1, 0, 2, 3)
    pos1 = {v: c for c, v in enumerate(lab1)}
    gl = []
    for f in range(4):
        perm = [pos1[x] for x in range(4)]
        gl.append({"tet": 0, "face": f, "to_tet": 1, "to_face": perm[f],
                   "corner_map": [perm[c] for c in face_corners(f)]})
    link = [{"tet": 0, "corners": [0, 1]}, {"tet": 0, "corners": [1, 2]},
            {"tet": 0, "corners": [2, 3]}, {"tet": 0, "corners": [0, 3]}]
    return {"tetrahedra": 2, "gluings": gl, "link": link}


FIXTURE_VERTEX_VALUES = (0.3, 0.71, 1.19, 2.63)
