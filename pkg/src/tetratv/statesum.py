"""The Turaev-Viro type state sum of an H-triangulation.

A state picks, for each edge class e, one of the r colors of I^{g(e)}
(g the coloring).  The weight of a state is

    prod_{e not in L} d(phi(e)) * prod_{e in L} b(phi(e))
    * prod_T N(T, phi) * prod_faces c_f(phi)

where N is the modified 6j-symbol of the colors read off a tetrahedron and
c_f is the contraction factor pairing the two reads of a face (1 / theta in
the aligned case, corrected by sigma scalars when the reads differ by a
rotation).  Everything is tabulated per tetrahedron and per face and the
states are summed in fixed-size chunks.
"""
from __future__ import annotations

import itertools
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import graded, simplicial, sixjcore
from .errors import NotAdmissible, Overflow
from .qarith import TRUNCATED, RootData, canon_mod, mod_dim

MAX_STATES = 10 ** 7
CHUNK = 1 << 15

# positions (a, b) with color phi(corner a -> corner b) for i, j, k, l, m, n
TET_EDGES = ((1, 0), (2, 1), (2, 0), (3, 2), (3, 0), (3, 1))
# which 6j face triple lies on the face opposite each corner
FACE_TRIPLE = {3: 0, 1: 1, 0: 2, 2: 3}


@dataclass
class TVOptions:
    max_states: int = MAX_STATES
    threads: int | None = None
    chunk: int = CHUNK


@dataclass
class TVResult:
    value: complex
    states: int
    surviving: int
    seconds: float

    @property
    def pruned(self) -> int:
        return self.states - self.surviving

    def to_json(self) -> dict:
        return {"value": [self.value.real, self.value.imag], "states": self.states,
                "pruned": self.pruned, "seconds": round(self.seconds, 3)}


def _threads(opt: TVOptions) -> int:
    if opt.threads:
        return max(1, int(opt.threads))
    env = os.environ.get("TETRATV_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def edge_colors(grade, rd: RootData):
    return graded.index_set(grade, rd).colors


def _oriented(tri, t, a, b):
    """(edge class, sign) of the oriented edge corner a -> corner b."""
    return tri.edge_id(t, a, b), tri.edge_sign(t, a, b)


def tet_colors(ht: simplicial.HTriangulation, t: int, state, rd: RootData):
    """(i, j, k, l, m, n) of tetrahedron t; ``state`` maps edge class -> color
    in the class orientation."""
    out = []
    for a, b in TET_EDGES:
        e, s = _oriented(ht.tri, t, a, b)
        c = complex(state[e])
        out.append(canon_mod(c if s > 0 else -c, 2 * rd.r))
    return tuple(out)


def face_read(colors6, face: int):
    return sixjcore.face_triples(colors6, TRUNCATED, None)[FACE_TRIPLE[face]]


def _tet_table(ht, t, palette, rd, backend):
    """N(T) over the color indices of its six edges, plus a 0/1 mask of
    states pruned by the height rule."""
    r = rd.r
    tri = ht.tri
    edges = [_oriented(tri, t, a, b) for a, b in TET_EDGES]
    classes = sorted({e for e, _ in edges})
    table = np.zeros((r,) * 6, dtype=complex)
    alive = np.zeros((r,) * 6, dtype=bool)
    for idx in itertools.product(range(r), repeat=len(classes)):
        pick = dict(zip(classes, idx))
        cols = []
        for e, s in edges:
            c = palette[e][pick[e]]
            cols.append(canon_mod(c if s > 0 else -c, 2 * r))
        pos = tuple(pick[e] for e, _ in edges)
        faces_ok = all(graded.truncated_dim(*tr, rd) for tr in sixjcore.face_triples(cols, TRUNCATED, rd))
        if not faces_ok or graded.lift_tetrahedron(cols, rd) is None:
            continue
        alive[pos] = True
        table[pos] = backend.sixj(tuple(cols))
    return [e for e, _ in edges], table, alive


def _face_table(ht, side_a, side_b, palette, rd, backend):
    """Contraction factor of one face over the indices of its three edges."""
    r = rd.r
    tri = ht.tri
    (ta, fa), (tb, fb) = side_a, side_b
    # the three edges of the face: all corners of tet ta except fa
    corners = simplicial.face_corners(fa)
    edges = [tri.edge_id(ta, x, y) for x, y in itertools.combinations(corners, 2)]
    classes = sorted(set(edges))
    table = np.zeros((r,) * 3, dtype=complex)
    for idx in itertools.product(range(r), repeat=len(classes)):
        pick = dict(zip(classes, idx))
        state = {e: palette[e][pick[e]] for e in classes}
        ra = _read_on_face(ht, ta, fa, state, rd)
        rb = _read_on_face(ht, tb, fb, state, rd)
        pos = tuple(pick[e] for e in edges)
        if not graded.truncated_dim(*ra, rd):
            continue
        term = sixjcore.Term(1.0 + 0j, [ra, rb])
        face = sixjcore.dual_read(ra, TRUNCATED, rd)
        table[pos] = sixjcore.contract(term, face, backend).coef
    return edges, table


def _read_on_face(ht, t, f, state, rd):
    cols = []
    for a, b in TET_EDGES:
        if f in (a, b):
            cols.append(0j)  # not on this face; unused by the read
            continue
        e, s = _oriented(ht.tri, t, a, b)
        c = complex(state[e])
        cols.append(canon_mod(c if s > 0 else -c, 2 * rd.r))
    read = face_read(cols, f)
    return tuple(canon_mod(c, 2 * rd.r) for c in read)


def tv(ht: simplicial.HTriangulation, rd: RootData | None = None, options: TVOptions | None = None,
       backend=None) -> TVResult:
    rd = rd or RootData(3)
    opt = options or TVOptions()
    t0 = time.perf_counter()
    tri, link, col = ht.tri, ht.link, ht.coloring
    if col is None or not simplicial.is_admissible(tri, col):
        raise NotAdmissible("the coloring must be an admissible cocycle (try `tri make-admissible`)")
    simplicial.validate(tri)
    simplicial.check_hamiltonian(tri, link)
    r = rd.r
    E = tri.nedge
    total_states = r ** E
    if total_states > opt.max_states:
        raise Overflow(f"{total_states} states exceed max_states={opt.max_states}")
    backend = backend or sixjcore.ComputedBackend(TRUNCATED, rd)
    palette = [edge_colors(g, rd) for g in col.values]
    weights = []
    for e in range(E):
        if e in link:
            weights.append(np.array([graded.b_weight(c, rd) for c in palette[e]], dtype=complex))
        else:
            weights.append(np.array([mod_dim(c, rd) for c in palette[e]], dtype=complex))
    tets = [_tet_table(ht, t, palette, rd, backend) for t in range(tri.ntet)]
    faces = [_face_table(ht, a, b, palette, rd, backend) for a, b in tri.faces]
    strides = r ** np.arange(E - 1, -1, -1)

    def flat(cols, states):
        out = np.zeros(len(states), dtype=np.int64)
        for c in cols:
            out = out * r + states[:, c]
        return out

    def chunk_sum(lo):
        hi = min(lo + opt.chunk, total_states)
        ids = np.arange(lo, hi, dtype=np.int64)
        states = (ids[:, None] // strides[None, :]) % r
        w = np.ones(len(ids), dtype=complex)
        alive = np.ones(len(ids), dtype=bool)
        for e in range(E):
            w *= weights[e][states[:, e]]
        for cols, table, mask in tets:
            k = flat(cols, states)
            alive &= mask.reshape(-1)[k]
            w *= table.reshape(-1)[k]
        for cols, table in faces:
            w *= table.reshape(-1)[flat(cols, states)]
        w[~alive] = 0
        return complex(w.sum()), int(alive.sum())

    starts = list(range(0, total_states, opt.chunk))
    nthreads = _threads(opt)
    if nthreads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=nthreads) as ex:
            parts = list(ex.map(chunk_sum, starts))
    else:
        parts = [chunk_sum(s) for s in starts]
    value = 0j
    surviving = 0
    for v, n in parts:  # fixed reduction order
        value += v
        surviving += n
    if surviving > opt.max_states:
        raise Overflow(f"{surviving} surviving states exceed max_states={opt.max_states}")
    return TVResult(value, total_states, surviving, time.perf_counter() - t0)


def state_weight(ht, state_idx, rd: RootData, backend=None, pruned_ok: bool = True) -> complex:
    """Weight of a single state (color indices per edge class) evaluated
    directly, without the height-rule shortcut; for spot checks."""
    backend = backend or sixjcore.ComputedBackend(TRUNCATED, rd)
    tri, col = ht.tri, ht.coloring
    palette = [edge_colors(g, rd) for g in col.values]
    state = {e: palette[e][state_idx[e]] for e in range(tri.nedge)}
    w = 1.0 + 0j
    for e in range(tri.nedge):
        c = state[e]
        w *= graded.b_weight(c, rd) if e in ht.link else mod_dim(c, rd)
    for t in range(tri.ntet):
        w *= sixjcore.modified_sixj(*tet_colors(ht, t, state, rd), flavor=TRUNCATED, rd=rd).value
    for (ta, fa), (tb, fb) in tri.faces:
        ra = _read_on_face(ht, ta, fa, state, rd)
        rb = _read_on_face(ht, tb, fb, state, rd)
        if not graded.truncated_dim(*ra, rd):
            return 0j
        term = sixjcore.Term(1.0 + 0j, [ra, rb])
        w *= sixjcore.contract(term, sixjcore.dual_read(ra, TRUNCATED, rd), backend).coef
    return w


def pruned_states(ht, rd: RootData, limit: int, rng):
    """Up to ``limit`` state index vectors that the height rule discards."""
    tri, col = ht.tri, ht.coloring
    palette = [edge_colors(g, rd) for g in col.values]
    r = rd.r
    out = []
    for _ in range(200 * limit):
        if len(out) >= limit:
            break
        idx = [int(x) for x in rng.integers(0, r, size=tri.nedge)]
        state = {e: palette[e][idx[e]] for e in range(tri.nedge)}
        if any(graded.lift_tetrahedron(tet_colors(ht, t, state, rd), rd) is None for t in range(tri.ntet)):
            out.append(idx)
    return out


# ---------------------------------------------------------------------------
# invariance under moves


def apply_move(ht, move: dict, rng):
    """Apply one scripted move; returns the new H-triangulation, repaired by
    make_admissible when the transported coloring lands in X."""
    kind = move["move"]
    args = {k: v for k, v in move.items() if k != "move"}
    try:
        if kind == "pachner_23":
            return simplicial.pachner_23(ht, args["tet"], args["face"])
        if kind == "pachner_32":
            return simplicial.pachner_32(ht, args["tet"], *args["corners"])
        if kind == "bubble_add":
            return simplicial.bubble_add(ht, args["tet"], args["face"], rng, args.get("link_edge"))
        if kind == "bubble_remove":
            return simplicial.bubble_remove(ht, args["vertex"])
        if kind == "lune_add":
            return simplicial.lune_add(ht, args["tet"], *args["corners"], steps=args.get("steps", 1))
        if kind == "lune_remove":
            return simplicial.lune_remove(ht, args["tet"], *args["corners"])
        if kind == "coboundary_shift":
            g = complex(*args["value"]) if isinstance(args["value"], list) else complex(args["value"])
            col = simplicial.coboundary_shift(ht.tri, ht.coloring, args["vertex"], g)
            return ht.with_coloring(col)
        if kind == "relabel":
            return simplicial.relabel(ht, [tuple(p) for p in args["perms"]])
        if kind == "make_admissible":
            col, _ = simplicial.make_admissible(ht.tri, ht.coloring, rng)
            return ht.with_coloring(col)
    except simplicial.AdmissibilityLost as exc:
        res = exc.result
        col, _ = simplicial.make_admissible(res.tri, res.coloring, rng)
        return res.with_coloring(col)
    raise ValueError(f"unknown move {kind!r}")


def find_site(ht, kind: str):
    """The first usable site for an automatic move of the given kind."""
    tri = ht.tri
    if kind == "pachner_23":
        for t in range(tri.ntet):
            for f in range(4):
                t2, f2, _ = tri.glue[t][f]
                if t2 != t and tri.vertex_of[t][f] != tri.vertex_of[t2][f2]:
                    return {"move": kind, "tet": t, "face": f}
    if kind == "pachner_32":
        for e in range(tri.nedge):
            if e in ht.link or tri.edge_degree(e) != 3:
                continue
            t, a, b = tri.edge_rep(e)
            cyc = tri.edge_cycle(t, a, b)
            if len({s[0] for s in cyc}) == 3:
                return {"move": kind, "tet": t, "corners": [a, b]}
    if kind == "bubble_add":
        for t in range(tri.ntet):
            for f in range(4):
                cs = simplicial.face_corners(f)
                if any(tri.edge_id(t, x, y) in ht.link for x, y in itertools.combinations(cs, 2)):
                    return {"move": kind, "tet": t, "face": f}
    if kind == "bubble_remove":
        counts: dict = {}
        for row in tri.vertex_of:
            for v in row:
                counts[v] = counts.get(v, 0) + 1
        for v in sorted(counts, reverse=True):
            if counts[v] == 2:
                return {"move": kind, "vertex": v}
    if kind == "lune_add":
        return {"move": kind, "tet": 0, "corners": [2, 3]}
    if kind == "lune_remove":
        for e in reversed(range(tri.nedge)):
            if e in ht.link or tri.edge_degree(e) != 2:
                continue
            t, a, b = tri.edge_rep(e)
            return {"move": kind, "tet": t, "corners": [a, b]}
    raise simplicial.BadSite(f"no site found for {kind}")


def tv_invariance_suite(ht, moves, rd: RootData | None = None, seed: int = 0,
                        options: TVOptions | None = None):
    """Apply the scripted moves one after another, recomputing tv.

    A move given as a bare name is placed at the first usable site.
    Returns a report with every value and the max relative deviation.
    """
    rd = rd or RootData(3)
    rng = np.random.default_rng(seed)
    cur = ht
    base = tv(cur, rd, options)
    values = [base.value]
    steps = [{"move": "initial", "value": [base.value.real, base.value.imag],
              "tetrahedra": cur.tri.ntet}]
    for mv in moves:
        if isinstance(mv, str):
            mv = find_site(cur, mv)
        cur = apply_move(cur, mv, rng)
        res = tv(cur, rd, options)
        values.append(res.value)
        steps.append({"move": mv["move"], "value": [res.value.real, res.value.imag],
                      "tetrahedra": cur.tri.ntet})
    scale = max(abs(v) for v in values) or 1.0
    dev = max(abs(a - b) for a in values for b in values) / scale
    return {"deviation": dev, "steps": steps, "final": cur}
