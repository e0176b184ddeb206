"""Planar evaluation of the theta and tetrahedron graphs.

Invariant vectors of ``V_a (x) V_b (x) V_c`` are stored as flat arrays of
length r^3 (row-major in the three legs).  A vertex coupon whose legs read
``a, b, c`` from left to right holds a vector of ``H^{abc}``; rotating the
legs (first leg moved to the right end) is the map ``sigma``.

The graphs are described by slice programs in ``programs/*.slice``.  Each
non-comment line is one of::

    graph NAME            free-form name of the graph
    cut EDGE              edge along which the graph was cut open
    coupon NAME S1 S2 S3  vertex coupon and the color slots of its legs
    input OBJ ...         objects at the bottom of the diagram
    output OBJ ...        objects at the top
    layer TOKEN ...       one horizontal slice, read left to right

Objects are ``V:S`` (the module of slot S) or ``D:S`` (its dual).  A slot is
a color name, optionally followed by ``*`` for the dual color.  Tokens:

    id:S       identity of V:S          idd:S   identity of D:S
    NAME@p     vertex coupon NAME with legs rotated p steps (0 if omitted)
    w:S        w_S : V:S -> D:S*
    d:S        D:S (x) V:S -> 1          dp:S    V:S (x) D:S -> 1
    b:S        1 -> V:S (x) D:S          bp:S    1 -> D:S (x) V:S

Tokens may carry an edge tag ``=EDGE``; the pair ``w`` + ``d``/``dp`` with
the same tag is the cap closing that edge.  Layers are read bottom to top.
"""
from __future__ import annotations

import threading
from contextlib import contextmanager
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

import numpy as np

from .errors import DimAmbiguous, DimZero, NotScalar, ParseError, TypeMismatch
from .qarith import (
    DEFAULT_TOL,
    TRUNCATED,
    UNROLLED,
    RootData,
    color_key,
    is_integral,
    mod_dim,
)
from .repcat import (
    normalize_color,
    pivot_matrix,
    pivotal_w,
    tensor_all,
    typical_module,
)

SVD_CUTOFF = 1e-8
SCALAR_TOL = 1e-8

# ---------------------------------------------------------------------------
# invariant spaces and canonical vectors


@dataclass(frozen=True, eq=False)
class MultiplicityBasis:
    triple: tuple
    flavor: str
    basis: np.ndarray = field(repr=False)  # shape (dim, r^3), orthonormal rows
    canonical: np.ndarray | None = field(default=None, repr=False)
    # rough relative accuracy of the computed vectors (sigma_max / sigma_min * eps)
    accuracy: float = 0.0

    @property
    def dim(self) -> int:
        return self.basis.shape[0]


def _norm3(triple, flavor, rd):
    return tuple(normalize_color(c, flavor, rd) for c in triple)


def _key3(triple):
    return tuple(color_key(c) for c in triple)


def invariant_space(a, b, c, flavor, rd: RootData) -> MultiplicityBasis:
    t = _norm3((a, b, c), flavor, rd)
    return _invariant_space(_key3(t), flavor, rd)


@lru_cache(maxsize=65536)
def _invariant_space(key, flavor, rd: RootData) -> MultiplicityBasis:
    cols = tuple(complex(*k) for k in key)
    mods = [typical_module(c, flavor, rd) for c in cols]
    T = tensor_all(*mods)
    n = T.dim
    # K = 1 (and H = 0) cut out a coordinate subspace; impose E, F on it
    diagK = np.diag(T.K)
    keep = np.abs(diagK - 1) <= 1e-8
    if T.H is not None:
        keep &= np.abs(np.diag(T.H)) <= 1e-8
    idx = np.flatnonzero(keep)
    if idx.size == 0:
        basis = np.zeros((0, n), dtype=complex)
        return MultiplicityBasis(cols, flavor, basis, None)
    A = np.vstack([T.E[:, idx], T.F[:, idx]])
    A = A[np.any(A != 0, axis=1)]
    # equilibrate columns so that small components of the null vectors keep
    # their relative accuracy when weights have large imaginary parts
    cs = np.linalg.norm(A, axis=0)
    cs[cs == 0] = 1.0
    A = A / cs
    rs = np.linalg.norm(A, axis=1)
    A = A / rs[:, None]
    _, s, vh = np.linalg.svd(A, full_matrices=True)
    smax = s[0] if s.size and s[0] > 0 else 1.0
    rank = int(np.sum(s > SVD_CUTOFF * smax))
    null = vh[rank:].conj() / cs
    acc = 2.2e-16 * smax / s[rank - 1] if rank else 2.2e-16
    if null.shape[0]:
        null, _ = np.linalg.qr(null.T)
        null = null.T
    basis = np.zeros((null.shape[0], n), dtype=complex)
    basis[:, idx] = null
    canon = None
    if basis.shape[0] == 1:
        canon = _normalise(basis[0])
        canon.setflags(write=False)
    basis.setflags(write=False)
    return MultiplicityBasis(cols, flavor, basis, canon, float(acc))


def _normalise(v: np.ndarray) -> np.ndarray:
    mags = np.abs(v)
    lead = int(np.flatnonzero(mags > 1e-6 * mags.max())[0])
    return v / v[lead]


def triple_dim(a, b, c, flavor, rd: RootData) -> int:
    return invariant_space(a, b, c, flavor, rd).dim


# gauge hook: multipliers applied on top of the canonical normalisation.
_gauge: dict = {}
_gauge_lock = threading.Lock()
_cache_clearers: list = []


def register_cache(clear_fn):
    _cache_clearers.append(clear_fn)
    return clear_fn


def clear_caches():
    for fn in _cache_clearers:
        fn()


@contextmanager
def gauge_override(multipliers: dict, flavor, rd: RootData):
    """Temporarily rescale canonical vectors; keys are color triples."""
    with _gauge_lock:
        saved = dict(_gauge)
        for t, m in multipliers.items():
            _gauge[(_key3(_norm3(t, flavor, rd)), flavor, rd)] = complex(m)
        clear_caches()
    try:
        yield
    finally:
        with _gauge_lock:
            _gauge.clear()
            _gauge.update(saved)
            clear_caches()


def canonical_vector(a, b, c, flavor, rd: RootData) -> np.ndarray:
    sp = invariant_space(a, b, c, flavor, rd)
    if sp.dim == 0:
        raise DimZero(f"H({a}, {b}, {c}) = 0")
    if sp.dim > 1:
        raise DimAmbiguous(f"H({a}, {b}, {c}) has dimension {sp.dim}")
    if _gauge:
        m = _gauge.get((_key3(_norm3((a, b, c), flavor, rd)), flavor, rd))
        if m is not None:
            return sp.canonical * m
    return sp.canonical


def rotate_vector(x: np.ndarray, triple, flavor, rd: RootData, steps: int = 1):
    """sigma^steps on a vector of H^{triple}: the first leg moves to the right
    end and picks up the weight K^{r-1}."""
    r = rd.r
    x = np.asarray(x).reshape(r, r, r)
    t = list(triple)
    for _ in range(steps % 3):
        kappa = 1.0 / np.diag(pivot_matrix(typical_module(t[0], flavor, rd)))
        x = np.transpose(x * kappa[:, None, None], (1, 2, 0))
        t = t[1:] + t[:1]
    return x.reshape(-1)


def sigma(x, triple, flavor, rd: RootData) -> np.ndarray:
    """sigma(a,b,c) : H^{abc} -> H^{bca}."""
    return rotate_vector(x, triple, flavor, rd, 1)


def sigma_scalar(a, b, c, flavor, rd: RootData) -> complex:
    """s with sigma(x(a,b,c)) = s x(b,c,a)."""
    return _sigma_scalar(_key3(_norm3((a, b, c), flavor, rd)), flavor, rd)


@register_cache
def _clear_sigma():
    _sigma_scalar.cache_clear()


@lru_cache(maxsize=65536)
def _sigma_scalar(key, flavor, rd):
    a, b, c = (complex(*k) for k in key)
    x = canonical_vector(a, b, c, flavor, rd)
    y = canonical_vector(b, c, a, flavor, rd)
    sx = sigma(x, (a, b, c), flavor, rd)
    lead = int(np.argmax(np.abs(y)))
    return complex(sx[lead] / y[lead])


def rotation_scalar(triple, steps: int, flavor, rd: RootData) -> complex:
    """Scalar s with sigma^steps x(triple) = s x(rotated triple)."""
    t = tuple(triple)
    s = 1.0 + 0j
    for _ in range(steps % 3):
        s *= sigma_scalar(*t, flavor, rd)
        t = t[1:] + t[:1]
    return s


# ---------------------------------------------------------------------------
# slice programs


@dataclass(frozen=True)
class Token:
    kind: str
    slot: str = ""
    rot: int = 0
    tag: str = ""

    def text(self) -> str:
        if self.kind == "coupon":
            s = self.slot + (f"@{self.rot}" if self.rot else "")
        else:
            s = f"{self.kind}:{self.slot}"
        return s + (f"={self.tag}" if self.tag else "")


@dataclass(frozen=True, eq=False)
class SliceProgram:
    graph: str
    cut: str
    coupons: dict
    inputs: tuple
    outputs: tuple
    layers: tuple
    source: str = ""

    def text(self) -> str:
        lines = [f"graph {self.graph}", f"cut {self.cut}"]
        for name, slots in self.coupons.items():
            lines.append(f"coupon {name} " + " ".join(slots))
        lines.append("input " + " ".join(f"{k}:{s}" for k, s in self.inputs))
        lines.append("output " + " ".join(f"{k}:{s}" for k, s in self.outputs))
        for layer in self.layers:
            lines.append("layer " + " ".join(t.text() for t in layer))
        return "\n".join(lines) + "\n"


def simplify_slot(s: str) -> str:
    base = s.rstrip("*")
    return base + ("*" if (len(s) - len(base)) % 2 else "")


def dual_slot(s: str) -> str:
    return simplify_slot(s + "*")


_KINDS = {"id", "idd", "w", "d", "dp", "b", "bp"}


def _parse_obj(text, where):
    try:
        kind, slot = text.split(":")
    except ValueError:
        raise ParseError(f"{where}: bad object {text!r}") from None
    if kind not in ("V", "D"):
        raise ParseError(f"{where}: bad object kind {kind!r}")
    return (kind, simplify_slot(slot))


def _parse_token(text, coupons, where) -> Token:
    tag = ""
    if "=" in text:
        text, tag = text.split("=", 1)
    if ":" in text:
        kind, slot = text.split(":", 1)
        if kind not in _KINDS:
            raise ParseError(f"{where}: unknown block {kind!r}")
        return Token(kind, simplify_slot(slot), 0, tag)
    name, _, rot = text.partition("@")
    if name not in coupons:
        raise ParseError(f"{where}: unknown coupon {name!r}")
    return Token("coupon", name, int(rot) % 3 if rot else 0, tag)


def parse_program(text: str, source: str = "<string>") -> SliceProgram:
    graph = cut = ""
    coupons: dict = {}
    inputs: tuple = ()
    outputs: tuple = ()
    layers = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"{source}:{lineno}"
        head, *rest = line.split()
        if head == "graph":
            graph = rest[0]
        elif head == "cut":
            cut = rest[0]
        elif head == "coupon":
            if len(rest) != 4:
                raise ParseError(f"{where}: coupon needs a name and three slots")
            coupons[rest[0]] = tuple(simplify_slot(s) for s in rest[1:])
        elif head == "input":
            inputs = tuple(_parse_obj(t, where) for t in rest)
        elif head == "output":
            outputs = tuple(_parse_obj(t, where) for t in rest)
        elif head == "layer":
            layers.append(tuple(_parse_token(t, coupons, where) for t in rest))
        else:
            raise ParseError(f"{where}: unknown directive {head!r}")
    prog = SliceProgram(graph, cut, coupons, inputs, outputs, tuple(layers), source)
    typecheck(prog)
    return prog


def _block_io(tok: Token, coupons):
    s = tok.slot
    if tok.kind == "id":
        return [("V", s)], [("V", s)]
    if tok.kind == "idd":
        return [("D", s)], [("D", s)]
    if tok.kind == "coupon":
        slots = coupons[tok.slot]
        rot = tok.rot
        return [], [("V", slots[(rot + t) % 3]) for t in range(3)]
    if tok.kind == "w":
        return [("V", s)], [("D", dual_slot(s))]
    if tok.kind == "d":
        return [("D", s), ("V", s)], []
    if tok.kind == "dp":
        return [("V", s), ("D", s)], []
    if tok.kind == "b":
        return [], [("V", s), ("D", s)]
    if tok.kind == "bp":
        return [], [("D", s), ("V", s)]
    raise TypeMismatch(f"unknown token {tok}")


def typecheck(prog: SliceProgram):
    row = list(prog.inputs)
    for n, layer in enumerate(prog.layers):
        pos = 0
        new = []
        for tok in layer:
            ins, outs = _block_io(tok, prog.coupons)
            got = row[pos:pos + len(ins)]
            if got != ins:
                raise TypeMismatch(
                    f"{prog.source}: layer {n + 1} block {tok.text()} expects {ins}, found {got}"
                )
            pos += len(ins)
            new.extend(outs)
        if pos != len(row):
            raise TypeMismatch(f"{prog.source}: layer {n + 1} leaves {row[pos:]} unconsumed")
        row = new
    if tuple(row) != tuple(prog.outputs):
        raise TypeMismatch(f"{prog.source}: final objects {row} differ from declared {prog.outputs}")


def reverse_edge(prog: SliceProgram, edge: str) -> SliceProgram:
    """Rewrite the cap of ``edge`` so that its w coupon sits on the other end.

    This realises reversing the edge and dualising its color: the modules on
    the coupon legs stay the same, the cap becomes the other side of the
    w-compatibility equation.
    """
    if edge == prog.cut:
        raise ValueError("the cut edge cannot be reversed with this rewrite")
    layers = [list(layer) for layer in prog.layers]
    for n in range(len(layers) - 1):
        wpos = [p for p, t in enumerate(layers[n]) if t.kind == "w" and t.tag == edge]
        if not wpos:
            continue
        p = wpos[0]
        X = layers[n][p].slot
        nxt = layers[n + 1]
        if p < len(nxt) and nxt[p].kind == "d" and nxt[p].tag == edge:
            layers[n][p] = Token("id", X)
            layers[n][p + 1] = Token("w", dual_slot(X), 0, edge)
            nxt[p] = Token("dp", X, 0, edge)
        elif 0 < p <= len(nxt) and nxt[p - 1].kind == "dp" and nxt[p - 1].tag == edge:
            layers[n][p] = Token("id", X)
            layers[n][p - 1] = Token("w", dual_slot(X), 0, edge)
            nxt[p - 1] = Token("d", X, 0, edge)
        else:
            raise TypeMismatch(f"edge {edge}: cap pattern not recognised")
        out = SliceProgram(prog.graph, prog.cut, prog.coupons, prog.inputs, prog.outputs,
                           tuple(tuple(layer) for layer in layers), prog.source + f"~{edge}")
        typecheck(out)
        return out
    raise ValueError(f"edge {edge} has no cap in {prog.source}")


@lru_cache(maxsize=None)
def load_program(name: str) -> SliceProgram:
    path = resources.files("tetratv").joinpath("programs").joinpath(f"{name}.slice")
    return parse_program(path.read_text(), source=f"{name}.slice")


def program_names(graph: str):
    return {"theta": ("i", "j", "k"), "tetra": ("i", "j", "k", "l", "m", "n")}[graph]


# ---------------------------------------------------------------------------
# evaluation


class _Colors:
    def __init__(self, colors: dict, flavor, rd):
        self.colors = {k: normalize_color(v, flavor, rd) for k, v in colors.items()}
        self.flavor = flavor
        self.rd = rd

    def __call__(self, slot: str) -> complex:
        base = slot.rstrip("*")
        c = self.colors[base]
        return normalize_color(-c if slot.endswith("*") else c, self.flavor, self.rd)


def _block_tensors(tok: Token, prog, col: _Colors, coupon_vectors):
    """Tensor for one block; axes = outputs followed by inputs."""
    flavor, rd = col.flavor, col.rd
    r = rd.r
    if tok.kind in ("id", "idd"):
        return None
    if tok.kind == "coupon":
        slots = prog.coupons[tok.slot]
        x = coupon_vectors[tok.slot]
        if tok.rot:
            x = rotate_vector(x, [col(sl) for sl in slots], flavor, rd, tok.rot)
        return np.asarray(x).reshape(r, r, r)
    if tok.kind == "w":
        return pivotal_w(col(tok.slot), flavor, rd).matrix
    if tok.kind == "d":
        return np.eye(r, dtype=complex)
    if tok.kind == "dp":
        return pivot_matrix(typical_module(col(tok.slot), flavor, rd)).T.copy()
    if tok.kind == "b":
        return np.eye(r, dtype=complex)
    if tok.kind == "bp":
        return np.linalg.inv(pivot_matrix(typical_module(col(tok.slot), flavor, rd))).T.copy()
    raise TypeMismatch(str(tok))


def _network(prog: SliceProgram):
    """Translate the layers into einsum operand placeholders and index lists."""
    counter = iter(range(10**6))
    in_labels = [next(counter) for _ in prog.inputs]
    row = list(in_labels)
    ops = []  # (layer index, token index, index list)
    for n, layer in enumerate(prog.layers):
        pos = 0
        new = []
        for t_i, tok in enumerate(layer):
            ins, outs = _block_io(tok, prog.coupons)
            consumed = row[pos:pos + len(ins)]
            pos += len(ins)
            if tok.kind in ("id", "idd"):
                new.extend(consumed)
                continue
            out_labels = [next(counter) for _ in outs]
            ops.append((n, t_i, out_labels + consumed))
            new.extend(out_labels)
        row = new
    return ops, row, in_labels


@lru_cache(maxsize=None)
def _compiled(prog: SliceProgram):
    return _network(prog)


_path_cache: dict = {}


def _operands(prog, col, coupon_vectors):
    ops, out_labels, in_labels = _compiled(prog)
    args = []
    for n, t_i, labels in ops:
        tok = prog.layers[n][t_i]
        args.append(_block_tensors(tok, prog, col, coupon_vectors))
        args.append(labels)
    return args, list(out_labels) + list(in_labels), len(out_labels)


def _contract(prog, args, final, r):
    key = (id(prog), r)
    path = _path_cache.get(key)
    if path is None:
        path = np.einsum_path(*args, final, optimize="greedy")[0]
        _path_cache[key] = path
    return np.einsum(*args, final, optimize=path)


def eval_diagram(prog: SliceProgram, colors: dict, coupon_vectors: dict | None = None,
                 flavor=UNROLLED, rd: RootData | None = None, bound: bool = False):
    """Matrix of the diagram from its inputs to its outputs (leg-wise contraction).

    With ``bound=True`` also returns the same network evaluated on entrywise
    absolute values, which bounds the size of the summed terms.
    """
    col = _Colors(colors, flavor, rd)
    args, final, nout_legs = _operands(prog, col, coupon_vectors or {})
    if not args:
        n = rd.r ** len(prog.inputs)
        eye = np.eye(n, dtype=complex)
        return (eye, np.abs(eye)) if bound else eye
    res = _contract(prog, args, final, rd.r).reshape(rd.r ** nout_legs, -1)
    if not bound:
        return res
    absargs = [np.abs(a) if isinstance(a, np.ndarray) else a for a in args]
    ab = _contract(prog, absargs, final, rd.r).reshape(rd.r ** nout_legs, -1)
    return res, ab


class _PreciseColors:
    """Slot resolution with colors rebuilt in extended precision."""

    def __init__(self, colors: dict, flavor, rd):
        self.colors = colors
        self.flavor = flavor
        self.rd = rd

    def __call__(self, slot: str):
        from . import hiprec

        c = self.colors[slot.rstrip("*")]
        if slot.endswith("*"):
            c = -c
        if self.flavor == TRUNCATED:
            c = hiprec.canon_mod(c, 2 * self.rd.r)
        return c


def snap_colors(graph: str, colors: dict, flavor, rd: RootData) -> dict:
    """Extended precision colors satisfying the integer height relations of
    the graph exactly (double rounding breaks them at the 1e-16 level)."""
    from . import hiprec

    c = {k: hiprec._mpc(normalize_color(v, flavor, rd)) for k, v in colors.items()}

    def height(*terms):
        tot = sum(sign * complex(colors[name]) for sign, name in terms)
        return int(round(tot.real))

    if graph == "theta":
        h = height((1, "i"), (1, "j"), (1, "k"))
        c["k"] = h - c["i"] - c["j"]
    elif graph == "tetra":
        h1 = height((1, "i"), (1, "j"), (-1, "k"))
        h2 = height((1, "k"), (1, "l"), (-1, "m"))
        h3 = height((1, "n"), (-1, "l"), (-1, "j"))
        c["k"] = c["i"] + c["j"] - h1
        c["l"] = c["n"] - c["j"] - h3
        c["m"] = c["k"] + c["l"] - h2
    if flavor == TRUNCATED:
        c = {k: hiprec.canon_mod(v, 2 * rd.r) for k, v in c.items()}
    return c


def _precise_tensors(tok: Token, prog, col: _Colors, pcol: _PreciseColors, coupon_vectors):
    from . import hiprec
    from .repcat import _lex_larger

    flavor, rd = col.flavor, col.rd
    r = rd.r
    if tok.kind in ("id", "idd"):
        return None
    if tok.kind == "coupon":
        slots = prog.coupons[tok.slot]
        t = [col(sl) for sl in slots]
        pt = [pcol(sl) for sl in slots]
        x = np.asarray(coupon_vectors[tok.slot])
        canon = invariant_space(*t, flavor, rd).canonical
        lead = int(np.argmax(np.abs(canon)))
        alpha = hiprec._mpc(x[lead] / canon[lead])
        u = hiprec.refine_invariant(pt, canon, rd)
        u = (u * alpha).reshape(r, r, r)
        for _ in range(tok.rot):
            kappa = np.array([1 / p for p in hiprec.pivot_diag(pt[0], rd)], dtype=object)
            u = np.transpose(u * kappa[:, None, None], (1, 2, 0))
            pt = pt[1:] + pt[:1]
        return u
    c = col(tok.slot)
    pc = pcol(tok.slot)
    if tok.kind == "w":
        pp = pcol(dual_slot(tok.slot))
        partner = normalize_color(-c, flavor, rd)
        return hiprec.w_matrix(pc, pp, _lex_larger(c, partner), rd)
    eye = hiprec._obj((r, r))
    for a in range(r):
        eye[a, a] = hiprec.mp.mpc(1)
    if tok.kind in ("d", "b"):
        return eye
    piv = hiprec.pivot_diag(pc, rd)
    if tok.kind == "dp":
        for a in range(r):
            eye[a, a] = piv[a]
        return eye
    if tok.kind == "bp":
        for a in range(r):
            eye[a, a] = 1 / piv[a]
        return eye
    raise TypeMismatch(str(tok))


def eval_diagram_precise(prog: SliceProgram, colors: dict, coupon_vectors: dict,
                         flavor=UNROLLED, rd: RootData | None = None) -> np.ndarray:
    """:func:`eval_diagram` redone in extended precision (see ``hiprec``)."""
    from . import hiprec

    col = _Colors(colors, flavor, rd)
    with hiprec._ctx():
        pcol = _PreciseColors(snap_colors(prog.graph, colors, flavor, rd), flavor, rd)
        ops, out_labels, in_labels = _compiled(prog)
        args = []
        for n, t_i, labels in ops:
            args.append(_precise_tensors(prog.layers[n][t_i], prog, col, pcol, coupon_vectors))
            args.append(labels)
        final = list(out_labels) + list(in_labels)
        res = _contract(prog, args, final, rd.r)
        res = res.reshape(rd.r ** len(out_labels), -1)
        return np.array([[complex(x) for x in row] for row in res])


# accept a double precision evaluation when the summed terms exceed the
# result by at most this factor (inputs carry ~1e-12 relative error)
COND_ACCEPT = 1e2
ACC_TARGET = 1e-11
ZERO_REL = 1e-24


def condition(mat: np.ndarray, ab: np.ndarray) -> float:
    lam = abs(np.trace(mat)) / mat.shape[0]
    top = float(np.max(ab))
    if lam == 0:
        return float("inf") if top > 0 else 1.0
    return top / lam


def eval_diagram_layers(prog: SliceProgram, colors: dict, coupon_vectors: dict | None = None,
                        flavor=UNROLLED, rd: RootData | None = None) -> np.ndarray:
    """Same map as :func:`eval_diagram` but as a product of Kronecker layer
    matrices.  Exponential in the width; used to cross-check small cases."""
    col = _Colors(colors, flavor, rd)
    coupon_vectors = coupon_vectors or {}
    r = rd.r
    M = np.eye(r ** len(prog.inputs), dtype=complex)
    for layer in prog.layers:
        L = np.ones((1, 1), dtype=complex)
        for tok in layer:
            ins, outs = _block_io(tok, prog.coupons)
            T = _block_tensors(tok, prog, col, coupon_vectors)
            if T is None:
                B = np.eye(r, dtype=complex)
            else:
                B = np.asarray(T).reshape(r ** len(outs), r ** len(ins))
            L = np.kron(L, B)
        M = L @ M
    return M


def scalar_of(mat: np.ndarray, tol: float = SCALAR_TOL) -> complex:
    """lambda with mat = lambda Id, or NotScalar."""
    lam = complex(np.trace(mat) / mat.shape[0])
    defect = float(np.linalg.norm(mat - lam * np.eye(mat.shape[0])))
    if defect <= tol * abs(lam):
        return lam
    if float(np.max(np.abs(mat))) <= 1e-13:
        return 0j
    raise NotScalar(f"cut evaluation is not scalar: |lambda|={abs(lam):.3e}, defect={defect:.3e}")


def theta_pairing(triple, x=None, y=None, flavor=UNROLLED, rd: RootData | None = None,
                  cut: int = 0, precise=None) -> complex:
    """(x, y)_{abc}: d-weighted cut value of the theta graph.

    ``x`` lies in H^{abc} and ``y`` in H^{c*b*a*}; both default to the
    canonical vectors.  ``cut`` selects which of the three edges is opened.
    """
    a, b, c = _norm3(triple, flavor, rd)
    dual_t = (-c, -b, -a)
    if triple_dim(a, b, c, flavor, rd) == 0:
        raise DimZero(f"H({a}, {b}, {c}) = 0")
    if x is None:
        x = canonical_vector(a, b, c, flavor, rd)
    if y is None:
        y = canonical_vector(*dual_t, flavor, rd)
    name = "ijk"[cut]
    prog = load_program(f"theta_{name}")
    colors = {"i": a, "j": b, "k": c}
    vecs = {"x": x, "y": y}
    mat = _evaluate(prog, colors, vecs, flavor, rd, precise)
    return mod_dim(colors[name], rd) * scalar_of(mat)


def _evaluate(prog, colors, vecs, flavor, rd, precise):
    """Double precision evaluation, escalated when it is ill-conditioned.

    ``precise``: None = automatic, True = always extended, False = never.
    """
    if precise is True:
        return eval_diagram_precise(prog, colors, vecs, flavor, rd)
    mat, ab = eval_diagram(prog, colors, vecs, flavor, rd, bound=True)
    if precise is None and not _trustworthy(prog, colors, mat, ab, flavor, rd):
        return eval_diagram_precise(prog, colors, vecs, flavor, rd)
    return mat


def _input_accuracy(prog, colors, flavor, rd):
    col = _Colors(colors, flavor, rd)
    acc = 1e-16
    for slots in prog.coupons.values():
        acc = max(acc, invariant_space(*(col(s) for s in slots), flavor, rd).accuracy)
    return acc


def _trustworthy(prog, colors, mat, ab, flavor, rd) -> bool:
    cnd = condition(mat, ab)
    if cnd > COND_ACCEPT:
        return False
    if cnd * _input_accuracy(prog, colors, flavor, rd) > ACC_TARGET:
        return False
    lam = np.trace(mat) / mat.shape[0]
    defect = np.linalg.norm(mat - lam * np.eye(mat.shape[0]))
    return defect <= ACC_TARGET * abs(lam)


TETRA_EDGES = ("i", "j", "k", "l", "m", "n")


def tetra_triples(colors6):
    """The four coupon triples (i,j,k*), (k,l,m*), (n,l*,j*), (m,n*,i*)."""
    i, j, k, l, m, n = colors6
    return ((i, j, -k), (k, l, -m), (n, -l, -j), (m, -n, -i))


def eval_tetra_graph(colors6, coupons=None, cut: str = "i", flavor=UNROLLED,
                     rd: RootData | None = None, reverse=(), precise=None) -> complex:
    """d(color of cut edge) times the cut value of the tetrahedron graph."""
    colors6 = tuple(normalize_color(c, flavor, rd) for c in colors6)
    triples = tetra_triples(colors6)
    if coupons is None:
        if any(triple_dim(*t, flavor, rd) == 0 for t in triples):
            return 0j
        coupons = [canonical_vector(*t, flavor, rd) for t in triples]
    else:
        for t in triples:
            if triple_dim(*t, flavor, rd) == 0:
                raise DimZero(f"coupon space H{t} is zero")
    prog = load_program(f"tetra_{cut}")
    for e in reverse:
        prog = _reversed(prog, e)
    colors = dict(zip(TETRA_EDGES, colors6))
    vecs = {f"x{s + 1}": coupons[s] for s in range(4)}
    mat = _evaluate(prog, colors, vecs, flavor, rd, precise)
    return mod_dim(colors[cut], rd) * scalar_of(mat)


def tetra_best_cut(colors6, coupons=None, flavor=UNROLLED, rd: RootData | None = None):
    """Evaluate the tetrahedron graph through its best conditioned cut.

    Returns (value, cut).  Cuts are tried in a fixed order and the first one
    meeting ``COND_ACCEPT`` wins; otherwise the best one is redone in
    extended precision.
    """
    colors6 = tuple(normalize_color(c, flavor, rd) for c in colors6)
    triples = tetra_triples(colors6)
    if coupons is None:
        if any(triple_dim(*t, flavor, rd) == 0 for t in triples):
            return 0j, None
        coupons = [canonical_vector(*t, flavor, rd) for t in triples]
    colors = dict(zip(TETRA_EDGES, colors6))
    vecs = {f"x{s + 1}": coupons[s] for s in range(4)}
    best = None
    for cut in TETRA_EDGES:
        prog = load_program(f"tetra_{cut}")
        mat, ab = eval_diagram(prog, colors, vecs, flavor, rd, bound=True)
        if _trustworthy(prog, colors, mat, ab, flavor, rd):
            return mod_dim(colors[cut], rd) * scalar_of(mat), cut
        cnd = condition(mat, ab)
        if best is None or cnd < best[0]:
            best = (cnd, cut, float(np.max(ab)))
    _, cut, top = best
    mat = eval_diagram_precise(load_program(f"tetra_{cut}"), colors, vecs, flavor, rd)
    lam = abs(np.trace(mat)) / mat.shape[0]
    if lam <= ZERO_REL * top:
        # cancellation down to the extended precision floor: an exact zero
        return 0j, cut
    return mod_dim(colors[cut], rd) * scalar_of(mat), cut


@lru_cache(maxsize=None)
def _reversed(prog: SliceProgram, edge: str) -> SliceProgram:
    return reverse_edge(prog, edge)

