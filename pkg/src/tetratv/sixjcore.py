"""Modified and standard 6j-symbols as scalars, and residual checkers.

A modified symbol ``|i j k; l m n|`` is a linear form on the tensor product of
the four face spaces H(i,j,k*), H(k,l,m*), H(n,l*,j*), H(m,n*,i*).  With the
canonical vectors ``x_t`` of :mod:`diagram` it is the scalar
``N = G'(Gamma)(x_1 (x) x_2 (x) x_3 (x) x_4)`` times the dual basis.

Identities between symbols are checked with :class:`Term`, a coefficient
times a list of face *reads* (cyclically ordered color triples).  A read
``t`` stands for the dual vector ``x_t^v`` with ``x_t^v(x_t) = 1``; reads of
the same face that differ by a rotation are related by the sigma scalars.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np

from . import diagram
from .errors import (
    DimZero,
    GradeMismatch,
    HypothesisViolated,
    NotGood,
    NotTypical,
    WrongRoot,
)
from .qarith import (
    TRUNCATED,
    UNROLLED,
    RootData,
    color_key,
    is_integral,
    is_typical,
    mod_dim,
    q_power,
    qn,
)
from .repcat import normalize_color, pivotal_w, tensor_all, typical_module

MARGIN = 1e-3


# ---------------------------------------------------------------------------
# colors, goodness


def _norm(c, flavor, rd):
    return normalize_color(c, flavor, rd)


def star(c, flavor, rd):
    return _norm(-complex(c), flavor, rd)


def same_color(a, b, flavor, rd, tol: float = 1e-8) -> bool:
    d = complex(a) - complex(b)
    if flavor == TRUNCATED:
        d = d / (2 * rd.r)
        return abs(d.imag) <= tol and abs(d.real - round(d.real)) <= tol
    return abs(d) <= tol * max(1.0, abs(complex(a)))


def far_from_int(x, margin: float = MARGIN) -> bool:
    x = complex(x)
    return abs(x.imag) > margin or abs(x.real - round(x.real)) > margin


def color_typical(c, flavor, rd) -> bool:
    if flavor == TRUNCATED:
        return not is_integral(c)
    return is_typical(c, rd)


def pair_good(a, b, flavor, rd) -> bool:
    """V_a (x) V_b splits into typical summands with invertible d.

    For typical colors this happens exactly when a + b is not an integer
    (classes mod 2r for the truncated flavor).
    """
    if not (color_typical(a, flavor, rd) and color_typical(b, flavor, rd)):
        return False
    return not is_integral(complex(a) + complex(b))


def triple_good(t, flavor, rd) -> bool:
    a, b, c = t
    return pair_good(a, b, flavor, rd) or pair_good(b, c, flavor, rd) or pair_good(c, a, flavor, rd)


def face_triples(tau, flavor=UNROLLED, rd=None):
    i, j, k, l, m, n = tau
    s = (lambda c: star(c, flavor, rd)) if rd is not None else (lambda c: -complex(c))
    return ((i, j, s(k)), (k, l, s(m)), (n, s(l), s(j)), (m, s(n), s(i)))


@dataclass(frozen=True)
class GoodnessReport:
    pairs: dict
    triples: tuple
    good: bool
    strongly_good: bool
    admissible: bool

    def classification(self) -> str:
        if self.admissible:
            return "admissible"
        if self.strongly_good:
            return "strongly good"
        return "good" if self.good else "not good"


_ADMISSIBLE_PAIRS = ("ij", "jl", "in", "kl", "jK", "Ki", "lM", "Mk", "nL", "Jn", "mN", "Im")


def goodness(tau, flavor, rd: RootData) -> GoodnessReport:
    names = dict(zip("ijklmn", tau))
    for upper, lower in zip("IJKLMN", "ijklmn"):
        names[upper] = star(names[lower], flavor, rd)
    pairs = {p: pair_good(names[p[0]], names[p[1]], flavor, rd) for p in _ADMISSIBLE_PAIRS}
    triples = tuple(triple_good(t, flavor, rd) for t in face_triples(tau, flavor, rd))
    good = all(triples)
    m, n = names["m"], names["n"]
    strongly = (color_typical(m, flavor, rd) and color_typical(n, flavor, rd)
                and all(pairs[p] for p in ("ij", "jl", "in", "kl")))
    admissible = all(color_typical(c, flavor, rd) for c in tau) and all(pairs.values())
    return GoodnessReport(pairs, triples, good, strongly and good, admissible)


# ---------------------------------------------------------------------------
# tetrahedral symmetries


def sym_rotate(tau, flavor=UNROLLED, rd=None):
    """(i,j,k,l,m,n) -> (j,k*,i*,m,n,l)."""
    i, j, k, l, m, n = tau
    s = (lambda c: star(c, flavor, rd)) if rd is not None else (lambda c: -complex(c))
    return (j, s(k), s(i), m, n, l)


def sym_turn(tau, flavor=UNROLLED, rd=None):
    """(i,j,k,l,m,n) -> (k,l,m,n*,i,j*)."""
    i, j, k, l, m, n = tau
    s = (lambda c: star(c, flavor, rd)) if rd is not None else (lambda c: -complex(c))
    return (k, l, m, s(n), i, s(j))


def tetra_orbit(tau, flavor=UNROLLED, rd=None):
    """All tuples reachable by the two generating symmetries (breadth first,
    the input first)."""
    def key(t):
        return tuple(color_key(c, 9) for c in t)

    seen = {key(tau): tau}
    order = [tau]
    frontier = [tau]
    while frontier:
        nxt = []
        for t in frontier:
            for g in (sym_rotate, sym_turn):
                u = g(t, flavor, rd)
                if key(u) not in seen:
                    seen[key(u)] = u
                    order.append(u)
                    nxt.append(u)
        frontier = nxt
    return order


# ---------------------------------------------------------------------------
# modified 6j-symbols


@dataclass(frozen=True)
class SixJValue:
    flavor: str
    colors: tuple
    value: complex
    triples: tuple
    dims: tuple
    cut: str | None = None
    basis: str = "canonical"

    def is_zero(self) -> bool:
        # exact: vanishing faces and cancellations found by the extended
        # precision pass both return 0j, while genuine values can be tiny
        return self.value == 0


_cache: dict = {}
_cache_lock = threading.Lock()


@diagram.register_cache
def _clear_sixj():
    with _cache_lock:
        _cache.clear()


def modified_sixj(i, j, k, l, m, n, flavor=UNROLLED, rd: RootData | None = None) -> SixJValue:
    rd = rd or RootData(3)
    tau = tuple(_norm(c, flavor, rd) for c in (i, j, k, l, m, n))
    if not any(color_typical(c, flavor, rd) for c in tau):
        from .errors import NoTypicalColor

        raise NoTypicalColor(f"no typical color among {tau}")
    for c in tau:
        if not color_typical(c, flavor, rd):
            raise NotTypical(f"color {c} is not typical (only typical modules are built)")
    key = (flavor, tuple(color_key(c) for c in tau), rd)
    hit = _cache.get(key)
    if hit is not None:
        return hit
    triples = face_triples(tau, flavor, rd)
    dims = tuple(diagram.triple_dim(*t, flavor, rd) for t in triples)
    if 0 in dims:
        out = SixJValue(flavor, tau, 0j, triples, dims)
    else:
        val, cut = diagram.tetra_best_cut(tau, flavor=flavor, rd=rd)
        out = SixJValue(flavor, tau, complex(val), triples, dims, cut)
    with _cache_lock:
        _cache[key] = out
    return out


def sixj_value(tau, flavor=UNROLLED, rd=None) -> complex:
    return modified_sixj(*tau, flavor=flavor, rd=rd).value


# ---------------------------------------------------------------------------
# backends: where scalars come from


class ComputedBackend:
    """Scalars from the diagram evaluator (canonical bases)."""

    table = False

    def __init__(self, flavor=UNROLLED, rd: RootData | None = None):
        self.flavor = flavor
        self.rd = rd or RootData(3)

    def sixj(self, tau) -> complex:
        return sixj_value(tau, self.flavor, self.rd)

    def theta(self, t) -> complex:
        return diagram.theta_pairing(t, flavor=self.flavor, rd=self.rd)

    def rotation(self, t, steps) -> complex:
        return diagram.rotation_scalar(t, steps, self.flavor, self.rd)

    def dim(self, t) -> int:
        return diagram.triple_dim(*t, self.flavor, self.rd)

    def d(self, c) -> complex:
        return mod_dim(c, self.rd)


class TableBackend(ComputedBackend):
    """The closed-form r = 3 values with unit theta pairings and rotations."""

    table = True

    def __init__(self, rd: RootData | None = None):
        super().__init__(UNROLLED, rd or RootData(3))

    def sixj(self, tau) -> complex:
        return table_r3(*tau, rd=self.rd)

    def theta(self, t) -> complex:
        return 1.0 + 0j

    def rotation(self, t, steps) -> complex:
        return 1.0 + 0j


# ---------------------------------------------------------------------------
# tensors in products of face spaces


@dataclass
class Term:
    coef: complex
    reads: list = field(default_factory=list)

    def __mul__(self, other: "Term") -> "Term":
        return Term(self.coef * other.coef, list(self.reads) + list(other.reads))


def rotations_between(t, u, flavor, rd):
    """Steps s with rot^s(t) = u, or None."""
    for s in range(3):
        v = t[s:] + t[:s]
        if all(same_color(a, b, flavor, rd) for a, b in zip(v, u)):
            return s
    return None


def dual_read(t, flavor, rd):
    a, b, c = t
    return (star(c, flavor, rd), star(b, flavor, rd), star(a, flavor, rd))


def symbol_term(tau, backend) -> Term:
    fl, rd = backend.flavor, backend.rd
    tau = tuple(_norm(c, fl, rd) for c in tau)
    return Term(backend.sixj(tau), [tuple(t) for t in face_triples(tau, fl, rd)])


def identity_term(t, backend) -> Term:
    """Id(t) in H(t) (x) H(t_bar): theta(t_bar) x_{t_bar}^v (x) x_t^v."""
    fl, rd = backend.flavor, backend.rd
    t = tuple(_norm(c, fl, rd) for c in t)
    tb = dual_read(t, fl, rd)
    return Term(backend.theta(tb), [tb, t])


def contract(term: Term, face, backend) -> Term:
    """Contraction along H(face): pairs the factor lying in H(face) with the
    one lying in H(face*) (a read t lies in H(t_bar))."""
    fl, rd = backend.flavor, backend.rd
    face = tuple(_norm(c, fl, rd) for c in face)
    fdual = dual_read(face, fl, rd)
    p = q = None
    for idx, t in enumerate(term.reads):
        if p is None and rotations_between(t, fdual, fl, rd) is not None:
            p = idx
            continue
        if q is None and rotations_between(t, face, fl, rd) is not None:
            q = idx
    if p is None or q is None:
        raise HypothesisViolated(f"no matched pair of factors for contraction along {face}")
    rest = [x for idx, x in enumerate(term.reads) if idx not in (p, q)]
    if term.coef == 0:
        return Term(0j, rest)
    t, tp = term.reads[p], term.reads[q]
    tbar = dual_read(t, fl, rd)
    # x_{t'}^v = x_{tp_bar} / theta(t'), and x_{tp_bar} = rho x_t
    tpbar = dual_read(tp, fl, rd)
    s = rotations_between(tpbar, t, fl, rd)
    rho = backend.rotation(tpbar, s)
    val = rho * backend.theta(tbar) / (backend.theta(t) * backend.theta(tp))
    return Term(term.coef * val, rest)


def _read_key(t):
    return tuple(color_key(c, 8) for c in t)


def reference_read(t):
    return min((t[s:] + t[:s] for s in range(3)), key=_read_key)


def normal_form(term: Term, backend):
    """(coef, key) with every factor expressed in its reference read."""
    fl, rd = backend.flavor, backend.rd
    coef = term.coef
    refs = []
    for t in term.reads:
        t = tuple(_norm(c, fl, rd) for c in t)
        ref = reference_read(t)
        s = rotations_between(t, ref, fl, rd)
        if s and coef != 0:
            coef = coef / backend.rotation(t, s)
        refs.append(_read_key(ref))
    return coef, tuple(sorted(refs))


def collect(terms, backend) -> dict:
    out: dict = {}
    for tm in terms:
        c, k = normal_form(tm, backend)
        out[k] = out.get(k, 0j) + c
    return out


def rel_residual(lhs: dict, rhs: dict, scale: float) -> float:
    keys = set(lhs) | set(rhs)
    worst = 0.0
    for k in keys:
        worst = max(worst, abs(lhs.get(k, 0j) - rhs.get(k, 0j)))
    return worst / scale if scale > 0 else worst


def _scale(*dicts, extra=()):
    s = max([abs(v) for d in dicts for v in d.values()] + list(extra) + [0.0])
    return s


# ---------------------------------------------------------------------------
# symmetry and reversion


def symmetry_check(i, j, k, l, m, n, flavor=UNROLLED, rd: RootData | None = None,
                   backend=None) -> float:
    """Max relative deviation between the symbol and its images under the
    two generating tetrahedral symmetries (and their composite)."""
    backend = backend or ComputedBackend(flavor, rd)
    tau = (i, j, k, l, m, n)
    base = collect([symbol_term(tau, backend)], backend)
    worst = 0.0
    fl, rd = backend.flavor, backend.rd
    images = [sym_rotate(tau, fl, rd), sym_turn(tau, fl, rd),
              sym_turn(sym_rotate(tau, fl, rd), fl, rd)]
    for img in images:
        other = collect([symbol_term(img, backend)], backend)
        if all(abs(v) == 0 for v in base.values()) and all(abs(v) == 0 for v in other.values()):
            continue
        worst = max(worst, rel_residual(base, other, _scale(base, other)))
    return worst


def reversion_check(i, j, k, l, m, n, flavor=UNROLLED, rd: RootData | None = None,
                    edges=diagram.TETRA_EDGES) -> float:
    """Reverse each edge (w moved to the other end, label starred) and compare."""
    rd = rd or RootData(3)
    tau = tuple(_norm(c, flavor, rd) for c in (i, j, k, l, m, n))
    ref, cut0 = diagram.tetra_best_cut(tau, flavor=flavor, rd=rd)
    if cut0 is None:
        return 0.0
    worst = 0.0
    for e in edges:
        cut = cut0 if cut0 != e else next(c for c in diagram.TETRA_EDGES if c != e)
        val = diagram.eval_tetra_graph(tau, cut=cut, flavor=flavor, rd=rd, reverse=(e,))
        worst = max(worst, abs(val - ref) / max(abs(ref), 1e-300))
    return worst


# ---------------------------------------------------------------------------
# standard 6j-symbols through Hom spaces


def hom_space(src, tgt, tol: float = diagram.SVD_CUTOFF) -> np.ndarray:
    """Basis (k, dim tgt, dim src) of module maps src -> tgt.

    K (and H) are diagonal, so a module map only has entries between equal
    weights; E and F are then imposed on that coordinate subspace.
    """
    m, n = tgt.dim, src.dim
    ks, kt = np.diag(src.K), np.diag(tgt.K)
    keep = np.abs(kt[:, None] - ks[None, :]) <= 1e-8 * np.maximum(1, np.abs(kt[:, None]))
    if src.H is not None:
        hs, ht = np.diag(src.H), np.diag(tgt.H)
        keep &= np.abs(ht[:, None] - hs[None, :]) <= 1e-8
    idx = np.flatnonzero(keep.reshape(-1))
    if idx.size == 0:
        return np.zeros((0, m, n), dtype=complex)
    It, Is = np.eye(m), np.eye(n)
    rows = [np.kron(It, src.E.T) - np.kron(tgt.E, Is), np.kron(It, src.F.T) - np.kron(tgt.F, Is)]
    A = np.vstack(rows)[:, idx]
    A = A[np.any(A != 0, axis=1)]
    cs = np.linalg.norm(A, axis=0)
    cs[cs == 0] = 1.0
    A = A / cs
    rs = np.linalg.norm(A, axis=1)
    A = A / rs[:, None]
    _, s, vh = np.linalg.svd(A)
    smax = s[0] if s.size else 1.0
    rank = int(np.sum(s > tol * smax))
    null = vh[rank:].conj() / cs
    out = np.zeros((null.shape[0], m * n), dtype=complex)
    out[:, idx] = null
    return out.reshape(-1, m, n)


def _hom1(src, tgt, what):
    basis = hom_space(src, tgt)
    if basis.shape[0] == 0:
        raise DimZero(f"{what} = 0")
    if basis.shape[0] > 1:
        raise HypothesisViolated(f"{what} has dimension {basis.shape[0]}")
    T = basis[0]
    return T / T.flat[int(np.argmax(np.abs(T)))]


def _V(c, flavor, rd):
    return typical_module(c, flavor, rd)


def heights_between(a, b, rd):
    """Colors c with H^{ab}_c != 0: a + b + 2t, |t| <= r'."""
    return [complex(a) + complex(b) + 2 * t for t in range(-rd.rprime, rd.rprime + 1)]


def hom_triple_nonzero(c, a, b, flavor, rd) -> bool:
    """H^{ab}_c = Hom(V_c, V_a (x) V_b) is nonzero."""
    return diagram.triple_dim(a, b, -complex(c), flavor, rd) > 0


def dpair(y, x, c, rd) -> complex:
    """(y, x)^{ab}_c defined by (y, x) Id_{V_c} = d(c) x y."""
    return mod_dim(c, rd) * diagram.scalar_of(x @ y)


@dataclass
class StandardSixJ:
    coefficients: dict  # n -> S_n
    completeness: float
    x: tuple            # x1, x2 bases used
    y: dict             # n -> (y1, y2)


def standard_expansion(i, j, k, l, m, flavor=UNROLLED, rd: RootData | None = None) -> StandardSixJ:
    """Expand (x1 (x) Id) x2 in the maps (Id (x) y1_n) y2_n."""
    rd = rd or RootData(3)
    if not (pair_good(i, j, flavor, rd) and pair_good(j, l, flavor, rd)):
        raise NotGood("standard 6j needs the pairs (i,j) and (j,l) good")
    Vi, Vj, Vk, Vl, Vm = (_V(c, flavor, rd) for c in (i, j, k, l, m))
    x1 = _hom1(Vk, tensor_all(Vi, Vj), "H^{ij}_k")
    x2 = _hom1(Vm, tensor_all(Vk, Vl), "H^{kl}_m")
    r = rd.r
    A = np.kron(x1, np.eye(r)) @ x2
    ns, mats, ys = [], [], {}
    for n in heights_between(j, l, rd):
        if not color_typical(n, flavor, rd) or not hom_triple_nonzero(m, i, n, flavor, rd):
            continue
        Vn = _V(n, flavor, rd)
        y1 = _hom1(Vn, tensor_all(Vj, Vl), "H^{jl}_n")
        y2 = _hom1(Vm, tensor_all(Vi, Vn), "H^{in}_m")
        ns.append(n)
        mats.append((np.kron(np.eye(r), y1) @ y2).reshape(-1))
        ys[n] = (y1, y2)
    if not ns:
        return StandardSixJ({}, float(np.linalg.norm(A)), (x1, x2), ys)
    M = np.array(mats).T
    coef, *_ = np.linalg.lstsq(M, A.reshape(-1), rcond=None)
    resid = float(np.linalg.norm(M @ coef - A.reshape(-1)) / np.linalg.norm(A))
    return StandardSixJ(dict(zip(ns, coef)), resid, (x1, x2), ys)


def standard_sixj(i, j, k, l, m, n, flavor=UNROLLED, rd: RootData | None = None) -> complex:
    """Coefficient at n of the standard symbol in the Hom bases above."""
    rd = rd or RootData(3)
    exp = standard_expansion(i, j, k, l, m, flavor, rd)
    for nn, c in exp.coefficients.items():
        if same_color(nn, n, flavor, rd):
            return complex(c)
    return 0j


def _winv(c, flavor, rd):
    """Inverse of w_{c*} : V_{c*} -> V_c^*, as a map V_c^* -> V_{c*}."""
    return np.linalg.inv(pivotal_w(-complex(c), flavor, rd).matrix)


def a_lower(y, k, flavor, rd) -> np.ndarray:
    """a_k^{ij}(y) = (y (x) w_{k*}^{-1}) b_{V_k}, a vector of V_i V_j V_{k*}."""
    Wi = _winv(k, flavor, rd)
    return (y @ Wi.T).reshape(-1)


def a_upper(x, i, j, flavor, rd) -> np.ndarray:
    """a^k_{ij}(x) in V_k (x) V_{j*} (x) V_{i*}."""
    r = rd.r
    Wj, Wi = _winv(j, flavor, rd), _winv(i, flavor, rd)
    return np.einsum("cpq,bq,ap->cba", x.reshape(r, r, r), Wj, Wi).reshape(-1)


def pairing_compat_residual(i, j, k, flavor=UNROLLED, rd: RootData | None = None) -> float:
    """(a(y), a(x))_{i j k*} against (y, x)^{ij}_k for the Hom bases."""
    rd = rd or RootData(3)
    Vi, Vj, Vk = (_V(c, flavor, rd) for c in (i, j, k))
    y = _hom1(Vk, tensor_all(Vi, Vj), "H^{ij}_k")
    x = _hom1(tensor_all(Vi, Vj), Vk, "H^k_{ij}")
    lhs = dpair(y, x, k, rd)
    ay, ax = a_lower(y, k, flavor, rd), a_upper(x, i, j, flavor, rd)
    rhs = diagram.theta_pairing((i, j, -complex(k)), ay, ax, flavor, rd)
    return abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs))


def two6j_residual(i, j, k, l, m, n, flavor=UNROLLED, rd: RootData | None = None) -> float:
    """|{...}_+ - d(n) G'(Gamma)(a(x1), a(x2), a(x3), a(x4))|, relative."""
    rd = rd or RootData(3)
    if not (pair_good(i, j, flavor, rd) and pair_good(j, l, flavor, rd) and pair_good(i, n, flavor, rd)):
        raise NotGood("pairs (i,j), (j,l), (i,n) must be good")
    if not (color_typical(m, flavor, rd) and color_typical(n, flavor, rd)):
        raise NotGood("m and n must be typical")
    tau = tuple(_norm(c, flavor, rd) for c in (i, j, k, l, m, n))
    i, j, k, l, m, n = tau
    exp = standard_expansion(i, j, k, l, m, flavor, rd)
    S = next((c for nn, c in exp.coefficients.items() if same_color(nn, n, flavor, rd)), None)
    Vi, Vj, Vl, Vm, Vn = (_V(c, flavor, rd) for c in (i, j, l, m, n))
    x1, x2 = exp.x
    left = 0j
    x3 = x4 = None
    if diagram.triple_dim(j, l, -n, flavor, rd) and diagram.triple_dim(i, n, -m, flavor, rd):
        x3 = _hom1(tensor_all(Vj, Vl), Vn, "H^n_{jl}")
        x4 = _hom1(tensor_all(Vi, Vn), Vm, "H^m_{in}")
    if S is not None and x3 is not None:
        y1, y2 = exp.y[n]
        left = S * dpair(y1, x3, n, rd) * dpair(y2, x4, m, rd)
    if x3 is None:
        right = 0j
    else:
        coupons = [a_lower(x1, k, flavor, rd), a_lower(x2, m, flavor, rd),
                   a_upper(x3, j, l, flavor, rd), a_upper(x4, i, n, flavor, rd)]
        val, _ = diagram.tetra_best_cut(tau, coupons=coupons, flavor=flavor, rd=rd)
        right = mod_dim(n, rd) * val
    return abs(left - right) / max(1.0, abs(left), abs(right))


# ---------------------------------------------------------------------------
# Biedenharn-Elliott, orthonormality, bubble


def allowed_shift(a, b, c, rd) -> bool:
    """H(a, b, c) != 0 for typical unrolled colors: the height a + b + c is an
    even integer of absolute value at most r - 1."""
    h = complex(a) + complex(b) + complex(c)
    if not is_integral(h):
        return False
    hi = int(round(h.real))
    return hi % 2 == 0 and abs(hi) <= rd.r - 1


def be_check_hypothesis(js, flavor, rd):
    j0, j1, j2, j3, j4, j5, j6, j7, j8 = js

    def sg(t):
        return goodness(t, flavor, rd).strongly_good

    ok = sg((j1, j2, j5, j8, j0, j7)) and sg((j5, j3, j6, j4, j0, j8))
    ok = ok and color_typical(j7, flavor, rd) and color_typical(j8, flavor, rd)
    ok = ok and pair_good(j2, j3, flavor, rd)
    J = be_index_set(j2, j3, flavor, rd)
    ok = ok and all(pair_good(j1, j, flavor, rd) and pair_good(j, j4, flavor, rd) for j in J)
    if not ok:
        raise HypothesisViolated("Biedenharn-Elliott hypotheses fail")
    return J


def be_index_set(j2, j3, flavor, rd):
    out = []
    for j in heights_between(j2, j3, rd):
        j = _norm(j, flavor, rd)
        if color_typical(j, flavor, rd):
            out.append(j)
    return out


def be_sides(js, backend):
    fl, rd = backend.flavor, backend.rd
    js = tuple(_norm(c, fl, rd) for c in js)
    j0, j1, j2, j3, j4, j5, j6, j7, j8 = js
    J = be_check_hypothesis(js, fl, rd)
    s = lambda c: star(c, fl, rd)  # noqa: E731
    lhs_terms, sizes = [], []
    for j in J:
        C = (symbol_term((j1, j2, j5, j3, j6, j), backend)
             * symbol_term((j1, j, j6, j4, j0, j7), backend)
             * symbol_term((j2, j3, j, j4, j7, j8), backend))
        if C.coef == 0:
            continue
        C = contract(C, (j2, j3, s(j)), backend)
        C = contract(C, (j, j4, s(j7)), backend)
        C = contract(C, (j1, j, s(j6)), backend)
        C.coef *= backend.d(j)
        lhs_terms.append(C)
    D = symbol_term((j5, j3, j6, j4, j0, j8), backend) * symbol_term((j1, j2, j5, j8, j0, j7), backend)
    D = contract(D, (j5, j8, s(j0)), backend)
    lhs = collect(lhs_terms, backend)
    rhs = collect([D], backend)
    sizes = [abs(normal_form(t, backend)[0]) for t in lhs_terms]
    return lhs, rhs, _scale(rhs, extra=sizes)


def be_residual(*js, flavor=UNROLLED, rd: RootData | None = None, backend=None) -> float:
    backend = backend or ComputedBackend(flavor, rd)
    lhs, rhs, scale = be_sides(js, backend)
    return rel_residual(lhs, rhs, scale)


def orth_index_set(i, j, l, m, flavor, rd):
    out = []
    for n in heights_between(j, l, rd):
        n = _norm(n, flavor, rd)
        if color_typical(n, flavor, rd) and diagram.triple_dim(i, n, -m, flavor, rd):
            out.append(n)
    return out


def orth_sides(i, j, k, l, m, p, backend):
    fl, rd = backend.flavor, backend.rd
    i, j, k, l, m, p = (_norm(c, fl, rd) for c in (i, j, k, l, m, p))
    s = lambda c: star(c, fl, rd)  # noqa: E731
    if not (color_typical(k, fl, rd) and color_typical(m, fl, rd)):
        raise HypothesisViolated("k and m must be typical")
    for a, b in ((i, j), (j, l), (p, l), (k, l)):
        if not pair_good(a, b, fl, rd):
            raise HypothesisViolated(f"pair ({a}, {b}) is not good")
    N = orth_index_set(i, j, l, m, fl, rd)
    if not all(pair_good(i, n, fl, rd) for n in N):
        raise HypothesisViolated("pair (i, n) not good for some n")
    terms = []
    for n in N:
        T = symbol_term((i, j, p, l, m, n), backend) * symbol_term((k, s(j), i, n, m, l), backend)
        if T.coef == 0:
            continue
        T = contract(T, (i, n, s(m)), backend)
        T = contract(T, (j, l, s(n)), backend)
        T.coef *= backend.d(k) * backend.d(n)
        terms.append(T)
    lhs = collect(terms, backend)
    rhs = {}
    if same_color(k, p, fl, rd) and backend.dim((i, j, s(k))) and backend.dim((k, l, s(m))):
        rhs = collect([identity_term((i, j, s(k)), backend) * identity_term((k, l, s(m)), backend)],
                      backend)
    sizes = [abs(normal_form(t, backend)[0]) for t in terms]
    return lhs, rhs, _scale(rhs, extra=sizes)


def orth_residual(i, j, k, l, m, p, flavor=UNROLLED, rd: RootData | None = None, backend=None) -> float:
    backend = backend or ComputedBackend(flavor, rd)
    lhs, rhs, scale = orth_sides(i, j, k, l, m, p, backend)
    return rel_residual(lhs, rhs, scale)


def bubble_identity_residual(grades, i, j, k, rd: RootData | None = None, backend=None) -> float:
    """d(k) sum_{l,m,n} d(n) b(l) b(m) *** (|ijk;lmn| (x) |k j* i; n m l|) = b(k) Id(i,j,k*).

    ``grades`` is (g1, g2, g4); g3, g5, g6 follow from the sum rules.
    """
    from . import graded

    rd = rd or RootData(3)
    backend = backend or ComputedBackend(TRUNCATED, rd)
    fl = TRUNCATED
    g1, g2, g4 = (graded.Grade(g) for g in grades)
    g3 = g1 + g2
    g6 = g2 + g4
    g5 = g1 + g6
    for g in (g1, g2, g3, g4, g5, g6):
        if graded.in_X(g):
            raise GradeMismatch(f"grade {g} lies in X")
    for c, g in ((i, g1), (j, g2), (k, g3)):
        if not graded.grade_of(c, rd) == g:
            raise GradeMismatch(f"color {c} is not of grade {g}")
    i, j, k = (_norm(c, fl, rd) for c in (i, j, k))
    s = lambda c: star(c, fl, rd)  # noqa: E731
    terms = []
    for l in graded.index_set(g4, rd).colors:
        for m in graded.index_set(g5, rd).colors:
            for n in graded.index_set(g6, rd).colors:
                tau = (i, j, k, l, m, n)
                T = symbol_term(tau, backend) * symbol_term((k, s(j), i, n, m, l), backend)
                if T.coef == 0:
                    continue
                T = contract(T, (k, l, s(m)), backend)
                T = contract(T, (i, n, s(m)), backend)
                T = contract(T, (j, l, s(n)), backend)
                T.coef *= (backend.d(k) * backend.d(n) * graded.b_weight(l, rd)
                           * graded.b_weight(m, rd))
                terms.append(T)
    lhs = collect(terms, backend)
    rhs = {}
    if backend.dim((i, j, s(k))):
        idt = identity_term((i, j, s(k)), backend)
        idt.coef *= graded.b_weight(k, rd)
        rhs = collect([idt], backend)
    sizes = [abs(normal_form(t, backend)[0]) for t in terms]
    return rel_residual(lhs, rhs, _scale(rhs, extra=sizes))


# ---------------------------------------------------------------------------
# the r = 3 closed-form table


def _eq(a, b):
    return abs(complex(a) - complex(b)) <= 1e-9 * max(1.0, abs(complex(a)))


def _table_case(tau, rd):
    i, j, k, l, m, n = (complex(c) for c in tau)
    qp = lambda x: q_power(x, rd)  # noqa: E731
    if _eq(k, i + j + 2) and _eq(l, n - j - 2) and _eq(m, n + i + 2):
        return 1, qn(n + 1, rd) * qn(n + 2, rd)
    if _eq(k, i + j) and _eq(l, n - j) and _eq(m, n + i + 2):
        return 2, qn(j + 2, rd) * qn(n + 1, rd)
    if _eq(k, i + j) and _eq(l, n - j) and _eq(m, n + i):
        return 3, -(qp(i + j - n) + qp(i - j + n) + qp(-i + j + n)
                    + qp(i - j - n) + qp(-i + j - n) + qp(-i - j + n))
    return None


def table_case(i, j, k, l, m, n, rd: RootData | None = None):
    """(case number, matched tuple) or None; direct matches win."""
    rd = rd or RootData(3)
    for t in tetra_orbit((i, j, k, l, m, n)):
        hit = _table_case(t, rd)
        if hit is not None:
            return hit[0], t
    return None


def table_r3(i, j, k, l, m, n, rd: RootData | None = None) -> complex:
    rd = rd or RootData(3)
    if rd.r != 3 or rd.k != 1:
        raise WrongRoot(f"the table is for r=3, k=1 (got {rd})")
    tau = tuple(complex(c) for c in (i, j, k, l, m, n))
    for c in tau:
        if is_integral(c):
            raise NotTypical(f"table colors must be non-integral, got {c}")
    for t in tetra_orbit(tau):
        hit = _table_case(t, rd)
        if hit is not None:
            return complex(hit[1])
    return 0j


# ---------------------------------------------------------------------------
# sampling


def sample_color(rng, margin: float = MARGIN, span: float = 4.0) -> complex:
    while True:
        c = complex(rng.uniform(-span, span), rng.uniform(-span, span))
        if far_from_int(c, margin):
            return c


def _sums_ok(colors, margin=MARGIN):
    cs = list(colors)
    for a in range(len(cs)):
        if not far_from_int(cs[a], margin):
            return False
        for b in range(a + 1, len(cs)):
            diff = cs[a] - cs[b]
            exact = abs(diff.imag) < 1e-12 and abs(diff.real - 2 * round(diff.real / 2)) < 1e-12
            if not far_from_int(cs[a] + cs[b], margin):
                return False
            if not exact and not far_from_int(diff, margin):
                return False
    return True


def _shift(rng, rd):
    return 2 * int(rng.integers(-rd.rprime, rd.rprime + 1))


def sample_good_tuple(rng, rd: RootData, margin=MARGIN):
    """A 6-tuple whose four face spaces are all one dimensional (admissible
    up to the margin checks)."""
    while True:
        i, j, n = (sample_color(rng, margin) for _ in range(3))
        k = i + j + _shift(rng, rd)
        l = n - j + _shift(rng, rd)
        m = k + l + _shift(rng, rd)
        tau = (i, j, k, l, m, n)
        if not allowed_shift(m, -n, -i, rd):
            continue
        if _sums_ok(tau, margin):
            return tau


def sample_strongly_good(rng, rd: RootData, margin=MARGIN):
    return sample_good_tuple(rng, rd, margin)


def sample_be_tuple(rng, rd: RootData, margin=MARGIN):
    """(j0, ..., j8) meeting the Biedenharn-Elliott hypotheses."""
    while True:
        j1, j2, j3, j4 = (sample_color(rng, margin) for _ in range(4))
        j5 = j1 + j2 + _shift(rng, rd)
        j6 = j5 + j3 + _shift(rng, rd)
        j0 = j6 + j4 + _shift(rng, rd)
        j7 = j0 - j1 + _shift(rng, rd)
        j8 = j7 - j2 + _shift(rng, rd)
        if not allowed_shift(j3, j4, -j8, rd):
            continue
        js = (j0, j1, j2, j3, j4, j5, j6, j7, j8)
        if not _sums_ok(js, margin):
            continue
        return js


def sample_orth_tuple(rng, rd: RootData, same: bool = True, margin=MARGIN):
    """(i, j, k, l, m, p) with p = k when ``same`` else a different admissible p."""
    while True:
        i, j, l = (sample_color(rng, margin) for _ in range(3))
        k = i + j + _shift(rng, rd)
        m = k + l + _shift(rng, rd)
        if same:
            p = k
        else:
            opts = [i + j + 2 * t for t in range(-rd.rprime, rd.rprime + 1)
                    if abs(i + j + 2 * t - k) > 0.5 and allowed_shift(i + j + 2 * t, l, -m, rd)]
            if not opts:
                continue
            p = opts[int(rng.integers(len(opts)))]
        tup = (i, j, k, l, m, p)
        if _sums_ok(tup[:5] if same else tup, margin):
            return tup
