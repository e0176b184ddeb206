"""Matrix realisations of typical modules, their tensor products and duals.

Basis convention: ``v_j = F^j v_0`` so F is a plain shift and only E
carries quantum numbers.  Dual spaces use the dual basis ``f_j`` and the
action ``(x.f)(v) = f(S(x) v)``, whose matrix is ``S(x)^T``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import FlavorMismatch, NotTypical
from .qarith import (
    TRUNCATED,
    UNROLLED,
    RootData,
    canon_mod,
    color_key,
    is_integral,
    is_typical,
    q_power,
    qint,
)

GENERATORS = ("E", "F", "K", "Ki", "H")


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Rep:
    """A finite dimensional module given by generator matrices.

    ``H`` is ``None`` for the truncated flavor.  ``weights`` lists the weight
    of each basis vector (classes mod 2r are stored by representative).
    """

    flavor: str
    rd: RootData
    E: np.ndarray
    F: np.ndarray
    K: np.ndarray
    Ki: np.ndarray
    H: np.ndarray | None
    weights: tuple
    label: str = ""
    color: complex | None = None

    @property
    def dim(self) -> int:
        return self.E.shape[0]

    def gens(self) -> dict:
        out = {"E": self.E, "F": self.F, "K": self.K, "Ki": self.Ki}
        if self.H is not None:
            out["H"] = self.H
        return out

    def __repr__(self):
        return f"Rep({self.label or '?'}, dim={self.dim}, {self.flavor})"


def _check_flavor(flavor):
    if flavor not in (UNROLLED, TRUNCATED):
        raise ValueError(f"unknown flavor {flavor!r}")


def normalize_color(c, flavor, rd: RootData) -> complex:
    """Unrolled colors pass through; truncated ones go to Re in [0, 2r)."""
    c = complex(c)
    if flavor == TRUNCATED:
        return canon_mod(c, 2 * rd.r)
    return c


def check_typical(c, flavor, rd: RootData):
    if flavor == TRUNCATED:
        if is_integral(c):
            raise NotTypical(f"truncated colors must be non-integral, got {c}")
    elif not is_typical(c, rd):
        raise NotTypical(f"color {c} is not typical for r={rd.r}")


def typical_module(c, flavor, rd: RootData) -> Rep:
    _check_flavor(flavor)
    c = normalize_color(c, flavor, rd)
    check_typical(c, flavor, rd)
    return _typical_module(color_key(c), flavor, rd)


@lru_cache(maxsize=4096)
def _typical_module(ckey, flavor, rd: RootData) -> Rep:
    c = complex(*ckey)
    r = rd.r
    lam = c + r - 1
    E = np.zeros((r, r), dtype=complex)
    F = np.zeros((r, r), dtype=complex)
    for j in range(1, r):
        E[j - 1, j] = qint(j, rd) * qint(lam - j + 1, rd)
        F[j, j - 1] = 1.0
    wts = [lam - 2 * j for j in range(r)]
    K = np.diag([q_power(w, rd) for w in wts])
    Ki = np.diag([q_power(-w, rd) for w in wts])
    H = np.diag(wts).astype(complex) if flavor == UNROLLED else None
    if flavor == TRUNCATED:
        wts = [canon_mod(w, 2 * r) for w in wts]
    return Rep(
        flavor, rd, _frozen(E), _frozen(F), _frozen(K), _frozen(Ki),
        None if H is None else _frozen(H), tuple(wts), label=f"V[{c}]", color=c,
    )


def unit_module(flavor, rd: RootData) -> Rep:
    z = np.zeros((1, 1))
    one = np.ones((1, 1))
    H = z if flavor == UNROLLED else None
    return Rep(flavor, rd, _frozen(z), _frozen(z), _frozen(one), _frozen(one),
               None if H is None else _frozen(H), (0,), label="1")


def tensor(M: Rep, N: Rep) -> Rep:
    """Tensor product through the coproduct Delta(E) = 1(x)E + E(x)K etc."""
    if M.flavor != N.flavor:
        raise FlavorMismatch(f"{M.flavor} vs {N.flavor}")
    if M.rd != N.rd:
        raise FlavorMismatch("different root data")
    Im, In = np.eye(M.dim), np.eye(N.dim)
    E = np.kron(Im, N.E) + np.kron(M.E, N.K)
    F = np.kron(M.Ki, N.F) + np.kron(M.F, In)
    K = np.kron(M.K, N.K)
    Ki = np.kron(M.Ki, N.Ki)
    H = None
    if M.flavor == UNROLLED:
        H = np.kron(M.H, In) + np.kron(Im, N.H)
    wts = tuple(a + b for a in M.weights for b in N.weights)
    if M.flavor == TRUNCATED:
        wts = tuple(canon_mod(w, 2 * M.rd.r) for w in wts)
    return Rep(M.flavor, M.rd, _frozen(E), _frozen(F), _frozen(K), _frozen(Ki),
               None if H is None else _frozen(H), wts, label=f"({M.label}x{N.label})")


def tensor_all(*mods: Rep) -> Rep:
    out = mods[0]
    for M in mods[1:]:
        out = tensor(out, M)
    return out


def dual(M: Rep) -> Rep:
    """Dual module with matrices S(x)^T; S(E)=-EK^-1, S(F)=-KF, S(K)=K^-1."""
    E = -(M.E @ M.Ki).T
    F = -(M.K @ M.F).T
    K = M.Ki.T
    Ki = M.K.T
    H = None if M.H is None else -M.H.T
    wts = tuple(-w for w in M.weights)
    if M.flavor == TRUNCATED:
        wts = tuple(canon_mod(w, 2 * M.rd.r) for w in wts)
    return Rep(M.flavor, M.rd, _frozen(E), _frozen(F), _frozen(K), _frozen(Ki),
               None if H is None else _frozen(H), wts, label=f"{M.label}^")


def relation_residuals(M: Rep) -> dict:
    """Residuals of the defining relations, each scaled by the matrix norms."""
    rd = M.rd
    q = rd.q
    I = np.eye(M.dim)
    E, F, K, Ki = M.E, M.F, M.K, M.Ki
    scale = max(1.0, *(np.linalg.norm(X) for X in (E, F, K, Ki)))
    res = {
        "KKi": np.linalg.norm(K @ Ki - I),
        "KEKi": np.linalg.norm(K @ E @ Ki - q**2 * E),
        "KFKi": np.linalg.norm(K @ F @ Ki - q**-2 * F),
        "EF": np.linalg.norm(E @ F - F @ E - (K - Ki) / (q - 1 / q)),
    }
    # nilpotency compared against the size of the r-fold product
    for name, X in (("Er", E), ("Fr", F)):
        size = max(1.0, float(np.linalg.norm(X)) ** rd.r)
        res[name] = np.linalg.norm(np.linalg.matrix_power(X, rd.r)) * scale / size
    if M.H is not None:
        H = M.H
        res["HE"] = np.linalg.norm(H @ E - E @ H - 2 * E)
        res["HF"] = np.linalg.norm(H @ F - F @ H + 2 * F)
        w, V = np.linalg.eig(H)
        qH = V @ np.diag([q_power(x, rd) for x in w]) @ np.linalg.inv(V)
        res["qH"] = np.linalg.norm(qH - K)
    return {k: float(v) / scale for k, v in res.items()}


@dataclass(frozen=True, eq=False)
class Intertwiner:
    source: Rep
    target: Rep
    matrix: np.ndarray = field(repr=False)

    def residual(self) -> float:
        """Largest commutator defect T A_src - A_tgt T over the generators,
        relative to the sizes of T and the generator matrices."""
        T = self.matrix
        worst = 0.0
        src, tgt = self.source.gens(), self.target.gens()
        for g in src:
            if g not in tgt:
                continue
            size = max(1.0, float(np.linalg.norm(src[g])), float(np.linalg.norm(tgt[g])))
            worst = max(worst, float(np.linalg.norm(T @ src[g] - tgt[g] @ T)) / size)
        return worst / max(1.0, float(np.linalg.norm(T)))


def _pow_diag(K: np.ndarray, e: int) -> np.ndarray:
    return np.diag(np.diag(K) ** e)


def duality_morphisms(M: Rep):
    """(b, d, b', d') for M.

    b : 1 -> M (x) M*,   d : M* (x) M -> 1,
    b': 1 -> M* (x) M,   d': M (x) M* -> 1,  with K^{1-r} as pivot.
    """
    n = M.dim
    r = M.rd.r
    one = unit_module(M.flavor, M.rd)
    Md = dual(M)
    Id = np.eye(n)
    Kp = _pow_diag(M.K, 1 - r)
    Km = _pow_diag(M.K, r - 1)
    b = Intertwiner(one, tensor(M, Md), Id.reshape(n * n, 1).astype(complex))
    d = Intertwiner(tensor(Md, M), one, Id.reshape(1, n * n).astype(complex))
    dp = Intertwiner(tensor(M, Md), one, Kp.T.reshape(1, n * n).astype(complex))
    bp = Intertwiner(one, tensor(Md, M), Km.T.reshape(n * n, 1).astype(complex))
    return b, d, bp, dp


def pivot_matrix(M: Rep) -> np.ndarray:
    """Matrix of the pivotal element K^{1-r} on M."""
    return _pow_diag(M.K, 1 - M.rd.r)


def _lex_larger(a: complex, b: complex) -> bool:
    return (round(a.real, 9), round(a.imag, 9)) >= (round(b.real, 9), round(b.imag, 9))


def _anchor_w(c, flavor, rd: RootData) -> np.ndarray:
    """Matrix of the isomorphism V_c -> V_{c*}^* fixed by v_0 -> f_{r-1}."""
    r = rd.r
    Fd = dual(typical_module(-c, flavor, rd)).F
    W = np.zeros((r, r), dtype=complex)
    vec = np.zeros(r, dtype=complex)
    vec[r - 1] = 1.0
    for j in range(r):
        W[:, j] = vec
        vec = Fd @ vec
    return W


@lru_cache(maxsize=4096)
def _w_matrix(ckey, flavor, rd: RootData) -> np.ndarray:
    c = complex(*ckey)
    partner = normalize_color(-c, flavor, rd)
    if _lex_larger(c, partner):
        return _frozen(_anchor_w(c, flavor, rd))
    # c is the smaller member: solve the compatibility equation
    #   w_c^T = K_c^{1-r} w_{partner}
    WL = _anchor_w(partner, flavor, rd)
    Kc = pivot_matrix(typical_module(c, flavor, rd))
    return _frozen((Kc @ WL).T)


def pivotal_w(c, flavor, rd: RootData) -> Intertwiner:
    """The isomorphism w_c : V_c -> (V_{c*})^*."""
    c = normalize_color(c, flavor, rd)
    check_typical(c, flavor, rd)
    src = typical_module(c, flavor, rd)
    tgt = dual(typical_module(-c, flavor, rd))
    return Intertwiner(src, tgt, _w_matrix(color_key(c), flavor, rd))


def family_iso_residual(c, flavor, rd: RootData) -> float:
    """|| d_{V_c}(w_{c*} (x) Id) - d'_{V_{c*}}(Id (x) w_c) || as forms on V_{c*} (x) V_c."""
    c = normalize_color(c, flavor, rd)
    cs = normalize_color(-c, flavor, rd)
    Wc = pivotal_w(c, flavor, rd).matrix
    Wcs = pivotal_w(cs, flavor, rd).matrix
    left = Wcs.T
    right = pivot_matrix(typical_module(cs, flavor, rd)) @ Wc
    return float(np.max(np.abs(left - right))) / max(1.0, float(np.max(np.abs(left))))
