"""Extended precision re-evaluation of slice programs with mpmath.

Some cuts of the tetrahedron graph sum terms that cancel down to 1e-10 of
their size when colors have large imaginary parts.  Rescaling the weight
bases cannot help (every term is invariant under diagonal changes of
basis), so such cuts are redone here with all inputs rebuilt at ``dps``
digits: module matrices, w maps, pivots and the invariant vectors (refined
from the double precision solution by iterative refinement).
"""
from __future__ import annotations

from functools import lru_cache

import mpmath as mp
import numpy as np

from .qarith import RootData

DPS = 40


def _ctx():
    return mp.workprec(int(DPS * 3.33))


def _mpc(x) -> mp.mpc:
    x = complex(x)
    return mp.mpc(x.real, x.imag)


def q_power(x, rd: RootData):
    if not isinstance(x, mp.mpc):
        x = _mpc(x)
    return mp.exp(x * rd.k * 1j * mp.pi / rd.r)


def key(c: mp.mpc):
    return (c.real, c.imag)


def canon_mod(c: mp.mpc, period) -> mp.mpc:
    re = c.real - period * mp.floor(c.real / period)
    return mp.mpc(re, c.imag)


def qn(a, rd):
    return q_power(a, rd) - q_power(-a, rd)


def _obj(shape):
    out = np.empty(shape, dtype=object)
    out.fill(mp.mpc(0))
    return out


@lru_cache(maxsize=4096)
def _module(ckey, prec, rd: RootData):
    r = rd.r
    lam = mp.mpc(*ckey) + (r - 1)
    E = _obj((r, r))
    F = _obj((r, r))
    q1 = qn(mp.mpc(1), rd)
    for j in range(1, r):
        E[j - 1, j] = qn(mp.mpc(j), rd) / q1 * qn(lam - j + 1, rd) / q1
        F[j, j - 1] = mp.mpc(1)
    Kd = [q_power(lam - 2 * j, rd) for j in range(r)]
    return E, F, Kd


def module(c: mp.mpc, rd: RootData):
    """(E, F, Kdiag) of V_c at high precision; F is the shift."""
    return _module(key(c), mp.mp.prec, rd)


def pivot_diag(c, rd):
    _, _, Kd = module(c, rd)
    return [x ** (1 - rd.r) for x in Kd]


def _anchor_w(partner, rd):
    """w for the color whose partner module is given: columns F_dual^j f_{r-1}."""
    r = rd.r
    _, F, Kd = module(partner, rd)
    # dual action of F on V_partner^*: -(K F)^T
    K = np.diag(np.array(Kd, dtype=object))
    Fd = -(K.dot(F)).T
    W = _obj((r, r))
    vec = _obj(r)
    vec[r - 1] = mp.mpc(1)
    for j in range(r):
        W[:, j] = vec
        vec = Fd.dot(vec)
    return W


def w_matrix(c, partner, c_is_anchor: bool, rd: RootData):
    if c_is_anchor:
        return _anchor_w(partner, rd)
    WL = _anchor_w(c, rd)
    piv = np.array(pivot_diag(c, rd), dtype=object)
    return (piv[:, None] * WL).T


def triple_action(cols, rd):
    """Generators E and F of V_a (x) V_b (x) V_c as dense object matrices."""
    r = rd.r
    mods = [module(c, rd) for c in cols]
    (Ea, Fa, Ka), (Eb, Fb, Kb), (Ec, Fc, Kc) = mods
    n = r ** 3
    E = _obj((n, n))
    F = _obj((n, n))
    for p in range(r):
        for q in range(r):
            for s in range(r):
                col = (p * r + q) * r + s
                if p:
                    E[((p - 1) * r + q) * r + s, col] += Ea[p - 1, p] * Kb[q] * Kc[s]
                if q:
                    E[(p * r + q - 1) * r + s, col] += Eb[q - 1, q] * Kc[s]
                if s:
                    E[(p * r + q) * r + s - 1, col] += Ec[s - 1, s]
                if s + 1 < r:
                    F[(p * r + q) * r + s + 1, col] += 1 / (Ka[p] * Kb[q])
                if q + 1 < r:
                    F[(p * r + q + 1) * r + s, col] += 1 / Ka[p]
                if p + 1 < r:
                    F[((p + 1) * r + q) * r + s, col] += mp.mpc(1)
    return E, F


def refine_invariant(cols, approx: np.ndarray, rd: RootData, iters: int = 6):
    """Refine a double precision canonical invariant vector to DPS digits.

    The support and the unit leading coefficient are taken from ``approx``;
    corrections are solved in double precision against residuals formed in
    extended precision.
    """
    support = np.flatnonzero(np.abs(approx) > 0)
    mags = np.abs(approx)
    lead = int(np.flatnonzero(mags > 1e-6 * mags.max())[0])
    E, F = triple_action(cols, rd)
    A = np.vstack([E[:, support], F[:, support]])
    rows = [i for i in range(A.shape[0]) if any(x != 0 for x in A[i])]
    A = A[rows]
    free = [t for t, idx in enumerate(support) if idx != lead]
    lead_t = int(np.flatnonzero(support == lead)[0])
    Ad = np.array([[complex(x) for x in row] for row in A[:, free]])
    u = np.array([_mpc(approx[i]) for i in support], dtype=object)
    u[lead_t] = mp.mpc(1)
    for _ in range(iters):
        res = A.dot(u)
        resd = np.array([complex(x) for x in res])
        delta, *_ = np.linalg.lstsq(Ad, -resd, rcond=None)
        for t, dv in zip(free, delta):
            u[t] += _mpc(dv)
        if np.max(np.abs(delta)) <= 1e-45 * max(1.0, float(np.max(np.abs(approx)))):
            break
    full = _obj(rd.r ** 3)
    full[support] = u
    return full
