"""Randomised residual suites behind ``tetratv verify`` and the acceptance run.

Every suite takes a RootData, a sample count and a seed and returns a plain
dict (JSON ready) with at least ``max_residual`` and ``pass``.  Reports
carry no timings so that reruns are byte-identical.
"""
from __future__ import annotations

import numpy as np

from . import diagram, graded, sixjcore
from .qarith import TRUNCATED, UNROLLED, RootData, canon_mod, mod_dim
from .repcat import (
    duality_morphisms,
    dual,
    family_iso_residual,
    relation_residuals,
    tensor,
    typical_module,
)


def _report(name, rd, samples, worst, tol, **extra):
    out = {"suite": name, "r": rd.r, "k": rd.k, "samples": samples,
           "max_residual": float(worst), "tolerance": tol, "pass": bool(worst <= tol)}
    out.update(extra)
    return out


def _typical(rng, rd, flavor=UNROLLED):
    c = sixjcore.sample_color(rng)
    if flavor == TRUNCATED:
        c = canon_mod(c, 2 * rd.r)
    return c


# ---------------------------------------------------------------------------
# algebra


def relations_suite(rd: RootData, samples: int = 50, seed: int = 0, tol: float = 1e-9,
                    products: int = 20):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for s in range(samples):
        flavor = UNROLLED if s % 2 == 0 else TRUNCATED
        M = typical_module(_typical(rng, rd, flavor), flavor, rd)
        worst = max(worst, max(relation_residuals(M).values()))
    for _ in range(products):
        A = typical_module(_typical(rng, rd), UNROLLED, rd)
        B = typical_module(_typical(rng, rd), UNROLLED, rd)
        worst = max(worst, max(relation_residuals(tensor(A, B)).values()))
    return _report("relations", rd, samples + products, worst, tol)


def zigzag_residual(M) -> float:
    n = M.dim
    b, d, bp, dp = duality_morphisms(M)
    B = b.matrix.reshape(n, n)
    D = d.matrix.reshape(n, n)
    Bp = bp.matrix.reshape(n, n)
    Dp = dp.matrix.reshape(n, n)
    eye = np.eye(n)
    res = [np.abs(B @ D - eye).max(), np.abs((D @ B).T - eye).max(),
           np.abs((Dp @ Bp).T - eye).max(), np.abs(Bp @ Dp - eye).max()]
    res += [m.residual() for m in (b, d, bp, dp)]
    return float(max(res))


def duality_suite(rd: RootData, samples: int = 50, seed: int = 0, tol: float = 1e-9):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for s in range(samples):
        flavor = UNROLLED if s % 2 == 0 else TRUNCATED
        c = _typical(rng, rd, flavor)
        M = typical_module(c, flavor, rd)
        worst = max(worst, zigzag_residual(M), family_iso_residual(c, flavor, rd))
        # the dual module is again a module
        worst = max(worst, max(relation_residuals(dual(M)).values()))
    return _report("duality", rd, samples, worst, tol)


# ---------------------------------------------------------------------------
# invariant spaces


def heights_suite(rd: RootData, samples: int = 200, seed: int = 0, tol: float = 0.0):
    """dim H(a, b, c) against the height rule, exact 0/1 agreement."""
    rng = np.random.default_rng(seed)
    mismatches = 0
    ones = 0
    done = 0
    while done < samples:
        a, b = _typical(rng, rd), _typical(rng, rd)
        if rng.random() < 0.75:
            c = -a - b + int(rng.integers(-rd.r - 1, rd.r + 2))
        else:
            c = _typical(rng, rd)
        if not sixjcore.far_from_int(c) or not sixjcore.far_from_int(a + b):
            continue
        rule = 1 if sixjcore.allowed_shift(a, b, c, rd) else 0
        got = diagram.triple_dim(a, b, c, UNROLLED, rd)
        mismatches += int(got != rule)
        ones += rule
        done += 1
    return _report("heights", rd, samples, mismatches, tol, agreement=samples - mismatches,
                   nonzero=ones)


def _admissible_triple(rng, rd):
    while True:
        a, b = _typical(rng, rd), _typical(rng, rd)
        c = -a - b + 2 * int(rng.integers(-rd.rprime, rd.rprime + 1))
        if sixjcore._sums_ok((a, b, c)):
            return (a, b, c)


def tambi_suite(rd: RootData, samples: int = 50, seed: int = 0, tol: float = 1e-8):
    """Theta and tetrahedron cut values agree across every cut edge."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        tri = _admissible_triple(rng, rd)
        vals = [diagram.theta_pairing(tri, flavor=UNROLLED, rd=rd, cut=c) for c in range(3)]
        top = max(abs(v) for v in vals)
        worst = max(worst, max(abs(v - vals[0]) for v in vals) / top)
        tau = sixjcore.sample_good_tuple(rng, rd)
        tv = [diagram.eval_tetra_graph(tau, cut=e, flavor=UNROLLED, rd=rd) for e in diagram.TETRA_EDGES]
        top = max(abs(v) for v in tv)
        if top > 0:
            worst = max(worst, max(abs(v - tv[0]) for v in tv) / top)
    return _report("tambi", rd, samples, worst, tol)


# ---------------------------------------------------------------------------
# 6j identities


def symmetry_suite(rd: RootData, samples: int = 50, seed: int = 0, tol: float = 1e-8):
    rng = np.random.default_rng(seed)
    sym = rev = 0.0
    for _ in range(samples):
        tau = sixjcore.sample_good_tuple(rng, rd)
        sym = max(sym, sixjcore.symmetry_check(*tau, rd=rd))
        rev = max(rev, sixjcore.reversion_check(*tau, rd=rd))
    return _report("symmetry", rd, samples, max(sym, rev), tol, symmetry=sym, reversion=rev)


def be_suite(rd: RootData, samples: int = 20, seed: int = 0, tol: float = 1e-8, backend=None):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        js = sixjcore.sample_be_tuple(rng, rd)
        worst = max(worst, sixjcore.be_residual(*js, rd=rd, backend=backend))
    return _report("be", rd, samples, worst, tol)


def orth_suite(rd: RootData, samples: int = 20, seed: int = 0, tol: float = 1e-8,
               other: int | None = None, backend=None):
    """k = p tuples, then ``other`` (default samples // 2) tuples with k != p."""
    rng = np.random.default_rng(seed)
    other = samples // 2 if other is None else other
    same = diff = 0.0
    for _ in range(samples):
        tup = sixjcore.sample_orth_tuple(rng, rd, same=True)
        same = max(same, sixjcore.orth_residual(*tup, rd=rd, backend=backend))
    for _ in range(other):
        tup = sixjcore.sample_orth_tuple(rng, rd, same=False)
        diff = max(diff, sixjcore.orth_residual(*tup, rd=rd, backend=backend))
    return _report("orth", rd, samples + other, max(same, diff), tol, same=same, different=diff)


def two6j_suite(rd: RootData, samples: int = 30, seed: int = 0, tol: float = 1e-8):
    rng = np.random.default_rng(seed)
    worst = pair = 0.0
    for _ in range(samples):
        tau = sixjcore.sample_strongly_good(rng, rd)
        worst = max(worst, sixjcore.two6j_residual(*tau, rd=rd))
        pair = max(pair, sixjcore.pairing_compat_residual(*tau[:3], rd=rd))
    return _report("two6j", rd, samples, max(worst, pair), tol, two6j=worst, pairing=pair)


def sample_grade(rng, margin: float = 1e-2):
    while True:
        g = graded.Grade(complex(rng.uniform(0, 2), rng.uniform(-1, 1)))
        if sixjcore.far_from_int(g.rep, margin):
            return g


def sample_bubble(rng, rd):
    while True:
        g1, g2, g4 = (sample_grade(rng) for _ in range(3))
        g3, g6 = g1 + g2, g2 + g4
        g5 = g1 + g6
        if all(sixjcore.far_from_int(g.rep, 1e-2) for g in (g3, g5, g6)):
            break
    pick = lambda g: graded.index_set(g, rd).colors[int(rng.integers(rd.r))]  # noqa: E731
    return (g1, g2, g4), pick(g1), pick(g2), pick(g3)


def bubble_suite(rd: RootData, samples: int = 10, seed: int = 0, tol: float = 1e-8):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        grades, i, j, k = sample_bubble(rng, rd)
        worst = max(worst, sixjcore.bubble_identity_residual(grades, i, j, k, rd=rd))
    return _report("bubble", rd, samples, worst, tol)


def bsum_suite(rd: RootData, samples: int = 20, seed: int = 0, tol: float = 1e-12):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        while True:
            g1, g2 = sample_grade(rng), sample_grade(rng)
            g = -(g1 + g2)
            if sixjcore.far_from_int(g.rep, 1e-2):
                break
        j = graded.index_set(g, rd).colors[int(rng.integers(rd.r))]
        worst = max(worst, graded.b_sum_residual(g1, g2, j, rd))
    return _report("bsum", rd, samples, worst, tol)


def moddim_suite(rd: RootData, samples: int = 100, seed: int = 0, tol: float = 1e-9):
    """d(i) is nonzero and 2r-periodic."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    smallest = np.inf
    for _ in range(samples):
        c = _typical(rng, rd)
        d0 = mod_dim(c, rd)
        smallest = min(smallest, abs(d0))
        worst = max(worst, abs(mod_dim(c + 2 * rd.r, rd) - d0) / abs(d0))
    ok = worst <= tol and smallest > 0
    out = _report("moddim", rd, samples, worst, tol, min_abs=float(smallest))
    out["pass"] = bool(ok)
    return out


def lift_suite(rd: RootData, samples: int = 30, seed: int = 0, tol: float = 1e-8, zeros: int = 10):
    """Truncated symbols against unrolled ones at the lift, plus tuples with
    no lift (which must vanish)."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    found = nolift = 0
    zero_worst = 0.0
    while found < samples or nolift < zeros:
        grades = [sample_grade(rng) for _ in range(3)]
        g1, g2, g4 = grades
        g3, g6 = g1 + g2, g2 + g4
        g5 = g3 + g4
        if not all(sixjcore.far_from_int(g.rep, 1e-2) for g in (g3, g5, g6)):
            continue
        pick = lambda g: graded.index_set(g, rd).colors[int(rng.integers(rd.r))]  # noqa: E731
        tau = (pick(g1), pick(g2), pick(g3), pick(g4), pick(g5), pick(g6))
        lift = graded.lift_tetrahedron(tau, rd)
        if lift is None:
            if nolift >= zeros:
                continue
            val = sixjcore.modified_sixj(*tau, flavor=TRUNCATED, rd=rd).value
            zero_worst = max(zero_worst, abs(val))
            nolift += 1
            continue
        if found >= samples:
            continue
        a = sixjcore.modified_sixj(*tau, flavor=TRUNCATED, rd=rd).value
        b = sixjcore.modified_sixj(*lift, flavor=UNROLLED, rd=rd).value
        worst = max(worst, abs(a - b) / max(abs(b), 1e-300))
        found += 1
    out = _report("lift", rd, samples, max(worst, zero_worst), tol, relative=worst,
                  no_lift_max_abs=zero_worst, no_lift=nolift)
    return out


# ---------------------------------------------------------------------------
# the r = 3 closed form


def _table_family(case, i, j, n):
    if case == 1:
        return (i, j, i + j + 2, n - j - 2, n + i + 2, n)
    if case == 2:
        return (i, j, i + j, n - j, n + i + 2, n)
    return (i, j, i + j, n - j, n + i, n)


def table_samples(rng, rd, count):
    """A mix of the three families, their tetrahedral images and generic
    tuples (admissible heights and unconstrained)."""
    out = []
    while len(out) < count:
        kind = len(out) % 5
        i, j, n = (sixjcore.sample_color(rng) for _ in range(3))
        if kind < 3:
            tau = _table_family(kind + 1, i, j, n)
        elif kind == 3:
            base = _table_family(int(rng.integers(1, 4)), i, j, n)
            orbit = sixjcore.tetra_orbit(base)
            tau = orbit[int(rng.integers(len(orbit)))]
        else:
            if rng.random() < 0.5:
                tau = sixjcore.sample_good_tuple(rng, rd)
            else:
                tau = tuple(sixjcore.sample_color(rng) for _ in range(6))
        if not sixjcore._sums_ok(tau):
            continue
        out.append(tuple(complex(c) for c in tau))
    return out


def table_suite(rd: RootData, samples: int = 200, seed: int = 0, tol: float = 0.0,
                backend_samples: int = 0):
    """Zero pattern of the closed form against computed symbols.

    ``backend_samples`` > 0 also wires the table (unit theta and rotations)
    into the Biedenharn-Elliott and orthonormality checks and reports their
    residuals; the value ratio table / computed is reported for the family
    tuples.
    """
    rng = np.random.default_rng(seed)
    agree = 0
    ratios = []
    for tau in table_samples(rng, rd, samples):
        t = sixjcore.table_r3(*tau, rd=rd)
        c = sixjcore.modified_sixj(*tau, rd=rd)
        tz = abs(t) <= 1e-9 * max(1.0, abs(t))
        agree += int(tz == c.is_zero())
        if not tz and not c.is_zero() and len(ratios) < 12:
            ratios.append(t / c.value)
    spread = 0.0
    if ratios:
        spread = max(abs(x - ratios[0]) for x in ratios) / abs(ratios[0])
    out = _report("table-r3", rd, samples, samples - agree, tol, agreement=agree,
                  ratio_spread=float(spread))
    if backend_samples:
        tb = sixjcore.TableBackend(rd)
        be = be_suite(rd, backend_samples, seed, backend=tb)["max_residual"]
        orth = orth_suite(rd, backend_samples, seed, other=0, backend=tb)["max_residual"]
        out["table_backend"] = {"be": be, "orth": orth, "pass": bool(max(be, orth) <= 1e-8)}
    return out


SUITES = {
    "relations": relations_suite,
    "duality": duality_suite,
    "heights": heights_suite,
    "tambi": tambi_suite,
    "symmetry": symmetry_suite,
    "be": be_suite,
    "orth": orth_suite,
    "two6j": two6j_suite,
    "bubble": bubble_suite,
    "bsum": bsum_suite,
    "table-r3": table_suite,
    "moddim": moddim_suite,
    "lift": lift_suite,
}

DEFAULT_SAMPLES = {"relations": 50, "duality": 50, "heights": 200, "tambi": 50, "symmetry": 50,
                   "be": 20, "orth": 20, "two6j": 30, "bubble": 10, "bsum": 20, "table-r3": 200,
                   "moddim": 100, "lift": 30}
DEFAULT_TOL = {"heights": 0.0, "table-r3": 0.0, "bsum": 1e-12, "relations": 1e-9,
               "duality": 1e-9, "moddim": 1e-9}


def run_suite(name: str, rd: RootData, samples: int | None = None, seed: int = 0,
              tol: float | None = None):
    fn = SUITES[name]
    n = DEFAULT_SAMPLES[name] if samples is None else samples
    t = DEFAULT_TOL.get(name, 1e-8) if tol is None else tol
    return fn(rd, n, seed, t)


