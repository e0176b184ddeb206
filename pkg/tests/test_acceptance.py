"""Acceptance run: one PASS/FAIL line per criterion (see ``pytest -s``)."""
import json
import time
from pathlib import Path

import pytest

from tetratv import diagram, simplicial as S, statesum, suites
from tetratv.qarith import RootData

FIX = Path(__file__).resolve().parent.parent / "fixtures"
SEED = 7

REPORTS: dict = {}


def _line(n, label, ok, detail):
    print(f"\ncriterion {n:>2s} {label:<28s} {'PASS' if ok else 'FAIL'}  {detail}")


def _run(n, label, pieces, budget):
    """``pieces``: report builders; ``budget``: seconds allowed for each."""
    reports, times = [], []
    for build in pieces:
        t0 = time.perf_counter()
        reports += build()
        times.append(time.perf_counter() - t0)
    REPORTS[label] = reports
    in_time = budget is None or max(times) < budget
    ok = all(r["pass"] for r in reports) and in_time
    worst = max(r["max_residual"] for r in reports)
    spent = "+".join(f"{t:.1f}" for t in times)
    _line(n, label, ok, f"worst {worst:.2e}, {spent}s" + (f" (budget {budget}s each)" if budget else ""))
    for r in reports:
        assert r["pass"], r
    assert in_time, f"took {spent}s"
    return reports


def _rd(r):
    return RootData(r)


def c1(r):
    return lambda: [suites.relations_suite(_rd(r), 50, SEED, 1e-9, products=20)]


def c2(r):
    return lambda: [suites.duality_suite(_rd(r), 50, SEED, 1e-9)]


def c3():
    return [suites.heights_suite(_rd(3), 200, SEED, 0.0)]


def c4():
    return [suites.tambi_suite(_rd(3), 50, SEED, 1e-8)]


def c5():
    return [suites.symmetry_suite(_rd(3), 50, SEED, 1e-8)]


def c6():
    return [suites.be_suite(_rd(3), 20, SEED, 1e-8), suites.be_suite(_rd(5), 10, SEED, 1e-8)]


def c7():
    return [suites.orth_suite(_rd(3), 20, SEED, 1e-8, other=10)]


def c8():
    return [suites.two6j_suite(_rd(3), 30, SEED, 1e-8)]


def c9():
    return [suites.table_suite(_rd(3), 200, SEED, 0.0)]


def c10():
    out = [suites.moddim_suite(_rd(r), 100, SEED, 1e-9) for r in (3, 5, 7)]
    out += [suites.bsum_suite(_rd(r), 20, SEED, 1e-12) for r in (3, 5, 7)]
    return out


def c11():
    return [suites.bubble_suite(_rd(3), 10, SEED, 1e-8)]


def c12():
    return [suites.lift_suite(_rd(3), 30, SEED, 1e-8, zeros=10)]


def _fixture():
    ht = S.load_validate(FIX / "s3-unknot.json")
    return ht.with_coloring(S.load_cocycle(ht.tri, FIX / "s3-unknot.cocycle.json"))


def _tv_report(name, start, moves):
    rep = statesum.tv_invariance_suite(start, moves, RootData(3), seed=SEED)
    rep.pop("final")
    return {"suite": f"tv-{name}", "max_residual": rep["deviation"], "tolerance": 1e-8,
            "pass": bool(rep["deviation"] <= 1e-8), "steps": rep["steps"]}


def c13():
    ht = _fixture()
    swapped = ht.with_coloring(S.coboundary_shift(ht.tri, ht.coloring, 2, 0.41 - 0.27j))
    base = statesum.tv(ht, RootData(3)).value
    other = statesum.tv(swapped, RootData(3)).value
    swap_dev = abs(base - other) / max(abs(base), abs(other))
    return [
        _tv_report("pachner", ht, ["bubble_add", "pachner_23", "pachner_32", "bubble_remove"]),
        _tv_report("bubble-lune", ht, ["bubble_add", "lune_add", "lune_remove", "bubble_remove"]),
        _tv_report("shift", ht, [{"move": "coboundary_shift", "vertex": 1, "value": [0.37, 0.21]}]),
        {"suite": "tv-cohomologous", "max_residual": swap_dev, "tolerance": 1e-8,
         "pass": bool(swap_dev <= 1e-8)},
        _tv_report("relabel", ht, [{"move": "relabel", "perms": [[1, 2, 0, 3], [0, 3, 1, 2]]}]),
    ]


CRITERIA = [
    ("1", "algebra relations", [c1(3), c1(5), c1(7)], 10),
    ("2", "duality and pivotal", [c2(3), c2(5), c2(7)], 10),
    ("3", "height rule", [c3], 30),
    ("4", "t-ambi cut independence", [c4], 60),
    ("5", "tetrahedral symmetry", [c5], None),
    ("6", "Biedenharn-Elliott", [c6], 300),
    ("7", "orthonormality", [c7], None),
    ("8", "standard vs modified", [c8], None),
    ("9", "r=3 table zero pattern", [c9], None),
    ("10", "modified dimension, b-sum", [c10], None),
    ("11", "bubble identity", [c11], None),
    ("12", "lift correspondence", [c12], None),
    ("13", "TV invariance", [c13], 600),
]


@pytest.mark.parametrize("n, label, pieces, budget", CRITERIA, ids=[c[1].replace(" ", "-") for c in CRITERIA])
def test_criterion(n, label, pieces, budget):
    _run(n, label, pieces, budget)


def test_criterion_9_table_pattern_details():
    rep = (REPORTS.get("r=3 table zero pattern") or c9())[0]
    assert rep["agreement"] == rep["samples"] == 200
    # exact-gauge value comparison: reported only
    print(f"\n  table/computed ratio spread {rep['ratio_spread']:.3e}")


@pytest.mark.xfail(strict=True, reason="the closed-form table is not invariant under the "
                   "tetrahedral symmetries the recoupling identities rely on")
def test_criterion_9_table_as_backend():
    rep = suites.table_suite(_rd(3), 20, SEED, 0.0, backend_samples=10)
    tb = rep["table_backend"]
    _line("9", "table as 6j backend", tb["pass"], f"BE {tb['be']:.2e}, orth {tb['orth']:.2e}")
    assert tb["pass"]


def _build_all(pieces):
    return [rep for build in pieces for rep in build()]


def test_criterion_14_determinism():
    for _, label, pieces, _ in CRITERIA:
        if label not in REPORTS:
            REPORTS[label] = _build_all(pieces)
    first = {label: json.dumps(REPORTS[label], sort_keys=True) for _, label, *_ in CRITERIA}
    diagram.clear_caches()
    diffs = [label for _, label, pieces, _ in CRITERIA
             if json.dumps(_build_all(pieces), sort_keys=True) != first[label]]
    _line("14", "determinism", not diffs, f"differing reports: {diffs or 'none'}")
    assert not diffs
