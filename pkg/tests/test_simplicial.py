import copy
import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tetratv import simplicial as S
from tetratv.errors import (
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
from tetratv.graded import Grade, in_X

FIX = Path(__file__).resolve().parent.parent / "fixtures"
coord = st.floats(-3, 3, allow_nan=False)
vertex_values = st.lists(st.builds(complex, coord, coord), min_size=4, max_size=4)


def fixture(colored=True):
    ht = S.load_validate(S.s3_unknot_json())
    if colored:
        ht = ht.with_coloring(S.coloring_from_vertices(ht.tri, S.FIXTURE_VERTEX_VALUES))
    return ht


def bubbled():
    ht = S.load_validate(FIX / "s3-unknot-bubbled.json")
    return ht.with_coloring(S.load_cocycle(ht.tri, FIX / "s3-unknot-bubbled.cocycle.json"))


def link_degrees(ht):
    deg = [0] * ht.tri.nvert
    for e in ht.link:
        for v in ht.tri.edge_ends(e):
            deg[v] += 1
    return deg


def test_perm_parity():
    assert S.perm_parity((0, 1, 2, 3)) == 1
    assert S.perm_parity((1, 0, 2, 3)) == -1
    assert S.perm_parity((1, 2, 0, 3)) == 1


def test_fixture_counts():
    ht = fixture(False)
    assert ht.counts() == {"vertices": 4, "edges": 6, "faces": 4, "tetrahedra": 2}
    assert ht.tri.euler_characteristic() == 0
    assert len(ht.link) == 4
    assert link_degrees(ht) == [2, 2, 2, 2]


def test_fixture_file_matches_builder():
    data = json.loads((FIX / "s3-unknot.json").read_text())
    assert data == S.s3_unknot_json()


def test_edges_have_distinct_ends():
    tri = fixture(False).tri
    for e in range(tri.nedge):
        u, v = tri.edge_ends(e)
        assert u < v


def test_missing_gluing():
    data = S.s3_unknot_json()
    data["gluings"].pop()
    with pytest.raises(NotClosed):
        S.load_validate(data)


def test_orientation_preserving_gluing():
    data = S.s3_unknot_json()
    cm = data["gluings"][0]["corner_map"]
    cm[0], cm[1] = cm[1], cm[0]
    with pytest.raises(NotOrientable):
        S.load_validate(data)


def test_loop_edge_is_not_quasi_regular():
    # one tetrahedron folded onto itself: corners 0 and 1 become one vertex
    tri = S.make_triangulation(1, [(0, 0, 0, 1, (1, 0, 2, 3)), (0, 2, 0, 3, (0, 1, 3, 2))])
    with pytest.raises(NotQuasiRegular):
        S.validate(tri)


def test_not_hamiltonian():
    data = S.s3_unknot_json()
    data["link"].pop()
    with pytest.raises(NotHamiltonian):
        S.load_validate(data)


@pytest.mark.parametrize("mutate", [
    lambda d: d.pop("gluings"),
    lambda d: d["gluings"][0].update(corner_map=[0, 1]),
    lambda d: d["gluings"][0].update(corner_map=[0, 0, 0]),
    lambda d: d["gluings"][0].update(tet=7),
    lambda d: d.update(link=[{"tet": 0, "corners": [1, 1]}]),
])
def test_parse_errors(mutate):
    data = copy.deepcopy(S.s3_unknot_json())
    mutate(data)
    with pytest.raises(ParseError):
        S.load_validate(data)


def test_missing_file(tmp_path):
    with pytest.raises(ParseError):
        S.load_validate(tmp_path / "nope.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    with pytest.raises(ParseError):
        S.load_validate(bad)


def test_separate_link_file(tmp_path):
    data = S.s3_unknot_json()
    link = data.pop("link")
    (tmp_path / "t.json").write_text(json.dumps(data))
    (tmp_path / "l.json").write_text(json.dumps(link))
    ht = S.load_validate(tmp_path / "t.json", tmp_path / "l.json")
    assert ht.link == fixture(False).link


@given(vertex_values)
def test_coboundary_is_cocycle(vals):
    tri = fixture(False).tri
    assert S.cocycle_check(tri, S.coloring_from_vertices(tri, vals))


def test_cocycle_failure():
    tri = fixture(False).tri
    col = S.coloring_from_vertices(tri, S.FIXTURE_VERTEX_VALUES)
    vals = list(col.values)
    vals[0] = vals[0] + 0.25
    assert not S.cocycle_check(tri, S.Coloring(tuple(vals)))
    with pytest.raises(MissingEdge):
        S.cocycle_check(tri, S.Coloring(tuple(vals[:5])))


def test_fixture_coloring_admissible():
    ht = fixture()
    v = S.FIXTURE_VERTEX_VALUES
    diffs = [v[b] - v[a] for a in range(4) for b in range(a + 1, 4)]
    assert all(abs(d - round(d)) > 1e-3 for d in diffs)
    assert S.is_admissible(ht.tri, ht.coloring)
    assert not any(in_X(g) for g in ht.coloring.values)


def test_integral_value_not_admissible():
    tri = fixture(False).tri
    col = S.coloring_from_vertices(tri, (0.3, 1.3, 1.19, 2.63))
    assert S.cocycle_check(tri, col)
    assert not S.is_admissible(tri, col)
    assert S.bad_vertices(tri, col) == [0, 1]


def test_cocycle_file_roundtrip():
    ht = fixture()
    again = S.load_cocycle(ht.tri, S.cocycle_to_json(ht.tri, ht.coloring))
    assert all(a == b for a, b in zip(again.values, ht.coloring.values))
    shipped = S.load_cocycle(ht.tri, FIX / "s3-unknot.cocycle.json")
    assert all(a == b for a, b in zip(shipped.values, ht.coloring.values))


def test_cocycle_file_errors():
    tri = fixture(False).tri
    recs = S.cocycle_to_json(tri, fixture().coloring)
    with pytest.raises(MissingEdge):
        S.load_cocycle(tri, recs[:-1])
    bad = copy.deepcopy(recs) + [dict(recs[0], value=[0.123, 0.0])]
    with pytest.raises(ParseError):
        S.load_cocycle(tri, bad)


def test_make_admissible_keeps_admissible():
    ht = fixture()
    col, shifts = S.make_admissible(ht.tri, ht.coloring, np.random.default_rng(1))
    assert shifts == []
    assert col.values == ht.coloring.values


@pytest.mark.parametrize("seed", range(5))
def test_make_admissible_from_zero(seed):
    tri = fixture(False).tri
    zero = S.Coloring(tuple(Grade(0) for _ in range(tri.nedge)))
    col, shifts = S.make_admissible(tri, zero, np.random.default_rng(seed))
    assert S.is_admissible(tri, col)
    assert len(shifts) <= tri.nvert
    h = S.coboundary_between(tri, zero, col)
    assert h is not None


def test_make_admissible_rejects_non_cocycle():
    tri = fixture(False).tri
    vals = list(fixture().coloring.values)
    vals[2] = vals[2] + 0.5
    with pytest.raises(NotCocycle):
        S.make_admissible(tri, S.Coloring(tuple(vals)), np.random.default_rng(0))


@given(st.integers(0, 3), st.builds(complex, coord, coord))
def test_coboundary_shift_same_class(v, g):
    ht = fixture()
    shifted = S.coboundary_shift(ht.tri, ht.coloring, v, g)
    assert S.cocycle_check(ht.tri, shifted)
    h = S.coboundary_between(ht.tri, ht.coloring, shifted)
    assert h is not None
    assert h[v] - h[0] == (Grade(g) if v else Grade(0))


def test_different_classes_detected():
    tri = fixture(False).tri
    a = fixture().coloring
    vals = list(a.values)
    vals[0] = vals[0] + 0.5
    assert not S.same_class(tri, a, S.Coloring(tuple(vals)))


def test_pachner_23_bad_site_on_fixture():
    with pytest.raises(BadSite):
        S.pachner_23(fixture(), 0, 2)


def test_pachner_roundtrip():
    ht = bubbled()
    up = S.pachner_23(ht, 0, 2)
    assert up.tri.ntet == ht.tri.ntet + 1
    assert up.tri.nedge == ht.tri.nedge + 1
    assert up.tri.euler_characteristic() == 0
    assert len(up.link) == len(ht.link)
    assert S.is_admissible(up.tri, up.coloring)
    old_pairs = {ht.tri.edge_ends(e) for e in range(ht.tri.nedge)}
    new = [e for e in range(up.tri.nedge) if up.tri.edge_ends(e) not in old_pairs]
    assert len(new) == 1
    t2, f2, _ = ht.tri.glue[0][2]
    assert up.tri.edge_ends(new[0]) == tuple(sorted((ht.tri.vertex_of[0][2], ht.tri.vertex_of[t2][f2])))
    assert up.tri.edge_degree(new[0]) == 3 and new[0] not in up.link
    t, a, b = up.tri.edge_rep(new[0])
    down = S.pachner_32(up, t, a, b)
    assert down.counts() == ht.counts()
    assert len(down.link) == len(ht.link)
    # vertex numbers may change, which can flip canonical edge orientations
    key = lambda g: min((round(x.rep.real, 9) % 2, round(x.rep.imag, 9)) for x in (g, -g))  # noqa: E731
    assert sorted(map(key, down.coloring.values)) == sorted(map(key, ht.coloring.values))


def test_pachner_32_link_edge_refused():
    ht = fixture()
    t, a, b = ht.tri.edge_rep(next(iter(ht.link)))
    with pytest.raises(LinkObstruction):
        S.pachner_32(ht, t, a, b)


def test_pachner_32_needs_degree_three():
    ht = fixture()
    e = next(e for e in range(ht.tri.nedge) if e not in ht.link)
    with pytest.raises(BadSite):
        S.pachner_32(ht, *ht.tri.edge_rep(e))


def test_bubble_roundtrip():
    ht = fixture()
    up = S.bubble_add(ht, 0, 2, np.random.default_rng(0))
    assert up.tri.nvert == 5 and up.tri.ntet == 4
    deg = link_degrees(up)
    assert deg == [2] * 5
    occ = [v for row in up.tri.vertex_of for v in row]
    new_v = min(set(occ), key=occ.count)
    incident = [e for e in range(up.tri.nedge) if new_v in up.tri.edge_ends(e)]
    assert len(incident) == 3
    assert sum(e in up.link for e in incident) == 2
    assert S.is_admissible(up.tri, up.coloring)
    S.validate(up.tri)
    down = S.bubble_remove(up, new_v)
    assert down.counts() == ht.counts()
    assert len(down.link) == 4


def test_bubble_reproducible():
    a = S.bubble_add(fixture(), 0, 2, np.random.default_rng(3))
    b = S.bubble_add(fixture(), 0, 2, np.random.default_rng(3))
    assert a.tri.glue == b.tri.glue
    assert a.coloring.values == b.coloring.values


def test_bubble_named_edge_must_be_link():
    ht = fixture()
    # corners 0 and 2 of tet 0 carry vertices 0 and 2, not a link edge
    assert ht.tri.edge_id(0, 0, 2) not in ht.link
    with pytest.raises(NoLinkEdge):
        S.bubble_add(ht, 0, 1, np.random.default_rng(0), link_edge=(0, 2))


def test_bubble_remove_bad_site():
    with pytest.raises(BadSite):
        S.bubble_remove(fixture(), 0)


def test_lune_roundtrip():
    ht = fixture()
    up = S.lune_add(ht, 0, 2, 3)
    assert up.tri.ntet == ht.tri.ntet + 2
    assert up.tri.euler_characteristic() == 0
    assert link_degrees(up) == [2] * up.tri.nvert
    assert S.cocycle_check(up.tri, up.coloring)
    e = max(e for e in range(up.tri.nedge) if up.tri.edge_degree(e) == 2 and e not in up.link)
    down = S.lune_remove(up, *up.tri.edge_rep(e))
    assert down.counts() == ht.counts()
    assert len(down.link) == 4


def test_lune_remove_refuses_link_edge():
    ht = fixture()
    t, a, b = ht.tri.edge_rep(next(iter(ht.link)))
    with pytest.raises(LinkObstruction):
        S.lune_remove(ht, t, a, b)


def test_lune_bad_corners():
    with pytest.raises(BadSite):
        S.lune_add(fixture(), 0, 1, 1)


def test_relabel():
    ht = fixture()
    new = S.relabel(ht, [(1, 2, 0, 3), (0, 1, 2, 3)])
    assert new.counts() == ht.counts()
    assert len(new.link) == 4
    assert S.is_admissible(new.tri, new.coloring)
    with pytest.raises(BadSite):
        S.relabel(ht, [(1, 0, 2, 3), (0, 1, 2, 3)])


def test_to_json_roundtrip():
    ht = bubbled()
    again = S.load_validate(ht.tri.to_json(ht.link))
    assert again.tri.glue == ht.tri.glue
    assert again.link == ht.link


def test_edge_cycle_degree():
    tri = bubbled().tri
    for e in range(tri.nedge):
        t, a, b = tri.edge_rep(e)
        assert len(tri.edge_cycle(t, a, b)) == tri.edge_degree(e)
    assert sum(tri.edge_degree(e) for e in range(tri.nedge)) == 6 * tri.ntet
