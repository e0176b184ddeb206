import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tetratv import diagram
from tetratv.errors import DimZero, ParseError, TypeMismatch
from tetratv.qarith import TRUNCATED, UNROLLED, RootData, canon_mod, mod_dim
from tetratv.repcat import duality_morphisms, tensor_all, typical_module
from tetratv.sixjcore import sample_color, sample_good_tuple

coord = st.floats(-3, 3, allow_nan=False)
generic = st.builds(complex, coord, coord).filter(
    lambda z: abs(z.imag) > 0.05 or abs(z.real - round(z.real)) > 0.05)


def _triple(a, b, shift):
    return (a, b, -a - b + shift)


def _far(z, m=0.01):
    return abs(z.imag) > m or abs(z.real - round(z.real)) > m


admissible = st.builds(_triple, generic, generic, st.sampled_from([-2, 0, 2])).filter(
    lambda t: _far(t[2]) and _far(t[0] + t[1]) and _far(t[1] + t[2]) and _far(t[0] + t[2]))


@pytest.mark.parametrize("c,dim", [(0.8, 1), (0.9, 0), (2.8, 0)])
def test_height_rule_examples(r3, c, dim):
    assert diagram.triple_dim(0.5, 0.7, c, UNROLLED, r3) == dim


def _rule(a, b, c, rd):
    h = a + b + c
    if abs(h.imag) > 1e-6 or abs(h.real - round(h.real)) > 1e-6:
        return 0
    h = int(round(h.real))
    return int(h % 2 == 0 and abs(h) <= rd.r - 1)


@given(generic, generic, st.integers(-8, 8), st.sampled_from([3, 5]))
def test_height_rule(a, b, s, r):
    rd = RootData(r)
    c = -a - b + s
    if not (_far(c) and _far(a + b)):
        return
    assert diagram.triple_dim(a, b, c, UNROLLED, rd) == _rule(a, b, c, rd)


@given(generic, generic, st.integers(-8, 8))
def test_truncated_height_rule(a, b, s):
    rd = RootData(3)
    c = -a - b + s
    if not (_far(c) and _far(a + b)):
        return
    assert diagram.triple_dim(a, b, c, TRUNCATED, rd) == int(s % 2 == 0)


@given(admissible, st.sampled_from([UNROLLED, TRUNCATED]))
def test_invariant_vectors(t, flavor):
    rd = RootData(3)
    sp = diagram.invariant_space(*t, flavor, rd)
    assert sp.dim == 1
    T = tensor_all(*(typical_module(c, flavor, rd) for c in t))
    x = diagram.canonical_vector(*t, flavor, rd)
    scale = np.abs(x).max()
    gens = [T.E, T.F] + ([T.H] if T.H is not None else [])
    for g in gens:
        assert np.abs(g @ x).max() <= 1e-9 * scale * max(1, np.abs(g).max())
    assert np.abs(T.K @ x - x).max() <= 1e-9 * scale


def test_canonical_vector_example(r3):
    x = diagram.canonical_vector(0.5, 0.7, 0.8, UNROLLED, r3)
    T = tensor_all(*(typical_module(c, UNROLLED, r3) for c in (0.5, 0.7, 0.8)))
    assert np.linalg.norm(T.E @ x) <= 1e-9 and np.linalg.norm(T.F @ x) <= 1e-9
    mags = np.abs(x)
    lead = np.flatnonzero(mags > 1e-6 * mags.max())[0]
    assert x[lead] == 1


def test_canonical_vector_deterministic(r3):
    t = (0.41 + 0.2j, 0.77 - 0.1j, -1.18 - 0.1j)
    x = diagram.canonical_vector(*t, UNROLLED, r3).copy()
    diagram.clear_caches()
    diagram._invariant_space.cache_clear()
    y = diagram.canonical_vector(*t, UNROLLED, r3)
    assert np.array_equal(x, y)


@given(admissible, st.builds(complex, coord, coord).filter(lambda z: abs(z) > 0.1))
def test_canonical_normalisation_is_scale_free(t, s):
    rd = RootData(3)
    x = diagram.canonical_vector(*t, UNROLLED, rd)
    assert np.allclose(diagram._normalise(s * x), x, rtol=1e-12, atol=1e-12 * np.abs(x).max())


def test_canonical_vector_dim_zero(r3):
    with pytest.raises(DimZero):
        diagram.canonical_vector(0.5, 0.7, 0.9, UNROLLED, r3)


@given(admissible)
def test_sigma_product(t):
    rd = RootData(3)
    a, b, c = t
    s1 = diagram.sigma_scalar(a, b, c, UNROLLED, rd)
    s2 = diagram.sigma_scalar(b, c, a, UNROLLED, rd)
    s3 = diagram.sigma_scalar(c, a, b, UNROLLED, rd)
    assert s1 != 0 and s2 != 0 and s3 != 0
    assert abs(s1 * s2 * s3 - 1) <= 1e-9


def _sigma_by_duality(x, t, rd):
    # (d_{V_a} (x) Id)(Id (x) x (x) Id) b'_{V_a}, assembled from the
    # duality morphisms of the representation module
    r = rd.r
    _, _, bp, _ = duality_morphisms(typical_module(t[0], UNROLLED, rd))
    Bp = bp.matrix.reshape(r, r)  # [dual leg, module leg]
    X = x.reshape(r, r, r)
    return np.einsum("fqs,fv->qsv", X, Bp).reshape(-1)


@pytest.mark.parametrize("t", [(0.5, 0.7, 0.8), (0.3 + 0.4j, 1.1 - 0.2j, -1.4 - 0.2j)])
def test_sigma_scalar_direct(r3, t):
    x = diagram.canonical_vector(*t, UNROLLED, r3)
    y = diagram.canonical_vector(t[1], t[2], t[0], UNROLLED, r3)
    sx = _sigma_by_duality(x, t, r3)
    assert np.allclose(sx, diagram.sigma(x, t, UNROLLED, r3))
    s = diagram.sigma_scalar(*t, UNROLLED, r3)
    assert np.abs(sx - s * y).max() <= 1e-9 * np.abs(sx).max()


def test_program_parse_errors():
    with pytest.raises(ParseError):
        diagram.parse_program("graph g\nlayer bogus:i\n")
    with pytest.raises(ParseError):
        diagram.parse_program("graph g\nfrobnicate\n")
    with pytest.raises(TypeMismatch):
        diagram.parse_program("input V:i\noutput V:i\nlayer idd:i\n")
    with pytest.raises(TypeMismatch):
        diagram.parse_program("input V:i\noutput V:j\nlayer id:i\n")


def test_identity_strand(r3):
    prog = diagram.parse_program("input V:i\noutput V:i\nlayer id:i\n")
    assert np.array_equal(diagram.eval_diagram(prog, {"i": 0.4}, rd=r3), np.eye(3))


@pytest.mark.parametrize("c", [0.4, 1.3 + 0.5j, 0])
def test_zigzag_diagram(r3, c):
    left = diagram.parse_program(
        "input V:i\noutput V:i\nlayer b:i id:i\nlayer id:i d:i\n")
    right = diagram.parse_program(
        "input V:i\noutput V:i\nlayer id:i bp:i\nlayer dp:i id:i\n")
    for prog in (left, right):
        m = diagram.eval_diagram(prog, {"i": c}, rd=r3)
        assert np.abs(m - np.eye(3)).max() <= 1e-12


@given(generic)
def test_family_iso_diagram(c):
    rd = RootData(3)
    lhs = diagram.parse_program(
        "input V:i* V:i\noutput\nlayer w:i* id:i\nlayer d:i\n")
    rhs = diagram.parse_program(
        "input V:i* V:i\noutput\nlayer id:i* w:i\nlayer dp:i*\n")
    a = diagram.eval_diagram(lhs, {"i": c}, rd=rd)
    b = diagram.eval_diagram(rhs, {"i": c}, rd=rd)
    assert np.abs(a - b).max() <= 1e-9 * max(1, np.abs(a).max())


def test_bundled_programs_typecheck():
    for graph in ("theta", "tetra"):
        for e in diagram.program_names(graph):
            prog = diagram.load_program(f"{graph}_{e}")
            assert prog.cut == e
            assert diagram.parse_program(prog.text()).layers == prog.layers


@given(admissible)
def test_theta_cut_independence(t):
    rd = RootData(3)
    vals = [diagram.theta_pairing(t, rd=rd, cut=c) for c in range(3)]
    top = max(abs(v) for v in vals)
    assert top > 0
    assert max(abs(v - vals[0]) for v in vals) <= 1e-8 * top


@given(admissible)
def test_theta_symmetries(t):
    rd = RootData(3)
    a, b, c = t
    dt = (-c, -b, -a)
    x = diagram.canonical_vector(*t, UNROLLED, rd)
    y = diagram.canonical_vector(*dt, UNROLLED, rd)
    p = diagram.theta_pairing(t, x, y, rd=rd)
    swapped = diagram.theta_pairing(dt, y, x, rd=rd)
    rotated = diagram.theta_pairing((b, c, a), diagram.sigma(x, t, UNROLLED, rd),
                                    diagram.rotate_vector(y, dt, UNROLLED, rd, 2), rd=rd)
    assert abs(swapped - p) <= 1e-8 * abs(p)
    assert abs(rotated - p) <= 1e-8 * abs(p)


def test_theta_bilinear(r3):
    t = (0.5, 0.7, 0.8)
    x = diagram.canonical_vector(*t, UNROLLED, r3)
    p = diagram.theta_pairing(t, rd=r3)
    assert abs(diagram.theta_pairing(t, x=2.5j * x, rd=r3) - 2.5j * p) <= 1e-12 * abs(p)


def test_theta_dim_zero(r3):
    with pytest.raises(DimZero):
        diagram.theta_pairing((0.5, 0.7, 0.9), rd=r3)


def test_tetra_cut_independence(r3):
    rng = np.random.default_rng(3)
    for _ in range(5):
        tau = sample_good_tuple(rng, r3)
        vals = [diagram.eval_tetra_graph(tau, cut=e, rd=r3) for e in diagram.TETRA_EDGES]
        top = max(abs(v) for v in vals)
        assert np.isfinite(top) and top > 0
        assert max(abs(v - vals[0]) for v in vals) <= 1e-8 * top


def test_tetra_dim_zero_gives_zero(r3):
    assert diagram.eval_tetra_graph((0.5, 0.7, 0.9, 0.3, 0.2, 0.6), rd=r3) == 0


def test_tetra_explicit_coupons_dim_zero(r3):
    with pytest.raises(DimZero):
        diagram.eval_tetra_graph((0.5, 0.7, 0.9, 0.3, 0.2, 0.6), coupons=[None] * 4, rd=r3)


def test_tetra_reversal_rewrite_keeps_value(r3):
    tau = sample_good_tuple(np.random.default_rng(11), r3)
    base = diagram.eval_tetra_graph(tau, cut="i", rd=r3)
    for e in ("j", "k", "l"):
        v = diagram.eval_tetra_graph(tau, cut="i", rd=r3, reverse=(e,))
        # the rewrite only moves w across the cap (compatibility equation)
        assert abs(v - base) <= 1e-8 * abs(base)


def test_truncated_matches_unrolled_space(r3):
    rng = np.random.default_rng(5)
    for _ in range(20):
        a, b = (canon_mod(sample_color(rng), 6) for _ in range(2))
        c = -a - b + 2 * int(rng.integers(-1, 2))
        if not (_far(c) and _far(a + b)):
            continue
        x = diagram.canonical_vector(a, b, c, UNROLLED, r3)
        y = diagram.canonical_vector(a, b, c, TRUNCATED, r3)
        assert np.abs(x - y).max() <= 1e-9 * np.abs(x).max()


def test_gauge_override_rescales(r3):
    t = (0.5, 0.7, 0.8)
    x = diagram.canonical_vector(*t, UNROLLED, r3).copy()
    with diagram.gauge_override({t: 3 - 1j}, UNROLLED, r3):
        assert np.allclose(diagram.canonical_vector(*t, UNROLLED, r3), (3 - 1j) * x)
    assert np.array_equal(diagram.canonical_vector(*t, UNROLLED, r3), x)


def test_theta_d_weighting(r3):
    # the value at cut c is d(c) times the scalar of the cut diagram
    t = (0.5, 0.7, 0.8)
    p0 = diagram.theta_pairing(t, rd=r3, cut=0)
    prog = diagram.load_program("theta_i")
    vecs = {"x": diagram.canonical_vector(*t, UNROLLED, r3),
            "y": diagram.canonical_vector(-0.8, -0.7, -0.5, UNROLLED, r3)}
    mat = diagram.eval_diagram(prog, {"i": 0.5, "j": 0.7, "k": 0.8}, vecs, rd=r3)
    assert abs(mod_dim(0.5, r3) * diagram.scalar_of(mat) - p0) <= 1e-12 * abs(p0)


def test_einsum_matches_kronecker_layers(r3):
    tau = sample_good_tuple(np.random.default_rng(5), r3)
    colors = dict(zip(diagram.TETRA_EDGES, tau))
    vecs = {f"x{s + 1}": diagram.canonical_vector(*t, UNROLLED, r3)
            for s, t in enumerate(diagram.tetra_triples(tau))}
    for e in diagram.TETRA_EDGES:
        prog = diagram.load_program(f"tetra_{e}")
        a = diagram.eval_diagram(prog, colors, vecs, UNROLLED, r3)
        b = diagram.eval_diagram_layers(prog, colors, vecs, UNROLLED, r3)
        assert a.shape == b.shape
        assert np.max(np.abs(a - b)) <= 1e-9 * max(1.0, np.max(np.abs(b)))
