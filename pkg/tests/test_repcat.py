import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tetratv.errors import FlavorMismatch, NotTypical
from tetratv.qarith import TRUNCATED, UNROLLED, RootData, canon_mod, q_power
from tetratv.repcat import (
    dual,
    duality_morphisms,
    family_iso_residual,
    pivotal_w,
    relation_residuals,
    tensor,
    typical_module,
)

coord = st.floats(-4, 4, allow_nan=False)
colors = st.builds(complex, coord, coord).filter(
    lambda z: abs(z.imag) > 1e-2 or abs(z.real - round(z.real)) > 1e-2)
roots = st.sampled_from([RootData(3), RootData(5), RootData(7), RootData(5, 3)])
flavors = st.sampled_from([UNROLLED, TRUNCATED])


def _sorted(ws):
    return sorted((round(complex(w).real, 8), round(complex(w).imag, 8)) for w in ws)


def test_zero_module_weights(r3):
    M = typical_module(0, UNROLLED, r3)
    assert [complex(w) for w in M.weights] == [2, 0, -2]
    q = q_power(1, r3)
    assert np.allclose(M.K, np.diag([q**2, 1, q**-2]))


def test_zero_module_raising(r3):
    # [1][2] = 1 at r = 3 because qn(2) = qn(1)
    M = typical_module(0, UNROLLED, r3)
    v1 = np.array([0, 1, 0])
    assert np.allclose(M.E @ v1, [1, 0, 0])


def test_basis_is_f_orbit(r5):
    M = typical_module(0.3 + 0.2j, UNROLLED, r5)
    assert np.array_equal(M.F, np.eye(5, k=-1))


@pytest.mark.parametrize("c", [1, 2, -1, -2, 4])
def test_rejects_atypical(r3, c):
    with pytest.raises(NotTypical):
        typical_module(c, UNROLLED, r3)


def test_truncated_rejects_integers(r3):
    with pytest.raises(NotTypical):
        typical_module(3, TRUNCATED, r3)


@given(colors, roots, flavors)
def test_relations(c, rd, flavor):
    M = typical_module(c, flavor, rd)
    assert max(relation_residuals(M).values()) <= 1e-9
    # simplicity witness
    for j in range(1, rd.r):
        assert np.linalg.norm(M.E[:, j]) > 0


@given(colors, colors, roots)
def test_tensor_relations_and_character(a, b, rd):
    M, N = typical_module(a, UNROLLED, rd), typical_module(b, UNROLLED, rd)
    T = tensor(M, N)
    assert T.dim == rd.r ** 2
    assert max(relation_residuals(T).values()) <= 1e-9
    rp = rd.rprime
    expect = [a + b + 2 * l + 2 * m for l in range(-rp, rp + 1) for m in range(-rp, rp + 1)]
    assert _sorted(np.diag(T.H)) == _sorted(expect)


def test_tensor_flavor_mismatch(r3):
    with pytest.raises(FlavorMismatch):
        tensor(typical_module(0.5, UNROLLED, r3), typical_module(0.5, TRUNCATED, r3))


@given(colors, roots)
def test_forgetful_projection(c, rd):
    c = canon_mod(c, 2 * rd.r)
    U, T = typical_module(c, UNROLLED, rd), typical_module(c, TRUNCATED, rd)
    for g in ("E", "F", "K", "Ki"):
        assert np.array_equal(getattr(U, g), getattr(T, g))
    assert T.H is None
    assert typical_module(c + 2 * rd.r, TRUNCATED, rd).E is T.E


@given(colors, roots, flavors)
def test_dual_is_module_and_double_dual(c, rd, flavor):
    M = typical_module(c, flavor, rd)
    D = dual(M)
    assert max(relation_residuals(D).values()) <= 1e-9
    assert _sorted(dual(D).weights) == _sorted(M.weights)


@given(colors, roots)
def test_dual_of_vi_has_weights_of_v_minus_i(c, rd):
    assert _sorted(dual(typical_module(c, UNROLLED, rd)).weights) == \
        _sorted(typical_module(-c, UNROLLED, rd).weights)


@given(colors, roots)
def test_dual_highest_weight_vector(c, rd):
    r = rd.r
    D = dual(typical_module(-c, UNROLLED, rd))
    f = np.zeros(r)
    f[r - 1] = 1
    assert np.allclose(D.E @ f, 0)
    assert np.allclose(D.H @ f, (c + r - 1) * f)


@given(colors, roots, flavors)
def test_duality_morphisms(c, rd, flavor):
    M = typical_module(c, flavor, rd)
    n = M.dim
    b, d, bp, dp = duality_morphisms(M)
    for m in (b, d, bp, dp):
        assert m.residual() <= 1e-9
    eye = np.eye(n)
    # (Id (x) d)(b (x) Id) and (d' (x) Id)(Id (x) b') as maps M -> M
    left = np.kron(eye, d.matrix) @ np.kron(b.matrix, eye)
    right = np.kron(dp.matrix, eye) @ np.kron(eye, bp.matrix)
    assert np.abs(left - eye).max() <= 1e-9
    assert np.abs(right - eye).max() <= 1e-9


@given(colors, roots)
def test_quantum_trace(c, rd):
    M = typical_module(c, UNROLLED, rd)
    b, _, _, dp = duality_morphisms(M)
    lam = c + rd.r - 1
    terms = [q_power((1 - rd.r) * (lam - 2 * j), rd) for j in range(rd.r)]
    got = (dp.matrix @ b.matrix)[0, 0]
    # the terms can cancel heavily, so compare against their total size
    assert abs(got - sum(terms)) <= 1e-12 * max(1, sum(abs(t) for t in terms))


@pytest.mark.parametrize("c", [0, 3, 6])
def test_pivotal_w_on_multiples_of_r(r3, c):
    W = pivotal_w(c, UNROLLED, r3)
    e = np.zeros(3)
    e[2] = 1
    assert np.allclose(W.matrix[:, 0], e)
    assert W.residual() <= 1e-9


@given(colors, roots, flavors)
def test_pivotal_w_family(c, rd, flavor):
    W = pivotal_w(c, flavor, rd)
    assert W.residual() <= 1e-9
    assert abs(np.linalg.det(W.matrix)) > 0
    assert family_iso_residual(c, flavor, rd) <= 1e-9


def test_pivotal_w_partner_is_unique(r3):
    # the compatibility equation fixes w_{-i} once w_i is chosen: rescaling
    # w_{-i} by any s != 1 breaks it
    c = 0.4 + 0.3j
    Wc = pivotal_w(c, UNROLLED, r3).matrix
    Wp = pivotal_w(-c, UNROLLED, r3).matrix
    K = typical_module(c, UNROLLED, r3).K
    piv = np.diag(np.diag(K) ** (1 - 3))
    ratio = (piv @ Wp)[np.nonzero(Wc.T)] / Wc.T[np.nonzero(Wc.T)]
    assert np.allclose(ratio, ratio[0])
    assert abs(ratio[0] - 1) < 1e-9
