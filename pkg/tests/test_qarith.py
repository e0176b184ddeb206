import cmath
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tetratv.errors import NotTypical
from tetratv.qarith import (
    QColor,
    RootData,
    canon_mod,
    close,
    is_integral,
    is_typical,
    mod_dim,
    parse_complex,
    q_power,
    qn,
)

finite = st.floats(-6, 6, allow_nan=False)
complexes = st.builds(complex, finite, finite)
roots = st.sampled_from([RootData(3), RootData(5), RootData(7), RootData(5, 3), RootData(7, 3)])


def _typical(z):
    return not is_integral(z) and abs(z.real - round(z.real)) > 1e-3 or abs(z.imag) > 1e-3


@pytest.mark.parametrize("r,k", [(3, 2), (4, 1), (9, 3), (1, 1), (5, 5)])
def test_rootdata_rejects_bad_parameters(r, k):
    with pytest.raises(ValueError):
        RootData(r, k)


def test_q_power_examples(r3):
    assert q_power(0, r3) == 1
    assert abs(q_power(3, r3) + 1) < 1e-15
    # e^{i pi / 3}
    assert abs(q_power(1, r3) - complex(0.5, math.sqrt(3) / 2)) < 1e-15
    assert abs(q_power(1, r3) - complex(0.5, 0.8660254)) < 1e-7


@pytest.mark.parametrize("r,k", [(3, 1), (5, 3), (7, 5)])
def test_q_to_the_r_is_minus_one(r, k):
    assert abs(q_power(r, RootData(r, k)) + 1) < 1e-14


def test_qn_examples(r3):
    assert qn(0, r3) == 0
    assert abs(qn(3, r3)) < 1e-15
    assert abs(qn(1, r3) - 2j * math.sin(math.pi / 3)) < 1e-15
    assert abs(qn(1, r3) - 1.7320508j) < 1e-7


@given(complexes, roots)
def test_qn_antisymmetric(a, rd):
    assert qn(-a, rd) == -qn(a, rd)


@pytest.mark.parametrize("r", [3, 5, 7])
def test_qn_vanishes_exactly_on_multiples_of_r(r):
    rd = RootData(r)
    for a in range(-3 * r, 3 * r + 1):
        assert (abs(qn(a, rd)) < 1e-12) == (a % r == 0), a


def test_mod_dim_at_three(r3):
    # qn(2) qn(1) = (i sqrt3)^2 = -3
    assert abs(mod_dim(3, r3) - (-1 / 3)) < 1e-14


def test_mod_dim_half(r3):
    def qn_sin(a):
        return 2j * math.sin(a * math.pi / 3)

    expect = 1 / (qn_sin(-0.5) * qn_sin(-1.5))
    assert abs(mod_dim(0.5, r3) - expect) < 1e-14


@pytest.mark.parametrize("c", [1, 2, -1, 4, 1 + 1e-8])
def test_mod_dim_rejects_non_typical(r3, c):
    with pytest.raises(NotTypical):
        mod_dim(c, r3)


@given(complexes.filter(_typical), roots)
def test_mod_dim_nonzero_and_periodic(c, rd):
    d = mod_dim(c, rd)
    assert d != 0 and cmath.isfinite(d)
    assert abs(mod_dim(c + 2 * rd.r, rd) - d) <= 1e-9 * abs(d)


def test_typicality(r3):
    assert is_typical(0.5, r3) and is_typical(3, r3) and is_typical(-6, r3)
    assert is_typical(1j, r3)
    assert not is_typical(1, r3) and not is_typical(-2, r3)
    assert not is_typical(2 + 5e-7, r3)


def test_close_is_relative():
    assert close(1e6, 1e6 + 1e-4)
    assert not close(1.0, 1.001)


@given(complexes, st.integers(-5, 5))
def test_qcolor_classes(c, t):
    a, b = QColor(c, 3), QColor(c + 6 * t, 3)
    assert a == b and hash(a) == hash(b)
    assert 0 <= a.rep.real < 6
    assert a.star() == QColor(-c, 3)


def test_canon_mod_window():
    assert canon_mod(-0.5, 6) == 5.5
    assert canon_mod(6 - 1e-14, 6) == 0


@pytest.mark.parametrize("text,value", [
    ("0.5", 0.5), ("2i", 2j), ("-1.4", -1.4), ("0.3+0.1i", 0.3 + 0.1j),
    ("1-2.5i", 1 - 2.5j), ("-i", -1j), ("1e-3+2e1i", 0.001 + 20j),
])
def test_parse_complex(text, value):
    assert parse_complex(text) == value


@pytest.mark.parametrize("text", ["", "abc", "1+", "i2", "1++2i"])
def test_parse_complex_rejects(text):
    with pytest.raises(ValueError):
        parse_complex(text)
