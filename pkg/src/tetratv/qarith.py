"""Scalar arithmetic at an odd root of unity.

Everything is double precision complex.  Colors are plain ``complex``
values; the truncated flavor works with classes modulo ``2r`` and uses
:class:`QColor` (or :func:`canon_mod`) to pick a representative.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import cached_property

from .errors import NotTypical

INT_GATE = 1e-6
DEFAULT_TOL = 1e-9

UNROLLED = "unrolled"
TRUNCATED = "truncated"
FLAVORS = (UNROLLED, TRUNCATED)


@dataclass(frozen=True)
class RootData:
    r: int
    k: int = 1

    def __post_init__(self):
        r, k = self.r, self.k
        if not isinstance(r, int) or r < 3 or r % 2 == 0:
            raise ValueError(f"r must be an odd integer >= 3, got {r!r}")
        if not isinstance(k, int) or k % 2 == 0 or math.gcd(k, r) != 1:
            raise ValueError(f"k must be odd and coprime to r={r}, got {k!r}")

    @property
    def rprime(self) -> int:
        return (self.r - 1) // 2

    @cached_property
    def q(self) -> complex:
        return q_power(1, self)

    def __repr__(self):
        return f"RootData(r={self.r}, k={self.k})"


def q_power(x, rd: RootData) -> complex:
    """q^x = exp(x k i pi / r)."""
    return cmath.exp(complex(x) * rd.k * 1j * math.pi / rd.r)


def qn(a, rd: RootData) -> complex:
    """The symmetric quantum difference q^a - q^-a."""
    return q_power(a, rd) - q_power(-a, rd)


def qint(a, rd: RootData) -> complex:
    """Quantum integer [a] = qn(a) / qn(1)."""
    return qn(a, rd) / qn(1, rd)


def close(a, b, tol: float = DEFAULT_TOL) -> bool:
    a, b = complex(a), complex(b)
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def is_integral(x, gate: float = INT_GATE) -> bool:
    x = complex(x)
    return abs(x.imag) <= gate and abs(x.real - round(x.real)) <= gate


def is_typical(x, rd: RootData) -> bool:
    """Membership in (C minus Z) union rZ."""
    if not is_integral(x):
        return True
    return round(complex(x).real) % rd.r == 0


def star(x) -> complex:
    """The involution on colors: negation."""
    return -complex(x)


def canon_mod(x, period: float) -> complex:
    """Representative of x modulo ``period`` with real part in [0, period)."""
    x = complex(x)
    re = x.real % period
    # snap values that sit numerically on the upper end of the window
    if period - re <= 1e-12 * max(1.0, period):
        re = 0.0
    return complex(re, x.imag)


def mod_dim(i, rd: RootData) -> complex:
    """Modified dimension 1 / prod_{j=0}^{r-2} qn(i - j - 1) on typical colors."""
    i = complex(i)
    if not is_typical(i, rd):
        raise NotTypical(f"color {i} is integral but not a multiple of r={rd.r}")
    prod = 1.0 + 0j
    for j in range(rd.r - 1):
        prod *= qn(i - j - 1, rd)
    return 1.0 / prod


def color_key(x, digits: int = 12) -> tuple:
    """Hashable rounded form of a complex color (used by caches)."""
    x = complex(x)
    re = round(x.real, digits) + 0.0
    im = round(x.imag, digits) + 0.0
    return (re, im)


@dataclass(frozen=True)
class QColor:
    """A class in C / 2rZ, stored through its representative with Re in [0, 2r)."""

    rep: complex
    r: int

    def __init__(self, value, r: int):
        object.__setattr__(self, "rep", canon_mod(value, 2 * r))
        object.__setattr__(self, "r", r)

    def __eq__(self, other):
        if not isinstance(other, QColor) or other.r != self.r:
            return NotImplemented
        d = self.rep - other.rep
        return is_integral(d / (2 * self.r)) and abs(d.imag) <= INT_GATE

    def __hash__(self):
        return hash((color_key(self.rep, 6), self.r))

    def star(self) -> "QColor":
        return QColor(-self.rep, self.r)

    def __add__(self, other):
        other = other.rep if isinstance(other, QColor) else other
        return QColor(self.rep + other, self.r)

    def __repr__(self):
        return f"QColor({format_complex(self.rep)} mod {2 * self.r})"


def format_complex(z, digits: int = 12) -> str:
    z = complex(z)
    re = float(f"{z.real:.{digits}g}") + 0.0
    im = float(f"{z.imag:.{digits}g}") + 0.0
    if im == 0:
        return repr(re)
    sign = "+" if im >= 0 else "-"
    return f"{re!r}{sign}{abs(im)!r}i"


def parse_complex(text: str) -> complex:
    """Parse ``a``, ``bi`` or ``a+bi`` style literals (``j`` is accepted too)."""
    s = text.strip().replace(" ", "").replace("I", "i").replace("j", "i")
    if not s:
        raise ValueError("empty complex literal")
    try:
        return complex(s.replace("i", "j"))
    except ValueError:
        pass
    if s.endswith("i"):
        body = s[:-1]
        if body in ("", "+", "-"):
            return complex(0, float(body + "1"))
    raise ValueError(f"cannot parse complex literal {text!r}")
