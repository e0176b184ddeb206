"""Grading of the truncated category by G = C/2Z.

A truncated color c (a class in C/2rZ) has grade c mod 2; the forbidden
set X is the image of the integers.  Each admissible grade g carries the r
colors g, g+2, ..., g+2(r-1) mod 2r, and the b-map is the constant r^-2.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import ForbiddenGrade
from .qarith import INT_GATE, RootData, canon_mod, is_integral


@dataclass(frozen=True)
class Grade:
    """A class in C/2Z, stored with real part in [0, 2)."""

    rep: complex

    def __init__(self, value):
        if isinstance(value, Grade):
            value = value.rep
        object.__setattr__(self, "rep", canon_mod(value, 2))

    def __add__(self, other):
        other = other.rep if isinstance(other, Grade) else other
        return Grade(self.rep + other)

    def __neg__(self):
        return Grade(-self.rep)

    def __sub__(self, other):
        return self + (-Grade(other))

    def __eq__(self, other):
        if not isinstance(other, Grade):
            other = Grade(other)
        return is_integral((self.rep - other.rep) / 2)

    def __hash__(self):
        return hash((round(self.rep.real, 6) % 2, round(self.rep.imag, 6)))

    def __repr__(self):
        return f"Grade({self.rep.real:.12g}{self.rep.imag:+.12g}i)"


def in_X(g) -> bool:
    """g lies in Z/2Z."""
    return is_integral(Grade(g).rep)


def grade_of(c, rd: RootData | None = None) -> Grade:
    return Grade(c)


@dataclass(frozen=True)
class IndexSet:
    grade: Grade
    colors: tuple

    def __len__(self):
        return len(self.colors)

    def __iter__(self):
        return iter(self.colors)


def index_set(g, rd: RootData) -> IndexSet:
    g = Grade(g)
    if in_X(g):
        raise ForbiddenGrade(f"grade {g} lies in X")
    r = rd.r
    cols = tuple(canon_mod(g.rep + 2 * t, 2 * r) for t in range(r))
    return IndexSet(g, cols)


def b_weight(c, rd: RootData) -> float:
    if is_integral(c):
        raise ForbiddenGrade(f"b is only defined on non-integral colors, got {c}")
    return 1.0 / rd.r ** 2


def truncated_dim(a, b, c, rd: RootData) -> int:
    """dim H(a, b, c) for truncated colors: 1 iff a + b + c is an even
    integer class mod 2r."""
    h = complex(a) + complex(b) + complex(c)
    if abs(h.imag) > INT_GATE or not is_integral(h):
        return 0
    return 1 if int(round(h.real)) % 2 == 0 else 0


def b_sum_residual(g1, g2, j, rd: RootData) -> float:
    """|b(j) - sum_{j1 in I^g1, j2 in I^g2} b(j1) b(j2) dim H(j, j1, j2)|."""
    g1, g2 = Grade(g1), Grade(g2)
    g = grade_of(j)
    for x in (g, g1, g2):
        if in_X(x):
            raise ForbiddenGrade(f"grade {x} lies in X")
    if not in_X(g + g1 + g2) or not (g + g1 + g2) == Grade(0):
        raise ForbiddenGrade("grades must satisfy g + g1 + g2 = 0")
    total = 0.0
    for j1 in index_set(g1, rd):
        for j2 in index_set(g2, rd):
            total += b_weight(j1, rd) * b_weight(j2, rd) * truncated_dim(j, j1, j2, rd)
    return abs(b_weight(j, rd) - total)


def face_heights(colors6):
    """Signed face sums i+j-k, k+l-m, n-l-j, m-n-i."""
    i, j, k, l, m, n = (complex(c) for c in colors6)
    return (i + j - k, k + l - m, n - l - j, m - n - i)


def lift_tetrahedron(colors6, rd: RootData):
    """Unrolled lifts of six truncated colors with every face height in
    {-(r-1), ..., r-1} and total height zero, or None when none exists."""
    r = rd.r
    reps = [canon_mod(c, 2 * r) for c in colors6]
    cur = face_heights(reps)
    targets, corr = [], []
    for h in cur:
        if not is_integral(h):
            return None
        hi = int(round(h.real))
        if hi % 2:
            return None
        t = (hi + r - 1) % (2 * r) - (r - 1)
        targets.append(t)
        corr.append(t - hi)
    if sum(targets) != 0:
        return None
    c1, c2, c3, _ = corr
    offsets = (0, 0, -c1, 0, -c1 - c2, c3)
    return tuple(c + o for c, o in zip(reps, offsets))
