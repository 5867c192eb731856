"""Small exact-arithmetic helpers for 2-vectors and 2x2 matrices.

Numbers are either ``Fraction`` (exact) or ``float``; mixing degrades to
float, which is the intended behaviour after irrational operations.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Tuple, Union

Number = Union[Fraction, float, int]
Vec = Tuple[Number, Number]
Mat = Tuple[Number, Number, Number, Number]  # row-major (a, b, c, d)

IDENTITY: Mat = (Fraction(1), Fraction(0), Fraction(0), Fraction(1))


def to_number(value) -> Number:
    """Parse ``"p/q"``, ints, Fractions or floats into a Number.

    Strings and ints become Fractions; floats stay floats.
    """
    if isinstance(value, bool):
        raise TypeError(f"not a number: {value!r}")
    if isinstance(value, (Fraction, int)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        return value
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    raise TypeError(f"not a number: {value!r}")


def is_exact(x) -> bool:
    return isinstance(x, (Fraction, int))


def exact_sqrt(x: Number) -> Number:
    """Square root, exact when ``x`` is a Fraction with square numerator and denominator."""
    if x < 0:
        raise ValueError(f"sqrt of negative number {x}")
    if is_exact(x):
        f = Fraction(x)
        p, q = f.numerator, f.denominator
        rp, rq = math.isqrt(p), math.isqrt(q)
        if rp * rp == p and rq * rq == q:
            return Fraction(rp, rq)
        return math.sqrt(f)
    return math.sqrt(x)


def vadd(u: Vec, v: Vec) -> Vec:
    return (u[0] + v[0], u[1] + v[1])


def vsub(u: Vec, v: Vec) -> Vec:
    return (u[0] - v[0], u[1] - v[1])


def vscale(s: Number, v: Vec) -> Vec:
    return (s * v[0], s * v[1])


def cross(u: Vec, v: Vec) -> Number:
    return u[0] * v[1] - u[1] * v[0]


def dot(u: Vec, v: Vec) -> Number:
    return u[0] * v[0] + u[1] * v[1]


def norm_sq(v: Vec) -> Number:
    return v[0] * v[0] + v[1] * v[1]


def norm(v: Vec) -> Number:
    return exact_sqrt(norm_sq(v))


def sign(x: Number) -> int:
    return (x > 0) - (x < 0)


def mat_vec(m: Mat, v: Vec) -> Vec:
    return (m[0] * v[0] + m[1] * v[1], m[2] * v[0] + m[3] * v[1])


def mat_mul(m: Mat, n: Mat) -> Mat:
    """Matrix product ``m @ n``."""
    return (
        m[0] * n[0] + m[1] * n[2],
        m[0] * n[1] + m[1] * n[3],
        m[2] * n[0] + m[3] * n[2],
        m[2] * n[1] + m[3] * n[3],
    )


def det(m: Mat) -> Number:
    return m[0] * m[3] - m[1] * m[2]


def rotation(angle: float) -> Mat:
    """Rotation matrix, exact for multiples of pi/2."""
    quarter = angle / (math.pi / 2)
    k = round(quarter)
    if abs(quarter - k) < 1e-12:
        c, s = [(1, 0), (0, 1), (-1, 0), (0, -1)][k % 4]
        return (Fraction(c), Fraction(-s), Fraction(s), Fraction(c))
    c, s = math.cos(angle), math.sin(angle)
    return (c, -s, s, c)


def fmt(x, digits: int = 12) -> str:
    """Render a number at ``digits`` significant digits (exact ints stay ints)."""
    if isinstance(x, Fraction) and x.denominator == 1:
        return str(x.numerator)
    return format(float(x), f".{digits}g")
