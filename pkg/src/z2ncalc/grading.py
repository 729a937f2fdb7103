"""Z2^n degree arithmetic: Koszul signs, parity, the standard ordering.

A degree is a tuple of n bits. Addition is componentwise mod 2, so every
degree is its own additive inverse. Two homogeneous elements of degrees a, b
commute up to the sign (-1)^<a,b> where <.,.> is the mod-2 dot product.
"""

from itertools import product


class GradingError(ValueError):
    """Configuration error in degree arithmetic (length mismatch, n < 1)."""


Degree = tuple


def check_degree(a, n):
    """Validate that a is a bit tuple of length n; return it as a tuple."""
    t = tuple(a)
    if len(t) != n or any(b not in (0, 1) for b in t):
        raise GradingError(f"not a Z2^{n} degree: {a!r}")
    return t


def deg_add(a, b):
    """Componentwise sum mod 2."""
    if len(a) != len(b):
        raise GradingError(f"degree length mismatch: {a!r} vs {b!r}")
    return tuple((x + y) % 2 for x, y in zip(a, b))


def dot2(a, b):
    """Mod-2 dot product of two degrees."""
    if len(a) != len(b):
        raise GradingError(f"degree length mismatch: {a!r} vs {b!r}")
    return sum(x * y for x, y in zip(a, b)) % 2


def koszul_sign(a, b):
    """The commutation sign (-1)^<a,b> for degrees a, b."""
    return -1 if dot2(a, b) else 1


def parity(a):
    """0 for even (bit-sum = 0 mod 2), 1 for odd."""
    return sum(a) % 2


def is_even(a):
    return parity(a) == 0


def is_odd(a):
    return parity(a) == 1


def zero_degree(n):
    return (0,) * n


def standard_order(n):
    """All 2^n degrees: even ones first, lexicographically, then odd ones.

    The position of a degree in this list fixes the block ordering of graded
    matrices and the canonical generator order of graded function algebras.
    """
    if n < 1:
        raise GradingError("grading height n must be >= 1")
    degrees = [tuple(bits) for bits in product((0, 1), repeat=n)]
    evens = [d for d in degrees if is_even(d)]
    odds = [d for d in degrees if is_odd(d)]
    return tuple(evens + odds)


def order_position(deg, n):
    """Index of deg in standard_order(n)."""
    return standard_order(n).index(check_degree(deg, n))


def format_degree(a):
    """Serialize as a parenthesized bit tuple, e.g. (1,0,1)."""
    return "(" + ",".join(str(b) for b in a) + ")"
