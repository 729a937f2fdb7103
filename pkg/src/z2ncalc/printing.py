"""Canonical printers for the CLI grammar.

print -> parse -> print is a fixed point for every value type: printers are
pure functions of the canonical (expanded, cancelled) representation.
"""

import sympy
from sympy import Add, Mul, Pow, Rational, Symbol, fraction

from .gfun import DomainError
from .grading import format_degree
from .scalars import canonical_scalar, is_opaque


def _print_rational(q):
    q = Rational(q)
    if q.q == 1:
        return str(q.p)
    return f"{q.p}/{q.q}"


def print_rational(q):
    return _print_rational(q)


def _print_atom(e):
    if e.is_Rational:
        s = _print_rational(e)
        return f"({s})" if e < 0 else s
    if isinstance(e, Symbol):
        return e.name
    if is_opaque(e):
        args = ", ".join(print_scalar(a) for a in e.args)
        return f"{type(e).__name__}({args})"
    return "(" + print_scalar(e) + ")"


def _print_factor(e):
    if isinstance(e, Pow) and e.exp.is_Integer:
        return f"{_print_atom(e.base)}^{int(e.exp)}"
    return _print_atom(e)


def _print_monomial(term):
    """One product term: rational coefficient times powers of atoms."""
    coeff = sympy.Integer(1)
    factors = []
    for f in term.as_ordered_factors():
        if f.is_Rational:
            coeff *= f
        else:
            factors.append(f)
    neg = coeff < 0
    coeff = abs(coeff)
    bits = []
    if coeff != 1 or not factors:
        bits.append(_print_rational(coeff))
    bits.extend(_print_factor(f) for f in factors)
    return neg, "*".join(bits)


def _join_terms(parts):
    out = ""
    for i, (neg, s) in enumerate(parts):
        if i == 0:
            out = ("-" if neg else "") + s
        else:
            out += (" - " if neg else " + ") + s
    return out


def _print_poly(e):
    e = sympy.expand(e)
    if e == 0:
        return "0"
    terms = e.args if isinstance(e, Add) else [e]
    terms = sorted(terms, key=sympy.default_sort_key)
    return _join_terms([_print_monomial(t) for t in terms])


def print_scalar(e):
    """Canonical string of a scalar expression in the CLI grammar."""
    e = canonical_scalar(e)
    num, den = fraction(sympy.together(e))
    if den == 1:
        return _print_poly(num)
    if den.is_Rational:
        return _print_poly(num / den)
    return f"({_print_poly(num)})*({_print_poly(sympy.expand(den))})^-1"


def _print_gen_mono(domain, exps):
    bits = []
    for (name, _), k in zip(domain.generators, exps):
        if k == 0:
            continue
        bits.append(name if k == 1 else f"{name}^{k}")
    return "*".join(bits)


def _coeff_with_mono(coeff_str, mono):
    if not mono:
        return coeff_str
    if coeff_str == "1":
        return mono
    if coeff_str == "-1":
        return "-" + mono
    needs_parens = (" + " in coeff_str) or (" - " in coeff_str)
    if needs_parens:
        return f"({coeff_str})*{mono}"
    if coeff_str.startswith("-"):
        return f"-{coeff_str[1:]}*{mono}"
    return f"{coeff_str}*{mono}"


def _print_series(domain, terms):
    if not terms:
        return "0"
    parts = []
    for exps in sorted(terms, key=lambda e: (sum(e), e)):
        coeff = print_scalar(terms[exps])
        mono = _print_gen_mono(domain, exps)
        s = _coeff_with_mono(coeff, mono)
        if s.startswith("-"):
            parts.append((True, s[1:]))
        else:
            parts.append((False, s))
    return _join_terms(parts)


def print_gfun(f):
    """Canonical string of a graded function: monomials by weight then
    exponent order, coefficients in canonical scalar form."""
    return _print_series(f.domain, f.terms)


def print_laurent(L):
    return _print_series(L.domain, L.terms)


def print_value(v):
    """Dispatch on the value types the CLI emits."""
    from .berez import LaurentFunction
    from .gfun import GradedFunction

    if isinstance(v, GradedFunction):
        return print_gfun(v)
    if isinstance(v, LaurentFunction):
        return print_laurent(v)
    if isinstance(v, (int, sympy.Basic)):
        return print_scalar(sympy.sympify(v))
    raise DomainError(f"cannot print value of type {type(v).__name__}")


def print_matrix(m):
    lines = []
    for row in m.entries:
        lines.append("[" + ", ".join(print_gfun(e) for e in row) + "]")
    return "\n".join(lines)


def print_matrix_file(m):
    """Full matrix file: degree, shapes, then rows."""
    head = [
        "deg = " + format_degree(m.deg),
        "rows = " + ",".join(str(c) for c in m.row_shape),
        "cols = " + ",".join(str(c) for c in m.col_shape),
    ]
    return "\n".join(head) + "\n" + print_matrix(m)
