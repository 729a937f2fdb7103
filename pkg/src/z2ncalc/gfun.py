"""Graded function algebras: truncated series in nonzero-degree generators.

A GradedFunction models a superfunction sum_alpha f_alpha(x) xi^alpha: a
finite dict from generator-exponent tuples to scalar coefficients, truncated
at a per-domain total generator weight T. Odd generators are nilpotent
(exponents in {0,1}); multiplication reorders monomials into the canonical
generator order, picking up Koszul signs.
"""

from dataclasses import dataclass, field
from math import factorial

import sympy
from sympy import Integer, Rational, Symbol

from .grading import (
    check_degree,
    deg_add,
    dot2,
    is_odd,
    koszul_sign,
    order_position,
    zero_degree,
)
from .scalars import canonical_scalar, scalar_is_zero


class DomainError(ValueError):
    """Violation of a graded-domain precondition."""


INFINITY = float("inf")


@dataclass(frozen=True)
class DomainSpec:
    """A coordinate domain: grading height, base variables, generators, T.

    Generators are stored in canonical order: sorted by the standard-order
    position of their degree, declaration order breaking ties. Monomial
    exponent tuples are indexed by this order.
    """

    n: int
    base_vars: tuple
    generators: tuple  # of (name, degree) in canonical order
    truncation: int
    boxes: tuple = ()  # of (var name, lo, hi)
    allow_zero_degree: bool = False

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("grading height n must be >= 1")
        object.__setattr__(self, "base_vars", tuple(self.base_vars))
        gens = []
        for i, (name, deg) in enumerate(self.generators):
            deg = check_degree(deg, self.n)
            if not self.allow_zero_degree and deg == zero_degree(self.n):
                raise DomainError(f"generator {name} has degree zero")
            gens.append((order_position(deg, self.n), i, name, deg))
        gens.sort(key=lambda g: (g[0], g[1]))
        object.__setattr__(
            self, "generators", tuple((name, deg) for _, _, name, deg in gens)
        )
        object.__setattr__(self, "boxes", tuple(
            (v, Rational(lo), Rational(hi)) for v, lo, hi in self.boxes
        ))
        names = list(self.base_vars) + [g for g, _ in self.generators]
        if len(set(names)) != len(names):
            raise DomainError("coordinate names must be distinct")
        n_odd = sum(1 for _, d in self.generators if is_odd(d))
        if self.truncation < n_odd:
            raise DomainError(
                f"truncation {self.truncation} below odd generator count {n_odd}"
            )

    @property
    def gen_names(self):
        return tuple(name for name, _ in self.generators)

    @property
    def gen_degrees(self):
        return tuple(deg for _, deg in self.generators)

    def gen_index(self, name):
        try:
            return self.gen_names.index(name)
        except ValueError:
            raise DomainError(f"unknown generator {name}") from None

    def gen_degree(self, name):
        return self.gen_degrees[self.gen_index(name)]

    def coord_names(self):
        """All coordinates, base variables first then canonical generators."""
        return tuple(self.base_vars) + self.gen_names

    def coord_degree(self, name):
        if name in self.base_vars:
            return zero_degree(self.n)
        return self.gen_degree(name)

    def box_for(self, var):
        for v, lo, hi in self.boxes:
            if v == var:
                return (lo, hi)
        return None


def mono_sign(degrees, ea, eb):
    """Koszul sign merging word(ea) * word(eb) into canonical order."""
    exp = 0
    for i in range(len(degrees)):
        if eb[i] == 0:
            continue
        for j in range(i + 1, len(degrees)):
            if ea[j]:
                exp += eb[i] * ea[j] * dot2(degrees[i], degrees[j])
    return -1 if exp % 2 else 1


def merge_mono(degrees, ea, eb):
    """(sign, exponents) of the product monomial, or (0, None) if nilpotent."""
    out = []
    for i, (a, b) in enumerate(zip(ea, eb)):
        c = a + b
        if is_odd(degrees[i]) and not 0 <= c <= 1:
            return 0, None
        out.append(c)
    return mono_sign(degrees, ea, eb), tuple(out)


class GradedFunction:
    """An element of the truncated graded function algebra of a DomainSpec."""

    __slots__ = ("domain", "terms")

    def __init__(self, domain, terms):
        self.domain = domain
        clean = {}
        for exps, coeff in terms.items():
            if sum(exps) > domain.truncation:
                continue
            coeff = sympy.expand(sympy.sympify(coeff))
            if coeff == 0:
                continue
            if scalar_is_zero(coeff):
                continue
            clean[tuple(exps)] = clean.get(tuple(exps), 0) + coeff
        self.terms = {e: c for e, c in clean.items() if c != 0}

    # -- constructors ------------------------------------------------------
    @classmethod
    def zero(cls, domain):
        return cls(domain, {})

    @classmethod
    def from_scalar(cls, domain, expr):
        return cls(domain, {(0,) * len(domain.generators): sympy.sympify(expr)})

    @classmethod
    def one(cls, domain):
        return cls.from_scalar(domain, 1)

    @classmethod
    def generator(cls, domain, name):
        exps = [0] * len(domain.generators)
        exps[domain.gen_index(name)] = 1
        return cls(domain, {tuple(exps): Integer(1)})

    @classmethod
    def coordinate(cls, domain, name):
        if name in domain.base_vars:
            return cls.from_scalar(domain, Symbol(name))
        return cls.generator(domain, name)

    # -- structure ---------------------------------------------------------
    @property
    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, GradedFunction):
            return NotImplemented
        return self.domain == other.domain and (self - other).is_zero

    def __hash__(self):
        raise TypeError("GradedFunction is not hashable")

    def degree(self):
        """The common degree of all monomials, or None if inhomogeneous/zero."""
        degs = set()
        for exps in self.terms:
            d = zero_degree(self.domain.n)
            for e, gd in zip(exps, self.domain.gen_degrees):
                if e % 2:
                    d = deg_add(d, gd)
            degs.add(d)
        if len(degs) == 1:
            return degs.pop()
        return None

    def is_homogeneous(self, deg):
        d = self.degree()
        return self.is_zero or d == check_degree(deg, self.domain.n)

    def max_weight(self):
        return max((sum(e) for e in self.terms), default=0)

    # -- ring operations ---------------------------------------------------
    def _check(self, other):
        if self.domain != other.domain:
            raise DomainError("operands live on different domains")

    def __add__(self, other):
        if not isinstance(other, GradedFunction):
            other = GradedFunction.from_scalar(self.domain, other)
        self._check(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0) + c
        return GradedFunction(self.domain, terms)

    __radd__ = __add__

    def __neg__(self):
        return GradedFunction(self.domain, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, GradedFunction):
            other = GradedFunction.from_scalar(self.domain, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, GradedFunction):
            return GradedFunction(
                self.domain,
                {e: c * sympy.sympify(other) for e, c in self.terms.items()},
            )
        self._check(other)
        degrees = self.domain.gen_degrees
        T = self.domain.truncation
        terms = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                if sum(ea) + sum(eb) > T:
                    continue
                sign, exps = merge_mono(degrees, ea, eb)
                if sign == 0:
                    continue
                terms[exps] = terms.get(exps, 0) + sign * ca * cb
        return GradedFunction(self.domain, terms)

    def __rmul__(self, other):
        # scalars are central, so this only hits the non-GradedFunction case
        return self.__mul__(other)

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise DomainError("graded functions support integer powers >= 0 only")
        out = GradedFunction.one(self.domain)
        for _ in range(k):
            out = out * self
        return out

    # -- the paper's operations -------------------------------------------
    def epsilon(self):
        """The generator-free coefficient (an algebra morphism to scalars)."""
        return self.terms.get((0,) * len(self.domain.generators), Integer(0))

    def j_valuation(self):
        """Minimal total generator weight among nonzero terms; +inf for 0."""
        if self.is_zero:
            return INFINITY
        return min(sum(e) for e in self.terms)

    def invert(self):
        """The multiplicative inverse up to truncation T.

        Requires an invertible scalar part: f = f0 (1 - t) with val(t) >= 1,
        and the inverse is f0^-1 sum_{l<=T} t^l.
        """
        f0 = self.epsilon()
        if scalar_is_zero(f0):
            raise DomainError("not invertible: scalar part vanishes")
        t = 1 - self * (Integer(1) / f0)
        assert t.is_zero or t.j_valuation() >= 1
        acc = GradedFunction.one(self.domain)
        p = GradedFunction.one(self.domain)
        for _ in range(self.domain.truncation):
            p = p * t
            if p.is_zero:
                break
            acc = acc + p
        return acc * (Integer(1) / f0)

    def partial(self, v):
        """Graded partial derivative with respect to coordinate v.

        Base variables differentiate coefficientwise. A generator acts as the
        left derivation of its degree: it moves past earlier factors in the
        canonical word picking up Koszul signs, then kills one occurrence.
        """
        dom = self.domain
        if v in dom.base_vars:
            sym = Symbol(v)
            return GradedFunction(
                dom, {e: sympy.diff(c, sym) for e, c in self.terms.items()}
            )
        j = dom.gen_index(v)
        degrees = dom.gen_degrees
        terms = {}
        for exps, coeff in self.terms.items():
            if exps[j] == 0:
                continue
            exp = sum(exps[i] * dot2(degrees[j], degrees[i]) for i in range(j))
            sign = -1 if exp % 2 else 1
            new = list(exps)
            new[j] -= 1
            new = tuple(new)
            terms[new] = terms.get(new, 0) + sign * exps[j] * coeff
        return GradedFunction(dom, terms)

    def eval_coeffs(self, point):
        """Substitute base variables by exact values in every coefficient."""
        subs = {Symbol(k): v for k, v in point.items()}
        return GradedFunction(
            dom := self.domain, {e: c.xreplace(subs) for e, c in self.terms.items()}
        )

    def map_coeffs(self, fn):
        return GradedFunction(self.domain, {e: fn(c) for e, c in self.terms.items()})

    def canonicalize(self):
        return self.map_coeffs(canonical_scalar)

    def __repr__(self):
        if self.is_zero:
            return "GradedFunction(0)"
        bits = []
        for exps in sorted(self.terms, key=lambda e: (sum(e), e)):
            mono = "*".join(
                f"{name}^{k}" if k != 1 else name
                for (name, _), k in zip(self.domain.generators, exps)
                if k
            )
            c = self.terms[exps]
            bits.append(f"({c})*{mono}" if mono else f"({c})")
        return "GradedFunction(" + " + ".join(bits) + ")"


def _multi_indices(r, max_total):
    """All exponent tuples of length r with total <= max_total."""
    if r == 0:
        yield ()
        return
    for head in range(max_total + 1):
        for tail in _multi_indices(r - 1, max_total - head):
            yield (head,) + tail


def taylor_scalar(domain, coeff, slot_vars, base_values, nilpotents):
    """Formal Taylor expansion of a scalar coefficient along nilpotent shifts.

    coeff is a scalar expression in slot_vars; each slot takes the value
    base_values[i] + nilpotents[i] where nilpotents[i] is a GradedFunction
    with j_valuation >= 1. Returns sum_beta (1/beta!) (d^beta coeff)(base)
    * prod nilpotents^beta, truncated at the domain weight.
    """
    coeff = sympy.sympify(coeff)
    subs = {v: sympy.sympify(s) for v, s in zip(slot_vars, base_values)}
    active = [i for i, nil in enumerate(nilpotents) if not nil.is_zero]
    T = domain.truncation
    out = GradedFunction.zero(domain)
    powers = {i: [GradedFunction.one(domain)] for i in active}
    for beta in _multi_indices(len(active), T):
        deriv = coeff
        fact = 1
        for pos, k in enumerate(beta):
            i = active[pos]
            if k:
                deriv = sympy.diff(deriv, slot_vars[i], k)
                fact *= factorial(k)
        if deriv == 0:
            continue
        piece = GradedFunction.from_scalar(
            domain, deriv.xreplace(subs) * Rational(1, fact)
        )
        for pos, k in enumerate(beta):
            i = active[pos]
            while len(powers[i]) <= k:
                powers[i].append(powers[i][-1] * nilpotents[i])
            piece = piece * powers[i][k]
        out = out + piece
    return out


def taylor_substitute(fsym, args, dindex=None):
    """Substitute degree-zero even graded functions into an opaque symbol.

    fsym is a symbol name (with optional derivative multi-index); each arg
    must be a GradedFunction all of whose monomials have degree gamma_0.
    """
    from .scalars import applied

    if not args:
        raise DomainError("taylor_substitute needs at least one argument")
    domain = args[0].domain
    g0 = zero_degree(domain.n)
    for a in args:
        if a.domain != domain:
            raise DomainError("arguments live on different domains")
        if not a.is_homogeneous(g0):
            raise DomainError("taylor_substitute argument must be even of degree zero")
    slots = [Symbol(f"_slot{i}") for i in range(len(args))]
    coeff = applied(fsym, slots, dindex)
    base = [a.epsilon() for a in args]
    nilp = [a - GradedFunction.from_scalar(domain, a.epsilon()) for a in args]
    return taylor_scalar(domain, coeff, slots, base, nilp)
