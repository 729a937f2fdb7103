"""Exact scalar coefficient arithmetic: the stand-in for smooth functions.

Scalars are sympy expressions built from rational constants, base-variable
symbols and opaque smooth function symbols F carrying a derivative
multi-index. Differentiation is formal (the multi-index grows by the chain
rule); equality is decided by expansion/cancellation; no transcendental
identities are ever applied (S^2 + C^2 does not simplify).

sin/cos/exp exist only as paired opaque symbols with declared derivative
relations: S' = C, C' = -S, E' = E.
"""

import sympy
from sympy import Add, Function, Integer, Rational, Symbol, cancel, expand, together


class ScalarError(ValueError):
    """Domain error in the scalar layer."""


class NotIntegrable(ScalarError):
    """Expression shape not supported by definite_integral."""


def base_var(name):
    """The sympy symbol standing for a degree-zero coordinate."""
    return Symbol(name)


# name -> (sign, partner name); derivative of name w.r.t. its slot is
# sign * partner(same args). Partner pairs keep sin/cos/exp purely formal.
_RELATIONS = {
    "S": (1, "C"),
    "C": (-1, "S"),
    "E": (1, "E"),
    "sinS": (1, "cosC"),
    "cosC": (-1, "sinS"),
    "expE": (1, "expE"),
}

_func_cache = {}


def _class_name(name, dindex):
    if all(k == 0 for k in dindex):
        return name
    if len(dindex) == 1:
        return name + "'" * dindex[0]
    return "D[%s,(%s)]" % (name, ",".join(str(k) for k in dindex))


def opaque(name, dindex=None, nargs=1):
    """The sympy Function class for symbol `name` with derivative multi-index.

    Classes are cached so structurally equal symbols are identical. For names
    with a declared derivative relation the multi-index must stay zero; their
    derivatives resolve through the relation instead.
    """
    if dindex is None:
        dindex = (0,) * nargs
    dindex = tuple(int(k) for k in dindex)
    if len(dindex) != nargs or any(k < 0 for k in dindex):
        raise ScalarError(f"bad derivative multi-index {dindex} for {name}")
    if name in _RELATIONS and any(dindex):
        raise ScalarError(f"{name} has a derivative relation; no multi-index allowed")
    key = (name, dindex)
    if key in _func_cache:
        return _func_cache[key]

    def fdiff(self, argindex=1):
        if name in _RELATIONS:
            sign, partner = _RELATIONS[name]
            return sign * opaque(partner, nargs=nargs)(*self.args)
        bumped = tuple(
            k + 1 if i == argindex - 1 else k for i, k in enumerate(dindex)
        )
        return opaque(name, bumped, nargs)(*self.args)

    cls = type(
        _class_name(name, dindex),
        (Function,),
        {
            "fdiff": fdiff,
            "nargs": nargs,
            "opaque_name": name,
            "opaque_dindex": dindex,
        },
    )
    _func_cache[key] = cls
    return cls


def applied(name, args, dindex=None):
    """Convenience: the applied opaque symbol name^(dindex)(args)."""
    args = tuple(args)
    return opaque(name, dindex, nargs=len(args))(*args)


def is_opaque(expr):
    return getattr(type(expr), "opaque_name", None) is not None


def differentiate(e, v):
    """Formal partial derivative with respect to base variable v."""
    if isinstance(v, str):
        v = Symbol(v)
    return sympy.diff(sympy.sympify(e), v)


def scalar_is_zero(e):
    """Decide e = 0 in the differential field."""
    e = expand(sympy.sympify(e))
    if e == 0:
        return True
    if e.is_number:
        return False
    return cancel(together(e)) == 0


def canonical_eq(a, b):
    """True iff a and b have identical canonical forms."""
    return scalar_is_zero(sympy.sympify(a) - sympy.sympify(b))


def canonical_scalar(e):
    """The canonical (expanded, cancelled) form of a scalar expression."""
    e = sympy.sympify(e)
    c = cancel(together(e))
    return expand(c)


class IntegralRegistry:
    """Declared exact integrals of opaque symbols over interval boxes.

    A registered symbol is flagged compactly supported in its box; lookups
    for unregistered pairs fail loudly.
    """

    def __init__(self):
        self._values = {}
        self._compact = set()

    def register(self, name, box, value, compact=True):
        lo, hi = Rational(box[0]), Rational(box[1])
        self._values[(name, (lo, hi))] = Rational(value)
        if compact:
            self._compact.add(name)
        return self

    def declare_compact(self, name):
        self._compact.add(name)
        return self

    def is_compact(self, name):
        return name in self._compact

    def boxes(self, name):
        return [box for (n, box) in self._values if n == name]

    def value(self, name, box):
        lo, hi = Rational(box[0]), Rational(box[1])
        key = (name, (lo, hi))
        if key not in self._values:
            raise NotIntegrable(f"no declared integral for {name} over [{lo},{hi}]")
        return self._values[key]


def _integrate_opaque_factor(fac, rest, v, lo, hi, reg):
    """Integrate rest * fac over v in [lo,hi], fac an applied opaque symbol."""
    cls = type(fac)
    name = cls.opaque_name
    if len(fac.args) != 1:
        raise NotIntegrable(f"multi-argument symbol {name} not integrable")
    arg = fac.args[0]
    poly = sympy.Poly(arg, v)
    if poly.degree() > 1:
        raise NotIntegrable(f"non-affine argument {arg} of {name}")
    a = poly.nth(1)
    b = poly.nth(0)
    if not (a.is_rational and b.is_rational) or a == 0:
        raise NotIntegrable(f"argument {arg} of {name} is not affine-rational")
    image = tuple(sorted((a * lo + b, a * hi + b)))
    k = sum(cls.opaque_dindex)
    if k >= 1:
        # derivative of a compactly supported bump: boundary terms vanish
        if reg is not None and reg.is_compact(name) and any(
            image[0] <= blo and bhi <= image[1] for blo, bhi in reg.boxes(name)
        ):
            return Integer(0)
        raise NotIntegrable(f"cannot integrate derivative symbol {cls.__name__}")
    if reg is None:
        raise NotIntegrable(f"no registry supplied for symbol {name}")
    for blo, bhi in reg.boxes(name):
        exact = (image[0], image[1]) == (blo, bhi)
        covers = reg.is_compact(name) and image[0] <= blo and bhi <= image[1]
        if exact or covers:
            return rest * reg.value(name, (blo, bhi)) / abs(a)
    raise NotIntegrable(f"no declared integral for {name} over image {image}")


def _integrate_term_var(t, v, lo, hi, reg):
    if not t.has(v):
        return t * (hi - lo)
    if t.is_polynomial(v):
        return sympy.integrate(t, (v, lo, hi))
    factors = t.as_ordered_factors()
    opaques = [f for f in factors if is_opaque(f) and f.has(v)]
    rest = sympy.Mul(*[f for f in factors if f not in opaques])
    if len(opaques) != 1 or rest.has(v):
        raise NotIntegrable(f"unsupported integrand shape: {t}")
    return _integrate_opaque_factor(opaques[0], rest, v, lo, hi, reg)


def definite_integral(e, box, reg=None):
    """Exact integral of e over box = [(var, lo, hi), ...].

    Polynomials are integrated termwise; a registered compactly supported
    symbol (with an affine-rational argument) resolves via the registry, and
    integrals of its formal derivatives vanish when the box covers the
    support. Anything else raises NotIntegrable.
    """
    e = expand(sympy.sympify(e))
    total = Integer(0)
    terms = e.args if isinstance(e, Add) else [e]
    for t in terms:
        for (v, lo, hi) in box:
            if isinstance(v, str):
                v = Symbol(v)
            t = expand(_integrate_term_var(t, v, Rational(lo), Rational(hi), reg))
        total += t
    return total
