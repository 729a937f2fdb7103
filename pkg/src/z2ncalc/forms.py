"""Super differential forms under the Deligne and Bernstein-Leites conventions.

Forms are graded functions over an extended domain with one extra generator
d<coord> per coordinate. Deligne raises the grading height by one bit (the
cohomological degree mod 2): d<coord> has degree (1, deg coord), so the
commutation sign is the Z2^(n+1) Koszul sign. Bernstein-Leites keeps the
grading group and declares d odd: d<coord> has degree deg coord + gamma for
the first odd degree gamma (at n=1 this is exactly the parity shift of the
literature). In both cases d = sum_A d<mu^A> d/d(mu^A) and d^2 = 0.
"""

from .gfun import DomainError, DomainSpec, GradedFunction
from .grading import deg_add, is_odd, standard_order, zero_degree

DELIGNE = "deligne"
BEREZIN_LEITES = "bernstein-leites"
CONVENTIONS = (DELIGNE, BEREZIN_LEITES)


def _first_odd(n):
    for d in standard_order(n):
        if is_odd(d):
            return d
    raise DomainError("no odd degree available")


class FormAlgebra:
    """The algebra of superforms of a base domain under one convention."""

    def __init__(self, base, convention, extra_weight=4):
        if convention not in CONVENTIONS:
            raise DomainError(f"unknown convention {convention!r}")
        self.base = base
        self.convention = convention
        coords = base.coord_names()
        self.d_names = tuple("d" + c for c in coords)
        if convention == DELIGNE:
            n = base.n + 1
            gens = [(g, (0,) + d) for g, d in base.generators]
            gens += [
                ("d" + c, (1,) + base.coord_degree(c)) for c in coords
            ]
            allow_zero = base.allow_zero_degree
        else:
            n = base.n
            gamma = _first_odd(n)
            gens = list(base.generators)
            gens += [
                ("d" + c, deg_add(base.coord_degree(c), gamma)) for c in coords
            ]
            allow_zero = True
        self.extended = DomainSpec(
            n=n,
            base_vars=base.base_vars,
            generators=tuple(gens),
            truncation=base.truncation + extra_weight,
            allow_zero_degree=allow_zero,
        )

    def _dpositions(self):
        return [self.extended.gen_index(nm) for nm in self.d_names]

    def inject(self, f):
        """Lift a graded function on the base domain to a 0-form."""
        if f.domain != self.base:
            raise DomainError("function lives off the base domain")
        idx = [self.extended.gen_index(g) for g in self.base.gen_names]
        width = len(self.extended.generators)
        terms = {}
        for exps, coeff in f.terms.items():
            new = [0] * width
            for i, k in enumerate(exps):
                new[idx[i]] = k
            terms[tuple(new)] = coeff
        return FormAlgebraElement(self, GradedFunction(self.extended, terms))

    def zero(self):
        return FormAlgebraElement(self, GradedFunction.zero(self.extended))

    def one(self):
        return FormAlgebraElement(self, GradedFunction.one(self.extended))

    def d_generator(self, coord):
        """The 1-form d<coord>."""
        if coord not in self.base.coord_names():
            raise DomainError(f"unknown coordinate {coord}")
        return FormAlgebraElement(
            self, GradedFunction.generator(self.extended, "d" + coord)
        )

    def __eq__(self, other):
        return (
            isinstance(other, FormAlgebra)
            and self.base == other.base
            and self.convention == other.convention
        )


class FormAlgebraElement:
    """A superform: a graded function over the extended domain."""

    def __init__(self, algebra, fun):
        self.algebra = algebra
        self.fun = fun

    def _check(self, other):
        if self.algebra != other.algebra:
            raise DomainError("forms live in different algebras/conventions")

    def __add__(self, other):
        self._check(other)
        return FormAlgebraElement(self.algebra, self.fun + other.fun)

    def __sub__(self, other):
        self._check(other)
        return FormAlgebraElement(self.algebra, self.fun - other.fun)

    def __neg__(self):
        return FormAlgebraElement(self.algebra, -self.fun)

    def product(self, other):
        self._check(other)
        return FormAlgebraElement(self.algebra, self.fun * other.fun)

    __mul__ = product

    @property
    def is_zero(self):
        return self.fun.is_zero

    def __eq__(self, other):
        if not isinstance(other, FormAlgebraElement):
            return NotImplemented
        return self.algebra == other.algebra and self.fun == other.fun

    def coweight(self, exps):
        """Cohomological weight of a monomial: count of d-generators."""
        pos = self.algebra._dpositions()
        return sum(exps[i] for i in pos)

    def components(self):
        """Map cohomological weight k -> the k-form part."""
        out = {}
        for exps, coeff in self.fun.terms.items():
            k = self.coweight(exps)
            out.setdefault(k, {})[exps] = coeff
        return {
            k: FormAlgebraElement(
                self.algebra, GradedFunction(self.algebra.extended, terms)
            )
            for k, terms in out.items()
        }

    def k_form_part(self, k):
        return self.components().get(k, self.algebra.zero())

    def is_k_form(self, k):
        return all(w == k for w in self.components())

    def d(self):
        """The exterior differential sum_A d<mu^A> d/d(mu^A)."""
        alg = self.algebra
        out = GradedFunction.zero(alg.extended)
        for coord in alg.base.coord_names():
            dgen = GradedFunction.generator(alg.extended, "d" + coord)
            out = out + dgen * self.fun.partial(coord)
        return FormAlgebraElement(alg, out)

    def __repr__(self):
        return f"FormAlgebraElement({self.fun!r})"


def d(omega):
    return omega.d()
