"""Shared fixtures: standard domains and seeded random generators."""

import random

import pytest
from sympy import Integer, Rational, Symbol

from z2ncalc.gfun import DomainSpec, GradedFunction
from z2ncalc.gmat import GradedMatrix
from z2ncalc.grading import dot2, standard_order, zero_degree
from z2ncalc.morph import make_morphism


def z2_domain(truncation=4, boxes=()):
    """A 1|2 chart over Z2: base x, odd generators xi1, xi2."""
    return DomainSpec(
        n=1, base_vars=("x",),
        generators=(("xi1", (1,)), ("xi2", (1,))),
        truncation=truncation, boxes=boxes,
    )


def z22_domain(truncation=4, boxes=(), names=("x", "y", "xi", "eta")):
    """The Z2^2 chart: base x, generators y (1,1), xi (0,1), eta (1,0)."""
    x, y, xi, eta = names
    return DomainSpec(
        n=2, base_vars=(x,),
        generators=((y, (1, 1)), (xi, (0, 1)), (eta, (1, 0))),
        truncation=truncation, boxes=boxes,
    )


def rat(rng, lo=-3, hi=3, nonzero=False):
    while True:
        q = Rational(rng.randint(lo, hi), rng.randint(1, 3))
        if q != 0 or not nonzero:
            return q


def random_z2_endomorphism(rng, dom):
    """x -> f(x) + g(x) xi1 xi2, xi^a -> u_ab(x) xi^b with invertible units."""
    x = Symbol(dom.base_vars[0])

    def xpoly():
        return rat(rng) + rat(rng) * x

    u = [[xpoly() for _ in range(2)] for _ in range(2)]
    # force an invertible constant part
    u[0][0] += Integer(1) - u[0][0].subs(x, 0)
    u[1][1] += Integer(2) - u[1][1].subs(x, 0)
    u[0][1] -= u[0][1].subs(x, 0) * Rational(rng.randint(0, 1))
    values = {
        dom.base_vars[0]: GradedFunction(dom, {
            (0, 0): rat(rng) + rat(rng, nonzero=True) * x,
            (1, 1): xpoly(),
        }),
        "xi1": GradedFunction(dom, {(1, 0): u[0][0], (0, 1): u[0][1]}),
        "xi2": GradedFunction(dom, {(1, 0): u[1][0], (0, 1): u[1][1]}),
    }
    return make_morphism(dom, dom, values, check_base_image=False)


def random_z22_endomorphism(rng, dom):
    """Polynomial endomorphism of the Z2^2 chart with invertible units.

    The template is weight-restricted so that the coordinate images of a
    single composition stay within truncation 6 exactly: y-images are
    y-linear, so composites never exceed weight 5.
    """
    xname = dom.base_vars[0]
    x = Symbol(xname)
    yname, xiname, etaname = (g for g, _ in dom.generators)
    values = {
        xname: GradedFunction(dom, {
            (0, 0, 0): rat(rng) + rat(rng, nonzero=True) * x,
            (2, 0, 0): rat(rng),
            (1, 1, 1): rat(rng),
        }),
        yname: GradedFunction(dom, {
            (1, 0, 0): rat(rng, nonzero=True),
            (0, 1, 1): rat(rng),
        }),
        xiname: GradedFunction(dom, {
            (0, 1, 0): rat(rng, nonzero=True),
            (1, 0, 1): rat(rng),
        }),
        etaname: GradedFunction(dom, {
            (0, 0, 1): rat(rng, nonzero=True),
            (1, 1, 0): rat(rng),
        }),
    }
    return make_morphism(dom, dom, values, check_base_image=False)


def random_graded_function(rng, dom, nterms=4, scalars=()):
    """A random graded function with rational (or supplied scalar) coeffs."""
    width = len(dom.generators)
    caps = [
        1 if dot2(d, d) % 2 else 2 for _, d in dom.generators
    ]
    terms = {}
    for _ in range(nterms):
        exps = tuple(rng.randint(0, c) for c in caps)
        if sum(exps) > dom.truncation:
            continue
        c = rat(rng)
        if scalars and rng.random() < 0.5:
            c = c * rng.choice(scalars)
        if c != 0:
            terms[exps] = terms.get(exps, 0) + c
    return GradedFunction(dom, {e: c for e, c in terms.items() if c != 0})


def sector_shape(dom, per_sector):
    """Shape tuple with per_sector coordinates in each degree sector."""
    return tuple(per_sector for _ in standard_order(dom.n))


def random_even_invertible(rng, dom, shape):
    """Random even-degree invertible graded matrix over dom."""
    from sympy import Matrix

    order = standard_order(dom.n)
    degs = []
    for d, cnt in zip(order, shape):
        degs.extend([d] * cnt)
    size = len(degs)
    while True:
        grid = []
        for i in range(size):
            row = []
            for j in range(size):
                want = tuple(
                    (a + b) % 2 for a, b in zip(degs[i], degs[j])
                )
                entry = GradedFunction.zero(dom)
                for exps, d in _monomials_by_degree(dom).get(want, []):
                    if rng.random() < (0.8 if i == j and sum(exps) == 0 else 0.4):
                        c = rat(rng, nonzero=(i == j and sum(exps) == 0))
                        entry = entry + GradedFunction(dom, {exps: c})
                row.append(entry)
            grid.append(row)
        m = GradedMatrix(dom, zero_degree(dom.n), shape, shape, grid)
        eps = Matrix([[e.epsilon() for e in row] for row in grid])
        if eps.det() != 0:
            return m


def _monomials_by_degree(dom):
    """All generator monomials up to the truncation, grouped by degree."""
    key = dom.generators, dom.truncation
    cache = _monomials_by_degree.cache
    if key not in cache:
        from itertools import product

        caps = [1 if dot2(d, d) % 2 else 2 for _, d in dom.generators]
        out = {}
        for exps in product(*[range(c + 1) for c in caps]):
            if sum(exps) > dom.truncation:
                continue
            deg = zero_degree(dom.n)
            for k, (_, d) in zip(exps, dom.generators):
                if k % 2:
                    deg = tuple((a + b) % 2 for a, b in zip(deg, d))
            out.setdefault(deg, []).append((exps, deg))
        cache[key] = out
    return cache[key]


_monomials_by_degree.cache = {}


@pytest.fixture
def rng():
    return random.Random(20260825)
