import pytest
from sympy import Integer, Rational, Symbol

from conftest import (
    random_graded_function,
    random_z2_endomorphism,
    random_z22_endomorphism,
    z2_domain,
    z22_domain,
)
from z2ncalc.gfun import DomainError, DomainSpec, GradedFunction
from z2ncalc.morph import (
    CoordMorphism,
    compose,
    identity_morphism,
    make_morphism,
    pullback_matrix,
)
from z2ncalc.scalars import applied

x = Symbol("x")


def shear(dom):
    """x -> x + xi1 xi2 on the 1|2 chart."""
    return make_morphism(dom, dom, {
        "x": GradedFunction(dom, {(0, 0): x, (1, 1): Integer(1)}),
        "xi1": GradedFunction.generator(dom, "xi1"),
        "xi2": GradedFunction.generator(dom, "xi2"),
    })


def test_degree_condition_enforced():
    dom = z2_domain()
    with pytest.raises(DomainError):
        make_morphism(dom, dom, {
            "x": GradedFunction.generator(dom, "xi1"),
            "xi1": GradedFunction.generator(dom, "xi1"),
            "xi2": GradedFunction.generator(dom, "xi2"),
        })


def test_identity_pullback_fixes_everything(rng):
    dom = z22_domain()
    ident = identity_morphism(dom)
    for _ in range(10):
        f = random_graded_function(rng, dom)
        assert ident.pullback(f) == f


def test_pullback_is_algebra_map(rng):
    dom = z22_domain()
    phi = random_z22_endomorphism(rng, dom)
    for _ in range(10):
        f = random_graded_function(rng, dom, nterms=2)
        g = random_graded_function(rng, dom, nterms=2)
        if f.max_weight() + g.max_weight() > dom.truncation:
            continue
        assert phi.pullback(f * g) == phi.pullback(f) * phi.pullback(g)
        assert phi.pullback(f + g) == phi.pullback(f) + phi.pullback(g)


def test_pullback_taylor_golden():
    dom = z2_domain()
    phi = shear(dom)
    f = GradedFunction.from_scalar(dom, applied("S", [x]))
    assert phi.pullback(f) == GradedFunction(dom, {
        (0, 0): applied("S", [x]), (1, 1): applied("C", [x]),
    })


def test_pullback_even_square_golden():
    dom = z22_domain()
    phi = make_morphism(dom, dom, {
        "x": GradedFunction(dom, {(0, 0, 0): x, (2, 0, 0): Integer(1)}),
        "y": GradedFunction.generator(dom, "y"),
        "xi": GradedFunction.generator(dom, "xi"),
        "eta": GradedFunction.generator(dom, "eta"),
    })
    f = GradedFunction.from_scalar(dom, applied("F", [x]))
    assert phi.pullback(f) == GradedFunction(dom, {
        (0, 0, 0): applied("F", [x]),
        (2, 0, 0): applied("F", [x], (1,)),
        (4, 0, 0): applied("F", [x], (2,)) / 2,
    })


def test_compose_pullback_contravariant(rng):
    dom = z22_domain()
    phi = random_z22_endomorphism(rng, dom)
    psi = random_z22_endomorphism(rng, dom)
    comp = compose(psi, phi)
    for _ in range(5):
        f = random_graded_function(rng, dom, nterms=3)
        assert comp.pullback(f) == phi.pullback(psi.pullback(f))


def test_jacobian_n1_shear():
    dom = z2_domain()
    phi = shear(dom)
    jac = phi.modified_jacobian()
    assert jac.row_shape == (1, 2)
    # d(x + xi1 xi2): base entry 1, odd entries carry the derivation signs
    assert jac.entries[0][0] == GradedFunction.one(dom)
    assert jac.entries[1][1] == GradedFunction.one(dom)
    assert jac.entries[2][2] == GradedFunction.one(dom)


def test_chain_rule(rng):
    # truncation 6 so the composite coordinate images are exact (the
    # derivative does not descend to the truncated quotient)
    for dom, gen in (
        (z2_domain(), random_z2_endomorphism),
        (z22_domain(truncation=6), random_z22_endomorphism),
    ):
        phi = gen(rng, dom)
        psi = gen(rng, dom)
        comp = compose(psi, phi)
        lhs = comp.modified_jacobian()
        rhs = pullback_matrix(phi, psi.modified_jacobian()) * phi.modified_jacobian()
        assert lhs == rhs


def test_tangent_matrix_at():
    dom = z2_domain(boxes=(("x", 0, 1),))
    phi = make_morphism(dom, dom, {
        "x": GradedFunction(dom, {(0, 0): x / 2 + Rational(1, 4)}),
        "xi1": GradedFunction(dom, {(1, 0): Integer(2)}),
        "xi2": GradedFunction(dom, {(0, 1): Integer(3)}),
    })
    m = phi.tangent_matrix_at({"x": Rational(1, 2)})
    assert m[0, 0] == Rational(1, 2)
    assert m[1, 1] == 2
    assert m[2, 2] == 3
    with pytest.raises(DomainError):
        phi.tangent_matrix_at({"x": 2})


def test_base_image_box_check():
    dom = z2_domain(boxes=(("x", 0, 1),))
    with pytest.raises(DomainError):
        make_morphism(dom, dom, {
            "x": GradedFunction(dom, {(0, 0): x + 5}),
            "xi1": GradedFunction.generator(dom, "xi1"),
            "xi2": GradedFunction.generator(dom, "xi2"),
        })
