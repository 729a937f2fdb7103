import pytest
from sympy import Integer, Symbol

from conftest import random_graded_function, z2_domain, z22_domain
from z2ncalc.forms import (
    BEREZIN_LEITES,
    CONVENTIONS,
    DELIGNE,
    FormAlgebra,
    d,
)
from z2ncalc.gfun import DomainError, GradedFunction
from z2ncalc.scalars import applied

x = Symbol("x")


def test_deligne_grading_height():
    dom = z2_domain()
    alg = FormAlgebra(dom, DELIGNE)
    assert alg.extended.n == dom.n + 1
    # dx has the new bit set over the (even) base degree
    assert alg.extended.gen_degree("dx") == (1, 0)
    assert alg.extended.gen_degree("dxi1") == (1, 1)


def test_bernstein_leites_parity_shift():
    dom = z2_domain()
    alg = FormAlgebra(dom, BEREZIN_LEITES)
    assert alg.extended.n == dom.n
    # dx becomes odd, dxi becomes even
    assert alg.extended.gen_degree("dx") == (1,)
    assert alg.extended.gen_degree("dxi1") == (0,)


def test_dx_squares():
    dom = z2_domain()
    deligne = FormAlgebra(dom, DELIGNE)
    bl = FormAlgebra(dom, BEREZIN_LEITES)
    # dx is odd in both conventions: (dx)^2 = 0
    for alg in (deligne, bl):
        dx = alg.d_generator("x")
        assert (dx * dx).is_zero
    # dxi is even in both: (dxi)^2 survives
    for alg in (deligne, bl):
        dxi = alg.d_generator("xi1")
        assert not (dxi * dxi).is_zero


def test_d_linear_in_coordinates():
    dom = z2_domain()
    for conv in CONVENTIONS:
        alg = FormAlgebra(dom, conv)
        f = alg.inject(GradedFunction(dom, {(0, 0): x ** 2}))
        got = f.d()
        want = alg.d_generator("x") * alg.inject(
            GradedFunction(dom, {(0, 0): 2 * x})
        )
        assert got == want


def test_d_squared_zero_random(rng):
    dom = z22_domain()
    scal = (x, applied("F", [x]))
    for conv in CONVENTIONS:
        alg = FormAlgebra(dom, conv)
        for _ in range(15):
            f = random_graded_function(rng, dom, nterms=4, scalars=scal)
            assert alg.inject(f).d().d().is_zero


def test_d_leibniz(rng):
    from z2ncalc.grading import dot2

    dom = z2_domain()
    for conv in CONVENTIONS:
        alg = FormAlgebra(dom, conv)
        # d-degree within the convention
        d_deg = (
            (1,) + (0,) * dom.n if conv == DELIGNE
            else alg.extended.gen_degree("dx")
        )
        for _ in range(10):
            f = random_graded_function(rng, dom, nterms=1)
            g = random_graded_function(rng, dom, nterms=3)
            if f.is_zero:
                continue
            fe, ge = alg.inject(f), alg.inject(g)
            lhs = (fe * ge).d()
            deg_for_sign = (0,) + f.degree() if conv == DELIGNE else f.degree()
            tail = fe * ge.d()
            if dot2(d_deg, deg_for_sign) % 2:
                tail = -tail
            assert lhs == fe.d() * ge + tail


def test_components_and_k_form_part():
    dom = z2_domain()
    alg = FormAlgebra(dom, DELIGNE)
    f = alg.inject(GradedFunction(dom, {(0, 0): x}))
    omega = f + f.d()
    comps = omega.components()
    assert set(comps) == {0, 1}
    assert omega.k_form_part(0) == f
    assert omega.is_k_form(0) is False
    assert f.is_k_form(0) is True


def test_convention_mismatch_rejected():
    dom = z2_domain()
    a = FormAlgebra(dom, DELIGNE).one()
    b = FormAlgebra(dom, BEREZIN_LEITES).one()
    with pytest.raises(DomainError):
        a + b


def test_module_level_d():
    dom = z2_domain()
    alg = FormAlgebra(dom, DELIGNE)
    f = alg.inject(GradedFunction(dom, {(0, 0): x}))
    assert d(f) == f.d()
