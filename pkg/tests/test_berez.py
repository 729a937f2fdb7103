import pytest
from sympy import Integer, Rational, Symbol

from conftest import z2_domain, z22_domain
from z2ncalc.berez import (
    BerSection,
    DeltaComplex,
    DeltaTruncationError,
    LaurentFunction,
    ber_volume_transform,
    glue_check,
    integrate_z2,
    integrate_z22_naive,
    integrate_z22_residue,
    is_compact_support_in_y,
    laurent_pullback,
)
from z2ncalc.gfun import DomainError, GradedFunction
from z2ncalc.morph import make_morphism
from z2ncalc.scalars import IntegralRegistry, applied

x = Symbol("x")

MU_NAMES = ("x", "y", "xi", "eta")
NU_NAMES = ("X", "Y", "Xi", "Eta")


def z22_shear(src, tgt, c=Integer(1), scale_xi=Integer(1), scale_eta=Integer(1)):
    """X = x, Y = y + c(x) xi eta, Xi = a xi, Eta = b eta."""
    X, Y, Xi, Eta = tgt.coord_names()
    return make_morphism(src, tgt, {
        X: GradedFunction.coordinate(src, src.base_vars[0]),
        Y: GradedFunction(src, {(1, 0, 0): Integer(1), (0, 1, 1): c}),
        Xi: GradedFunction(src, {(0, 1, 0): scale_xi}),
        Eta: GradedFunction(src, {(0, 0, 1): scale_eta}),
    }, check_base_image=False)


def test_ber_of_shear_is_one():
    dom = z2_domain()
    phi = make_morphism(dom, dom, {
        "x": GradedFunction(dom, {(0, 0): x, (1, 1): Integer(1)}),
        "xi1": GradedFunction.generator(dom, "xi1"),
        "xi2": GradedFunction.generator(dom, "xi2"),
    })
    assert ber_volume_transform(phi) == GradedFunction.one(dom)


def test_ber_of_odd_scaling():
    dom = z2_domain()
    phi = make_morphism(dom, dom, {
        "x": GradedFunction.coordinate(dom, "x"),
        "xi1": GradedFunction(dom, {(1, 0): Integer(2)}),
        "xi2": GradedFunction(dom, {(0, 1): Integer(3)}),
    })
    # odd scalings contribute inversely
    assert ber_volume_transform(phi) == GradedFunction.from_scalar(
        dom, Rational(1, 6)
    )


def test_glue_check_pass_and_fail():
    mu = z22_domain(names=MU_NAMES)
    nu = z22_domain(names=NU_NAMES)
    phi = z22_shear(mu, nu)
    g = GradedFunction(nu, {(0, 1, 1): applied("F", [Symbol("X")])})
    good = BerSection(
        {"mu": (mu, ber_volume_transform(phi) * phi.pullback(g)),
         "nu": (nu, g)},
        {("mu", "nu"): phi},
    )
    ok, report = glue_check(good)
    assert ok and report == [("overlap mu->nu", True)]

    bad = BerSection(
        {"mu": (mu, GradedFunction.one(mu)), "nu": (nu, g)},
        {("mu", "nu"): phi},
    )
    ok, _ = glue_check(bad)
    assert not ok


def test_integrate_z2():
    dom = z2_domain(boxes=(("x", 0, 1),))
    f = GradedFunction(dom, {(0, 0): x, (1, 1): x ** 2})
    assert integrate_z2(f) == Rational(1, 3)
    assert integrate_z2(GradedFunction.one(dom)) == 0


def test_integrate_z2_shear_invariance():
    """The odd shear has Ber = 1 and shifts x by a nilpotent; the correction
    term is a total derivative of a compact bump, so the integral is stable."""
    reg = IntegralRegistry()
    reg.register("alpha", (0, 1), Integer(1), compact=True)
    dom = z2_domain(truncation=4, boxes=(("x", 0, 1),))
    phi = make_morphism(dom, dom, {
        "x": GradedFunction(dom, {(0, 0): x, (1, 1): Integer(1)}),
        "xi1": GradedFunction.generator(dom, "xi1"),
        "xi2": GradedFunction.generator(dom, "xi2"),
    })
    f = GradedFunction(dom, {(1, 1): applied("alpha", [x])})
    lhs = integrate_z2(ber_volume_transform(phi) * phi.pullback(f), reg=reg)
    assert lhs == integrate_z2(f, reg=reg) == 1


def test_z2_counterexample_integral_not_invariant():
    """Coefficient X on the shear overlap: 0 in one chart, 1 in the other."""
    reg = IntegralRegistry()
    dom = z2_domain(boxes=(("x", 0, 1),))
    phi = make_morphism(dom, dom, {
        "x": GradedFunction(dom, {(0, 0): x, (1, 1): Integer(1)}),
        "xi1": GradedFunction.generator(dom, "xi1"),
        "xi2": GradedFunction.generator(dom, "xi2"),
    })
    g = GradedFunction(dom, {(0, 0): x})
    assert integrate_z2(g, reg=reg) == 0
    assert integrate_z2(ber_volume_transform(phi) * phi.pullback(g), reg=reg) == 1


def test_integrate_z22_naive_and_compactness():
    dom = z22_domain(boxes=(("x", 0, 1),))
    f = GradedFunction(dom, {(0, 1, 1): x, (1, 1, 1): Integer(1)})
    assert integrate_z22_naive(f) == Rational(1, 2)
    assert not is_compact_support_in_y(f + GradedFunction(dom, {(1, 0, 0): x}))
    assert is_compact_support_in_y(f)


def test_z22_counterexample_naive_not_invariant():
    reg = IntegralRegistry()
    reg.register("alpha", (0, 1), Integer(1), compact=True)
    mu = z22_domain(boxes=(("x", 0, 1),), names=MU_NAMES)
    nu = z22_domain(boxes=(("X", 0, 1),), names=NU_NAMES)
    phi = z22_shear(mu, nu)
    # sigma = alpha(X) Y in the nu chart
    g = GradedFunction(nu, {(1, 0, 0): applied("alpha", [Symbol("X")])})
    assert integrate_z22_naive(g, reg=reg) == 0
    pulled = ber_volume_transform(phi) * phi.pullback(g)
    assert integrate_z22_naive(pulled, reg=reg) == 1


def test_naive_invariance_for_shears_and_odd_scalings(rng):
    reg = IntegralRegistry()
    reg.register("alpha", (0, 1), Integer(1), compact=True)
    mu = z22_domain(boxes=(("x", 0, 1),), names=MU_NAMES)
    nu = z22_domain(boxes=(("X", 0, 1),), names=NU_NAMES)
    X = Symbol("X")
    f = GradedFunction(nu, {
        (0, 1, 1): applied("alpha", [X]),
        (1, 1, 1): applied("alpha", [X]) * X,
    })
    want = integrate_z22_naive(f, reg=reg)
    for _ in range(5):
        a = Rational(rng.randint(1, 3), rng.randint(1, 2))
        b = Rational(rng.randint(1, 3), rng.randint(1, 2))
        c = Integer(rng.randint(-2, 2))
        phi = z22_shear(mu, nu, c=c * x, scale_xi=a, scale_eta=b)
        pulled = ber_volume_transform(phi) * phi.pullback(f)
        assert integrate_z22_naive(pulled, reg=reg) == want


# -- Laurent functions --------------------------------------------------------

def test_laurent_ring_and_inverse():
    dom = z22_domain(truncation=4)
    y_inv = LaurentFunction.zero(dom, "y").pole_power(-1)
    y = LaurentFunction.from_graded(GradedFunction.generator(dom, "y"), "y")
    one = LaurentFunction.one(dom, "y")
    assert y * y_inv == one
    f = one + y
    assert f * f.invert() == one


def test_laurent_negative_weight_cap():
    # pole exponents below -T are truncated away, mirroring the weight cap
    dom = z22_domain(truncation=4)
    L = LaurentFunction(dom, "y", {(-5, 0, 0): Integer(1)})
    assert L.is_zero
    with pytest.raises(DomainError):
        LaurentFunction(dom, "y", {(0, -1, 0): Integer(1)})


def test_laurent_layers():
    dom = z22_domain(truncation=4)
    L = LaurentFunction(dom, "y", {
        (-1, 0, 0): Integer(1), (-2, 1, 1): Integer(-1), (0, 1, 1): x,
    })
    # layer strips the pole exponent
    assert L.layer(-1).terms == {(0, 0, 0): Integer(1)}
    assert set(L.layer(0).terms) == {(0, 1, 1)}


def test_laurent_pullback_golden_shear():
    mu = z22_domain(truncation=4, names=MU_NAMES)
    nu = z22_domain(truncation=4, names=NU_NAMES)
    phi = z22_shear(mu, nu)
    Y_inv = LaurentFunction.zero(nu, "Y").pole_power(-1)
    got = laurent_pullback(phi, Y_inv)
    assert got == LaurentFunction(mu, "y", {
        (-1, 0, 0): Integer(1), (-2, 1, 1): Integer(-1),
    })


def test_laurent_pullback_coherence(rng):
    mu = z22_domain(truncation=4, names=MU_NAMES)
    nu = z22_domain(truncation=4, names=NU_NAMES)
    rho = z22_domain(truncation=4, names=("s", "t", "a", "b"))
    from z2ncalc.morph import compose

    phi = z22_shear(mu, nu, c=x)
    psi = z22_shear(nu, rho, c=Integer(2), scale_xi=Integer(2))
    L = LaurentFunction(rho, "t", {
        (-1, 0, 0): Integer(1), (-2, 1, 1): Symbol("s"),
    })
    direct = laurent_pullback(compose(psi, phi), L)
    nested = laurent_pullback(phi, laurent_pullback(psi, L))
    assert direct == nested


def test_residue_integral_invariance_under_scaling():
    """y-scalings break the naive integral but not the residue integral."""
    reg = IntegralRegistry()
    reg.register("alpha", (0, 1), Integer(1), compact=True)
    mu = z22_domain(boxes=(("x", 0, 1),), names=MU_NAMES)
    nu = z22_domain(boxes=(("X", 0, 1),), names=NU_NAMES)
    X, Y, Xi, Eta = nu.coord_names()
    phi = make_morphism(mu, nu, {
        X: GradedFunction.coordinate(mu, "x"),
        Y: GradedFunction(mu, {(1, 0, 0): Integer(2)}),
        Xi: GradedFunction.generator(mu, "xi"),
        Eta: GradedFunction.generator(mu, "eta"),
    }, check_base_image=False)
    L = LaurentFunction(nu, "Y", {(-1, 1, 1): applied("alpha", [Symbol("X")])})
    want = integrate_z22_residue(L, reg=reg)
    assert want == 1
    ber = ber_volume_transform(phi)
    pulled = laurent_pullback(phi, L) * LaurentFunction.from_graded(ber, "y")
    assert integrate_z22_residue(pulled, reg=reg) == want


# -- the delta complex --------------------------------------------------------

def test_delta_squared_zero():
    cx = DeltaComplex(2, [(0, 1), (1, 0), (1, 1)], weight=6)
    for name, _ in cx.domain.generators:
        g = cx.generator(name)
        assert cx.delta_apply(cx.delta_apply(g)).is_zero
    assert cx.delta_apply(cx.delta_apply(cx.one())).is_zero


def test_delta_omega_zero():
    cx = DeltaComplex(2, [(0, 1), (1, 0)], weight=6)
    assert cx.delta_apply(cx.omega()).is_zero


def test_delta_truncation_guard():
    cx = DeltaComplex(2, [(0, 1), (1, 0)], weight=4)
    # E1 is even here (its degree plus gamma cancels), so E1^2 survives
    top = cx.generator("E1") ** 2 * cx.generator("ep1") * cx.generator("ep2")
    assert not top.is_zero
    with pytest.raises(DeltaTruncationError):
        cx.delta_apply(top)
