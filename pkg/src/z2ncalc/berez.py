"""Berezinian volumes, sections, the delta complex, and graded integration.

Covers: the Berezinian transformation factor of a coordinate change, the
gluing check for per-chart Berezinian coefficients, the Z2 Berezin integral,
the Z2^2 naive integral with its compact-support criterion, Laurent
localization at the even generator with the extended pullback, the residue
integral, and the delta-complex checks (delta^2 = 0, the cocycle Omega).
"""

from dataclasses import dataclass

import sympy
from sympy import Integer, Symbol

from .gfun import (
    DomainError,
    DomainSpec,
    GradedFunction,
    merge_mono,
    taylor_scalar,
)
from .grading import deg_add, is_odd, standard_order, zero_degree
from .scalars import definite_integral


class DeltaTruncationError(DomainError):
    """delta_apply would exceed the configured symmetric weight."""

    def __init__(self, required):
        self.required = required
        super().__init__(
            f"delta complex truncation overflow: need symmetric weight >= {required}"
        )


# -- Berezinian volumes and sections -----------------------------------------

@dataclass
class BerVolume:
    """The symbolic token [Omega(mu)] of a chart, with its odd shift gamma."""

    chart: DomainSpec
    gamma: tuple = None

    def __post_init__(self):
        if self.gamma is None:
            self.gamma = next(
                d for d in standard_order(self.chart.n) if is_odd(d)
            )


def ber_volume_transform(phi):
    """The factor Ber(Jac phi) multiplying [Omega] under the change phi."""
    return phi.modified_jacobian().z2n_ber()


class BerSection:
    """Per-chart Berezinian coefficients glued by the Ber-twisted pullback.

    charts: mapping name -> (DomainSpec, coefficient); the coefficient is a
    GradedFunction or a LaurentFunction (generalized sections).
    transitions: mapping (a, b) -> CoordMorphism with source charts[a] and
    target charts[b]; the gluing law reads
    coeff[a] = Ber(Jac phi_ab) * phi_ab^*(coeff[b]).
    """

    def __init__(self, charts, transitions=None):
        self.charts = dict(charts)
        self.transitions = dict(transitions or {})
        for (a, b), phi in self.transitions.items():
            if phi.source != self.charts[a][0] or phi.target != self.charts[b][0]:
                raise DomainError(f"transition ({a},{b}) does not match its charts")

    def coefficient(self, name):
        return self.charts[name][1]

    def domain(self, name):
        return self.charts[name][0]


def _twisted_pullback(phi, coeff):
    """Ber(Jac phi) * phi^*(coeff), for plain or Laurent coefficients."""
    ber = ber_volume_transform(phi)
    if isinstance(coeff, LaurentFunction):
        pb = laurent_pullback(phi, coeff)
        return pb * LaurentFunction.from_graded(ber, pb.pole)
    return ber * phi.pullback(coeff)


def glue_check(section):
    """Verify the gluing law on every declared overlap plus three-chart
    coherence; returns (all_ok, report)."""
    report = []
    ok = True
    for (a, b), phi in section.transitions.items():
        lhs = section.coefficient(a)
        rhs = _twisted_pullback(phi, section.coefficient(b))
        good = lhs == rhs
        ok = ok and good
        report.append((f"overlap {a}->{b}", good))
    for (a, b) in list(section.transitions):
        for (b2, c) in list(section.transitions):
            if b2 != b or (a, c) not in section.transitions:
                continue
            h = section.coefficient(c)
            direct = _twisted_pullback(section.transitions[(a, c)], h)
            via = _twisted_pullback(
                section.transitions[(a, b)],
                _twisted_pullback(section.transitions[(b, c)], h),
            )
            good = direct == via
            ok = ok and good
            report.append((f"coherence {a}->{b}->{c}", good))
    return ok, report


# -- integration --------------------------------------------------------------

def _box_of(domain, box=None):
    if box is not None:
        return box
    out = [(v, lo, hi) for v, lo, hi in domain.boxes]
    if len(out) != len(domain.base_vars):
        raise DomainError("no integration box declared for every base variable")
    return out


def integrate_z2(f, box=None, reg=None):
    """Z2 Berezin integral: the top odd coefficient, then the box integral."""
    dom = f.domain
    if dom.n != 1:
        raise DomainError("integrate_z2 needs an n=1 chart")
    top = (1,) * len(dom.generators)
    coeff = f.terms.get(top, Integer(0))
    return definite_integral(coeff, _box_of(dom, box), reg)


def _z22_chart(domain):
    """The (y, xi, eta) generator names of a 1|(1,1,1) Z2^2 chart."""
    if domain.n != 2:
        raise DomainError("need a Z2^2 chart")
    names = {}
    for name, deg in domain.generators:
        if deg in names:
            raise DomainError("chart must have one generator per nonzero degree")
        names[deg] = name
    try:
        return names[(1, 1)], names[(0, 1)], names[(1, 0)]
    except KeyError:
        raise DomainError("chart must have one generator per nonzero degree") from None


def _z22_exps(domain, k):
    """Exponent tuple for y^k xi eta in a 1|(1,1,1) chart."""
    y, xi, eta = _z22_chart(domain)
    exps = [0] * len(domain.generators)
    exps[domain.gen_index(y)] = k
    exps[domain.gen_index(xi)] = 1
    exps[domain.gen_index(eta)] = 1
    return tuple(exps)


def integrate_z22_naive(f, box=None, reg=None):
    """The naive Z2^2 integral: the y^0 layer of the xi-eta coefficient."""
    dom = f.domain
    coeff = f.terms.get(_z22_exps(dom, 0), Integer(0))
    return definite_integral(coeff, _box_of(dom, box), reg)


def is_compact_support_in_y(f):
    """True iff the g_100(x) * y term is absent.

    Per the source criterion only the linear pure-y term is excluded; higher
    y powers in other generator sectors are allowed.
    """
    dom = f.domain
    y, _, _ = _z22_chart(dom)
    exps = [0] * len(dom.generators)
    exps[dom.gen_index(y)] = 1
    return tuple(exps) not in f.terms


# -- Laurent localization -----------------------------------------------------

class LaurentFunction:
    """A graded function extended by finitely many negative powers of a
    designated even nonzero-degree generator (the pole variable).

    Negative pole exponents are capped at -T, mirroring the upper weight
    truncation (weight = signed exponent sum)."""

    __slots__ = ("domain", "pole", "terms")

    def __init__(self, domain, pole, terms):
        self.domain = domain
        self.pole = pole
        j = domain.gen_index(pole)
        if is_odd(domain.gen_degrees[j]):
            raise DomainError("pole variable must be an even generator")
        T = domain.truncation
        clean = {}
        for exps, coeff in terms.items():
            exps = tuple(exps)
            if sum(exps) > T or exps[j] < -T:
                continue
            if any(e < 0 for i, e in enumerate(exps) if i != j):
                raise DomainError("only the pole variable may carry negative powers")
            coeff = sympy.expand(sympy.sympify(coeff))
            if coeff == 0:
                continue
            clean[exps] = clean.get(exps, 0) + coeff
        self.terms = {e: c for e, c in clean.items() if c != 0}

    @classmethod
    def from_graded(cls, f, pole):
        return cls(f.domain, pole, dict(f.terms))

    @classmethod
    def zero(cls, domain, pole):
        return cls(domain, pole, {})

    @classmethod
    def one(cls, domain, pole):
        return cls(domain, pole, {(0,) * len(domain.generators): Integer(1)})

    def pole_power(self, k):
        """The monomial pole^k as a LaurentFunction."""
        exps = [0] * len(self.domain.generators)
        exps[self.domain.gen_index(self.pole)] = k
        return LaurentFunction(self.domain, self.pole, {tuple(exps): Integer(1)})

    def pole_var_for(self, domain):
        if domain != self.domain:
            raise DomainError("domain mismatch")
        return self.pole

    @property
    def is_zero(self):
        return not self.terms

    def _check(self, other):
        if self.domain != other.domain or self.pole != other.pole:
            raise DomainError("Laurent operands do not match")

    def _coerce(self, other):
        if isinstance(other, LaurentFunction):
            return other
        if isinstance(other, GradedFunction):
            return LaurentFunction.from_graded(other, self.pole)
        exps = (0,) * len(self.domain.generators)
        return LaurentFunction(self.domain, self.pole, {exps: sympy.sympify(other)})

    def __add__(self, other):
        other = self._coerce(other)
        self._check(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0) + c
        return LaurentFunction(self.domain, self.pole, terms)

    __radd__ = __add__

    def __neg__(self):
        return LaurentFunction(
            self.domain, self.pole, {e: -c for e, c in self.terms.items()}
        )

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + self._coerce(other)

    def __mul__(self, other):
        if not isinstance(other, (LaurentFunction, GradedFunction)):
            return LaurentFunction(
                self.domain, self.pole,
                {e: c * sympy.sympify(other) for e, c in self.terms.items()},
            )
        other = self._coerce(other)
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
        return LaurentFunction(self.domain, self.pole, terms)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            return self.invert() ** (-k)
        out = LaurentFunction.one(self.domain, self.pole)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, GradedFunction):
            other = self._coerce(other)
        if not isinstance(other, LaurentFunction):
            return NotImplemented
        diff = self - other
        from .scalars import scalar_is_zero

        return all(scalar_is_zero(c) for c in diff.terms.values())

    def __hash__(self):
        raise TypeError("LaurentFunction is not hashable")

    def invert(self):
        """Inverse in the localization: the weight-0 part must be an
        invertible scalar and everything else must have weight >= 1."""
        from .scalars import scalar_is_zero

        zero_exps = (0,) * len(self.domain.generators)
        c0 = self.terms.get(zero_exps, Integer(0))
        if scalar_is_zero(c0):
            raise DomainError("not localizable: no invertible weight-0 part")
        t = 1 - self * (Integer(1) / c0)
        if any(sum(e) < 1 for e in t.terms):
            raise DomainError("not localizable: negative-weight remainder")
        acc = LaurentFunction.one(self.domain, self.pole)
        p = LaurentFunction.one(self.domain, self.pole)
        for _ in range(self.domain.truncation):
            p = p * t
            if p.is_zero:
                break
            acc = acc + p
        return acc * (Integer(1) / c0)

    def layer(self, k):
        """The graded function multiplying pole^k (pole exponent stripped)."""
        j = self.domain.gen_index(self.pole)
        terms = {}
        for exps, coeff in self.terms.items():
            if exps[j] != k:
                continue
            e = list(exps)
            e[j] = 0
            terms[tuple(e)] = coeff
        return GradedFunction(self.domain, terms)

    def __repr__(self):
        return f"LaurentFunction(pole={self.pole}, {self.terms})"


def laurent_pullback(phi, L):
    """The unique extension of phi* to the Laurent localization.

    Requires phi*(pole) = pole * unit in the source localization; negative
    powers pull back through the inverse of that image.
    """
    src, tgt = phi.source, phi.target
    if L.domain != tgt:
        raise DomainError("Laurent function lives off the morphism target")
    src_pole = _matching_pole(src, tgt, L.pole)
    pb_pole = LaurentFunction.from_graded(
        phi.pullback(GradedFunction.generator(tgt, L.pole)), src_pole
    )
    pole_inv_mono = LaurentFunction.zero(src, src_pole).pole_power(-1)
    unit = pb_pole * pole_inv_mono
    try:
        pinv = unit.invert() * pole_inv_mono
    except DomainError:
        raise DomainError("pullback of the pole variable is not localizable") from None
    slot_vars = [Symbol(b) for b in tgt.base_vars]
    base_pb = [phi.pullbacks[b] for b in tgt.base_vars]
    base_vals = [p.epsilon() for p in base_pb]
    nilp = [p - GradedFunction.from_scalar(src, p.epsilon()) for p in base_pb]
    pole_idx = tgt.gen_index(L.pole)
    gen_pb = {
        i: LaurentFunction.from_graded(
            phi.pullback(GradedFunction.generator(tgt, g)), src_pole
        )
        for i, g in enumerate(tgt.gen_names)
    }
    pos_powers = [LaurentFunction.one(src, src_pole)]
    neg_powers = [LaurentFunction.one(src, src_pole)]
    out = LaurentFunction.zero(src, src_pole)
    for exps, coeff in L.terms.items():
        piece = LaurentFunction.from_graded(
            taylor_scalar(src, coeff, slot_vars, base_vals, nilp), src_pole
        )
        for i, k in enumerate(exps):
            if k == 0:
                continue
            if i == pole_idx:
                if k > 0:
                    while len(pos_powers) <= k:
                        pos_powers.append(pos_powers[-1] * pb_pole)
                    piece = piece * pos_powers[k]
                else:
                    while len(neg_powers) <= -k:
                        neg_powers.append(neg_powers[-1] * pinv)
                    piece = piece * neg_powers[-k]
            else:
                piece = piece * gen_pb[i] ** k
        out = out + piece
    return out


def _matching_pole(src, tgt, tgt_pole):
    """The source generator with the same degree as the target pole."""
    deg = tgt.gen_degree(tgt_pole)
    for name, d in src.generators:
        if d == deg and not is_odd(d):
            return name
    raise DomainError("source chart has no matching even generator for the pole")


def integrate_z22_residue(L, box=None, reg=None):
    """The residue integral: the y^-1 layer of the xi-eta coefficient."""
    dom = L.domain
    coeff = L.terms.get(_z22_exps(dom, -1), Integer(0))
    return definite_integral(coeff, _box_of(dom, box), reg)


# -- the delta complex --------------------------------------------------------

class DeltaComplex:
    """The Koszul-type complex of a free module with shifted generators.

    Elements are graded functions in E_i (the basis vectors shifted by the
    odd degree gamma) and ep_i (the duals), truncated at a symmetric weight;
    delta is left multiplication by sum_i E_i * ep_i.
    """

    def __init__(self, n, degrees, gamma=None, weight=6):
        if gamma is None:
            gamma = next(d for d in standard_order(n) if is_odd(d))
        self.n = n
        self.gamma = tuple(gamma)
        self.degrees = [tuple(d) for d in degrees]
        gens = []
        for i, d in enumerate(self.degrees):
            gens.append((f"E{i + 1}", deg_add(d, self.gamma)))
        for i, d in enumerate(self.degrees):
            gens.append((f"ep{i + 1}", d))
        self.domain = DomainSpec(
            n=n, base_vars=(), generators=tuple(gens),
            truncation=weight, allow_zero_degree=True,
        )

    def element(self, terms):
        return GradedFunction(self.domain, terms)

    def one(self):
        return GradedFunction.one(self.domain)

    def generator(self, name):
        return GradedFunction.generator(self.domain, name)

    def delta_element(self):
        acc = GradedFunction.zero(self.domain)
        for i in range(len(self.degrees)):
            acc = acc + self.generator(f"E{i + 1}") * self.generator(f"ep{i + 1}")
        return acc

    def delta_apply(self, k):
        """Left multiplication by delta; errors on truncation overflow."""
        if not k.is_zero and k.max_weight() + 2 > self.domain.truncation:
            raise DeltaTruncationError(k.max_weight() + 2)
        return self.delta_element() * k

    def omega(self):
        """The product of all odd factors (a delta-cocycle)."""
        acc = self.one()
        for name, deg in self.domain.generators:
            if is_odd(deg):
                acc = acc * self.generator(name)
        return acc

    def coweight(self, exps):
        """Cohomological weight of a monomial: its count of odd factors."""
        return sum(
            e for e, (_, d) in zip(exps, self.domain.generators) if is_odd(d)
        )
