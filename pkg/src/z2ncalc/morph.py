"""Coordinate morphisms between graded domains.

A morphism is given by the pullbacks of the target coordinates (fundamental
theorem of graded morphisms): degree-preserving graded functions over the
source, one per target coordinate. Pullback of arbitrary functions proceeds
coefficientwise by formal Taylor expansion around the base map.
"""

from sympy import ImmutableMatrix, Rational, Symbol

from .gfun import DomainError, GradedFunction, taylor_scalar
from .grading import deg_add, dot2, zero_degree
from .gmat import GradedMatrix


class CoordMorphism:
    """A morphism source -> target recorded through its coordinate pullbacks."""

    def __init__(self, source, target, pullbacks, check_base_image=True):
        self.source = source
        self.target = target
        self.pullbacks = dict(pullbacks)
        self.base_image_checked = False
        names = target.coord_names()
        if set(self.pullbacks) != set(names):
            raise DomainError("need exactly one pullback value per target coordinate")
        for name in names:
            value = self.pullbacks[name]
            if value.domain != source:
                raise DomainError(f"pullback of {name} lives off the source domain")
            want = target.coord_degree(name)
            if not value.is_homogeneous(want):
                raise DomainError(
                    f"degree condition violated for {name}: expected {want}"
                )
        if check_base_image:
            self._check_base_image()

    def _check_base_image(self):
        """Affine-case base-image check (Eq. third); recorded otherwise."""
        for name in self.target.base_vars:
            box = self.target.box_for(name)
            if box is None:
                continue
            eps = self.pullbacks[name].epsilon()
            image = _affine_interval(eps, self.source)
            if image is None:
                return  # non-affine: obligation recorded, unchecked
            lo, hi = box
            if not (lo <= image[0] and image[1] <= hi):
                raise DomainError(
                    f"base image of {name} falls outside its declared box"
                )
        self.base_image_checked = True

    # -- operations --------------------------------------------------------
    def pullback(self, f):
        """phi*(f) for f over the target, via formal Taylor expansion."""
        if f.domain != self.target:
            raise DomainError("pullback argument must live on the target domain")
        src, tgt = self.source, self.target
        slot_vars = [Symbol(b) for b in tgt.base_vars]
        base_pb = [self.pullbacks[b] for b in tgt.base_vars]
        base_vals = [p.epsilon() for p in base_pb]
        nilp = [p - GradedFunction.from_scalar(src, p.epsilon()) for p in base_pb]
        gen_pb = [self.pullbacks[g] for g in tgt.gen_names]
        powers = [[GradedFunction.one(src)] for _ in gen_pb]
        out = GradedFunction.zero(src)
        for exps, coeff in f.terms.items():
            piece = taylor_scalar(src, coeff, slot_vars, base_vals, nilp)
            for i, k in enumerate(exps):
                while len(powers[i]) <= k:
                    powers[i].append(powers[i][-1] * gen_pb[i])
                piece = piece * powers[i][k]
            out = out + piece
        return out

    def modified_jacobian(self):
        """The signed Jacobian: rows are target coordinates, columns source
        coordinates, entry (B,A) = +- d/d(mu^A) phi*(nu^B) with the sign
        (-1)^(<deg mu^A, deg nu^B> + parity of mu^A within the sign rule)
        chosen so that composition becomes matrix multiplication."""
        src, tgt = self.source, self.target
        rows = tgt.coord_names()
        cols = src.coord_names()
        grid = []
        for B in rows:
            b = tgt.coord_degree(B)
            pb = self.pullbacks[B]
            row = []
            for A in cols:
                a = src.coord_degree(A)
                sign = -1 if (dot2(a, b) + dot2(a, a)) % 2 else 1
                row.append(pb.partial(A) * sign)
            grid.append(row)
        return GradedMatrix(
            src, zero_degree(src.n),
            _sector_shape(tgt), _sector_shape(src), grid,
        )

    def tangent_matrix_at(self, point):
        """epsilon of the modified Jacobian evaluated at a base point."""
        for name in self.source.base_vars:
            box = self.source.box_for(name)
            if box is not None and name in point:
                v = Rational(point[name])
                if not (box[0] <= v <= box[1]):
                    raise DomainError(f"point {name}={v} outside declared box")
        subs = {Symbol(k): Rational(v) for k, v in point.items()}
        jac = self.modified_jacobian()
        return ImmutableMatrix([
            [e.epsilon().xreplace(subs) for e in row] for row in jac.entries
        ])

    def __repr__(self):
        return f"CoordMorphism({len(self.pullbacks)} coordinates)"


def _sector_shape(domain):
    """Counts of coordinates per degree sector (base vars in sector 0)."""
    from .grading import order_position, standard_order

    counts = [0] * len(standard_order(domain.n))
    counts[0] += len(domain.base_vars)
    for _, deg in domain.generators:
        counts[order_position(deg, domain.n)] += 1
    return tuple(counts)


def _affine_interval(expr, domain):
    """Exact interval image of an affine expression over the domain boxes.

    Returns None when expr is not affine with rational coefficients or a
    needed box is missing.
    """
    import sympy

    expr = sympy.expand(sympy.sympify(expr))
    syms = [Symbol(v) for v in domain.base_vars]
    try:
        poly = sympy.Poly(expr, *syms) if syms else None
    except sympy.PolynomialError:
        return None
    if poly is None:
        if expr.is_rational:
            return (expr, expr)
        return None
    if poly.total_degree() > 1 or not all(c.is_rational for c in poly.coeffs()):
        return None
    lo = hi = poly.nth(*([0] * len(syms)))
    for i, v in enumerate(domain.base_vars):
        mono = [0] * len(syms)
        mono[i] = 1
        a = poly.nth(*mono)
        if a == 0:
            continue
        box = domain.box_for(v)
        if box is None:
            return None
        ends = sorted((a * box[0], a * box[1]))
        lo += ends[0]
        hi += ends[1]
    return (lo, hi)


def make_morphism(source, target, values, check_base_image=True):
    """Build a CoordMorphism from target-coordinate pullback values.

    values: mapping name -> GradedFunction, or a sequence aligned with
    target.coord_names().
    """
    if not isinstance(values, dict):
        names = target.coord_names()
        values = list(values)
        if len(values) != len(names):
            raise DomainError(
                f"expected {len(names)} pullback values, got {len(values)}"
            )
        values = dict(zip(names, values))
    return CoordMorphism(source, target, values, check_base_image)


def identity_morphism(domain):
    return make_morphism(
        domain, domain,
        {name: GradedFunction.coordinate(domain, name)
         for name in domain.coord_names()},
    )


def compose(psi, phi):
    """The composite Psi o Phi (phi first): pullbacks are phi*(psi*(coord))."""
    if phi.target != psi.source:
        raise DomainError("morphisms are not composable")
    values = {
        name: phi.pullback(psi.pullbacks[name])
        for name in psi.target.coord_names()
    }
    return CoordMorphism(phi.source, psi.target, values, check_base_image=False)


def pullback_matrix(phi, mat):
    """Apply phi* entrywise to a matrix over phi.target."""
    if mat.domain != phi.target:
        raise DomainError("matrix lives off the morphism target")
    grid = [[phi.pullback(e) for e in row] for row in mat.entries]
    return GradedMatrix(
        phi.source, mat.deg, mat.row_shape, mat.col_shape, grid
    )
