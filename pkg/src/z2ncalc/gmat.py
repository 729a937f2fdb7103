"""Z2^n-graded block matrices over a graded function algebra.

Rows and columns are grouped into 2^n degree sectors in standard order; an
entry in block (k,l) of a matrix of degree Gamma_i is homogeneous of degree
Gamma_k + Gamma_l + Gamma_i. Inverses, quasideterminants, UDL, the graded
determinant and the graded Berezinian all reduce to 2x2 block recursions
whose innermost blocks have central (degree gamma_0) entries.
"""

from sympy import Integer, fraction

from .gfun import DomainError, GradedFunction
from .grading import deg_add, koszul_sign, parity, standard_order, zero_degree
from .scalars import canonical_scalar


# -- raw grid helpers (lists of lists of GradedFunction) ----------------------

def _grid_mul(A, B, domain):
    if A and B and len(A[0]) != len(B):
        raise DomainError("grid shape mismatch in product")
    out = []
    for row in A:
        out.append([])
        for j in range(len(B[0]) if B else 0):
            acc = GradedFunction.zero(domain)
            for k, a in enumerate(row):
                acc = acc + a * B[k][j]
            out[-1].append(acc)
    return out


def _grid_sub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def _grid_eye(domain, k):
    one = GradedFunction.one(domain)
    zero = GradedFunction.zero(domain)
    return [[one if i == j else zero for j in range(k)] for i in range(k)]


def _split(grid, s):
    A = [row[:s] for row in grid[:s]]
    B = [row[s:] for row in grid[:s]]
    C = [row[:s] for row in grid[s:]]
    D = [row[s:] for row in grid[s:]]
    return A, B, C, D


def _classical_det(grid, domain):
    """Laplace-expansion determinant; valid for central (gamma_0) entries."""
    k = len(grid)
    if k == 0:
        return GradedFunction.one(domain)
    if k == 1:
        return grid[0][0]
    acc = GradedFunction.zero(domain)
    for j in range(k):
        minor = [row[:j] + row[j + 1:] for row in grid[1:]]
        term = grid[0][j] * _classical_det(minor, domain)
        acc = acc + (term if j % 2 == 0 else -term)
    return acc


def _central_inverse(grid, domain):
    """Adjugate inverse of a block with central entries."""
    det = _classical_det(grid, domain)
    try:
        dinv = det.invert()
    except DomainError:
        raise DomainError("singular diagonal block") from None
    k = len(grid)
    if k == 1:
        return [[dinv]]
    out = [[None] * k for _ in range(k)]
    for i in range(k):
        for j in range(k):
            minor = [
                [grid[r][c] for c in range(k) if c != i]
                for r in range(k) if r != j
            ]
            cof = _classical_det(minor, domain)
            out[i][j] = (cof if (i + j) % 2 == 0 else -cof) * dinv
    return out


def _grid_inverse(grid, splits, domain):
    """Recursive 2x2 block inversion along the degree-sector partition."""
    if not grid:
        return []
    if len(splits) == 1:
        return _central_inverse(grid, domain)
    s = splits[0]
    A, B, C, D = _split(grid, s)
    Dinv = _grid_inverse(D, splits[1:], domain)
    S = _grid_sub(A, _grid_mul(_grid_mul(B, Dinv, domain), C, domain))
    Sinv = _central_inverse(S, domain)
    SinvBDinv = _grid_mul(_grid_mul(Sinv, B, domain), Dinv, domain)
    DinvCSinv = _grid_mul(_grid_mul(Dinv, C, domain), Sinv, domain)
    lower_right = _grid_sub(
        Dinv, [[-e for e in row] for row in
               _grid_mul(_grid_mul(DinvCSinv, B, domain), Dinv, domain)]
    )
    top = [ra + [-e for e in rb] for ra, rb in zip(Sinv, SinvBDinv)]
    bottom = [[-e for e in ra] + rb for ra, rb in zip(DinvCSinv, lower_right)]
    return top + bottom


def _det_chain(grid, splits, domain):
    """Product of classical determinants of nested quasideterminant blocks."""
    if not grid:
        return GradedFunction.one(domain)
    if len(splits) == 1:
        return _classical_det(grid, domain)
    s = splits[0]
    A, B, C, D = _split(grid, s)
    Dinv = _grid_inverse(D, splits[1:], domain)
    S = _grid_sub(A, _grid_mul(_grid_mul(B, Dinv, domain), C, domain))
    return _classical_det(S, domain) * _det_chain(D, splits[1:], domain)


# -- the matrix type ----------------------------------------------------------

class GradedMatrix:
    """A degree-homogeneous block matrix over a graded function algebra."""

    def __init__(self, domain, deg, row_shape, col_shape, entries, check=True):
        self.domain = domain
        self.deg = tuple(deg)
        self.order = standard_order(domain.n)
        if len(row_shape) != len(self.order) or len(col_shape) != len(self.order):
            raise DomainError("shape must list one count per degree sector")
        self.row_shape = tuple(int(c) for c in row_shape)
        self.col_shape = tuple(int(c) for c in col_shape)
        self.entries = [list(row) for row in entries]
        nr, nc = sum(self.row_shape), sum(self.col_shape)
        if len(self.entries) != nr or any(len(r) != nc for r in self.entries):
            raise DomainError("entry grid does not match declared shapes")
        if check:
            self._validate()

    def _validate(self):
        for i in range(self.nrows):
            gk = self.row_degree(i)
            for j in range(self.ncols):
                want = deg_add(deg_add(gk, self.col_degree(j)), self.deg)
                e = self.entries[i][j]
                if e.domain != self.domain:
                    raise DomainError("entry lives on a different domain")
                if not e.is_homogeneous(want):
                    raise DomainError(
                        f"entry ({i},{j}) not homogeneous of degree {want}"
                    )

    @property
    def nrows(self):
        return sum(self.row_shape)

    @property
    def ncols(self):
        return sum(self.col_shape)

    def _sector_of(self, index, shape):
        acc = 0
        for k, c in enumerate(shape):
            acc += c
            if index < acc:
                return k
        raise DomainError("index out of range")

    def row_degree(self, i):
        return self.order[self._sector_of(i, self.row_shape)]

    def col_degree(self, j):
        return self.order[self._sector_of(j, self.col_shape)]

    def row_splits(self):
        """(sector index, size) for each nonempty row sector, in order."""
        return [(k, c) for k, c in enumerate(self.row_shape) if c]

    @classmethod
    def identity(cls, domain, shape):
        return cls(
            domain, zero_degree(domain.n), shape, shape,
            _grid_eye(domain, sum(shape)),
        )

    def _wrap(self, entries, deg=None, row_shape=None, col_shape=None):
        return GradedMatrix(
            self.domain,
            self.deg if deg is None else deg,
            self.row_shape if row_shape is None else row_shape,
            self.col_shape if col_shape is None else col_shape,
            entries,
        )

    def __eq__(self, other):
        if not isinstance(other, GradedMatrix):
            return NotImplemented
        return (
            self.domain == other.domain
            and self.row_shape == other.row_shape
            and self.col_shape == other.col_shape
            and all(
                a == b
                for ra, rb in zip(self.entries, other.entries)
                for a, b in zip(ra, rb)
            )
        )

    def __add__(self, other):
        if self.deg != other.deg or self.row_shape != other.row_shape \
                or self.col_shape != other.col_shape:
            raise DomainError("matrix shape/degree mismatch in sum")
        return self._wrap(
            [[a + b for a, b in zip(ra, rb)]
             for ra, rb in zip(self.entries, other.entries)]
        )

    def __neg__(self):
        return self._wrap([[-e for e in row] for row in self.entries])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, GradedMatrix):
            return NotImplemented
        if self.col_shape != other.row_shape:
            raise DomainError("inner shapes do not match")
        grid = _grid_mul(self.entries, other.entries, self.domain)
        return GradedMatrix(
            self.domain, deg_add(self.deg, other.deg),
            self.row_shape, other.col_shape, grid,
        )

    def scalar_mul(self, alpha):
        """Graded scalar multiplication: row block k picks up the sign
        (-1)^<deg alpha, Gamma_k>."""
        if not isinstance(alpha, GradedFunction):
            alpha = GradedFunction.from_scalar(self.domain, alpha)
        adeg = alpha.degree()
        if adeg is None:
            if alpha.is_zero:
                adeg = zero_degree(self.domain.n)
            else:
                raise DomainError("scalar_mul needs a homogeneous scalar")
        grid = []
        for i, row in enumerate(self.entries):
            sign = koszul_sign(adeg, self.row_degree(i))
            grid.append([(alpha * e) * sign for e in row])
        return self._wrap(grid, deg=deg_add(adeg, self.deg))

    def supertranspose(self):
        """The n=1 supertranspose; not defined for higher n."""
        if self.domain.n != 1:
            raise DomainError("supertranspose is only defined for n = 1")
        odd = parity(self.deg) == 1
        grid = [
            [None] * self.nrows for _ in range(self.ncols)
        ]
        for i in range(self.nrows):
            ks = self._sector_of(i, self.row_shape)
            for j in range(self.ncols):
                ls = self._sector_of(j, self.col_shape)
                # result block (ls, ks) receives t(block (ks, ls))
                if odd:
                    sign = -1 if (ls == 0 and ks == 1) else 1
                else:
                    sign = -1 if (ls == 1 and ks == 0) else 1
                grid[j][i] = self.entries[i][j] * sign
        return GradedMatrix(
            self.domain, self.deg, self.col_shape, self.row_shape, grid
        )

    def z2n_trace(self):
        """sum_k (-1)^<Gamma_k + deg, Gamma_k> tr(block kk)."""
        if self.row_shape != self.col_shape:
            raise DomainError("trace needs a square matrix")
        acc = GradedFunction.zero(self.domain)
        for i in range(self.nrows):
            gk = self.row_degree(i)
            sign = koszul_sign(deg_add(gk, self.deg), gk)
            acc = acc + self.entries[i][i] * sign
        return acc

    def _require_even_square(self):
        if self.row_shape != self.col_shape:
            raise DomainError("operation needs a square matrix")
        if self.deg != zero_degree(self.domain.n):
            raise DomainError("operation needs a degree gamma_0 matrix")

    def block_inverse(self):
        """Two-sided inverse via recursive 2x2 block partition."""
        self._require_even_square()
        splits = [c for _, c in self.row_splits()]
        grid = _grid_inverse(self.entries, splits, self.domain)
        return self._wrap(grid)

    def quasideterminant(self, row_split, col_split):
        """A - B D^-1 C for the partition with row_split/col_split leading
        rows/columns in block (1,1)."""
        if not (0 < row_split < self.nrows and 0 < col_split < self.ncols):
            raise DomainError("partition must be proper")
        A = [row[:col_split] for row in self.entries[:row_split]]
        B = [row[col_split:] for row in self.entries[:row_split]]
        C = [row[:col_split] for row in self.entries[row_split:]]
        D = [row[col_split:] for row in self.entries[row_split:]]
        dsplits = self._consecutive_splits(
            [self._sector_of(i, self.row_shape) for i in range(row_split, self.nrows)]
        )
        try:
            Dinv = _grid_inverse(D, dsplits, self.domain)
        except DomainError:
            raise DomainError("quasideterminant undefined: D singular") from None
        grid = _grid_sub(A, _grid_mul(_grid_mul(B, Dinv, self.domain), C, self.domain))
        row_shape = self._shape_of_rows(range(row_split), self.row_shape)
        col_shape = self._shape_of_rows(range(col_split), self.col_shape)
        return GradedMatrix(self.domain, self.deg, row_shape, col_shape, grid)

    def _consecutive_splits(self, sectors):
        splits = []
        for s in sectors:
            if splits and splits[-1][0] == s:
                splits[-1][1] += 1
            else:
                splits.append([s, 1])
        return [c for _, c in splits]

    def _shape_of_rows(self, rows, shape):
        counts = [0] * len(self.order)
        for i in rows:
            counts[self._sector_of(i, shape)] += 1
        return tuple(counts)

    def udl_decompose(self):
        """Lambda = U D L with U/L unitriangular and D block diagonal whose
        blocks are the nested quasideterminants."""
        self._require_even_square()
        dom = self.domain
        n = self.nrows

        def rec(grid, splits):
            if len(splits) <= 1:
                k = len(grid)
                return _grid_eye(dom, k), grid, _grid_eye(dom, k)
            s = splits[0]
            A, B, C, D = _split(grid, s)
            try:
                Dinv = _grid_inverse(D, splits[1:], dom)
            except DomainError:
                raise DomainError("no UDL: singular nested block") from None
            S = _grid_sub(A, _grid_mul(_grid_mul(B, Dinv, dom), C, dom))
            BDinv = _grid_mul(B, Dinv, dom)
            DinvC = _grid_mul(Dinv, C, dom)
            Usub, Dsub, Lsub = rec(D, splits[1:])
            zero = GradedFunction.zero(dom)
            eye = _grid_eye(dom, s)

            def assemble(tl, tr, bl, br):
                top = [rt + rr for rt, rr in zip(tl, tr)]
                bot = [rb + rr for rb, rr in zip(bl, br)]
                return top + bot

            zs_tr = [[zero] * (len(grid) - s) for _ in range(s)]
            zs_bl = [[zero] * s for _ in range(len(grid) - s)]
            # D = Usub Dsub Lsub, so the off-diagonal factors absorb the
            # unitriangular parts: U = [[I, B D^-1 Usub], [0, Usub]] etc.
            U = assemble(eye, _grid_mul(BDinv, Usub, dom), zs_bl, Usub)
            Dm = assemble(S, zs_tr, zs_bl, Dsub)
            L = assemble(eye, zs_tr, _grid_mul(Lsub, DinvC, dom), Lsub)
            return U, Dm, L

        splits = [c for _, c in self.row_splits()]
        U, Dm, L = rec(self.entries, splits)
        return self._wrap(U), self._wrap(Dm), self._wrap(L)

    def _certify_polynomial(self, f, what):
        terms = {}
        for exps, coeff in f.terms.items():
            c = canonical_scalar(coeff)
            _, den = fraction(c)
            if not den.is_number:
                raise DomainError(
                    f"{what}: coefficient {coeff} does not clear denominators"
                )
            terms[exps] = c
        return GradedFunction(f.domain, terms)

    def z2n_det(self):
        """det|L|_11 * det|L^{1:1}|_22 * ... for an all-even gamma_0 matrix.

        The result is certified polynomial: every coefficient must clear its
        denominators after cancellation, else a hard error is raised.
        """
        self._require_even_square()
        half = len(self.order) // 2
        if any(self.row_shape[k] for k in range(half, len(self.order))):
            raise DomainError("z2n_det needs all row degrees even")
        splits = [c for _, c in self.row_splits()]
        det = _det_chain(self.entries, splits, self.domain)
        return self._certify_polynomial(det, "z2n_det")

    def z2n_ber(self):
        """z2n_det(A - B D^-1 C) * z2n_det(D)^-1 over the even/odd double
        partition."""
        self._require_even_square()
        half = len(self.order) // 2
        ev = sum(self.row_shape[:half])
        A, B, C, D = _split(self.entries, ev)
        even_splits = [c for c in self.row_shape[:half] if c]
        odd_splits = [c for c in self.row_shape[half:] if c]
        dom = self.domain
        if not odd_splits:
            return self._certify_polynomial(
                _det_chain(A, even_splits, dom), "z2n_ber"
            )
        try:
            Dinv = _grid_inverse(D, odd_splits, dom)
            det_d = self._certify_polynomial(
                _det_chain(D, odd_splits, dom), "z2n_ber"
            )
            det_d_inv = det_d.invert()
        except DomainError:
            raise DomainError("Berezinian undefined: odd block singular") from None
        if not even_splits:
            return det_d_inv.map_coeffs(canonical_scalar)
        S = _grid_sub(A, _grid_mul(_grid_mul(B, Dinv, dom), C, dom))
        det_s = self._certify_polynomial(_det_chain(S, even_splits, dom), "z2n_ber")
        return (det_s * det_d_inv).map_coeffs(canonical_scalar)

    def __repr__(self):
        return (
            f"GradedMatrix(deg={self.deg}, rows={self.row_shape}, "
            f"cols={self.col_shape})"
        )
