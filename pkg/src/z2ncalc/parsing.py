"""Parsers for the CLI grammar: expressions, domain/matrix/transformation,
registry and section files.

The expression grammar is LL(1): rationals p/q, declared coordinate names,
function application F(x), derivatives F'(x) or D[F,(2,0)](x,y), operators
^ (tightest), unary -, *, then binary + and -. Parse errors carry line and
column.
"""

import os
import re

from sympy import Integer, Rational, Symbol

from .berez import BerSection, LaurentFunction
from .gfun import DomainError, DomainSpec, GradedFunction
from .gmat import GradedMatrix
from .morph import make_morphism
from .scalars import IntegralRegistry, _RELATIONS, applied


class ParseError(Exception):
    def __init__(self, message, line=None, col=None):
        self.message = message
        self.line = line
        self.col = col
        where = ""
        if line is not None:
            where = f" at line {line}" + (f", column {col}" if col else "")
        super().__init__(message + where)


# -- tokenizer ----------------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|('+)|(.))")


def tokenize(text, line=1):
    """Tokens (kind, value, line, col); kinds INT, NAME, QUOTES, CHAR."""
    tokens = []
    for lineno, chunk in enumerate(text.split("\n"), start=line):
        pos = 0
        while pos < len(chunk):
            m = _TOKEN_RE.match(chunk, pos)
            if not m or m.end() == pos:
                break
            col = m.start(m.lastindex) + 1
            if m.group(1):
                tokens.append(("INT", int(m.group(1)), lineno, col))
            elif m.group(2):
                tokens.append(("NAME", m.group(2), lineno, col))
            elif m.group(3):
                tokens.append(("QUOTES", len(m.group(3)), lineno, col))
            else:
                tokens.append(("CHAR", m.group(4), lineno, col))
            pos = m.end()
    return tokens


class _Tokens:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self):
        t = self.peek()
        if t is None:
            raise ParseError("unexpected end of input")
        self.i += 1
        return t

    def expect_char(self, ch):
        t = self.peek()
        if t is None or t[0] != "CHAR" or t[1] != ch:
            got = "end of input" if t is None else repr(t[1])
            line, col = (t[2], t[3]) if t else (None, None)
            raise ParseError(f"expected {ch!r}, got {got}", line, col)
        return self.next()

    def at_char(self, ch):
        t = self.peek()
        return t is not None and t[0] == "CHAR" and t[1] == ch


# -- expression parser --------------------------------------------------------

class ExprParser:
    """Parses the expression grammar over a domain into a GradedFunction,
    or a LaurentFunction when a pole variable is designated."""

    def __init__(self, domain, pole=None):
        self.domain = domain
        self.pole = pole

    def _wrap_scalar(self, s):
        if self.pole:
            return LaurentFunction(
                self.domain, self.pole,
                {(0,) * len(self.domain.generators): s},
            )
        return GradedFunction.from_scalar(self.domain, s)

    def _one(self):
        return self._wrap_scalar(Integer(1))

    def parse(self, text, line=1):
        ts = _Tokens(tokenize(text, line))
        value = self._expr(ts)
        t = ts.peek()
        if t is not None:
            raise ParseError(f"unexpected token {t[1]!r}", t[2], t[3])
        return value

    def parse_tokens(self, ts):
        return self._expr(ts)

    def _expr(self, ts):
        value = self._term(ts)
        while True:
            t = ts.peek()
            if t and t[0] == "CHAR" and t[1] in "+-":
                ts.next()
                rhs = self._term(ts)
                value = value + rhs if t[1] == "+" else value - rhs
            else:
                return value

    def _term(self, ts):
        value = self._unary(ts)
        while ts.at_char("*"):
            ts.next()
            value = value * self._unary(ts)
        return value

    def _unary(self, ts):
        if ts.at_char("-"):
            ts.next()
            return -self._unary(ts)
        return self._power(ts)

    def _power(self, ts):
        base = self._atom(ts)
        if ts.at_char("^"):
            ts.next()
            sign = 1
            if ts.at_char("-"):
                ts.next()
                sign = -1
            t = ts.next()
            if t[0] != "INT":
                raise ParseError("exponent must be an integer", t[2], t[3])
            k = sign * t[1]
            if k >= 0:
                return base ** k
            return self._invert(base) ** (-k)
        return base

    def _invert(self, base):
        if self.pole and isinstance(base, LaurentFunction):
            # Factor out pole powers first: the unit-part inversion only
            # handles series with an invertible weight-0 scalar.
            pidx = base.domain.gen_index(base.pole)
            m = min((exps[pidx] for exps in base.terms), default=0)
            if m != 0:
                rest = base * base.pole_power(-m)
                return rest.invert() * base.pole_power(-m)
        return base.invert()

    def _atom(self, ts):
        t = ts.peek()
        if t is None:
            raise ParseError("unexpected end of expression")
        kind, value, line, col = t
        if kind == "INT":
            ts.next()
            if ts.at_char("/"):
                ts.next()
                d = ts.next()
                if d[0] != "INT" or d[1] == 0:
                    raise ParseError("malformed rational", d[2], d[3])
                return self._wrap_scalar(Rational(value, d[1]))
            return self._wrap_scalar(Integer(value))
        if kind == "CHAR" and value == "(":
            ts.next()
            inner = self._expr(ts)
            ts.expect_char(")")
            return inner
        if kind == "NAME":
            ts.next()
            if value == "D" and ts.at_char("["):
                return self._derivative_form(ts)
            quotes = 0
            if ts.peek() and ts.peek()[0] == "QUOTES":
                quotes = ts.next()[1]
            if ts.at_char("("):
                return self._call(value, quotes, ts)
            if quotes:
                raise ParseError(
                    f"derivative quotes need a function application: {value}",
                    line, col,
                )
            return self._coordinate(value, line, col)
        raise ParseError(f"unexpected token {value!r}", line, col)

    def _coordinate(self, name, line, col):
        if name in self.domain.base_vars:
            return self._wrap_scalar(Symbol(name))
        if name in self.domain.gen_names:
            g = GradedFunction.generator(self.domain, name)
            return LaurentFunction.from_graded(g, self.pole) if self.pole else g
        raise ParseError(f"undeclared name {name}", line, col)

    def _call(self, name, quotes, ts):
        ts.expect_char("(")
        args = [self._scalar_arg(ts)]
        while ts.at_char(","):
            ts.next()
            args.append(self._scalar_arg(ts))
        ts.expect_char(")")
        if quotes:
            if len(args) != 1:
                raise ParseError("quote derivatives need a single argument")
            return self._wrap_scalar(_quoted(name, args, quotes))
        return self._wrap_scalar(applied(name, args))

    def _derivative_form(self, ts):
        ts.expect_char("[")
        t = ts.next()
        if t[0] != "NAME":
            raise ParseError("expected function name in D[...]", t[2], t[3])
        name = t[1]
        ts.expect_char(",")
        ts.expect_char("(")
        dindex = []
        while True:
            k = ts.next()
            if k[0] != "INT":
                raise ParseError("expected integer in derivative index", k[2], k[3])
            dindex.append(k[1])
            if ts.at_char(","):
                ts.next()
                continue
            break
        ts.expect_char(")")
        ts.expect_char("]")
        ts.expect_char("(")
        args = [self._scalar_arg(ts)]
        while ts.at_char(","):
            ts.next()
            args.append(self._scalar_arg(ts))
        ts.expect_char(")")
        if len(args) != len(dindex):
            raise ParseError(f"derivative index arity mismatch for {name}")
        return self._wrap_scalar(applied(name, args, tuple(dindex)))

    def _scalar_arg(self, ts):
        value = self._expr(ts)
        terms = value.terms
        zero = (0,) * len(self.domain.generators)
        if not terms:
            return Integer(0)
        if set(terms) == {zero}:
            return terms[zero]
        t = ts.peek()
        raise ParseError(
            "function arguments must be generator-free",
            t[2] if t else None, t[3] if t else None,
        )


def _quoted(name, args, k):
    """name followed by k quotes applied to args."""
    sign = 1
    cur = name
    if cur in _RELATIONS:
        for _ in range(k):
            s, cur = _RELATIONS[cur]
            sign *= s
        return sign * applied(cur, args)
    return applied(name, args, (k,))


def parse_expression(domain, text, pole=None, line=1):
    return ExprParser(domain, pole).parse(text, line)


# -- line-based file formats --------------------------------------------------

def _lines(text):
    for i, raw in enumerate(text.split("\n"), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield i, line


def _parse_rational(s, lineno):
    s = s.strip()
    m = re.fullmatch(r"(-?\d+)\s*(?:/\s*(\d+))?", s)
    if not m:
        raise ParseError(f"malformed rational {s!r}", lineno)
    return Rational(int(m.group(1)), int(m.group(2) or 1))


def _parse_degree(s, lineno):
    m = re.fullmatch(r"\(\s*([01](?:\s*,\s*[01])*)\s*\)", s.strip())
    if not m:
        raise ParseError(f"malformed degree {s!r}", lineno)
    return tuple(int(b) for b in re.split(r"\s*,\s*", m.group(1)))


def parse_domain(text):
    """Domain file: n, base variables, generators with degrees, truncation,
    optional boxes."""
    n = None
    base = []
    gens = []
    truncate = None
    boxes = []
    for lineno, line in _lines(text):
        if m := re.fullmatch(r"n\s*=\s*(\d+)", line):
            n = int(m.group(1))
        elif m := re.fullmatch(r"base\s*=\s*(.+)", line):
            base.extend(v.strip() for v in m.group(1).split(","))
        elif m := re.fullmatch(r"gen\s+(\w+)\s*:\s*(\(.+\))", line):
            gens.append((m.group(1), _parse_degree(m.group(2), lineno)))
        elif m := re.fullmatch(r"truncate\s*=\s*(\d+)", line):
            truncate = int(m.group(1))
        elif m := re.fullmatch(r"box\s+(\w+)\s*=\s*\[(.+),(.+)\]", line):
            boxes.append((
                m.group(1),
                _parse_rational(m.group(2), lineno),
                _parse_rational(m.group(3), lineno),
            ))
        else:
            raise ParseError(f"unrecognized domain line {line!r}", lineno)
    if n is None or truncate is None:
        raise ParseError("domain file needs 'n = ...' and 'truncate = ...'")
    return DomainSpec(
        n=n, base_vars=tuple(base), generators=tuple(gens),
        truncation=truncate, boxes=tuple(boxes),
    )


def parse_registry(text):
    """Registry file: declared integrals and compact-support flags."""
    reg = IntegralRegistry()
    for lineno, line in _lines(text):
        if m := re.fullmatch(r"integral\s+(\w+)\s*\[(.+),(.+)\]\s*=\s*(.+)", line):
            reg.register(
                m.group(1),
                (
                    _parse_rational(m.group(2), lineno),
                    _parse_rational(m.group(3), lineno),
                ),
                _parse_rational(m.group(4), lineno),
                compact=False,
            )
        elif m := re.fullmatch(r"support\s+(\w+)\s+compact", line):
            reg.declare_compact(m.group(1))
        else:
            raise ParseError(f"unrecognized registry line {line!r}", lineno)
    return reg


def parse_matrix(text, domain):
    """Matrix file: deg/rows/cols headers, then bracketed entry rows."""
    deg = None
    rows = cols = None
    grid = []
    parser = ExprParser(domain)
    for lineno, line in _lines(text):
        if m := re.fullmatch(r"deg\s*=\s*(\(.+\))", line):
            deg = _parse_degree(m.group(1), lineno)
        elif m := re.fullmatch(r"rows\s*=\s*(.+)", line):
            rows = tuple(int(c) for c in m.group(1).split(","))
        elif m := re.fullmatch(r"cols\s*=\s*(.+)", line):
            cols = tuple(int(c) for c in m.group(1).split(","))
        elif line.startswith("["):
            ts = _Tokens(tokenize(line, lineno))
            ts.expect_char("[")
            row = [parser.parse_tokens(ts)]
            while ts.at_char(","):
                ts.next()
                row.append(parser.parse_tokens(ts))
            ts.expect_char("]")
            grid.append(row)
        else:
            raise ParseError(f"unrecognized matrix line {line!r}", lineno)
    if deg is None or rows is None or cols is None:
        raise ParseError("matrix file needs deg, rows and cols headers")
    return GradedMatrix(domain, deg, rows, cols, grid)


def load_domain(path):
    with open(path) as fh:
        return parse_domain(fh.read())


def parse_transformation(text, basedir):
    """Transformation file: source/target domain files, then one pullback
    assignment per target coordinate."""
    source = target = None
    assignments = []
    for lineno, line in _lines(text):
        if m := re.fullmatch(r"source\s*=\s*(\S+)", line):
            source = load_domain(os.path.join(basedir, m.group(1)))
        elif m := re.fullmatch(r"target\s*=\s*(\S+)", line):
            target = load_domain(os.path.join(basedir, m.group(1)))
        elif m := re.fullmatch(r"(\w+)\s*=\s*(.+)", line):
            assignments.append((lineno, m.group(1), m.group(2)))
        else:
            raise ParseError(f"unrecognized transformation line {line!r}", lineno)
    if source is None or target is None:
        raise ParseError("transformation file needs source and target domains")
    parser = ExprParser(source)
    values = {}
    for lineno, name, expr in assignments:
        if name not in target.coord_names():
            raise ParseError(f"{name} is not a target coordinate", lineno)
        values[name] = parser.parse(expr, lineno)
    return make_morphism(source, target, values)


def load_transformation(path):
    with open(path) as fh:
        return parse_transformation(fh.read(), os.path.dirname(path) or ".")


def parse_section(text, basedir):
    """Section file: charts, per-chart coefficients (optionally Laurent via a
    pole declaration) and transition references."""
    chart_domains = {}
    poles = {}
    coeff_exprs = {}
    transitions = {}
    for lineno, line in _lines(text):
        if m := re.fullmatch(r"chart\s+(\w+)\s*=\s*(\S+)", line):
            chart_domains[m.group(1)] = load_domain(os.path.join(basedir, m.group(2)))
        elif m := re.fullmatch(r"pole\s+(\w+)\s*=\s*(\w+)", line):
            poles[m.group(1)] = m.group(2)
        elif m := re.fullmatch(r"coeff\s+(\w+)\s*=\s*(.+)", line):
            coeff_exprs[m.group(1)] = (lineno, m.group(2))
        elif m := re.fullmatch(r"transition\s+(\w+)\s+(\w+)\s*=\s*(\S+)", line):
            transitions[(m.group(1), m.group(2))] = load_transformation(
                os.path.join(basedir, m.group(3))
            )
        else:
            raise ParseError(f"unrecognized section line {line!r}", lineno)
    charts = {}
    for name, dom in chart_domains.items():
        if name not in coeff_exprs:
            raise ParseError(f"chart {name} has no coefficient")
        lineno, expr = coeff_exprs[name]
        pole = poles.get(name)
        charts[name] = (dom, parse_expression(dom, expr, pole=pole, line=lineno))
    for name in coeff_exprs:
        if name not in chart_domains:
            raise ParseError(f"coefficient for undeclared chart {name}")
    return BerSection(charts, transitions)


def load_section(path):
    with open(path) as fh:
        return parse_section(fh.read(), os.path.dirname(path) or ".")


def load_registry(path):
    with open(path) as fh:
        return parse_registry(fh.read())


def load_matrix(path, domain):
    with open(path) as fh:
        return parse_matrix(fh.read(), domain)
