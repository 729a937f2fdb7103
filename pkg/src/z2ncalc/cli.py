"""Command-line interface.

Exit codes: 0 success (and checks that pass), 1 domain errors or failed
checks, 2 parse errors. --format json wraps results in a small JSON object.
"""

import argparse
import json
import sys

from sympy import Rational

from .berez import (
    DeltaComplex,
    glue_check,
    integrate_z2,
    integrate_z22_naive,
    integrate_z22_residue,
)
from .forms import CONVENTIONS, FormAlgebra
from .gfun import DomainError
from .grading import koszul_sign, standard_order, format_degree
from .morph import compose
from .parsing import (
    ParseError,
    _parse_degree,
    load_domain,
    load_matrix,
    load_registry,
    load_section,
    load_transformation,
    parse_expression,
)
from .printing import (
    print_matrix_file,
    print_rational,
    print_value,
)


def _emit(args, payload, text):
    if args.format == "json":
        print(json.dumps(payload))
    else:
        print(text)


def _emit_value(args, value):
    s = print_value(value)
    _emit(args, {"result": s}, s)


def _emit_check(args, ok, report):
    lines = [f"{label}: {'ok' if good else 'FAIL'}" for label, good in report]
    _emit(
        args,
        {"ok": ok, "report": [{"check": l, "ok": g} for l, g in report]},
        "\n".join(lines + [("PASS" if ok else "FAIL")]),
    )
    return 0 if ok else 1


def _expr_args(p, count=1):
    p.add_argument("--domain", "-d", required=True, help="domain file")
    p.add_argument("--pole", help="even generator carrying Laurent poles")
    p.add_argument("expr", nargs=count if count > 1 else None)


def _parse_point(s):
    point = {}
    for piece in s.split(","):
        name, _, val = piece.partition("=")
        point[name.strip()] = Rational(val.strip())
    return point


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    ap = argparse.ArgumentParser(prog="z2ncalc", parents=[common])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=(
        lambda **kw: argparse.ArgumentParser(parents=[common], **kw)
    ))

    p = sub.add_parser("sign", help="Koszul sign of two degrees")
    p.add_argument("deg_a")
    p.add_argument("deg_b")

    p = sub.add_parser("order", help="standard sector order for Z2^n")
    p.add_argument("n", type=int)

    for name, nexpr, hlp in (
        ("mul", 2, "product of two expressions"),
        ("invert", 1, "multiplicative inverse"),
    ):
        p = sub.add_parser(name, help=hlp)
        p.add_argument("--domain", "-d", required=True)
        p.add_argument("--pole")
        p.add_argument("expr", nargs=nexpr)

    p = sub.add_parser("partial", help="partial derivative")
    p.add_argument("--domain", "-d", required=True)
    p.add_argument("var")
    p.add_argument("expr")

    p = sub.add_parser("pullback", help="pull an expression back along a map")
    p.add_argument("--transformation", "-t", required=True)
    p.add_argument("--pole", help="pole generator on the target chart")
    p.add_argument("expr")

    p = sub.add_parser("compose", help="compose two maps (first applied first)")
    p.add_argument("first")
    p.add_argument("second")

    p = sub.add_parser("jac", help="signed Jacobian matrix of a map")
    p.add_argument("--transformation", "-t", required=True)

    p = sub.add_parser("tangent", help="Jacobian at a base point")
    p.add_argument("--transformation", "-t", required=True)
    p.add_argument("--at", required=True, help="e.g. x=1/2,y=0")

    for name, hlp in (
        ("strans", "supertranspose"),
        ("trace", "graded trace"),
        ("udl", "UDL decomposition"),
        ("det", "graded determinant"),
        ("ber", "graded Berezinian"),
    ):
        p = sub.add_parser(name, help=hlp)
        p.add_argument("--domain", "-d", required=True)
        p.add_argument("--matrix", "-m", required=True)

    p = sub.add_parser("qdet", help="quasideterminant block A - B D^-1 C")
    p.add_argument("--domain", "-d", required=True)
    p.add_argument("--matrix", "-m", required=True)
    p.add_argument("--row", type=int, required=True)
    p.add_argument("--col", type=int, required=True)

    p = sub.add_parser("dd-check", help="verify d(d f) = 0")
    p.add_argument("--domain", "-d", required=True)
    p.add_argument(
        "--convention", choices=CONVENTIONS + ("both",), default="both"
    )
    p.add_argument("expr")

    p = sub.add_parser("glue-check", help="verify section gluing and coherence")
    p.add_argument("--section", "-s", required=True)

    p = sub.add_parser("integrate", help="Berezin integration")
    p.add_argument("--domain", "-d", required=True)
    p.add_argument("--registry", "-r")
    p.add_argument("--mode", choices=("z2", "naive", "residue"), default="z2")
    p.add_argument("--pole", help="pole generator (residue mode)")
    p.add_argument("expr")

    p = sub.add_parser("delta-check", help="verify delta^2 = 0 and delta omega = 0")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--degrees", required=True, help="e.g. '(0,1);(1,0)'")
    p.add_argument("--gamma")
    p.add_argument("--weight", type=int, default=6)

    return ap


def _run(args):
    cmd = args.command

    if cmd == "sign":
        s = koszul_sign(_parse_degree(args.deg_a, None), _parse_degree(args.deg_b, None))
        _emit(args, {"result": s}, f"{s:+d}")
        return 0

    if cmd == "order":
        degs = [format_degree(d) for d in standard_order(args.n)]
        _emit(args, {"result": degs}, "\n".join(degs))
        return 0

    if cmd in ("mul", "invert", "partial"):
        dom = load_domain(args.domain)
        pole = getattr(args, "pole", None)
        if cmd == "mul":
            a, b = (parse_expression(dom, e, pole=pole) for e in args.expr)
            _emit_value(args, a * b)
        elif cmd == "invert":
            f = parse_expression(dom, args.expr[0], pole=pole)
            _emit_value(args, f.invert())
        else:
            f = parse_expression(dom, args.expr)
            _emit_value(args, f.partial(args.var))
        return 0

    if cmd == "pullback":
        phi = load_transformation(args.transformation)
        f = parse_expression(phi.target, args.expr, pole=args.pole)
        if args.pole:
            from .berez import laurent_pullback

            _emit_value(args, laurent_pullback(phi, f))
        else:
            _emit_value(args, phi.pullback(f))
        return 0

    if cmd == "compose":
        phi = load_transformation(args.first)
        psi = load_transformation(args.second)
        comp = compose(psi, phi)
        lines = [
            f"{name} = {print_value(comp.pullbacks[name])}"
            for name in comp.target.coord_names()
        ]
        _emit(
            args,
            {"pullbacks": {n: print_value(comp.pullbacks[n])
                           for n in comp.target.coord_names()}},
            "\n".join(lines),
        )
        return 0

    if cmd == "jac":
        phi = load_transformation(args.transformation)
        s = print_matrix_file(phi.modified_jacobian())
        _emit(args, {"result": s}, s)
        return 0

    if cmd == "tangent":
        phi = load_transformation(args.transformation)
        m = phi.tangent_matrix_at(_parse_point(args.at))
        rows = [
            "[" + ", ".join(print_rational(e) for e in row) + "]"
            for row in m.tolist()
        ]
        _emit(args, {"result": rows}, "\n".join(rows))
        return 0

    if cmd in ("strans", "trace", "udl", "det", "ber", "qdet"):
        dom = load_domain(args.domain)
        m = load_matrix(args.matrix, dom)
        if cmd == "strans":
            s = print_matrix_file(m.supertranspose())
            _emit(args, {"result": s}, s)
        elif cmd == "trace":
            _emit_value(args, m.z2n_trace())
        elif cmd == "qdet":
            s = print_matrix_file(m.quasideterminant(args.row, args.col))
            _emit(args, {"result": s}, s)
        elif cmd == "udl":
            u, d, l = m.udl_decompose()
            parts = {
                "U": print_matrix_file(u),
                "D": print_matrix_file(d),
                "L": print_matrix_file(l),
            }
            text = "\n\n".join(f"{k}:\n{v}" for k, v in parts.items())
            _emit(args, parts, text)
        elif cmd == "det":
            _emit_value(args, m.z2n_det())
        else:
            _emit_value(args, m.z2n_ber())
        return 0

    if cmd == "dd-check":
        dom = load_domain(args.domain)
        f = parse_expression(dom, args.expr)
        conventions = (
            CONVENTIONS if args.convention == "both" else (args.convention,)
        )
        report = []
        for conv in conventions:
            alg = FormAlgebra(dom, conv)
            good = alg.inject(f).d().d().is_zero
            report.append((f"d(d f) = 0 [{conv}]", good))
        return _emit_check(args, all(g for _, g in report), report)

    if cmd == "glue-check":
        section = load_section(args.section)
        ok, report = glue_check(section)
        return _emit_check(args, ok, report)

    if cmd == "integrate":
        dom = load_domain(args.domain)
        reg = load_registry(args.registry) if args.registry else None
        f = parse_expression(dom, args.expr, pole=args.pole)
        if args.mode == "z2":
            value = integrate_z2(f, reg=reg)
        elif args.mode == "naive":
            value = integrate_z22_naive(f, reg=reg)
        else:
            value = integrate_z22_residue(f, reg=reg)
        s = print_rational(value)
        _emit(args, {"result": s}, s)
        return 0

    if cmd == "delta-check":
        degrees = [
            _parse_degree(d, None) for d in args.degrees.split(";") if d.strip()
        ]
        gamma = _parse_degree(args.gamma, None) if args.gamma else None
        cx = DeltaComplex(args.n, degrees, gamma=gamma, weight=args.weight)
        report = []
        dd = cx.delta_apply(cx.delta_apply(cx.one()))
        report.append(("delta(delta 1) = 0", dd.is_zero))
        for name, _ in cx.domain.generators:
            g = cx.generator(name)
            report.append(
                (f"delta(delta {name}) = 0",
                 cx.delta_apply(cx.delta_apply(g)).is_zero)
            )
        report.append(("delta omega = 0", cx.delta_apply(cx.omega()).is_zero))
        return _emit_check(args, all(g for _, g in report), report)

    raise DomainError(f"unknown command {cmd}")


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        return _run(args)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return 2
    except DomainError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
