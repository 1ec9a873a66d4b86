"""Command-line entry point: ``cubalg <command> ...``."""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings
from fractions import Fraction
from typing import Sequence

from . import __version__
from .cubature import (
    DesignFraction,
    cubature_degree,
    cubature_value,
    exact_expectation,
    fraction_error,
    fraction_weights,
    s_orthogonality,
)
from .errors import CubalgError, InputError, NumericError
from .hermite import aliasing_nf, aliasing_symbolic, weighing_polynomial
from .ortho import SYSTEMS, UniPoly, gauss_rule, get_system
from .polyspace import MonoPoly, OrthoPoly, TermOrder, format_coeff, poly_from_json
from .vanishing import Design, bm_ortho, parse_coordinate, weights

EXIT_INPUT = 2
EXIT_NUMERIC = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def _format_float(x: float) -> str:
    if not math.isfinite(x):
        raise NumericError(f"non-finite result {x!r}")
    if x == 0:
        return "0.0"
    return format(x, ".17g")


def to_json(obj, indent: int = 2, level: int = 0) -> str:
    """JSON text with 17-digit floats and rationals as ``"p/q"`` strings."""
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, Fraction):
        return json.dumps(str(obj.numerator) if obj.denominator == 1 else f"{obj.numerator}/{obj.denominator}")
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        if all(isinstance(v, (int, float, Fraction, str)) or (
                isinstance(v, (list, tuple)) and all(isinstance(u, (int, float, Fraction, str)) for u in v))
               for v in obj.values()) and len(obj) <= 3:
            return "{" + ", ".join(f"{json.dumps(str(k))}: {to_json(v)}" for k, v in obj.items()) + "}"
        items = [f"{pad}{json.dumps(str(k))}: {to_json(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, Fraction, str)) for v in obj):
            return "[" + ", ".join(to_json(v) for v in obj) + "]"
        items = [pad + to_json(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if hasattr(obj, "tolist"):
        return to_json(obj.tolist(), indent, level)
    if hasattr(obj, "__float__"):
        return _format_float(float(obj))
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _num_text(c) -> str:
    return _format_float(c) if isinstance(c, float) else format_coeff(c)


def _load_json(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc.msg} at line {exc.lineno}") from None


def _tolerances(args) -> dict:
    tol_abs, tol_rel = 1e-8, 1e-10
    env = os.environ.get("CUBALG_TOL")
    if env:
        parts = env.split(",")
        try:
            tol_abs = float(parts[0])
            if len(parts) > 1:
                tol_rel = float(parts[1])
        except ValueError:
            raise InputError(f"CUBALG_TOL must be 'abs' or 'abs,rel', got {env!r}") from None
    if args.tol_abs is not None:
        tol_abs = args.tol_abs
    if args.tol_rel is not None:
        tol_rel = args.tol_rel
    if not (tol_abs > 0 and tol_rel > 0):
        raise InputError("tolerances must be positive")
    return {"tol_abs": tol_abs, "tol_rel": tol_rel}


def _order(args) -> TermOrder:
    return TermOrder(args.order)


def _pos_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise InputError(f"expected a positive integer, got {text!r}") from None
    if v < 1:
        raise InputError(f"expected a positive integer, got {text!r}")
    return v


def _cmd_rule(args):
    rule = gauss_rule(get_system(args.system), _pos_int(args.n))
    nodes = [float(x) for x in rule.nodes]
    w = [float(x) for x in rule.weights]
    data = {"system": args.system, "n": len(nodes), "degree": rule.degree, "nodes": nodes, "weights": w}
    text = [f"nodes   {' '.join(_format_float(x) for x in nodes)}",
            f"weights {' '.join(_format_float(x) for x in w)}",
            f"degree  {rule.degree}"]
    return data, text


def _cmd_gbasis(args):
    design = Design.from_json(_load_json(args.design))
    G, L = bm_ortho(design, _order(args), **_tolerances(args))
    data = G.snapped().to_json()
    text = [f"L = {[tuple(a) for a in L]}"] + [f"g{i + 1} = {s}" for i, s in enumerate(G.render())]
    text += [f"warning: {w}" for w in G.warnings]
    return data, text


def _cmd_weights(args):
    design = Design.from_json(_load_json(args.design))
    G, L = bm_ortho(design, _order(args), **_tolerances(args))
    w = weights(design, _order(args), L)
    data = {"points": [list(p) for p in design.points], "weights": w}
    text = [f"{_point_text(p)}  {_num_text(x)}" for p, x in zip(design.points, w)]
    return data, text


def _point_text(p) -> str:
    return "(" + ", ".join(_num_text(c) for c in p) + ")"


def _poly(data, systems=None):
    p = poly_from_json(data)
    names = data.get("systems") if isinstance(data, dict) else None
    if isinstance(p, MonoPoly):
        if names:
            systems = [get_system(n) for n in names]
        elif systems is None:
            systems = [get_system("hermite")] * (p.dim or 1)
    return p, systems


def _cmd_expect(args):
    design = Design.from_json(_load_json(args.design))
    p, systems = _poly(_load_json(args.poly), design.systems)
    if isinstance(p, OrthoPoly):
        systems = p.systems
    if p.dim is not None and p.dim != design.dim:
        raise InputError(f"polynomial has {p.dim} variables, design has {design.dim}")
    order = _order(args)
    G, L = bm_ortho(design, order, **_tolerances(args))
    w = weights(design, order, L)
    value = cubature_value(p, design, w)
    exact = exact_expectation(p, systems) if not p.is_zero() else 0
    degree = cubature_degree(G) if order.degree_compatible else None
    data = {"value": value, "exact": exact, "degree": degree, "errorTerms": [exact - value]}
    text = [f"value  {_num_text(value)}", f"exact  {_num_text(exact)}",
            f"error  {_num_text(exact - value)}", f"degree {degree}"]
    return data, text


def _cmd_exact(args):
    p, systems = _poly(_load_json(args.poly))
    value = exact_expectation(p, systems) if not p.is_zero() else 0
    return {"value": value}, [_num_text(value)]


def _cmd_degree(args):
    design = Design.from_json(_load_json(args.design))
    G, L = bm_ortho(design, _order(args), **_tolerances(args))
    s = [s_orthogonality(g) for g in G.polys()]
    deg = cubature_degree(G)
    data = {"degree": deg, "sValues": s, "leading": [list(a) for a in G.leading_exponents]}
    text = [f"degree {deg}"] + [f"s = {v}  for  {r}" for v, r in zip(s, G.render())]
    return data, text


def _cmd_weighing(args):
    lam = weighing_polynomial(_pos_int(args.n), method=args.method)
    data = {"n": int(args.n), "coefficients": {f"H{j}": c for j, c in lam.coeffs.items()}}
    return data, [f"lambda = {lam}"]


def _cmd_alias(args):
    k = int(args.k)
    if k < 0:
        raise InputError("k must be non-negative")
    if args.n == "n":
        row = aliasing_symbolic(k)
        data = {"k": k, "coefficients": {f"H(n-{j})": str(v) for j, v in row.items()}}
        body = " ".join(f"+ ({v}) H_(n-{j})" for j, v in row.items()) or "0"
        return data, [f"H_(n+{k}) = {body[2:] if body.startswith('+ ') else body}"]
    n = _pos_int(args.n)
    nf = aliasing_nf(k, n)
    data = {"n": n, "k": k, "coefficients": {f"H{j}": c for j, c in nf.coeffs.items()}}
    return data, [f"H{n + k} = {nf}"]


def _cmd_fraction(args):
    raw = _load_json(args.subset)
    system = "hermite"
    if isinstance(raw, dict):
        system = raw.get("system", system)
        raw = raw.get("points")
    if not isinstance(raw, list):
        raise InputError("subset must be a list of nodes or {\"points\": [...]}")
    pts = []
    for x in raw:
        if isinstance(x, list):
            if len(x) != 1:
                raise InputError("fractions are univariate")
            x = x[0]
        pts.append(float(parse_coordinate(x)))
    fr = DesignFraction(_pos_int(args.parent_n), pts, get_system(system))
    w = fraction_weights(fr)
    data = {"nodes": list(fr.subset), "weights": w}
    text = [f"{_format_float(z)}  {_format_float(x)}" for z, x in zip(fr.subset, w)]
    if args.error is not None:
        coeffs = [float(parse_coordinate(c)) for c in args.error.split(",")]
        err = fraction_error(fr, UniPoly(tuple(coeffs)))
        data["error"] = err
        text.append(f"error {_num_text(err)}")
    return data, text


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--tol-abs", type=float, default=None, help="absolute residual threshold")
    common.add_argument("--tol-rel", type=float, default=None, help="relative residual threshold")
    order = argparse.ArgumentParser(add_help=False)
    order.add_argument("--order", default="deglex", choices=TermOrder.KINDS)

    p = _Parser(prog="cubalg", description="Interpolatory cubature over orthogonal polynomial bases.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("rule", parents=[common], help="Gaussian rule with n nodes")
    s.add_argument("system", choices=sorted(SYSTEMS))
    s.add_argument("n")
    s.set_defaults(func=_cmd_rule)

    s = sub.add_parser("gbasis", parents=[common, order], help="vanishing-ideal basis of a design")
    s.add_argument("design")
    s.set_defaults(func=_cmd_gbasis)

    s = sub.add_parser("weights", parents=[common, order], help="cubature weights of a design")
    s.add_argument("design")
    s.set_defaults(func=_cmd_weights)

    s = sub.add_parser("expect", parents=[common, order], help="cubature and exact expectation of a polynomial")
    s.add_argument("design")
    s.add_argument("poly")
    s.set_defaults(func=_cmd_expect)

    s = sub.add_parser("exact", parents=[common], help="exact expectation of a polynomial")
    s.add_argument("poly")
    s.set_defaults(func=_cmd_exact)

    s = sub.add_parser("degree", parents=[common, order], help="degree of exactness of a design")
    s.add_argument("design")
    s.set_defaults(func=_cmd_degree)

    s = sub.add_parser("weighing", parents=[common], help="Hermite weighing polynomial")
    s.add_argument("n")
    s.add_argument("--method", choices=("exact", "numeric"), default="exact")
    s.set_defaults(func=_cmd_weighing)

    s = sub.add_parser("alias", parents=[common], help="normal form of H_{n+k} on the zeros of H_n")
    s.add_argument("n", help="design size, or the letter n for the symbolic row")
    s.add_argument("k")
    s.set_defaults(func=_cmd_alias)

    s = sub.add_parser("fraction", parents=[common], help="weights of a subset of Gaussian nodes")
    s.add_argument("parent_n")
    s.add_argument("subset")
    s.add_argument("--error", metavar="C0,C1,...", default=None,
                   help="also report the error for this polynomial (monomial coefficients)")
    s.set_defaults(func=_cmd_fraction)
    return p


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        with warnings.catch_warnings():
            # conditioning warnings are reported in the output itself
            warnings.simplefilter("ignore")
            data, text = args.func(args)
        body = to_json(data) if args.format == "json" else "\n".join(text)
    except InputError as exc:
        err.write(f"cubalg: error: {_one_line(exc)}\n")
        return EXIT_INPUT
    except (NumericError, ArithmeticError, ValueError) as exc:
        kind = EXIT_NUMERIC if isinstance(exc, ArithmeticError) else EXIT_INPUT
        err.write(f"cubalg: error: {_one_line(exc)}\n")
        return kind
    except CubalgError as exc:
        err.write(f"cubalg: error: {_one_line(exc)}\n")
        return EXIT_INPUT
    out.write(body + "\n")
    return 0


def _one_line(exc: BaseException) -> str:
    return " ".join(str(exc).split()) or type(exc).__name__


def main() -> None:
    sys.exit(run())
