"""Command-line interface.

Subcommands: ``integrate``, ``bounds``, ``verify-kernels`` and ``parse``.
Exit codes are 0 on success, 1 on usage or parse errors and 2 when a
certificate, tolerance or panel budget fails.
"""

import argparse
import csv
import io
import json
import math
import sys
import time
from fractions import Fraction

from . import __version__
from .adaptive import DEFAULT_MAX_PANELS, integrate_adaptive, integrate_uniform
from .errors import (
    BudgetExhausted,
    CertificationError,
    DomainError,
    EvaluationError,
    ParseError,
    PreconditionError,
)
from .expr import parse, second_derivative_enclosure, to_sexpr
from .interval import Interval
from .kernels import (
    ABS_INTEGRAL_CONSTANTS,
    COMBINATIONS,
    KernelId,
    kernel_abs_integral,
    kernel_abs_integral_oracle,
    kernel_eval,
    kernel_mean,
    kernel_zeros,
)
from .rules import RuleId, apply_rule, certify_panel, compare_bounds

SCHEMA_VERSION = "1"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILED = 2

REFERENCE_EPS = 1e-10
REFERENCE_MAX_PANELS = 20_000


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- output ----------------------------------------------------------------------


def _fmt_float(x):
    if not math.isfinite(x):
        return "null"
    return f"{x:.17g}"


def _to_json(obj, indent=0):
    pad = "  " * (indent + 1)
    end = "  " * indent
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_to_json(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}{_to_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}{k}.")
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}{i}.")
    else:
        yield prefix[:-1], obj


def _scalar_text(v, digits):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.{digits}g}"
    return str(v)


def render(record, fmt):
    if fmt == "json":
        return _to_json(record) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["key", "value"])
        for key, value in _flatten(record):
            writer.writerow([key, _scalar_text(value, 17)])
        return buf.getvalue()
    lines = [f"{record['command']}: {record['status']}"]
    for key, value in _flatten({k: v for k, v in record.items() if k not in ("command", "status")}):
        lines.append(f"  {key} = {_scalar_text(value, 12)}")
    return "\n".join(lines) + "\n"


def _record(command, inputs):
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "status": "ok",
        "inputs": inputs,
        "results": None,
        "error": None,
        "timing_ms": 0.0,
    }


def _result_payload(result, emit_panels):
    panels = result.panels
    widths = [p.width for p in panels]
    payload = {
        "rule": result.rule.value,
        "estimate": result.estimate,
        "bound": result.bound,
        "truncation": result.truncation,
        "rounding": result.rounding,
        "gamma": result.gamma,
        "Gamma": result.Gamma,
        "evals": result.evals,
        "panels": {
            "count": len(panels),
            "min_width": min(widths),
            "max_width": max(widths),
            "max_bound": max(p.bound for p in panels),
        },
    }
    if emit_panels:
        payload["panel_list"] = [
            {"a": p.a, "b": p.b, "gamma": p.gamma, "Gamma": p.Gamma, "bound": p.bound}
            for p in panels
        ]
    return payload


def _fail(record, status, exc):
    record["status"] = status
    record["error"] = str(exc)
    print(f"error: {exc}", file=sys.stderr)


# -- commands ----------------------------------------------------------------------


def _check_ab(a, b):
    if not (math.isfinite(a) and math.isfinite(b)) or not a < b:
        raise UsageError(f"need finite a < b, got a={a!r}, b={b!r}")


def cmd_integrate(args):
    inputs = {
        "expr": args.expr,
        "a": args.a,
        "b": args.b,
        "rule": args.rule,
        "eps": args.eps,
        "mode": args.mode,
        "max_panels": args.max_panels,
        "refine_depth": args.refine_depth,
    }
    record = _record("integrate", inputs)
    try:
        _check_ab(args.a, args.b)
        if not args.eps > 0:
            raise UsageError(f"--eps must be > 0, got {args.eps}")
        ast = parse(args.expr)
        rule = RuleId.parse(args.rule)
        if args.mode == "single":
            depth = 6 if args.refine_depth is None else args.refine_depth
            result = certify_panel(ast, rule, args.a, args.b, depth)
        elif args.mode == "uniform":
            kw = {} if args.refine_depth is None else {"refine_depth": args.refine_depth}
            result = integrate_uniform(
                ast, rule, args.a, args.b, args.eps, max_panels=args.max_panels, **kw
            )
        else:
            kw = {} if args.refine_depth is None else {"refine_depth": args.refine_depth}
            result = integrate_adaptive(ast, rule, args.a, args.b, args.eps, args.max_panels, **kw)
        record["results"] = _result_payload(result, args.emit_panels)
        if result.bound > args.eps:
            record["status"] = "tolerance_not_met"
            record["error"] = f"certified bound {result.bound:.3g} exceeds eps={args.eps:g}"
            return record, EXIT_FAILED
        return record, EXIT_OK
    except (ParseError, UsageError, PreconditionError) as exc:
        _fail(record, "usage_error" if not isinstance(exc, ParseError) else "parse_error", exc)
        return record, EXIT_USAGE
    except BudgetExhausted as exc:
        _fail(record, "budget_exhausted", exc)
        if exc.result is not None:
            record["results"] = _result_payload(exc.result, args.emit_panels)
        return record, EXIT_FAILED
    except (CertificationError, DomainError, EvaluationError) as exc:
        _fail(record, "certification_failed", exc)
        return record, EXIT_FAILED


def _reference(ast, a, b):
    try:
        ref = integrate_adaptive(ast, RuleId.BOOLE, a, b, REFERENCE_EPS, REFERENCE_MAX_PANELS)
    except (BudgetExhausted, CertificationError):
        return None
    return ref


def cmd_bounds(args):
    inputs = {
        "expr": args.expr,
        "a": args.a,
        "b": args.b,
        "rule": args.rule,
        "gamma": args.gamma,
        "Gamma": args.Gamma,
        "refine_depth": args.refine_depth,
    }
    record = _record("bounds", inputs)
    try:
        _check_ab(args.a, args.b)
        if (args.gamma is None) != (args.Gamma is None):
            raise UsageError("--gamma and --Gamma must be given together")
        ast = parse(args.expr)
        rule = RuleId.parse(args.rule)
        if args.gamma is None:
            enc = second_derivative_enclosure(ast, Interval(args.a, args.b), args.refine_depth)
            gamma, Gamma, source = enc.lo, enc.hi, "enclosure"
        else:
            gamma, Gamma, source = args.gamma, args.Gamma, "override"
        cmp = compare_bounds(rule, gamma, Gamma, args.a, args.b)
        estimate = apply_rule(rule, ast, args.a, args.b)
    except (ParseError, UsageError, PreconditionError) as exc:
        _fail(record, "usage_error" if not isinstance(exc, ParseError) else "parse_error", exc)
        return record, EXIT_USAGE
    except (DomainError, EvaluationError) as exc:
        _fail(record, "certification_failed", exc)
        return record, EXIT_FAILED

    ref = _reference(ast, args.a, args.b)
    record["results"] = {
        "rule": rule.value,
        "gamma_source": source,
        "gamma": cmp.gamma,
        "Gamma": cmp.Gamma,
        "sup_norm": cmp.sup_norm,
        "peano_like": cmp.peano_like,
        "peano": cmp.peano_classic,
        "ratio": cmp.ratio,
        "estimate": estimate,
        "reference": None if ref is None else ref.estimate,
        "reference_bound": None if ref is None else ref.bound,
        "true_error": None if ref is None else abs(estimate - ref.estimate),
    }
    return record, EXIT_OK


def _zero_kind(k, z, a, b):
    d = 1e-3 * (b - a)
    left = kernel_eval(k, z - d, a, b)
    right = kernel_eval(k, z + d, a, b)
    return "crossing" if left * right < 0 else "touching"


def cmd_verify_kernels(args):
    a, b, n = args.a, args.b, args.oracle_n
    inputs = {"a": a, "b": b, "oracle_n": n}
    record = _record("verify-kernels", inputs)
    try:
        _check_ab(a, b)
        if n < 1000:
            raise UsageError(f"--oracle-n must be >= 1000, got {n}")
    except UsageError as exc:
        _fail(record, "usage_error", exc)
        return record, EXIT_USAGE

    h = b - a
    h4 = float(Fraction(h) ** 4)
    results, failures = {}, []
    for k in KernelId:
        scale = sum(w for w, _ in COMBINATIONS[k])
        closed = kernel_abs_integral(k, a, b)
        oracle = kernel_abs_integral_oracle(k, a, b, n)
        expected = float(ABS_INTEGRAL_CONSTANTS[k] * Fraction(h) ** 4)
        zeros = kernel_zeros(k, a, b)
        zero_residual = max(abs(kernel_eval(k, z, a, b)) for z in zeros)
        mean = kernel_mean(k, a, b)
        checks = {
            "closed_vs_expected": abs(closed - expected) <= 1e-12 * expected,
            "oracle_vs_closed": abs(oracle - closed) <= 1e-5 * h4,
            "mean_zero": abs(mean) <= 1e-12 * h**3 * scale,
            "zeros": zero_residual <= 1e-10 * h**3 * scale,
        }
        results[k.value] = {
            "closed_form": closed,
            "oracle": oracle,
            "expected": expected,
            "expected_constant": str(ABS_INTEGRAL_CONSTANTS[k]),
            "relative_error": abs(closed - expected) / expected,
            "oracle_error": abs(oracle - closed),
            "mean": mean,
            "zeros": zeros,
            "zero_residual": zero_residual,
            "interior_zero_kinds": [_zero_kind(k, z, a, b) for z in zeros[1:-1]],
            "checks": checks,
        }
        failures += [f"{k.value}:{name}" for name, ok in checks.items() if not ok]
    record["results"] = results
    if failures:
        record["status"] = "tolerance_failed"
        record["error"] = "failed checks: " + ", ".join(failures)
        print(f"error: {record['error']}", file=sys.stderr)
        return record, EXIT_FAILED
    return record, EXIT_OK


def cmd_parse(args):
    try:
        ast = parse(args.expr)
    except ParseError as exc:
        print(f"error: syntax error: {exc}", file=sys.stderr)
        return None, EXIT_USAGE
    print(to_sexpr(ast))
    return None, EXIT_OK


# -- argument parsing ---------------------------------------------------------------


def _rule_name(text):
    try:
        return RuleId.parse(text).value
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"unknown rule {text!r} (choose simpson, simpson38, boole)"
        ) from None


def build_parser():
    parser = _Parser(
        prog="peanoquad",
        description="Newton-Cotes quadrature with certified Peano-like error bounds.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--expr", required=True, help="integrand in the variable t")
        p.add_argument("--a", type=float, required=True)
        p.add_argument("--b", type=float, required=True)
        p.add_argument("--rule", type=_rule_name, default="simpson")
        p.add_argument("--format", choices=("json", "csv", "text"), default="json")

    p = sub.add_parser("integrate", help="certified integral of an expression")
    common(p)
    p.add_argument("--eps", type=float, default=1e-8)
    p.add_argument("--mode", choices=("adaptive", "uniform", "single"), default="adaptive")
    p.add_argument("--max-panels", type=int, default=DEFAULT_MAX_PANELS)
    p.add_argument("--refine-depth", type=int, default=None)
    p.add_argument("--emit-panels", action="store_true", help="include every panel in the output")
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("bounds", help="compare Peano-like and classical Peano bounds")
    common(p)
    p.add_argument("--gamma", type=float, default=None, help="lower bound of f''")
    p.add_argument("--Gamma", type=float, default=None, help="upper bound of f''")
    p.add_argument("--refine-depth", type=int, default=6)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("verify-kernels", help="check the kernel constants and zeros")
    p.add_argument("--a", type=float, default=0.0)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--oracle-n", type=int, default=1_000_000)
    p.add_argument("--format", choices=("json", "csv", "text"), default="json")
    p.set_defaults(func=cmd_verify_kernels)

    p = sub.add_parser("parse", help="print the parsed expression as an s-expression")
    p.add_argument("--expr", required=True)
    p.set_defaults(func=cmd_parse)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    record, code = args.func(args)
    if record is not None:
        record["timing_ms"] = (time.perf_counter() - start) * 1e3
        sys.stdout.write(render(record, args.format))
    return code


if __name__ == "__main__":
    sys.exit(main())
