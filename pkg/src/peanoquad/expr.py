"""Single-variable expressions in ``t``: parsing, printing and evaluation.

Grammar (whitespace is insignificant)::

    expr     := term (('+' | '-') term)*
    term     := factor (('*' | '/') factor)*
    factor   := '-' factor | power
    power    := atom ('^' exponent)?
    exponent := ['-'] number ['^' exponent] | '(' ['-'] number ')'
    atom     := number | 't' | 'pi' | 'e' | ident '(' expr ')' | '(' expr ')'

``^`` binds tighter than unary minus, so ``-t^2`` is ``-(t^2)``.  Exponents
are numeric constants; a chain ``t^2^3`` folds right-associatively to
``t^8``.  Functions that are not twice differentiable (abs, floor, min, max)
are rejected because the error bounds need a bounded second derivative.
"""

import math
import re
from dataclasses import dataclass

import numpy as np

from . import interval as iv
from .errors import (
    DomainError,
    EvaluationError,
    ParseError,
    PreconditionError,
    UnknownIdentifierError,
)
from .interval import Interval, Jet2

FUNCTIONS = ("sin", "cos", "exp", "log", "sqrt")
CONSTANTS = {"pi": math.pi, "e": math.e}
VARIABLE = "t"
_REJECTED = ("abs", "floor", "ceil", "min", "max", "sign", "round")


@dataclass(frozen=True)
class Const:
    value: float
    name: str = None


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Unary:
    op: str
    child: object


@dataclass(frozen=True)
class Binary:
    op: str
    left: object
    right: object


ExprAst = (Const, Var, Unary, Binary)


# -- tokenizer -----------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    pos: int


def _tokenize(src):
    tokens = []
    pos = 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, m.group(), pos))
        pos = m.end()
    tokens.append(_Token("end", "", len(src)))
    return tokens


# -- parser ----------------------------------------------------------------------


class _Parser:
    def __init__(self, src):
        self.tokens = _tokenize(src)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def at(self, text):
        tok = self.tok
        return tok.kind == "op" and tok.text == text

    def expect(self, text, what):
        if not self.at(text):
            self.fail(f"expected {what}")
        return self.advance()

    def fail(self, message):
        tok = self.tok
        if tok.kind == "end":
            raise ParseError(f"{message}, found end of input", tok.pos)
        raise ParseError(f"{message}, found {tok.text!r}", tok.pos)

    def parse(self):
        node = self.expr()
        if self.tok.kind != "end":
            self.fail("expected an operator or end of input")
        return node

    def expr(self):
        node = self.term()
        while self.at("+") or self.at("-"):
            op = self.advance().text
            node = Binary(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.at("*") or self.at("/"):
            op = self.advance().text
            node = Binary(op, node, self.factor())
        return node

    def factor(self):
        if self.at("-"):
            self.advance()
            return Unary("neg", self.factor())
        return self.power()

    def power(self):
        base = self.atom()
        if self.at("^"):
            self.advance()
            return Binary("^", base, Const(self.exponent()))
        return base

    def exponent(self):
        if self.at("("):
            self.advance()
            value = self.signed_number()
            self.expect(")", "')'")
        else:
            value = self.signed_number()
        if self.at("^"):
            pos = self.advance().pos
            try:
                value = value ** self.exponent()
            except (OverflowError, ZeroDivisionError):
                raise ParseError("exponent does not evaluate to a finite constant", pos) from None
            if isinstance(value, complex) or not math.isfinite(value):
                raise ParseError("exponent does not evaluate to a finite real constant", pos)
        return float(value)

    def signed_number(self):
        sign = 1.0
        if self.at("-"):
            self.advance()
            sign = -1.0
        if self.tok.kind != "num":
            self.fail("exponent must be a numeric constant")
        return sign * _number(self.advance())

    def atom(self):
        tok = self.tok
        if tok.kind == "num":
            self.advance()
            return Const(_number(tok))
        if tok.kind == "ident":
            self.advance()
            name = tok.text
            if name == VARIABLE:
                return Var()
            if name in CONSTANTS:
                return Const(CONSTANTS[name], name)
            if name in _REJECTED:
                raise ParseError(
                    f"{name!r} is not twice differentiable and is not supported", tok.pos
                )
            if name not in FUNCTIONS:
                raise UnknownIdentifierError(f"unknown identifier {name!r}", tok.pos)
            self.expect("(", f"'(' after function name {name!r}")
            arg = self.expr()
            self.expect(")", "')'")
            return Unary(name, arg)
        if self.at("("):
            self.advance()
            node = self.expr()
            self.expect(")", "')'")
            return node
        self.fail("expected a number, 't', a constant, a function call or '('")


def _number(tok):
    value = float(tok.text)
    if not math.isfinite(value):
        raise ParseError(f"numeric literal {tok.text!r} is not finite", tok.pos)
    return value


def parse(src):
    """Parse ``src`` into an expression tree.

    Raises :class:`ParseError` (with ``offset``) on malformed input.
    """
    if not src or not src.strip():
        raise ParseError("empty expression", 0)
    return _Parser(src).parse()


def as_expr(obj):
    """Accept either source text or an already parsed tree."""
    if isinstance(obj, str):
        return parse(obj)
    if isinstance(obj, ExprAst):
        return obj
    raise TypeError(f"expected an expression string or tree, got {type(obj).__name__}")


# -- printing ----------------------------------------------------------------------


def _fmt_const(node):
    if node.name is not None:
        return node.name
    v = node.value
    if v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def to_sexpr(node):
    """Canonical s-expression, e.g. ``(+ (^ t 2) 1)``."""
    if isinstance(node, Const):
        return _fmt_const(node)
    if isinstance(node, Var):
        return VARIABLE
    if isinstance(node, Unary):
        return f"({node.op} {to_sexpr(node.child)})"
    return f"({node.op} {to_sexpr(node.left)} {to_sexpr(node.right)})"


def to_infix(node):
    """Fully parenthesized infix text that parses back to ``node``."""
    if isinstance(node, Const):
        return _fmt_const(node)
    if isinstance(node, Var):
        return VARIABLE
    if isinstance(node, Unary):
        if node.op == "neg":
            return f"(-{to_infix(node.child)})"
        return f"{node.op}({to_infix(node.child)})"
    if node.op == "^":
        exponent = _fmt_const(node.right)
        if node.right.value < 0:
            exponent = f"({exponent})"
        return f"({to_infix(node.left)} ^ {exponent})"
    return f"({to_infix(node.left)} {node.op} {to_infix(node.right)})"


# -- real evaluation -------------------------------------------------------------

_REAL_FUNCS = {
    "sin": math.sin,
    "cos": math.cos,
    "exp": math.exp,
    "log": math.log,
    "sqrt": math.sqrt,
    "neg": lambda x: -x,
}


def _is_integer(v):
    return float(v).is_integer() and abs(v) < 2**53


def _real(node, t):
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Var):
        return t
    if isinstance(node, Unary):
        return _REAL_FUNCS[node.op](_real(node.child, t))
    x = _real(node.left, t)
    op = node.op
    if op == "^":
        k = node.right.value
        if _is_integer(k):
            return x ** int(k)
        if x < 0:
            raise ValueError("non-integer power of a negative number")
        return math.pow(x, k)
    y = _real(node.right, t)
    if op == "+":
        return x + y
    if op == "-":
        return x - y
    if op == "*":
        return x * y
    return x / y


def eval_real(ast, t):
    """Evaluate ``ast`` at the real point ``t`` in double precision."""
    try:
        value = _real(ast, float(t))
    except (ValueError, ZeroDivisionError, OverflowError) as exc:
        raise EvaluationError(f"cannot evaluate {to_infix(ast)} at t={t!r}: {exc}") from None
    if not math.isfinite(value):
        raise EvaluationError(f"non-finite value of {to_infix(ast)} at t={t!r}")
    return value


def compile_real(ast):
    """Return ``f(t) -> float`` for ``ast`` (raises :class:`EvaluationError`)."""
    return lambda t: eval_real(ast, t)


def _derivs(node, t):
    # forward-mode (f, f', f'') in floating point; t may be an ndarray
    if isinstance(node, Const):
        z = np.zeros_like(t)
        return z + node.value, z, z
    if isinstance(node, Var):
        z = np.zeros_like(t)
        return t, z + 1.0, z
    if isinstance(node, Unary):
        u, u1, u2 = _derivs(node.child, t)
        op = node.op
        if op == "neg":
            return -u, -u1, -u2
        if op == "sin":
            g, g1, g2 = np.sin(u), np.cos(u), -np.sin(u)
        elif op == "cos":
            g, g1, g2 = np.cos(u), -np.sin(u), -np.cos(u)
        elif op == "exp":
            g = g1 = g2 = np.exp(u)
        elif op == "log":
            if np.any(u <= 0):
                raise ValueError("log of a non-positive number")
            g, g1, g2 = np.log(u), 1.0 / u, -1.0 / u**2
        else:
            if np.any(u <= 0):
                raise ValueError("sqrt derivative at a non-positive number")
            g = np.sqrt(u)
            g1, g2 = 0.5 / g, -0.25 / (u * g)
        return g, g1 * u1, g2 * u1**2 + g1 * u2
    if node.op == "^":
        u, u1, u2 = _derivs(node.left, t)
        k = node.right.value
        if _is_integer(k):
            k = int(k)
            if k == 0:
                return np.ones_like(u), np.zeros_like(u), np.zeros_like(u)
            if k < 0 and np.any(u == 0):
                raise ZeroDivisionError("negative power of zero")
            g = u**k if k >= 0 else 1.0 / u ** (-k)
            g1 = k * u ** (k - 1) if k >= 1 else k * g / u
            if k >= 2:
                g2 = k * (k - 1) * u ** (k - 2)
            elif k == 1:
                g2 = np.zeros_like(u)
            else:
                g2 = k * (k - 1) * g / u**2
        else:
            if np.any(u <= 0):
                raise ValueError("non-integer power of a non-positive number")
            g = u**k
            g1, g2 = k * g / u, k * (k - 1) * g / u**2
        return g, g1 * u1, g2 * u1**2 + g1 * u2
    u, u1, u2 = _derivs(node.left, t)
    v, v1, v2 = _derivs(node.right, t)
    op = node.op
    if op == "+":
        return u + v, u1 + v1, u2 + v2
    if op == "-":
        return u - v, u1 - v1, u2 - v2
    if op == "*":
        return u * v, u1 * v + u * v1, u2 * v + 2 * u1 * v1 + u * v2
    if np.any(v == 0):
        raise ZeroDivisionError("division by zero")
    q = u / v
    q1 = (u1 - q * v1) / v
    q2 = (u2 - 2 * q1 * v1 - q * v2) / v
    return q, q1, q2


def eval_derivs(ast, t):
    """Point values ``(f, f', f'')`` by forward differentiation.

    ``t`` may be a float or a numpy array; results have the same shape.
    """
    t = np.asarray(t, dtype=float)
    try:
        with np.errstate(over="raise", invalid="raise", divide="raise"):
            return _derivs(ast, t)
    except (ValueError, ZeroDivisionError, FloatingPointError) as exc:
        raise EvaluationError(f"cannot differentiate {to_infix(ast)}: {exc}") from None


# -- interval and jet evaluation ------------------------------------------------


def _const_interval(node):
    v = node.value
    if node.name is None and _is_integer(v):
        return Interval(v)
    # decimal literals and named constants are not binary floats
    return iv.inflate(v, v)


def _interval(node, x):
    if isinstance(node, Const):
        return _const_interval(node)
    if isinstance(node, Var):
        return x
    if isinstance(node, Unary):
        return iv.elem(node.op, _interval(node.child, x))
    u = _interval(node.left, x)
    op = node.op
    if op == "^":
        k = node.right.value
        if _is_integer(k):
            return iv.pow_int(u, int(k))
        return iv.exp(_const_interval(node.right) * iv.log(u))
    v = _interval(node.right, x)
    if op == "+":
        return u + v
    if op == "-":
        return u - v
    if op == "*":
        return u * v
    return u / v


def _attach(exc, node):
    if exc.node is None:
        exc.node = node
        exc.args = (f"{exc.args[0]} (in subexpression {to_infix(node)})",)
    return exc


def eval_interval(ast, x):
    """Enclosure of the range of ``ast`` over the interval ``x``."""
    return _interval(ast, x)


def _jet(node, x):
    try:
        if isinstance(node, Const):
            return Jet2.constant(_const_interval(node))
        if isinstance(node, Var):
            return Jet2.variable(x)
        if isinstance(node, Unary):
            return iv.jet_elem(node.op, _jet(node.child, x))
        u = _jet(node.left, x)
        op = node.op
        if op == "^":
            k = node.right.value
            if _is_integer(k):
                return iv.jet_pow_int(u, int(k))
            return iv.jet_exp(_const_interval(node.right) * iv.jet_log(u))
        v = _jet(node.right, x)
        if op == "+":
            return u + v
        if op == "-":
            return u - v
        if op == "*":
            return u * v
        return u / v
    except DomainError as exc:
        raise _attach(exc, node) from None


def eval_jet(ast, x):
    """Jet enclosure of ``(f, f', f'')`` over the interval ``x``.

    A :class:`DomainError` names the innermost subexpression that failed.
    """
    return _jet(ast, x)


def jet_enclosure(ast, x, refine_depth=0):
    """Hull of the jets of ``ast`` over ``2**refine_depth`` equal pieces of ``x``."""
    if refine_depth < 0:
        raise PreconditionError(f"refine_depth must be >= 0, got {refine_depth}")
    if refine_depth == 0:
        return _jet(ast, x)
    jets = [_jet(ast, piece) for piece in x.split(2**refine_depth)]
    return Jet2(
        iv.hull(j.val for j in jets),
        iv.hull(j.d1 for j in jets),
        iv.hull(j.d2 for j in jets),
    )


def second_derivative_enclosure(ast, x, refine_depth=6):
    """Interval ``[gamma, Gamma]`` containing f'' over ``x``.

    With ``refine_depth = d`` the interval is cut into ``2**d`` equal pieces,
    a jet is evaluated on each and the hull of the ``d2`` parts is returned.
    """
    return jet_enclosure(as_expr(ast), x, refine_depth).d2
