"""Expression trees for metric components: tokenizer, Pratt parser, printer, evaluators.

Grammar (standard precedence)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?        # right-associative
    atom   := NUMBER | NAME | NAME '(' expr ')' | '(' expr ')'

``-x^2`` parses as ``-(x^2)`` and ``-x*y`` as ``(-x)*y``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence, Union

import numpy as np

from .errors import MetricSourceError, NumericalError
from .jets import Jet2

FUNCTIONS = ("sin", "cos", "tan", "sinh", "cosh", "tanh", "exp", "log", "sqrt")
CONSTANTS = {"pi": math.pi}


class ExprSyntaxError(MetricSourceError):
    """Malformed expression text; carries a 1-based line and column."""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(message, line, column)


class EvalDomainError(NumericalError):
    """Evaluation left the domain of an operation (log of x <= 0, division by zero, ...)."""

    def __init__(self, message: str, subexpr: "Expr"):
        super().__init__(f"{message} in '{to_text(subexpr)}'")
        self.subexpr = subexpr


# --- AST -------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = Union[Num, Var, Const, Neg, BinOp, Call]


def num(value: float) -> Expr:
    """Literal constructor; negative values become ``Neg(Num(..))`` so printing round-trips."""
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"non-finite literal {value!r}")
    if value < 0 or (value == 0 and math.copysign(1.0, value) < 0):
        return Neg(Num(-value))
    return Num(value)


def add(a: Expr, b: Expr) -> Expr:
    return BinOp("+", a, b)


def sub(a: Expr, b: Expr) -> Expr:
    return BinOp("-", a, b)


def mul(a: Expr, b: Expr) -> Expr:
    return BinOp("*", a, b)


def div(a: Expr, b: Expr) -> Expr:
    return BinOp("/", a, b)


def power(a: Expr, b: Expr | float) -> Expr:
    if not isinstance(b, (Num, Var, Const, Neg, BinOp, Call)):
        b = num(b)
    return BinOp("^", a, b)


def call(func: str, arg: Expr) -> Expr:
    if func not in FUNCTIONS:
        raise ValueError(f"unknown function {func!r}")
    return Call(func, arg)


def variables(e: Expr) -> set[str]:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Neg):
        return variables(e.operand)
    if isinstance(e, BinOp):
        return variables(e.left) | variables(e.right)
    if isinstance(e, Call):
        return variables(e.arg)
    return set()


def substitute(e: Expr, mapping: Mapping[str, Expr]) -> Expr:
    """Replace variables by expressions (used for chart changes)."""
    if isinstance(e, Var):
        return mapping.get(e.name, e)
    if isinstance(e, Neg):
        return Neg(substitute(e.operand, mapping))
    if isinstance(e, BinOp):
        return BinOp(e.op, substitute(e.left, mapping), substitute(e.right, mapping))
    if isinstance(e, Call):
        return Call(e.func, substitute(e.arg, mapping))
    return e


def is_zero(e: Expr) -> bool:
    return isinstance(e, Num) and e.value == 0.0


# --- tokenizer -------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),]))"
)


@dataclass(frozen=True)
class _Token:
    kind: str  # 'num' | 'name' | 'op' | 'end'
    text: str
    col: int


def _tokenize(text: str, line: int, col0: int) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            stripped = len(text[pos:]) - len(text[pos:].lstrip())
            raise ExprSyntaxError(
                f"unexpected character {text[pos + stripped]!r}", line, col0 + pos + stripped
            )
        kind = m.lastgroup
        tokens.append(_Token(kind, m.group(kind), col0 + m.start(kind)))
        pos = m.end()
    tokens.append(_Token("end", "", col0 + len(text)))
    return tokens


# --- Pratt parser ----------------------------------------------------------

_BINARY_BP = {"+": 10, "-": 10, "*": 20, "/": 20, "^": 40}
_UNARY_BP = 30


class _Parser:
    def __init__(self, text: str, names: Sequence[str] | None, line: int, col0: int):
        self.tokens = _tokenize(text, line, col0)
        self.i = 0
        self.names = None if names is None else set(names)
        self.line = line

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message: str, tok: _Token):
        raise ExprSyntaxError(message, self.line, tok.col)

    def parse(self) -> Expr:
        e = self.expression(0)
        tok = self.peek()
        if tok.kind != "end":
            self.fail(f"unexpected {tok.text!r}", tok)
        return e

    def expression(self, rbp: int) -> Expr:
        left = self.nud(self.advance())
        while True:
            tok = self.peek()
            if tok.kind != "op" or tok.text not in _BINARY_BP:
                return left
            lbp = _BINARY_BP[tok.text]
            if lbp <= rbp:
                return left
            self.advance()
            if tok.text == "^":
                right = self.expression(_UNARY_BP - 1)
            else:
                right = self.expression(lbp)
            left = BinOp(tok.text, left, right)

    def nud(self, tok: _Token) -> Expr:
        if tok.kind == "num":
            return Num(float(tok.text))
        if tok.kind == "name":
            if self.peek().kind == "op" and self.peek().text == "(":
                if tok.text not in FUNCTIONS:
                    self.fail(f"unknown function {tok.text!r}", tok)
                self.advance()
                arg = self.expression(0)
                self.expect(")")
                return Call(tok.text, arg)
            if tok.text in FUNCTIONS:
                self.fail(f"function {tok.text!r} needs an argument", tok)
            if tok.text in CONSTANTS:
                return Const(tok.text)
            if self.names is not None and tok.text not in self.names:
                self.fail(f"unknown identifier {tok.text!r}", tok)
            return Var(tok.text)
        if tok.kind == "op" and tok.text == "-":
            # binds tighter than * and /, looser than ^
            return Neg(self.expression(_UNARY_BP))
        if tok.kind == "op" and tok.text == "(":
            e = self.expression(0)
            self.expect(")")
            return e
        if tok.kind == "end":
            self.fail("unexpected end of expression", tok)
        self.fail(f"unexpected {tok.text!r}", tok)

    def expect(self, text: str):
        tok = self.advance()
        if tok.kind != "op" or tok.text != text:
            self.fail(f"expected {text!r}", tok)


def parse_expr(text: str, names: Sequence[str] | None = None, line: int = 1, column: int = 1) -> Expr:
    """Parse ``text`` into an Expr. With ``names`` given, other identifiers are rejected."""
    return _Parser(text, names, line, column).parse()


# --- printer ---------------------------------------------------------------


def _prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _BINARY_BP[e.op]
    if isinstance(e, Neg):
        return _UNARY_BP
    return 100


def _fmt_num(v: float) -> str:
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def to_text(e: Expr) -> str:
    """Render with the minimal parentheses needed for ``parse_expr`` to rebuild the same tree."""
    if isinstance(e, Num):
        return _fmt_num(e.value)
    if isinstance(e, (Var, Const)):
        return e.name
    if isinstance(e, Call):
        return f"{e.func}({to_text(e.arg)})"
    if isinstance(e, Neg):
        inner = to_text(e.operand)
        if _prec(e.operand) < _UNARY_BP:
            inner = f"({inner})"
        return f"-{inner}"
    p = _BINARY_BP[e.op]
    lhs, rhs = to_text(e.left), to_text(e.right)
    if e.op == "^":
        # right-associative; a unary-minus base must be wrapped
        if _prec(e.left) <= p:
            lhs = f"({lhs})"
        if _prec(e.right) < _UNARY_BP:
            rhs = f"({rhs})"
    else:
        if _prec(e.left) < p:
            lhs = f"({lhs})"
        if _prec(e.right) <= p:
            rhs = f"({rhs})"
    return f"{lhs} {e.op} {rhs}" if p == 10 else f"{lhs}{e.op}{rhs}"


# --- evaluation ------------------------------------------------------------

_FLOAT_FUNCS: dict[str, Callable[[float], float]] = {
    "sin": math.sin,
    "cos": math.cos,
    "tan": math.tan,
    "sinh": math.sinh,
    "cosh": math.cosh,
    "tanh": math.tanh,
    "exp": math.exp,
    "log": math.log,
    "sqrt": math.sqrt,
}


def _check_call_domain(func: str, x: float, e: Expr):
    if func == "log" and x <= 0:
        raise EvalDomainError(f"log of non-positive value {x:g}", e)
    if func == "sqrt" and x < 0:
        raise EvalDomainError(f"sqrt of negative value {x:g}", e)
    if func == "tan" and abs(math.cos(x)) < 1e-300:
        raise EvalDomainError("tan at a pole", e)


def _finite(v: float, e: Expr) -> float:
    if not math.isfinite(v):
        raise EvalDomainError("non-finite result", e)
    return v


def _is_integer(x: float) -> bool:
    return float(x).is_integer() and abs(x) < 2**31


def eval_float(e: Expr, env: Mapping[str, float]) -> float:
    """Plain float evaluation (the finite-difference oracles use this path)."""
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Const):
        return CONSTANTS[e.name]
    if isinstance(e, Var):
        try:
            return float(env[e.name])
        except KeyError:
            raise EvalDomainError(f"unbound variable {e.name!r}", e) from None
    if isinstance(e, Neg):
        return -eval_float(e.operand, env)
    if isinstance(e, Call):
        x = eval_float(e.arg, env)
        _check_call_domain(e.func, x, e)
        try:
            return _finite(_FLOAT_FUNCS[e.func](x), e)
        except OverflowError:
            raise EvalDomainError("overflow", e) from None
    a = eval_float(e.left, env)
    b = eval_float(e.right, env)
    if e.op == "+":
        return a + b
    if e.op == "-":
        return a - b
    if e.op == "*":
        return a * b
    if e.op == "/":
        if b == 0.0:
            raise EvalDomainError("division by zero", e)
        return _finite(a / b, e)
    if _is_integer(b):
        if a == 0.0 and b < 0:
            raise EvalDomainError("division by zero", e)
        return _finite(a ** int(b), e)
    if a <= 0:
        raise EvalDomainError(f"non-integer power of non-positive base {a:g}", e)
    return _finite(a**b, e)


def _jet_call(func: str, u: Jet2, e: Expr) -> Jet2:
    x = u.value
    _check_call_domain(func, x, e)
    try:
        if func == "sin":
            s, c = math.sin(x), math.cos(x)
            return u.compose(s, c, -s)
        if func == "cos":
            s, c = math.sin(x), math.cos(x)
            return u.compose(c, -s, -c)
        if func == "tan":
            t = math.tan(x)
            d1 = 1.0 + t * t
            return u.compose(t, d1, 2.0 * t * d1)
        if func == "sinh":
            s, c = math.sinh(x), math.cosh(x)
            return u.compose(s, c, s)
        if func == "cosh":
            s, c = math.sinh(x), math.cosh(x)
            return u.compose(c, s, c)
        if func == "tanh":
            t = math.tanh(x)
            d1 = 1.0 - t * t
            return u.compose(t, d1, -2.0 * t * d1)
        if func == "exp":
            v = math.exp(x)
            return u.compose(v, v, v)
        if func == "log":
            return u.compose(math.log(x), 1.0 / x, -1.0 / (x * x))
        if func == "sqrt":
            if x == 0.0:
                raise EvalDomainError("sqrt is not differentiable at 0", e)
            r = math.sqrt(x)
            return u.compose(r, 0.5 / r, -0.25 / (r * x))
    except OverflowError:
        raise EvalDomainError("overflow", e) from None
    raise EvalDomainError(f"unknown function {func!r}", e)


def eval_jet(e: Expr, point: Sequence[float], coords: Sequence[str]) -> Jet2:
    """Value, gradient and Hessian of ``e`` at ``point`` (exact up to rounding)."""
    n = len(coords)
    index = {c: i for i, c in enumerate(coords)}
    p = [float(x) for x in point]
    if len(p) != n:
        raise ValueError(f"point has {len(p)} coordinates, chart has {n}")
    cache: dict[int, Jet2] = {}

    def walk(node: Expr) -> Jet2:
        key = id(node)
        if key in cache:
            return cache[key]
        if isinstance(node, Num):
            out = Jet2.constant(node.value, n)
        elif isinstance(node, Const):
            out = Jet2.constant(CONSTANTS[node.name], n)
        elif isinstance(node, Var):
            if node.name not in index:
                raise EvalDomainError(f"unbound variable {node.name!r}", node)
            i = index[node.name]
            out = Jet2.variable(p[i], i, n)
        elif isinstance(node, Neg):
            out = -walk(node.operand)
        elif isinstance(node, Call):
            out = _jet_call(node.func, walk(node.arg), node)
        else:
            a, b = walk(node.left), walk(node.right)
            if node.op == "+":
                out = a + b
            elif node.op == "-":
                out = a - b
            elif node.op == "*":
                out = a * b
            elif node.op == "/":
                if b.value == 0.0:
                    raise EvalDomainError("division by zero", node)
                out = a / b
            elif b.is_constant() and _is_integer(b.value):
                if a.value == 0.0 and b.value < 0:
                    raise EvalDomainError("division by zero", node)
                out = a.int_power(int(b.value))
            else:
                if a.value <= 0:
                    raise EvalDomainError(
                        f"non-integer power of non-positive base {a.value:g}", node
                    )
                out = a.real_power(b)
        if not out.is_finite():
            raise EvalDomainError("non-finite result", node)
        cache[key] = out
        return out

    return walk(e)


def lambdify(e: Expr, coords: Sequence[str]) -> Callable[[np.ndarray], float]:
    """Float-valued callable over a coordinate vector."""

    def f(x) -> float:
        return eval_float(e, dict(zip(coords, (float(v) for v in x))))

    return f
