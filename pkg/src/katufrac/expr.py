"""Arithmetic mini-language for problem functions.

Grammar (EBNF)::

    expr   = term { ("+" | "-") term } ;
    term   = unary { ("*" | "/") unary } ;
    unary  = ("-" | "+") unary | power ;
    power  = atom [ "^" unary ] ;
    atom   = number | name | name "(" expr { "," expr } ")" | "(" expr ")" ;

``^`` binds tighter than unary minus and associates to the right, so
``-t^2`` is ``-(t^2)`` and ``2^3^2`` is ``2^9``. Built-in constants are
``pi`` and ``e``; functions are listed in :data:`FUNCTIONS`.

Evaluation works on floats and numpy arrays alike. Domain violations
(``ln`` of a non-positive number, ``sqrt`` of a negative one, division by
zero, gamma at a pole) produce NaN and emit a :class:`DomainWarning`.
"""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .special import gamma as _gamma

FUNCTIONS = {
    "sin": 1,
    "cos": 1,
    "exp": 1,
    "ln": 1,
    "sqrt": 1,
    "abs": 1,
    "sign": 1,
    "gamma": 1,
    "pow": 2,
}
CONSTANTS = {"pi": math.pi, "e": math.e}


class ExprError(ValueError):
    pass


class ExprSyntaxError(ExprError):
    def __init__(self, position: int, message: str):
        super().__init__(f"syntax error at offset {position}: {message}")
        self.position = position
        self.message = message


class UnknownIdentifierError(ExprError):
    def __init__(self, name: str):
        super().__init__(f"unknown identifier {name}")
        self.name = name


class UnknownFunctionError(ExprError):
    def __init__(self, name: str):
        super().__init__(f"unknown function {name}")
        self.name = name


class UnboundVariableError(ExprError):
    def __init__(self, name: str):
        super().__init__(f"unbound variable {name}")
        self.name = name


class DifferentiationError(ExprError):
    pass


class DomainWarning(RuntimeWarning):
    """A user function was evaluated outside its domain; the value is NaN."""


# ---------------------------------------------------------------------------
# tree

class Expr:
    __slots__ = ()

    def __call__(self, **bindings):
        return evaluate(self, bindings)

    def __str__(self):
        return to_source(self)

    @property
    def variables(self) -> frozenset:
        return variables(self)


@dataclass(frozen=True)
class Const(Expr):
    value: float


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Call(Expr):
    name: str
    args: tuple


def variables(e: Expr) -> frozenset:
    if isinstance(e, Var):
        return frozenset([e.name])
    if isinstance(e, Const):
        return frozenset()
    if isinstance(e, Neg):
        return variables(e.arg)
    if isinstance(e, BinOp):
        return variables(e.left) | variables(e.right)
    return frozenset().union(*(variables(a) for a in e.args))


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),]))"
)


def _tokenize(source):
    tokens = []
    pos = 0
    n = len(source)
    while pos < n:
        if source[pos:].strip() == "":
            break
        m = _TOKEN.match(source, pos)
        if m is None or m.lastgroup is None:
            bad = pos + len(source[pos:]) - len(source[pos:].lstrip())
            raise ExprSyntaxError(bad, f"unexpected character {source[bad]!r}")
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, source, allowed):
        self.tokens = _tokenize(source)
        self.i = 0
        self.allowed = allowed

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text):
        kind, value, pos = self.take()
        if value != text or kind != "op":
            found = "end of input" if kind == "end" else repr(value)
            raise ExprSyntaxError(pos, f"expected {text!r}, found {found}")

    def parse(self):
        node = self.expr()
        kind, value, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(pos, f"unexpected {value!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        kind, value, _ = self.peek()
        if kind == "op" and value == "-":
            self.take()
            return Neg(self.unary())
        if kind == "op" and value == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        kind, value, pos = self.take()
        if kind == "num":
            return Const(float(value))
        if kind == "name":
            if self.peek()[0] == "op" and self.peek()[1] == "(":
                return self.call(value, pos)
            if value in self.allowed:
                return Var(value)
            if value in CONSTANTS:
                return Const(CONSTANTS[value])
            raise UnknownIdentifierError(value)
        if kind == "op" and value == "(":
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if kind == "end" else repr(value)
        raise ExprSyntaxError(pos, f"unexpected {found}")

    def call(self, name, pos):
        if name not in FUNCTIONS:
            raise UnknownFunctionError(name)
        self.expect("(")
        args = [self.expr()]
        while self.peek()[0] == "op" and self.peek()[1] == ",":
            self.take()
            args.append(self.expr())
        self.expect(")")
        if len(args) != FUNCTIONS[name]:
            raise ExprSyntaxError(pos, f"{name} takes {FUNCTIONS[name]} argument(s), got {len(args)}")
        return Call(name, tuple(args))


def parse(source: str, allowed_vars) -> Expr:
    """Parse ``source`` into an :class:`Expr` over ``allowed_vars``.

    Raises :class:`ExprSyntaxError` (with ``.position``),
    :class:`UnknownIdentifierError` or :class:`UnknownFunctionError`.
    """
    allowed = frozenset(allowed_vars)
    if not allowed:
        raise ValueError("allowed_vars must be non-empty")
    return _Parser(source, allowed).parse()


# ---------------------------------------------------------------------------
# evaluation

def _flag(issues, mask, what):
    count = int(np.count_nonzero(mask))
    if count:
        issues.append(f"{what} at {count} point(s)")


def _ev(e, env, issues):
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        try:
            return env[e.name]
        except KeyError:
            raise UnboundVariableError(e.name) from None
    if isinstance(e, Neg):
        return -_ev(e.arg, env, issues)
    if isinstance(e, BinOp):
        a = _ev(e.left, env, issues)
        b = _ev(e.right, env, issues)
        op = e.op
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            bad = np.asarray(b) == 0
            _flag(issues, bad, "division by zero")
            return np.where(bad, np.nan, np.divide(a, np.where(bad, 1.0, b)))
        return _power(a, b, issues)
    x = [_ev(a, env, issues) for a in e.args]
    name = e.name
    if name == "pow":
        return _power(x[0], x[1], issues)
    arg = x[0]
    if name == "sin":
        return np.sin(arg)
    if name == "cos":
        return np.cos(arg)
    if name == "exp":
        return np.exp(arg)
    if name == "abs":
        return np.abs(arg)
    if name == "sign":
        return np.sign(arg)
    if name == "ln":
        bad = np.asarray(arg) <= 0
        _flag(issues, bad, "ln of non-positive argument")
        return np.where(bad, np.nan, np.log(np.where(bad, 1.0, arg)))
    if name == "sqrt":
        bad = np.asarray(arg) < 0
        _flag(issues, bad, "sqrt of negative argument")
        return np.where(bad, np.nan, np.sqrt(np.where(bad, 0.0, arg)))
    if name == "gamma":
        arr = np.asarray(arg, dtype=float)
        bad = (arr <= 0) & (arr == np.floor(arr))
        _flag(issues, bad, "gamma at non-positive integer")
        return _gamma(arr)
    raise UnknownFunctionError(name)


def _power(a, b, issues):
    aa = np.asarray(a, dtype=float)
    bb = np.asarray(b, dtype=float)
    neg_base = (aa < 0) & (bb != np.floor(bb))
    zero_pole = (aa == 0) & (bb < 0)
    _flag(issues, neg_base, "negative base with non-integer exponent")
    _flag(issues, zero_pole, "zero raised to a negative power")
    bad = neg_base | zero_pole
    safe = np.power(np.where(bad, 1.0, aa), bb)
    return np.where(bad, np.nan, safe)


def evaluate(e: Expr, bindings: Mapping[str, object]):
    """Evaluate ``e`` with variables taken from ``bindings``.

    Values may be floats or numpy arrays (broadcast together). Returns a
    float for scalar input, otherwise an array.
    """
    issues: list = []
    with np.errstate(all="ignore"):
        value = _ev(e, bindings, issues)
    if issues:
        warnings.warn(f"{to_source(e)}: " + "; ".join(issues), DomainWarning, stacklevel=2)
    value = np.asarray(value, dtype=float)
    if value.ndim == 0:
        return float(value)
    return value


# ---------------------------------------------------------------------------
# construction helpers with literal folding

def _literal(e):
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Neg) and isinstance(e.arg, Const):
        return -e.arg.value
    return None


def const(value: float) -> Expr:
    value = float(value)
    if value < 0 or (value == 0 and math.copysign(1.0, value) < 0):
        return Neg(Const(-value))
    return Const(value)


def _fold(node):
    lits = None
    if isinstance(node, BinOp):
        lits = (_literal(node.left), _literal(node.right))
    elif isinstance(node, Call):
        lits = tuple(_literal(a) for a in node.args)
    elif isinstance(node, Neg):
        lits = (_literal(node.arg),)
    if lits is None or any(v is None for v in lits):
        return node
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DomainWarning)
        value = evaluate(node, {})
    if not math.isfinite(value):
        return node
    return const(value)


def neg(a):
    lit = _literal(a)
    if lit is not None:
        return const(-lit)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def add(a, b):
    if _literal(a) == 0:
        return b
    if _literal(b) == 0:
        return a
    return _fold(BinOp("+", a, b))


def sub(a, b):
    if _literal(b) == 0:
        return a
    if _literal(a) == 0:
        return neg(b)
    return _fold(BinOp("-", a, b))


def mul(a, b):
    la, lb = _literal(a), _literal(b)
    if la == 0 or lb == 0:
        return Const(0.0)
    if la == 1:
        return b
    if lb == 1:
        return a
    return _fold(BinOp("*", a, b))


def div(a, b):
    if _literal(a) == 0:
        return Const(0.0)
    if _literal(b) == 1:
        return a
    return _fold(BinOp("/", a, b))


def power(a, b):
    lb = _literal(b)
    if lb == 1:
        return a
    if lb == 0:
        return Const(1.0)
    return _fold(BinOp("^", a, b))


def call(name, *args):
    return _fold(Call(name, tuple(args)))


# ---------------------------------------------------------------------------
# differentiation

def differentiate(e: Expr, var: str) -> Expr:
    """Exact symbolic derivative of ``e`` with respect to ``var``.

    ``abs`` differentiates to ``sign(arg)``; ``sign`` to zero (almost
    everywhere); ``gamma`` raises :class:`DifferentiationError`.
    """
    if isinstance(e, Const):
        return Const(0.0)
    if isinstance(e, Var):
        return Const(1.0 if e.name == var else 0.0)
    if isinstance(e, Neg):
        return neg(differentiate(e.arg, var))
    if isinstance(e, BinOp):
        a, b = e.left, e.right
        if e.op in "+-":
            da, db = differentiate(a, var), differentiate(b, var)
            return add(da, db) if e.op == "+" else sub(da, db)
        if e.op == "*":
            return add(mul(differentiate(a, var), b), mul(a, differentiate(b, var)))
        if e.op == "/":
            num = sub(mul(differentiate(a, var), b), mul(a, differentiate(b, var)))
            return div(num, power(b, Const(2.0)))
        return _diff_power(a, b, var)

    name = e.name
    if name == "pow":
        return _diff_power(e.args[0], e.args[1], var)
    a = e.args[0]
    da = differentiate(a, var)
    if name == "sin":
        outer = call("cos", a)
    elif name == "cos":
        outer = neg(call("sin", a))
    elif name == "exp":
        outer = call("exp", a)
    elif name == "ln":
        return div(da, a)
    elif name == "sqrt":
        return div(da, mul(Const(2.0), call("sqrt", a)))
    elif name == "abs":
        outer = call("sign", a)
    elif name == "sign":
        return Const(0.0)
    elif name == "gamma":
        raise DifferentiationError("differentiation of gamma is not supported")
    else:
        raise UnknownFunctionError(name)
    return mul(outer, da)


def _diff_power(a, b, var):
    a_dep = var in variables(a)
    b_dep = var in variables(b)
    if not a_dep and not b_dep:
        return Const(0.0)
    if not b_dep:
        # b * a^(b-1) * a'
        return mul(mul(b, power(a, sub(b, Const(1.0)))), differentiate(a, var))
    if not a_dep:
        return mul(mul(power(a, b), call("ln", a)), differentiate(b, var))
    inner = add(
        mul(differentiate(b, var), call("ln", a)),
        div(mul(b, differentiate(a, var)), a),
    )
    return mul(power(a, b), inner)


# ---------------------------------------------------------------------------
# printing

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}


def _prec(e):
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return 3
    if isinstance(e, Const) and e.value < 0:
        return 3
    return 5


def _number(value):
    if value < 0:
        return "-" + _number(-value)
    if value.is_integer() and value < 1e15:
        return str(int(value))
    return repr(value)


def _wrap(e, cond):
    s = to_source(e)
    return f"({s})" if cond else s


def to_source(e: Expr) -> str:
    """Render ``e`` so that :func:`parse` rebuilds the same tree."""
    if isinstance(e, Const):
        return _number(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        return "-" + _wrap(e.arg, _prec(e.arg) < 3)
    if isinstance(e, BinOp):
        p = _PREC[e.op]
        if e.op == "^":
            return f"{_wrap(e.left, _prec(e.left) < 5)}^{_wrap(e.right, _prec(e.right) < 3)}"
        return f"{_wrap(e.left, _prec(e.left) < p)}{e.op}{_wrap(e.right, _prec(e.right) <= p)}"
    return f"{e.name}(" + ", ".join(to_source(a) for a in e.args) + ")"
