"""Small expression language: parsing, evaluation and exact differentiation.

Expressions are immutable trees built from the node classes below.  They
evaluate on floats or on numpy arrays (broadcasting), which is how the rest of
the package samples functions on grids.

Grammar::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := atom ['^' integer] | '-' factor
    atom   := number | ident | ident '(' expr ')' | '(' expr ')'
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping, Union

import numpy as np

from .errors import (
    DomainFault,
    ExprSyntaxError,
    UnboundSymbol,
    UndeclaredSymbol,
    UnknownFunction,
)

Number = Union[float, np.ndarray]

FUNCTIONS = ("sin", "cos", "exp", "sqrt")


class Expr:
    """Base class of all expression nodes."""

    __slots__ = ()

    def children(self) -> tuple["Expr", ...]:
        return ()

    def symbols(self) -> frozenset[str]:
        out: set[str] = set()
        stack = [self]
        while stack:
            node = stack.pop()
            if isinstance(node, Symbol):
                out.add(node.name)
            stack.extend(node.children())
        return frozenset(out)

    def variables(self) -> frozenset[str]:
        return frozenset(n.name for n in _walk(self) if isinstance(n, Variable))

    def parameters(self) -> frozenset[str]:
        return frozenset(n.name for n in _walk(self) if isinstance(n, Parameter))

    def __call__(self, **bindings) -> Number:
        return evaluate(self, bindings)

    def __str__(self) -> str:
        return to_source(self)

    # Builders used by code that assembles expressions programmatically.
    def __add__(self, other):
        return add(self, _lift(other))

    def __radd__(self, other):
        return add(_lift(other), self)

    def __sub__(self, other):
        return sub(self, _lift(other))

    def __rsub__(self, other):
        return sub(_lift(other), self)

    def __mul__(self, other):
        return mul(self, _lift(other))

    def __rmul__(self, other):
        return mul(_lift(other), self)

    def __truediv__(self, other):
        return div(self, _lift(other))

    def __rtruediv__(self, other):
        return div(_lift(other), self)

    def __pow__(self, n: int):
        return power(self, n)

    def __neg__(self):
        return neg(self)


@dataclass(frozen=True, repr=False)
class Constant(Expr):
    value: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError(f"constants must be finite, got {self.value}")
        object.__setattr__(self, "value", float(self.value))

    def __repr__(self):
        return f"Const({self.value!r})"


@dataclass(frozen=True, repr=False)
class Symbol(Expr):
    name: str


class Variable(Symbol):
    def __repr__(self):
        return f"Var {self.name}"


class Parameter(Symbol):
    def __repr__(self):
        return f"Param {self.name}"


@dataclass(frozen=True, repr=False)
class Neg(Expr):
    arg: Expr

    def children(self):
        return (self.arg,)

    def __repr__(self):
        return f"Neg({self.arg!r})"


@dataclass(frozen=True, repr=False)
class Binary(Expr):
    left: Expr
    right: Expr

    def children(self):
        return (self.left, self.right)

    def __repr__(self):
        return f"{type(self).__name__}({self.left!r}, {self.right!r})"


class Add(Binary):
    pass


class Sub(Binary):
    pass


class Mul(Binary):
    pass


class Div(Binary):
    pass


@dataclass(frozen=True, repr=False)
class IntPow(Expr):
    base: Expr
    exponent: int

    def __post_init__(self):
        if isinstance(self.exponent, bool) or not isinstance(self.exponent, int) or self.exponent < 0:
            raise ValueError(f"exponent must be a nonnegative integer, got {self.exponent!r}")

    def children(self):
        return (self.base,)

    def __repr__(self):
        return f"IntPow({self.base!r}, {self.exponent})"


@dataclass(frozen=True, repr=False)
class Call(Expr):
    arg: Expr

    def children(self):
        return (self.arg,)

    def __repr__(self):
        return f"{type(self).__name__}({self.arg!r})"


class Sin(Call):
    pass


class Cos(Call):
    pass


class Exp(Call):
    pass


class Sqrt(Call):
    pass


_CALLS = {"sin": Sin, "cos": Cos, "exp": Exp, "sqrt": Sqrt}


def _walk(e: Expr):
    stack = [e]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(node.children())


def _lift(x) -> Expr:
    if isinstance(x, Expr):
        return x
    return Constant(float(x))


ZERO = Constant(0.0)
ONE = Constant(1.0)


def _is_const(e: Expr, value=None) -> bool:
    return isinstance(e, Constant) and (value is None or e.value == value)


# Constructors with constant folding.  Only folds that cannot change where an
# expression is defined are applied (x + 0 -> x, x * 1 -> x, const op const).

def add(a: Expr, b: Expr) -> Expr:
    if _is_const(a) and _is_const(b):
        return Constant(a.value + b.value)
    if _is_const(a, 0.0):
        return b
    if _is_const(b, 0.0):
        return a
    return Add(a, b)


def sub(a: Expr, b: Expr) -> Expr:
    if _is_const(a) and _is_const(b):
        return Constant(a.value - b.value)
    if _is_const(b, 0.0):
        return a
    if _is_const(a, 0.0):
        return neg(b)
    return Sub(a, b)


def mul(a: Expr, b: Expr) -> Expr:
    if _is_const(a) and _is_const(b):
        return Constant(a.value * b.value)
    if _is_const(a, 1.0):
        return b
    if _is_const(b, 1.0):
        return a
    return Mul(a, b)


def div(a: Expr, b: Expr) -> Expr:
    if _is_const(a) and _is_const(b) and b.value != 0.0:
        return Constant(a.value / b.value)
    if _is_const(b, 1.0):
        return a
    return Div(a, b)


def neg(a: Expr) -> Expr:
    if _is_const(a):
        return Constant(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def power(a: Expr, n: int) -> Expr:
    if n == 1:
        return a
    if _is_const(a):
        try:
            return Constant(a.value ** n)
        except OverflowError:
            pass
    return IntPow(a, n)


def call(name: str, a: Expr) -> Expr:
    """Build ``name(a)``, folding constant arguments where the value is defined."""
    node = _CALLS[name](a)
    if _is_const(a):
        try:
            return Constant(evaluate(node, {}))
        except DomainFault:
            pass
    return node


def sin(a):
    return Sin(_lift(a))


def cos(a):
    return Cos(_lift(a))


def exp(a):
    return Exp(_lift(a))


def sqrt(a):
    return Sqrt(_lift(a))


# ---------------------------------------------------------------------------
# Parsing

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[a-zA-Z_][a-zA-Z0-9_]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


class _Parser:
    def __init__(self, source: str, variables, parameters):
        self.source = source
        self.variables = None if variables is None else frozenset(variables)
        self.parameters = frozenset(parameters)
        self.tokens = list(self._lex())
        self.pos = 0

    def _byte_offset(self, index: int) -> int:
        return len(self.source[:index].encode("utf-8"))

    def _lex(self):
        i = 0
        src = self.source
        while i < len(src):
            m = _TOKEN.match(src, i)
            if m is None:
                raise ExprSyntaxError(f"unexpected character {src[i]!r}", self._byte_offset(i))
            kind = m.lastgroup
            if kind != "ws":
                yield kind, m.group(), i
            i = m.end()
        yield "end", "", len(src)

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        return ExprSyntaxError(message, self._byte_offset(tok[2]))

    def expect_op(self, op):
        tok = self.peek()
        if tok[0] == "op" and tok[1] == op:
            return self.advance()
        found = "end of input" if tok[0] == "end" else repr(tok[1])
        raise self.error(f"expected {op!r}, found {found}")

    def parse(self) -> Expr:
        e = self.expr()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected {self.peek()[1]!r}")
        return e

    def expr(self):
        left = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.advance()[1]
            right = self.term()
            left = Add(left, right) if op == "+" else Sub(left, right)
        return left

    def term(self):
        left = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.advance()[1]
            right = self.factor()
            left = Mul(left, right) if op == "*" else Div(left, right)
        return left

    def factor(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "-":
            self.advance()
            return Neg(self.factor())
        base = self.atom()
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "^":
            self.advance()
            exp_tok = self.peek()
            if exp_tok[0] != "number" or not exp_tok[1].isdigit():
                raise self.error("exponent must be a nonnegative integer literal", exp_tok)
            self.advance()
            return IntPow(base, int(exp_tok[1]))
        return base

    def atom(self):
        tok = self.peek()
        kind, text, _ = tok
        if kind == "number":
            self.advance()
            return Constant(float(text))
        if kind == "ident":
            self.advance()
            nxt = self.peek()
            if nxt[0] == "op" and nxt[1] == "(":
                if text not in _CALLS:
                    raise UnknownFunction(f"unknown function {text!r}", self._byte_offset(tok[2]))
                self.advance()
                arg = self.expr()
                self.expect_op(")")
                return _CALLS[text](arg)
            return self.symbol(text, tok)
        if kind == "op" and text == "(":
            self.advance()
            e = self.expr()
            self.expect_op(")")
            return e
        found = "end of input" if kind == "end" else repr(text)
        raise self.error(f"expected a number, symbol or '(', found {found}")

    def symbol(self, name, tok):
        if name in self.parameters:
            return Parameter(name)
        if self.variables is None or name in self.variables:
            return Variable(name)
        raise UndeclaredSymbol(f"undeclared symbol {name!r}", self._byte_offset(tok[2]))


def parse(source: str, variables=None, parameters=()) -> Expr:
    """Parse ``source`` into an expression tree.

    Identifiers listed in ``parameters`` become :class:`Parameter` nodes.  When
    ``variables`` is None every other identifier is a :class:`Variable`;
    otherwise identifiers outside both sets raise :class:`UndeclaredSymbol`.
    """
    return _Parser(source, variables, parameters).parse()


# ---------------------------------------------------------------------------
# Evaluation

def _first_bad(mask, bindings):
    """Return the bindings at the first offending sample, for error messages."""
    if np.ndim(mask) == 0:
        return {k: float(np.asarray(v)) if np.ndim(v) == 0 else v for k, v in bindings.items()}
    idx = np.unravel_index(int(np.argmax(mask)), np.shape(mask))
    point = {}
    for k, v in bindings.items():
        arr = np.asarray(v)
        if arr.ndim == 0:
            point[k] = float(arr)
        else:
            try:
                point[k] = float(np.broadcast_to(arr, np.shape(mask))[idx])
            except ValueError:
                point[k] = v
    return point


def _check_finite(value, node, bindings):
    if np.ndim(value) == 0:
        if not math.isfinite(value):
            raise DomainFault("non-finite value", node, _first_bad(True, bindings))
        return value
    bad = ~np.isfinite(value)
    if bad.any():
        raise DomainFault("non-finite value", node, _first_bad(bad, bindings))
    return value


def evaluate(e: Expr, bindings: Mapping[str, Number]) -> Number:
    """Evaluate ``e`` with symbol values from ``bindings``.

    Values may be floats or numpy arrays; arrays broadcast.  Extra bindings are
    ignored.  Raises :class:`UnboundSymbol` or :class:`DomainFault`.
    """
    with np.errstate(all="ignore"):
        out = _eval(e, bindings)
    if isinstance(out, np.ndarray):
        return out
    return float(out)


def _eval(e: Expr, b) -> Number:
    if isinstance(e, Constant):
        return e.value
    if isinstance(e, Symbol):
        try:
            v = b[e.name]
        except KeyError:
            raise UnboundSymbol(e.name) from None
        return np.asarray(v, dtype=float) if isinstance(v, np.ndarray) else float(v)
    if isinstance(e, Neg):
        return -_eval(e.arg, b)
    if isinstance(e, Binary):
        left = _eval(e.left, b)
        right = _eval(e.right, b)
        if isinstance(e, Add):
            r = left + right
        elif isinstance(e, Sub):
            r = left - right
        elif isinstance(e, Mul):
            r = left * right
        else:
            zero = np.equal(right, 0.0)
            if np.any(zero):
                raise DomainFault("division by zero", e, _first_bad(zero, b))
            r = left / right
        return _check_finite(r, e, b)
    if isinstance(e, IntPow):
        base = _eval(e.base, b)
        if isinstance(base, np.ndarray):
            r = base ** e.exponent
        else:
            try:
                r = base ** e.exponent
            except OverflowError:
                r = math.inf
        return _check_finite(r, e, b)
    if isinstance(e, Call):
        a = _eval(e.arg, b)
        if isinstance(e, Sin):
            return np.sin(a) if isinstance(a, np.ndarray) else math.sin(a)
        if isinstance(e, Cos):
            return np.cos(a) if isinstance(a, np.ndarray) else math.cos(a)
        if isinstance(e, Exp):
            r = np.exp(a) if isinstance(a, np.ndarray) else (math.exp(a) if a < 709.78 else math.inf)
            return _check_finite(r, e, b)
        negative = np.less(a, 0.0)
        if np.any(negative):
            raise DomainFault("square root of a negative number", e, _first_bad(negative, b))
        return np.sqrt(a) if isinstance(a, np.ndarray) else math.sqrt(a)
    raise TypeError(f"not an expression node: {e!r}")


# ---------------------------------------------------------------------------
# Differentiation

def differentiate(e: Expr, wrt: str) -> Expr:
    """Exact partial derivative of ``e`` with respect to the symbol ``wrt``.

    Terms whose derivative is identically zero are dropped; this cannot change
    values wherever ``e`` itself is defined.
    """
    return _diff(e, wrt, {})


def _diff(e: Expr, x: str, memo: dict) -> Expr:
    key = id(e)
    hit = memo.get(key)
    if hit is not None and hit[0] is e:
        return hit[1]
    d = _diff_node(e, x, memo)
    memo[key] = (e, d)
    return d


def _diff_node(e, x, memo):
    if isinstance(e, Constant):
        return ZERO
    if isinstance(e, Symbol):
        return ONE if e.name == x else ZERO
    if x not in e.symbols():
        return ZERO
    if isinstance(e, Neg):
        return neg(_diff(e.arg, x, memo))
    if isinstance(e, (Add, Sub)):
        da, db = _diff(e.left, x, memo), _diff(e.right, x, memo)
        return add(da, db) if isinstance(e, Add) else sub(da, db)
    if isinstance(e, Mul):
        a, b = e.left, e.right
        da, db = _diff(a, x, memo), _diff(b, x, memo)
        if _is_const(da, 0.0):
            return mul(a, db)
        if _is_const(db, 0.0):
            return mul(da, b)
        return add(mul(da, b), mul(a, db))
    if isinstance(e, Div):
        a, b = e.left, e.right
        da, db = _diff(a, x, memo), _diff(b, x, memo)
        if _is_const(db, 0.0):
            return div(da, b)
        if _is_const(da, 0.0):
            return neg(div(mul(a, db), power(b, 2)))
        return div(sub(mul(da, b), mul(a, db)), power(b, 2))
    if isinstance(e, IntPow):
        n = e.exponent
        if n == 0:
            return ZERO
        db = _diff(e.base, x, memo)
        if n == 1:
            return db
        return mul(mul(Constant(float(n)), power(e.base, n - 1)), db)
    if isinstance(e, Call):
        a = e.arg
        da = _diff(a, x, memo)
        if isinstance(e, Sin):
            outer = Cos(a)
        elif isinstance(e, Cos):
            outer = neg(Sin(a))
        elif isinstance(e, Exp):
            outer = e
        else:
            return div(da, mul(Constant(2.0), e))
        return mul(outer, da)
    raise TypeError(f"not an expression node: {e!r}")


# ---------------------------------------------------------------------------
# Substitution and printing

def substitute(e: Expr, mapping: Mapping[str, Expr | float]) -> Expr:
    """Replace symbols by expressions (or numbers), simultaneously."""
    repl = {k: _lift(v) for k, v in mapping.items()}
    memo: dict = {}

    def go(node):
        hit = memo.get(id(node))
        if hit is not None and hit[0] is node:
            return hit[1]
        out = _subs_node(node, repl, go)
        memo[id(node)] = (node, out)
        return out

    return go(e)


def _subs_node(node, repl, go):
    if isinstance(node, Constant):
        return node
    if isinstance(node, Symbol):
        return repl.get(node.name, node)
    if isinstance(node, Neg):
        return neg(go(node.arg))
    if isinstance(node, Binary):
        a, b = go(node.left), go(node.right)
        return {Add: add, Sub: sub, Mul: mul, Div: div}[type(node)](a, b)
    if isinstance(node, IntPow):
        return power(go(node.base), node.exponent)
    if isinstance(node, Call):
        return call(type(node).__name__.lower(), go(node.arg))
    raise TypeError(f"not an expression node: {node!r}")


def to_source(e: Expr) -> str:
    """Print ``e`` in the input grammar.

    Every compound subexpression is parenthesized, so ``parse(to_source(e))``
    rebuilds a tree that evaluates identically.
    """
    if isinstance(e, Constant):
        text = repr(abs(e.value))
        return f"(-{text})" if math.copysign(1.0, e.value) < 0 else text
    if isinstance(e, Symbol):
        return e.name
    if isinstance(e, Neg):
        return f"(-{to_source(e.arg)})"
    if isinstance(e, Binary):
        op = {Add: "+", Sub: "-", Mul: "*", Div: "/"}[type(e)]
        return f"({to_source(e.left)} {op} {to_source(e.right)})"
    if isinstance(e, IntPow):
        return f"({_atom(e.base)}^{e.exponent})"
    if isinstance(e, Call):
        return f"{type(e).__name__.lower()}({to_source(e.arg)})"
    raise TypeError(f"not an expression node: {e!r}")


def _atom(e: Expr) -> str:
    # compound nodes already print with enclosing parentheses
    s = to_source(e)
    if isinstance(e, (Symbol, Call, Binary, Neg, IntPow)) or s.startswith("("):
        return s
    return f"({s})"
