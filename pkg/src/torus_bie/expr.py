"""A tiny expression language for boundary data.

Grammar (standard precedence, ``^`` right-associative and binding tighter than
unary minus)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | power
    power  := atom ("^" unary)?
    atom   := NUMBER | NAME | NAME "(" expr ("," expr)* ")" | "(" expr ")"

Variables: x, y (node coordinates), j (1-based hole index), t (curve
parameter). Functions: sin, cos, log, exp, atan2, absG(x, y, ax, ay) = G(z - a)
and dnG(x, y, ax, ay) = normal derivative of G(. - a) at the node.
"""
import re
from dataclasses import dataclass

import numpy as np

from .exceptions import ParseError

VARIABLES = frozenset({"x", "y", "j", "t"})
FUNCTIONS = {"sin": 1, "cos": 1, "log": 1, "exp": 1, "atan2": 2, "absG": 4, "dnG": 4}


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


_TOKEN = re.compile(r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^(),]))")

_ATOM_START = frozenset({"number", "name", "'('", "'-'"})


class _Parser:
    def __init__(self, src):
        self.src = src
        self.tokens = self._tokenize(src)
        self.i = 0

    def _tokenize(self, src):
        tokens, pos = [], 0
        while True:
            while pos < len(src) and src[pos].isspace():
                pos += 1
            if pos == len(src):
                break
            m = _TOKEN.match(src, pos)
            if not m or m.end() == pos:
                raise self.error(pos, {"number", "name", "operator"})
            start = m.start(m.lastgroup)
            tokens.append((m.lastgroup, m.group(m.lastgroup), start))
            pos = m.end()
        tokens.append(("end", "", len(src)))
        return tokens

    def error(self, pos, expected):
        # positions are tracked in characters; report bytes of the UTF-8 source
        return ParseError(len(self.src[:pos].encode("utf-8")), expected, self.src)

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, text, pos = self.peek()
        if kind != "op" or text != op:
            raise self.error(pos, {f"'{op}'"})
        self.take()

    def parse(self):
        node = self.expr()
        kind, _, pos = self.peek()
        if kind != "end":
            raise self.error(pos, {"operator", "end of input"})
        return node

    def expr(self):
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        kind, text, pos = self.take()
        if kind == "num":
            return Num(float(text))
        if kind == "name":
            if self.peek()[:2] == ("op", "("):
                if text not in FUNCTIONS:
                    raise self.error(pos, {"known function"})
                self.take()
                args = [self.expr()]
                while self.peek()[:2] == ("op", ","):
                    self.take()
                    args.append(self.expr())
                close = self.peek()[2]
                self.expect_op(")")
                if len(args) != FUNCTIONS[text]:
                    raise self.error(close, {f"{FUNCTIONS[text]} argument(s) to {text}"})
                return Call(text, tuple(args))
            if text not in VARIABLES:
                raise self.error(pos, {"variable x, y, j or t"})
            return Var(text)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise self.error(pos, _ATOM_START)


def parse_expr(src):
    """Parse ``src`` into an AST; raises ParseError with a byte offset."""
    return _Parser(src).parse()


_UNARY = {"sin": np.sin, "cos": np.cos, "log": np.log, "exp": np.exp}
_BINARY = {"+": np.add, "-": np.subtract, "*": np.multiply, "/": np.divide, "^": np.power}


def evaluate(node, env):
    """Evaluate an AST. ``env`` maps variable names to arrays and may carry
    ``_green`` and ``_dn_green`` callables for absG / dnG.
    """
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return env[node.name]
    if isinstance(node, Neg):
        return -evaluate(node.operand, env)
    if isinstance(node, BinOp):
        return _BINARY[node.op](evaluate(node.left, env), evaluate(node.right, env))
    args = [evaluate(a, env) for a in node.args]
    if node.name in _UNARY:
        return _UNARY[node.name](args[0])
    if node.name == "atan2":
        return np.arctan2(args[0], args[1])
    x, y, ax, ay = np.broadcast_arrays(*args)
    z, a = x + 1j * y, ax + 1j * ay
    key = "_green" if node.name == "absG" else "_dn_green"
    return env[key](z, a)
