"""Recursive-descent parser for the model expression language.

Grammar (lowest to highest binding)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := primary ('^' ['-'] INT)?
    primary := NUMBER | NAME | FUNC '(' expr ')' | '(' expr ')'
"""
from __future__ import annotations

import re
from typing import Mapping, Sequence

from .nodes import FUNCTIONS, BinOp, Call, Expr, Neg, Num, Param, Pow, Var


class ExprError(Exception):
    pass


class ExprSyntaxError(ExprError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnknownIdentifierError(ExprError):
    def __init__(self, name: str, offset: int):
        super().__init__(f"unknown identifier {name!r} at offset {offset}")
        self.name = name
        self.offset = offset


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", _byte_offset(text, pos))
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), _byte_offset(text, pos)))
        pos = m.end()
    tokens.append(("end", "", _byte_offset(text, len(text))))
    return tokens


def _byte_offset(text: str, index: int) -> int:
    return len(text[:index].encode("utf-8"))


class _Parser:
    def __init__(self, text, variables, parameters):
        self.tokens = _tokenize(text)
        self.i = 0
        self.var_index = {name: k for k, name in enumerate(variables)}
        self.parameters = parameters

    @property
    def tok(self):
        return self.tokens[self.i]

    def advance(self):
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, value):
        kind, text, offset = self.tok
        if text != value or kind == "end":
            raise ExprSyntaxError(f"expected {value!r}", offset)
        self.advance()

    def parse(self) -> Expr:
        e = self.expr()
        kind, text, offset = self.tok
        if kind != "end":
            raise ExprSyntaxError(f"unexpected token {text!r}", offset)
        return e

    def expr(self):
        left = self.term()
        while self.tok[0] == "op" and self.tok[1] in "+-":
            op = self.advance()[1]
            left = BinOp(op, left, self.term())
        return left

    def term(self):
        left = self.unary()
        while self.tok[0] == "op" and self.tok[1] in "*/":
            op = self.advance()[1]
            left = BinOp(op, left, self.unary())
        return left

    def unary(self):
        if self.tok[0] == "op" and self.tok[1] == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.primary()
        if self.tok[0] == "op" and self.tok[1] == "^":
            self.advance()
            sign = 1
            if self.tok[0] == "op" and self.tok[1] == "-":
                self.advance()
                sign = -1
            kind, text, offset = self.tok
            if kind != "num" or not text.isdigit():
                raise ExprSyntaxError("exponent must be an integer literal", offset)
            self.advance()
            return Pow(base, sign * int(text))
        return base

    def primary(self):
        kind, text, offset = self.tok
        if kind == "num":
            self.advance()
            if re.fullmatch(r"\d+", text):
                return Num(int(text))
            return Num(float(text))
        if kind == "name":
            self.advance()
            if text in FUNCTIONS and self.tok[1] == "(":
                self.advance()
                arg = self.expr()
                self.expect(")")
                return Call(text, arg)
            if text in self.var_index:
                return Var(text, self.var_index[text])
            if text in self.parameters:
                return Param(text, float(self.parameters[text]))
            raise UnknownIdentifierError(text, offset)
        if kind == "op" and text == "(":
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        if kind == "end":
            raise ExprSyntaxError("unexpected end of input", offset)
        raise ExprSyntaxError(f"unexpected token {text!r}", offset)


def parse(text: str, variables: Sequence[str] = (), parameters: Mapping[str, float] | None = None) -> Expr:
    """Parse `text` into an expression tree.

    Names resolve first to `variables` (by position) and then to `parameters`,
    whose bound values are stored in the tree.
    """
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", 0)
    return _Parser(text, list(variables), dict(parameters or {})).parse()
