"""Expression tree nodes and the canonical printer.

Trees are immutable; structural equality is dataclass equality.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

FUNCTIONS = ("exp", "log", "sin", "cos", "sqrt", "abs", "frac")

# binding strength used by the printer
_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}
_NEG_PREC = 3
_POW_PREC = 4
_ATOM_PREC = 5


@dataclass(frozen=True)
class Num:
    value: Union[int, float]


@dataclass(frozen=True)
class Var:
    name: str
    index: int


@dataclass(frozen=True)
class Param:
    name: str
    value: float


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = Union[Num, Var, Param, BinOp, Neg, Pow, Call]


def precedence(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return _NEG_PREC
    if isinstance(e, Pow):
        return _POW_PREC
    if isinstance(e, Num) and e.value < 0:
        return _NEG_PREC
    return _ATOM_PREC


def format_number(v) -> str:
    if isinstance(v, bool):
        v = int(v)
    if isinstance(v, int):
        return str(v)
    return repr(float(v))


def to_string(e: Expr) -> str:
    """Render `e` with the minimum parentheses needed to re-parse to the same tree."""
    if isinstance(e, Num):
        return format_number(e.value)
    if isinstance(e, (Var, Param)):
        return e.name
    if isinstance(e, Call):
        return f"{e.func}({to_string(e.arg)})"
    if isinstance(e, Neg):
        inner = to_string(e.operand)
        if precedence(e.operand) < _NEG_PREC:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(e, Pow):
        base = to_string(e.base)
        if precedence(e.base) < _ATOM_PREC:
            base = f"({base})"
        return f"{base}^{e.exponent}"
    if isinstance(e, BinOp):
        p = _PREC[e.op]
        left = to_string(e.left)
        if precedence(e.left) < p:
            left = f"({left})"
        right = to_string(e.right)
        # same-precedence right operand always needs grouping (left associativity)
        if precedence(e.right) <= p:
            right = f"({right})"
        return f"{left} {e.op} {right}"
    raise TypeError(f"not an expression node: {e!r}")


def free_names(e: Expr) -> set:
    if isinstance(e, (Var, Param)):
        return {e.name}
    if isinstance(e, BinOp):
        return free_names(e.left) | free_names(e.right)
    if isinstance(e, (Neg,)):
        return free_names(e.operand)
    if isinstance(e, Pow):
        return free_names(e.base)
    if isinstance(e, Call):
        return free_names(e.arg)
    return set()


def free_variables(e: Expr) -> set:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, BinOp):
        return free_variables(e.left) | free_variables(e.right)
    if isinstance(e, Neg):
        return free_variables(e.operand)
    if isinstance(e, Pow):
        return free_variables(e.base)
    if isinstance(e, Call):
        return free_variables(e.arg)
    return set()
