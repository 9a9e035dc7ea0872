"""Symbolic partial derivatives.

Only constant folding and the identities 0*e, 1*e, e+0, e-0, e/1, e^1, e^0
are applied; there is no simplifier.
"""
from __future__ import annotations

from .nodes import BinOp, Call, Expr, Neg, Num, Param, Pow, Var

ZERO = Num(0)
ONE = Num(1)


def _is(e, v):
    return isinstance(e, Num) and e.value == v


def _fold(op, a, b):
    if op == "+":
        r = a + b
    elif op == "-":
        r = a - b
    elif op == "*":
        r = a * b
    else:
        if isinstance(a, int) and isinstance(b, int) and a % b == 0:
            return a // b
        r = a / b
    return r


def add(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(_fold("+", a.value, b.value))
    if _is(a, 0):
        return b
    if _is(b, 0):
        return a
    return BinOp("+", a, b)


def sub(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(_fold("-", a.value, b.value))
    if _is(b, 0):
        return a
    if _is(a, 0):
        return neg(b)
    return BinOp("-", a, b)


def mul(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(_fold("*", a.value, b.value))
    if _is(a, 0) or _is(b, 0):
        return ZERO
    if _is(a, 1):
        return b
    if _is(b, 1):
        return a
    return BinOp("*", a, b)


def div(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Num) and isinstance(b, Num) and b.value != 0:
        return Num(_fold("/", a.value, b.value))
    if _is(a, 0):
        return ZERO
    if _is(b, 1):
        return a
    return BinOp("/", a, b)


def neg(a: Expr) -> Expr:
    if isinstance(a, Num):
        return Num(-a.value)
    if isinstance(a, Neg):
        return a.operand
    return Neg(a)


def power(a: Expr, k: int) -> Expr:
    if k == 0:
        return ONE
    if k == 1:
        return a
    if isinstance(a, Num) and not (a.value == 0 and k < 0):
        return Num(a.value ** k)
    return Pow(a, k)


def diff(e: Expr, var: str) -> Expr:
    """Partial derivative of `e` with respect to the variable named `var`."""
    if isinstance(e, (Num, Param)):
        return ZERO
    if isinstance(e, Var):
        return ONE if e.name == var else ZERO
    if isinstance(e, Neg):
        return neg(diff(e.operand, var))
    if isinstance(e, BinOp):
        da = diff(e.left, var)
        db = diff(e.right, var)
        if e.op == "+":
            return add(da, db)
        if e.op == "-":
            return sub(da, db)
        if e.op == "*":
            return add(mul(da, e.right), mul(e.left, db))
        # quotient rule
        return div(sub(mul(da, e.right), mul(e.left, db)), power(e.right, 2))
    if isinstance(e, Pow):
        k = e.exponent
        if k == 0:
            return ZERO
        return mul(mul(Num(k), power(e.base, k - 1)), diff(e.base, var))
    if isinstance(e, Call):
        da = diff(e.arg, var)
        if _is(da, 0):
            return ZERO
        u = e.arg
        if e.func == "exp":
            return mul(e, da)
        if e.func == "log":
            return div(da, u)
        if e.func == "sin":
            return mul(Call("cos", u), da)
        if e.func == "cos":
            return neg(mul(Call("sin", u), da))
        if e.func == "sqrt":
            return div(da, mul(Num(2), e))
        if e.func == "abs":
            return mul(div(u, e), da)
        if e.func == "frac":
            # derivative 1 away from the integer jumps
            return da
    raise TypeError(f"not an expression node: {e!r}")
