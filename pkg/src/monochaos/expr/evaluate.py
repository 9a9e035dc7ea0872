"""Point evaluation of expression trees.

`evaluate` walks the tree and reports domain errors against the offending
subexpression. `compile_exprs` generates straight-line Python for hot loops
and falls back to the tree walker to produce a proper error message.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Sequence

from .nodes import BinOp, Call, Expr, Neg, Num, Param, Pow, Var, format_number, to_string
from .parser import ExprError


class ExprDomainError(ExprError, ArithmeticError):
    def __init__(self, message: str, subexpr: Expr):
        super().__init__(f"{message}: {to_string(subexpr)}")
        self.subexpr = subexpr


def frac(x):
    """Fractional part x - floor(x); exact for Fraction and int input."""
    return x - math.floor(x)


def _call(func, x, node):
    if func == "exp":
        return math.exp(x)
    if func == "log":
        if x <= 0:
            raise ExprDomainError("log of nonpositive value", node)
        return math.log(x)
    if func == "sin":
        return math.sin(x)
    if func == "cos":
        return math.cos(x)
    if func == "sqrt":
        if x < 0:
            raise ExprDomainError("sqrt of negative value", node)
        return math.sqrt(x)
    if func == "abs":
        return abs(x)
    if func == "frac":
        return frac(x)
    raise ExprDomainError(f"unknown function {func}", node)


def evaluate(e: Expr, point: Sequence):
    """Evaluate `e` at `point` (indexed by variable position).

    Works on floats and on `fractions.Fraction` for exact rational paths,
    provided the tree contains no transcendental calls.
    """
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        return point[e.index]
    if isinstance(e, Param):
        return e.value
    if isinstance(e, Neg):
        return -evaluate(e.operand, point)
    if isinstance(e, BinOp):
        a = evaluate(e.left, point)
        b = evaluate(e.right, point)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if b == 0:
            raise ExprDomainError("division by zero", e)
        if isinstance(a, int) and isinstance(b, int):
            return a // b if a % b == 0 else a / b
        return a / b
    if isinstance(e, Pow):
        b = evaluate(e.base, point)
        if e.exponent < 0 and b == 0:
            raise ExprDomainError("division by zero", e)
        if e.exponent < 0 and isinstance(b, int):
            b = Fraction(b)
        return b ** e.exponent
    if isinstance(e, Call):
        return _call(e.func, evaluate(e.arg, point), e)
    raise TypeError(f"not an expression node: {e!r}")


def to_python(e: Expr, names: Sequence[str]) -> str:
    """Python source for `e`; variable k is spelled ``names[k]``."""
    if isinstance(e, Num):
        s = format_number(e.value)
        return f"({s})" if e.value < 0 else s
    if isinstance(e, Var):
        return names[e.index]
    if isinstance(e, Param):
        return f"({format_number(e.value)})"
    if isinstance(e, Neg):
        return f"(-{to_python(e.operand, names)})"
    if isinstance(e, BinOp):
        return f"({to_python(e.left, names)} {e.op} {to_python(e.right, names)})"
    if isinstance(e, Pow):
        return f"({to_python(e.base, names)} ** {e.exponent})"
    if isinstance(e, Call):
        return f"_{e.func}({to_python(e.arg, names)})"
    raise TypeError(f"not an expression node: {e!r}")


_NAMESPACE = {
    "_exp": math.exp,
    "_log": math.log,
    "_sin": math.sin,
    "_cos": math.cos,
    "_sqrt": math.sqrt,
    "_abs": abs,
    "_frac": frac,
}


def compile_source(source: str, fname: str) -> Callable:
    ns = dict(_NAMESPACE)
    exec(compile(source, f"<monochaos:{fname}>", "exec"), ns)
    return ns[fname]


def compile_exprs(exprs: Sequence[Expr], dim: int) -> Callable:
    """Compile a tuple of expressions into ``f(point) -> tuple``."""
    names = [f"v{k}" for k in range(dim)]
    unpack = ", ".join(names) + ("," if dim == 1 else "")
    body = ", ".join(to_python(e, names) for e in exprs) + ("," if len(exprs) == 1 else "")
    source = f"def _fast(x):\n    {unpack} = x\n    return ({body})\n"
    fast = compile_source(source, "_fast")
    exprs = tuple(exprs)

    def f(x):
        try:
            return fast(x)
        except (ZeroDivisionError, ValueError):
            for e in exprs:
                evaluate(e, x)
            raise

    f.source = source
    return f
