"""Model expression language: parsing, evaluation, derivatives, interval enclosures."""
from .diff import diff
from .evaluate import ExprDomainError, compile_exprs, evaluate
from .interval import Interval, IntervalBox, interval_eval
from .nodes import BinOp, Call, Expr, Neg, Num, Param, Pow, Var, free_variables, to_string
from .parser import ExprError, ExprSyntaxError, UnknownIdentifierError, parse
from .system import SystemDef, SystemDefError

__all__ = [
    "BinOp", "Call", "Expr", "ExprDomainError", "ExprError", "ExprSyntaxError",
    "Interval", "IntervalBox", "Neg", "Num", "Param", "Pow", "SystemDef",
    "SystemDefError", "UnknownIdentifierError", "Var", "compile_exprs", "diff",
    "evaluate", "free_variables", "interval_eval", "parse", "to_string",
]
