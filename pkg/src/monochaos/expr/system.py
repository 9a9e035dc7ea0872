from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Callable, Mapping, Sequence

from .diff import diff
from .evaluate import compile_exprs, compile_source, evaluate, to_python
from .nodes import Expr, free_names, to_string
from .parser import ExprError, parse

KINDS = ("discrete-map", "vector-field")


class SystemDefError(ExprError):
    pass


@dataclass(frozen=True, eq=False)
class SystemDef:
    """A named map or vector field on R^n given by one expression per coordinate."""

    name: str
    kind: str
    variables: tuple
    coords: tuple
    parameters: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SystemDefError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if not self.variables:
            raise SystemDefError("a system needs at least one variable")
        if len(self.coords) != len(self.variables):
            raise SystemDefError(
                f"{len(self.variables)} variables but {len(self.coords)} equations"
            )
        if len(set(self.variables)) != len(self.variables):
            raise SystemDefError("duplicate variable names")
        declared = set(self.variables) | set(self.parameters)
        for k, e in enumerate(self.coords):
            stray = free_names(e) - declared
            if stray:
                raise SystemDefError(f"equation {k} uses undeclared names {sorted(stray)}")

    @classmethod
    def from_strings(cls, name: str, kind: str, variables: Sequence[str],
                     equations: Sequence[str], parameters: Mapping[str, float] | None = None):
        parameters = dict(parameters or {})
        coords = tuple(parse(text, variables, parameters) for text in equations)
        return cls(name, kind, tuple(variables), coords, parameters)

    @classmethod
    def from_dict(cls, d: Mapping) -> "SystemDef":
        missing = [k for k in ("name", "kind", "variables", "equations") if k not in d]
        if missing:
            raise SystemDefError(f"system definition missing fields {missing}")
        return cls.from_strings(d["name"], d["kind"], d["variables"], d["equations"],
                                d.get("parameters", {}))

    @classmethod
    def load(cls, path) -> "SystemDef":
        with open(Path(path), encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "variables": list(self.variables),
            "parameters": dict(self.parameters),
            "equations": self.equations,
        }

    def dump(self, path) -> None:
        with open(Path(path), "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")

    @property
    def dimension(self) -> int:
        return len(self.variables)

    @property
    def equations(self) -> list:
        return [to_string(e) for e in self.coords]

    @property
    def is_map(self) -> bool:
        return self.kind == "discrete-map"

    def evaluate(self, point) -> tuple:
        return tuple(evaluate(e, point) for e in self.coords)

    @cached_property
    def function(self) -> Callable:
        """Compiled ``point -> tuple`` for T(x) or dx/dt."""
        return compile_exprs(self.coords, self.dimension)

    def __call__(self, point) -> tuple:
        return self.function(point)

    def partial(self, i: int, j: int) -> Expr:
        return self.jacobian[i][j]

    @cached_property
    def jacobian(self) -> tuple:
        return tuple(tuple(diff(e, v) for v in self.variables) for e in self.coords)

    @cached_property
    def rk4_step(self) -> Callable:
        """Compiled single classical RK4 step ``(x, h) -> x_next`` for a vector field."""
        n = self.dimension
        v = [f"v{k}" for k in range(n)]
        lines = ["def _rk4(x, h):"]
        lines.append(f"    {', '.join(f'a{k}' for k in range(n))}{',' if n == 1 else ''} = x")
        lines.append("    hh = 0.5 * h")

        def stage(tag, src, scale):
            out = []
            for k in range(n):
                if src is None:
                    out.append(f"    {v[k]} = a{k}")
                else:
                    out.append(f"    {v[k]} = a{k} + {scale} * {src}{k}")
            for k, e in enumerate(self.coords):
                out.append(f"    {tag}{k} = {to_python(e, v)}")
            return out

        lines += stage("p", None, None)
        lines += stage("q", "p", "hh")
        lines += stage("r", "q", "hh")
        lines += stage("s", "r", "h")
        parts = [f"a{k} + h * (p{k} + 2.0 * q{k} + 2.0 * r{k} + s{k}) / 6.0" for k in range(n)]
        lines.append(f"    return ({', '.join(parts)}{',' if n == 1 else ''})")
        return compile_source("\n".join(lines) + "\n", "_rk4")

    def __repr__(self):
        return f"SystemDef({self.name!r}, {self.kind!r}, {list(self.variables)}, {self.equations})"
