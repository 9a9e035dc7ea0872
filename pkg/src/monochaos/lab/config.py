"""Experiment configuration files (JSON, one experiment per file)."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from ..dynamics import builtin
from ..expr import ExprError, SystemDef

KINDS = ("simulate", "certify", "attract", "chaos", "sft", "theorem")
STOCHASTIC = ("certify", "attract", "chaos", "theorem")
POSITIVE_KEYS = ("h", "tau", "eps", "cluster_eps", "coarse_tol", "refine_tol", "set_tol",
                 "t_end", "max_time", "delta_threshold")


class ConfigError(ValueError):
    def __init__(self, fieldname: str, message: str):
        super().__init__(f"config field '{fieldname}': {message}")
        self.field = fieldname


@dataclass
class ExperimentConfig:
    kind: str
    params: dict
    seed: Optional[int] = None
    system: Any = None          # builtin name, inline definition, or {"file": path}
    graph: Any = None           # inline {vertices, edges} or {"file": path}
    base_dir: Path = field(default_factory=Path.cwd)

    @classmethod
    def from_dict(cls, d: dict, base_dir=None, seed_override: Optional[int] = None) -> "ExperimentConfig":
        if not isinstance(d, dict):
            raise ConfigError("<root>", "config must be a JSON object")
        kind = d.get("kind")
        if kind not in KINDS:
            raise ConfigError("kind", f"must be one of {', '.join(KINDS)}; got {kind!r}")
        seed = d.get("seed")
        if seed_override is not None:
            seed = seed_override
        if seed is not None and not isinstance(seed, int):
            raise ConfigError("seed", "must be an integer")
        params = {k: v for k, v in d.items() if k not in ("kind", "seed", "system", "graph")}
        cfg = cls(kind, params, seed, d.get("system"), d.get("graph"),
                  Path(base_dir) if base_dir else Path.cwd())
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path, seed_override: Optional[int] = None) -> "ExperimentConfig":
        path = Path(path)
        try:
            with open(path, encoding="utf-8") as fh:
                d = json.load(fh)
        except FileNotFoundError:
            raise ConfigError("--config", f"file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError("--config", f"invalid JSON: {exc}") from None
        return cls.from_dict(d, path.parent, seed_override)

    def validate(self) -> None:
        if self.kind in STOCHASTIC and self.seed is None:
            raise ConfigError("seed", f"a seed is required for '{self.kind}' experiments")
        for key, value in _walk(self.params):
            leaf = key.rsplit(".", 1)[-1]
            if leaf in POSITIVE_KEYS or leaf.endswith("_tol"):
                if not isinstance(value, (int, float)) or value <= 0:
                    raise ConfigError(key, "must be a positive number")
        if self.kind == "sft":
            if self.graph is None:
                raise ConfigError("graph", "sft experiments need a graph")
            self._resolve_file("graph", self.graph)
        elif self.kind == "theorem" and "sweep" in self.params:
            pass
        else:
            if self.system is None:
                raise ConfigError("system", f"'{self.kind}' experiments need a system")
            self._resolve_file("system", self.system)

    def _resolve_file(self, fieldname, ref):
        if isinstance(ref, dict) and "file" in ref:
            p = (self.base_dir / ref["file"]).resolve()
            if not p.exists():
                raise ConfigError(f"{fieldname}.file", f"file not found: {p}")
            return p
        return None

    def load_system(self) -> SystemDef:
        ref = self.system
        try:
            if isinstance(ref, str):
                return builtin(ref)
            if isinstance(ref, dict) and "file" in ref:
                return SystemDef.load(self._resolve_file("system", ref))
            if isinstance(ref, dict):
                return SystemDef.from_dict(ref)
        except KeyError as exc:
            raise ConfigError("system", str(exc)) from None
        except ExprError as exc:
            raise ConfigError("system", str(exc)) from None
        raise ConfigError("system", "must be a builtin name, an inline definition or {\"file\": path}")

    def load_graph_dict(self) -> dict:
        ref = self.graph
        if isinstance(ref, dict) and "file" in ref:
            with open(self._resolve_file("graph", ref), encoding="utf-8") as fh:
                ref = json.load(fh)
        if not (isinstance(ref, dict) and "vertices" in ref and "edges" in ref):
            raise ConfigError("graph", "needs 'vertices' and 'edges'")
        return ref

    def canonical(self) -> dict:
        """Everything that determines the result, with referenced files inlined."""
        d = {"kind": self.kind, "seed": self.seed, "params": self.params}
        if self.system is not None:
            d["system"] = self.load_system().to_dict() if not isinstance(self.system, str) else self.system
        if self.graph is not None:
            d["graph"] = self.load_graph_dict()
        return d

    def digest(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()

    def get(self, key, default=None):
        return self.params.get(key, default)


def _walk(d, prefix=""):
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            yield from _walk(v, key + ".")
        else:
            yield key, v
