"""Orbits of maps and flows: iteration, fixed-step RK4, time-tau maps, section returns."""
from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass
from typing import Callable, Iterator, Optional, Sequence, Union

from .expr import SystemDef

DIVERGENCE_THRESHOLD = 1e12
SECTION_TOL = 1e-10


class DivergenceError(ArithmeticError):
    pass


class SectionTimeout(RuntimeError):
    pass


@dataclass
class Orbit:
    system: str
    times: list
    states: list
    h: Optional[float] = None
    divergent: bool = False

    def __len__(self):
        return len(self.states)

    @property
    def final(self) -> tuple:
        return self.states[-1]

    def to_csv(self, path_or_file) -> None:
        """Header ``t,x1,...,xn``; 17 significant digits throughout."""
        n = len(self.states[0]) if self.states else 0
        own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
        fh = open(path_or_file, "w", newline="") if own else path_or_file
        try:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t"] + [f"x{k + 1}" for k in range(n)])
            for t, s in zip(self.times, self.states):
                w.writerow([fmt17(t)] + [fmt17(v) for v in s])
        finally:
            if own:
                fh.close()


def fmt17(v) -> str:
    return format(float(v), ".17g")


def _diverged(x) -> bool:
    for v in x:
        if not abs(v) <= DIVERGENCE_THRESHOLD:  # also catches nan
            return True
    return False


def _as_map(system) -> Callable:
    if isinstance(system, SystemDef):
        if not system.is_map:
            raise ValueError(f"{system.name} is a vector field; use time_t_map or integrate_rk4")
        return system.function
    return system


def _name(system) -> str:
    return system.name if isinstance(system, SystemDef) else getattr(system, "__name__", "map")


def iterate(system: Union[SystemDef, Callable], x0: Sequence, n: int) -> Orbit:
    """States [x0, T x0, ..., T^n x0]; truncated and flagged if the orbit diverges."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    T = _as_map(system)
    x = tuple(x0)
    states = [x]
    divergent = False
    for _ in range(n):
        try:
            x = tuple(T(x))
        except (OverflowError, DivergenceError):
            divergent = True
            break
        if _diverged(x):
            divergent = True
            break
        states.append(x)
    return Orbit(_name(system), list(range(len(states))), states, None, divergent)


def _require_field(system: SystemDef):
    if not isinstance(system, SystemDef) or system.is_map:
        raise ValueError("a vector-field SystemDef is required")


def integrate_rk4(system: SystemDef, x0: Sequence[float], h: float, t_end: float,
                  sample_every: int = 1) -> Orbit:
    """Classical fixed-step RK4 from t=0 to t_end; the last step is shortened to land on t_end."""
    _require_field(system)
    if h <= 0 or t_end <= 0:
        raise ValueError("h and t_end must be positive")
    step = system.rk4_step
    n_full = int(math.floor(t_end / h * (1 + 1e-12)))
    rest = t_end - n_full * h
    if rest <= 1e-12 * t_end:
        rest = 0.0
    x = tuple(float(v) for v in x0)
    times, states = [0.0], [x]
    divergent = False
    for k in range(1, n_full + 1):
        try:
            x = step(x, h)
        except OverflowError:
            divergent = True
            break
        if _diverged(x):
            divergent = True
            break
        if k % sample_every == 0 or (k == n_full and rest == 0.0):
            times.append(k * h)
            states.append(x)
    else:
        if rest > 0.0:
            try:
                x = step(x, rest)
                if _diverged(x):
                    divergent = True
                else:
                    times.append(t_end)
                    states.append(x)
            except OverflowError:
                divergent = True
    return Orbit(system.name, times, states, h, divergent)


def advance(system: SystemDef, x, h: float, t: float) -> tuple:
    """State after integrating for time t, without storing the trajectory."""
    step = system.rk4_step
    n_full = int(math.floor(t / h * (1 + 1e-12)))
    rest = t - n_full * h
    x = tuple(float(v) for v in x)
    try:
        for _ in range(n_full):
            x = step(x, h)
        if rest > 1e-12 * t:
            x = step(x, rest)
    except OverflowError:
        raise DivergenceError(f"{system.name}: overflow during integration") from None
    if _diverged(x):
        raise DivergenceError(f"{system.name}: state left |x| <= {DIVERGENCE_THRESHOLD:g}")
    return x


def time_t_map(system: SystemDef, tau: float, h: float) -> Callable:
    """The flow map x -> phi_tau(x) realised by RK4 with step h."""
    _require_field(system)
    if tau <= 0 or h <= 0:
        raise ValueError("tau and h must be positive")

    def phi(x):
        return advance(system, x, h, tau)

    phi.__name__ = f"{system.name}@tau={tau:g}"
    phi.system = system
    phi.tau = tau
    phi.h = h
    return phi


@dataclass(frozen=True)
class SectionSpec:
    """Crossing of level c by coordinate k, or by its rate dx_k/dt when `rate` is set."""

    coordinate: int
    level: float = 0.0
    direction: str = "increasing"
    rate: bool = False

    def __post_init__(self):
        if self.direction not in ("increasing", "decreasing"):
            raise ValueError("direction must be 'increasing' or 'decreasing'")
        if self.coordinate < 0:
            raise ValueError("coordinate index must be nonnegative")

    def function(self, system: SystemDef) -> Callable:
        k = self.coordinate
        if k >= system.dimension:
            raise ValueError(f"section coordinate {k} out of range for dimension {system.dimension}")
        if self.rate:
            f = system.function
            return lambda x: f(x)[k]
        return lambda x: x[k]

    def to_dict(self) -> dict:
        return {"coordinate": self.coordinate, "level": self.level,
                "direction": self.direction, "rate": self.rate}


def section_crossings(system: SystemDef, section: SectionSpec, x0, h: float,
                      t_max: float, t_min: float = 0.0) -> Iterator[tuple]:
    """Yield (point, time) for each crossing in (t_min, t_max], localised to 1e-10."""
    _require_field(system)
    step = system.rk4_step
    g = section.function(system)
    c = section.level
    up = section.direction == "increasing"
    x = tuple(float(v) for v in x0)
    gx = g(x) - c
    n = int(math.ceil(t_max / h))
    for k in range(n):
        y = step(x, h)
        if _diverged(y):
            raise DivergenceError(f"{system.name}: orbit diverged before reaching the section")
        gy = g(y) - c
        crossed = (gx < 0.0 <= gy) if up else (gx > 0.0 >= gy)
        if crossed and (k + 1) * h > t_min:
            p, s = _localise(step, g, c, x, gx, y, gy, h)
            yield p, k * h + s
        x, gx = y, gy


def _localise(step, g, c, x, gx, y, gy, h):
    a, b = 0.0, h
    best = (y, h, abs(gy))
    for _ in range(200):
        m = 0.5 * (a + b)
        p = step(x, m)
        gp = g(p) - c
        if abs(gp) < best[2]:
            best = (p, m, abs(gp))
        if abs(gp) <= SECTION_TOL:
            return p, m
        if (gp < 0.0) == (gx < 0.0):
            a = m
        else:
            b = m
        if b - a <= 0.0:
            break
    return best[0], best[1]


def poincare_map(system: SystemDef, section: SectionSpec, x0, h: float, max_time: float):
    """First crossing of `section` after t=0 as (return_point, return_time)."""
    for p, t in section_crossings(system, section, x0, h, max_time):
        return p, t
    raise SectionTimeout(f"no crossing of the section within t={max_time:g}")


_LORENZ_RHS = {
    "lorenz-classical": ["10*(y - x)", "28*x - y - x*z", "x*y - (8/3)*z"],
    "lorenz-paper-literal": ["10*(y - z)", "28*x - y - x*z", "x*y - (8/3)*z"],
}

BUILTIN_NAMES = ("lorenz-classical", "lorenz-paper-literal", "logistic(r)", "tent", "doubling",
                 "rotation(alpha)", "coop-lv-2d", "identity(n)")


def builtin(name: str) -> SystemDef:
    """Look up a built-in system, e.g. ``"lorenz-classical"``, ``"logistic(3.2)"``, ``"identity(3)"``."""
    m = re.fullmatch(r"\s*([a-z0-9-]+)\s*(?:\(\s*([^)]*)\s*\))?\s*", name)
    if m is None:
        raise KeyError(f"unknown builtin system {name!r}")
    base, arg = m.group(1), m.group(2)
    if base in _LORENZ_RHS and arg is None:
        return SystemDef.from_strings(base, "vector-field", ["x", "y", "z"], _LORENZ_RHS[base])
    if base == "logistic":
        r = float(arg) if arg else 4.0
        return SystemDef.from_strings(f"logistic({r:g})", "discrete-map", ["x"], ["r*x*(1 - x)"], {"r": r})
    if base == "tent" and arg is None:
        return SystemDef.from_strings("tent", "discrete-map", ["x"], ["1 - abs(2*x - 1)"])
    if base == "doubling" and arg is None:
        return SystemDef.from_strings("doubling", "discrete-map", ["x"], ["frac(2*x)"])
    if base == "rotation":
        alpha = float(arg) if arg else (math.sqrt(5.0) - 1.0) / 2.0
        return SystemDef.from_strings(f"rotation({alpha!r})", "discrete-map", ["x"],
                                      ["frac(x + alpha)"], {"alpha": alpha})
    if base == "coop-lv-2d" and arg is None:
        return SystemDef.from_strings("coop-lv-2d", "vector-field", ["x", "y"],
                                      ["x*(1 - x + 0.5*y)", "y*(1 - y + 0.5*x)"])
    if base == "identity":
        n = int(arg) if arg else 1
        if n < 1:
            raise KeyError("identity dimension must be positive")
        names = [f"x{k + 1}" for k in range(n)]
        return SystemDef.from_strings(f"identity({n})", "discrete-map", names, names)
    raise KeyError(f"unknown builtin system {name!r}; known: {', '.join(BUILTIN_NAMES)}")
