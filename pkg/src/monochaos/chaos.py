"""Numerical chaos indicators for maps on R^n.

These are heuristics at a finite resolution. Devaney's conditions quantify over
all points and all open sets, so every verdict here is a sampled statistic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict
from typing import Callable, Optional, Sequence

import numpy as np

from .attract import OrbitDiverged, PeriodicOrbitEstimate, _apply
from .dynamics import DivergenceError, _diverged
from .expr import IntervalBox


def _dist(x, y) -> float:
    return math.sqrt(sum((a - b) ** 2 for a, b in zip(x, y)))


@dataclass
class SensitivityResult:
    delta_hat: float
    curves: list           # per-pair separation d(T^k x, T^k y), k = 0..horizon
    divergent_pairs: int

    def __float__(self):
        return self.delta_hat


def sensitivity_estimate(T: Callable, box: IntervalBox, eps: float, pairs: int, horizon: int,
                         seed: int = 42, starts: Optional[Sequence] = None) -> SensitivityResult:
    """Min over sampled pairs of the max separation reached within `horizon` steps.

    Each partner sits at distance exactly eps from its base point in a random
    direction. Bases are uniform in `box` unless `starts` supplies candidates
    (e.g. an attractor cloud), in which case they are drawn from those.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    rng = np.random.default_rng(seed)
    n = box.dim
    if starts is not None:
        starts = np.asarray(starts, dtype=float)
        bases = starts[rng.integers(0, len(starts), size=pairs)]
    else:
        bases = box.sample(rng, pairs)
    dirs = rng.normal(size=(pairs, n))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    best = math.inf
    curves = []
    divergent = 0
    for b, u in zip(bases, dirs):
        x = tuple(float(v) for v in b)
        y = tuple(float(v) for v in b + eps * u)
        curve = [_dist(x, y)]
        try:
            for _ in range(horizon):
                x, y = _apply(T, x), _apply(T, y)
                curve.append(_dist(x, y))
        except (OrbitDiverged, DivergenceError):
            divergent += 1
            continue
        curves.append(curve)
        best = min(best, max(curve))
    return SensitivityResult(best, curves, divergent)


@dataclass
class LyapunovResult:
    lambda1: float
    stderr: float
    renormalisations: int
    rerandomised: int
    blocks: list = field(default_factory=list)

    def __iter__(self):
        return iter((self.lambda1, self.stderr))


def lyapunov_benettin(system, x0, steps: int, renorm_every: int = 1, h: Optional[float] = None,
                      seed: int = 42, gap: float = 1e-9, transient: int = 0) -> LyapunovResult:
    """Largest Lyapunov exponent by the two-trajectory renormalisation method.

    `system` is a map ``x -> T(x)``; for a flow pass the vector field SystemDef
    and the step `h` (then each step is one RK4 step and time is steps*h).
    The standard error comes from 10 equal blocks.
    """
    if steps < 1000:
        raise ValueError("steps must be at least 1000")
    if h is None and getattr(system, "kind", None) == "vector-field":
        raise ValueError("a vector field needs the integration step h")
    if h is not None:
        advance = system.rk4_step

        def T(x):
            y = advance(x, h)
            if _diverged(y):
                raise OrbitDiverged("flow diverged")
            return y
        dt = h
    else:
        T = system.function if hasattr(system, "function") else system
        dt = 1.0
    rng = np.random.default_rng(seed)
    x = tuple(float(v) for v in x0)
    for _ in range(transient):
        x = _apply(T, x)
    n = len(x)

    def offset(base):
        u = rng.normal(size=n)
        u *= gap / np.linalg.norm(u)
        return tuple(float(a + b) for a, b in zip(base, u))

    y = offset(x)
    nblocks = 10
    block_len = steps // nblocks
    sums = [0.0] * nblocks
    times = [0.0] * nblocks
    renorms = rerandom = 0
    since = 0
    d0 = _dist(x, y)
    for k in range(block_len * nblocks):
        x = _apply(T, x)
        y = _apply(T, y)
        since += 1
        if since == renorm_every:
            blk = k // block_len
            d = _dist(x, y)
            if d < 1e-15:
                rerandom += 1
                times[blk] += since * dt
                y = offset(x)
                d0 = _dist(x, y)
            else:
                sums[blk] += math.log(d / d0)
                times[blk] += since * dt
                y = tuple(a + (b - a) * (gap / d) for a, b in zip(x, y))
                d0 = _dist(x, y)
                renorms += 1
            since = 0
    blocks = [s / t for s, t in zip(sums, times) if t > 0]
    lam = sum(sums) / sum(times)
    stderr = float(np.std(blocks, ddof=1) / math.sqrt(len(blocks))) if len(blocks) > 1 else math.inf
    return LyapunovResult(lam, stderr, renorms, rerandom, blocks)


def _bin_index(pts: np.ndarray, box: IntervalBox, bins: int) -> np.ndarray:
    lo, hi = box.lo, box.hi
    span = np.where(hi > lo, hi - lo, 1.0)
    idx = np.floor((pts - lo) / span * bins).astype(int)
    return np.clip(idx, 0, bins - 1)


def visited_bins(points, box: IntervalBox, bins_per_axis: int) -> set:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    return set(map(tuple, _bin_index(pts, box, bins_per_axis)))


def _orbit_points(T, x0, steps):
    x = tuple(float(v) for v in x0)
    pts = [x]
    for _ in range(steps):
        try:
            x = _apply(T, x)
        except OrbitDiverged:
            break
        pts.append(x)
    return np.array(pts, dtype=float)


def reference_bins(T: Callable, box: IntervalBox, steps: int, bins_per_axis: int,
                   orbits: int = 4, seed: int = 42) -> set:
    """Bins visited by a seeded ensemble of orbits started uniformly in the box."""
    rng = np.random.default_rng(seed)
    out = set()
    each = max(1, steps // orbits)
    for x0 in box.sample(rng, orbits):
        out |= visited_bins(_orbit_points(T, x0, each), box, bins_per_axis)
    return out


def transitivity_coverage(T: Callable, box: IntervalBox, x0, steps: int, bins_per_axis: int,
                          reference: Optional[set] = None, seed: int = 42) -> float:
    """Fraction of the orbit's reachable bins that the single orbit of x0 visits.

    The denominator is the set of bins visited by the orbit or by a reference
    ensemble, restricted to the orbit's bounding region, so attractors filling a
    thin slab of the box are not penalised for the empty rest.
    """
    if bins_per_axis < 2:
        raise ValueError("bins_per_axis must be at least 2")
    pts = _orbit_points(T, x0, steps)
    own = visited_bins(pts, box, bins_per_axis)
    if reference is None:
        reference = reference_bins(T, box, steps, bins_per_axis, seed=seed)
    idx = np.array(sorted(own))
    lo, hi = idx.min(axis=0), idx.max(axis=0)
    region = {b for b in reference if all(l <= c <= u for c, l, u in zip(b, lo, hi))}
    return len(own) / len(own | region)


def periodic_density_gap(T: Callable, box: IntervalBox, found_orbits: Sequence, bins_per_axis: int,
                         cloud=None, steps: int = 10000, seed: int = 42) -> float:
    """Largest distance from an occupied bin centre to the nearest known periodic point.

    Occupied bins come from `cloud` when given, otherwise from a reference
    ensemble as in transitivity_coverage.
    """
    if not found_orbits:
        raise ValueError("found_orbits must be nonempty")
    if cloud is not None:
        occupied = visited_bins(cloud, box, bins_per_axis)
    else:
        occupied = reference_bins(T, box, steps, bins_per_axis, seed=seed)
    pts = []
    for o in found_orbits:
        pts.extend(o.points if isinstance(o, PeriodicOrbitEstimate) else [o])
    P = np.array(pts, dtype=float)
    lo, hi = box.lo, box.hi
    width = (hi - lo) / bins_per_axis
    gap = 0.0
    for b in occupied:
        c = lo + (np.array(b) + 0.5) * width
        gap = max(gap, float(np.sqrt(np.min(np.sum((P - c) ** 2, axis=1)))))
    return gap


def return_map_thickness(values: Sequence[float], bins: int = 30, min_points: int = 1) -> dict:
    """Vertical thickness of the successive-value graph (v_n, v_{n+1}).

    The pairs are split into the two monotone branches either side of the
    peak; within a branch each point's thickness is its vertical distance from
    the chord through its two neighbours in v_n order. Per bin of v_n the
    thickness is the largest such distance. Also reports the fraction of bins
    the sequence occupies.
    """
    v = np.asarray(values, dtype=float)
    a, b = v[:-1], v[1:]
    peak = a[np.argmax(b)]
    res = np.full(len(a), np.nan)
    for branch in (a <= peak, a > peak):
        ii = np.where(branch)[0]
        order = ii[np.argsort(a[ii], kind="stable")]
        xa, xb = a[order], b[order]
        for j in range(1, len(order) - 1):
            span = xa[j + 1] - xa[j - 1]
            w = (xa[j] - xa[j - 1]) / span if span > 0 else 0.5
            res[order[j]] = abs(xb[j] - ((1 - w) * xb[j - 1] + w * xb[j + 1]))
    edges = np.linspace(a.min(), a.max(), bins + 1)
    idx = np.clip(np.digitize(a, edges) - 1, 0, bins - 1)
    per_bin = []
    for k in range(bins):
        r = res[idx == k]
        r = r[np.isfinite(r)]
        per_bin.append(float(r.max()) if len(r) >= min_points else None)
    measured = [t for t in per_bin if t is not None]
    return {
        "bins": bins,
        "measured_bins": len(measured),
        "max_thickness": max(measured) if measured else math.nan,
        "per_bin": per_bin,
        "occupied_fraction": len(set(idx.tolist())) / bins,
        "peak": float(peak),
    }


@dataclass
class ChaosReport:
    sensitivity_delta_hat: float
    lyapunov_1: float
    lyapunov_stderr: float
    transitivity_coverage: float
    periodic_density_gap: float
    flags: dict
    notes: dict

    def to_dict(self) -> dict:
        return asdict(self)


def chaos_report(T: Callable, box: IntervalBox, x0, *, eps: float = 1e-8, pairs: int = 20,
                 horizon: int = 50, lyap_steps: int = 10000, bins_per_axis: int = 20,
                 coverage_steps: int = 20000, max_period: int = 8, seed: int = 42,
                 starts=None, lyap_system=None, lyap_h=None, delta_threshold: float = None,
                 periodic_seeds: int = 100, periodic_scan: int = 20):
    """Assemble the heuristic Devaney indicators for T on `box`."""
    from .attract import find_periodic_orbit

    sens = sensitivity_estimate(T, box, eps, pairs, horizon, seed=seed, starts=starts)
    lyap = lyapunov_benettin(lyap_system if lyap_system is not None else T, x0, lyap_steps,
                             h=lyap_h, seed=seed)
    cov = transitivity_coverage(T, box, x0, coverage_steps, bins_per_axis, seed=seed)
    orbit = _orbit_points(T, x0, coverage_steps)
    found = []
    rng = np.random.default_rng(seed)
    for i in rng.choice(len(orbit), size=min(periodic_seeds, len(orbit)), replace=False):
        po = find_periodic_orbit(T, tuple(orbit[i]), max_period, 1e-2, 1e-9, scan_steps=periodic_scan)
        if po.found:
            found.append(po)
    bin_diag = float(np.linalg.norm((box.hi - box.lo) / bins_per_axis))
    # with no orbit found the gap is capped at the box diagonal, keeping the report finite
    box_diag = float(np.linalg.norm(box.hi - box.lo))
    gap = min(periodic_density_gap(T, box, found, bins_per_axis, cloud=orbit), box_diag) if found else box_diag
    if delta_threshold is None:
        delta_threshold = 10 * eps
    flags = {
        "sensitive": bool(sens.delta_hat >= delta_threshold and lyap.lambda1 > 2 * lyap.stderr),
        "transitive": bool(cov >= 0.9),
        "dense_periodic": bool(gap <= 2 * bin_diag),
        "nondiscrete": bool(len(visited_bins(orbit, box, bins_per_axis)) > 1),
    }
    notes = {
        "sensitive": "min over sampled pairs of max separation; heuristic, not a universal bound",
        "transitive": "single-orbit bin coverage relative to a reference ensemble",
        "dense_periodic": (f"{len(found)} periodic orbits found from orbit samples (period <= {max_period})"
                           + ("" if found else "; gap set to the box diagonal")),
        "nondiscrete": "orbit occupies more than one bin",
    }
    return ChaosReport(sens.delta_hat, lyap.lambda1, lyap.stderr, cov, gap, flags, notes)
