"""Attracting sets, periodic orbits and basins of maps on R^n.

Distances are Euclidean; the distance from a point to a cloud is the minimum
over cloud points.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree
from scipy.sparse import coo_matrix

from .dynamics import DivergenceError, _diverged
from .expr import IntervalBox

ATTRACTED, NOT_ATTRACTED, DIVERGENT = 1, 0, -1


class OrbitDiverged(DivergenceError):
    pass


def _apply(T, x):
    try:
        y = tuple(T(x))
    except OverflowError:
        raise OrbitDiverged("overflow while iterating") from None
    if _diverged(y):
        raise OrbitDiverged("orbit left the divergence threshold")
    return y


def dist_to_cloud(x, cloud: np.ndarray) -> float:
    d = cloud - np.asarray(x, dtype=float)
    return float(np.sqrt(np.min(np.einsum("ij,ij->i", d, d))))


def eps_glue(points: np.ndarray, eps: float) -> list:
    """Single-linkage clusters: points closer than eps end up together.

    Returns a list of index arrays ordered by first occurrence.
    """
    m = len(points)
    if m == 1:
        return [np.array([0])]
    pairs = cKDTree(points).query_pairs(eps, output_type="ndarray")
    graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(m, m))
    _, labels = connected_components(graph, directed=False)
    order = []
    seen = {}
    for i, lab in enumerate(labels):
        if lab not in seen:
            seen[lab] = len(order)
            order.append([])
        order[seen[lab]].append(i)
    return [np.array(ix) for ix in order]


@dataclass
class AttractingSetEstimate:
    points: np.ndarray
    W: IntervalBox
    cluster_eps: float
    transient: int = 0
    clusters: list = field(default_factory=list)
    diameter: float = 0.0
    invariance_residual: float = 0.0

    @classmethod
    def from_points(cls, points, cluster_eps: float, W: Optional[IntervalBox] = None,
                    pad: float = 0.1) -> "AttractingSetEstimate":
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if W is None:
            W = inflate_bbox(pts, pad, cluster_eps)
        clusters = [_centre(pts[ix]) for ix in eps_glue(pts, cluster_eps)]
        return cls(pts, W, cluster_eps, 0, clusters, _diameter(pts))

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def distance(self, x) -> float:
        return dist_to_cloud(x, self.points)

    def to_dict(self) -> dict:
        return {
            "n_points": int(len(self.points)),
            "clusters": [list(map(float, c)) for c in self.clusters],
            "W": self.W.to_list(),
            "cluster_eps": self.cluster_eps,
            "transient": self.transient,
            "diameter": self.diameter,
            "invariance_residual": self.invariance_residual,
        }


def _centre(pts: np.ndarray) -> tuple:
    # correctly rounded mean, so a cluster of identical points is that point
    return tuple(math.fsum(col) / len(col) for col in pts.T.tolist())


def _diameter(pts: np.ndarray) -> float:
    if len(pts) < 2:
        return 0.0
    if len(pts) > 2000:
        pts = pts[np.linspace(0, len(pts) - 1, 2000).astype(int)]
    from scipy.spatial.distance import pdist
    return float(pdist(pts).max())


def inflate_bbox(pts: np.ndarray, pad: float, floor_eps: float) -> IntervalBox:
    """Bounding box grown by `pad` of its width on each side.

    Degenerate axes (a point cloud) are grown by `pad` of the coordinate's
    magnitude instead, never less than 10*floor_eps.
    """
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    width = hi - lo
    centre = 0.5 * (lo + hi)
    half = pad * np.maximum.reduce([width, np.abs(centre) * (width == 0), np.full_like(width, 10 * floor_eps)])
    return IntervalBox(list(zip(lo - half, hi + half)))


def omega_limit(T: Callable, x0, transient: int, tail: int, cluster_eps: float) -> AttractingSetEstimate:
    """Tail cloud of the orbit of x0 after `transient` steps, glued into eps-clusters."""
    if tail < 1:
        raise ValueError("tail must be at least 1")
    x = tuple(x0)
    for _ in range(transient):
        x = _apply(T, x)
    cloud = [x]
    for _ in range(tail - 1):
        x = _apply(T, x)
        cloud.append(x)
    pts = np.array(cloud, dtype=float)
    A = AttractingSetEstimate.from_points(pts, cluster_eps)
    A.transient = transient
    # T of the cloud lands back near the cloud: check on every point
    A.invariance_residual = max(dist_to_cloud(_apply(T, tuple(p)), pts) for p in cloud)
    return A


@dataclass
class PeriodicOrbitEstimate:
    period: int
    points: list
    residual: float
    tolerance: float
    status: str = "refined"     # refined | unrefined | not-found
    newton_steps: int = 0

    @property
    def found(self) -> bool:
        return self.status != "not-found"

    def recompute_residual(self, T: Callable) -> float:
        return orbit_residual(T, self.points)

    def to_dict(self) -> dict:
        return {
            "period": self.period,
            "points": [[float(v) for v in p] for p in self.points],
            "residual": float(self.residual),
            "tolerance": self.tolerance,
            "status": self.status,
            "newton_steps": self.newton_steps,
        }


def _d(x, y) -> float:
    return math.sqrt(sum(float(a - b) ** 2 for a, b in zip(x, y)))


def orbit_residual(T: Callable, points: Sequence) -> float:
    p = len(points)
    return max(_d(T(points[i]), points[(i + 1) % p]) for i in range(p))


def _iterate_n(T, x, n):
    for _ in range(n):
        x = _apply(T, x)
    return x


def _fd_jacobian(F, x: np.ndarray, step: float) -> np.ndarray:
    f0 = F(x)
    J = np.empty((len(f0), len(x)))
    for j in range(len(x)):
        xp = x.copy()
        hj = step * max(1.0, abs(x[j]))
        xp[j] += hj
        J[:, j] = (F(xp) - f0) / hj
    return J


def _newton(T, x0, p, refine_tol, max_steps=50, fd_step=1e-6):
    """Damped Newton on F(x) = T^p(x) - x. Returns (x, |F|, steps)."""
    def F(x):
        return np.array(_iterate_n(T, tuple(float(v) for v in x), p)) - x

    x = np.array(x0, dtype=float)
    fx = F(x)
    r = float(np.linalg.norm(fx))
    for k in range(max_steps):
        if r <= refine_tol:
            return x, r, k
        J = _fd_jacobian(F, x, fd_step)
        try:
            dx = np.linalg.lstsq(J, -fx, rcond=None)[0]
        except np.linalg.LinAlgError:
            return x, r, k
        lam = 1.0
        while lam > 1e-6:
            xn = x + lam * dx
            try:
                fn = F(xn)
            except OrbitDiverged:
                fn = None
            if fn is not None and np.linalg.norm(fn) < r:
                break
            lam *= 0.5
        else:
            return x, r, k
        x, fx, r = xn, fn, float(np.linalg.norm(fn))
    return x, r, max_steps


def _cycle(T, x, p):
    pts = [x]
    for _ in range(p - 1):
        pts.append(_apply(T, pts[-1]))
    return pts


def find_periodic_orbit(T: Callable, seed_point, max_period: int, coarse_tol: float,
                        refine_tol: float, scan_steps: int = 2000) -> PeriodicOrbitEstimate:
    """Scan the orbit of seed_point for the first near-recurrence, then Newton-refine.

    The period is the smallest p <= max_period with d(T^p x, x) < coarse_tol
    at the earliest orbit point x that has one; it is then collapsed to its
    smallest divisor whose cycle residual also meets refine_tol.
    """
    if max_period < 1:
        raise ValueError("max_period must be at least 1")
    x = tuple(seed_point)
    hit = None
    for _ in range(scan_steps):
        y = x
        for p in range(1, max_period + 1):
            y = _apply(T, y)
            if _d(y, x) < coarse_tol:
                hit = (x, p)
                break
        if hit:
            break
        x = _apply(T, x)
    if hit is None:
        return PeriodicOrbitEstimate(0, [], math.inf, coarse_tol, "not-found")
    x, p = hit
    steps = 0
    exact = any(isinstance(v, Fraction) for v in x)
    res = orbit_residual(T, _cycle(T, x, p))
    if res > refine_tol and not exact:
        xr, _, steps = _newton(T, x, p, refine_tol)
        xr = tuple(float(v) for v in xr)
        res_r = orbit_residual(T, _cycle(T, xr, p))
        if res_r < res:
            x, res = xr, res_r
    for q in range(1, p):
        if p % q == 0:
            rq = orbit_residual(T, _cycle(T, x, q))
            if rq <= refine_tol:
                p, res = q, rq
                break
    points = _cycle(T, x, p)
    res = orbit_residual(T, points)
    if res <= refine_tol:
        return PeriodicOrbitEstimate(p, points, res, refine_tol, "refined", steps)
    return PeriodicOrbitEstimate(p, points, res, max(coarse_tol, res), "unrefined", steps)


@dataclass
class AttractionReport:
    attracts_fraction: float
    uniform_bound_curve: list
    forward_invariance_fraction: float
    divergent: int
    probes: int

    def to_dict(self) -> dict:
        return {
            "attracts_fraction": self.attracts_fraction,
            "uniform_bound_curve": [float(v) for v in self.uniform_bound_curve],
            "forward_invariance_fraction": self.forward_invariance_fraction,
            "divergent": self.divergent,
            "probes": self.probes,
        }


def check_attracting(T: Callable, A: AttractingSetEstimate, probes: int, steps: int,
                     seed: int = 42) -> AttractionReport:
    """Probe W at random; record dist(T^k x, A) for k = 0..steps.

    The uniform bound curve is the sup over probes at each k. The fraction of
    probes with T(x) in W is reported as a sampled proxy for TW within W.
    """
    if probes < 1:
        raise ValueError("probes must be at least 1")
    rng = np.random.default_rng(seed)
    starts = A.W.sample(rng, probes)
    curves = np.full((probes, steps + 1), np.inf)
    attracted = invariant = divergent = 0
    for i, x0 in enumerate(starts):
        x = tuple(float(v) for v in x0)
        curves[i, 0] = A.distance(x)
        ok = True
        for k in range(1, steps + 1):
            try:
                x = _apply(T, x)
            except OrbitDiverged:
                ok = False
                divergent += 1
                break
            if k == 1 and A.W.contains(x):
                invariant += 1
            curves[i, k] = A.distance(x)
        if ok and curves[i, steps] < A.cluster_eps:
            attracted += 1
    return AttractionReport(attracted / probes, list(curves.max(axis=0)), invariant / probes,
                            divergent, probes)


def basin_sample(T: Callable, A: AttractingSetEstimate, box: IntervalBox, grid: int,
                 steps: int) -> np.ndarray:
    """Label a grid over `box`: 1 attracted, 0 not attracted, -1 divergent.

    Axis k of the result indexes coordinate k.
    """
    if grid < 2:
        raise ValueError("grid must be at least 2")
    axes = [np.linspace(iv.lo, iv.hi, grid) for iv in box]
    labels = np.zeros((grid,) * box.dim, dtype=int)
    for idx in np.ndindex(*labels.shape):
        x = tuple(float(axes[k][i]) for k, i in enumerate(idx))
        try:
            x = _iterate_n(T, x, steps)
        except OrbitDiverged:
            labels[idx] = DIVERGENT
            continue
        labels[idx] = ATTRACTED if A.distance(x) < A.cluster_eps else NOT_ATTRACTED
    return labels


def basin_to_csv(labels: np.ndarray, path) -> None:
    """2-D grids as a label matrix; higher dimensions flattened to one row per leading index."""
    mat = labels.reshape(labels.shape[0], -1) if labels.ndim > 1 else labels.reshape(1, -1)
    with open(path, "w") as fh:
        for row in mat:
            fh.write(",".join(str(int(v)) for v in row) + "\n")
