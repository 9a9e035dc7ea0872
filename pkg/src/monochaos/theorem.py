"""Empirical signature of the no-chaos theorem for monotone maps.

Pipeline per system: certify monotonicity (or cooperativity of a field, then
use its time-1 map), estimate the attracting set from an orbit tail, probe its
attraction, and look for a periodic orbit that the attracting set collapses to.
A certified, fully attracting set with no periodic orbit found is reported as
a violation candidate: numerics are fallible, the theorem is not.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .attract import (OrbitDiverged, check_attracting, find_periodic_orbit, omega_limit)
from .dynamics import DivergenceError, time_t_map
from .expr import IntervalBox, SystemDef
from .monocert import verify_cooperative_field, verify_monotone_map

CONSISTENT = "consistent-with-theorem"
VIOLATION = "violation-candidate"
INCONCLUSIVE = "inconclusive"


@dataclass
class TheoremSettings:
    tau: float = 1.0
    h: float = 0.02
    depth_limit: int = 4
    transient: int = 200
    tail: int = 20
    cluster_eps: float = 1e-4
    probes: int = 8
    steps: int = 60
    max_period: int = 8
    coarse_tol: float = 1e-3
    refine_tol: float = 1e-9
    set_tol: float = 1e-4
    seed: int = 42


@dataclass
class TheoremReport:
    system: str
    certificate: dict
    attracting_set: Optional[dict]
    attraction: Optional[dict]
    periodic_orbit: Optional[dict]
    set_to_orbit_distance: Optional[float]
    verdict: str
    reasons: list = field(default_factory=list)
    divergent: bool = False

    def to_dict(self) -> dict:
        return {
            "system": self.system,
            "certificate": self.certificate,
            "attracting_set": self.attracting_set,
            "attraction": self.attraction,
            "periodic_orbit": self.periodic_orbit,
            "set_to_orbit_distance": self.set_to_orbit_distance,
            "verdict": self.verdict,
            "reasons": list(self.reasons),
            "divergent": self.divergent,
        }


def hausdorff(a, b) -> float:
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    d = np.sqrt(((a[:, None, :] - b[None, :, :]) ** 2).sum(axis=2))
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def run_theorem(sys: SystemDef, box: IntervalBox, x0, settings: TheoremSettings = None) -> TheoremReport:
    s = settings or TheoremSettings()
    if sys.is_map:
        cert = verify_monotone_map(sys, box, s.depth_limit)
        T = sys.function
    else:
        cert = verify_cooperative_field(sys, box, s.depth_limit)
        T = time_t_map(sys, s.tau, s.h)
    report = TheoremReport(sys.name, cert.to_dict(), None, None, None, None, INCONCLUSIVE)
    if cert.verdict != "certified":
        report.reasons.append(f"monotonicity {cert.verdict}; the theorem does not apply")
        return report
    try:
        A = omega_limit(T, x0, s.transient, s.tail, s.cluster_eps)
        att = check_attracting(T, A, s.probes, s.steps, s.seed)
        po = find_periodic_orbit(T, tuple(A.points[-1]), s.max_period, s.coarse_tol, s.refine_tol)
    except (OrbitDiverged, DivergenceError) as exc:
        report.divergent = True
        report.reasons.append(f"orbit diverged: {exc}")
        return report
    report.attracting_set = A.to_dict()
    report.attraction = att.to_dict()
    report.periodic_orbit = po.to_dict()
    if att.attracts_fraction < 1.0:
        report.reasons.append(f"only {att.attracts_fraction:.3f} of probes attracted")
        return report
    if po.status == "refined":
        dist = hausdorff(A.points, po.points)
        report.set_to_orbit_distance = dist
        if dist <= s.set_tol:
            report.verdict = CONSISTENT
            report.reasons.append(f"attracting set is a period-{po.period} orbit (distance {dist:.2e})")
            return report
        report.reasons.append(f"periodic orbit found but attracting set lies {dist:.2e} away")
    else:
        report.reasons.append(f"no periodic orbit refined (status {po.status})")
    report.verdict = VIOLATION
    return report


def random_cooperative_lv(rng: np.random.Generator, n: int, name: str, dominant: bool = True) -> SystemDef:
    """dx_i/dt = x_i (r_i - a_ii x_i + sum_{j != i} a_ij x_j).

    r_i in [0.5, 1.5], a_ii in [0.8, 1.2]; off-diagonal a_ij in [0, cap] with
    cap = 0.9 min_i a_ii / (n - 1), which keeps every row diagonally dominant.
    With dominant=False the cap is 2 a_ii / (n - 1) and orbits may blow up.
    """
    r = rng.uniform(0.5, 1.5, n)
    diag = rng.uniform(0.8, 1.2, n)
    if n > 1:
        cap = (0.9 if dominant else 2.0) * diag.min() / (n - 1)
        off = rng.uniform(0.0, cap, (n, n))
    else:
        off = np.zeros((1, 1))
    variables = [f"x{i + 1}" for i in range(n)]
    params, eqs = {}, []
    for i in range(n):
        params[f"r{i + 1}"] = float(r[i])
        params[f"a{i + 1}{i + 1}"] = float(diag[i])
        rhs = f"r{i + 1} - a{i + 1}{i + 1}*x{i + 1}"
        for j in range(n):
            if j != i:
                params[f"a{i + 1}{j + 1}"] = float(off[i, j])
                rhs += f" + a{i + 1}{j + 1}*x{j + 1}"
        eqs.append(f"x{i + 1}*({rhs})")
    return SystemDef.from_strings(name, "vector-field", variables, eqs, params)


def lv_bound(sys: SystemDef) -> float:
    """Upper bound on the positive equilibrium from row diagonal dominance."""
    n = sys.dimension
    p = sys.parameters
    rmax = max(p[f"r{i + 1}"] for i in range(n))
    margin = min(p[f"a{i + 1}{i + 1}"] - sum(p[f"a{i + 1}{j + 1}"] for j in range(n) if j != i)
                 for i in range(n))
    if margin <= 0:
        return 10.0 * rmax
    return rmax / margin


def theorem_sweep(family_seed: int, count: int, dims=(2, 3), dominant: bool = True,
                  settings: TheoremSettings = None) -> dict:
    """Run the pipeline on `count` random cooperative systems; dimensions alternate over `dims`."""
    if count < 1:
        raise ValueError("count must be at least 1")
    s = settings or TheoremSettings()
    rng = np.random.default_rng(family_seed)
    instances = []
    for k in range(count):
        n = dims[k % len(dims)]
        sys = random_cooperative_lv(rng, n, f"coop-lv-{n}d-{family_seed}-{k}", dominant)
        x0 = tuple(float(v) for v in rng.uniform(0.1, 1.0, n))
        box = IntervalBox.cube(0.0, 2.0 * lv_bound(sys), n)
        rep = run_theorem(sys, box, x0, s)
        d = rep.to_dict()
        d["equations"] = sys.equations
        d["x0"] = list(x0)
        instances.append(d)
    divergent = sum(1 for d in instances if d["divergent"])
    counted = [d for d in instances if not d["divergent"]]
    tally = {v: sum(1 for d in counted if d["verdict"] == v) for v in (CONSISTENT, VIOLATION, INCONCLUSIVE)}
    return {
        "family_seed": family_seed,
        "count": count,
        "dims": list(dims),
        "diagonally_dominant": dominant,
        "divergent_excluded": divergent,
        "tally": tally,
        "verdict": (VIOLATION if tally[VIOLATION] else
                    CONSISTENT if counted and tally[CONSISTENT] == len(counted) else INCONCLUSIVE),
        "instances": instances,
    }
