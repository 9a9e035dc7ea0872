"""Interval certification of monotonicity: cooperative vector fields and monotone maps.

A field dx/dt = f(x) is cooperative on a box when every off-diagonal partial
df_i/dx_j is nonnegative there; a map T is monotone when every partial
dT_i/dx_j is. Certification uses outward-rounded interval enclosures on an
adaptive subdivision; refutation needs a point value below -1e-12.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .dynamics import fmt17
from .expr import ExprDomainError, IntervalBox, SystemDef, compile_exprs, interval_eval, to_string

REFUTE_BELOW = -1e-12


@dataclass(frozen=True)
class Witness:
    point: tuple
    i: int
    j: int
    value: float

    def to_dict(self) -> dict:
        return {"point": [fmt17(v) for v in self.point], "i": self.i, "j": self.j,
                "value": fmt17(self.value)}


@dataclass
class Certificate:
    verdict: str                      # certified | refuted | inconclusive
    box: IntervalBox
    depth_limit: int
    subdivisions: int = 0
    witness: Optional[Witness] = None
    form: str = ""
    pairs: list = field(default_factory=list)
    partials: dict = field(default_factory=dict)
    leaves: list = field(default_factory=list)   # (box, status) with status ok | open | error
    reason: str = ""

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "box": [[fmt17(iv.lo), fmt17(iv.hi)] for iv in self.box],
            "depth_limit": self.depth_limit,
            "subdivisions": self.subdivisions,
            "witness": self.witness.to_dict() if self.witness else None,
            "form": self.form,
            "partials": {f"{i},{j}": s for (i, j), s in sorted(self.partials.items())},
            "leaf_count": len(self.leaves),
            "reason": self.reason,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _certify(sys: SystemDef, box: IntervalBox, depth_limit: int, pairs, form: str) -> Certificate:
    if box.dim != sys.dimension:
        raise ValueError(f"box has dimension {box.dim}, system has {sys.dimension}")
    exprs = {(i, j): sys.partial(i, j) for i, j in pairs}
    point_eval = {ij: compile_exprs([e], sys.dimension) for ij, e in exprs.items()}
    cert = Certificate("inconclusive", box, depth_limit, form=form, pairs=list(pairs),
                       partials={ij: to_string(e) for ij, e in exprs.items()})
    # breadth-first over (box, bisections per axis, partials still unresolved)
    queue = deque([(box, (0,) * box.dim, list(pairs))])
    open_leaves = 0
    reasons = []
    while queue:
        b, depth, pending = queue.popleft()
        unresolved = []
        errored = False
        for ij in pending:
            try:
                enc = interval_eval(exprs[ij], b.intervals)
            except ExprDomainError as exc:
                errored = True
                reasons.append(f"partial {ij}: {exc}")
                enc = None
            if enc is not None and enc.lo >= 0.0:
                continue
            unresolved.append(ij)
            for p in [b.midpoint()] + b.corners():
                try:
                    v = point_eval[ij](p)[0]
                except (ExprDomainError, ZeroDivisionError, ValueError, OverflowError):
                    continue
                if v < REFUTE_BELOW:
                    cert.verdict = "refuted"
                    cert.witness = Witness(tuple(float(c) for c in p), ij[0], ij[1], float(v))
                    cert.leaves.append((b, "refuted"))
                    return cert
        if not unresolved:
            cert.leaves.append((b, "ok"))
            continue
        eligible = [k for k in range(b.dim) if depth[k] < depth_limit and b[k].width > 0]
        if not eligible:
            open_leaves += 1
            cert.leaves.append((b, "error" if errored else "open"))
            continue
        axis = max(eligible, key=lambda k: (b[k].width, -k))
        nd = tuple(d + 1 if k == axis else d for k, d in enumerate(depth))
        cert.subdivisions += 1
        for child in b.bisect(axis):
            queue.append((child, nd, unresolved))
    if open_leaves == 0:
        cert.verdict = "certified"
    else:
        cert.reason = (f"{open_leaves} leaf boxes unresolved at depth limit {depth_limit}"
                       + (f"; {reasons[0]}" if reasons else ""))
    return cert


def verify_cooperative_field(sys: SystemDef, box: IntervalBox, depth_limit: int = 4) -> Certificate:
    """Check df_i/dx_j >= 0 for all i != j on the full right-hand side f."""
    if sys.kind != "vector-field":
        raise ValueError(f"{sys.name} is not a vector field")
    n = sys.dimension
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    return _certify(sys, box, depth_limit, pairs, form="off-diagonal partials of f_i")


def verify_monotone_map(sys: SystemDef, box: IntervalBox, depth_limit: int = 4) -> Certificate:
    """Check dT_i/dx_j >= 0 for every (i, j), diagonal included."""
    if sys.kind != "discrete-map":
        raise ValueError(f"{sys.name} is not a discrete map")
    n = sys.dimension
    pairs = [(i, j) for i in range(n) for j in range(n)]
    return _certify(sys, box, depth_limit, pairs, form="all partials of T_i")


def replay_witness(sys: SystemDef, cert: Certificate) -> float:
    """Re-evaluate the stored partial at the stored point."""
    w = cert.witness
    return compile_exprs([sys.partial(w.i, w.j)], sys.dimension)(w.point)[0]
