"""Experiment pipelines behind the CLI subcommands.

Each runner returns the report payload plus the CSV tables and figures to
write. `run` persists them under ``<out>/<kind>-<config hash>/``. The payload
never carries timestamps, so identical configs give byte-identical
report.json files; run metadata goes to meta.json.
"""
from __future__ import annotations

import csv
import datetime as _dt
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import attract, chaos, dynamics, monocert, order, sft, theorem
from ..expr import IntervalBox
from . import plots
from .config import ConfigError, ExperimentConfig

EXIT_OK, EXIT_ERROR, EXIT_VIOLATION = 0, 1, 2


@dataclass
class Outcome:
    payload: dict
    tables: dict = field(default_factory=dict)      # filename -> (header, rows)
    figures: list = field(default_factory=list)     # (filename, callable(path))
    exit_code: int = EXIT_OK


def jsonable(x):
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return x


def dumps(payload) -> str:
    return json.dumps(jsonable(payload), indent=2, sort_keys=True) + "\n"


def _box(cfg, key, dim=None, default=None):
    raw = cfg.get(key, default)
    if raw is None:
        raise ConfigError(key, "a box [[lo, hi], ...] is required")
    try:
        box = IntervalBox(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(key, f"invalid box: {exc}") from None
    if dim is not None and box.dim != dim:
        raise ConfigError(key, f"box has dimension {box.dim}, system has {dim}")
    return box


def _x0(cfg, sys):
    x0 = cfg.get("x0")
    if x0 is None or len(x0) != sys.dimension:
        raise ConfigError("x0", f"initial point of length {sys.dimension} required")
    return tuple(float(v) for v in x0)


def _as_map(cfg, sys):
    """The map to study: T itself, or the time-tau map of a field."""
    if sys.is_map:
        return sys.function
    return dynamics.time_t_map(sys, cfg.get("tau", 1.0), cfg.get("h", 0.01))


def run_simulate(cfg: ExperimentConfig) -> Outcome:
    sys = cfg.load_system()
    x0 = _x0(cfg, sys)
    if sys.is_map:
        orbit = dynamics.iterate(sys, x0, int(cfg.get("steps", 1000)))
    else:
        orbit = dynamics.integrate_rk4(sys, x0, cfg.get("h", 0.001), cfg.get("t_end", 10.0),
                                       int(cfg.get("sample_every", 1)))
    states = np.array(orbit.states, dtype=float)
    payload = {
        "system": sys.to_dict(),
        "samples": len(orbit),
        "final_state": list(orbit.final),
        "final_time": orbit.times[-1],
        "max_abs": float(np.abs(states).max()),
        "divergent": orbit.divergent,
    }
    header = ["t"] + [f"x{k + 1}" for k in range(sys.dimension)]
    rows = [[dynamics.fmt17(t)] + [dynamics.fmt17(v) for v in s] for t, s in zip(orbit.times, orbit.states)]
    out = Outcome(payload, {"orbit.csv": (header, rows)})
    out.figures.append(("orbit.png", lambda p: plots.orbit_figure(orbit.times, orbit.states, p,
                                                                  list(sys.variables), sys.name)))
    sec = cfg.get("section")
    if sec and not sys.is_map:
        spec = dynamics.SectionSpec(int(sec["coordinate"]), float(sec.get("level", 0.0)),
                                    sec.get("direction", "increasing"), bool(sec.get("rate", False)))
        crossings = list(dynamics.section_crossings(sys, spec, x0, cfg.get("h", 0.001),
                                                    cfg.get("t_end", 10.0), sec.get("t_min", 0.0)))
        k = int(sec.get("record", spec.coordinate))
        values = [p[k] for p, _ in crossings]
        payload["section"] = spec.to_dict()
        payload["crossings"] = len(crossings)
        if len(values) >= 3:
            payload["return_map"] = chaos.return_map_thickness(values, int(sec.get("bins", 30)))
        out.tables["return_map.csv"] = (
            ["n", "t"] + [f"x{j + 1}" for j in range(sys.dimension)],
            [[i, dynamics.fmt17(t)] + [dynamics.fmt17(v) for v in p] for i, (p, t) in enumerate(crossings)],
        )
        if len(values) >= 2:
            out.figures.append(("return_map.png", lambda p: plots.return_map_figure(values, p)))
    return out


def run_certify(cfg: ExperimentConfig) -> Outcome:
    sys = cfg.load_system()
    box = _box(cfg, "box", sys.dimension)
    depth = int(cfg.get("depth_limit", 4))
    if sys.is_map:
        cert = monocert.verify_monotone_map(sys, box, depth)
        T = sys.function
    else:
        cert = monocert.verify_cooperative_field(sys, box, depth)
        T = dynamics.time_t_map(sys, cfg.get("tau", 0.1), cfg.get("h", 0.01))
    payload = {"system": sys.to_dict(), "certificate": cert.to_dict()}
    if cert.witness is not None:
        payload["witness_replay"] = dynamics.fmt17(monocert.replay_witness(sys, cert))
    samples = int(cfg.get("falsify_samples", 1000))
    if samples > 0:
        try:
            cx = order.falsify_monotone(T, order.VectorOrder(sys.dimension), box, samples, cfg.seed)
            payload["falsify_monotone"] = cx.to_dict() if cx else None
        except dynamics.DivergenceError as exc:
            payload["falsify_monotone"] = {"error": str(exc)}
    out = Outcome(payload)
    if sys.dimension == 2:
        out.figures.append(("certificate.png",
                            lambda p: plots.certificate_figure(cert.leaves, p, f"{sys.name}: {cert.verdict}")))
    return out


def run_attract(cfg: ExperimentConfig) -> Outcome:
    sys = cfg.load_system()
    x0 = _x0(cfg, sys)
    T = _as_map(cfg, sys)
    eps = cfg.get("cluster_eps", 1e-6)
    A = attract.omega_limit(T, x0, int(cfg.get("transient", 500)), int(cfg.get("tail", 100)), eps)
    if cfg.get("W") is not None:
        A.W = _box(cfg, "W", sys.dimension)
    rep = attract.check_attracting(T, A, int(cfg.get("probes", 20)), int(cfg.get("steps", 100)), cfg.seed)
    per = cfg.get("periodic", {})
    po = attract.find_periodic_orbit(T, tuple(A.points[-1]), int(per.get("max_period", 16)),
                                     per.get("coarse_tol", 1e-3), per.get("refine_tol", 1e-9))
    payload = {"system": sys.to_dict(), "attracting_set": A.to_dict(), "attraction": rep.to_dict(),
               "periodic_orbit": po.to_dict(),
               "notes": {"basin": "operational basin: points whose orbit ends within cluster_eps of A",
                         "forward_invariance": "TW within W checked on sampled probes only"}}
    out = Outcome(payload)
    out.figures.append(("uniform_curve.png", lambda p: plots.uniform_curve_figure(rep.uniform_bound_curve, p, eps)))
    basin = cfg.get("basin")
    if basin:
        bbox = _box(_Sub(basin), "box", sys.dimension)
        labels = attract.basin_sample(T, A, bbox, int(basin.get("grid", 21)), int(basin.get("steps", 200)))
        payload["basin"] = {"box": bbox.to_list(), "grid": labels.shape[0],
                            "attracted": int((labels == 1).sum()), "not_attracted": int((labels == 0).sum()),
                            "divergent": int((labels == -1).sum())}
        mat = labels.reshape(labels.shape[0], -1) if labels.ndim > 1 else labels.reshape(1, -1)
        out.tables["basin.csv"] = (None, mat.tolist())
        out.figures.append(("basin.png", lambda p: plots.basin_figure(labels, bbox, p)))
    return out


class _Sub:
    """Lets nested config sections go through the same field helpers."""

    def __init__(self, d):
        self.d = d

    def get(self, k, default=None):
        return self.d.get(k, default)


def run_chaos(cfg: ExperimentConfig) -> Outcome:
    sys = cfg.load_system()
    x0 = _x0(cfg, sys)
    T = _as_map(cfg, sys)
    box = _box(cfg, "box", sys.dimension)
    seed = cfg.seed
    transient = int(cfg.get("transient", 0))
    x = x0
    for _ in range(transient):
        x = tuple(T(x))
    cloud = dynamics.iterate(T, x, int(cfg.get("cloud", 200))).states
    lyap = cfg.get("lyapunov", {})
    kwargs = dict(eps=cfg.get("eps", 1e-8), pairs=int(cfg.get("pairs", 20)),
                  horizon=int(cfg.get("horizon", 50)), lyap_steps=int(lyap.get("steps", 10000)),
                  bins_per_axis=int(cfg.get("bins", 20)), coverage_steps=int(cfg.get("coverage_steps", 2000)),
                  max_period=int(cfg.get("max_period", 8)), seed=seed, starts=cloud,
                  delta_threshold=cfg.get("delta_threshold"),
                  periodic_seeds=int(cfg.get("periodic_seeds", 100)),
                  periodic_scan=int(cfg.get("periodic_scan", 20)))
    if sys.is_map:
        report = chaos.chaos_report(T, box, x, **kwargs)
    else:
        report = chaos.chaos_report(T, box, x, lyap_system=sys, lyap_h=lyap.get("h", 0.01), **kwargs)
    sens = chaos.sensitivity_estimate(T, box, kwargs["eps"], kwargs["pairs"], kwargs["horizon"],
                                      seed=seed, starts=cloud)
    cert_box = _box(cfg, "certify_box", sys.dimension, cfg.get("box"))
    depth = int(cfg.get("depth_limit", 4))
    cert = (monocert.verify_monotone_map if sys.is_map else monocert.verify_cooperative_field)(sys, cert_box, depth)
    payload = {"system": sys.to_dict(), "chaos": report.to_dict(), "certificate": cert.to_dict(),
               "notes": {"sensitivity": "d(f^k x, f^k y) read as a metric of the two iterates"}}
    horizon = kwargs["horizon"]
    rows = [[k] + [dynamics.fmt17(c[k]) for c in sens.curves] for k in range(horizon + 1)]
    out = Outcome(payload, {"separation.csv": (["k"] + [f"pair{i}" for i in range(len(sens.curves))], rows)})
    out.figures.append(("separation.png", lambda p: plots.separation_figure(sens.curves, p)))
    return out


def run_sft(cfg: ExperimentConfig) -> Outcome:
    gd = cfg.load_graph_dict()
    try:
        g = sft.SymbolGraph.from_dict(gd)
    except (ValueError, TypeError) as exc:
        raise ConfigError("graph", str(exc)) from None
    L, P = int(cfg.get("L", 3)), int(cfg.get("P", 6))
    if g.is_empty:
        raise ConfigError("graph", "graph has no essential part")
    tr = sft.is_transitive(g)
    dv = sft.devaney_check_bruteforce(g, L, P)
    tv = sft.touhey_check(g, L, P)
    payload = {
        "graph": g.to_dict(),
        "pruned_vertices": g.pruned_vertices,
        "symbols": {g.word((k,)): list(e) for k, e in enumerate(g.edges)},
        "is_transitive": {"holds": tr.holds, "walk": tr.walk, "pair": tr.pair},
        "devaney": dv.to_dict(),
        "touhey": tv.to_dict(),
        "chaotic": dv.chaotic,
    }
    scan = cfg.get("scan")
    if scan:
        payload["scan"] = sft.equivalence_scan(int(scan.get("max_vertices", 2)), int(scan.get("max_edges", 4)),
                                               int(scan.get("L", L)), int(scan.get("P", P)))
    out = Outcome(payload)
    out.figures.append(("graph.png", lambda p: plots.graph_figure(g.to_dict(), p)))
    return out


def _settings(cfg) -> theorem.TheoremSettings:
    s = theorem.TheoremSettings(seed=cfg.seed)
    for k, v in cfg.get("settings", {}).items():
        if not hasattr(s, k):
            raise ConfigError(f"settings.{k}", "unknown setting")
        setattr(s, k, type(getattr(s, k))(v))
    return s


def run_theorem(cfg: ExperimentConfig) -> Outcome:
    settings = _settings(cfg)
    sweep = cfg.get("sweep")
    if sweep:
        result = theorem.theorem_sweep(int(sweep.get("family_seed", cfg.seed)), int(sweep.get("count", 25)),
                                       tuple(sweep.get("dims", (2, 3))), bool(sweep.get("dominant", True)),
                                       settings)
        out = Outcome({"sweep": result})
        dists = [d["set_to_orbit_distance"] for d in result["instances"]]
        out.figures.append(("sweep.png", lambda p: plots.sweep_figure(result["tally"], dists, p)))
        verdict = result["verdict"]
    else:
        sys = cfg.load_system()
        rep = theorem.run_theorem(sys, _box(cfg, "box", sys.dimension), _x0(cfg, sys), settings)
        out = Outcome({"system": sys.to_dict(), "theorem": rep.to_dict()})
        if rep.attraction:
            out.figures.append(("uniform_curve.png", lambda p: plots.uniform_curve_figure(
                rep.attraction["uniform_bound_curve"], p, settings.cluster_eps)))
        verdict = rep.verdict
    out.payload["verdict"] = verdict
    if verdict == theorem.VIOLATION:
        out.exit_code = EXIT_VIOLATION
    return out


RUNNERS: dict = {
    "simulate": run_simulate,
    "certify": run_certify,
    "attract": run_attract,
    "chaos": run_chaos,
    "sft": run_sft,
    "theorem": run_theorem,
}


def _write_table(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if header:
            w.writerow(header)
        w.writerows(rows)


def run(cfg: ExperimentConfig, out_root, figures: bool = True):
    """Run one experiment and persist it. Returns (exit code, output directory)."""
    outcome = RUNNERS[cfg.kind](cfg)
    digest = cfg.digest()
    out_dir = Path(out_root) / f"{cfg.kind}-{digest[:12]}"
    out_dir.mkdir(parents=True, exist_ok=True)
    report = {"kind": cfg.kind, "config_hash": digest, "config": cfg.canonical(), "result": outcome.payload}
    (out_dir / "report.json").write_text(dumps(report), encoding="utf-8")
    for name, (header, rows) in outcome.tables.items():
        _write_table(out_dir / name, header, rows)
    written = []
    if figures:
        for name, draw in outcome.figures:
            draw(out_dir / name)
            written.append(name)
    meta = {"created": _dt.datetime.now(_dt.timezone.utc).isoformat(), "figures": written,
            "tables": sorted(outcome.tables), "exit_code": outcome.exit_code}
    (out_dir / "meta.json").write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    return outcome.exit_code, out_dir
