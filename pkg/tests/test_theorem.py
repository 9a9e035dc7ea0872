import numpy as np
import pytest

from monochaos.dynamics import builtin
from monochaos.expr import IntervalBox, SystemDef
from monochaos.theorem import (CONSISTENT, INCONCLUSIVE, VIOLATION, TheoremSettings, hausdorff,
                               lv_bound, random_cooperative_lv, run_theorem, theorem_sweep)


def test_coop_lv_consistent_with_fixed_point():
    rep = run_theorem(builtin("coop-lv-2d"), IntervalBox.cube(0, 5, 2), (0.5, 1.5))
    assert rep.verdict == CONSISTENT
    assert rep.periodic_orbit["period"] == 1
    assert np.allclose(rep.periodic_orbit["points"][0], (2, 2), atol=1e-9)
    assert rep.set_to_orbit_distance <= 1e-4


def test_decoupled_flows_converge_to_carrying_capacities():
    sys = SystemDef.from_strings("decoupled", "vector-field", ["x", "y"], ["x*(1.2 - x)", "y*(0.7 - 0.5*y)"])
    rep = run_theorem(sys, IntervalBox.cube(0, 3, 2), (0.2, 0.9))
    assert rep.verdict == CONSISTENT
    assert np.allclose(rep.periodic_orbit["points"][0], (1.2, 1.4), atol=1e-8)


def test_noncooperative_field_is_inconclusive():
    rep = run_theorem(builtin("lorenz-classical"), IntervalBox.cube(-20, 20, 3), (1.0, 1.0, 1.0))
    assert rep.verdict == INCONCLUSIVE
    assert rep.certificate["verdict"] == "refuted"
    assert rep.attracting_set is None


def test_violation_needs_certificate_and_full_attraction():
    # loose attraction tolerance with a short transient: every gate passes but the tail is far from the orbit
    s = TheoremSettings(transient=1, tail=4, cluster_eps=1.0, set_tol=1e-6)
    rep = run_theorem(builtin("coop-lv-2d"), IntervalBox.cube(0, 5, 2), (0.5, 1.5), s)
    assert rep.verdict == VIOLATION
    assert rep.certificate["verdict"] == "certified"
    assert rep.attraction["attracts_fraction"] == 1.0


def test_no_violation_when_attraction_incomplete():
    s = TheoremSettings(transient=1, tail=4, set_tol=1e-6)
    rep = run_theorem(builtin("coop-lv-2d"), IntervalBox.cube(0, 5, 2), (0.5, 1.5), s)
    assert rep.verdict == INCONCLUSIVE


def test_random_systems_are_cooperative_and_dominant():
    rng = np.random.default_rng(0)
    for n in (2, 3, 4):
        sys = random_cooperative_lv(rng, n, "r")
        p = sys.parameters
        for i in range(1, n + 1):
            assert 0.5 <= p[f"r{i}"] <= 1.5 and 0.8 <= p[f"a{i}{i}"] <= 1.2
            off = [p[f"a{i}{j}"] for j in range(1, n + 1) if j != i]
            assert all(a >= 0 for a in off) and sum(off) < p[f"a{i}{i}"]
        assert lv_bound(sys) > 0


def test_sweep_two_dimensional_all_consistent():
    res = theorem_sweep(7, 25, dims=(2,))
    assert res["tally"] == {CONSISTENT: 25, VIOLATION: 0, INCONCLUSIVE: 0}
    assert res["verdict"] == CONSISTENT


def test_non_dominant_sweep_excludes_divergence():
    res = theorem_sweep(3, 10, dims=(2,), dominant=False)
    assert res["divergent_excluded"] > 0
    assert res["divergent_excluded"] + sum(res["tally"].values()) == 10
    assert res["tally"][VIOLATION] == 0
    for inst in res["instances"]:
        if inst["divergent"]:
            assert inst["verdict"] == INCONCLUSIVE


def test_sweep_needs_count():
    with pytest.raises(ValueError):
        theorem_sweep(1, 0)


def test_hausdorff():
    assert hausdorff([[0, 0]], [[3, 4]]) == 5.0
    assert hausdorff([[0.0], [1.0]], [[0.0]]) == 1.0
