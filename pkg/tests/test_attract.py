import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from monochaos import monocert
from monochaos.attract import (AttractingSetEstimate, OrbitDiverged, basin_sample, basin_to_csv,
                               check_attracting, eps_glue, find_periodic_orbit, omega_limit)
from monochaos.dynamics import builtin, time_t_map
from monochaos.expr import IntervalBox

LOGISTIC_32 = builtin("logistic(3.2)").function
COOP_T1 = time_t_map(builtin("coop-lv-2d"), 1.0, 0.01)


def logistic_two_cycle(r):
    """Roots of f(f(x)) = x with the fixed points 0 and 1 - 1/r removed."""
    # f(f(x)) - x = -x (r x - r + 1) (r^2 x^2 - r (r + 1) x + r + 1); the 2-cycle solves the quadratic
    roots = np.roots([r * r, -r * (r + 1), r + 1])
    return sorted(float(v.real) for v in roots)


def test_two_cycle_oracle_is_a_cycle():
    a, b = logistic_two_cycle(3.2)
    f = lambda x: 3.2 * x * (1 - x)  # noqa: E731
    assert f(a) == pytest.approx(b, abs=1e-14) and f(b) == pytest.approx(a, abs=1e-14)


def test_constant_map_single_cluster():
    A = omega_limit(lambda x: (0.7, -1.0), (5.0, 5.0), 3, 10, 1e-9)
    assert A.clusters == [(0.7, -1.0)]
    assert A.W.contains((0.7, -1.0))


def test_logistic_two_clusters():
    A = omega_limit(LOGISTIC_32, (0.3,), 1000, 50, 1e-6)
    centres = sorted(c[0] for c in A.clusters)
    assert centres == pytest.approx(logistic_two_cycle(3.2), abs=1e-6)
    assert centres == pytest.approx([0.5130, 0.7995], abs=1e-4)
    assert all(A.W.contains(p) for p in A.points)
    assert A.invariance_residual < 1e-6


def test_coop_lv_single_cluster_at_equilibrium():
    A = omega_limit(COOP_T1, (0.1, 0.1), 100, 10, 1e-4)
    assert len(A.clusters) == 1
    assert np.allclose(A.clusters[0], (2, 2), atol=1e-4)


def test_eps_glue_orders_by_first_occurrence():
    pts = np.array([[0.0], [5.0], [0.05], [5.02], [9.0]])
    groups = eps_glue(pts, 0.1)
    assert [list(g) for g in groups] == [[0, 2], [1, 3], [4]]


def test_identity_period_one():
    po = find_periodic_orbit(lambda x: x, (0.25, 4.0), 5, 1e-3, 1e-12)
    assert (po.period, po.residual, po.status) == (1, 0.0, "refined")
    assert po.points == [(0.25, 4.0)]


def test_logistic_period_two_refined():
    po = find_periodic_orbit(LOGISTIC_32, (0.3,), 8, 1e-3, 1e-10)
    assert po.period == 2 and po.status == "refined"
    assert sorted(p[0] for p in po.points) == pytest.approx(logistic_two_cycle(3.2), abs=1e-6)
    assert sorted(p[0] for p in po.points) == pytest.approx([0.5130445, 0.7994555], abs=1e-6)


def test_doubling_exact_period_three():
    po = find_periodic_orbit(builtin("doubling").function, (Fraction(1, 7),), 6, 1e-9, 1e-12)
    assert po.period == 3 and po.residual == 0
    assert sorted(p[0] for p in po.points) == [Fraction(1, 7), Fraction(2, 7), Fraction(4, 7)]


def test_period_collapses_to_smallest_divisor():
    # the scan would accept period 4 for a 2-cycle if max_period skipped 2; divisor check fixes it
    po = find_periodic_orbit(lambda x: (-x[0],), (0.5,), 4, 1e-3, 1e-12)
    assert po.period == 2


def test_periodic_estimates_reverify():
    for T, seed in [(LOGISTIC_32, (0.3,)), (COOP_T1, (0.5, 3.0)), (lambda x: (-x[0],), (0.5,))]:
        po = find_periodic_orbit(T, seed, 8, 1e-3, 1e-9)
        assert po.residual <= po.tolerance
        assert abs(po.recompute_residual(T) - po.residual) <= 1e-12
        if po.period > 1:
            d = min(math.dist(a, b) for i, a in enumerate(po.points) for b in po.points[i + 1:])
            assert d > 10 * po.tolerance


def test_not_found_without_recurrence():
    po = find_periodic_orbit(lambda x: (x[0] + 1.0,), (0.0,), 5, 1e-3, 1e-9, scan_steps=50)
    assert po.status == "not-found" and not po.found


def test_constant_map_attracts_immediately():
    A = omega_limit(lambda x: (1.0,), (0.0,), 2, 5, 1e-9)
    rep = check_attracting(lambda x: (1.0,), A, 10, 5)
    assert rep.attracts_fraction == 1.0
    assert rep.uniform_bound_curve[1] == 0.0


def test_repeller_not_attracting():
    A = AttractingSetEstimate.from_points([[0.0]], 1e-6, W=IntervalBox([(-1, 1)]))
    rep = check_attracting(lambda x: (2 * x[0],), A, 20, 100)
    assert rep.attracts_fraction == 0.0
    assert rep.divergent == 20


def test_coop_lv_attracts_probe_grid():
    A = AttractingSetEstimate.from_points([[2.0, 2.0]], 1e-4, W=IntervalBox([(1, 3), (1, 3)]))
    rep = check_attracting(COOP_T1, A, 30, 40)
    assert rep.attracts_fraction == 1.0
    assert rep.forward_invariance_fraction == 1.0
    # oracle: an independent integrator on a 10 x 10 grid of W converges to (2, 2)

    def rhs(t, u):
        return [u[0] * (1 - u[0] + 0.5 * u[1]), u[1] * (1 - u[1] + 0.5 * u[0])]

    for x in np.linspace(1, 3, 10):
        for y in np.linspace(1, 3, 10):
            end = solve_ivp(rhs, (0, 40), [x, y], rtol=1e-10, atol=1e-12).y[:, -1]
            assert np.allclose(end, (2, 2), atol=1e-4)


def test_uniform_curve_decreases_for_contraction():
    A = AttractingSetEstimate.from_points([[0.0]], 1e-6, W=IntervalBox([(-1, 1)]))
    rep = check_attracting(lambda x: (0.5 * x[0],), A, 50, 30)
    curve = rep.uniform_bound_curve
    assert all(b <= a for a, b in zip(curve, curve[1:]))
    assert rep.attracts_fraction == 1.0


def test_constant_map_basin_all_attracted():
    A = omega_limit(lambda x: (0.3, 0.3), (0.0, 0.0), 1, 3, 1e-9)
    labels = basin_sample(lambda x: (0.3, 0.3), A, IntervalBox.cube(-1, 1, 2), 5, 3)
    assert (labels == 1).all()


def test_logistic_basin_interior():
    A = omega_limit(LOGISTIC_32, (0.3,), 1000, 2, 1e-6)
    labels = basin_sample(LOGISTIC_32, A, IntervalBox([(0, 1)]), 21, 2000)
    assert labels[0] == 0 and labels[-1] == 0
    assert (labels[1:-1] == 1).all()


def test_square_map_basin_threshold():
    A = AttractingSetEstimate.from_points([[0.0]], 1e-6)
    labels = basin_sample(lambda x: (x[0] ** 2,), A, IntervalBox([(0, 2)]), 41, 60)
    xs = np.linspace(0, 2, 41)
    assert ((labels == 1) == (xs < 1)).all()
    assert (labels[xs > 1] == -1).all()


def test_basin_csv(tmp_path):
    labels = np.array([[1, 0], [-1, 1]])
    basin_to_csv(labels, tmp_path / "b.csv")
    assert (tmp_path / "b.csv").read_text() == "1,0\n-1,1\n"


def test_theorem_signature_on_certified_map():
    # certified monotone map with a globally attracting fixed point
    from monochaos.expr import SystemDef
    sys = SystemDef.from_strings("contract", "discrete-map", ["x", "y"], ["0.5*x + 0.2*y + 1", "0.1*x + 0.6*y"])
    box = IntervalBox.cube(-5, 5, 2)
    assert monocert.verify_monotone_map(sys, box).verdict == "certified"
    A = omega_limit(sys.function, (0.0, 0.0), 200, 10, 1e-8)
    assert check_attracting(sys.function, A, 20, 200).attracts_fraction == 1.0
    po = find_periodic_orbit(sys.function, tuple(A.points[-1]), 8, 1e-3, 1e-10)
    assert po.status == "refined" and po.period == 1


def test_divergent_omega_limit_raises():
    with pytest.raises(OrbitDiverged):
        omega_limit(lambda x: (10 * x[0],), (1.0,), 100, 5, 1e-6)
