import json
import math
from fractions import Fraction

import numpy as np
import pytest

from monochaos.attract import PeriodicOrbitEstimate, omega_limit
from monochaos.chaos import (chaos_report, lyapunov_benettin, periodic_density_gap,
                             return_map_thickness, sensitivity_estimate, transitivity_coverage,
                             visited_bins)
from monochaos.dynamics import builtin, time_t_map
from monochaos.expr import IntervalBox

UNIT = IntervalBox([(0, 1)])
DOUBLING = builtin("doubling")
LOGISTIC4 = builtin("logistic(4)")
ROTATION = builtin("rotation")


def derivative_average_oracle(x0=0.3, n=200_000):
    """Mean of ln|f'(x_k)| = ln|4 - 8 x_k| along a logistic(4) orbit, computed directly."""
    x, total = x0, 0.0
    for _ in range(n):
        total += math.log(abs(4.0 - 8.0 * x))
        x = 4.0 * x * (1.0 - x)
    return total / n


# sensitivity

def test_rotation_never_separates():
    res = sensitivity_estimate(ROTATION.function, UNIT, 1e-6, 20, 50)
    assert res.delta_hat <= 1e-6 * (1 + 1e-6)


@pytest.mark.parametrize("eps", [1e-3, 1e-5, 1e-7])
def test_isometry_bound_holds_for_each_eps(eps):
    assert sensitivity_estimate(ROTATION.function, UNIT, eps, 10, 30).delta_hat <= eps * (1 + 1e-6)


def test_doubling_separates():
    res = sensitivity_estimate(DOUBLING.function, UNIT, 1e-6, 20, 30)
    assert res.delta_hat >= 0.25
    # oracle: the gap doubles exactly until it wraps, so it exceeds 0.25 once 2^k eps >= 0.25
    k = math.ceil(math.log2(0.25 / 1e-6))
    assert k <= 30


def test_lorenz_time_one_map_sensitive_on_cloud():
    T = time_t_map(builtin("lorenz-classical"), 1.0, 0.01)
    A = omega_limit(T, (1.0, 1.0, 1.0), 20, 30, 1e-6)
    box = IntervalBox([(-25, 25), (-30, 30), (0, 55)])
    res = sensitivity_estimate(T, box, 1e-8, 10, 50, starts=A.points)
    assert res.delta_hat >= 1.0


def test_sensitivity_rejects_nonpositive_eps():
    with pytest.raises(ValueError):
        sensitivity_estimate(DOUBLING.function, UNIT, 0.0, 5, 5)


# Lyapunov

def test_doubling_lyapunov():
    lam, se = lyapunov_benettin(DOUBLING, (0.1234,), 10_000)
    assert lam == pytest.approx(math.log(2), abs=0.01)


def test_doubling_lyapunov_within_two_stderr_for_three_seeds():
    for seed in (1, 2, 3):
        lam, se = lyapunov_benettin(DOUBLING, (0.3,), 10_000, seed=seed)
        assert abs(lam - math.log(2)) <= 2 * se + 1e-9


def test_rotation_lyapunov_zero():
    lam, _ = lyapunov_benettin(ROTATION, (0.2,), 10_000)
    assert abs(lam) < 0.01


def test_logistic_lyapunov_matches_derivative_average():
    oracle = derivative_average_oracle()
    assert oracle == pytest.approx(math.log(2), abs=0.02)
    lam, _ = lyapunov_benettin(LOGISTIC4, (0.3,), 20_000)
    assert lam == pytest.approx(math.log(2), abs=0.05)
    assert lam == pytest.approx(oracle, abs=0.05)


def test_lorenz_flow_lyapunov_positive():
    lam, se = lyapunov_benettin(builtin("lorenz-classical"), (1.0, 1.0, 1.0), 20_000, h=0.01, transient=1000)
    assert 0.75 < lam < 1.05 and se < 0.1


def test_lyapunov_needs_steps_and_step_size():
    with pytest.raises(ValueError):
        lyapunov_benettin(DOUBLING, (0.1,), 10)
    with pytest.raises(ValueError):
        lyapunov_benettin(builtin("coop-lv-2d"), (1.0, 1.0), 2000)


# coverage

def test_fixed_point_occupies_one_bin():
    pts = [(0.37,)] * 100
    assert len(visited_bins(pts, UNIT, 50)) == 1
    assert transitivity_coverage(lambda x: (0.37,), UNIT, (0.37,), 100, 50, reference=set()) == 1.0


def test_irrational_rotation_covers_circle():
    assert transitivity_coverage(ROTATION.function, UNIT, (0.0,), 100_000, 100) == 1.0


def test_logistic_covers_interval():
    assert transitivity_coverage(LOGISTIC4.function, UNIT, (0.3,), 1_000_000, 1000) >= 0.999


def test_coverage_nondecreasing_in_steps():
    T = LOGISTIC4.function
    ref = {(k,) for k in range(200)}
    values = [transitivity_coverage(T, UNIT, (0.3,), n, 200, reference=ref) for n in (10, 100, 1000, 10_000)]
    assert values == sorted(values)


# periodic density

def test_identity_grid_gap_within_bin_diagonal():
    box = IntervalBox.cube(0, 1, 2)
    bins = 10
    centres = [((i + 0.5) / bins, (j + 0.5) / bins) for i in range(bins) for j in range(bins)]
    gap = periodic_density_gap(lambda x: x, box, centres, bins, cloud=centres)
    assert gap <= math.hypot(0.1, 0.1)


def test_single_fixed_point_gap_is_cloud_radius():
    rng = np.random.default_rng(0)
    angles = rng.uniform(0, 2 * math.pi, 5000)
    cloud = np.c_[np.cos(angles), np.sin(angles)] * 3.0
    box = IntervalBox.cube(-4, 4, 2)
    gap = periodic_density_gap(lambda x: x, box, [(0.0, 0.0)], 80, cloud=cloud)
    assert gap == pytest.approx(3.0, abs=0.1)


def test_doubling_cycles_dense():
    # oracle: exact enumeration of all points k/(2^p - 1) of period dividing p <= 10
    points = sorted({Fraction(k, 2 ** p - 1) for p in range(1, 11) for k in range(2 ** p - 1)})
    for q in points[:50]:
        assert (2 * q) % 1 in points
    orbits = [PeriodicOrbitEstimate(1, [(float(q),)], 0.0, 0.0) for q in points]
    bins = 100
    cloud = np.linspace(0, 1, 10_001)[:, None]
    gap = periodic_density_gap(DOUBLING.function, UNIT, orbits, bins, cloud=cloud)
    assert gap <= 1 / 1023 + 0.5 / bins


# return map and report

def test_return_map_of_tent_is_thin():
    x, seq = 0.1234567, []
    for _ in range(3000):
        seq.append(x)
        x = 1.999 * min(x, 1 - x)
    stats = return_map_thickness(seq, bins=30)
    assert stats["max_thickness"] < 1e-9
    assert stats["occupied_fraction"] == 1.0


def test_return_map_of_noise_is_thick():
    seq = np.random.default_rng(1).uniform(0, 1, 3000)
    assert return_map_thickness(seq, bins=30)["max_thickness"] > 0.5


def test_chaos_report_logistic():
    rep = chaos_report(LOGISTIC4.function, UNIT, (0.3,), eps=1e-8, coverage_steps=20_000, bins_per_axis=50)
    assert rep.flags == {"sensitive": True, "transitive": True, "dense_periodic": True, "nondiscrete": True}
    d = rep.to_dict()
    assert all(math.isfinite(v) for v in d.values() if isinstance(v, float))
    assert 0 <= rep.transitivity_coverage <= 1
    json.dumps(d)


def test_chaos_report_contraction_not_chaotic():
    T = lambda x: (0.5 * x[0] + 0.25,)  # noqa: E731
    rep = chaos_report(T, UNIT, (0.9,), eps=1e-8, coverage_steps=2000)
    assert not rep.flags["sensitive"]
    assert rep.lyapunov_1 == pytest.approx(math.log(0.5), abs=1e-6)
    assert math.isfinite(rep.periodic_density_gap)
