from math import pi, sqrt, tan

import numpy as np
import pytest

from carnot.algebra import builtin
from carnot.errors import ConvergenceError, StepUnsupported
from carnot.lab import (box_gauge, cc_distance_upper, dilate, group_inverse, group_multiply,
                        optimize_path, tube_experiment, volume_scaling_experiment)
from carnot.lab.ccdist import lift_height, lifted_height
from carnot.lab.montecarlo import _in_tube
from carnot.lab.group import bracket_tensor

HEIS = builtin("heisenberg", 1)
HEIS2 = builtin("heisenberg", 2)
QUAT = builtin("quaternionic_heisenberg", 1)
ABEL = builtin("abelian", 3)


def test_group_law_examples():
    assert np.allclose(group_multiply(HEIS, [1, 0, 0], [0, 1, 0]), [1, 1, 0.5])
    x = np.array([0.3, -1.2, 2.0])
    assert np.allclose(group_multiply(HEIS, x, np.zeros(3)), x)
    assert np.allclose(group_multiply(HEIS, x, group_inverse(HEIS, x)), 0)


@pytest.mark.parametrize("alg", [HEIS, HEIS2, QUAT], ids=lambda a: a.name)
def test_associativity_and_dilation_automorphism(alg):
    rng = np.random.default_rng(0)
    for _ in range(50):
        x, y, z = rng.normal(size=(3, alg.n))
        lhs = group_multiply(alg, group_multiply(alg, x, y), z)
        rhs = group_multiply(alg, x, group_multiply(alg, y, z))
        assert np.allclose(lhs, rhs, atol=1e-12)
        eps = float(rng.uniform(0.1, 5))
        assert np.allclose(dilate(alg, eps, group_multiply(alg, x, y)),
                           group_multiply(alg, dilate(alg, eps, x), dilate(alg, eps, y)),
                           atol=1e-12)


def test_dilation_examples():
    assert np.allclose(dilate(HEIS, 3.0, [1, 2, 3]), [3, 6, 27])
    x = np.array([0.4, -0.7, 1.3])
    assert np.allclose(dilate(HEIS, 1.0, x), x)
    assert np.allclose(dilate(HEIS, 0.25, dilate(HEIS, 4.0, x)), x)


def test_step3_rejected():
    with pytest.raises(StepUnsupported):
        group_multiply(builtin("engel"), np.zeros(4), np.zeros(4))
    with pytest.raises(StepUnsupported):
        volume_scaling_experiment(builtin("engel"), samples=1000)


def test_box_gauge_examples_and_homogeneity():
    assert box_gauge(HEIS, [0, 0, 4]) == 2
    assert box_gauge(HEIS, [0, 0, 0]) == 0
    assert box_gauge(HEIS, dilate(HEIS, 3, [1, 1, 1])) == pytest.approx(3, rel=1e-12)
    rng = np.random.default_rng(1)
    for alg in (HEIS, HEIS2, QUAT):
        pts = rng.normal(size=(200, alg.n))
        for eps in (0.1, 0.5, 2.0, 7.0):
            scaled = box_gauge(alg, dilate(alg, eps, pts))
            assert np.allclose(scaled, eps * box_gauge(alg, pts), rtol=1e-12, atol=0)


# -- Monte Carlo ---------------------------------------------------------------

@pytest.mark.parametrize("alg, Q", [(HEIS, 4), (ABEL, 3), (QUAT, 10)],
                         ids=["heisenberg1", "abelian3", "quaternionic1"])
def test_volume_slope_small_sample(alg, Q):
    res = volume_scaling_experiment(alg, samples=200_000, seed=1)
    assert abs(res.slope - Q) < 0.15
    assert abs(res.slope - Q) < 5 * res.slope_stderr + 0.02


def test_volume_exact_for_boxes():
    # {box_gauge <= eps} is a coordinate box of volume prod(2 eps^w)
    res = volume_scaling_experiment(HEIS, samples=400_000, seed=2)
    for e, v, s in res.rows():
        assert abs(v - 8 * e ** 4) < 4 * s + 1e-12


def test_monte_carlo_reproducible():
    a = volume_scaling_experiment(HEIS, samples=50_000, seed=3)
    b = volume_scaling_experiment(HEIS, samples=50_000, seed=3)
    assert a == b
    t1 = tube_experiment(HEIS, 0.1, 1.0, samples=50_000, seed=3)
    t2 = tube_experiment(HEIS, 0.1, 1.0, samples=50_000, seed=3)
    assert t1 == t2


def test_tube_hit_test_against_time_grid():
    alg = HEIS2
    c = bracket_tensor(alg)
    eps, tau = 0.3, 0.8
    half = eps ** np.asarray(alg.weights, float)
    rng = np.random.default_rng(4)
    e1 = np.zeros(alg.n)
    e1[0] = 1.0
    # b . exp(t e1) with b slightly outside the box and t slightly outside [0, tau]
    b = rng.uniform(-1.3, 1.3, size=(2000, alg.n)) * half
    t = rng.uniform(-0.2, tau + 0.2, size=(2000, 1))
    pts = group_multiply(alg, b, t * e1)
    fast = _in_tube(pts, c, half, tau)
    ts = np.linspace(0, tau, 2001)
    inner = np.zeros(len(pts), bool)
    outer = np.zeros(len(pts), bool)
    for t in ts:
        q = group_multiply(alg, pts, -t * e1)
        inner |= np.all(np.abs(q) <= half, axis=1)
        outer |= np.all(np.abs(q) <= half + 1e-3, axis=1)
    assert np.all(fast[inner])
    assert not np.any(fast & ~outer)
    assert 300 < fast.sum() < 1700


@pytest.fixture(scope="module")
def tube_ratios():
    return {eps: tube_experiment(HEIS, eps, 1.0, samples=200_000, seed=0)
            for eps in (0.05, 0.1, 0.2)}


def test_tube_ratio_bounded_across_scales(tube_ratios):
    ratios = [t.ratio for t in tube_ratios.values()]
    assert all(0 < r <= 4 for r in ratios)
    assert max(ratios) / min(ratios) < 2


def test_tube_doubling_samples(tube_ratios):
    base = tube_ratios[0.1]
    doubled = tube_experiment(HEIS, 0.1, 1.0, samples=400_000, seed=0)
    assert abs(doubled.ratio - base.ratio) < 3 * base.ratio_stderr


def test_tube_degenerates_to_box():
    eps = 0.2
    fractions = [tube_experiment(HEIS, eps, tau, samples=200_000, seed=5).tube_volume
                 / (2 * eps) ** 2 / (2 * eps ** 2) for tau in (1.0, 0.3, 0.1, 0.01, 0.001)]
    # vol(Tube)/vol(B) decreases towards 1 as tau -> 0
    assert all(a > b for a, b in zip(fractions, fractions[1:]))
    assert abs(fractions[-1] - 1) < 0.03


# -- CC distance ---------------------------------------------------------------

def _endpoint_by_group_law(vertices):
    g = np.zeros(3)
    for a, b in zip(vertices[:-1], vertices[1:]):
        g = group_multiply(HEIS, g, [b[0] - a[0], b[1] - a[1], 0.0])
    return g


def test_lift_agrees_with_group_law():
    rng = np.random.default_rng(6)
    poly = np.vstack([np.zeros(2), rng.normal(size=(12, 2))])
    end = _endpoint_by_group_law(poly)
    assert np.isclose(lift_height(end), lifted_height(poly))


def test_horizontal_segment():
    assert cc_distance_upper(HEIS, (1, 0, 0)) == pytest.approx(1.0, rel=5e-3)


@pytest.fixture(scope="module")
def unit_vertical():
    return optimize_path(HEIS, (0, 0, 1), segments=16, restarts=4, seed=0)


def test_vertical_target_dido_window(unit_vertical):
    assert 2 * sqrt(pi) <= unit_vertical.length <= 1.05 * 2 * sqrt(pi)
    # the shortest closed 16-gon of area 1 is the regular one
    assert unit_vertical.length == pytest.approx(2 * sqrt(16 * tan(pi / 16)), rel=1e-4)


def test_path_reaches_target(unit_vertical):
    v = unit_vertical.vertices
    assert np.allclose(v[0], 0) and np.allclose(v[-1], 0)
    assert unit_vertical.violation <= 1e-6
    assert np.allclose(_endpoint_by_group_law(v), [0, 0, 1], atol=1e-6)


def test_dilation_homogeneity(unit_vertical):
    assert cc_distance_upper(HEIS, (0, 0, 4)) == pytest.approx(2 * unit_vertical.length, rel=1e-2)
    rng = np.random.default_rng(7)
    for target in rng.uniform(-1, 1, size=(3, 3)):
        base = cc_distance_upper(HEIS, target)
        for eps in (0.5, 2.0):
            scaled = cc_distance_upper(HEIS, dilate(HEIS, eps, target))
            assert scaled / base == pytest.approx(eps, rel=0.02)


def test_ball_box_lower_consistency():
    # the ratio cc / box_gauge stays above a fixed constant; 0.5 holds with margin
    rng = np.random.default_rng(8)
    mins = []
    for _ in range(2):
        targets = rng.uniform(-2, 2, size=(6, 3))
        ratios = [cc_distance_upper(HEIS, t, segments=12, restarts=2) / box_gauge(HEIS, t)
                  for t in targets]
        mins.append(min(ratios))
    assert min(mins) >= 0.5
    assert max(mins) / min(mins) < 1.5


def test_cc_reproducible_and_validated():
    a = optimize_path(HEIS, (0.5, -0.2, 0.7), seed=11)
    b = optimize_path(HEIS, (0.5, -0.2, 0.7), seed=11)
    assert a.length == b.length and np.array_equal(a.vertices, b.vertices)
    with pytest.raises(ValueError):
        cc_distance_upper(HEIS, (0, 0, 1), segments=4)
    with pytest.raises(StepUnsupported):
        cc_distance_upper(HEIS2, (0, 0, 0, 0, 1))
    assert issubclass(ConvergenceError, RuntimeError)
