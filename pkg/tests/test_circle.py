import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import circle_fit_exact
from vogtrack.circle import Circle, algebraic_fit, cholesky_solve3, double_fit, geometric_rss
from vogtrack.errors import DegenerateConfiguration, DetectionFailure, InsufficientPoints


def ring(a, b, R, n, phase=0.0):
    t = phase + 2 * np.pi * np.arange(n) / n
    return np.column_stack((a + R * np.cos(t), b + R * np.sin(t)))


def normal_solve(points):
    """Direct numpy solve of the uncentred 3x3 normal equations."""
    p = np.asarray(points, dtype=float)
    A = np.column_stack((p, np.ones(len(p))))
    z = -(p ** 2).sum(axis=1)
    B, C, D = np.linalg.solve(A.T @ A, A.T @ z)
    a, b = -B / 2, -C / 2
    return a, b, math.sqrt(a * a + b * b - D)


def test_unit_circle():
    c = algebraic_fit([(1, 0), (0, 1), (-1, 0), (0, -1)])
    assert (c.a, c.b, c.R) == (0.0, 0.0, 1.0)


def test_offset_circle():
    c = algebraic_fit([(8, 4), (3, 9), (-2, 4), (3, -1)])
    assert c.a == pytest.approx(3, abs=1e-12)
    assert c.b == pytest.approx(4, abs=1e-12)
    assert c.R == pytest.approx(5, abs=1e-12)


def test_collinear_is_degenerate():
    with pytest.raises(DegenerateConfiguration, match="degenerate configuration"):
        algebraic_fit([(0, 0), (1, 1), (2, 2)])


def test_too_few_points():
    with pytest.raises(InsufficientPoints, match="insufficient points"):
        algebraic_fit([(0, 0), (1, 1)])


def test_cholesky_rejects_indefinite():
    with pytest.raises(DegenerateConfiguration):
        cholesky_solve3(((1, 2, 0), (2, 1, 0), (0, 0, 1)), (1, 1, 1))


def test_noisy_matches_direct_solve():
    rng = np.random.default_rng(7)
    p = ring(320, 240, 60, 200) + rng.normal(0, 1.5, size=(200, 2))
    c = algebraic_fit(p)
    a, b, R = normal_solve(p)
    assert abs(c.a - a) < 1e-9 and abs(c.b - b) < 1e-9 and abs(c.R - R) < 1e-9


@pytest.mark.parametrize("seed", range(5))
def test_pixel_points_match_exact_oracle(seed):
    rng = np.random.default_rng(seed)
    p = np.round(ring(rng.uniform(100, 500), rng.uniform(100, 400), 60, 40) + rng.normal(0, 1, (40, 2)))
    c = algebraic_fit(p)
    a, b, R = circle_fit_exact(p.astype(int).tolist())
    assert abs(c.a - a) < 1e-9 and abs(c.b - b) < 1e-9 and abs(c.R - R) < 1e-9


def test_geometric_rss_examples():
    unit = Circle(0, 0, 1)
    assert geometric_rss(unit, [(2, 0)]) == 1.0
    assert geometric_rss(unit, ring(0, 0, 1, 8)) < 1e-30


def test_geometric_rss_matches_loop():
    rng = np.random.default_rng(2)
    p = rng.uniform(0, 100, size=(50, 2))
    c = Circle(40.0, 55.0, 20.0)
    total = 0.0
    for x, y in p.tolist():
        total += (math.sqrt((x - 40.0) ** 2 + (y - 55.0) ** 2) - 20.0) ** 2
    assert geometric_rss(c, p) == pytest.approx(total / 50, rel=1e-14)


coords = st.floats(-500, 500, allow_nan=False)


@settings(max_examples=50, deadline=None)
@given(coords, coords, st.floats(5, 200), st.floats(-300, 300), st.floats(-300, 300), st.integers(0, 2 ** 31))
def test_translation_equivariance(a, b, R, tx, ty, seed):
    rng = np.random.default_rng(seed)
    p = ring(a, b, R, 30) + rng.normal(0, 0.5, (30, 2))
    c0 = algebraic_fit(p)
    c1 = algebraic_fit(p + (tx, ty))
    assert abs(c1.a - (c0.a + tx)) < 1e-9
    assert abs(c1.b - (c0.b + ty)) < 1e-9
    assert abs(c1.R - c0.R) < 1e-9


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 2 * math.pi), st.integers(0, 2 ** 31))
def test_rotation_equivariance(theta, seed):
    rng = np.random.default_rng(seed)
    p = ring(30, -20, 50, 25) + rng.normal(0, 0.5, (25, 2))
    rot = np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])
    c0 = algebraic_fit(p)
    c1 = algebraic_fit(p @ rot.T)
    ea, eb = rot @ (c0.a, c0.b)
    assert abs(c1.a - ea) < 1e-9 and abs(c1.b - eb) < 1e-9 and abs(c1.R - c0.R) < 1e-9


@settings(max_examples=50, deadline=None)
@given(coords, coords, st.floats(1, 300), st.integers(3, 60), st.floats(0, 6.3))
def test_exact_points_have_zero_rss(a, b, R, n, phase):
    p = ring(a, b, R, n, phase)
    assert geometric_rss(algebraic_fit(p), p) < 1e-18


def test_stationary_point():
    rng = np.random.default_rng(11)
    p = ring(200, 150, 60, 80) + rng.normal(0, 2, (80, 2))
    c = algebraic_fit(p)
    # objective in centred coordinates keeps the finite differences well scaled
    m = p.mean(axis=0)
    q = p - m
    a, b = c.a - m[0], c.b - m[1]
    params = np.array([-2 * a, -2 * b, a * a + b * b - c.R ** 2])

    def objective(v):
        B, C, D = v
        return float((((q ** 2).sum(axis=1) + B * q[:, 0] + C * q[:, 1] + D) ** 2).sum())

    base = objective(params)
    for i in range(3):
        for s in (1e-6, -1e-6):
            v = params.copy()
            v[i] += s
            assert objective(v) >= base


def test_double_fit_removes_outlier():
    p = np.vstack((ring(100, 100, 40, 12), [(200, 100)]))
    rep = double_fit(p, min_samples=8)
    # the first fit is dragged toward the outlier, so a few clean points on the
    # far side can exceed the cut too; the outlier itself must always go
    assert rep.removed_count >= 1
    assert not any((rep.inliers == (200, 100)).all(axis=1))
    c = rep.circle
    assert abs(c.a - 100) < 1e-6 and abs(c.b - 100) < 1e-6 and abs(c.R - 40) < 1e-6
    assert len(rep.inliers) + rep.removed_count == len(p)


def test_double_fit_clean_keeps_all():
    p = ring(10, 20, 30, 16)
    rep = double_fit(p)
    assert rep.removed_count == 0 and rep.circle == rep.first_fit


@pytest.mark.parametrize("n", [8, 23, 64])
def test_double_fit_idempotent(n):
    p = ring(300.25, 199.5, 61.3, n, 0.3)
    rep = double_fit(p)
    again = double_fit(rep.inliers)
    c0, c1 = rep.circle, again.circle
    assert abs(c0.a - c1.a) < 1e-12 and abs(c0.b - c1.b) < 1e-12 and abs(c0.R - c1.R) < 1e-12


def test_double_fit_too_few_after_removal():
    p = np.vstack((ring(0, 0, 10, 8), [(40, 0)]))
    with pytest.raises(DetectionFailure, match="insufficient samples after outlier removal"):
        double_fit(p, min_samples=9)


def test_double_fit_too_few_points():
    with pytest.raises(InsufficientPoints):
        double_fit(ring(0, 0, 10, 5), min_samples=8)


def test_circle_validation():
    with pytest.raises(ValueError):
        Circle(0, 0, 0)
    with pytest.raises(ValueError):
        Circle(math.nan, 0, 1)
