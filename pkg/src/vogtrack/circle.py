"""Least-squares circle estimation.

The fit minimises the algebraic distance ``z + B x + C y + D`` with
``z = x^2 + y^2``, which reduces to a 3x3 symmetric linear system in the
point moments. The system is solved by Cholesky factorisation after moving
the origin to the point centroid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    INSUFFICIENT_AFTER_REMOVAL,
    DegenerateConfiguration,
    DetectionFailure,
    InsufficientPoints,
)


@dataclass(frozen=True)
class Circle:
    a: float
    b: float
    R: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b) and math.isfinite(self.R)):
            raise ValueError("circle parameters must be finite")
        if self.R <= 0:
            raise ValueError("circle radius must be positive")

    @property
    def center(self) -> tuple[float, float]:
        return (self.a, self.b)

    def translated(self, dx: float, dy: float) -> "Circle":
        return Circle(self.a + dx, self.b + dy, self.R)


@dataclass(frozen=True)
class FitReport:
    circle: Circle
    inliers: np.ndarray
    removed_count: int
    geometric_rms: float
    first_fit: Circle

    @property
    def inlier_count(self) -> int:
        return len(self.inliers)


def _as_points(points) -> np.ndarray:
    p = np.asarray(points, dtype=np.float64)
    if p.size == 0:
        return p.reshape(0, 2)
    if p.ndim != 2 or p.shape[1] != 2:
        raise ValueError("points must have shape (n, 2)")
    return p


def cholesky_solve3(m, rhs, rel_tol=1e-12):
    """Solve a symmetric positive-definite 3x3 system by Cholesky factorisation.

    Raises DegenerateConfiguration when a pivot is not clearly positive.
    """
    scale = max(abs(m[0][0]), abs(m[1][1]), abs(m[2][2]))
    if scale == 0:
        raise DegenerateConfiguration("degenerate configuration")
    tol = rel_tol * scale
    l00 = m[0][0]
    if l00 <= tol:
        raise DegenerateConfiguration("degenerate configuration")
    l00 = math.sqrt(l00)
    l10 = m[1][0] / l00
    l20 = m[2][0] / l00
    d1 = m[1][1] - l10 * l10
    if d1 <= tol:
        raise DegenerateConfiguration("degenerate configuration")
    l11 = math.sqrt(d1)
    l21 = (m[2][1] - l20 * l10) / l11
    d2 = m[2][2] - l20 * l20 - l21 * l21
    if d2 <= tol:
        raise DegenerateConfiguration("degenerate configuration")
    l22 = math.sqrt(d2)
    # forward substitution L y = rhs
    y0 = rhs[0] / l00
    y1 = (rhs[1] - l10 * y0) / l11
    y2 = (rhs[2] - l20 * y0 - l21 * y1) / l22
    # back substitution L^T x = y
    x2 = y2 / l22
    x1 = (y1 - l21 * x2) / l11
    x0 = (y0 - l10 * x1 - l20 * x2) / l00
    return x0, x1, x2


def algebraic_fit(points) -> Circle:
    """Algebraic least-squares circle through ``points`` (shape ``(n, 2)``)."""
    p = _as_points(points)
    n = len(p)
    if n < 3:
        raise InsufficientPoints("insufficient points")
    mx = p[:, 0].mean()
    my = p[:, 1].mean()
    u = p[:, 0] - mx
    v = p[:, 1] - my
    z = u * u + v * v
    suu = float(u @ u)
    svv = float(v @ v)
    suv = float(u @ v)
    su = float(u.sum())
    sv = float(v.sum())
    suz = float(u @ z)
    svz = float(v @ z)
    sz = float(z.sum())
    normal = ((suu, suv, su), (suv, svv, sv), (su, sv, float(n)))
    B, C, D = cholesky_solve3(normal, (-suz, -svz, -sz))
    a = -B / 2
    b = -C / 2
    r2 = a * a + b * b - D
    if not r2 > 0 or not math.isfinite(r2):
        raise DegenerateConfiguration("degenerate configuration")
    return Circle(a + mx, b + my, math.sqrt(r2))


def radial_residuals(circle: Circle, points) -> np.ndarray:
    p = _as_points(points)
    return np.hypot(p[:, 0] - circle.a, p[:, 1] - circle.b) - circle.R


def geometric_rss(circle: Circle, points) -> float:
    """Mean squared geometric distance from the points to the circle."""
    p = _as_points(points)
    if len(p) == 0:
        raise InsufficientPoints("need at least one point")
    r = radial_residuals(circle, p)
    return float(np.mean(r * r))


def double_fit(points, outlier_k: float = 2.0, min_samples: int = 8) -> FitReport:
    """Fit, drop points far from the first circle, fit again.

    A point is dropped when its absolute radial residual exceeds
    ``outlier_k`` standard deviations of all absolute residuals. Residuals at
    rounding level (below ``1e-9 * (1 + R)``) are never treated as outliers.
    """
    p = _as_points(points)
    if len(p) < max(min_samples, 3):
        raise InsufficientPoints("insufficient points")
    first = algebraic_fit(p)
    r = np.abs(radial_residuals(first, p))
    cut = max(outlier_k * float(r.std()), 1e-9 * (1.0 + first.R))
    keep = r <= cut
    removed = int(len(p) - keep.sum())
    if removed == 0:
        final = first
        inliers = p
    else:
        inliers = p[keep]
        if len(inliers) < max(min_samples, 3):
            raise DetectionFailure(
                INSUFFICIENT_AFTER_REMOVAL, "insufficient samples after outlier removal"
            )
        final = algebraic_fit(inliers)
    rms = math.sqrt(geometric_rss(final, inliers))
    return FitReport(final, inliers, removed, rms, first)
