"""Pinhole camera with radial-tangential distortion.

Forward model (normalized image-plane point (x, y)):

    r2 = x^2 + y^2
    radial = 1 + k1*r2 + k2*r2^2
    x_d = x*radial + 2*p1*x*y + p2*(r2 + 2*x^2)
    y_d = y*radial + p1*(r2 + 2*y^2) + 2*p2*x*y
    u = fx*x_d + cx,  v = fy*y_d + cy

Undistortion inverts this by fixed-point iteration, which contracts for
moderate distortion (validated by tests over |k1|<=0.3, |k2|<=0.1,
|p1|,|p2|<=0.01, r<=0.8).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConvergenceError

# The iteration cap and tolerance are sized so that the round trip
# project(undistort(p)) lands within 1e-6 px across the validated
# coefficient range; see tests/test_camera.py.
MAX_ITERS = 100
UPDATE_TOL = 1e-12
RESIDUAL_TOL = 1e-3


@dataclass(frozen=True)
class PinholeRadTan:
    fx: float
    fy: float
    cx: float
    cy: float
    k1: float = 0.0
    k2: float = 0.0
    p1: float = 0.0
    p2: float = 0.0

    def __post_init__(self):
        if self.fx <= 0 or self.fy <= 0:
            raise ValueError("focal lengths must be positive, got fx=%g fy=%g" % (self.fx, self.fy))

    def distort(self, x: float, y: float) -> tuple[float, float]:
        """Apply radial-tangential distortion in normalized coordinates."""
        r2 = x * x + y * y
        radial = 1.0 + self.k1 * r2 + self.k2 * r2 * r2
        xd = x * radial + 2.0 * self.p1 * x * y + self.p2 * (r2 + 2.0 * x * x)
        yd = y * radial + self.p1 * (r2 + 2.0 * y * y) + 2.0 * self.p2 * x * y
        return xd, yd

    def project(self, x: float, y: float) -> tuple[float, float]:
        """Normalized image-plane point -> distorted pixel coordinates."""
        xd, yd = self.distort(x, y)
        return self.fx * xd + self.cx, self.fy * yd + self.cy

    def undistort_pixel(self, u: float, v: float) -> tuple[float, float]:
        """Pixel -> undistorted normalized coordinates (inverse of project).

        Fixed-point iteration: starting from the distorted normalized point,
        repeatedly divide out the radial factor and subtract the tangential
        offset evaluated at the current estimate. Raises ConvergenceError if
        the residual is still above RESIDUAL_TOL after MAX_ITERS.
        """
        x0 = (u - self.cx) / self.fx
        y0 = (v - self.cy) / self.fy
        x, y = x0, y0
        for _ in range(MAX_ITERS):
            r2 = x * x + y * y
            radial = 1.0 + self.k1 * r2 + self.k2 * r2 * r2
            tx = 2.0 * self.p1 * x * y + self.p2 * (r2 + 2.0 * x * x)
            ty = self.p1 * (r2 + 2.0 * y * y) + 2.0 * self.p2 * x * y
            x_new = (x0 - tx) / radial
            y_new = (y0 - ty) / radial
            delta = math.hypot(x_new - x, y_new - y)
            x, y = x_new, y_new
            if delta < UPDATE_TOL:
                break
        xd, yd = self.distort(x, y)
        residual = math.hypot(xd - x0, yd - y0)
        if residual > RESIDUAL_TOL:
            raise ConvergenceError(
                "undistortion of (%g, %g) did not converge: residual %g" % (u, v, residual),
                residual,
            )
        return x, y
