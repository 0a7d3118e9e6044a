import numpy as np
import pytest

from densityflow import Curve2, circle, ellipse, icosphere


@pytest.fixture(scope="session")
def unit_circle_256():
    return circle(1.0, 256)


@pytest.fixture(scope="session")
def sphere_sub3():
    return icosphere(1.0, 3)


def square_curve(side=1.0, per_side=64, center=(0.0, 0.0)):
    """Axis-aligned square subdivided into collinear vertices, CCW."""
    h = side / 2.0
    corners = np.array([(-h, -h), (h, -h), (h, h), (-h, h)])
    pts = []
    for k in range(4):
        a, b = corners[k], corners[(k + 1) % 4]
        for j in range(per_side):
            pts.append(a + (b - a) * (j / per_side))
    return Curve2(np.asarray(pts) + np.asarray(center))


def star_curve(m=16, r_outer=1.0, r_inner=0.4):
    """Non-convex star polygon with alternating radii."""
    th = np.linspace(0.0, 2.0 * np.pi, m, endpoint=False)
    r = np.where(np.arange(m) % 2 == 0, r_outer, r_inner)
    return Curve2(np.column_stack([r * np.cos(th), r * np.sin(th)]))


def right_triangle_345(per_side=16):
    """3-4-5 right triangle walked CCW with subdivided edges."""
    corners = np.array([(0.0, 0.0), (4.0, 0.0), (0.0, 3.0)])
    pts = []
    for k in range(3):
        a, b = corners[k], corners[(k + 1) % 3]
        for j in range(per_side):
            pts.append(a + (b - a) * (j / per_side))
    return Curve2(np.asarray(pts))
