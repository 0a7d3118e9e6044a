"""Parametric shape generators used as flow initial data and test fixtures."""

from __future__ import annotations

import math

import numpy as np

from .balls import smallest_enclosing_ball
from .geometry import Curve2, InvalidShapeError, Mesh3

MIN_CURVE_VERTICES = 8


def circle(radius: float, m: int = 256, center=(0.0, 0.0)) -> Curve2:
    """Regular m-gon inscribed in a circle (circumradius exactly ``radius``)."""
    if radius <= 0:
        raise InvalidShapeError("circle radius must be positive")
    if m < MIN_CURVE_VERTICES:
        raise InvalidShapeError(f"need at least {MIN_CURVE_VERTICES} vertices, got {m}")
    th = np.linspace(0.0, 2.0 * np.pi, m, endpoint=False)
    V = np.column_stack([radius * np.cos(th), radius * np.sin(th)])
    return Curve2(V + np.asarray(center, dtype=float))


def ellipse(a: float, b: float, m: int = 256, center=(0.0, 0.0)) -> Curve2:
    """Ellipse with semi-axes ``a``, ``b`` sampled at uniform parameter angles."""
    if a <= 0 or b <= 0:
        raise InvalidShapeError("ellipse semi-axes must be positive")
    if m < MIN_CURVE_VERTICES:
        raise InvalidShapeError(f"need at least {MIN_CURVE_VERTICES} vertices, got {m}")
    th = np.linspace(0.0, 2.0 * np.pi, m, endpoint=False)
    V = np.column_stack([a * np.cos(th), b * np.sin(th)])
    return Curve2(V + np.asarray(center, dtype=float))


def rounded_square(side: float, corner_radius: float, m: int = 256,
                   center=(0.0, 0.0)) -> Curve2:
    """Square with circular corner fillets, sampled uniformly by arc length."""
    if side <= 0:
        raise InvalidShapeError("side must be positive")
    if not 0 < corner_radius <= side / 2:
        raise InvalidShapeError("corner radius must lie in (0, side/2]")
    if m < MIN_CURVE_VERTICES:
        raise InvalidShapeError(f"need at least {MIN_CURVE_VERTICES} vertices, got {m}")
    h = side / 2.0
    r = corner_radius
    f = h - r  # half length of each straight run
    straight = 2.0 * f
    arc = (math.pi / 2.0) * r
    quarter = straight + arc
    perimeter = 4.0 * quarter

    # quarters walked counterclockwise: straight run, then the corner arc
    corners = [(f, -f), (f, f), (-f, f), (-f, -f)]
    arc_starts = [-math.pi / 2.0, 0.0, math.pi / 2.0, math.pi]

    def point_at(s: float):
        k = int(s // quarter) % 4
        u = s - (s // quarter) * quarter
        cx, cy = corners[k]
        a0 = arc_starts[k]
        if u < straight:
            dx, dy = -math.sin(a0), math.cos(a0)
            t = u - straight  # back off from the arc start, t in [-2f, 0)
            return (cx + r * math.cos(a0) + t * dx,
                    cy + r * math.sin(a0) + t * dy)
        ang = a0 + (u - straight) / r
        return cx + r * math.cos(ang), cy + r * math.sin(ang)

    ss = (np.arange(m) / m) * perimeter
    pts = np.array([point_at(s) for s in ss])
    return Curve2(pts + np.asarray(center, dtype=float))


def random_convex(m: int, seed: int) -> Curve2:
    """Random convex polygon with exactly ``m`` vertices (Valtr construction).

    Deterministic for a fixed seed; recentered at its centroid and rescaled
    to circumradius 1.
    """
    if m < MIN_CURVE_VERTICES:
        raise InvalidShapeError(f"need at least {MIN_CURVE_VERTICES} vertices, got {m}")
    rng = np.random.default_rng(seed)

    def edge_components(values):
        vals = np.sort(values)
        lo, hi = vals[0], vals[-1]
        mid = vals[1:-1]
        side = rng.random(m - 2) < 0.5
        up = np.concatenate([[lo], mid[side], [hi]])
        down = np.concatenate([[lo], mid[~side], [hi]])
        return np.concatenate([np.diff(up), -np.diff(down)])

    dx = edge_components(rng.random(m))
    dy = edge_components(rng.random(m))
    rng.shuffle(dy)
    vec = np.column_stack([dx, dy])
    ang = np.arctan2(vec[:, 1], vec[:, 0])
    vec = vec[np.argsort(ang, kind="stable")]
    pts = np.cumsum(vec, axis=0)
    pts -= pts.mean(axis=0)
    center, radius, _ = smallest_enclosing_ball(pts)
    pts = (pts - center) / radius
    return Curve2(pts)


# ---------------------------------------------------------------------------
# meshes


def _icosahedron():
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    verts = np.array([
        (-1, phi, 0), (1, phi, 0), (-1, -phi, 0), (1, -phi, 0),
        (0, -1, phi), (0, 1, phi), (0, -1, -phi), (0, 1, -phi),
        (phi, 0, -1), (phi, 0, 1), (-phi, 0, -1), (-phi, 0, 1),
    ], dtype=float)
    verts /= np.linalg.norm(verts[0])
    faces = np.array([
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ], dtype=np.int64)
    return verts, faces


def _subdivide(verts, faces):
    verts = list(map(tuple, verts))
    cache = {}

    def midpoint(i, j):
        key = (i, j) if i < j else (j, i)
        if key not in cache:
            a = np.asarray(verts[i])
            b = np.asarray(verts[j])
            verts.append(tuple((a + b) / 2.0))
            cache[key] = len(verts) - 1
        return cache[key]

    new_faces = []
    for a, b, c in faces:
        ab = midpoint(a, b)
        bc = midpoint(b, c)
        ca = midpoint(c, a)
        new_faces += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
    return np.asarray(verts, dtype=float), np.asarray(new_faces, dtype=np.int64)


def icosphere(radius: float, subdivisions: int = 3, center=(0.0, 0.0, 0.0)) -> Mesh3:
    """Geodesic sphere: subdivided icosahedron projected to the sphere."""
    if radius <= 0:
        raise InvalidShapeError("sphere radius must be positive")
    if not 0 <= subdivisions <= 7:
        raise InvalidShapeError("subdivisions must be in [0, 7]")
    verts, faces = _icosahedron()
    for _ in range(subdivisions):
        verts, faces = _subdivide(verts, faces)
    verts = verts / np.linalg.norm(verts, axis=1)[:, None] * radius
    return Mesh3(verts + np.asarray(center, dtype=float), faces)


def ellipsoid(a: float, b: float, c: float, subdivisions: int = 3) -> Mesh3:
    """Axis-aligned ellipsoid obtained by scaling an icosphere."""
    if min(a, b, c) <= 0:
        raise InvalidShapeError("ellipsoid semi-axes must be positive")
    sphere = icosphere(1.0, subdivisions)
    verts = sphere.vertices * np.array([a, b, c])
    return Mesh3(verts, sphere.faces)


# ---------------------------------------------------------------------------
# spec strings (CLI surface)


def generate_shape(spec: str):
    """Build a shape from a compact spec string.

    Grammar (positional, comma separated):

    - ``circle:radius[,m[,cx,cy]]``
    - ``ellipse:a,b[,m[,cx,cy]]``
    - ``rounded_square:side,corner_radius[,m[,cx,cy]]``
    - ``random_convex:m,seed``
    - ``icosphere:radius[,subdivisions[,cx,cy,cz]]``
    - ``ellipsoid:a,b,c[,subdivisions]``
    """
    kind, _, rest = spec.partition(":")
    kind = kind.strip().lower()
    args = [s.strip() for s in rest.split(",") if s.strip()] if rest else []

    def fl(i, default=None):
        if i < len(args):
            return float(args[i])
        if default is None:
            raise ValueError(f"shape spec '{spec}' is missing argument {i + 1}")
        return default

    def integer(i, default=None):
        return int(fl(i, default))

    if kind == "circle":
        return circle(fl(0), integer(1, 256), (fl(2, 0.0), fl(3, 0.0)))
    if kind == "ellipse":
        return ellipse(fl(0), fl(1), integer(2, 256), (fl(3, 0.0), fl(4, 0.0)))
    if kind == "rounded_square":
        return rounded_square(fl(0), fl(1), integer(2, 256), (fl(3, 0.0), fl(4, 0.0)))
    if kind == "random_convex":
        return random_convex(integer(0), integer(1, 0))
    if kind == "icosphere":
        return icosphere(fl(0), integer(1, 3), (fl(2, 0.0), fl(3, 0.0), fl(4, 0.0)))
    if kind == "ellipsoid":
        return ellipsoid(fl(0), fl(1), fl(2), integer(3, 3))
    raise ValueError(f"unknown shape kind '{kind}' in spec '{spec}'")
