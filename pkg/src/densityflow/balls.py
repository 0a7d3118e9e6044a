"""Smallest enclosing balls and largest inscribed balls.

``circumball`` implements a pivoting variant of the randomized smallest
enclosing ball algorithm: keep an exact ball of a small support set, pull in
the farthest outside point, and re-solve the at most ``d + 2`` point
subproblem by brute force. Each pivot strictly grows the radius, so the
iteration terminates; the result is certified by a final containment sweep.

``inball`` computes the Chebyshev center of the convex region bounded by a
shape: the ball of maximal radius inside all edge-line (face-plane)
halfspaces. It is solved as a small linear program; the flow loop uses a
warm-started support certificate so the LP only runs when the active
support set actually changes.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linprog

from .geometry import Ball, Curve2, Mesh3, Shape, curve_frame, is_convex, mesh_frame

_REL_TOL = 1e-9   # containment slack relative to the radius
_MAX_PIVOTS = 128


def _solve_small(M, rhs):
    """Solve a tiny (n <= 3) linear system by Cramer's rule, None if singular.

    Ill-conditioned systems may return inaccurate solutions; every caller
    certifies the result independently (containment or feasibility checks),
    so a bad solve degrades to a cold-path fallback, never a wrong answer.
    """
    n = M.shape[0]
    if n == 1:
        a = float(M[0, 0])
        if a == 0.0:
            return None
        return np.array([float(rhs[0]) / a])
    if n == 2:
        a, b = float(M[0, 0]), float(M[0, 1])
        c, d = float(M[1, 0]), float(M[1, 1])
        det = a * d - b * c
        if det == 0.0 or not np.isfinite(det):
            return None
        r0, r1 = float(rhs[0]), float(rhs[1])
        return np.array([(r0 * d - b * r1) / det, (a * r1 - r0 * c) / det])
    if n == 3:
        a, b, c = float(M[0, 0]), float(M[0, 1]), float(M[0, 2])
        d, e, f = float(M[1, 0]), float(M[1, 1]), float(M[1, 2])
        g, h, i = float(M[2, 0]), float(M[2, 1]), float(M[2, 2])
        co0, co1, co2 = e * i - f * h, f * g - d * i, d * h - e * g
        det = a * co0 + b * co1 + c * co2
        if det == 0.0 or not np.isfinite(det):
            return None
        r0, r1, r2 = float(rhs[0]), float(rhs[1]), float(rhs[2])
        x = r0 * co0 + r1 * (c * h - b * i) + r2 * (b * f - c * e)
        y = r0 * co1 + r1 * (a * i - c * g) + r2 * (c * d - a * f)
        z = r0 * co2 + r1 * (b * g - a * h) + r2 * (a * e - b * d)
        return np.array([x / det, y / det, z / det])
    try:
        sol = np.linalg.solve(M, rhs)
    except np.linalg.LinAlgError:
        return None
    return sol if np.all(np.isfinite(sol)) else None


def _ball_through(points: np.ndarray):
    """Smallest ball with all given points on its boundary, or None.

    The center is constrained to the affine hull of the points, which makes
    it unique; affinely dependent point sets return None and are covered by
    their subsets. Returns ``(center, radius, barycentric)`` where the
    barycentric coordinates of the center certify optimality when they are
    all nonnegative (center inside the simplex of the points).
    """
    p0 = points[0]
    if points.shape[0] == 1:
        return p0.copy(), 0.0, np.ones(1)
    diff = points[1:] - p0
    gram = 2.0 * diff @ diff.T
    rhs = np.einsum("ij,ij->i", diff, diff)
    lam = _solve_small(gram, rhs)
    if lam is None or not np.all(np.isfinite(lam)):
        return None
    center = p0 + lam @ diff
    radius = float(np.linalg.norm(center - p0))
    bary = np.concatenate([[1.0 - lam.sum()], lam])
    return center, radius, bary


def _seb_small(points: np.ndarray):
    """Exact smallest enclosing ball of at most d + 2 points (brute force)."""
    k, d = points.shape
    best = None
    best_support: Sequence[int] = ()
    from itertools import combinations

    for size in range(1, min(k, d + 1) + 1):
        for combo in combinations(range(k), size):
            sol = _ball_through(points[list(combo)])
            if sol is None:
                continue
            center, radius, _ = sol
            dmax = float(np.linalg.norm(points - center, axis=1).max())
            if dmax <= radius * (1 + 1e-10) + 1e-300:
                if best is None or radius < best[1]:
                    best = (center, radius)
                    best_support = combo
        if best is not None:
            break
    if best is None:  # numerically stuck; fall back to the full point bound
        center = points.mean(axis=0)
        radius = float(np.linalg.norm(points - center, axis=1).max())
        return center, radius, tuple(range(k))
    return best[0], best[1], best_support


def smallest_enclosing_ball(points: np.ndarray, warm: Optional[Sequence[int]] = None):
    """Exact smallest enclosing ball of a point set.

    Returns ``(center, radius, support)`` where ``support`` are indices of
    at most ``d + 1`` points determining the ball. ``warm`` seeds the
    support set, which makes repeated calls on slowly moving point sets
    nearly free.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 1:
        raise ValueError("need a (m, d) array with m >= 1")
    if pts.shape[0] == 1:
        return pts[0].copy(), 0.0, (0,)
    if warm:
        support = [i for i in dict.fromkeys(int(i) for i in warm) if 0 <= i < pts.shape[0]]
    else:
        support = []
    if len(support) >= 2:
        # fast path: the old support still determines the ball when its
        # boundary ball has the center inside the support simplex and
        # contains every point
        sol = _ball_through(pts[support])
        if sol is not None:
            center, radius, bary = sol
            if np.all(bary >= -1e-9):
                d = np.sqrt(np.sum((pts - center) ** 2, axis=1))
                dmax = float(d.max())
                if dmax <= radius * (1 + _REL_TOL):
                    return center, dmax, tuple(support)
    if len(support) < 2:
        far = int(np.argmax(np.linalg.norm(pts - pts[0], axis=1)))
        support = [0, far] if far != 0 else [0, 1]
    center, radius, local = _seb_small(pts[support])
    support = [support[i] for i in local]

    for _ in range(_MAX_PIVOTS):
        d = np.linalg.norm(pts - center, axis=1)
        far = int(np.argmax(d))
        if d[far] <= radius * (1 + _REL_TOL):
            break
        if far in support:
            break
        cand = support + [far]
        center, radius, local = _seb_small(pts[cand])
        support = [cand[i] for i in local]
    # certify containment exactly: the final radius covers every point
    radius = float(np.linalg.norm(pts - center, axis=1).max())
    return center, radius, tuple(support)


def circumball(shape_or_points) -> Ball:
    """Smallest ball enclosing the vertex set of a shape (or point array)."""
    if isinstance(shape_or_points, (Curve2, Mesh3)):
        pts = shape_or_points.vertices
    else:
        pts = np.asarray(shape_or_points, dtype=float)
    center, radius, _ = smallest_enclosing_ball(pts)
    return Ball(center, radius)


# ---------------------------------------------------------------------------
# Chebyshev center


def halfspaces(shape: Shape):
    """Outward unit normals and offsets of the edge lines or face planes."""
    if isinstance(shape, Curve2):
        fr = curve_frame(shape.vertices)
        return fr.edge_normals, fr.edge_offsets
    if isinstance(shape, Mesh3):
        fr = mesh_frame(shape.vertices, shape.faces, shape.topology())
        return fr.face_normals, fr.face_offsets
    raise TypeError(f"unsupported shape type {type(shape).__name__}")


def chebyshev_center(A: np.ndarray, b: np.ndarray):
    """Largest ball inside the halfspace intersection {x : A x <= b}.

    ``A`` rows must be unit vectors. Returns ``(center, radius, support)``;
    ``support`` is a positively spanning active set usable as a warm start,
    or None when the optimum is degenerate (slab-like regions).
    """
    m, d = A.shape
    c = np.zeros(d + 1)
    c[-1] = -1.0
    aug = np.column_stack([A, np.ones(m)])
    # the radius stays free so the program is feasible even when the
    # halfspace intersection is empty (radius then comes out negative)
    bounds = [(None, None)] * (d + 1)
    res = linprog(c, A_ub=aug, b_ub=b, bounds=bounds, method="highs")
    if not res.success:
        raise RuntimeError(f"Chebyshev LP failed: {res.message}")
    center = res.x[:d]
    radius = float(res.x[d])
    support = _active_support(A, b, center, radius)
    return center, radius, support


def _active_support(A, b, center, radius):
    """Pick d + 1 active constraints whose normals positively span, or None."""
    d = A.shape[1]
    slack = b - A @ center - radius
    scale = max(abs(radius), 1e-12)
    order = np.argsort(slack)
    tight = [int(i) for i in order[: min(len(order), 8)] if slack[i] <= 1e-7 * scale + 1e-12]
    if len(tight) < d + 1:
        return None
    from itertools import combinations

    for combo in combinations(tight, d + 1):
        if _positively_spanning(A[list(combo)]):
            return tuple(combo)
    return None


def _positively_spanning(normals) -> bool:
    """True when 0 is a convex combination of the d + 1 unit normals."""
    k, d = normals.shape
    sys = np.vstack([normals.T, np.ones(k)])
    rhs = np.zeros(d + 1)
    rhs[-1] = 1.0
    try:
        lam = np.linalg.solve(sys, rhs)
    except np.linalg.LinAlgError:
        return False
    return bool(np.all(lam >= -1e-9))


def chebyshev_warm(A, b, support):
    """Re-solve the Chebyshev center from a known support set.

    Solves the (d+1)x(d+1) equality system of the support constraints and
    certifies it against all constraints: the support value bounds the true
    optimum from above, global feasibility bounds it from below, so equality
    proves optimality. Returns ``(center, radius, support)`` or None when
    the certificate fails (the caller then does a cold solve).
    """
    if support is None:
        return None
    d = A.shape[1]
    idx = list(support)
    if len(idx) != d + 1:
        return None
    sub = A[idx]
    sys = np.empty((d + 1, d + 1))
    sys[:, :d] = sub
    sys[:, d] = 1.0
    sol = _solve_small(sys, b[idx])
    if sol is None:
        return None
    # positive spanning of the support normals: 0 in their convex hull,
    # which is the same linear system transposed
    rhs = np.zeros(d + 1)
    rhs[d] = 1.0
    lam = _solve_small(np.ascontiguousarray(sys.T), rhs)
    if lam is None:
        return None
    center, r_support = sol[:d], float(sol[d])
    if not np.isfinite(r_support):
        return None
    if float(lam.min()) < -1e-9:
        return None
    r_global = float(np.min(b - A @ center))
    if r_global >= r_support - 1e-9 * max(r_support, 1.0) - 1e-15:
        return center, max(r_global, 0.0), tuple(support)
    return None


def inball(shape: Shape) -> Ball:
    """Chebyshev ball: maximal ball inside the enclosed convex region.

    Defined here only for convex shapes; non-convex input is rejected with
    the violating pair in the message.
    """
    ok, witness = is_convex(shape)
    if not ok:
        raise ValueError(f"inball requires a convex shape; violation at {witness}")
    A, b = halfspaces(shape)
    center, radius, _ = chebyshev_center(A, b)
    return Ball(center, radius)


class InscribedBallTracker:
    """Warm-started Chebyshev radii for a smoothly deforming shape."""

    def __init__(self):
        self.support = None

    def radius(self, A, b):
        hit = chebyshev_warm(A, b, self.support)
        if hit is None:
            center, radius, self.support = chebyshev_center(A, b)
            return center, radius
        center, radius, self.support = hit
        return center, radius


class EnclosingBallTracker:
    """Warm-started smallest enclosing balls for a moving point set."""

    def __init__(self):
        self.support = None

    def ball(self, points):
        center, radius, self.support = smallest_enclosing_ball(points, warm=self.support)
        return center, radius
