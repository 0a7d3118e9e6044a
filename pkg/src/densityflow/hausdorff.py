"""Symmetric Hausdorff distance between discrete shapes.

Distances are measured vertex-to-element (point to segment in the plane,
point to triangle in space), never vertex-to-vertex, so the metric compares
swept geometry and is insensitive to tangential reparametrization.
"""

from __future__ import annotations

import numpy as np

from .geometry import Curve2, Mesh3, Shape

_CHUNK = 131072  # cap on points x elements per broadcast block


def points_to_segments(points, starts, ends):
    """Min distance from each point to a set of closed segments."""
    P = np.asarray(points, dtype=float)
    A = np.asarray(starts, dtype=float)
    E = np.asarray(ends, dtype=float) - A
    ee = np.einsum("ij,ij->i", E, E)
    out = np.empty(P.shape[0])
    block = max(1, _CHUNK // max(A.shape[0], 1))
    for s in range(0, P.shape[0], block):
        p = P[s:s + block, None, :]
        ap = p - A[None, :, :]
        t = np.einsum("pse,se->ps", ap, E) / ee[None, :]
        np.clip(t, 0.0, 1.0, out=t)
        closest = A[None, :, :] + t[:, :, None] * E[None, :, :]
        d2 = np.sum((p - closest) ** 2, axis=2)
        out[s:s + block] = np.sqrt(d2.min(axis=1))
    return out


def points_to_triangles(points, tri_a, tri_b, tri_c):
    """Min distance from each point to a set of triangles.

    Closest-point classification over the seven Voronoi regions of a
    triangle (corners, edges, interior), vectorized over point blocks.
    """
    P = np.asarray(points, dtype=float)
    a = np.asarray(tri_a, dtype=float)
    ab = np.asarray(tri_b, dtype=float) - a
    ac = np.asarray(tri_c, dtype=float) - a
    bc = ac - ab
    out = np.empty(P.shape[0])
    block = max(1, _CHUNK // max(a.shape[0], 1))
    for s in range(0, P.shape[0], block):
        p = P[s:s + block, None, :]
        ap = p - a[None, :, :]
        d1 = np.einsum("pte,te->pt", ap, ab)
        d2 = np.einsum("pte,te->pt", ap, ac)
        bp = ap - ab[None, :, :]
        d3 = np.einsum("pte,te->pt", bp, ab)
        d4 = np.einsum("pte,te->pt", bp, ac)
        cp = ap - ac[None, :, :]
        d5 = np.einsum("pte,te->pt", cp, ab)
        d6 = np.einsum("pte,te->pt", cp, ac)

        va = d3 * d6 - d5 * d4
        vb = d5 * d2 - d1 * d6
        vc = d1 * d4 - d3 * d2

        with np.errstate(divide="ignore", invalid="ignore"):
            t_ab = d1 / (d1 - d3)
            t_ac = d2 / (d2 - d6)
            t_bc = (d4 - d3) / ((d4 - d3) + (d5 - d6))
            denom = va + vb + vc
            v = vb / denom
            w = vc / denom

        # interior by default, then overwrite in priority order
        u = np.stack([v, w], axis=-1)
        closest = a[None, :, :] + u[..., 0:1] * ab[None, :, :] + u[..., 1:2] * ac[None, :, :]

        on_bc = (va <= 0) & ((d4 - d3) >= 0) & ((d5 - d6) >= 0)
        t = np.clip(np.nan_to_num(t_bc), 0.0, 1.0)[..., None]
        cand = a[None, :, :] + ab[None, :, :] + t * bc[None, :, :]
        closest = np.where(on_bc[..., None], cand, closest)

        on_ac = (vb <= 0) & (d2 >= 0) & (d6 <= 0)
        t = np.clip(np.nan_to_num(t_ac), 0.0, 1.0)[..., None]
        cand = a[None, :, :] + t * ac[None, :, :]
        closest = np.where(on_ac[..., None], cand, closest)

        on_ab = (vc <= 0) & (d1 >= 0) & (d3 <= 0)
        t = np.clip(np.nan_to_num(t_ab), 0.0, 1.0)[..., None]
        cand = a[None, :, :] + t * ab[None, :, :]
        closest = np.where(on_ab[..., None], cand, closest)

        at_c = (d6 >= 0) & (d5 <= d6)
        closest = np.where(at_c[..., None], (a + ac)[None, :, :], closest)
        at_b = (d3 >= 0) & (d4 <= d3)
        closest = np.where(at_b[..., None], (a + ab)[None, :, :], closest)
        at_a = (d1 <= 0) & (d2 <= 0)
        closest = np.where(at_a[..., None], a[None, :, :], closest)

        d2min = np.sum((p - closest) ** 2, axis=2).min(axis=1)
        out[s:s + block] = np.sqrt(d2min)
    return out


def points_to_shape(points, shape: Shape):
    """Distance from each point to the boundary of a shape."""
    if isinstance(shape, Curve2):
        V = shape.vertices
        return points_to_segments(points, V, np.roll(V, -1, axis=0))
    if isinstance(shape, Mesh3):
        V, F = shape.vertices, shape.faces
        return points_to_triangles(points, V[F[:, 0]], V[F[:, 1]], V[F[:, 2]])
    raise TypeError(f"unsupported shape type {type(shape).__name__}")


def hausdorff_distance(a: Shape, b: Shape) -> float:
    """Symmetric vertex-to-element Hausdorff distance between two shapes."""
    if a.ambient_dim != b.ambient_dim:
        raise ValueError("shapes live in different ambient dimensions")
    d_ab = points_to_shape(a.vertices, b).max()
    d_ba = points_to_shape(b.vertices, a).max()
    return float(max(d_ab, d_ba))
