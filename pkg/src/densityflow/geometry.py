"""Discrete closed hypersurfaces and their differential geometry.

Two shape types are supported: ``Curve2``, a closed oriented polygon in the
plane, and ``Mesh3``, a closed oriented triangle mesh in 3-space. Both are
immutable wrappers around numpy arrays and are validated on construction.

Orientation and sign conventions, used consistently by every module:

* normals point outward (counterclockwise curves, positive enclosed volume),
* the scalar curvature ``H`` is the sum of principal curvatures and is
  nonnegative where the shape is locally convex: a circle of radius ``rho``
  has ``H = 1/rho``, a sphere has ``H = 2/rho``.

Curve curvature uses the length-gradient (edge bisector) formula, so that
the discrete curve shortening flow is the exact gradient flow of polygon
length. Mesh curvature uses cotangent weights with mixed Voronoi vertex
areas (circumcentric corners, with the standard halving fallback for obtuse
triangles); plain barycentric areas overshoot curvature by about 15% at the
twelve irregular vertices of a geodesic sphere, which mixed areas reduce to
round-off. Both schemes are calibrated against round shapes in the test
suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np


class InvalidShapeError(ValueError):
    """Raised when a shape violates its construction invariants."""


# Vertices closer than this (relative to diameter) make an edge degenerate.
_EDGE_FLOOR = 1e-14

# Default convexity slack, relative to the shape diameter.
CONVEXITY_TOL = 1e-9

# Triangles with a corner angle below this (radians) are reported as
# near-degenerate by the mesh curvature operator.
MIN_ANGLE_FLOOR = 0.02


def _as_float_array(values, dim, what):
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != dim:
        raise InvalidShapeError(f"{what} must have shape (m, {dim}), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        bad = int(np.argwhere(~np.isfinite(arr).all(axis=1))[0, 0])
        raise InvalidShapeError(f"{what} contains a non-finite entry at index {bad}")
    return arr


def _freeze(arr):
    arr = np.ascontiguousarray(arr)
    arr.flags.writeable = False
    return arr


class Curve2:
    """Closed oriented polygon in the plane.

    The polygon is closed by convention (the last vertex connects to the
    first). Invariants enforced on construction: at least 8 vertices, all
    edges of positive length, counterclockwise orientation (positive signed
    area), and simplicity (no self intersections). Clockwise input is
    reversed when ``auto_orient`` is set, otherwise rejected.
    """

    __slots__ = ("vertices",)

    n = 1            # intrinsic dimension
    ambient_dim = 2

    def __init__(self, vertices, auto_orient: bool = False, validate: bool = True):
        arr = _as_float_array(vertices, 2, "curve vertices")
        if validate:
            arr = _validate_curve(arr, auto_orient=auto_orient)
        self.vertices = _freeze(arr)

    @classmethod
    def _wrap(cls, vertices) -> "Curve2":
        """Wrap vertices that are already known to satisfy the invariants."""
        obj = object.__new__(cls)
        obj.vertices = _freeze(np.asarray(vertices, dtype=float))
        return obj

    def __len__(self):
        return self.vertices.shape[0]

    def translated(self, offset) -> "Curve2":
        return Curve2._wrap(self.vertices + np.asarray(offset, dtype=float))

    def scaled(self, factor: float) -> "Curve2":
        if factor <= 0:
            raise InvalidShapeError("scale factor must be positive")
        return Curve2._wrap(self.vertices * float(factor))

    def with_vertices(self, vertices, validate: bool = True) -> "Curve2":
        return Curve2(vertices, validate=validate) if validate else Curve2._wrap(vertices)

    def __repr__(self):
        return f"Curve2({len(self)} vertices)"


class Mesh3:
    """Closed oriented triangle mesh in 3-space.

    Invariants: every edge is shared by exactly two faces with opposite
    induced orientation (closed 2-manifold), Euler characteristic 2, a
    consistent outward orientation (positive enclosed volume) and no
    degenerate faces.
    """

    __slots__ = ("vertices", "faces", "_topology")

    n = 2
    ambient_dim = 3

    def __init__(self, vertices, faces, validate: bool = True):
        varr = _as_float_array(vertices, 3, "mesh vertices")
        farr = np.asarray(faces, dtype=np.int64)
        if farr.ndim != 2 or farr.shape[1] != 3:
            raise InvalidShapeError(f"faces must have shape (f, 3), got {farr.shape}")
        if validate:
            _validate_mesh(varr, farr)
        self.vertices = _freeze(varr)
        self.faces = _freeze(farr)
        self._topology = None

    @classmethod
    def _wrap(cls, vertices, faces) -> "Mesh3":
        obj = object.__new__(cls)
        obj.vertices = _freeze(np.asarray(vertices, dtype=float))
        obj.faces = faces if isinstance(faces, np.ndarray) else np.asarray(faces, dtype=np.int64)
        obj._topology = None
        return obj

    def __len__(self):
        return self.vertices.shape[0]

    def translated(self, offset) -> "Mesh3":
        m = Mesh3._wrap(self.vertices + np.asarray(offset, dtype=float), self.faces)
        m._topology = self._topology
        return m

    def scaled(self, factor: float) -> "Mesh3":
        if factor <= 0:
            raise InvalidShapeError("scale factor must be positive")
        m = Mesh3._wrap(self.vertices * float(factor), self.faces)
        m._topology = self._topology
        return m

    def with_vertices(self, vertices, validate: bool = True) -> "Mesh3":
        m = Mesh3(vertices, self.faces) if validate else Mesh3._wrap(vertices, self.faces)
        if not validate:
            m._topology = self._topology
        return m

    def topology(self) -> "MeshTopology":
        if self._topology is None:
            self._topology = MeshTopology.from_faces(self.faces, len(self))
        return self._topology

    def __repr__(self):
        return f"Mesh3({len(self)} vertices, {self.faces.shape[0]} faces)"


Shape = Union[Curve2, Mesh3]


@dataclass(frozen=True)
class Ball:
    """Ball given by center point and nonnegative radius."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float)
        object.__setattr__(self, "center", _freeze(c))
        if not np.isfinite(self.radius) or self.radius < 0:
            raise ValueError(f"ball radius must be finite and nonnegative, got {self.radius}")

    def contains(self, points, tol: float = 0.0) -> bool:
        pts = np.asarray(points, dtype=float)
        d = np.linalg.norm(pts - self.center, axis=-1)
        return bool(np.all(d <= self.radius + tol))


# ---------------------------------------------------------------------------
# validation


def signed_area(vertices) -> float:
    """Shoelace area of a closed polygon, positive for counterclockwise."""
    v = np.asarray(vertices, dtype=float)
    x, y = v[:, 0], v[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    return 0.5 * float(np.sum(x * yn - xn * y))


def _validate_curve(arr, auto_orient=False):
    m = arr.shape[0]
    if m < 8:
        raise InvalidShapeError(f"curve needs at least 8 vertices, got {m}")
    edges = np.roll(arr, -1, axis=0) - arr
    lengths = np.hypot(edges[:, 0], edges[:, 1])
    scale = max(float(np.ptp(arr, axis=0).max()), 1.0)
    short = np.nonzero(lengths <= _EDGE_FLOOR * scale)[0]
    if short.size:
        raise InvalidShapeError(f"degenerate edge of zero length at index {int(short[0])}")
    area = signed_area(arr)
    if area < 0:
        if not auto_orient:
            raise InvalidShapeError(
                "curve is clockwise (negative signed area); pass auto_orient=True to reverse"
            )
        arr = arr[::-1].copy()
        edges = np.roll(arr, -1, axis=0) - arr
        lengths = np.hypot(edges[:, 0], edges[:, 1])
        area = -area
    if area == 0.0:
        raise InvalidShapeError("curve encloses zero signed area")
    # A convex closed polygon with positive area cannot self-intersect, so
    # the quadratic simplicity test only runs for non-convex input.
    if not _curve_convex_quick(arr, edges, lengths):
        bad = _curve_self_intersection(arr, edges)
        if bad is not None:
            raise InvalidShapeError(f"curve self-intersects: edges {bad[0]} and {bad[1]} cross")
    return arr


def _curve_convex_quick(arr, edges, lengths) -> bool:
    turn = edges[:, 0] * np.roll(edges[:, 1], -1) - edges[:, 1] * np.roll(edges[:, 0], -1)
    tol = CONVEXITY_TOL * float(lengths.max()) ** 2
    return bool(np.all(turn >= -tol))


def _curve_self_intersection(arr, edges, block: int = 256):
    """Find a properly crossing pair of non-adjacent edges, or None."""
    m = arr.shape[0]
    P = arr
    Q = arr + edges
    idx = np.arange(m)
    for start in range(0, m, block):
        rows = idx[start:start + block]
        p1 = P[rows][:, None, :]
        q1 = Q[rows][:, None, :]
        p2 = P[None, :, :]
        q2 = Q[None, :, :]

        def cross(o, a, b):
            return (a[..., 0] - o[..., 0]) * (b[..., 1] - o[..., 1]) - (
                a[..., 1] - o[..., 1]
            ) * (b[..., 0] - o[..., 0])

        d1 = cross(p2, q2, p1)
        d2 = cross(p2, q2, q1)
        d3 = cross(p1, q1, p2)
        d4 = cross(p1, q1, q2)
        hit = (d1 * d2 < 0) & (d3 * d4 < 0)
        # mask self and adjacent pairs (shared endpoint is not a crossing)
        j = idx[None, :]
        i = rows[:, None]
        adjacent = (i == j) | ((i + 1) % m == j) | ((j + 1) % m == i)
        hit &= ~adjacent
        if hit.any():
            a, b = np.argwhere(hit)[0]
            return int(rows[a]), int(b)
    return None


def _validate_mesh(varr, farr):
    nv = varr.shape[0]
    if nv < 4:
        raise InvalidShapeError(f"mesh needs at least 4 vertices, got {nv}")
    if farr.min(initial=0) < 0 or farr.max(initial=-1) >= nv:
        raise InvalidShapeError("face references a vertex index out of range")
    same = (farr[:, 0] == farr[:, 1]) | (farr[:, 1] == farr[:, 2]) | (farr[:, 0] == farr[:, 2])
    if same.any():
        raise InvalidShapeError(f"face {int(np.nonzero(same)[0][0])} repeats a vertex")
    pa, pb, pc = varr[farr[:, 0]], varr[farr[:, 1]], varr[farr[:, 2]]
    cr = np.cross(pb - pa, pc - pa)
    areas2 = np.linalg.norm(cr, axis=1)
    scale = max(float(np.ptp(varr, axis=0).max()), 1.0)
    flat = np.nonzero(areas2 <= (_EDGE_FLOOR * scale) ** 2)[0]
    if flat.size:
        raise InvalidShapeError(f"face {int(flat[0])} is degenerate (zero area)")
    # Directed edges: each must appear exactly once, and its reverse exactly
    # once, for a closed oriented 2-manifold.
    i = farr[:, [0, 1, 2]].ravel()
    j = farr[:, [1, 2, 0]].ravel()
    owner = np.repeat(np.arange(farr.shape[0]), 3)
    directed = i * np.int64(nv) + j
    uniq, counts = np.unique(directed, return_counts=True)
    if counts.max(initial=0) > 1:
        dup = uniq[np.argmax(counts)]
        faces_with = owner[directed == dup]
        raise InvalidShapeError(
            f"face {int(faces_with[1])} repeats directed edge "
            f"({int(dup // nv)},{int(dup % nv)}): flipped or duplicate face"
        )
    reverse = j * np.int64(nv) + i
    missing = ~np.isin(directed, reverse)
    if missing.any():
        k = int(np.nonzero(missing)[0][0])
        raise InvalidShapeError(
            f"boundary or non-manifold edge ({int(i[k])},{int(j[k])}) at face {int(owner[k])}"
        )
    n_edges = uniq.size // 2
    euler = nv - n_edges + farr.shape[0]
    if euler != 2:
        raise InvalidShapeError(f"Euler characteristic is {euler}, expected 2 (sphere topology)")
    vol = float(np.sum(pa * cr) / 6.0)
    if vol <= 0:
        raise InvalidShapeError(
            f"mesh has non-positive enclosed volume {vol:.3e}: orientation is inward"
        )


# ---------------------------------------------------------------------------
# per-vertex frames (array-level kernels shared with the flow loop)


class CurveFrame(NamedTuple):
    """Per-step geometric quantities of a polygon, computed in one pass."""

    edge_lengths: np.ndarray   # (m,)
    h_min: float
    length: float
    area: float                # signed enclosed area
    H: np.ndarray              # (m,) curvature, >= 0 on convex parts
    normals: np.ndarray        # (m, 2) outward unit normals
    dual: np.ndarray           # (m,) dual (lumped) lengths
    position_normal: np.ndarray  # (m,) <F, N>
    radii: np.ndarray          # (m,) |F|
    edge_normals: np.ndarray   # (m, 2) outward unit normals of the edges
    edge_offsets: np.ndarray   # (m,) <edge normal, edge point>
    midpoints: np.ndarray      # (m, 2) edge midpoints


# cyclic neighbor index arrays, memoized per vertex count (read-only values,
# safe to share across concurrent readers)
_CYCLE_CACHE: dict = {}


def _cycle_indices(m: int):
    hit = _CYCLE_CACHE.get(m)
    if hit is None:
        nxt = np.arange(1, m + 1)
        nxt[-1] = 0
        prv = np.arange(-1, m - 1)
        prv[0] = m - 1
        hit = (nxt, prv)
        _CYCLE_CACHE[m] = hit
    return hit


def curve_frame(V: np.ndarray) -> CurveFrame:
    m = V.shape[0]
    nxt_i, prv_i = _cycle_indices(m)
    nxt = V[nxt_i]
    e = nxt - V
    el = np.hypot(e[:, 0], e[:, 1])
    h_min = float(el.min())
    if h_min <= 0.0:
        raise InvalidShapeError("degenerate edge of zero length")
    el_prev = el[prv_i]
    dual = 0.5 * (el + el_prev)
    # curvature vector: sum of unit chords to both neighbors over dual length
    u = e / el[:, None]
    kvec = (u - u[prv_i]) / dual[:, None]
    chord = nxt - V[prv_i]
    clen = np.hypot(chord[:, 0], chord[:, 1])
    if float(clen.min()) <= 0.0:
        raise InvalidShapeError("coincident neighbor vertices (zero chord)")
    normals = np.empty_like(V)
    normals[:, 0] = chord[:, 1] / clen
    normals[:, 1] = -chord[:, 0] / clen
    H = -(kvec[:, 0] * normals[:, 0] + kvec[:, 1] * normals[:, 1])
    pos_n = V[:, 0] * normals[:, 0] + V[:, 1] * normals[:, 1]
    radii = np.hypot(V[:, 0], V[:, 1])
    edge_normals = np.empty_like(V)
    edge_normals[:, 0] = e[:, 1] / el
    edge_normals[:, 1] = -e[:, 0] / el
    edge_offsets = edge_normals[:, 0] * V[:, 0] + edge_normals[:, 1] * V[:, 1]
    area = 0.5 * float(np.sum(V[:, 0] * nxt[:, 1] - nxt[:, 0] * V[:, 1]))
    mids = 0.5 * (V + nxt)
    return CurveFrame(el, h_min, float(el.sum()), area, H, normals, dual,
                      pos_n, radii, edge_normals, edge_offsets, mids)


@dataclass
class MeshTopology:
    """Precomputed index arrays for cotangent assembly on a fixed face list."""

    nv: int
    corner_rows: np.ndarray   # (6f,) accumulation targets i of w_ij (x_j - x_i)
    corner_cols: np.ndarray   # (6f,) sources j
    vertex_rows: np.ndarray   # (3f,) face corners flattened for area/normal sums

    @classmethod
    def from_faces(cls, faces, nv) -> "MeshTopology":
        a, b, c = faces[:, 0], faces[:, 1], faces[:, 2]
        rows = np.concatenate([b, c, a, c, a, b])
        cols = np.concatenate([c, b, c, a, b, a])
        vrows = np.concatenate([a, b, c])
        return cls(nv=nv, corner_rows=rows, corner_cols=cols, vertex_rows=vrows)


class MeshFrame(NamedTuple):
    h_min: float
    area: float                # total surface area
    volume: float              # signed enclosed volume
    H: np.ndarray              # (m,)
    normals: np.ndarray        # (m, 3) outward unit vertex normals
    dual: np.ndarray           # (m,) barycentric vertex areas
    position_normal: np.ndarray
    radii: np.ndarray
    face_normals: np.ndarray   # (f, 3) unit
    face_offsets: np.ndarray   # (f,)
    face_areas: np.ndarray     # (f,)
    centroids: np.ndarray      # (f, 3)
    min_angle: float


def mesh_frame(V: np.ndarray, faces: np.ndarray, topo: MeshTopology) -> MeshFrame:
    pa, pb, pc = V[faces[:, 0]], V[faces[:, 1]], V[faces[:, 2]]
    ab, ac, bc = pb - pa, pc - pa, pc - pb
    cr = np.cross(ab, ac)
    two_area = np.linalg.norm(cr, axis=1)
    if float(two_area.min()) <= 0.0:
        raise InvalidShapeError("degenerate face of zero area")
    face_normals = cr / two_area[:, None]
    face_areas = 0.5 * two_area

    dot_a = np.einsum("ij,ij->i", ab, ac)
    dot_b = np.einsum("ij,ij->i", -ab, bc)
    dot_c = np.einsum("ij,ij->i", -ac, -bc)
    cot_a = dot_a / two_area
    cot_b = dot_b / two_area
    cot_c = dot_c / two_area

    nv = topo.nv
    w = 0.5 * np.concatenate([cot_a, cot_a, cot_b, cot_b, cot_c, cot_c])
    rows, cols = topo.corner_rows, topo.corner_cols
    knum = np.empty((nv, 3))
    diff0 = V[cols, 0] - V[rows, 0]
    diff1 = V[cols, 1] - V[rows, 1]
    diff2 = V[cols, 2] - V[rows, 2]
    knum[:, 0] = np.bincount(rows, weights=w * diff0, minlength=nv)
    knum[:, 1] = np.bincount(rows, weights=w * diff1, minlength=nv)
    knum[:, 2] = np.bincount(rows, weights=w * diff2, minlength=nv)

    # mixed Voronoi corner areas: circumcentric for non-obtuse triangles,
    # half/quarter split when some angle is obtuse
    l_ab = np.einsum("ij,ij->i", ab, ab)
    l_ac = np.einsum("ij,ij->i", ac, ac)
    l_bc = np.einsum("ij,ij->i", bc, bc)
    vor_a = (l_ab * cot_c + l_ac * cot_b) / 8.0
    vor_b = (l_ab * cot_c + l_bc * cot_a) / 8.0
    vor_c = (l_ac * cot_b + l_bc * cot_a) / 8.0
    obtuse_any = (cot_a < 0) | (cot_b < 0) | (cot_c < 0)
    if obtuse_any.any():
        half, quarter = face_areas / 2.0, face_areas / 4.0
        vor_a = np.where(obtuse_any, np.where(cot_a < 0, half, quarter), vor_a)
        vor_b = np.where(obtuse_any, np.where(cot_b < 0, half, quarter), vor_b)
        vor_c = np.where(obtuse_any, np.where(cot_c < 0, half, quarter), vor_c)
    corner_areas = np.concatenate([vor_a, vor_b, vor_c])
    dual = np.bincount(topo.vertex_rows, weights=corner_areas, minlength=nv)
    kvec = knum / dual[:, None]

    ang_a = np.arctan2(two_area, dot_a)
    ang_b = np.arctan2(two_area, dot_b)
    ang_c = np.arctan2(two_area, dot_c)
    min_angle = float(min(ang_a.min(), ang_b.min(), ang_c.min()))
    angles = np.concatenate([ang_a, ang_b, ang_c])
    nacc = np.empty((nv, 3))
    fn3 = np.tile(face_normals, (3, 1))
    for k in range(3):
        nacc[:, k] = np.bincount(topo.vertex_rows, weights=angles * fn3[:, k], minlength=nv)
    nlen = np.linalg.norm(nacc, axis=1)
    if float(nlen.min()) <= 0.0:
        raise InvalidShapeError("undefined vertex normal (degenerate one-ring)")
    normals = nacc / nlen[:, None]

    H = -np.einsum("ij,ij->i", kvec, normals)
    pos_n = np.einsum("ij,ij->i", V, normals)
    radii = np.linalg.norm(V, axis=1)

    el = np.concatenate([
        np.linalg.norm(ab, axis=1),
        np.linalg.norm(ac, axis=1),
        np.linalg.norm(bc, axis=1),
    ])
    h_min = float(el.min())
    volume = float(np.sum(pa * cr) / 6.0)
    face_offsets = np.einsum("ij,ij->i", face_normals, pa)
    centroids = (pa + pb + pc) / 3.0
    return MeshFrame(h_min, float(face_areas.sum()), volume, H, normals, dual,
                     pos_n, radii, face_normals, face_offsets, face_areas,
                     centroids, min_angle)


# ---------------------------------------------------------------------------
# public operators


def curve_curvature_normals(curve: Curve2):
    """Discrete curvature and outward unit normals of a closed polygon.

    Returns ``(H, normals)`` where the curvature vector at vertex ``p`` with
    neighbors ``p-``, ``p+`` is ``(unit(p- - p) + unit(p+ - p)) / w`` for the
    dual length ``w = (|p- - p| + |p+ - p|) / 2``, and ``H`` is the signed
    magnitude of its part along ``-normal`` (positive on convex arcs).
    """
    fr = curve_frame(curve.vertices)
    return fr.H, fr.normals


def mesh_curvature_normals(mesh: Mesh3, warn_min_angle: float = MIN_ANGLE_FLOOR):
    """Cotangent-weight curvature and outward unit normals of a mesh.

    The curvature vector at a vertex is the cotangent-weighted one-ring sum
    divided by twice the mixed Voronoi vertex area; ``H`` follows the
    sum-of-principal-curvatures convention (a round sphere of radius ``rho``
    yields ``H ~ 2 / rho``). Near-degenerate triangles (corner angle below
    ``warn_min_angle`` radians) trigger a warning.
    """
    fr = mesh_frame(mesh.vertices, mesh.faces, mesh.topology())
    if fr.min_angle < warn_min_angle:
        import warnings

        warnings.warn(
            f"mesh has triangles with corner angle {fr.min_angle:.4f} rad "
            f"below the floor {warn_min_angle}",
            RuntimeWarning,
            stacklevel=2,
        )
    return fr.H, fr.normals


def curvature_normals(shape: Shape):
    """Dispatch to the curve or mesh curvature operator."""
    if isinstance(shape, Curve2):
        return curve_curvature_normals(shape)
    if isinstance(shape, Mesh3):
        return mesh_curvature_normals(shape)
    raise TypeError(f"unsupported shape type {type(shape).__name__}")


def diameter_bound(shape: Shape) -> float:
    """Bounding-box diagonal, a cheap upper proxy for the diameter."""
    span = np.ptp(shape.vertices, axis=0)
    return float(np.linalg.norm(span))


def is_convex(shape: Shape, tol: float = CONVEXITY_TOL):
    """Check convexity against supporting halfspaces of edges or faces.

    Every vertex must lie in the inner closed halfspace of every edge line
    (curves) or face plane (meshes), with slack ``tol * diameter``. Returns
    ``(True, None)`` or ``(False, (element_index, vertex_index))`` with a
    violating pair as witness.
    """
    V = shape.vertices
    slack = tol * max(diameter_bound(shape), 1e-300)
    if isinstance(shape, Curve2):
        fr = curve_frame(V)
        A, b = fr.edge_normals, fr.edge_offsets
    elif isinstance(shape, Mesh3):
        fr = mesh_frame(V, shape.faces, shape.topology())
        A, b = fr.face_normals, fr.face_offsets
    else:
        raise TypeError(f"unsupported shape type {type(shape).__name__}")
    # chunk the (elements x vertices) excess matrix to bound memory
    worst = -np.inf
    witness = None
    step = max(1, int(4_000_000 // max(len(V), 1)))
    for start in range(0, A.shape[0], step):
        block = A[start:start + step] @ V.T - b[start:start + step, None]
        k = int(np.argmax(block))
        val = float(block.flat[k])
        if val > worst:
            worst = val
            ei, vi = divmod(k, len(V))
            witness = (start + ei, vi)
    if worst > slack:
        return False, witness
    return True, None


def measure(shape: Shape) -> float:
    """Total length of a curve or total surface area of a mesh."""
    if isinstance(shape, Curve2):
        return curve_frame(shape.vertices).length
    if isinstance(shape, Mesh3):
        return mesh_frame(shape.vertices, shape.faces, shape.topology()).area
    raise TypeError(f"unsupported shape type {type(shape).__name__}")


def enclosed_measure(shape: Shape) -> float:
    """Enclosed area of a curve or enclosed volume of a mesh (positive)."""
    if isinstance(shape, Curve2):
        return signed_area(shape.vertices)
    if isinstance(shape, Mesh3):
        return mesh_frame(shape.vertices, shape.faces, shape.topology()).volume
    raise TypeError(f"unsupported shape type {type(shape).__name__}")


def dual_measures(shape: Shape) -> np.ndarray:
    """Per-vertex lumped measures (dual lengths or barycentric areas)."""
    if isinstance(shape, Curve2):
        return curve_frame(shape.vertices).dual
    if isinstance(shape, Mesh3):
        return mesh_frame(shape.vertices, shape.faces, shape.topology()).dual
    raise TypeError(f"unsupported shape type {type(shape).__name__}")


def centroid(shape: Shape) -> np.ndarray:
    """Measure-weighted vertex mean, the stand-in for a limit point."""
    w = dual_measures(shape)
    return np.asarray(shape.vertices).T @ w / w.sum()
