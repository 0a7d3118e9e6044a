import numpy as np
import pytest

from densityflow import (
    Curve2,
    InvalidShapeError,
    Mesh3,
    centroid,
    circle,
    curve_curvature_normals,
    dual_measures,
    ellipse,
    ellipsoid,
    enclosed_measure,
    icosphere,
    is_convex,
    measure,
    mesh_curvature_normals,
    random_convex,
)

from conftest import square_curve, star_curve


class TestCurveInvariants:
    def test_too_few_vertices_rejected(self):
        pts = np.array([[np.cos(t), np.sin(t)] for t in np.linspace(0, 2 * np.pi, 5)[:-1]])
        with pytest.raises(InvalidShapeError, match="at least 8"):
            Curve2(pts)

    def test_clockwise_rejected_without_flag(self, unit_circle_256):
        cw = unit_circle_256.vertices[::-1]
        with pytest.raises(InvalidShapeError, match="clockwise"):
            Curve2(cw)

    def test_clockwise_reversed_with_flag(self, unit_circle_256):
        cw = unit_circle_256.vertices[::-1]
        fixed = Curve2(cw, auto_orient=True)
        assert enclosed_measure(fixed) > 0

    def test_duplicate_vertex_rejected(self, unit_circle_256):
        pts = np.array(unit_circle_256.vertices)
        pts[10] = pts[11]
        with pytest.raises(InvalidShapeError, match="degenerate edge"):
            Curve2(pts)

    def test_self_intersection_rejected(self):
        # a figure-eight style bowtie with enough vertices
        t = np.linspace(0, 2 * np.pi, 32, endpoint=False)
        pts = np.column_stack([np.sin(2 * t) + 2 * np.sin(t) * 0, np.sin(t)])
        pts[:, 0] = np.cos(t) * np.where(np.sin(t) >= 0, 1.0, -1.0)
        with pytest.raises(InvalidShapeError, match="self-intersect"):
            Curve2(pts)

    def test_nan_rejected(self, unit_circle_256):
        pts = np.array(unit_circle_256.vertices)
        pts[3, 1] = np.nan
        with pytest.raises(InvalidShapeError, match="non-finite"):
            Curve2(pts)

    def test_vertices_immutable(self, unit_circle_256):
        with pytest.raises(ValueError):
            unit_circle_256.vertices[0, 0] = 5.0


class TestCurveCurvature:
    def test_regular_polygon_matches_circle(self):
        # closed-form oracle: a circle of radius rho has curvature 1/rho
        c = circle(2.0, 256)
        H, N = curve_curvature_normals(c)
        assert np.all(np.abs(H - 0.5) < 1e-3)
        radial = c.vertices / np.linalg.norm(c.vertices, axis=1)[:, None]
        assert np.abs(np.einsum("ij,ij->i", N, radial) - 1.0).max() < 1e-12

    def test_straight_segments_have_zero_curvature(self):
        sq = square_curve(per_side=64)
        H, _ = curve_curvature_normals(sq)
        interior = np.ones(len(sq), dtype=bool)
        interior[::64] = False  # drop the four corner vertices
        assert np.abs(H[interior]).max() == 0.0

    def test_translation_invariance(self):
        c = ellipse(1.3, 0.7, 64)
        H0, N0 = curve_curvature_normals(c)
        H1, N1 = curve_curvature_normals(c.translated((5.0, -3.0)))
        assert np.abs(H1 - H0).max() < 1e-12 * (1.0 + np.abs(H0).max())
        assert np.abs(N1 - N0).max() < 1e-12

    def test_scaling_covariance(self):
        c = ellipse(1.3, 0.7, 64)
        H0, N0 = curve_curvature_normals(c)
        H1, N1 = curve_curvature_normals(c.scaled(3.0))
        assert np.abs(H1 - H0 / 3.0).max() < 1e-12
        assert np.abs(N1 - N0).max() < 1e-12

    def test_convex_curvature_points_inward(self):
        c = random_convex(48, seed=11)
        H, N = curve_curvature_normals(c)
        com = centroid(c)
        inward = com[None, :] - c.vertices
        strict = H > 1e-6
        assert np.all(np.einsum("ij,ij->i", -N[strict], inward[strict]) * H[strict] >= 0)


class TestMeshInvariants:
    def test_flipped_face_rejected_with_index(self, sphere_sub3):
        faces = np.array(sphere_sub3.faces)
        faces[7] = faces[7][::-1]
        with pytest.raises(InvalidShapeError, match="face"):
            Mesh3(sphere_sub3.vertices, faces)

    def test_missing_face_rejected(self, sphere_sub3):
        faces = np.array(sphere_sub3.faces)[:-1]
        with pytest.raises(InvalidShapeError, match="boundary or non-manifold"):
            Mesh3(sphere_sub3.vertices, faces)

    def test_inward_orientation_rejected(self, sphere_sub3):
        faces = np.array(sphere_sub3.faces)[:, ::-1]
        with pytest.raises(InvalidShapeError):
            Mesh3(sphere_sub3.vertices, faces)

    def test_degenerate_face_rejected(self):
        verts = np.array(icosphere(1.0, 1).vertices)
        mesh = icosphere(1.0, 1)
        faces = np.array(mesh.faces)
        a, b, _ = faces[0]
        verts[b] = verts[a]  # collapse one edge
        with pytest.raises(InvalidShapeError):
            Mesh3(verts, faces)


class TestMeshCurvature:
    def test_icosphere_matches_sphere(self):
        # closed-form oracle: sphere of radius rho has H = 2 / rho
        s = icosphere(1.0, 4)
        H, N = mesh_curvature_normals(s)
        assert np.abs(H - 2.0).max() < 2e-2
        radial = s.vertices / np.linalg.norm(s.vertices, axis=1)[:, None]
        assert np.einsum("ij,ij->i", N, radial).min() > 0.99

    def test_scaled_sphere(self):
        s = icosphere(1.0, 3).scaled(2.0)
        H, _ = mesh_curvature_normals(s)
        assert np.abs(H - 1.0).max() < 2e-2

    def test_ellipsoid_max_curvature_at_long_axis(self):
        # analytic oracle: tips of the (2,1,1) ellipsoid have H = a/b^2 + a/c^2 = 4
        e = ellipsoid(2.0, 1.0, 1.0, 4)
        H, _ = mesh_curvature_normals(e)
        tips = np.abs(np.abs(e.vertices[:, 0]) - 2.0) < 1e-9
        assert H[tips].min() > H[~tips].max()
        assert np.abs(H[tips] - 4.0).max() < 0.1

    def test_translation_invariance(self, sphere_sub3):
        H0, N0 = mesh_curvature_normals(sphere_sub3)
        H1, N1 = mesh_curvature_normals(sphere_sub3.translated((3.0, -2.0, 9.0)))
        assert np.abs(H1 - H0).max() < 1e-10
        assert np.abs(N1 - N0).max() < 1e-10

    def test_thin_triangles_warn(self):
        e = ellipsoid(1.0, 1.0, 0.01, 2)
        with pytest.warns(RuntimeWarning, match="corner angle"):
            mesh_curvature_normals(e)


class TestConvexity:
    def test_regular_polygon_convex(self, unit_circle_256):
        ok, witness = is_convex(unit_circle_256)
        assert ok and witness is None

    def test_star_not_convex_with_witness(self):
        star = star_curve()
        ok, witness = is_convex(star)
        assert not ok
        edge, vertex = witness
        assert 0 <= edge < len(star) and 0 <= vertex < len(star)

    def test_icosphere_convex(self, sphere_sub3):
        ok, _ = is_convex(sphere_sub3)
        assert ok

    def test_square_with_collinear_vertices_convex(self):
        ok, _ = is_convex(square_curve(per_side=16))
        assert ok


class TestMeasures:
    def test_polygon_perimeter_defect(self):
        # inscribed regular m-gon perimeter 2 m sin(pi/m), defect below 2 pi^3/m^2
        c = circle(1.0, 256)
        assert abs(measure(c) - 2 * np.pi) < 2 * np.pi ** 3 / 256 ** 2

    def test_sphere_area_volume(self):
        s = icosphere(1.0, 4)
        assert abs(measure(s) - 4 * np.pi) / (4 * np.pi) < 5e-3
        assert abs(enclosed_measure(s) - 4 * np.pi / 3) / (4 * np.pi / 3) < 5e-3

    @pytest.mark.parametrize("lam", [0.5, 2.0, 7.0])
    def test_scaling_homogeneity(self, lam):
        c = ellipse(1.2, 0.8, 64)
        assert np.isclose(measure(c.scaled(lam)), lam * measure(c), rtol=1e-12)
        assert np.isclose(enclosed_measure(c.scaled(lam)), lam ** 2 * enclosed_measure(c),
                          rtol=1e-12)
        s = icosphere(1.0, 2)
        assert np.isclose(measure(s.scaled(lam)), lam ** 2 * measure(s), rtol=1e-12)
        assert np.isclose(enclosed_measure(s.scaled(lam)), lam ** 3 * enclosed_measure(s),
                          rtol=1e-12)

    def test_dual_measures_partition(self):
        c = ellipse(1.2, 0.8, 64)
        assert np.isclose(dual_measures(c).sum(), measure(c), rtol=1e-12)
        s = icosphere(1.0, 2)
        assert np.isclose(dual_measures(s).sum(), measure(s), rtol=1e-12)
