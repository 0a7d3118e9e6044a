"""Weighted measures, evolution residuals, and validators for the flow claims.

The validators turn the qualitative statements about the density flow
(shrink bounds, ball containment, expansion, fixed point) into concrete
pass/fail clauses with explicit tolerances, reported per clause.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from .balls import circumball, halfspaces, inball
from .flow import (
    FIXED_POINT,
    SHRUNK_TO_POINT,
    TIME_LIMIT,
    RadialDensity,
    Trajectory,
)
from .geometry import (
    Curve2,
    Mesh3,
    Shape,
    centroid,
    curve_frame,
    is_convex,
    measure,
    mesh_frame,
)
from .hausdorff import hausdorff_distance
from .transforms import GaussianContext, rescale_to_hat, time_forward, translation_at


def _psi_values(points: np.ndarray, ctx: Optional[GaussianContext]) -> np.ndarray:
    if ctx is None:
        return np.zeros(points.shape[0])
    r2 = np.einsum("ij,ij->i", points, points)
    return 0.5 * ctx.epsilon * ctx.rate * r2


def weighted_area(shape: Shape, ctx: Optional[GaussianContext] = None) -> float:
    """Weighted boundary measure: sum of exp(psi(centroid)) * element measure.

    ``ctx=None`` means unit weight, reducing to the plain measure. Large
    positive exponents are summed in log form, so an inverted weight at
    large radius degrades to ``inf`` instead of corrupting the sum.
    """
    if isinstance(shape, Curve2):
        fr = curve_frame(shape.vertices)
        mids, meas = fr.midpoints, fr.edge_lengths
    elif isinstance(shape, Mesh3):
        fr = mesh_frame(shape.vertices, shape.faces, shape.topology())
        mids, meas = fr.centroids, fr.face_areas
    else:
        raise TypeError(f"unsupported shape type {type(shape).__name__}")
    psi = _psi_values(mids, ctx)
    top = float(psi.max())
    if top > 600.0:
        from scipy.special import logsumexp

        return float(np.exp(logsumexp(psi, b=meas)))
    return float(np.sum(meas * np.exp(psi)))


def _grid_axes(lo, hi, cell):
    n = max(2, int(math.ceil((hi - lo) / cell)) + 2)
    return lo - cell + cell * (np.arange(n) + 0.5)


def _curve_inside_mask(V, xs, ys):
    """Crossing-number point-in-polygon test on a grid (vectorized)."""
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    px = gx.ravel()
    py = gy.ravel()
    x1, y1 = V[:, 0], V[:, 1]
    x2, y2 = np.roll(x1, -1), np.roll(y1, -1)
    inside = np.zeros(px.size, dtype=bool)
    block = max(1, 4_000_000 // V.shape[0])
    for s in range(0, px.size, block):
        bx = px[s:s + block, None]
        by = py[s:s + block, None]
        straddle = (y1[None, :] > by) != (y2[None, :] > by)
        with np.errstate(divide="ignore", invalid="ignore"):
            x_cross = x1 + (by - y1) * (x2 - x1) / (y2 - y1)
        hits = straddle & (bx < x_cross)
        inside[s:s + block] = (hits.sum(axis=1) % 2).astype(bool)
    return inside.reshape(gx.shape)


def _mesh_inside_mask(V, F, xs, ys, zs):
    """Parity of upward ray crossings through the mesh, per grid cell."""
    a = V[F[:, 0]]
    b = V[F[:, 1]]
    c = V[F[:, 2]]
    n = np.cross(b - a, c - a)
    ok = np.abs(n[:, 2]) > 1e-14  # near-vertical faces have measure-zero shadow
    a, b, c, n = a[ok], b[ok], c[ok], n[ok]
    d = np.einsum("ij,ij->i", n, a)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    cols = np.column_stack([gx.ravel(), gy.ravel()])
    inside = np.zeros((cols.shape[0], zs.size), dtype=bool)
    block = max(1, 2_000_000 // max(a.shape[0], 1))
    for s in range(0, cols.shape[0], block):
        P = cols[s:s + block]
        # 2D edge-function tests of the projected triangles
        def edge(u, v):
            return ((v[None, :, 0] - u[None, :, 0]) * (P[:, None, 1] - u[None, :, 1])
                    - (v[None, :, 1] - u[None, :, 1]) * (P[:, None, 0] - u[None, :, 0]))

        e0 = edge(a, b)
        e1 = edge(b, c)
        e2 = edge(c, a)
        hit = ((e0 >= 0) & (e1 >= 0) & (e2 >= 0)) | ((e0 <= 0) & (e1 <= 0) & (e2 <= 0))
        z_cross = (d[None, :] - n[None, :, 0] * P[:, None, 0]
                   - n[None, :, 1] * P[:, None, 1]) / n[None, :, 2]
        above = hit[:, :, None] & (z_cross[:, :, None] > zs[None, None, :])
        inside[s:s + block] = (above.sum(axis=1) % 2).astype(bool)
    return inside.reshape(gx.shape[0], gx.shape[1], zs.size)


def weighted_volume(shape: Shape, ctx: Optional[GaussianContext] = None,
                    cell: float = 0.05) -> Tuple[float, float]:
    """Weighted enclosed measure by grid quadrature over cell centers.

    Returns ``(value, boundary_fraction)`` where the fraction is the share
    of the value carried by cells adjacent to the boundary, an a posteriori
    error estimate for the midpoint quadrature.
    """
    from scipy.ndimage import binary_dilation, binary_erosion

    V = shape.vertices
    lo = V.min(axis=0)
    hi = V.max(axis=0)
    if isinstance(shape, Curve2):
        xs = _grid_axes(lo[0], hi[0], cell)
        ys = _grid_axes(lo[1], hi[1], cell)
        inside = _curve_inside_mask(V, xs, ys)
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        centers = np.column_stack([gx.ravel(), gy.ravel()])
        cellmeas = cell * cell
    elif isinstance(shape, Mesh3):
        xs = _grid_axes(lo[0], hi[0], cell)
        ys = _grid_axes(lo[1], hi[1], cell)
        zs = _grid_axes(lo[2], hi[2], cell)
        inside = _mesh_inside_mask(V, shape.faces, xs, ys, zs)
        gx, gy, gz = np.meshgrid(xs, ys, zs, indexing="ij")
        centers = np.column_stack([gx.ravel(), gy.ravel(), gz.ravel()])
        cellmeas = cell ** 3
    else:
        raise TypeError(f"unsupported shape type {type(shape).__name__}")

    weights = np.exp(_psi_values(centers, ctx)).reshape(inside.shape)
    value = float(np.sum(weights[inside]) * cellmeas)
    rim = binary_dilation(inside) & ~binary_erosion(inside)
    rim_value = float(np.sum(weights[rim]) * cellmeas)
    fraction = rim_value / value if value > 0 else math.inf
    return value, fraction


# ---------------------------------------------------------------------------
# trajectory diagnostics


def area_evolution_residual(tr: Trajectory) -> Dict[str, Union[np.ndarray, float]]:
    """Residual of the measured area change against the evolution identity.

    Compares the per-step forward difference of the boundary measure with
    ``-sum((H^2 + eps n^2 mu^2) * dual)``, normalized by the magnitude of
    the model term. Requires resampling off; the constant drift term applies
    to the Gaussian weight only.
    """
    if tr.params.resample_every:
        raise ValueError("the identity check needs resampling disabled")
    if isinstance(tr.params.density_mode, RadialDensity):
        raise ValueError("the constant-drift identity holds for the Gaussian weight only")
    ctx = tr.ctx
    eps_term = 0.0
    if tr.mode == "density" and tr.params.density_mode == "gaussian":
        eps_term = ctx.epsilon * (ctx.n ** 2) * (ctx.mu ** 2)
    A = tr.series["measure"]
    dt = tr.series["dt"]
    flux = tr.series["h2_flux"]
    if A.size < 2:
        raise ValueError("need at least two steps")
    dA = np.diff(A) / dt[:-1]
    model = -(flux[:-1] + eps_term * A[:-1])
    scale = flux[:-1] + abs(eps_term) * A[:-1]
    resid = np.abs(dA - model) / scale
    return {
        "series": resid,
        "max": float(resid.max()),
        "median": float(np.median(resid)),
    }


def roundness(shape: Shape) -> float:
    """Circumradius over inradius minus one; NaN marks non-convex input."""
    ok, _ = is_convex(shape)
    if not ok:
        return math.nan
    c = circumball(shape)
    i = inball(shape)
    if i.radius <= 0:
        return math.inf
    return c.radius / i.radius - 1.0


def f_min_series(tr: Trajectory, comparison_radius: float):
    """Minimum of the sphere-comparison function along an ordinary-flow run.

    For a comparison sphere of initial radius R shrinking as
    ``r(t) = sqrt(R^2 - 2 n t)``, returns per-step ``(t, min_f)`` with
    ``min_f = (r(t)^2 - max|F|^2) / 2``, truncated at the sphere's shrink
    time. Under the ordinary flow this minimum should never decrease.
    """
    if tr.mode != "ordinary":
        raise ValueError("the comparison function is defined along ordinary-flow runs")
    if comparison_radius <= 0:
        raise ValueError("comparison radius must be positive")
    n = tr.ctx.n
    t = tr.series["t"]
    maxr = tr.series["max_radius"]
    horizon = comparison_radius ** 2 / (2.0 * n)
    keep = t < horizon
    rmu2 = comparison_radius ** 2 - 2.0 * n * t[keep]
    f = 0.5 * (rmu2 - maxr[keep] ** 2)
    return t[keep], f


# ---------------------------------------------------------------------------
# theorem validators


@dataclass(frozen=True)
class Clause:
    cid: str
    passed: bool
    value: float
    bound: float
    tol: float
    note: str = ""


@dataclass
class ValidationReport:
    """Pass/fail clauses for one validated case, with measured quantities."""

    case: str
    applicable: bool
    clauses: List[Clause] = field(default_factory=list)
    extras: Dict[str, float] = field(default_factory=dict)
    reason: str = ""

    @property
    def passed(self) -> bool:
        return self.applicable and all(c.passed for c in self.clauses)

    def to_text(self) -> str:
        lines = [f"case {self.case}: " + ("PASS" if self.passed else "FAIL")]
        if not self.applicable:
            lines.append(f"  inapplicable: {self.reason}")
        for c in self.clauses:
            lines.append(
                f"  [{'pass' if c.passed else 'FAIL'}] {c.cid}: "
                f"value={c.value:.6g} bound={c.bound:.6g} tol={c.tol:.3g}"
                + (f"  ({c.note})" if c.note else "")
            )
        for key, val in self.extras.items():
            lines.append(f"  info {key} = {val:.6g}" if isinstance(val, float)
                         else f"  info {key} = {val}")
        return "\n".join(lines)

    def to_kv(self) -> str:
        lines = [f"case={self.case} applicable={str(self.applicable).lower()}"]
        for c in self.clauses:
            lines.append(
                f"clause={c.cid} pass={str(c.passed).lower()} "
                f"value={c.value:.17g} bound={c.bound:.17g} tol={c.tol:.17g}"
            )
        for key, val in self.extras.items():
            if isinstance(val, float):
                lines.append(f"extra={key} value={val:.17g}")
            else:
                lines.append(f"extra={key} value={val}")
        return "\n".join(lines)


def _roundness_trend_clause(tr: Trajectory, tol: float) -> Clause:
    """Late-run roundness should not grow: compare quartile start to end."""
    r = tr.series["roundness"]
    tail = r[3 * r.size // 4:]
    tail = tail[np.isfinite(tail)]
    if tail.size < 2:
        return Clause("roundness_trend", False, math.nan, math.nan, tol,
                      "too few finite samples")
    return Clause("roundness_trend", bool(tail[-1] <= tail[0] + tol),
                  float(tail[-1]), float(tail[0] + tol), tol,
                  "terminal quartile roundness vs its start")


def _gaussian_density_run(tr: Trajectory, want_epsilon: int):
    if tr.mode != "density" or tr.params.density_mode != "gaussian":
        return "requires a Gaussian density-mode trajectory"
    if tr.params.epsilon != want_epsilon:
        return f"requires epsilon = {want_epsilon:+d}"
    return None


def validate_theorem_a(tr: Trajectory, tol: float = 0.02,
                       roundness_trend_tol: float = 1e-3) -> ValidationReport:
    """Inverted-weight case: finite shrink time bound and limit point bound.

    Clauses: terminal status is a round point; measured shrink time within
    the log bound; terminal limit point inside the decay envelope; late-run
    roundness not increasing.
    """
    report = ValidationReport(case="a", applicable=True)
    why = _gaussian_density_run(tr, +1)
    initial = tr.initial.shape
    if why is None:
        ok, _ = is_convex(initial)
        if not ok:
            why = "initial shape is not convex"
    if why is not None:
        return replace(report, applicable=False, reason=why)

    ctx = tr.ctx
    R = circumball(initial).radius
    max_f0 = float(tr.series["max_radius"][0])
    T = tr.final.t

    report.clauses.append(Clause(
        "a1_round_point", tr.status == SHRUNK_TO_POINT,
        1.0 if tr.status == SHRUNK_TO_POINT else 0.0, 1.0, 0.0,
        f"terminal status {tr.status}"))

    bound_T = math.log1p(ctx.mu ** 2 * R ** 2) / (2.0 * ctx.rate)
    report.clauses.append(Clause(
        "a1_time_bound", T <= bound_T * (1.0 + tol), T, bound_T * (1.0 + tol), tol,
        f"circumradius {R:.6g}"))

    env = math.exp(-ctx.rate * T) * (
        math.sqrt(max(ctx.mu ** 2 * R ** 2 + 1.0 - math.exp(2.0 * ctx.rate * T), 0.0))
        / ctx.mu + max_f0)
    p_T = float(np.linalg.norm(centroid(tr.final.shape)))
    report.clauses.append(Clause(
        "a2_limit_point", p_T <= env * (1.0 + tol) + 1e-12, p_T,
        env * (1.0 + tol), tol, "terminal centroid vs decay envelope"))

    report.clauses.append(_roundness_trend_clause(tr, roundness_trend_tol))
    report.extras["measured_T"] = T
    report.extras["time_bound"] = bound_T
    return report


def _split_point(initial: Shape, inv_mu: float, contains: bool):
    """Recentering point: zero when the hypothesis ball already sits at the
    origin, otherwise the circumball (or inball) center."""
    if contains:
        A, b = halfspaces(initial)
        if float(b.min()) >= inv_mu:
            return np.zeros(initial.ambient_dim)
        return inball(initial).center
    if float(np.linalg.norm(initial.vertices, axis=1).max()) <= inv_mu:
        return np.zeros(initial.ambient_dim)
    return circumball(initial).center


def validate_theorem_b(tr: Trajectory, case: str, tol: float = 0.02,
                       roundness_trend_tol: float = 1e-3,
                       growth_multiple: float = 5.0,
                       drift_tol: float = 5e-3,
                       translation_tol: float = 1e-2,
                       sphere_tol: float = 0.01) -> ValidationReport:
    """Gaussian-weight cases: shrink inside the ball, expansion, fixed point.

    ``case`` selects the hypothesis family: 'bi' (initial data strictly
    inside the 1/mu ball after recentering), 'bii' (containing it), 'biii'
    (a discrete sphere of radius 1/mu). Hypotheses are checked geometrically
    via circumradius and inradius, a deliberate weakening of the curvature
    pinching conditions, and reported in every clause note.
    """
    if case not in ("bi", "bii", "biii"):
        raise ValueError(f"case must be bi, bii or biii, got '{case}'")
    report = ValidationReport(case=case, applicable=True)
    why = _gaussian_density_run(tr, -1)
    initial = tr.initial.shape
    if why is None:
        ok, _ = is_convex(initial)
        if not ok:
            why = "initial shape is not convex"
    if why is not None:
        return replace(report, applicable=False, reason=why)

    ctx = tr.ctx
    inv_mu = 1.0 / ctx.mu
    snapshots = tr.snapshots

    if case == "bi":
        p0 = _split_point(initial, inv_mu, contains=False)
        R = circumball(initial).radius
        if R >= inv_mu:
            return replace(report, applicable=False,
                           reason=f"recentred circumradius {R:.6g} is not below 1/mu")
        report.clauses.append(Clause(
            "bi_finite_shrink", tr.status == SHRUNK_TO_POINT,
            1.0 if tr.status == SHRUNK_TO_POINT else 0.0, 1.0, 0.0,
            f"terminal status {tr.status} at t={tr.final.t:.6g}"))
        margins = []
        for snap in snapshots:
            shift = translation_at(snap.t, p0, ctx)
            reach = float(np.linalg.norm(snap.shape.vertices - shift, axis=1).max())
            margins.append(inv_mu - reach)
        worst = float(min(margins))
        report.clauses.append(Clause(
            "bi_containment", worst > 0.0, worst, 0.0, 0.0,
            "min over snapshots of 1/mu - max|recentred F|"))
        report.clauses.append(_roundness_trend_clause(tr, roundness_trend_tol))
        report.extras["measured_T"] = tr.final.t
        report.extras["containment_margin"] = worst
        return report

    if case == "bii":
        p0 = _split_point(initial, inv_mu, contains=True)
        R = inball(initial).radius
        if R <= inv_mu:
            return replace(report, applicable=False,
                           reason=f"inradius {R:.6g} does not exceed 1/mu")
        report.clauses.append(Clause(
            "bii_no_shrink", tr.status == TIME_LIMIT,
            1.0 if tr.status == TIME_LIMIT else 0.0, 1.0, 0.0,
            f"terminal status {tr.status} ({tr.final.note or 'max_time'})"))
        inr = tr.series["inradius"]
        growing = bool(np.all(np.diff(inr) > 0.0))
        target = growth_multiple * inv_mu
        report.clauses.append(Clause(
            "bii_inradius_diverges", growing and float(inr[-1]) >= target,
            float(inr[-1]), target, 0.0,
            f"strictly increasing: {growing}; target multiple {growth_multiple}"))
        margins = []
        for snap in snapshots:
            t_hat = time_forward(snap.t, ctx)
            ball2 = R * R - 2.0 * ctx.n * t_hat
            if ball2 <= 0:
                continue
            shift = translation_at(snap.t, p0, ctx)
            hat = rescale_to_hat(snap.shape.translated(-shift), snap.t, ctx)
            A, b = halfspaces(hat)
            margins.append(float(b.min()) - math.sqrt(ball2))
        worst = float(min(margins)) if margins else math.nan
        report.clauses.append(Clause(
            "bii_ball_containment", bool(margins) and worst > 0.0, worst, 0.0, 0.0,
            "min slack of the comparison ball inside the rescaled shape"))
        shift = translation_at(tr.final.t, p0, ctx)
        hat_final = rescale_to_hat(tr.final.shape.translated(-shift), tr.final.t, ctx)
        report.extras["terminal_rescaled_roundness"] = roundness(hat_final)
        # limit-domain trichotomy (informational): position of the origin
        # relative to the translated rescaled limit shape
        A, b = halfspaces(hat_final.translated(p0))
        slack = float(b.min())
        band = 1e-2 * inv_mu
        if slack > band:
            verdict = "expands_to_all_space"
        elif slack < -band:
            verdict = "escapes_to_infinity"
        else:
            verdict = "halfspace_boundary_case"
        report.extras["limit_domain"] = verdict
        return report

    # biii
    c_r = circumball(initial).radius
    p0 = centroid(initial)
    i_r = inball(initial.translated(-p0)).radius
    if abs(c_r - inv_mu) > sphere_tol * inv_mu or abs(i_r - inv_mu) > sphere_tol * inv_mu:
        return replace(report, applicable=False,
                       reason=f"initial data is not a discrete 1/mu sphere "
                              f"(circum {c_r:.6g}, in {i_r:.6g})")
    off_center = float(np.linalg.norm(p0)) > 1e-9 * inv_mu
    if not off_center:
        drift = float(np.abs(tr.final.shape.vertices - initial.vertices).max())
        report.clauses.append(Clause(
            "biii_fixed_point", tr.status == FIXED_POINT,
            1.0 if tr.status == FIXED_POINT else 0.0, 1.0, 0.0,
            f"terminal status {tr.status}"))
        report.clauses.append(Clause(
            "biii_drift", drift < drift_tol, drift, drift_tol, drift_tol,
            "max vertex drift over the run"))
        report.extras["drift"] = drift
        return report
    states = tr.checkpoints if tr.checkpoints else snapshots[1:]
    worst = 0.0
    for st in states:
        expected = initial.translated(translation_at(st.t, p0, ctx) - p0)
        worst = max(worst, hausdorff_distance(st.shape, expected))
    report.clauses.append(Clause(
        "biii_translation", worst < translation_tol, worst, translation_tol,
        translation_tol,
        "max Hausdorff distance to the exponentially translated sphere"))
    report.extras["translation_error"] = worst
    return report
