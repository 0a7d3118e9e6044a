"""Explicit time integration of the density-driven and ordinary flows.

Three modes are supported:

* ``density``: normal speed ``-(H + (phi'(r)/r) <F, N>)`` with the radial
  weight derivative; for the Gaussian-type weight ``phi'(r)/r`` is the
  constant ``epsilon n mu^2`` and the origin is perfectly regular.
* ``ordinary``: plain curve shortening / mean curvature flow ``-H N``.
* ``rescaled``: the ordinary flow plus the tangential feed
  ``c(t) F_tangential`` that makes the correspondence with the density flow
  vertex-exact rather than merely up to reparametrization.

Stepping is explicit Euler with the step bound
``dt = min(max_dt, cfl h_min / max|v|, cfl h_min^2)``. Runs are
deterministic given (shape, params, mode).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from .balls import EnclosingBallTracker, InscribedBallTracker
from .geometry import (
    Curve2,
    InvalidShapeError,
    Mesh3,
    Shape,
    curve_frame,
    mesh_frame,
)
from .transforms import GaussianContext, TimeDomainError

RUNNING = "running"
SHRUNK_TO_POINT = "shrunk_to_point"
DEGENERATE = "degenerate"
TIME_LIMIT = "time_limit"
FIXED_POINT = "fixed_point"

TERMINAL_STATUSES = (SHRUNK_TO_POINT, DEGENERATE, TIME_LIMIT, FIXED_POINT)

MODES = ("density", "ordinary", "rescaled")

SERIES_FIELDS = (
    "step", "t", "dt", "measure", "enclosed", "weighted_area",
    "circumradius", "inradius", "roundness", "max_speed", "max_radius",
    "h2_flux",
)


class NumericalAbortError(RuntimeError):
    """Raised when non-finite numbers appear anywhere in a run."""


@dataclass(frozen=True)
class RadialDensity:
    """Radial weight exp(phi(|x|)) sampled on a grid together with phi'."""

    r: np.ndarray
    phi: np.ndarray
    dphi: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        phi = np.asarray(self.phi, dtype=float)
        dphi = np.asarray(self.dphi, dtype=float)
        if not (r.ndim == 1 and r.shape == phi.shape == dphi.shape and r.size >= 2):
            raise ValueError("radial table needs matching 1-d arrays r, phi, dphi")
        if r[0] < 0 or np.any(np.diff(r) <= 0):
            raise ValueError("radial table radii must be ascending and nonnegative")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "dphi", dphi)

    def psi(self, radii):
        self._check_cover(radii)
        return np.interp(radii, self.r, self.phi)

    def drift_over_r(self, radii):
        """phi'(r)/r per vertex; rejects a vertex at the origin unless phi'(0)=0."""
        self._check_cover(radii)
        radii = np.asarray(radii, dtype=float)
        vals = np.interp(radii, self.r, self.dphi)
        at_origin = radii == 0.0
        if at_origin.any():
            if np.any(np.abs(vals[at_origin]) > 0.0):
                raise ValueError("singular drift: vertex at r=0 with phi'(0) != 0")
            vals = vals.copy()
        out = np.zeros_like(radii)
        mask = ~at_origin
        out[mask] = vals[mask] / radii[mask]
        return out

    def _check_cover(self, radii):
        top = float(np.max(radii))
        if top > self.r[-1] * (1 + 1e-12):
            raise ValueError(
                f"radial table covers r <= {self.r[-1]:g} but the shape reaches {top:g}"
            )


DensityMode = Union[str, RadialDensity]


@dataclass
class FlowParams:
    """Flow configuration: density choice, step control, termination gates.

    ``shrink_diameter_tol=None`` resolves to 1e-2 times the initial
    circumradius when a run starts. ``fixed_point_tol=0`` disables fixed
    point detection. ``guard`` is the relative band kept clear of the
    rescaled-flow horizon when ``epsilon = -1``.
    """

    epsilon: int = -1
    mu: float = 1.0
    density_mode: DensityMode = "gaussian"
    cfl: float = 0.25
    max_dt: float = 1e-2
    max_time: float = math.inf
    max_steps: int = 5_000_000
    resample_every: int = 0
    shrink_diameter_tol: Optional[float] = None
    roundness_tol: float = 0.05
    fixed_point_tol: float = 1e-9
    fixed_point_steps: int = 20
    guard: float = 1e-3
    speed_floor: float = 1e-12
    max_inradius: float = math.inf

    def __post_init__(self):
        if self.epsilon not in (-1, 1):
            raise ValueError(f"epsilon must be +1 or -1, got {self.epsilon}")
        if not (self.mu > 0 and math.isfinite(self.mu)):
            raise ValueError(f"mu must be positive, got {self.mu}")
        if isinstance(self.density_mode, str) and self.density_mode not in ("gaussian", "none"):
            raise ValueError(f"unknown density mode '{self.density_mode}'")
        if not 0 < self.cfl <= 1:
            raise ValueError(f"cfl must lie in (0, 1], got {self.cfl}")
        for name in ("max_dt", "max_time"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.max_steps <= 0 or self.resample_every < 0:
            raise ValueError("max_steps must be positive, resample_every nonnegative")
        if self.shrink_diameter_tol is not None and self.shrink_diameter_tol <= 0:
            raise ValueError("shrink_diameter_tol must be positive (or None)")
        if self.roundness_tol <= 0 or not 0 < self.guard < 1:
            raise ValueError("roundness_tol must be positive and guard in (0, 1)")
        if self.fixed_point_tol < 0 or self.fixed_point_steps < 1:
            raise ValueError("fixed_point_tol must be >= 0 and fixed_point_steps >= 1")

    def ctx_for(self, shape: Shape) -> GaussianContext:
        return GaussianContext(self.epsilon, self.mu, shape.n)


@dataclass(frozen=True)
class FlowState:
    """One frame of an evolution: shape, clock, step index and status."""

    shape: Shape
    t: float
    step: int
    status: str = RUNNING
    note: str = ""


@dataclass
class Trajectory:
    """Sampled states plus per-step scalar series of one run.

    ``series`` maps each of ``SERIES_FIELDS`` to an array with one entry per
    executed step, recorded at the state the step departed from. The
    ``roundness`` and ``inradius`` columns are the raw Chebyshev-based
    values and assume the shape stays near convex; the strict operator with
    a convexity precheck lives in the diagnostics module.
    """

    mode: str
    params: FlowParams
    snapshots: List[FlowState]
    series: Dict[str, np.ndarray]
    checkpoints: List[FlowState] = field(default_factory=list)
    shrink_tol: float = math.nan

    @property
    def initial(self) -> FlowState:
        return self.snapshots[0]

    @property
    def final(self) -> FlowState:
        return self.snapshots[-1]

    @property
    def status(self) -> str:
        return self.final.status

    @property
    def ctx(self) -> GaussianContext:
        return self.params.ctx_for(self.initial.shape)

    def step_count(self) -> int:
        return int(self.series["step"].size)


# ---------------------------------------------------------------------------
# velocities


def _shape_frame(shape: Shape):
    if isinstance(shape, Curve2):
        return curve_frame(shape.vertices)
    if isinstance(shape, Mesh3):
        return mesh_frame(shape.vertices, shape.faces, shape.topology())
    raise TypeError(f"unsupported shape type {type(shape).__name__}")


def _density_drift(params: FlowParams, ctx: GaussianContext, frame):
    """Per-vertex phi'(r)/r for the configured density (scalar or array)."""
    mode = params.density_mode
    if mode == "gaussian":
        return ctx.epsilon * ctx.rate
    if mode == "none":
        return 0.0
    return mode.drift_over_r(frame.radii)


def _density_velocity(frame, params, ctx):
    drift = _density_drift(params, ctx, frame)
    speed = -(frame.H + drift * frame.position_normal)
    return speed[:, None] * frame.normals, float(np.abs(speed).max())


def _ordinary_velocity(frame):
    speed = -frame.H
    return speed[:, None] * frame.normals, float(np.abs(speed).max())


def rescaled_coefficient(t_hat: float, ctx: GaussianContext, guard: float = 0.0) -> float:
    """Tangential feed coefficient 1 / (2 (t_hat + epsilon / (2 n mu^2))).

    For ``epsilon = -1`` the coefficient blows up at the horizon
    ``1 / (2 n mu^2)``; times at or beyond ``(1 - guard)`` of the horizon
    are rejected.
    """
    if ctx.epsilon == -1 and t_hat >= (1.0 - guard) * ctx.hat_horizon:
        raise TimeDomainError(
            f"t_hat = {t_hat} reaches the rescaled-flow horizon {ctx.hat_horizon}"
            f" (guard {guard})"
        )
    return 1.0 / (2.0 * (t_hat + ctx.epsilon / (2.0 * ctx.rate)))


def _rescaled_velocity(frame, V, t_hat, params, ctx):
    c = rescaled_coefficient(t_hat, ctx, params.guard)
    tangential = V - frame.position_normal[:, None] * frame.normals
    vel = -frame.H[:, None] * frame.normals + c * tangential
    vmax = float(np.linalg.norm(vel, axis=1).max())
    return vel, vmax


def _velocity(frame, V, t_clock, params, ctx, mode):
    if mode == "density":
        return _density_velocity(frame, params, ctx)
    if mode == "ordinary":
        return _ordinary_velocity(frame)
    if mode == "rescaled":
        return _rescaled_velocity(frame, V, t_clock, params, ctx)
    raise ValueError(f"unknown mode '{mode}'")


def velocity_density(shape: Shape, params: FlowParams) -> np.ndarray:
    """Per-vertex velocity vectors of the density flow (purely normal)."""
    frame = _shape_frame(shape)
    ctx = params.ctx_for(shape)
    vel, _ = _density_velocity(frame, params, ctx)
    return vel


def velocity_rescaled(shape: Shape, t_hat: float, params: FlowParams) -> np.ndarray:
    """Velocity of the rescaled flow: ``-H N`` plus the tangential feed."""
    frame = _shape_frame(shape)
    ctx = params.ctx_for(shape)
    vel, _ = _rescaled_velocity(frame, shape.vertices, t_hat, params, ctx)
    return vel


def adaptive_dt(shape: Shape, velocity: np.ndarray, params: FlowParams) -> float:
    """Step bound min(max_dt, cfl h/|v|_max, cfl h^2); 0 signals degeneracy."""
    if isinstance(shape, Curve2):
        e = np.roll(shape.vertices, -1, axis=0) - shape.vertices
        h_min = float(np.hypot(e[:, 0], e[:, 1]).min())
    else:
        V, F = shape.vertices, shape.faces
        h_min = min(
            float(np.linalg.norm(V[F[:, 1]] - V[F[:, 0]], axis=1).min()),
            float(np.linalg.norm(V[F[:, 2]] - V[F[:, 0]], axis=1).min()),
            float(np.linalg.norm(V[F[:, 2]] - V[F[:, 1]], axis=1).min()),
        )
    if h_min <= 0.0:
        return 0.0
    vmax = float(np.linalg.norm(np.asarray(velocity), axis=-1).max())
    return _dt_bound(h_min, vmax, params)


def _dt_bound(h_min: float, vmax: float, params: FlowParams) -> float:
    return min(
        params.max_dt,
        params.cfl * h_min / max(vmax, params.speed_floor),
        params.cfl * h_min * h_min,
    )


def _weighted_total(psi_values, measures) -> float:
    """sum(measure * exp(psi)) with a log-form guard against overflow."""
    top = float(np.max(psi_values)) if np.ndim(psi_values) else float(psi_values)
    if top > 600.0:
        from scipy.special import logsumexp

        return float(np.exp(logsumexp(psi_values, b=measures)))
    return float(np.sum(measures * np.exp(psi_values)))


def _series_psi(params: FlowParams, ctx: GaussianContext, mode, centroids):
    """Weight exponent at element centroids (zero outside density mode)."""
    if mode != "density" or params.density_mode == "none":
        return 0.0
    r2 = np.einsum("ij,ij->i", centroids, centroids)
    if params.density_mode == "gaussian":
        return 0.5 * ctx.epsilon * ctx.rate * r2
    return params.density_mode.psi(np.sqrt(r2))


def _resample_closed(V: np.ndarray) -> np.ndarray:
    """Uniform arc-length redistribution along the polygon (tangential only)."""
    e = np.roll(V, -1, axis=0) - V
    el = np.hypot(e[:, 0], e[:, 1])
    cum = np.concatenate([[0.0], np.cumsum(el)])
    targets = (np.arange(len(V)) / len(V)) * cum[-1]
    closed = np.vstack([V, V[:1]])
    x = np.interp(targets, cum, closed[:, 0])
    y = np.interp(targets, cum, closed[:, 1])
    return np.column_stack([x, y])


# ---------------------------------------------------------------------------
# stepping


def step(state: FlowState, params: FlowParams, mode: str = "density") -> FlowState:
    """Advance one explicit Euler step; returns the new state.

    Geometric failure of the produced shape (self intersection, flipped
    faces, collapsed edges) yields a ``degenerate`` state rather than an
    exception.
    """
    if state.status != RUNNING:
        raise ValueError(f"cannot step a state with status '{state.status}'")
    shape = state.shape
    ctx = params.ctx_for(shape)
    frame = _shape_frame(shape)
    vel, vmax = _velocity(frame, shape.vertices, state.t, params, ctx, mode)
    dt = _dt_bound(frame.h_min, vmax, params)
    newV = shape.vertices + dt * vel
    if not np.all(np.isfinite(newV)):
        raise NumericalAbortError(f"non-finite coordinates after step {state.step}")
    if params.resample_every and (state.step + 1) % params.resample_every == 0:
        if isinstance(shape, Curve2):
            newV = _resample_closed(newV)
    try:
        if isinstance(shape, Curve2):
            new_shape: Shape = Curve2(newV)
        else:
            new_shape = shape.with_vertices(newV, validate=True)
    except InvalidShapeError as exc:
        return replace(state, t=state.t + dt, step=state.step + 1,
                       status=DEGENERATE, note=str(exc))
    return FlowState(new_shape, state.t + dt, state.step + 1, RUNNING)


def run(initial: Shape,
        params: FlowParams,
        mode: str = "density",
        snapshot_stride: int = 100,
        checkpoint_times: Sequence[float] = (),
        checkpoint_steps: Sequence[int] = (),
        dt_schedule: Optional[np.ndarray] = None) -> Trajectory:
    """Integrate until a terminal status and collect series plus snapshots.

    ``checkpoint_times`` are landed on exactly (the step is clamped) and the
    states there are collected in ``Trajectory.checkpoints``; alternatively
    ``checkpoint_steps`` collects states at given step indices. When
    ``dt_schedule`` is given it overrides the adaptive step bound and the
    run ends once the schedule is exhausted; this is how matched-step
    comparison runs are driven.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got '{mode}'")
    is_curve = isinstance(initial, Curve2)
    if not is_curve and not isinstance(initial, Mesh3):
        raise TypeError(f"unsupported shape type {type(initial).__name__}")
    if params.resample_every and not is_curve:
        raise ValueError("arc-length resampling is only defined for curves")

    ctx = params.ctx_for(initial)
    V = np.array(initial.vertices, dtype=float)
    faces = None if is_curve else initial.faces
    topo = None if is_curve else initial.topology()
    prev_face_normals = None

    in_track = InscribedBallTracker()
    out_track = EnclosingBallTracker()
    cols: Dict[str, list] = {name: [] for name in SERIES_FIELDS}
    snapshots: List[FlowState] = []
    checkpoints: List[FlowState] = []
    cp_pending = sorted(float(c) for c in checkpoint_times)
    cp_steps = set(int(s) for s in checkpoint_steps)
    shrink_tol = params.shrink_diameter_tol
    band = (1.0 - params.guard) * ctx.hat_horizon \
        if (mode == "rescaled" and ctx.epsilon == -1) else math.inf

    t = 0.0
    k = 0
    fp_count = 0
    status = RUNNING
    note = ""

    def wrap_shape(verts) -> Shape:
        if is_curve:
            return Curve2._wrap(verts)
        m = Mesh3._wrap(verts, faces)
        m._topology = topo
        return m

    def validated_shape(verts):
        if is_curve:
            return Curve2(verts)
        return Mesh3(verts, faces)

    while True:
        if not np.all(np.isfinite(V)):
            raise NumericalAbortError(f"non-finite vertex coordinates at step {k}")
        try:
            frame = curve_frame(V) if is_curve else mesh_frame(V, faces, topo)
        except InvalidShapeError as exc:
            status, note = DEGENERATE, str(exc)
            break

        enclosed = frame.area if is_curve else frame.volume
        if enclosed <= 0.0:
            status, note = DEGENERATE, "enclosed measure is no longer positive"
            break
        if not is_curve:
            if prev_face_normals is not None:
                flips = np.einsum("ij,ij->i", frame.face_normals, prev_face_normals)
                if float(flips.min()) <= 0.0:
                    status = DEGENERATE
                    note = f"face {int(np.argmin(flips))} flipped orientation"
                    break
            prev_face_normals = frame.face_normals

        try:
            vel, vmax = _velocity(frame, V, t, params, ctx, mode)
        except TimeDomainError as exc:
            status, note = TIME_LIMIT, str(exc)
            break
        if not math.isfinite(vmax):
            raise NumericalAbortError(f"non-finite velocity at step {k}")

        c_center, c_radius = out_track.ball(V)
        if is_curve:
            A, b = frame.edge_normals, frame.edge_offsets
        else:
            A, b = frame.face_normals, frame.face_offsets
        _, i_radius = in_track.radius(A, b)
        roundness = c_radius / i_radius - 1.0 if i_radius > 0 else math.nan

        if shrink_tol is None:
            shrink_tol = 1e-2 * c_radius
        if k == 0:
            snapshots.append(FlowState(wrap_shape(V.copy()), t, k, RUNNING))

        measure_val = frame.length if is_curve else frame.area
        mids = frame.midpoints if is_curve else frame.centroids
        el_meas = frame.edge_lengths if is_curve else frame.face_areas
        psi = _series_psi(params, ctx, mode, mids)
        weighted = measure_val if np.ndim(psi) == 0 and psi == 0.0 \
            else _weighted_total(psi, el_meas)
        h2_flux = float(np.sum(frame.H ** 2 * frame.dual))
        max_radius = float(frame.radii.max())

        # terminal gates, judged on the pre-step state
        if 2.0 * c_radius < shrink_tol:
            if roundness < params.roundness_tol:
                status = SHRUNK_TO_POINT
            else:
                status = DEGENERATE
                note = f"shrank below gate with roundness {roundness:.3g}"
            break
        if params.fixed_point_tol > 0.0 and vmax < params.fixed_point_tol:
            fp_count += 1
            if fp_count >= params.fixed_point_steps:
                status = FIXED_POINT
                break
        else:
            fp_count = 0
        if t >= params.max_time * (1 - 1e-14):
            status = TIME_LIMIT
            break
        if k >= params.max_steps:
            status, note = TIME_LIMIT, "max_steps reached"
            break
        if i_radius >= params.max_inradius:
            status, note = TIME_LIMIT, "max_inradius reached"
            break
        if t >= band * (1 - 1e-14):
            status, note = TIME_LIMIT, "rescaled-flow guard band reached"
            break

        if dt_schedule is not None:
            if k >= len(dt_schedule):
                status, note = TIME_LIMIT, "dt schedule exhausted"
                break
            dt = float(dt_schedule[k])
        else:
            dt = _dt_bound(frame.h_min, vmax, params)
            dt = min(dt, params.max_time - t, band - t)
            if cp_pending and cp_pending[0] > t:
                dt = min(dt, cp_pending[0] - t)
        if dt <= 0.0:
            status, note = DEGENERATE, "step bound collapsed to zero"
            break

        for name, value in (
            ("step", k), ("t", t), ("dt", dt), ("measure", measure_val),
            ("enclosed", enclosed), ("weighted_area", weighted),
            ("circumradius", c_radius), ("inradius", i_radius),
            ("roundness", roundness), ("max_speed", vmax),
            ("max_radius", max_radius), ("h2_flux", h2_flux),
        ):
            cols[name].append(value)

        V = V + dt * vel
        t += dt
        k += 1

        if params.resample_every and k % params.resample_every == 0:
            V = _resample_closed(V)

        while cp_pending and t >= cp_pending[0] - 1e-12 * max(1.0, cp_pending[0]):
            cp = cp_pending.pop(0)
            if abs(t - cp) <= 1e-10 * max(1.0, cp):
                t = cp
            checkpoints.append(FlowState(wrap_shape(V.copy()), t, k, RUNNING))
        if k in cp_steps:
            checkpoints.append(FlowState(wrap_shape(V.copy()), t, k, RUNNING))

        if snapshot_stride and k % snapshot_stride == 0:
            try:
                snap = validated_shape(V.copy())
            except InvalidShapeError as exc:
                status, note = DEGENERATE, str(exc)
                break
            snapshots.append(FlowState(snap, t, k, RUNNING))

    final = FlowState(wrap_shape(V.copy()), t, k, status, note)
    if not snapshots:
        snapshots.append(FlowState(wrap_shape(np.array(initial.vertices)), 0.0, 0, RUNNING))
    snapshots.append(final)
    series = {name: np.asarray(values, dtype=float) for name, values in cols.items()}
    return Trajectory(mode=mode, params=params, snapshots=snapshots, series=series,
                      checkpoints=checkpoints,
                      shrink_tol=shrink_tol if shrink_tol is not None else math.nan)
