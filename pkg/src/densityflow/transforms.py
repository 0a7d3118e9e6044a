"""Exact closed-form maps between the density flow and ordinary flow.

Everything here is algebra, never numerical integration: these maps are the
trusted reference against which the PDE solver is judged (the test suite
cross-checks them with an independent ODE integrator).

Conventions: ``epsilon`` is the density sign (+1 or -1), ``mu > 0`` the
density scale, ``n`` the intrinsic dimension of the hypersurface. The
weight is ``exp(epsilon * n * mu^2 * |x|^2 / 2)``. Hatted quantities refer
to the time-reparametrized, space-rescaled ordinary flow; for
``epsilon = -1`` that picture only exists for hatted times below
``1 / (2 n mu^2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple, Union

import numpy as np

from .geometry import Shape


class TimeDomainError(ValueError):
    """Raised when a hatted time lies outside the valid reparametrization range."""


@dataclass(frozen=True)
class GaussianContext:
    """Density parameters (sign, scale) plus the hypersurface dimension."""

    epsilon: int
    mu: float
    n: int

    def __post_init__(self):
        if self.epsilon not in (-1, 1):
            raise ValueError(f"epsilon must be +1 or -1, got {self.epsilon}")
        if not (self.mu > 0 and math.isfinite(self.mu)):
            raise ValueError(f"mu must be a positive real, got {self.mu}")
        if self.n not in (1, 2):
            raise ValueError(f"n must be 1 (curves) or 2 (surfaces), got {self.n}")

    @property
    def rate(self) -> float:
        """Exponential rate n * mu^2 of the conformal rescaling."""
        return self.n * self.mu ** 2

    @property
    def hat_horizon(self) -> float:
        """Supremum 1 / (2 n mu^2) of valid hatted times when epsilon = -1."""
        return 1.0 / (2.0 * self.rate)


def time_forward(t: float, ctx: GaussianContext) -> float:
    """Map flow time to the hatted time of the equivalent ordinary flow.

    ``t_hat = (epsilon / (2 n mu^2)) * (exp(2 epsilon n mu^2 t) - 1)``;
    strictly increasing, zero at zero, and bounded by the hat horizon when
    ``epsilon = -1``.
    """
    e = ctx.epsilon
    return (e / (2.0 * ctx.rate)) * math.expm1(2.0 * e * ctx.rate * t)


def time_inverse(t_hat: float, ctx: GaussianContext) -> float:
    """Inverse of :func:`time_forward`.

    ``t = ln(1 + 2 epsilon n mu^2 t_hat) / (2 epsilon n mu^2)``. Rejects
    hatted times at or beyond the horizon when ``epsilon = -1``.
    """
    e = ctx.epsilon
    arg = 2.0 * e * ctx.rate * t_hat
    if arg <= -1.0:
        raise TimeDomainError(
            f"t_hat = {t_hat} is outside the domain (horizon {ctx.hat_horizon})"
        )
    return math.log1p(arg) / (2.0 * e * ctx.rate)


def scale_factor(t: float, ctx: GaussianContext) -> float:
    """Spatial rescaling factor exp(epsilon n mu^2 t) at flow time t."""
    return math.exp(ctx.epsilon * ctx.rate * t)


def rescale_to_hat(shape: Shape, t: float, ctx: GaussianContext) -> Shape:
    """Scale a flow-time-t shape into the hatted (ordinary flow) picture."""
    return shape.scaled(scale_factor(t, ctx))


def rescale_from_hat(shape_hat: Shape, t_hat: float, ctx: GaussianContext) -> Shape:
    """Inverse of :func:`rescale_to_hat`: divide by sqrt(1 + 2 eps n mu^2 t_hat)."""
    arg = 1.0 + 2.0 * ctx.epsilon * ctx.rate * t_hat
    if arg <= 0.0:
        raise TimeDomainError(
            f"t_hat = {t_hat} is outside the domain (horizon {ctx.hat_horizon})"
        )
    return shape_hat.scaled(1.0 / math.sqrt(arg))


# ---------------------------------------------------------------------------
# translation decomposition


def translate_decompose(shape: Shape, p0) -> Shape:
    """Recenter initial data: subtract the split point p0 from every vertex."""
    return shape.translated(-np.asarray(p0, dtype=float))


def translation_at(t: float, p0, ctx: GaussianContext) -> np.ndarray:
    """Translation vector exp(-epsilon n mu^2 t) * p0 carried by the flow."""
    return math.exp(-ctx.epsilon * ctx.rate * t) * np.asarray(p0, dtype=float)


def recompose(shape_centered: Shape, p0, t: float, ctx: GaussianContext) -> Shape:
    """Add the time-t translation of p0 back onto a centered flow state."""
    return shape_centered.translated(translation_at(t, p0, ctx))


# ---------------------------------------------------------------------------
# sphere laws


def mcf_shrink_time(R: float, n: int) -> float:
    """Vanishing time R^2 / (2 n) of a radius-R sphere under ordinary flow."""
    return R * R / (2.0 * n)


def sphere_radius_mcf(R: float, t_hat: float, n: int) -> Optional[float]:
    """Radius sqrt(R^2 - 2 n t_hat) of the ordinary-flow sphere, None once shrunk."""
    if R <= 0:
        raise ValueError("initial radius must be positive")
    arg = R * R - 2.0 * n * t_hat
    if arg <= 0.0:
        return None
    return math.sqrt(arg)


def sphere_radius_gaussian(rho0: float, t: float, ctx: GaussianContext) -> Optional[float]:
    """Radius of an origin-centered sphere under the density flow.

    Closed form ``rho^2(t) = eps (e^{-2 eps n mu^2 t} - 1)/mu^2
    + rho0^2 e^{-2 eps n mu^2 t}``; returns None at and after the shrink
    time. For ``epsilon = -1`` the value is constant at ``rho0 = 1/mu``
    (the fixed point) and grows without bound above it.
    """
    if rho0 <= 0:
        raise ValueError("initial radius must be positive")
    e = ctx.epsilon
    decay = math.exp(-2.0 * e * ctx.rate * t)
    arg = (e / ctx.mu ** 2) * (decay - 1.0) + rho0 * rho0 * decay
    if arg <= 0.0:
        return None
    return math.sqrt(arg)


def gaussian_shrink_time(rho0: float, ctx: GaussianContext) -> float:
    """Shrink time of an origin-centered sphere under the density flow.

    ``epsilon = +1``: always finite, ``ln(1 + mu^2 rho0^2) / (2 n mu^2)``.
    ``epsilon = -1``: finite only below the fixed radius 1/mu, namely
    ``-ln(1 - mu^2 rho0^2) / (2 n mu^2)``; infinity at or above 1/mu.
    """
    if rho0 <= 0:
        raise ValueError("initial radius must be positive")
    m2r2 = ctx.mu ** 2 * rho0 ** 2
    if ctx.epsilon == 1:
        return math.log1p(m2r2) / (2.0 * ctx.rate)
    if m2r2 >= 1.0:
        return math.inf
    return -math.log1p(-m2r2) / (2.0 * ctx.rate)


def gaussian_sphere_fate(rho0: float, ctx: GaussianContext) -> str:
    """Classify an origin-centered sphere: 'shrinks', 'fixed' or 'expands'."""
    if rho0 <= 0:
        raise ValueError("initial radius must be positive")
    if ctx.epsilon == 1:
        return "shrinks"
    x = ctx.mu * rho0
    if x < 1.0:
        return "shrinks"
    if x == 1.0:
        return "fixed"
    return "expands"


# ---------------------------------------------------------------------------
# normalized type-I flow correspondence


def normalized_to_gaussian(shape, t_norm: float, ctx: GaussianContext):
    """Map a normalized type-I flow state to the density-flow state.

    The normalized flow satisfying dF/dt = H N + n mu^2 F in rescaled
    variables corresponds to the density flow with epsilon = -1 through the
    linear change ``F = mu sqrt(n) * F_norm``, ``t = n mu^2 * t_norm``.
    """
    if ctx.epsilon != -1:
        raise ValueError("the normalized correspondence requires epsilon = -1")
    return shape.scaled(ctx.mu * math.sqrt(ctx.n)), ctx.rate * t_norm


def gaussian_to_normalized(shape, t: float, ctx: GaussianContext):
    """Inverse of :func:`normalized_to_gaussian`."""
    if ctx.epsilon != -1:
        raise ValueError("the normalized correspondence requires epsilon = -1")
    return shape.scaled(1.0 / (ctx.mu * math.sqrt(ctx.n))), t / ctx.rate


def mu_for_singular_time(t_singular: float, n: int) -> float:
    """Density scale 1 / sqrt(2 n T) matching a type-I singularity at time T."""
    if t_singular <= 0:
        raise ValueError("singular time must be positive")
    return 1.0 / math.sqrt(2.0 * n * t_singular)


# ---------------------------------------------------------------------------
# conformality diagnostic


def conformality_defect(dphi: Union[Callable[[float], float], Tuple[np.ndarray, np.ndarray]],
                        radii, step_factor: float = 1e-5) -> float:
    """Deviation of a radial field from conformality.

    A radial gradient field with radial derivative ``dphi`` generates
    conformal rescalings exactly when ``phi'' = phi' / r``, i.e. when
    ``dphi`` is linear through the origin. Returns the max over the sample
    radii of ``|phi''(r) - phi'(r)/r|`` normalized by ``max(1, |phi'(r)/r|)``.
    The second derivative is a central difference with step
    ``step_factor * r``, which also covers tabulated fields.
    """
    rs = np.asarray(radii, dtype=float)
    if rs.ndim != 1 or rs.size == 0 or np.any(rs <= 0):
        raise ValueError("radii must be a nonempty array of positive values")
    if callable(dphi):
        f = dphi
    else:
        table_r, table_v = (np.asarray(a, dtype=float) for a in dphi)
        if table_r.shape != table_v.shape or table_r.ndim != 1:
            raise ValueError("a tabulated field needs matching 1-d (r, dphi) arrays")

        def f(r):
            return np.interp(r, table_r, table_v)

    worst = 0.0
    for r in rs:
        h = step_factor * r
        second = (float(f(r + h)) - float(f(r - h))) / (2.0 * h)
        slope = float(f(r)) / r
        defect = abs(second - slope) / max(1.0, abs(slope))
        worst = max(worst, defect)
    return worst
