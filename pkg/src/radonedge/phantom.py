"""Ball phantoms with closed-form plane integrals.

A phantom is a superposition of uniform balls; densities add where balls
overlap. Every geometric quantity the reconstruction analysis needs (plane
integrals, tangency offsets, jump sizes, boundary curvature) has a closed
form for balls, which is what makes exact oracles possible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import GeometryError, InputError, NumericError

__all__ = [
    "Ball",
    "Phantom",
    "JumpParams",
    "SurfaceCurvature",
    "ball_radon",
    "phantom_radon",
    "radon_array",
    "radon_quadrature_oracle",
    "boundary_point",
    "jump_params",
    "tangency_offsets",
    "surface_curvature",
    "local_amplitude_slope",
    "two_ball_phantom",
]

UNIT_TOL = 1e-12


def _unit(v, name="alpha", tol=UNIT_TOL) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (3,) or not np.all(np.isfinite(v)):
        raise InputError(f"{name} must be a finite 3-vector")
    if abs(math.sqrt(float(v @ v)) - 1.0) > tol:
        raise InputError(f"{name} must be a unit vector (|{name}| = {np.linalg.norm(v):.15g})")
    return v


@dataclass(frozen=True)
class Ball:
    center: tuple[float, float, float]
    radius: float
    density: float = 1.0

    def __post_init__(self):
        c = tuple(float(x) for x in self.center)
        if len(c) != 3 or not all(math.isfinite(x) for x in c):
            raise InputError("ball center must be a finite 3-vector")
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise InputError(f"ball radius must be positive, got {self.radius!r}")
        if not math.isfinite(self.density):
            raise InputError("ball density must be finite")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", float(self.radius))
        object.__setattr__(self, "density", float(self.density))


@dataclass(frozen=True)
class Phantom:
    balls: tuple[Ball, ...]

    def __post_init__(self):
        balls = tuple(self.balls)
        if not balls:
            raise InputError("phantom needs at least one ball")
        object.__setattr__(self, "balls", balls)

    def __len__(self):
        return len(self.balls)

    def without(self, index: int) -> Phantom:
        rest = tuple(b for i, b in enumerate(self.balls) if i != index)
        return Phantom(rest)


@dataclass(frozen=True)
class JumpParams:
    f0: float
    f_delta: float
    theta0: tuple[float, float, float]


@dataclass(frozen=True)
class SurfaceCurvature:
    Q: np.ndarray
    detQ: float


def two_ball_phantom() -> Phantom:
    """Two unit-density balls of radius 4; the first is probed in the edge-response experiment."""
    return Phantom((Ball((0.0, 0.0, -5.0), 4.0, 1.0), Ball((-5.52, 0.0, -7.36), 4.0, 1.0)))


def radon_array(phantom: Phantom, ax, ay, az, p) -> np.ndarray:
    """Vectorized plane integrals; ``ax, ay, az, p`` broadcast together.

    The dot product is written out term by term so that the result for a
    given (direction, offset) pair does not depend on array layout.
    """
    ax, ay, az, p = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (ax, ay, az, p)))
    total = np.zeros(p.shape)
    for ball in phantom.balls:
        cx, cy, cz = ball.center
        d = p - (ax * cx + ay * cy + az * cz)
        r2 = ball.radius * ball.radius
        chord = r2 - d * d
        total = total + np.where(chord > 0.0, (ball.density * math.pi) * chord, 0.0)
    return total


def ball_radon(ball: Ball, alpha, p: float) -> float:
    """Integral of a uniform ball over the plane ``alpha . x = p``."""
    a = _unit(alpha)
    return float(radon_array(Phantom((ball,)), a[0], a[1], a[2], float(p)))


def phantom_radon(phantom: Phantom, alpha, p: float) -> float:
    a = _unit(alpha)
    return float(radon_array(phantom, a[0], a[1], a[2], float(p)))


def _plane_basis(alpha: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    helper = np.array([1.0, 0.0, 0.0]) if abs(alpha[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(alpha, helper)
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(alpha, e1)


def radon_quadrature_oracle(phantom: Phantom, alpha, p: float, grid_step: float) -> float:
    """Midpoint Riemann sum of the density over the plane ``alpha . x = p``.

    Independent of the closed form: cells of side ``grid_step`` on a lattice
    anchored at the plane's foot point are counted when their midpoint lies
    strictly inside a ball. The count is done one lattice row at a time (the
    cells of a row inside a ball form a contiguous run), which gives the same
    sum as visiting every cell.
    """
    a = _unit(alpha)
    if not grid_step > 0:
        raise InputError("grid_step must be positive")
    e1, e2 = _plane_basis(a)
    foot = a * float(p)
    h = float(grid_step)
    total = 0.0
    for ball in phantom.balls:
        c = np.asarray(ball.center)
        d = float(c @ a) - float(p)
        r2 = ball.radius * ball.radius - d * d
        if r2 <= 0.0:
            continue
        u0, v0 = float((c - foot) @ e1), float((c - foot) @ e2)
        r = math.sqrt(r2)
        rows = np.arange(math.floor((u0 - r) / h), math.ceil((u0 + r) / h) + 1)
        du = (rows + 0.5) * h - u0
        w2 = r2 - du * du
        w = np.sqrt(np.where(w2 > 0.0, w2, 0.0))
        # cells j with |(j + 1/2) h - v0| < w
        lo = np.floor((v0 - w) / h - 0.5)
        hi = np.ceil((v0 + w) / h - 0.5)
        count = np.where(w2 > 0.0, np.maximum(hi - lo - 1.0, 0.0), 0.0)
        total += ball.density * float(count.sum()) * h * h
    return total


def boundary_point(ball: Ball, theta0) -> np.ndarray:
    """Point on the sphere whose inward normal is ``theta0``."""
    t = _unit(theta0, "theta0")
    return np.asarray(ball.center) - ball.radius * t


def jump_params(phantom: Phantom, x0, theta0, probe_eps: float | None = None) -> JumpParams:
    """One-sided limits of the density across the single boundary through ``x0``.

    Computed from exact ball membership, not by sampling, so ``probe_eps``
    is ignored. A point counts as on a boundary when its distance to the
    sphere is within ``1e-9 * radius``; ``theta0`` must match the inward
    normal there to within ``1e-6``.
    """
    t = _unit(theta0, "theta0")
    x = np.asarray(x0, dtype=float)
    on_boundary = []
    interior = 0.0
    for idx, ball in enumerate(phantom.balls):
        dist = float(np.linalg.norm(x - np.asarray(ball.center)))
        if abs(dist - ball.radius) <= 1e-9 * ball.radius:
            on_boundary.append(idx)
        elif dist < ball.radius:
            interior += ball.density
    if len(on_boundary) != 1:
        raise GeometryError(f"x0 lies on {len(on_boundary)} ball boundaries; exactly one is required")
    ball = phantom.balls[on_boundary[0]]
    normal = (np.asarray(ball.center) - x) / ball.radius
    if float(normal @ t) < 1.0 - 1e-6:
        raise GeometryError("theta0 does not point into the ball whose boundary contains x0")
    f0 = interior + ball.density
    return JumpParams(f0=f0, f_delta=ball.density, theta0=tuple(t))


def tangency_offsets(ball: Ball, alpha) -> tuple[float, float]:
    """Both plane offsets at which ``Pi(alpha, p)`` touches the sphere."""
    a = _unit(alpha)
    mid = float(a @ np.asarray(ball.center))
    return mid - ball.radius, mid + ball.radius


def surface_curvature(ball: Ball) -> SurfaceCurvature:
    """Second fundamental form of a sphere in any orthonormal tangent basis."""
    q = np.eye(2) / ball.radius
    return SurfaceCurvature(Q=q, detQ=float(np.linalg.det(q)))


def local_amplitude_slope(phantom: Phantom, ball_index: int, alpha, fit_window: float,
                          p_step: float | None = None) -> float:
    """Fit the kink amplitude of ``g(alpha, .)`` at the lower tangency offset.

    Near ``p0 = alpha . c - R`` the data behave like ``(p - p0)_+ G``. The
    slope jump is estimated by least-squares quadratics on each side of
    ``p0`` (so smooth contributions of other balls cancel) and returned as
    the fitted ``G(alpha, 0)``; for a ball this is ``2 pi f_delta R``.
    """
    a = _unit(alpha)
    ball = phantom.balls[ball_index]
    if not fit_window > 0:
        raise InputError("fit_window must be positive")
    step = fit_window / 32 if p_step is None else p_step
    n = int(math.floor(fit_window / step + 1e-9))
    if n < 3:
        raise NumericError(f"fit window {fit_window} holds {n} samples at step {step}; need at least 3")
    p0 = tangency_offsets(ball, a)[0]
    u = np.arange(1, n + 1) * step
    slopes = []
    for sign in (1.0, -1.0):
        g = radon_array(phantom, a[0], a[1], a[2], p0 + sign * u)
        design = np.column_stack([np.ones_like(u), sign * u, u * u])
        coef, *_ = np.linalg.lstsq(design, g, rcond=None)
        slopes.append(coef[1])
    return float(slopes[0] - slopes[1])


def ball_list(rows: Sequence[Sequence[float]]) -> Phantom:
    """Phantom from ``(cx, cy, cz, radius, density)`` rows."""
    return Phantom(tuple(Ball(tuple(r[:3]), r[3], r[4]) for r in rows))
