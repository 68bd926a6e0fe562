"""Latitude/longitude direction grid, quadrature weights and the local chart.

Directions are ``alpha = (cos t sin g, sin t sin g, cos g)`` with
``t = 2 pi i1 / n_theta`` for ``0 <= i1 < n_theta`` and ``g = pi i2 / n_gamma``
for ``1 <= i2 < n_gamma`` (poles and the repeated ``t = 2 pi`` column are
dropped). Flat direction index ``k = (i2 - 1) * n_theta + i1``, i.e.
row-major over ``(i2, i1)``.

The chart is ``H(t1, t2) = alpha(theta = t1 dtheta / eps, gamma = t2 dgamma / eps)``
so that grid directions sit at ``H(eps i1, eps i2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ChartError, InputError

__all__ = ["SphereGrid", "GridChart", "build_grid", "weight", "chart_at", "direction"]

_INDEX_SLACK = 1e-9


def direction(theta, gamma) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    sg = np.sin(gamma)
    return np.stack([np.cos(theta) * sg, np.sin(theta) * sg, np.cos(gamma)], axis=-1)


@dataclass(frozen=True)
class SphereGrid:
    n_theta: int
    n_gamma: int
    eps: float
    rho: float = 0.0
    p_min: float = -10.0
    p_max: float = 10.0

    def __post_init__(self):
        for name in ("n_theta", "n_gamma"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 2:
                raise InputError(f"{name} must be an integer >= 2, got {v!r}")
        if not (math.isfinite(self.eps) and self.eps > 0):
            raise InputError(f"eps must be positive, got {self.eps!r}")
        if not 0.0 <= self.rho < 1.0:
            raise InputError(f"rho must lie in [0, 1), got {self.rho!r}")
        if not self.p_min < self.p_max:
            raise InputError("p_min must be smaller than p_max")
        if self.j_max < self.j_min:
            raise InputError("affine range holds no samples")

    # -- angular part ---------------------------------------------------------
    @property
    def delta_theta(self) -> float:
        return 2.0 * math.pi / self.n_theta

    @property
    def delta_gamma(self) -> float:
        return math.pi / self.n_gamma

    @property
    def n_directions(self) -> int:
        return self.n_theta * (self.n_gamma - 1)

    @cached_property
    def thetas(self) -> np.ndarray:
        return self.delta_theta * np.arange(self.n_theta)

    @cached_property
    def gammas(self) -> np.ndarray:
        return self.delta_gamma * np.arange(1, self.n_gamma)

    @cached_property
    def directions(self) -> np.ndarray:
        """``(n_directions, 3)`` unit vectors in flat-index order (read-only)."""
        th, ga = np.meshgrid(self.thetas, self.gammas)  # rows: i2, cols: i1
        out = direction(th, ga).reshape(-1, 3)
        out.setflags(write=False)
        return out

    @cached_property
    def weights(self) -> np.ndarray:
        """Tessellation areas ``sin(gamma) dtheta dgamma`` per direction."""
        ring = np.sin(self.gammas) * self.delta_theta * self.delta_gamma
        out = np.repeat(ring, self.n_theta)
        out.setflags(write=False)
        return out

    def flat_index(self, i1: int, i2: int) -> int:
        if not (0 <= i1 < self.n_theta and 1 <= i2 < self.n_gamma):
            raise InputError(f"direction index ({i1}, {i2}) out of range")
        return (i2 - 1) * self.n_theta + i1

    def grid_index(self, k: int) -> tuple[int, int]:
        i2m1, i1 = divmod(int(k), self.n_theta)
        return i1, i2m1 + 1

    def antipode_index(self, i1: int, i2: int) -> tuple[int, int]:
        """Node holding ``-alpha`` (needs even ``n_theta``)."""
        if self.n_theta % 2:
            raise InputError("antipodal pairing needs an even n_theta")
        return (i1 + self.n_theta // 2) % self.n_theta, self.n_gamma - i2

    # -- affine part ----------------------------------------------------------
    @property
    def j_min(self) -> int:
        return math.ceil(self.p_min / self.eps - self.rho - _INDEX_SLACK)

    @property
    def j_max(self) -> int:
        return math.floor(self.p_max / self.eps - self.rho + _INDEX_SLACK)

    @property
    def n_p(self) -> int:
        return self.j_max - self.j_min + 1

    def p_value(self, j):
        """Affine sample ``eps (rho + j)``."""
        return self.eps * (self.rho + np.asarray(j, dtype=float))

    @cached_property
    def p_samples(self) -> np.ndarray:
        return self.p_value(np.arange(self.j_min, self.j_max + 1))

    # -- chart ----------------------------------------------------------------
    @property
    def chart_scale(self) -> tuple[float, float]:
        """``(dtheta / eps, dgamma / eps)``: angle per unit of chart coordinate."""
        return self.delta_theta / self.eps, self.delta_gamma / self.eps


def build_grid(n_theta: int, n_gamma: int, eps: float, rho: float = 0.0,
               p_range: tuple[float, float] = (-10.0, 10.0)) -> SphereGrid:
    """Validated grid; ``n_theta`` and ``n_gamma`` must be at least 2."""
    return SphereGrid(int(n_theta), int(n_gamma), float(eps), float(rho),
                      float(p_range[0]), float(p_range[1]))


def weight(grid: SphereGrid, i1: int, i2: int) -> float:
    return float(grid.weights[grid.flat_index(i1, i2)])


@dataclass(frozen=True)
class GridChart:
    """Chart data at the preimage of ``theta0``.

    ``grad_q`` and ``hess_q`` are the gradient and Hessian of
    ``t -> H(t) . x0`` at ``t_star``; ``jacobian`` is the area factor of
    ``H`` there.
    """

    t_star: tuple[float, float]
    angles: tuple[float, float]
    grad_q: np.ndarray
    hess_q: np.ndarray
    jacobian: float


def _angles_of(v: np.ndarray) -> tuple[float, float]:
    theta = math.atan2(v[1], v[0]) % (2.0 * math.pi)
    gamma = math.acos(max(-1.0, min(1.0, v[2])))
    return theta, gamma


def angle_derivatives(theta: float, gamma: float):
    """First and second partials of ``alpha(theta, gamma)``.

    Returns ``(a_t, a_g, a_tt, a_tg, a_gg)`` as 3-vectors.
    """
    ct, st, cg, sg = math.cos(theta), math.sin(theta), math.cos(gamma), math.sin(gamma)
    a_t = np.array([-st * sg, ct * sg, 0.0])
    a_g = np.array([ct * cg, st * cg, -sg])
    a_tt = np.array([-ct * sg, -st * sg, 0.0])
    a_tg = np.array([-st * cg, ct * cg, 0.0])
    a_gg = np.array([-ct * sg, -st * sg, -cg])
    return a_t, a_g, a_tt, a_tg, a_gg


def chart_at(grid: SphereGrid, theta0, x0) -> GridChart:
    """Gradient and Hessian of ``H(t) . x0`` at ``H^{-1}(theta0)``."""
    v = np.asarray(theta0, dtype=float)
    if v.shape != (3,) or abs(np.linalg.norm(v) - 1.0) > 1e-12:
        raise InputError("theta0 must be a unit 3-vector")
    x = np.asarray(x0, dtype=float)
    theta, gamma = _angles_of(v)
    if math.sin(gamma) < 1e-6:
        raise ChartError(f"theta0 is within {math.sin(gamma):.1e} of a pole of the chart")
    s1, s2 = grid.chart_scale
    a_t, a_g, a_tt, a_tg, a_gg = angle_derivatives(theta, gamma)
    grad = np.array([s1 * float(a_t @ x), s2 * float(a_g @ x)])
    hess = np.array([
        [s1 * s1 * float(a_tt @ x), s1 * s2 * float(a_tg @ x)],
        [s1 * s2 * float(a_tg @ x), s2 * s2 * float(a_gg @ x)],
    ])
    jac = s1 * s2 * math.sin(gamma)
    if not jac > 0:
        raise ChartError("chart Jacobian is not positive")
    return GridChart(
        t_star=(theta / s1, gamma / s2),
        angles=(theta, gamma),
        grad_q=grad,
        hess_q=hess,
        jacobian=jac,
    )
