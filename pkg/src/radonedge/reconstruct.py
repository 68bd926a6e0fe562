"""Interpolated-data filtering and the discrete inversion sum.

For a direction ``alpha_k`` and plane offset ``p`` the filtered value is the
second ``p``-derivative of the kernel-interpolated data::

    g_eps''(alpha_k, p) = eps^-2 sum_j g(alpha_k, eps (rho + j)) phi''((p - eps (rho + j)) / eps)

and the reconstruction at ``x`` is::

    f_eps(x) = -1 / (4 pi^2) sum_k (c_k / 2) g_eps''(alpha_k, alpha_k . x)

summed over every grid direction; the factor 1/2 accounts for using the full
sphere with even data instead of a hemisphere.

Directions are processed in fixed-size chunks in flat-index order. Each chunk
is reduced with :func:`math.fsum` and the chunk partials are combined with
:func:`math.fsum` in chunk order, so results are bit-identical for any number
of worker threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InputError, RangeError
from .kernel import Kernel
from .phantom import Phantom, radon_array
from .sphere_grid import SphereGrid

__all__ = [
    "Sinogram",
    "AnalyticProvider",
    "TableProvider",
    "build_sinogram",
    "write_sinogram",
    "read_sinogram",
    "filtered_value",
    "filtered_values",
    "reconstruct_point",
    "reconstruct_points",
    "reconstruct_profile",
    "profile_points",
]

CHUNK = 2048
MAGIC = "RSG1"


@dataclass(frozen=True)
class Sinogram:
    """Samples ``g(alpha_(i1, i2), p_j)`` stored as ``values[i1, i2 - 1, j - j_min]``."""

    grid: SphereGrid
    values: np.ndarray

    def __post_init__(self):
        g = self.grid
        shape = (g.n_theta, g.n_gamma - 1, g.n_p)
        if self.values.shape != shape:
            raise InputError(f"sinogram shape {self.values.shape} does not match grid {shape}")
        if not np.all(np.isfinite(self.values)):
            raise InputError("sinogram holds non-finite values")

    def by_direction(self) -> np.ndarray:
        """``(n_directions, n_p)`` view in flat direction order."""
        return np.ascontiguousarray(self.values.transpose(1, 0, 2)).reshape(-1, self.grid.n_p)


class AnalyticProvider:
    """Evaluates the phantom's plane integrals on demand."""

    def __init__(self, phantom: Phantom, grid: SphereGrid):
        self.phantom = phantom
        self.grid = grid

    def samples(self, k, j) -> np.ndarray:
        dirs = self.grid.directions[np.asarray(k)]
        p = self.grid.p_value(j)
        return radon_array(self.phantom, dirs[..., 0], dirs[..., 1], dirs[..., 2], p)


class TableProvider:
    """Serves stored samples; on-grid queries return the table entry unchanged."""

    def __init__(self, sinogram: Sinogram):
        self.sinogram = sinogram
        self.grid = sinogram.grid
        self._flat = sinogram.by_direction()

    def samples(self, k, j) -> np.ndarray:
        k, j = np.broadcast_arrays(np.asarray(k), np.asarray(j))
        return self._flat[k, j - self.grid.j_min]


def build_sinogram(phantom: Phantom, grid: SphereGrid) -> Sinogram:
    """Materialize the full table of plane integrals on ``grid``."""
    values = np.empty((grid.n_theta, grid.n_gamma - 1, grid.n_p))
    j = np.arange(grid.j_min, grid.j_max + 1)
    provider = AnalyticProvider(phantom, grid)
    for row in range(grid.n_gamma - 1):
        k = row * grid.n_theta + np.arange(grid.n_theta)
        values[:, row, :] = provider.samples(k[:, None], j[None, :])
    return Sinogram(grid, values)


def write_sinogram(path, sinogram: Sinogram) -> None:
    """Text header, then little-endian float64 samples in (i1, i2, j) order."""
    g = sinogram.grid
    header = f"{MAGIC}\n{g.n_theta} {g.n_gamma} {g.n_p} {g.eps!r} {g.rho!r} {g.p_min!r}\n"
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(np.ascontiguousarray(sinogram.values, dtype="<f8").tobytes())


def read_sinogram(path) -> Sinogram:
    data = Path(path).read_bytes()
    first = data.find(b"\n")
    second = data.find(b"\n", first + 1)
    if first < 0 or second < 0 or data[:first].decode("ascii", "replace") != MAGIC:
        raise InputError(f"{path}: not a {MAGIC} sinogram file")
    try:
        n_theta, n_gamma, n_p, eps, rho, p_min = data[first + 1:second].decode("ascii").split()
        n_theta, n_gamma, n_p = int(n_theta), int(n_gamma), int(n_p)
        eps, rho, p_min = float(eps), float(rho), float(p_min)
    except ValueError as exc:
        raise InputError(f"{path}: malformed header ({exc})") from None
    j_min = math.ceil(p_min / eps - rho - 1e-9)
    grid = SphereGrid(n_theta, n_gamma, eps, rho, p_min, eps * (rho + j_min + n_p - 1))
    if grid.n_p != n_p:
        raise InputError(f"{path}: header describes {n_p} samples, grid rebuilds {grid.n_p}")
    body = np.frombuffer(data, dtype="<f8", offset=second + 1)
    expected = n_theta * (n_gamma - 1) * n_p
    if body.size != expected:
        raise InputError(f"{path}: expected {expected} samples, found {body.size}")
    return Sinogram(grid, body.astype(float).reshape(n_theta, n_gamma - 1, n_p))


def _window(grid: SphereGrid, kernel: Kernel, p: np.ndarray):
    """Sample indices touched by the kernel around each offset, plus kernel arguments."""
    u = p / grid.eps - grid.rho
    base = np.floor(u)
    w = kernel.half_width
    offsets = np.arange(1 - w, w + 1)
    j = base[..., None] + offsets
    return j.astype(np.int64), u[..., None] - j


def _filtered(provider, kernel: Kernel, grid: SphereGrid, k: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Vectorized filtered values; ``k`` broadcasts against ``p``."""
    j, arg = _window(grid, kernel, p)
    bad = (j.min(axis=-1) < grid.j_min) | (j.max(axis=-1) > grid.j_max)
    if np.any(bad):
        k_b = np.broadcast_to(k, p.shape)
        first = np.unravel_index(int(np.flatnonzero(bad)[0]), bad.shape)
        raise RangeError(
            f"offset p={float(p[first]):.6g} for direction {int(k_b[first])} needs samples "
            f"outside [{grid.p_min}, {grid.p_max}]",
            direction_index=int(k_b[first]),
        )
    g = provider.samples(np.asarray(k)[..., None], j)
    weights = kernel.piece(2)(arg)
    terms = g * weights
    acc = terms[..., 0]
    for col in range(1, terms.shape[-1]):
        acc = acc + terms[..., col]
    return acc / (grid.eps * grid.eps)


def filtered_value(provider, kernel: Kernel, grid: SphereGrid, k: int, p: float) -> float:
    """Second derivative in ``p`` of the interpolated data for direction ``k``."""
    return float(_filtered(provider, kernel, grid, np.asarray(int(k)), np.asarray(float(p))))


def filtered_values(provider, kernel: Kernel, grid: SphereGrid, k, p) -> np.ndarray:
    k = np.asarray(k)
    p = np.asarray(p, dtype=float)
    k, p = np.broadcast_arrays(k, p)
    return _filtered(provider, kernel, grid, k, p)


def _chunk_partials(provider, kernel, grid, points, start, stop) -> list[float]:
    dirs = grid.directions[start:stop]
    k = np.arange(start, stop)[:, None]
    p = (dirs[:, 0:1] * points[:, 0] + dirs[:, 1:2] * points[:, 1]
         + dirs[:, 2:3] * points[:, 2])
    vals = _filtered(provider, kernel, grid, k, p)
    terms = vals * (0.5 * grid.weights[start:stop])[:, None]
    return [math.fsum(terms[:, col]) for col in range(points.shape[0])]


def reconstruct_points(provider, kernel: Kernel, grid: SphereGrid, points, threads: int = 1,
                       chunk: int = CHUNK) -> np.ndarray:
    """Discrete inversion at each row of ``points`` (shape ``(m, 3)``).

    ``threads`` only changes wall time, never the result.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[-1] != 3:
        raise InputError("points must have shape (m, 3)")
    if threads < 1:
        raise InputError("threads must be >= 1")
    bounds = [(s, min(s + chunk, grid.n_directions)) for s in range(0, grid.n_directions, chunk)]

    def work(bound):
        return _chunk_partials(provider, kernel, grid, pts, *bound)

    if threads == 1:
        partials = [work(b) for b in bounds]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            partials = list(pool.map(work, bounds))
    scale = -1.0 / (4.0 * math.pi * math.pi)
    return np.array([scale * math.fsum(part[col] for part in partials) for col in range(len(pts))])


def reconstruct_point(provider, kernel: Kernel, grid: SphereGrid, x, threads: int = 1) -> float:
    return float(reconstruct_points(provider, kernel, grid, [x], threads=threads)[0])


def profile_points(grid: SphereGrid, x0, theta0, h_values) -> np.ndarray:
    """Probe points ``x0 + eps h theta0``."""
    x0 = np.asarray(x0, dtype=float)
    t = np.asarray(theta0, dtype=float)
    h = np.asarray(h_values, dtype=float)
    return x0[None, :] + (grid.eps * h)[:, None] * t[None, :]


def reconstruct_profile(provider, kernel: Kernel, grid: SphereGrid, x0, theta0, h_values,
                        threads: int = 1) -> list[tuple[float, float]]:
    """``(h, f_eps(x0 + eps h theta0))`` pairs in input order."""
    h = [float(v) for v in h_values]
    vals = reconstruct_points(provider, kernel, grid, profile_points(grid, x0, theta0, h), threads)
    return list(zip(h, (float(v) for v in vals)))
