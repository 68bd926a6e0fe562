"""Uniform distribution modulo one: fractional-part sequences and their measures."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError

__all__ = [
    "FracSequence",
    "frac_points",
    "weyl_sum",
    "star_discrepancy_1d",
    "discrepancy_2d",
    "shear_map",
    "kronecker_sequence",
]


@dataclass(frozen=True)
class FracSequence:
    points: np.ndarray
    eps: float = 1.0
    descriptor: str = ""

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.size and (pts.min() < 0.0 or pts.max() >= 1.0):
            raise InputError("fractional parts must lie in [0, 1)")
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)

    def shifted(self, c: float) -> FracSequence:
        return FracSequence(_frac(self.points + c), self.eps, f"{self.descriptor} + {c}")


def _frac(x) -> np.ndarray:
    out = np.mod(np.asarray(x, dtype=float), 1.0)
    # mod can round up to exactly 1.0 for tiny negative inputs
    return np.where(out >= 1.0, 0.0, out)


def frac_points(f, a: float, b: float, eps: float) -> FracSequence:
    """Fractional parts ``{f(eps i) / eps}`` for all integers ``i`` with ``eps i`` in ``[a, b]``."""
    if not eps > 0:
        raise InputError("eps must be positive")
    if not b > a:
        raise InputError("need b > a")
    i_lo = math.ceil(a / eps - 1e-9)
    i_hi = math.floor(b / eps + 1e-9)
    if i_hi < i_lo:
        raise InputError(f"no sample eps*i in [{a}, {b}] for eps={eps}")
    t = eps * np.arange(i_lo, i_hi + 1, dtype=float)
    vals = np.asarray(f(t), dtype=float) / eps
    if not np.all(np.isfinite(vals)):
        raise InputError("f is not finite on every sample")
    return FracSequence(_frac(vals), eps, getattr(f, "descriptor", ""))


def weyl_sum(seq, M: int) -> float:
    """``|(1/N) sum_i exp(2 pi i M x_i)|``.

    The phase ``M x_i`` is reduced mod 1 before exponentiating, so exact
    resonances give exactly 1.
    """
    if int(M) != M or M == 0:
        raise InputError("M must be a nonzero integer")
    x = seq.points if isinstance(seq, FracSequence) else np.asarray(seq, dtype=float)
    if x.size == 0:
        raise InputError("empty sequence")
    phase = 2.0 * math.pi * _frac(int(M) * x)
    re = math.fsum(np.cos(phase))
    im = math.fsum(np.sin(phase))
    return math.hypot(re, im) / x.size


def star_discrepancy_1d(seq) -> float:
    """Exact ``D*_N`` of points in ``[0, 1)``."""
    x = np.sort(seq.points if isinstance(seq, FracSequence) else np.asarray(seq, dtype=float))
    n = x.size
    if n == 0:
        raise InputError("empty sequence")
    k = np.arange(1, n + 1)
    return float(max(np.max(k / n - x), np.max(x - (k - 1) / n)))


def discrepancy_2d(points, grid_resolution: int = 100) -> tuple[float, float]:
    """Anchored-box discrepancy with corners on an ``r x r`` grid.

    Returns ``(value, error_bound)``: the exact star discrepancy lies within
    ``error_bound = 2 / r`` above ``value`` (box areas change by at most
    ``2/r`` between neighboring grid corners).
    """
    r = int(grid_resolution)
    if r < 2:
        raise InputError("grid_resolution must be at least 2")
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] == 0:
        raise InputError("points must have shape (N, 2), N > 0")
    ix = np.minimum((pts[:, 0] * r).astype(np.int64), r - 1)
    iy = np.minimum((pts[:, 1] * r).astype(np.int64), r - 1)
    hist = np.zeros((r, r), dtype=np.int64)
    np.add.at(hist, (ix, iy), 1)
    counts = hist.cumsum(axis=0).cumsum(axis=1)
    corners = np.arange(1, r + 1) / r
    area = corners[:, None] * corners[None, :]
    value = float(np.max(np.abs(counts / pts.shape[0] - area)))
    return value, 2.0 / r


def shear_map(points, a: float) -> np.ndarray:
    """``(x, y) -> ({x + a y}, y)``."""
    pts = np.asarray(points, dtype=float)
    out = pts.copy()
    out[:, 0] = _frac(pts[:, 0] + a * pts[:, 1])
    return out


def kronecker_sequence(alphas, n: int, start: int = 1) -> np.ndarray:
    """``({k alpha_1}, .., {k alpha_d})`` for ``k = start .. start + n - 1``."""
    k = np.arange(start, start + n, dtype=float)[:, None]
    return _frac(k * np.asarray(alphas, dtype=float)[None, :])
