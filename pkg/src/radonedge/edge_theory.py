"""Predicted edge response, profile comparison and genericity diagnostics.

At a generic boundary point the reconstruction near ``x0`` tends to::

    f0 - f_delta * int_h^inf phi(s) ds

Whether a point is generic depends on number-theoretic properties of the
sampling chart. Irrationality cannot be decided in floating point, so the
diagnostics report ``suspect_rational(p/q)`` whenever a value lies within
``tol`` of a fraction with denominator at most ``q_max``; the verdicts are
falsifiable surrogates with those stated limits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import GeometryError, InputError
from .kernel import Kernel, tail_integral
from .phantom import Ball, JumpParams, Phantom
from .reconstruct import AnalyticProvider, reconstruct_points, profile_points
from .sphere_grid import SphereGrid, chart_at, direction

__all__ = [
    "EdgeProfile",
    "GenericityReport",
    "TangencyCurve",
    "Condition4Result",
    "predicted_response",
    "compare_profiles",
    "edge_profile",
    "rational_approximation",
    "gradient_verdict",
    "genericity_report",
    "tangency_curve",
    "tangency_curves",
    "condition4_check",
    "remote_convergence_check",
    "two_ball_probe",
]

Q_MAX = 1000
RATIONAL_TOL = 1e-9
FLAT_TOL = 1e-6
M_MAX = 5


def predicted_response(kernel: Kernel, jump: JumpParams, h):
    """Limit of the reconstruction at ``x0 + eps h theta0``; vectorized in ``h``."""
    if np.ndim(h) == 0:
        return jump.f0 - jump.f_delta * tail_integral(kernel, float(h))
    return np.array([jump.f0 - jump.f_delta * tail_integral(kernel, float(v)) for v in h])


@dataclass
class EdgeProfile:
    h: np.ndarray
    reconstructed: np.ndarray
    predicted: np.ndarray
    max_abs_dev: float
    l2_dev: float

    def rows(self):
        for h, f, p in zip(self.h, self.reconstructed, self.predicted):
            yield float(h), float(f), float(p), abs(float(f) - float(p))


def compare_profiles(reconstructed, predicted, h=None) -> EdgeProfile:
    """Max and RMS deviation between aligned profiles."""
    rec = np.asarray(reconstructed, dtype=float)
    pred = np.asarray(predicted, dtype=float)
    if rec.shape != pred.shape or rec.ndim != 1:
        raise InputError(f"profiles must be equal-length 1-D sequences ({rec.shape} vs {pred.shape})")
    if rec.size == 0:
        raise InputError("profiles are empty")
    hh = np.arange(rec.size, dtype=float) if h is None else np.asarray(h, dtype=float)
    if hh.shape != rec.shape:
        raise InputError("h grid does not match the profiles")
    diff = np.abs(rec - pred)
    return EdgeProfile(hh, rec, pred, float(diff.max()), float(np.sqrt(np.mean(diff**2))))


def edge_profile(provider, kernel: Kernel, grid: SphereGrid, x0, theta0, h_values,
                 jump: JumpParams, threads: int = 1) -> EdgeProfile:
    """Reconstruct along the normal and compare with the predicted response."""
    h = np.asarray(h_values, dtype=float)
    rec = reconstruct_points(provider, kernel, grid, profile_points(grid, x0, theta0, h), threads)
    return compare_profiles(rec, predicted_response(kernel, jump, h), h)


# -- rationality scan ---------------------------------------------------------

def rational_approximation(x: float, q_max: int = Q_MAX, tol: float = RATIONAL_TOL) -> Fraction | None:
    """Best fraction with denominator ``<= q_max`` if it lies within ``tol`` of ``x``."""
    if not math.isfinite(x):
        return None
    r = Fraction(x).limit_denominator(q_max)
    return r if abs(float(r) - x) <= tol else None


def gradient_verdict(grad, q_max: int = Q_MAX, tol: float = RATIONAL_TOL) -> tuple[str, tuple]:
    """``('generic', ())`` if some component passes the scan, else the suspects."""
    approx = [rational_approximation(float(g), q_max, tol) for g in grad]
    if any(a is None for a in approx):
        return "generic", ()
    text = ", ".join(f"{a.numerator}/{a.denominator}" for a in approx)
    return f"suspect_rational({text})", tuple(approx)


# -- tangency curves ----------------------------------------------------------

@dataclass
class TangencyCurve:
    """Samples of a tangency curve ``t2 = A(t1)`` in chart coordinates.

    ``q`` holds ``H(t1, A(t1)) . x0`` along the curve; ``d*`` arrays are first
    and second derivatives in ``t1``. ``segment`` labels runs of consecutive
    valid samples, so derivative tests never bridge a gap.
    """

    ball_index: int
    t1: np.ndarray
    A: np.ndarray
    dA: np.ndarray
    d2A: np.ndarray
    q: np.ndarray
    dq: np.ndarray
    d2q: np.ndarray
    segment: np.ndarray | None = None
    branch: int = 0
    residual: float = 0.0

    def __post_init__(self):
        n = len(self.t1)
        for name in ("A", "dA", "d2A", "q", "dq", "d2q"):
            setattr(self, name, np.asarray(getattr(self, name), dtype=float) * np.ones(n))
        self.t1 = np.asarray(self.t1, dtype=float)
        if self.segment is None:
            self.segment = np.zeros(n, dtype=int)

    def __len__(self):
        return len(self.t1)


def _branch_samples(d: np.ndarray, x0: np.ndarray, radius: float, thetas: np.ndarray, branch: int,
                    max_slope: float):
    a = d[0] * np.cos(thetas) + d[1] * np.sin(thetas)
    a_t = -d[0] * np.sin(thetas) + d[1] * np.cos(thetas)
    b = d[2]
    r = np.hypot(a, b)
    with np.errstate(invalid="ignore", divide="ignore"):
        base = np.arcsin(np.clip(-radius / r, -1.0, 1.0))
    phase = np.arctan2(b, a)
    gamma = (base - phase) if branch == 0 else (math.pi - base - phase)
    gamma = np.mod(gamma, 2.0 * math.pi)
    valid = (r > radius) & (gamma > 0.0) & (gamma < math.pi)
    for _ in range(2):
        f = a * np.sin(gamma) + b * np.cos(gamma) + radius
        fg = a * np.cos(gamma) - b * np.sin(gamma)
        with np.errstate(invalid="ignore", divide="ignore"):
            gamma = np.where(valid & (fg != 0), gamma - f / fg, gamma)
    sg, cg = np.sin(gamma), np.cos(gamma)
    f_t = a_t * sg
    f_g = a * cg - b * sg
    f_tt = -a * sg
    f_tg = a_t * cg
    f_gg = -a * sg - b * cg
    with np.errstate(invalid="ignore", divide="ignore"):
        g1 = -f_t / f_g
        g2 = -(f_tt + 2.0 * f_tg * g1 + f_gg * g1 * g1) / f_g
    valid &= np.isfinite(g1) & (np.abs(g1) <= max_slope) & (gamma > 0.0) & (gamma < math.pi)

    ax = x0[0] * np.cos(thetas) + x0[1] * np.sin(thetas)
    ax_t = -x0[0] * np.sin(thetas) + x0[1] * np.cos(thetas)
    bx = x0[2]
    q = ax * sg + bx * cg
    q_t = ax_t * sg
    q_g = ax * cg - bx * sg
    q_tt = -ax * sg
    q_tg = ax_t * cg
    q_gg = -ax * sg - bx * cg
    q1 = q_t + q_g * g1
    q2 = q_tt + 2.0 * q_tg * g1 + q_gg * g1 * g1 + q_g * g2
    resid = np.abs(a * sg + b * cg + radius)
    return valid, gamma, g1, g2, q, q1, q2, resid


def tangency_curves(ball: Ball, grid: SphereGrid, x0, n_samples: int = 2001, ball_index: int = 0,
                    max_slope: float = 1e3) -> list[TangencyCurve]:
    """Both branches of ``alpha . (x0 - c) = -R`` that intersect the chart.

    For each sampled longitude the latitude is solved in closed form and
    polished by Newton steps. Samples where the curve is nearly tangent to
    a meridian (``|dgamma/dtheta| > max_slope``) are dropped; those stretches
    need the transposed parametrization.
    """
    x = np.asarray(x0, dtype=float)
    c = np.asarray(ball.center)
    d = x - c
    if float(np.linalg.norm(d)) <= ball.radius * (1.0 + 1e-12):
        raise GeometryError("x0 is not outside the ball; no tangent plane passes through it")
    if n_samples < 3:
        raise InputError("n_samples must be at least 3")
    s1, s2 = grid.chart_scale
    thetas = np.linspace(0.0, 2.0 * math.pi, n_samples, endpoint=False)
    curves = []
    for branch in (0, 1):
        valid, gamma, g1, g2, q, q1, q2, resid = _branch_samples(d, x, ball.radius, thetas, branch, max_slope)
        if not valid.any():
            continue
        idx = np.nonzero(valid)[0]
        segment = np.concatenate([[0], np.cumsum(np.diff(idx) > 1)])
        curves.append(TangencyCurve(
            ball_index=ball_index,
            t1=thetas[idx] / s1,
            A=gamma[idx] / s2,
            dA=g1[idx] * s1 / s2,
            d2A=g2[idx] * s1 * s1 / s2,
            q=q[idx],
            dq=q1[idx] * s1,
            d2q=q2[idx] * s1 * s1,
            segment=segment,
            branch=branch,
            residual=float(resid[idx].max()),
        ))
    if not curves:
        raise GeometryError("the tangency circle does not meet the chart domain")
    return curves


def tangency_curve(ball: Ball, grid: SphereGrid, x0, n_samples: int = 2001, ball_index: int = 0,
                   branch: int | None = None) -> TangencyCurve:
    """One branch of the tangency curve (the first non-empty one by default)."""
    curves = tangency_curves(ball, grid, x0, n_samples, ball_index)
    if branch is None:
        return curves[0]
    for cv in curves:
        if cv.branch == branch:
            return cv
    raise GeometryError(f"branch {branch} of the tangency curve is empty")


@dataclass
class Condition4Result:
    passed: bool
    suspects: list[tuple[int, int, float, float, str]] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        if self.passed:
            return "pass"
        m1, m2, lo, hi, rat = self.suspects[0]
        return f"suspect(M=({m1},{m2}) flat on t1 in [{lo:.6g}, {hi:.6g}] with slope {rat})"


def _flat_runs(mask: np.ndarray, segment: np.ndarray, min_len: int = 3):
    runs = []
    start = None
    for i in range(len(mask) + 1):
        inside = i < len(mask) and mask[i] and (start is None or segment[i] == segment[start])
        if inside and start is None:
            start = i
        elif not inside and start is not None:
            if i - start >= min_len:
                runs.append((start, i))
            start = i if (i < len(mask) and mask[i]) else None
    return runs


def condition4_check(curve: TangencyCurve, M_max: int = M_MAX, q_max: int = Q_MAX,
                     tol: float = RATIONAL_TOL, tol_flat: float = FLAT_TOL) -> Condition4Result:
    """Bounded scan of the flat-stretch condition along a tangency curve.

    For integer pairs ``0 < M1^2 + M2^2 <= M_max^2`` the function
    ``M1 q(t1) + M2 A(t1)`` is examined: runs of at least three consecutive
    samples with ``|f''| < tol_flat * max(1, max |f'|)`` count as flat
    stretches, and a flat stretch whose slope passes the rationality scan is
    reported as suspect.
    """
    result = Condition4Result(passed=True)
    if len(curve) < 3:
        result.notes.append("too few samples to test")
        return result
    pairs = [
        (m1, m2)
        for m1 in range(0, M_max + 1)
        for m2 in range(-M_max, M_max + 1)
        if 0 < m1 * m1 + m2 * m2 <= M_max * M_max and (m1 > 0 or m2 > 0)
    ]
    for m1, m2 in pairs:
        f1 = m1 * curve.dq + m2 * curve.dA
        f2 = m1 * curve.d2q + m2 * curve.d2A
        scale = max(1.0, float(np.max(np.abs(f1))))
        for lo, hi in _flat_runs(np.abs(f2) < tol_flat * scale, curve.segment):
            slope = float(np.median(f1[lo:hi]))
            rat = rational_approximation(slope, q_max, tol)
            if rat is not None:
                result.passed = False
                result.suspects.append((m1, m2, float(curve.t1[lo]), float(curve.t1[hi - 1]),
                                        f"{rat.numerator}/{rat.denominator}"))
            else:
                result.notes.append(f"M=({m1},{m2}) flat on [{curve.t1[lo]:.6g}, {curve.t1[hi - 1]:.6g}], slope irrational to q<={q_max}")
    return result


# -- genericity ---------------------------------------------------------------

@dataclass
class GenericityReport:
    cond1_positive_curvature: bool
    cond2_irrational_gradient: str
    cond3_remote_curvature: bool
    cond4_curve_check: dict[int, str]
    notes: list[str] = field(default_factory=list)
    grad_q: np.ndarray | None = None
    cond2_rationals: tuple = ()

    @property
    def cond2_flagged(self) -> bool:
        return self.cond2_irrational_gradient.startswith("suspect_rational")

    def lines(self) -> list[str]:
        out = [
            f"cond1_positive_curvature: {self.cond1_positive_curvature}",
            f"cond2_irrational_gradient: {self.cond2_irrational_gradient}"
            + ("" if self.grad_q is None else f" grad_q=({self.grad_q[0]:.17g}, {self.grad_q[1]:.17g})"),
            f"cond3_remote_curvature: {self.cond3_remote_curvature}",
            "cond4_curve_check: "
            + ("; ".join(f"ball {i + 1}: {v}" for i, v in sorted(self.cond4_curve_check.items())) or "no remote tangent balls"),
        ]
        out.extend(f"note: {n}" for n in self.notes)
        return out


def genericity_report(phantom: Phantom, grid: SphereGrid, x0, theta0, q_max: int = Q_MAX,
                      tol: float = RATIONAL_TOL, M_max: int = M_MAX, n_samples: int = 2001) -> GenericityReport:
    """Evaluate the four genericity conditions for ``x0`` and direction ``theta0``."""
    x = np.asarray(x0, dtype=float)
    notes = []
    on_boundary = []
    for idx, ball in enumerate(phantom.balls):
        dist = float(np.linalg.norm(x - np.asarray(ball.center)))
        if abs(dist - ball.radius) <= 1e-9 * ball.radius:
            on_boundary.append(idx)
    cond1 = len(on_boundary) <= 1
    if not on_boundary:
        notes.append("x0 is off the singular support; conditions 1 and 2 are not required")
    elif len(on_boundary) > 1:
        notes.append(f"x0 lies on {len(on_boundary)} boundaries (surface self-intersects)")
    else:
        notes.append("sphere boundaries have curvature 1/R > 0")

    chart = chart_at(grid, theta0, x)
    if not np.any(x):
        cond2, rats = "degenerate", ()
        notes.append("x0 = 0 makes H(t) . x0 vanish identically")
    else:
        cond2, rats = gradient_verdict(chart.grad_q, q_max, tol)

    cond4 = {}
    for idx, ball in enumerate(phantom.balls):
        if idx in on_boundary:
            continue
        if float(np.linalg.norm(x - np.asarray(ball.center))) <= ball.radius:
            continue
        verdicts = []
        for curve in tangency_curves(ball, grid, x, n_samples, idx):
            verdicts.append(condition4_check(curve, M_max, q_max, tol))
        failing = [v for v in verdicts if not v.passed]
        cond4[idx] = failing[0].verdict if failing else f"pass (|M| <= {M_max})"
    return GenericityReport(
        cond1_positive_curvature=cond1,
        cond2_irrational_gradient=cond2,
        cond3_remote_curvature=True,
        cond4_curve_check=cond4,
        notes=notes,
        grad_q=chart.grad_q,
        cond2_rationals=rats,
    )


# -- remote singularities -----------------------------------------------------

def remote_convergence_check(phantom_remote: Phantom | None, grids: Sequence[SphereGrid], kernel: Kernel,
                             x0, theta0, h_values, threads: int = 1) -> list[tuple[float, float]]:
    """``(eps, max_h |f_eps(x0 + eps h theta0)|)`` for each grid.

    With only remote balls in the phantom the true value near ``x0`` is 0,
    so the maxima measure how much the remote singularities leak into the
    reconstruction. ``None`` stands for an empty phantom.
    """
    rows = []
    for grid in grids:
        if phantom_remote is None:
            rows.append((grid.eps, 0.0))
            continue
        pts = profile_points(grid, x0, theta0, h_values)
        vals = reconstruct_points(AnalyticProvider(phantom_remote, grid), kernel, grid, pts, threads)
        rows.append((grid.eps, float(np.max(np.abs(vals)))))
    return rows


def two_ball_probe() -> tuple[np.ndarray, np.ndarray]:
    """``(x0, theta0)`` on the first ball of the two-ball phantom."""
    theta0 = -direction(0.7 * math.pi, 0.2 * math.pi)
    x0 = np.array([0.0, 0.0, -5.0]) - 4.0 * theta0
    return x0, theta0
