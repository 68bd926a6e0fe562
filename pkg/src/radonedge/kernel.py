"""Piecewise-polynomial interpolation kernel with exact rational coefficients.

The kernel is the symmetric C^2 interpolating kernel of class
{N=4, W=6, R=2, L=3}, assembled from cardinal B-splines::

    phi_raw(t) = 1/2 (B3(t) + B3(t-2)) + 4 B3(t-1) - 2 (B4(t) + B4(t-1))

and centered, ``phi(t) = phi_raw(t + 3)``, so that ``phi(n) = delta_{n,0}``.
Coefficients are :class:`fractions.Fraction`; floats appear only when the
kernel is evaluated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import InputError

__all__ = [
    "PiecewisePolynomial",
    "Kernel",
    "AssumptionReport",
    "bspline",
    "build_kernel",
    "kernel_from_piecewise",
    "eval_kernel",
    "tail_integral",
    "psi",
    "psi_t_integral",
    "psi_tail",
    "verify_assumptions",
]

_GAUSS_NODES, _GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(8)


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _trim(coeffs: list[Fraction]) -> list[Fraction]:
    out = list(coeffs)
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def _taylor_shift(coeffs: Sequence[Fraction], delta: Fraction) -> list[Fraction]:
    """Coefficients of p(u + delta) given those of p(u)."""
    n = len(coeffs)
    out = [Fraction(0)] * n
    for i, c in enumerate(coeffs):
        if c == 0:
            continue
        for k in range(i + 1):
            out[k] += c * math.comb(i, k) * delta ** (i - k)
    return out


def _poly_add(a: Sequence[Fraction], b: Sequence[Fraction]) -> list[Fraction]:
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]


def _poly_mul(a: Sequence[Fraction], b: Sequence[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _poly_eval(coeffs: Sequence[Fraction], u: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * u + c
    return acc


class PiecewisePolynomial:
    """Polynomial pieces on ``[b_k, b_{k+1})``, zero outside ``[b_0, b_last]``.

    Each piece is stored in the local variable ``u = t - b_k`` as exact
    rational coefficients ``c_0 .. c_deg``.
    """

    def __init__(self, breakpoints, coefficients):
        bps = [_frac(b) for b in breakpoints]
        if len(bps) < 2 or any(b1 >= b2 for b1, b2 in zip(bps, bps[1:])):
            raise InputError("breakpoints must be strictly increasing, at least two")
        if len(coefficients) != len(bps) - 1:
            raise InputError("need one coefficient list per interval")
        self.breakpoints: tuple[Fraction, ...] = tuple(bps)
        self.coefficients: tuple[tuple[Fraction, ...], ...] = tuple(
            tuple(_trim([_frac(c) for c in cs])) for cs in coefficients
        )
        self._table = None

    # -- construction helpers -------------------------------------------------
    @classmethod
    def constant(cls, left, right, value=1) -> PiecewisePolynomial:
        return cls([left, right], [[value]])

    @property
    def degree(self) -> int:
        return max(len(cs) for cs in self.coefficients) - 1

    @property
    def support(self) -> tuple[Fraction, Fraction]:
        return self.breakpoints[0], self.breakpoints[-1]

    def refine(self, breakpoints) -> PiecewisePolynomial:
        """Re-express on a finer breakpoint set (must contain the current support)."""
        bps = sorted(set(_frac(b) for b in breakpoints) | set(self.breakpoints))
        coeffs = []
        for left in bps[:-1]:
            k = self._interval_index(left)
            if k is None:
                coeffs.append([Fraction(0)])
            else:
                coeffs.append(_taylor_shift(self.coefficients[k], left - self.breakpoints[k]))
        return PiecewisePolynomial(bps, coeffs)

    def _interval_index(self, t: Fraction):
        bps = self.breakpoints
        if t < bps[0] or t >= bps[-1]:
            return None
        lo, hi = 0, len(bps) - 1
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if bps[mid] <= t:
                lo = mid
            else:
                hi = mid
        return lo

    # -- algebra --------------------------------------------------------------
    def __add__(self, other: PiecewisePolynomial) -> PiecewisePolynomial:
        bps = sorted(set(self.breakpoints) | set(other.breakpoints))
        a, b = self.refine(bps), other.refine(bps)
        return PiecewisePolynomial(bps, [_poly_add(x, y) for x, y in zip(a.coefficients, b.coefficients)])

    def __sub__(self, other: PiecewisePolynomial) -> PiecewisePolynomial:
        return self + other.scale(-1)

    def scale(self, factor) -> PiecewisePolynomial:
        f = _frac(factor)
        return PiecewisePolynomial(self.breakpoints, [[c * f for c in cs] for cs in self.coefficients])

    def __mul__(self, factor) -> PiecewisePolynomial:
        return self.scale(factor)

    __rmul__ = __mul__

    def shift(self, a) -> PiecewisePolynomial:
        """Return ``t -> p(t - a)``."""
        a = _frac(a)
        return PiecewisePolynomial([b + a for b in self.breakpoints], self.coefficients)

    def mul_linear(self, c0, c1) -> PiecewisePolynomial:
        """Return ``t -> (c0 + c1 t) p(t)``."""
        c0, c1 = _frac(c0), _frac(c1)
        coeffs = []
        for left, cs in zip(self.breakpoints, self.coefficients):
            # in local u: c0 + c1 (u + left)
            coeffs.append(_poly_mul(cs, [c0 + c1 * left, c1]))
        return PiecewisePolynomial(self.breakpoints, coeffs)

    def reflect(self) -> PiecewisePolynomial:
        """Return ``t -> p(-t)``."""
        bps = [-b for b in reversed(self.breakpoints)]
        coeffs = []
        for k in reversed(range(len(self.coefficients))):
            width = self.breakpoints[k + 1] - self.breakpoints[k]
            # q(v) = p_k(width - v) on the reflected interval
            shifted = _taylor_shift(self.coefficients[k], width)
            coeffs.append([c * (-1) ** i for i, c in enumerate(shifted)])
        return PiecewisePolynomial(bps, coeffs)

    def derivative(self) -> PiecewisePolynomial:
        coeffs = [[c * i for i, c in enumerate(cs)][1:] or [Fraction(0)] for cs in self.coefficients]
        return PiecewisePolynomial(self.breakpoints, coeffs)

    def integrate(self, a=None, b=None) -> Fraction:
        """Exact integral over ``[a, b]`` (defaults: whole support)."""
        lo, hi = self.support
        a = lo if a is None else max(_frac(a), lo)
        b = hi if b is None else min(_frac(b), hi)
        if a >= b:
            return Fraction(0)
        total = Fraction(0)
        for k, cs in enumerate(self.coefficients):
            left, right = self.breakpoints[k], self.breakpoints[k + 1]
            x0, x1 = max(a, left), min(b, right)
            if x0 >= x1:
                continue
            anti = [Fraction(0)] + [c / (i + 1) for i, c in enumerate(cs)]
            total += _poly_eval(anti, x1 - left) - _poly_eval(anti, x0 - left)
        return total

    # -- evaluation -----------------------------------------------------------
    def value_exact(self, t) -> Fraction:
        t = _frac(t)
        k = self._interval_index(t)
        if k is None:
            return Fraction(0)
        return _poly_eval(self.coefficients[k], t - self.breakpoints[k])

    def one_sided(self, t, side: str) -> Fraction:
        """Exact one-sided limit at ``t`` (``side`` is ``'left'`` or ``'right'``)."""
        t = _frac(t)
        bps = self.breakpoints
        if side == "right":
            return self.value_exact(t)
        if t <= bps[0] or t > bps[-1]:
            return Fraction(0)
        k = max(i for i in range(len(bps) - 1) if bps[i] < t)
        return _poly_eval(self.coefficients[k], t - bps[k])

    def _float_table(self):
        if self._table is None:
            deg = self.degree
            tab = np.zeros((len(self.coefficients), deg + 1))
            for k, cs in enumerate(self.coefficients):
                tab[k, : len(cs)] = [float(c) for c in cs]
            self._table = (np.array([float(b) for b in self.breakpoints]), tab)
        return self._table

    def __call__(self, t):
        """Vectorized float evaluation."""
        bps, tab = self._float_table()
        t = np.asarray(t, dtype=float)
        k = np.searchsorted(bps, t, side="right") - 1
        inside = (k >= 0) & (k < len(tab))
        kc = np.clip(k, 0, len(tab) - 1)
        u = t - bps[kc]
        acc = np.zeros_like(t)
        for col in range(tab.shape[1] - 1, -1, -1):
            acc = acc * u + tab[kc, col]
        out = np.where(inside, acc, 0.0)
        return out if out.ndim else float(out)

    def to_rows(self):
        """Rows ``(left breakpoint, c0, .., c_deg)`` with zero-padded coefficients."""
        deg = self.degree
        rows = []
        for left, cs in zip(self.breakpoints, self.coefficients):
            rows.append((left, *cs, *([Fraction(0)] * (deg + 1 - len(cs)))))
        return rows

    def __eq__(self, other):
        if not isinstance(other, PiecewisePolynomial):
            return NotImplemented
        bps = sorted(set(self.breakpoints) | set(other.breakpoints))
        return self.refine(bps).coefficients == other.refine(bps).coefficients

    def __repr__(self):
        return f"PiecewisePolynomial(support={self.support}, pieces={len(self.coefficients)}, degree={self.degree})"


def bspline(n: int) -> PiecewisePolynomial:
    """Cardinal B-spline of degree ``n`` on ``[0, n+1]``, exact rationals.

    Uses the degree-raising recursion
    ``B_n(t) = (t B_{n-1}(t) + (n+1-t) B_{n-1}(t-1)) / n``.
    """
    if not isinstance(n, (int, np.integer)) or not 0 <= n <= 4:
        raise InputError(f"B-spline degree must be an integer in 0..4, got {n!r}")
    b = PiecewisePolynomial.constant(0, 1)
    for k in range(1, int(n) + 1):
        b = (b.mul_linear(0, 1) + b.shift(1).mul_linear(k + 1, -1)).scale(Fraction(1, k))
    return b.refine(range(0, int(n) + 2))


@dataclass(frozen=True)
class Kernel:
    """Centered kernel with its first three derivatives."""

    phi: PiecewisePolynomial
    derivatives: tuple[PiecewisePolynomial, ...] = field(repr=False)

    @property
    def support(self) -> tuple[Fraction, Fraction]:
        return self.phi.support

    @property
    def half_width(self) -> int:
        lo, hi = self.support
        return math.ceil(max(-lo, hi))

    def piece(self, m: int) -> PiecewisePolynomial:
        if m not in (0, 1, 2, 3):
            raise InputError(f"derivative order must be 0..3, got {m!r}")
        return self.phi if m == 0 else self.derivatives[m - 1]

    def __call__(self, t, m: int = 0):
        return self.piece(m)(t)


def kernel_from_piecewise(pp: PiecewisePolynomial, center=0) -> Kernel:
    """Wrap ``t -> pp(t + center)`` as a :class:`Kernel`."""
    phi = pp.shift(-_frac(center))
    d1 = phi.derivative()
    d2 = d1.derivative()
    return Kernel(phi, (d1, d2, d2.derivative()))


def build_kernel() -> Kernel:
    """The {4, 6, 2, 3} interpolating kernel, centered on ``[-3, 3]``."""
    b3, b4 = bspline(3), bspline(4)
    raw = (
        (b3 + b3.shift(2)).scale(Fraction(1, 2))
        + b3.shift(1).scale(4)
        - (b4 + b4.shift(1)).scale(2)
    )
    return kernel_from_piecewise(raw, center=3)


def eval_kernel(kernel: Kernel, t, m: int = 0):
    """Evaluate the ``m``-th derivative of the kernel at ``t`` (vectorized)."""
    return kernel.piece(m)(t)


def tail_integral(kernel: Kernel, h) -> float:
    """``int_h^inf phi(s) ds``, exact piecewise integration, returned as float."""
    return float(tail_integral_exact(kernel, h))


def tail_integral_exact(kernel: Kernel, h) -> Fraction:
    return kernel.phi.integrate(a=h)


def psi(kernel: Kernel, q, s):
    """``sum_j (j - q + s)_+ phi''(q - j)``, vectorized over ``q`` and ``s``.

    Only the indices with ``|q - j| < half_width`` contribute.
    """
    q = np.asarray(q, dtype=float)
    s = np.asarray(s, dtype=float)
    q, s = np.broadcast_arrays(q, s)
    d2 = kernel.piece(2)
    w = kernel.half_width
    base = np.floor(q)
    acc = np.zeros(q.shape)
    for k in range(-w, w + 1):
        j = base + k
        acc = acc + np.maximum(j - q + s, 0.0) * d2(q - j)
    return acc if acc.ndim else float(acc)


def _gauss_panels(fn, cuts):
    cuts = np.unique(np.asarray(cuts, dtype=float))
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        total += half * float(np.dot(_GAUSS_WEIGHTS, fn(mid + half * _GAUSS_NODES)))
    return total


def psi_t_integral(kernel: Kernel, s: float) -> float:
    """``int_0^1 psi(t, s) dt`` by composite Gauss-Legendre.

    The integrand is piecewise polynomial in ``t`` with a kink where
    ``t - s`` is an integer, so the panel is split there.
    """
    frac_s = s - math.floor(s)
    cuts = [0.0, 1.0] + ([frac_s] if 0.0 < frac_s < 1.0 else [])
    return _gauss_panels(lambda t: psi(kernel, t, s), cuts)


def psi_tail(kernel: Kernel, h: float) -> float:
    """``-int_h^inf int_0^1 psi(t, s) dt ds``.

    Integrated as ``-int_0^1 int_h^c psi(t, s) ds dt`` with ``c`` beyond the
    support of ``psi`` in ``s``; the inner integrand has kinks where ``s - t``
    is an integer.
    """
    w = kernel.half_width + 1
    upper = float(w)
    if h >= upper:
        return 0.0
    lower = max(h, -float(w))

    def inner(t_values):
        out = np.empty(len(t_values))
        for idx, t in enumerate(t_values):
            kinks = t + np.arange(math.floor(lower - t), math.ceil(upper - t) + 1)
            cuts = [lower, upper] + [k for k in kinks if lower < k < upper]
            out[idx] = _gauss_panels(lambda s: psi(kernel, t, s), cuts)
        return out

    frac_h = lower - math.floor(lower)
    cuts = [0.0, 1.0] + ([frac_h] if 0.0 < frac_h < 1.0 else [])
    # psi(., s) vanishes for |s| >= half_width, so [lower, upper] holds all mass
    return -_gauss_panels(inner, cuts)


@dataclass
class AssumptionReport:
    """Pass/fail per kernel axiom, with the measured evidence."""

    results: dict[str, bool]
    details: dict[str, str]

    @property
    def all_pass(self) -> bool:
        return all(self.results.values())

    def lines(self) -> list[str]:
        return [
            f"{name}: {'PASS' if ok else 'FAIL'} ({self.details.get(name, '')})"
            for name, ok in self.results.items()
        ]


def verify_assumptions(kernel: Kernel, n_random: int = 1000, seed: int = 0,
                       tol: float = 1e-10) -> AssumptionReport:
    """Check exactness, support, smoothness, normalization, symmetry, interpolation."""
    results: dict[str, bool] = {}
    details: dict[str, str] = {}
    phi = kernel.phi
    lo, hi = phi.support

    rng = np.random.default_rng(seed)
    t = rng.uniform(-10.0, 10.0, n_random)
    js = np.arange(math.floor(-10 + float(lo)) - 1, math.ceil(10 + float(hi)) + 2)
    vals = phi(t[:, None] - js[None, :])
    worst = []
    for m in range(3):
        err = np.max(np.abs((vals * js[None, :] ** m).sum(axis=1) - t**m))
        worst.append(err)
    results["A1_exactness"] = all(e < tol for e in worst)
    details["A1_exactness"] = "max err m=0,1,2: " + ", ".join(f"{e:.2e}" for e in worst)

    results["A2_support"] = (lo, hi) == (-3, 3)
    details["A2_support"] = f"support [{lo}, {hi}]"

    bad = []
    for m in range(3):
        piece = kernel.piece(m)
        for b in phi.breakpoints:
            if piece.one_sided(b, "left") != piece.one_sided(b, "right"):
                bad.append(f"phi^({m}) at {b}")
    results["A3_continuity"] = not bad
    details["A3_continuity"] = "continuous through order 2" if not bad else "jumps: " + "; ".join(bad)

    d3 = kernel.piece(3)
    bound = max(
        max(abs(d3.one_sided(b, "left")), abs(d3.one_sided(b, "right"))) for b in d3.breakpoints
    )
    results["A4_third_derivative_bounded"] = d3.degree <= 1 or bound < float("inf")
    details["A4_third_derivative_bounded"] = f"max |phi'''| at knots = {float(bound):.6g}"

    integral = phi.integrate()
    results["A5_normalization"] = integral == 1
    details["A5_normalization"] = f"integral = {integral}"

    results["symmetry"] = phi == phi.reflect()
    details["symmetry"] = "phi(t) == phi(-t) exactly" if results["symmetry"] else "asymmetric"

    n_lo, n_hi = math.floor(lo), math.ceil(hi)
    interp = {n: phi.value_exact(n) for n in range(n_lo, n_hi + 1)}
    results["interpolation"] = all(v == (1 if n == 0 else 0) for n, v in interp.items())
    details["interpolation"] = "phi(n) = " + ", ".join(f"{n}:{v}" for n, v in interp.items())
    return AssumptionReport(results, details)
