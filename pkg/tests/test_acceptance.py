"""Acceptance criteria at full tolerance.

Each test records a one-line verdict that is printed in the terminal summary
(see ``conftest.py``). The full-resolution runs take a few minutes in total.
"""

import math
import time
from functools import lru_cache

import numpy as np
import pytest

from conftest import ACCEPTANCE
from radonedge.edge_theory import edge_profile, genericity_report, two_ball_probe, remote_convergence_check
from radonedge.kernel import build_kernel, psi_t_integral, psi_tail, verify_assumptions
from radonedge.phantom import (Ball, Phantom, ball_radon, boundary_point, jump_params, two_ball_phantom,
                               radon_quadrature_oracle)
from radonedge.reconstruct import AnalyticProvider, reconstruct_point
from radonedge.sphere_grid import SphereGrid
from radonedge.ud_diag import (discrepancy_2d, frac_points, kronecker_sequence, shear_map, star_discrepancy_1d,
                               weyl_sum)
from radonedge.expr import compile_function

K = build_kernel()
H = np.arange(-20, 21) * 0.25
FIG_GRID = SphereGrid(500, 500, 0.04, 0.0, -10.0, 10.0)
REMOTE_GRIDS = [SphereGrid(250, 250, 0.08, 0.0, -10.0, 10.0), FIG_GRID, SphereGrid(1000, 1000, 0.02, 0.0, -10.0, 10.0)]
FIG2_CENTERS = [(0.0, 0.0, 0.0), (0.0, 0.0, 1.0)]
THETA_FIG2 = np.array([-1.0, 0.0, 0.0])


def record(key, ok, detail):
    ACCEPTANCE[key] = (bool(ok), detail)
    print(f"{'PASS' if ok else 'FAIL'}  criterion {key}: {detail}")


@lru_cache(maxsize=None)
def fig1_run(threads):
    ph = two_ball_phantom()
    x0, theta0 = two_ball_probe()
    t = time.perf_counter()
    prof = edge_profile(AnalyticProvider(ph, FIG_GRID), K, FIG_GRID, x0, theta0, H, jump_params(ph, x0, theta0),
                        threads)
    return prof, time.perf_counter() - t


@lru_cache(maxsize=None)
def fig2_run(center, threads):
    ph = Phantom((Ball(center, 1.0, 1.0),))
    x0 = boundary_point(ph.balls[0], THETA_FIG2)
    prof = edge_profile(AnalyticProvider(ph, FIG_GRID), K, FIG_GRID, x0, THETA_FIG2, H,
                        jump_params(ph, x0, THETA_FIG2), threads)
    return prof, genericity_report(ph, FIG_GRID, x0, THETA_FIG2)


@lru_cache(maxsize=None)
def remote_run(threads):
    x0, theta0 = two_ball_probe()
    remote = two_ball_phantom().without(0)
    return remote_convergence_check(remote, REMOTE_GRIDS, K, x0, theta0, H, threads)


def test_criterion_1_kernel_axioms():
    t = time.perf_counter()
    rep = verify_assumptions(build_kernel(), n_random=1000, tol=1e-10)
    elapsed = time.perf_counter() - t
    ok = rep.all_pass and elapsed < 1.0
    record("1", ok, f"all axioms {'pass' if rep.all_pass else 'FAIL'}; {elapsed:.2f} s (< 1 s)")
    assert rep.all_pass, rep.lines()
    assert elapsed < 1.0


def test_criterion_2_psi_identity_and_tails():
    s = np.linspace(-4, 4, 100)
    err = max(abs(psi_t_integral(K, v) - float(K(v))) for v in s)
    hi, lo = psi_tail(K, 4.0), psi_tail(K, -4.0)
    ok = err <= 1e-8 and abs(hi) <= 1e-8 and abs(lo + 1) <= 1e-8
    record("2", ok, f"max |int psi - phi| = {err:.2e}; tails {hi:.2e}, {lo:.12f}")
    assert err <= 1e-8
    assert abs(hi) <= 1e-8 and abs(lo + 1.0) <= 1e-8


def test_criterion_3_oracle_equivalence():
    rng = np.random.default_rng(2024)
    t = time.perf_counter()
    worst = 0.0
    for _ in range(10_000):
        R = rng.uniform(0.5, 5.0)
        ball = Ball(rng.uniform(-5, 5, 3), R, rng.uniform(0.1, 3.0))
        a = rng.normal(size=3)
        a /= np.linalg.norm(a)
        p = float(a @ np.asarray(ball.center)) + rng.uniform(-0.95, 0.95) * R
        exact = ball_radon(ball, a, p)
        approx = radon_quadrature_oracle(Phantom((ball,)), a, p, R / 2000)
        worst = max(worst, abs(exact - approx) / exact)
    elapsed = time.perf_counter() - t
    ok = worst <= 1e-4 and elapsed < 60
    record("3", ok, f"worst relative error {worst:.2e} over 1e4 cases; {elapsed:.1f} s")
    assert worst <= 1e-4
    assert elapsed < 60


def test_criterion_4_fig1_replication():
    prof, elapsed = fig1_run(1)
    _, elapsed8 = fig1_run(8)
    ok = prof.max_abs_dev <= 0.05 and elapsed < 300 and elapsed8 < 60
    record("4", ok, f"max_abs_dev = {prof.max_abs_dev:.5f} (<= 0.05); {elapsed:.1f} s at 1 worker, "
                    f"{elapsed8:.1f} s at 8")
    assert prof.max_abs_dev <= 0.05
    assert elapsed < 300 and elapsed8 < 60


@pytest.mark.parametrize("center", FIG2_CENTERS, ids=lambda c: "center=(%g,%g,%g)" % c)
def test_criterion_5_fig2_replication(center):
    """Expected to fail for center (0, 0, 1).

    There ``x0 = (1, 0, 1)`` and the latitude component of the chart gradient
    is ``-dgamma / eps = -pi / 20``, which is irrational, so the scan
    correctly reports ``generic`` and the reconstruction matches the
    prediction (deviation below the two-ball run). The criterion is kept at
    full strength.
    """
    prof, rep = fig2_run(center, 1)
    base = fig1_run(1)[0].max_abs_dev
    flagged = rep.cond2_flagged
    ratio = prof.max_abs_dev / base
    ok = flagged and ratio >= 2.0
    record(f"5[{center}]", ok, f"cond2 = {rep.cond2_irrational_gradient} (grad_q = {rep.grad_q[0]:.3g}, "
                               f"{rep.grad_q[1]:.17g}); max_abs_dev = {prof.max_abs_dev:.5f} = {ratio:.2f} x the two-ball run")
    assert flagged, rep.lines()
    assert ratio >= 2.0


def test_criterion_6_remote_ball_only():
    rows = remote_run(1)
    maxima = [m for _, m in rows]
    decreasing = all(b < a for a, b in zip(maxima, maxima[1:]))
    ok = decreasing and maxima[-1] <= 0.05
    record("6", ok, "max |f_eps| at eps = 0.08, 0.04, 0.02: " + ", ".join(f"{m:.5f}" for m in maxima))
    assert decreasing
    assert maxima[-1] <= 0.05


def test_criterion_7_smooth_point():
    ph = Phantom((Ball((0.0, 0.0, 0.0), 1.0, 1.0),))
    errs = []
    for grid in (FIG_GRID, REMOTE_GRIDS[2]):
        errs.append(abs(reconstruct_point(AnalyticProvider(ph, grid), K, grid, (0.0, 0.0, 0.0)) - 1.0))
    ok = errs[0] <= 0.01 and errs[1] < errs[0]
    record("7", ok, f"|f_eps(0) - 1| = {errs[0]:.3e} at eps = 0.04, {errs[1]:.3e} at 0.02")
    assert errs[0] <= 0.01
    assert errs[1] < errs[0]


def test_criterion_8_ud_suite():
    golden = (1 + math.sqrt(5)) / 2
    d_star = star_discrepancy_1d(kronecker_sequence([golden], 1000)[:, 0])
    resonance = weyl_sum(frac_points(compile_function("t/2"), 0, 100, 1.0), 2)
    f = compile_function("t**2")
    quad = [weyl_sum(frac_points(f, 0.1, 0.45, e), 1) for e in (1e-2, 1e-3, 1e-4)]
    pts = kronecker_sequence([golden, math.sqrt(2)], 10_000)
    before, err = discrepancy_2d(pts, 100)
    after, _ = discrepancy_2d(shear_map(pts, 1.0), 100)
    checks = {
        "D*_1000 < 0.01": d_star < 0.01,
        "resonance == 1": resonance == 1.0,
        "quadratic decreasing": quad[0] > quad[1] > quad[2],
        "shear keeps verdict": (before < 0.02) == (after < 0.02) and abs(after - before) < 2 * err,
    }
    ok = all(checks.values())
    record("8", ok, f"D*={d_star:.5f}; resonance={resonance!r}; quadratic {quad[0]:.4f} > {quad[1]:.4f} > "
                    f"{quad[2]:.5f}; 2-D {before:.4f} -> {after:.4f} (bound {err})")
    assert ok, checks


def test_criterion_9_determinism():
    ref = (fig1_run(1)[0].reconstructed.tobytes(),
           *(fig2_run(c, 1)[0].reconstructed.tobytes() for c in FIG2_CENTERS),
           np.array(remote_run(1)).tobytes())
    same = {}
    for threads in (4, 8):
        got = (fig1_run(threads)[0].reconstructed.tobytes(),
               *(fig2_run(c, threads)[0].reconstructed.tobytes() for c in FIG2_CENTERS),
               np.array(remote_run(threads)).tobytes())
        same[threads] = got == ref
    ok = all(same.values())
    record("9", ok, "criteria 4-6 outputs byte-identical at 1, 4, 8 workers" if ok else f"mismatch: {same}")
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
