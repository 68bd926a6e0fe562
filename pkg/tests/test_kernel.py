import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from radonedge.errors import InputError
from radonedge.kernel import (PiecewisePolynomial, bspline, build_kernel, eval_kernel, kernel_from_piecewise, psi,
                              psi_t_integral, psi_tail, tail_integral, tail_integral_exact, verify_assumptions)

K = build_kernel()


def bspline_oracle(n, t):
    """Truncated-power form of the cardinal B-spline on knots 0..n+1."""
    t = np.asarray(t, dtype=float)
    total = np.zeros_like(t)
    for k in range(n + 2):
        total += (-1) ** k * math.comb(n + 1, k) * np.where(t > k, t - k, 0.0) ** n
    return total / math.factorial(n)


def kernel_oracle(t):
    t = np.asarray(t, dtype=float) + 3.0
    return (0.5 * (bspline_oracle(3, t) + bspline_oracle(3, t - 2)) + 4 * bspline_oracle(3, t - 1)
            - 2 * (bspline_oracle(4, t) + bspline_oracle(4, t - 1)))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_bspline_matches_truncated_power_form(n):
    t = np.linspace(-1, n + 2, 997)
    assert np.max(np.abs(bspline(n)(t) - bspline_oracle(n, t))) < 1e-13


def test_bspline_exact_integral_and_support():
    for n in range(5):
        b = bspline(n)
        assert b.integrate() == 1
        assert b.support == (0, n + 1)


def test_bspline_rejects_order():
    with pytest.raises(InputError):
        bspline(5)


def test_kernel_matches_oracle():
    t = np.linspace(-4, 4, 1601)
    assert np.max(np.abs(K(t) - kernel_oracle(t))) < 1e-13


def test_kernel_assumptions_all_pass():
    rep = verify_assumptions(K)
    assert rep.all_pass, rep.lines()
    assert set(rep.results) == {"A1_exactness", "A2_support", "A3_continuity", "A4_third_derivative_bounded",
                                "A5_normalization", "symmetry", "interpolation"}


def test_plain_cubic_bspline_fails_exactness_and_interpolation():
    rep = verify_assumptions(kernel_from_piecewise(bspline(3), 2))
    assert not rep.results["A1_exactness"]
    assert not rep.results["interpolation"]
    assert not rep.results["A2_support"]
    assert rep.results["A5_normalization"]


def test_frozen_values():
    # exact rationals evaluated once from the piecewise coefficients
    assert K.phi.value_exact(Fraction(1, 2)) == Fraction(55, 96)
    assert float(K(0.5)) == pytest.approx(0.5729166666666667, abs=1e-15)
    assert psi(K, 0.25, 0.5) == pytest.approx(0.84375, abs=1e-14)
    assert tail_integral_exact(K, 0) == Fraction(1, 2)
    assert tail_integral_exact(K, -3) == 1
    assert tail_integral_exact(K, 3) == 0


def test_piece_order_bounds():
    with pytest.raises(InputError):
        K.piece(4)
    assert K.piece(3).degree == 1


def test_eval_kernel_derivative_matches_finite_difference():
    t = np.linspace(-3.2, 3.2, 41) + 1e-3
    h = 1e-5
    fd = (eval_kernel(K, t + h, 1) - eval_kernel(K, t - h, 1)) / (2 * h)
    assert np.max(np.abs(fd - eval_kernel(K, t, 2))) < 1e-6


@settings(max_examples=200, deadline=None)
@given(st.floats(-20, 20), st.integers(0, 2))
def test_polynomial_reproduction(t, m):
    js = np.arange(math.floor(t) - 4, math.floor(t) + 5)
    assert float(np.sum(K(t - js) * js.astype(float) ** m)) == pytest.approx(t**m, abs=1e-9 * max(1, abs(t) ** m))


@settings(max_examples=100, deadline=None)
@given(st.floats(-5, 5))
def test_symmetry_and_partition_of_unity(t):
    assert float(K(t)) == pytest.approx(float(K(-t)), abs=1e-14)
    js = np.arange(math.floor(t) - 4, math.floor(t) + 5)
    assert float(np.sum(K(t - js))) == pytest.approx(1.0, abs=1e-13)


@settings(max_examples=60, deadline=None)
@given(st.floats(-4, 4))
def test_psi_integral_is_phi(s):
    assert psi_t_integral(K, s) == pytest.approx(float(K(s)), abs=1e-8)


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 1), st.one_of(st.floats(3, 10), st.floats(-10, -3)))
def test_psi_vanishes_outside(q, s):
    assert psi(K, q, s) == pytest.approx(0.0, abs=1e-12)


def test_psi_tail_limits():
    assert psi_tail(K, 4.0) == pytest.approx(0.0, abs=1e-8)
    assert psi_tail(K, -4.0) == pytest.approx(-1.0, abs=1e-8)


def test_tail_integral_monotone():
    h = np.linspace(-4, 4, 81)
    vals = np.array([tail_integral(K, v) for v in h])
    assert vals[0] == 1.0 and vals[-1] == 0.0
    # the kernel has negative lobes, so only the ends are pinned
    assert tail_integral(K, 0.0) == pytest.approx(0.5, abs=1e-15)


def test_piecewise_arithmetic_exact():
    a = PiecewisePolynomial([0, 1, 2], [[1, 2], [3]])
    b = a.shift(1)
    assert b.support == (1, 3)
    assert (a + a) == a * 2
    assert (a - a).integrate() == 0
    assert a.reflect().reflect() == a
    rows = a.to_rows()
    assert rows[0] == (0, 1, 2) and rows[1] == (1, 3, 0)
