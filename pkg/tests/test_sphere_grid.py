import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from radonedge.errors import ChartError, InputError
from radonedge.sphere_grid import SphereGrid, build_grid, chart_at, direction, weight


def test_basic_layout():
    g = build_grid(8, 4, 0.5, 0.0, (-2, 2))
    assert g.n_directions == 8 * 3
    assert g.directions.shape == (24, 3)
    assert np.allclose(np.linalg.norm(g.directions, axis=1), 1.0)
    k = g.flat_index(3, 2)
    assert k == 1 * 8 + 3
    assert np.allclose(g.directions[k], direction(2 * math.pi * 3 / 8, math.pi * 2 / 4))
    assert weight(g, 0, 2) == pytest.approx(math.sin(math.pi / 2) * (2 * math.pi / 8) * (math.pi / 4))


def test_arrays_are_read_only():
    g = build_grid(8, 4, 0.5)
    with pytest.raises(ValueError):
        g.directions[0, 0] = 1.0
    with pytest.raises(ValueError):
        g.weights[0] = 1.0


def test_smallest_grid():
    g = build_grid(2, 2, 1.0, 0.0, (-1, 1))
    assert g.n_directions == 2
    assert np.allclose(g.directions, [[1, 0, 0], [-1, 0, 0]], atol=1e-15)


@pytest.mark.parametrize("kw", [dict(n_theta=1), dict(n_gamma=1), dict(eps=0.0), dict(eps=-1.0),
                                dict(rho=1.0), dict(rho=-0.1), dict(p_min=3.0), dict(n_theta=4.5)])
def test_validation(kw):
    args = dict(n_theta=8, n_gamma=8, eps=0.5, rho=0.0, p_min=-2.0, p_max=2.0)
    args.update(kw)
    with pytest.raises(InputError):
        SphereGrid(**args)


def test_affine_samples():
    g = SphereGrid(4, 4, 0.25, 0.5, -1.0, 1.0)
    assert g.p_samples[0] >= -1.0 - 1e-12 and g.p_samples[-1] <= 1.0 + 1e-12
    assert np.allclose(np.diff(g.p_samples), 0.25)
    assert g.p_value(g.j_min) == pytest.approx(-0.875)
    # endpoints on the lattice are included despite rounding
    g2 = SphereGrid(4, 4, 0.1, 0.0, -0.3, 0.3)
    assert g2.n_p == 7


def test_weights_sum_to_sphere_area():
    for n in (50, 200, 800):
        g = build_grid(n, n, 1.0)
        assert g.weights.sum() == pytest.approx(4 * math.pi, rel=2.0 / n**2 * 10)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 60), st.integers(2, 60), st.data())
def test_index_roundtrip_and_antipode(nt, ng, data):
    g = build_grid(2 * nt, ng, 0.1)
    i1 = data.draw(st.integers(0, g.n_theta - 1))
    i2 = data.draw(st.integers(1, g.n_gamma - 1))
    k = g.flat_index(i1, i2)
    assert g.grid_index(k) == (i1, i2)
    j1, j2 = g.antipode_index(i1, i2)
    assert np.allclose(g.directions[g.flat_index(j1, j2)], -g.directions[k], atol=1e-12)
    assert weight(g, j1, j2) == pytest.approx(weight(g, i1, i2))


def test_antipode_needs_even_longitudes():
    with pytest.raises(InputError):
        build_grid(5, 4, 0.1).antipode_index(0, 1)


def test_chart_against_finite_differences():
    g = build_grid(500, 500, 0.04)
    theta0 = -direction(0.7 * math.pi, 0.2 * math.pi)
    x0 = np.array([0.3, -1.2, 2.0])
    ch = chart_at(g, theta0, x0)
    s1, s2 = g.chart_scale

    def q(t1, t2):
        return float(direction(t1 * s1, t2 * s2) @ x0)

    t1, t2 = ch.t_star
    assert np.allclose(direction(t1 * s1, t2 * s2), theta0)
    h = 1e-4
    fd = [(q(t1 + h, t2) - q(t1 - h, t2)) / (2 * h), (q(t1, t2 + h) - q(t1, t2 - h)) / (2 * h)]
    assert np.allclose(ch.grad_q, fd, rtol=1e-6, atol=1e-9)
    fxx = (q(t1 + h, t2) - 2 * q(t1, t2) + q(t1 - h, t2)) / h**2
    fxy = (q(t1 + h, t2 + h) - q(t1 + h, t2 - h) - q(t1 - h, t2 + h) + q(t1 - h, t2 - h)) / (4 * h * h)
    assert ch.hess_q[0, 0] == pytest.approx(fxx, rel=1e-4)
    assert ch.hess_q[0, 1] == pytest.approx(fxy, rel=1e-4, abs=1e-6)
    assert ch.jacobian == pytest.approx(s1 * s2 * math.sin(0.8 * math.pi))


def test_chart_pole_and_input_errors():
    g = build_grid(10, 10, 0.1)
    with pytest.raises(ChartError):
        chart_at(g, (0, 0, 1), (1, 0, 0))
    with pytest.raises(InputError):
        chart_at(g, (0, 0, 2), (1, 0, 0))


def test_chart_gradient_on_offset_unit_ball():
    # x0 = (1, 0, 1), theta0 = (-1, 0, 0): the latitude component is -dgamma/eps = -pi/20
    g = build_grid(500, 500, 0.04)
    ch = chart_at(g, (-1, 0, 0), (1, 0, 1))
    assert ch.grad_q[0] == pytest.approx(0.0, abs=1e-15)
    assert ch.grad_q[1] == pytest.approx(-math.pi / 20, rel=1e-14)
