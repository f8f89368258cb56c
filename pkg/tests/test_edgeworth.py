import io
import math

import numpy as np
import pytest
from numpy.polynomial import hermite_e

from egue_strength.edgeworth import (EdgeworthParams, density_grid, edgeworth_density,
                                     gaussian_biv, hermite_biv, hermite_table)
from egue_strength.errors import CorrelationOutOfRange, InvalidGrid
from egue_strength.moments import CumulantSet

REF = dict(xi=0.83, k40=-0.18, k04=-0.17, k31=-0.15, k13=-0.14, k22=-0.03)


def _hermite_oracle(order, x, y, xi):
    """He_ab from the generating function g(x - s, y - t) / g(x, y).

    The exponent s u + t v - (s^2 - 2 xi s t + t^2) / (2c) is expanded as a
    truncated power series in (s, t); He_ab = a! b! [s^a t^b].
    """
    c = 1 - xi * xi
    u, v = (x - xi * y) / c, (y - xi * x) / c
    n = order + 1
    A = np.zeros((n, n))
    A[1, 0], A[0, 1] = u, v
    if n > 2:
        A[2, 0] = A[0, 2] = -1 / (2 * c)
        A[1, 1] = xi / c

    def mul(P, Q):
        R = np.zeros((n, n))
        for a in range(n):
            for b in range(n - a):
                if P[a, b]:
                    R[a:, b:] += P[a, b] * Q[:n - a, :n - b]
        for a in range(n):
            R[a, n - a:] = 0
        return R

    E = np.zeros((n, n))
    E[0, 0] = 1
    term = E.copy()
    for j in range(1, 2 * n):
        term = mul(term, A) / j
        E += term
    return {(a, b): E[a, b] * math.factorial(a) * math.factorial(b)
            for a in range(n) for b in range(n - a)}


def test_hermite_examples():
    assert hermite_biv(0, 0, 0.3, -1.2, 0.4) == 1
    assert hermite_biv(1, 0, 1.0, 0.0, 0.0) == 1
    for x in (-1.5, 0.2, 2.0):
        assert hermite_biv(2, 0, x, 0.7, 0.0) == pytest.approx(x * x - 1)


@pytest.mark.parametrize("x,y,xi", [(0.3, -1.1, 0.6), (1.7, 0.4, -0.35), (-2.2, -0.5, 0.83)])
def test_hermite_table_matches_generating_function(x, y, xi):
    got = hermite_table(6, x, y, xi)
    want = _hermite_oracle(6, x, y, xi)
    for key, val in want.items():
        assert got[key] == pytest.approx(val, rel=1e-9, abs=1e-9), key


def test_hermite_uncorrelated_factorizes():
    x = np.linspace(-3, 3, 13)
    y = np.linspace(-2, 2.5, 13)
    he = hermite_table(6, x, y, 0.0)
    for (a, b), val in he.items():
        ea = hermite_e.hermeval(x, [0] * a + [1])
        eb = hermite_e.hermeval(y, [0] * b + [1])
        assert np.allclose(val, ea * eb, atol=1e-10)


def test_gaussian_values():
    assert gaussian_biv(0, 0, 0.0) == pytest.approx(1 / (2 * math.pi), abs=1e-15)
    assert gaussian_biv(0, 0, 0.6) == pytest.approx(1 / (2 * math.pi * 0.8), abs=1e-15)
    with pytest.raises(CorrelationOutOfRange):
        gaussian_biv(0, 0, 1.0)
    with pytest.raises(CorrelationOutOfRange):
        EdgeworthParams(xi=float("nan"))


def test_zero_cumulants_give_the_gaussian():
    x, y = np.meshgrid(np.linspace(-4, 4, 41), np.linspace(-3, 5, 41))
    p = EdgeworthParams(xi=0.45)
    assert np.abs(edgeworth_density(p, x, y) - gaussian_biv(x, y, 0.45)).max() <= 1e-12


def _moment(grid, a, b):
    x, y = np.meshgrid(grid.x_points, grid.y_points, indexing="ij")
    return float((grid.values * x ** a * y ** b).sum() * grid.cell_area)


def test_density_reproduces_its_cumulants():
    # fourth moments of the corrected density are the Gaussian ones plus k_rs
    p = EdgeworthParams(**REF)
    g = density_grid(p, 9.0, 901)
    xi = p.xi
    assert _moment(g, 0, 0) == pytest.approx(1, abs=1e-6)
    assert _moment(g, 1, 1) == pytest.approx(xi, abs=1e-6)
    assert _moment(g, 4, 0) == pytest.approx(3 + p.k40, abs=1e-5)
    assert _moment(g, 0, 4) == pytest.approx(3 + p.k04, abs=1e-5)
    assert _moment(g, 3, 1) == pytest.approx(3 * xi + p.k31, abs=1e-5)
    assert _moment(g, 1, 3) == pytest.approx(3 * xi + p.k13, abs=1e-5)
    assert _moment(g, 2, 2) == pytest.approx(1 + 2 * xi * xi + p.k22, abs=1e-5)


def test_third_order_terms():
    p = EdgeworthParams(xi=0.3, k30=0.2, k21=-0.1, k12=0.05, k03=0.15)
    g = density_grid(p, 10.0, 1001)
    assert _moment(g, 3, 0) == pytest.approx(0.2, abs=1e-5)
    assert _moment(g, 2, 1) == pytest.approx(-0.1, abs=1e-5)
    assert _moment(g, 0, 3) == pytest.approx(0.15, abs=1e-5)
    assert _moment(g, 0, 0) == pytest.approx(1, abs=1e-6)


def test_reference_cumulants_normalization():
    g = density_grid(EdgeworthParams(**REF), 6.0, 601)
    assert g.x_points[1] - g.x_points[0] == pytest.approx(0.02)
    assert g.mass() == pytest.approx(1, abs=5e-3)
    assert g.values.shape == (601, 601) and g.min_value < 0.05


def test_grid_center_and_validation():
    g = density_grid(EdgeworthParams(xi=0.0), 3.0, 11)
    assert g.x_points[5] == 0.0
    assert g.values[5, 5] == pytest.approx(1 / (2 * math.pi), abs=1e-15)
    for n in (10, 9, 2):
        with pytest.raises(InvalidGrid):
            density_grid(EdgeworthParams(xi=0.0), 3.0, n)
    with pytest.raises(InvalidGrid):
        density_grid(EdgeworthParams(xi=0.0), -1.0, 11)


def test_threads_do_not_change_the_grid():
    p = EdgeworthParams(**REF)
    a = density_grid(p, 5.0, 101, threads=1)
    b = density_grid(p, 5.0, 101, threads=4)
    assert np.array_equal(a.values, b.values)


def test_csv_layout():
    g = density_grid(EdgeworthParams(xi=0.2), 2.0, 11)
    fh = io.StringIO()
    g.write_csv(fh)
    lines = fh.getvalue().split("\n")
    assert lines[0] == "x,y,density"
    assert len(lines) == 1 + 121 + 1 and lines[-1] == ""
    x, y, d = map(float, lines[1].split(","))
    assert (x, y) == (-2.0, -2.0) and d == pytest.approx(g.values[0, 0], rel=1e-8)


def test_from_cumulants():
    c = CumulantSet(**REF)
    assert EdgeworthParams.from_cumulants(c) == EdgeworthParams(**REF)
