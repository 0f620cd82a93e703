from fractions import Fraction

import numpy as np
import pytest

from aledg import dg_basis as db
from aledg.errors import CapabilityError


@pytest.mark.parametrize("dim", [1, 2])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_gram_matrix_identity(dim, k):
    b = db.basis_for(dim, k)
    q = db.quadrature_for(dim, 2 * k)
    phi = b.eval(q.points)
    G = phi.T @ (q.weights[:, None] * phi)
    assert np.abs(G - np.eye(b.n_modes)).max() < 1e-12


def test_constant_mode_1d():
    assert db.eval_basis(0.3, 0, dim=1, degree=2) == pytest.approx(1 / np.sqrt(2))
    assert db.eval_grad_basis(0.3, 0, dim=1, degree=2) == 0.0


def test_higher_modes_integrate_to_zero():
    for dim in (1, 2):
        b = db.basis_for(dim, 3)
        q = db.quadrature_for(dim, 6)
        ints = q.weights @ b.eval(q.points)
        assert np.abs(ints[1:]).max() < 1e-13


def test_mode_one_normalized_1d():
    q = db.quadrature_for(1, 4)
    vals = db.basis_for(1, 3).eval(q.points)[:, 1]
    assert q.weights @ vals ** 2 == pytest.approx(1.0, rel=1e-13)


def test_mode_out_of_range():
    with pytest.raises(IndexError):
        db.eval_basis(0.0, 5, dim=1, degree=2)
    with pytest.raises(IndexError):
        db.eval_grad_basis(0.0, 17, dim=2, degree=3)


def test_gauss_2pt_integrates_x2():
    q = db.quadrature_for(1, 3)
    assert q.n_points == 2
    assert q.weights @ q.points[:, 0] ** 2 == pytest.approx(2.0 / 3.0, rel=1e-14)


def test_triangle_weight_normalization():
    for deg in range(0, 9):
        q = db.quadrature_for(2, deg)
        assert q.weights.sum() == pytest.approx(0.5, rel=1e-13)
        assert q.weights.min() > 0.0


def test_triangle_degree5_x2y2():
    # exact rational oracle: int x^a y^b = a! b! / (a+b+2)!
    q = db.quadrature_for(2, 5)
    exact = Fraction(2) * Fraction(2) / Fraction(720)  # 2!2!/6!
    val = q.weights @ (q.points[:, 0] ** 2 * q.points[:, 1] ** 2)
    assert val == pytest.approx(float(exact), rel=1e-13)


@pytest.mark.parametrize("a,b", [(3, 2), (4, 3), (0, 7), (5, 2)])
def test_triangle_monomial_exactness(a, b):
    from math import factorial
    deg = a + b
    q = db.quadrature_for(2, deg)
    exact = factorial(a) * factorial(b) / factorial(a + b + 2)
    val = q.weights @ (q.points[:, 0] ** a * q.points[:, 1] ** b)
    assert val == pytest.approx(exact, rel=1e-12)


def test_capability_error():
    with pytest.raises(CapabilityError):
        db.quadrature_for(1, 99)
    with pytest.raises(CapabilityError):
        db.basis_for(2, 4)


def test_face_quadrature_available():
    s, w = db.face_quadrature(7)
    assert w.sum() == pytest.approx(1.0, rel=1e-14)
    for lf in range(3):
        pts = db.tri_face_points(lf, s)
        assert pts.shape == (s.size, 2)


def test_time_quadrature_rules():
    n1, w1 = db.time_quadrature(1)
    assert np.allclose(n1, [0.5]) and np.allclose(w1, [1.0])
    for k, npts in ((2, 2), (3, 3)):
        n, w = db.time_quadrature(k)
        assert n.size == npts
        # Gauss exactness 2n-1 on [0,1]
        for p in range(2 * npts):
            assert w @ n ** p == pytest.approx(1.0 / (p + 1), rel=1e-13)


def test_project_constant_1d():
    b = db.basis_for(1, 2)
    c = db.project(lambda x: np.full(x.shape[0], 3.25), (0.0, 2.0), b)
    u = b.eval(np.linspace(-1, 1, 7).reshape(-1, 1)) @ c
    assert np.allclose(u, 3.25, rtol=1e-13)


@pytest.mark.parametrize("dim,k", [(1, 1), (1, 3), (2, 1), (2, 2)])
def test_project_reproduces_polynomials(dim, k):
    rng = np.random.default_rng(k + dim)
    expo = db.monomial_exponents(dim, k)
    coef = rng.normal(size=len(expo))

    def f(x):
        if dim == 1:
            return sum(c * x[:, 0] ** e[0] for c, e in zip(coef, expo))
        return sum(c * x[:, 0] ** e[0] * x[:, 1] ** e[1] for c, e in zip(coef, expo))

    cell = (0.3, 1.7) if dim == 1 else np.array([[0.1, 0.0], [1.2, 0.2], [0.4, 1.0]])
    b = db.basis_for(dim, k)
    cc = db.project(f, cell, b)
    test_pts = rng.uniform(0.05, 0.4, size=(20, dim)) if dim == 2 else \
        rng.uniform(-1, 1, size=(20, 1))
    u = b.eval(test_pts) @ cc
    if dim == 1:
        xl, xr = cell
        x = xl + 0.5 * (test_pts[:, 0] + 1) * (xr - xl)
        ref = f(x.reshape(-1, 1))
    else:
        v = np.asarray(cell)
        x = v[0] + test_pts @ np.stack([v[1] - v[0], v[2] - v[0]])
        ref = f(x)
    assert np.abs(u - ref).max() < 1e-12


def test_project_smooth_density_positive_averages():
    # rho = 1 + exp(-10 x^2) on [-5, 5], 100 cells: all cell averages positive
    b = db.basis_for(1, 2)
    edges = np.linspace(-5, 5, 101)
    phi0 = b.eval(np.array([[0.0]]))[0, 0]
    for xl, xr in zip(edges[:-1], edges[1:]):
        c = db.project(lambda x: 1 + np.exp(-10 * x[:, 0] ** 2), (xl, xr), b)
        assert c[0] * phi0 > 0.0
