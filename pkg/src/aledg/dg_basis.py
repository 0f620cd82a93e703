"""Reference elements, orthonormal modal bases, and quadrature rules.

Two reference elements are used: the interval [-1, 1] and the unit right
triangle (0,0)-(1,0)-(0,1).  The modal basis is orthonormal with respect to
the plain Lebesgue measure of the reference element; mode 0 is the constant
mode, so all higher modes integrate to zero.  Bases are built once by
Gram-Schmidt on monomials using exact rational moments and stored as
monomial coefficient tables.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial

import numpy as np
from scipy.special import roots_jacobi

from .errors import CapabilityError

MAX_QUAD_DEGREE = 40

# reference triangle vertices, counterclockwise
TRI_VERTS = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
# face i is the edge opposite vertex i: (v_{i+1}, v_{i+2})
TRI_FACES = ((1, 2), (2, 0), (0, 1))


def monomial_exponents(dim, degree):
    """Exponent tuples of the monomials spanning P^degree, graded order."""
    if dim == 1:
        return [(a,) for a in range(degree + 1)]
    out = []
    for d in range(degree + 1):
        for a in range(d, -1, -1):
            out.append((a, d - a))
    return out


def _moment(dim, expo):
    """Exact integral of a monomial over the reference element."""
    if dim == 1:
        a = expo[0]
        return Fraction(0) if a % 2 else Fraction(2, a + 1)
    a, b = expo
    return Fraction(factorial(a) * factorial(b), factorial(a + b + 2))


@dataclass(frozen=True)
class BasisSet:
    """Orthonormal modal basis of degree <= 3 on a reference element.

    Coefficients are stored against the monomial list of
    :func:`monomial_exponents`; evaluation goes through a small Vandermonde
    matrix so arbitrary (possibly per-cell) points are supported.
    """

    dim_space: int
    degree: int
    coeffs: np.ndarray = field(repr=False)  # (n_modes, n_monomials)
    exponents: tuple = field(repr=False)

    @property
    def n_modes(self):
        return self.coeffs.shape[0]

    def _vandermonde(self, pts):
        pts = np.asarray(pts, dtype=float)
        if self.dim_space == 1:
            x = pts.reshape(-1)
            cols = [x ** a for (a,) in self.exponents]
        else:
            p = pts.reshape(-1, 2)
            x, y = p[:, 0], p[:, 1]
            cols = [x ** a * y ** b for (a, b) in self.exponents]
        return np.stack(cols, axis=-1)

    def eval(self, pts):
        """Basis values at reference points; shape (npts, n_modes)."""
        return self._vandermonde(pts) @ self.coeffs.T

    def grad(self, pts):
        """Reference gradients at points; shape (npts, n_modes, dim)."""
        pts = np.asarray(pts, dtype=float)
        if self.dim_space == 1:
            x = pts.reshape(-1)
            cols = [a * x ** max(a - 1, 0) for (a,) in self.exponents]
            g = np.stack(cols, axis=-1) @ self.coeffs.T
            return g[:, :, None]
        p = pts.reshape(-1, 2)
        x, y = p[:, 0], p[:, 1]
        dx = np.stack([a * x ** max(a - 1, 0) * y ** b for (a, b) in self.exponents], axis=-1)
        dy = np.stack([x ** a * b * y ** max(b - 1, 0) for (a, b) in self.exponents], axis=-1)
        return np.stack([dx @ self.coeffs.T, dy @ self.coeffs.T], axis=-1)


@lru_cache(maxsize=None)
def basis_for(dim, degree):
    """Build (and cache) the orthonormal basis for the reference element."""
    if dim not in (1, 2):
        raise CapabilityError(f"unsupported dimension {dim}")
    if not 0 <= degree <= 3:
        raise CapabilityError(f"unsupported polynomial degree {degree}")
    expo = monomial_exponents(dim, degree)
    n = len(expo)
    # Gram matrix of monomials, exact
    gram = [[_moment(dim, tuple(e1[i] + e2[i] for i in range(dim)))
             for e2 in expo] for e1 in expo]
    # Gram-Schmidt in exact arithmetic, normalization deferred to floats
    vecs = []  # rows of Fractions in monomial coordinates
    for m in range(n):
        v = [Fraction(0)] * n
        v[m] = Fraction(1)
        for u in vecs:
            # <u, e_m> with u already orthogonal but unnormalized
            num = sum(u[i] * gram[i][m] for i in range(n))
            den = sum(u[i] * gram[i][j] * u[j] for i in range(n) for j in range(n))
            coef = num / den
            v = [vi - coef * ui for vi, ui in zip(v, u)]
        vecs.append(v)
    coeffs = np.zeros((n, n))
    for m, v in enumerate(vecs):
        norm2 = sum(v[i] * gram[i][j] * v[j] for i in range(n) for j in range(n))
        scale = 1.0 / np.sqrt(float(norm2))
        coeffs[m] = [float(c) * scale for c in v]
    return BasisSet(dim_space=dim, degree=degree, coeffs=coeffs, exponents=tuple(expo))


def n_modes(dim, degree):
    return degree + 1 if dim == 1 else (degree + 1) * (degree + 2) // 2


def eval_basis(xi, m, dim=1, degree=3):
    """Value of mode ``m`` at reference coordinate ``xi``."""
    b = basis_for(dim, degree)
    if not 0 <= m < b.n_modes:
        raise IndexError(f"mode {m} out of range for degree {degree} in {dim}D")
    return float(b.eval(np.atleast_2d(xi))[0, m])


def eval_grad_basis(xi, m, dim=1, degree=3):
    """Reference gradient of mode ``m`` at ``xi``."""
    b = basis_for(dim, degree)
    if not 0 <= m < b.n_modes:
        raise IndexError(f"mode {m} out of range for degree {degree} in {dim}D")
    g = b.grad(np.atleast_2d(xi))[0, m]
    return float(g[0]) if dim == 1 else g


@dataclass(frozen=True)
class QuadratureRule:
    """Points and positive weights on a reference element."""

    points: np.ndarray
    weights: np.ndarray
    degree: int

    @property
    def n_points(self):
        return self.weights.size


@lru_cache(maxsize=None)
def quadrature_for(dim, degree):
    """Quadrature exact for polynomials up to ``degree`` on the reference element.

    1D rules are Gauss-Legendre on [-1, 1].  Triangle rules are collapsed
    Gauss x Gauss-Jacobi(1,0) products (Duffy transform), which keeps all
    weights strictly positive at every order.
    """
    if degree < 0 or degree > MAX_QUAD_DEGREE:
        raise CapabilityError(f"quadrature degree {degree} unsupported")
    n = max(1, (degree + 2) // 2)
    if dim == 1:
        x, w = np.polynomial.legendre.leggauss(n)
        return QuadratureRule(points=x.reshape(-1, 1), weights=w, degree=2 * n - 1)
    if dim != 2:
        raise CapabilityError(f"unsupported dimension {dim}")
    xa, wa = np.polynomial.legendre.leggauss(n)       # direction along the collapse
    xb, wb = roots_jacobi(n, 1, 0)                    # absorbs the (1-y) Jacobian
    A, B = np.meshgrid(xa, xb, indexing="ij")
    y = 0.5 * (1.0 + B)
    x = 0.25 * (1.0 + A) * (1.0 - B)
    # total weight: (1/8) * wa * wb, with the (1-b) factor inside wb
    W = np.outer(wa, wb) / 8.0
    pts = np.stack([x.reshape(-1), y.reshape(-1)], axis=-1)
    return QuadratureRule(points=pts, weights=W.reshape(-1), degree=2 * n - 1)


def face_quadrature(degree):
    """Gauss points on [0, 1] with weights summing to one."""
    x, w = np.polynomial.legendre.leggauss(max(1, (degree + 2) // 2))
    return 0.5 * (x + 1.0), 0.5 * w


def tri_face_points(face, s):
    """Map arclength parameters s in [0,1] onto reference-triangle face ``face``."""
    a, b = TRI_FACES[face]
    va, vb = TRI_VERTS[a], TRI_VERTS[b]
    s = np.asarray(s, dtype=float).reshape(-1, 1)
    return va + s * (vb - va)


_TIME_RULES = {}


def time_quadrature(degree):
    """Temporal rule on [0, 1] paired with the spatial degree.

    Degree 1 uses the midpoint rule, degree 2 the two-point and degree 3 the
    three-point Gauss-Legendre rule.
    """
    if degree not in (1, 2, 3):
        raise CapabilityError(f"no time quadrature for degree {degree}")
    if degree not in _TIME_RULES:
        if degree == 1:
            nodes, wts = np.array([0.5]), np.array([1.0])
        else:
            x, w = np.polynomial.legendre.leggauss(degree)
            nodes, wts = 0.5 * (x + 1.0), 0.5 * w
        _TIME_RULES[degree] = (nodes, wts)
    return _TIME_RULES[degree]


def project(f, cell, basis, quad_degree=None):
    """L2-project a pointwise function onto the modal basis of one cell.

    ``cell`` is (x_left, x_right) in 1D or a (3, 2) vertex array in 2D.
    ``f`` receives physical coordinates shaped (npts, dim) and must return
    (npts,) or (npts, nvars).  Returns coefficients (n_modes,) or
    (n_modes, nvars).
    """
    if quad_degree is None:
        quad_degree = 2 * basis.degree + 2
    rule = quadrature_for(basis.dim_space, quad_degree)
    phi = basis.eval(rule.points)
    if basis.dim_space == 1:
        xl, xr = cell
        x = xl + 0.5 * (rule.points[:, 0] + 1.0) * (xr - xl)
        vals = np.asarray(f(x.reshape(-1, 1)), dtype=float)
    else:
        verts = np.asarray(cell, dtype=float)
        x = verts[0] + rule.points @ np.stack([verts[1] - verts[0], verts[2] - verts[0]])
        vals = np.asarray(f(x), dtype=float)
    if vals.ndim == 1:
        return phi.T @ (rule.weights * vals)
    return phi.T @ (rule.weights[:, None] * vals)
