"""Moving 1D mesh: vertex velocities, motion, and h-bounds adaptation."""

from dataclasses import dataclass, field

import numpy as np

from . import dg_basis
from .errors import ConfigError, MeshTanglingError

BOUNDARY_KINDS = ("open", "reflective", "periodic", "closed")

# slack on the h bounds so adaptation does not thrash at the threshold
ADAPT_SLACK = 0.1
ORIENT_SAFETY = 0.1


@dataclass
class Mesh1D:
    """Strictly increasing vertex coordinates with per-vertex velocities."""

    x: np.ndarray
    w: np.ndarray = None
    bc_left: str = "open"
    bc_right: str = "open"

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        if self.w is None:
            self.w = np.zeros_like(self.x)
        else:
            self.w = np.asarray(self.w, dtype=float)
        if np.any(np.diff(self.x) <= 0):
            raise MeshTanglingError("vertices must be strictly increasing")
        for kind in (self.bc_left, self.bc_right):
            if kind not in BOUNDARY_KINDS:
                raise ConfigError(f"unknown boundary kind {kind!r}")
        if (self.bc_left == "periodic") != (self.bc_right == "periodic"):
            raise ConfigError("periodic boundaries must pair both ends")

    @property
    def n_cells(self):
        return self.x.size - 1

    @property
    def h(self):
        return np.diff(self.x)

    @property
    def centers(self):
        return 0.5 * (self.x[:-1] + self.x[1:])

    @property
    def periodic(self):
        return self.bc_left == "periodic"

    def copy(self):
        return Mesh1D(self.x.copy(), self.w.copy(), self.bc_left, self.bc_right)


def average_vertex_velocity(mesh: Mesh1D, cell_velocity, static=False):
    """Vertex velocities as means of adjacent-cell barycenter fluid velocities."""
    if static:
        return np.zeros_like(mesh.x)
    v = np.asarray(cell_velocity, dtype=float)
    w = np.empty_like(mesh.x)
    w[1:-1] = 0.5 * (v[:-1] + v[1:])
    if mesh.periodic:
        w[0] = w[-1] = 0.5 * (v[0] + v[-1])
    else:
        w[0] = 0.0 if mesh.bc_left == "reflective" else v[0]
        w[-1] = 0.0 if mesh.bc_right == "reflective" else v[-1]
    return w


def linearized_riemann_velocity(rho_l, c_l, v_l, p_l, rho_r, c_r, v_r, p_r):
    """Face velocity from a linearized (acoustic) Riemann problem."""
    zl = rho_l * c_l
    zr = rho_r * c_r
    return (zl * v_l + zr * v_r) / (zl + zr) + (p_l - p_r) / (zl + zr)


def riemann_vertex_velocity(mesh: Mesh1D, rho, c, v, p, static=False):
    """Per-vertex velocities via the linearized Riemann formula.

    Inputs are left/right cell traces stacked as (n_cells, 2) arrays with
    column 0 the left-end trace and column 1 the right-end trace.
    """
    if static:
        return np.zeros_like(mesh.x)
    w = np.empty_like(mesh.x)
    w[1:-1] = linearized_riemann_velocity(
        rho[:-1, 1], c[:-1, 1], v[:-1, 1], p[:-1, 1],
        rho[1:, 0], c[1:, 0], v[1:, 0], p[1:, 0])
    if mesh.periodic:
        wb = linearized_riemann_velocity(
            rho[-1, 1], c[-1, 1], v[-1, 1], p[-1, 1],
            rho[0, 0], c[0, 0], v[0, 0], p[0, 0])
        w[0] = w[-1] = wb
    else:
        w[0] = 0.0 if mesh.bc_left == "reflective" else v[0, 0]
        w[-1] = 0.0 if mesh.bc_right == "reflective" else v[-1, 1]
    return w


def max_timestep(mesh: Mesh1D, safety=1.0 - ORIENT_SAFETY):
    """Largest dt keeping every cell length above (1-safety)-fraction of start.

    With linear vertex motion each gap is linear in t, so the bound is the
    smallest positive root of h_i + dw_i t = (1-safety) h_i over shrinking
    cells.
    """
    h = mesh.h
    dw = np.diff(mesh.w)
    shrink = dw < 0.0
    if not np.any(shrink):
        return np.inf
    return float(np.min(safety * h[shrink] / -dw[shrink]))


def move(mesh: Mesh1D, dt) -> Mesh1D:
    """Advance vertices by their velocities; ordering must be preserved."""
    x = mesh.x + dt * mesh.w
    if np.any(np.diff(x) <= 0.0):
        raise MeshTanglingError(
            f"mesh tangled at dt={dt}: a time-step bound was violated")
    return Mesh1D(x, mesh.w.copy(), mesh.bc_left, mesh.bc_right)


def _child_transfer_matrices(basis, frac_lo, frac_hi):
    """Projection matrix onto a sub-interval [frac_lo, frac_hi] of the parent.

    Fractions are in [0, 1] along the parent cell.  Exact for polynomials of
    the basis degree.
    """
    rule = dg_basis.quadrature_for(1, 2 * basis.degree)
    xi_child = rule.points[:, 0]
    # parent reference coordinate of the child quadrature points
    lo = -1.0 + 2.0 * frac_lo
    hi = -1.0 + 2.0 * frac_hi
    xi_parent = 0.5 * (lo + hi) + 0.5 * (hi - lo) * xi_child
    phi_c = basis.eval(rule.points)
    phi_p = basis.eval(xi_parent.reshape(-1, 1))
    return phi_c.T @ (rule.weights[:, None] * phi_p)


def adapt(mesh: Mesh1D, coeffs, h_min, h_max, degree):
    """Split cells above h_max and merge cells below h_min.

    Children/merged cells receive exact L2 projections of the parents, so
    all conserved totals are preserved to round-off.  Returns (mesh', C').
    """
    if h_min >= h_max:
        raise ConfigError(f"h_min {h_min} must be below h_max {h_max}")
    basis = dg_basis.basis_for(1, degree)
    x = list(mesh.x)
    w = list(mesh.w)
    C = [coeffs[i] for i in range(mesh.n_cells)]

    changed = True
    guard = 0
    while changed and guard < 50:
        changed = False
        guard += 1
        # splits
        i = 0
        while i < len(C):
            h = x[i + 1] - x[i]
            if h > h_max * (1.0 + ADAPT_SLACK):
                xm = 0.5 * (x[i] + x[i + 1])
                wm = 0.5 * (w[i] + w[i + 1])
                TL = _child_transfer_matrices(basis, 0.0, 0.5)
                TR = _child_transfer_matrices(basis, 0.5, 1.0)
                parent = C[i]
                x.insert(i + 1, xm)
                w.insert(i + 1, wm)
                C[i] = TL @ parent
                C.insert(i + 1, TR @ parent)
                changed = True
                i += 2
            else:
                i += 1
        # merges (shorter neighbor wins; ties toward the left)
        i = 0
        while i < len(C):
            h = x[i + 1] - x[i]
            if h < h_min * (1.0 - ADAPT_SLACK) and len(C) > 1:
                if i == 0:
                    j = 1
                elif i == len(C) - 1:
                    j = i - 1
                else:
                    hl = x[i] - x[i - 1]
                    hr = x[i + 2] - x[i + 1]
                    j = i - 1 if hl <= hr else i + 1
                lo, hi = (j, i) if j < i else (i, j)
                C_new = _merge_project(basis, x[lo], x[hi], x[hi + 1], C[lo], C[hi])
                C[lo] = C_new
                del C[hi]
                del x[hi]
                del w[hi]
                changed = True
            else:
                i += 1
    out = Mesh1D(np.array(x), np.array(w), mesh.bc_left, mesh.bc_right)
    return out, np.array(C)


def _merge_project(basis, xa, xb, xc, C_left, C_right):
    """L2 projection of two adjacent cell polynomials onto their union."""
    rule = dg_basis.quadrature_for(1, 2 * basis.degree)
    xi = rule.points[:, 0]
    H = xc - xa
    new = np.zeros_like(C_left)
    for (lo, hi, C) in ((xa, xb, C_left), (xb, xc, C_right)):
        xq = 0.5 * (lo + hi) + 0.5 * (hi - lo) * xi
        xi_parent = (2.0 * xq - (lo + hi)) / (hi - lo)   # = xi
        xi_new = (2.0 * xq - (xa + xc)) / H
        u = basis.eval(xi_parent.reshape(-1, 1)) @ C
        phi_new = basis.eval(xi_new.reshape(-1, 1))
        frac = (hi - lo) / H
        new += frac * phi_new.T @ (rule.weights[:, None] * u)
    return new
