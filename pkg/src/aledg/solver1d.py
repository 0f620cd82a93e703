"""Fully discrete single-step ALE DG update in one dimension.

The update follows the quadrature form of the single-step scheme: modal
coefficients are scaled by the ratio of cell Jacobians, the volume term
collects the ALE flux of the space-time predictor at every (space, time)
quadrature node on the linearly moving cell, and the face term sums the
numerical flux at the moving vertices.

The predictor is cell-local and lives in the reference frame of the moving
cell: it integrates u_tau = w u_x - div F(u) (the ALE form at frozen
reference coordinates) with a Taylor step for degree 1 and
continuous-extension Runge-Kutta stages for degrees 2 and 3.  Working at
fixed reference coordinates keeps the predictor exactly Galilean-covariant
and never extrapolates outside the cell, no matter how fast the mesh
moves.
"""

from functools import lru_cache

import numpy as np

from . import dg_basis
from .errors import MeshTanglingError


@lru_cache(maxsize=None)
def tables_1d(degree):
    basis = dg_basis.basis_for(1, degree)
    vol = dg_basis.quadrature_for(1, 2 * degree + 1)
    phi_v = basis.eval(vol.points)
    dphi_v = basis.grad(vol.points)[:, :, 0]
    phi_l = basis.eval(np.array([[-1.0]]))[0]
    phi_r = basis.eval(np.array([[1.0]]))[0]
    tnodes, twts = dg_basis.time_quadrature(min(max(degree, 1), 3))
    return dict(basis=basis, xi=vol.points[:, 0], wq=vol.weights,
                phi_v=phi_v, dphi_v=dphi_v, phi_l=phi_l, phi_r=phi_r,
                tnodes=tnodes, twts=twts)


def _stage_residual(system, tab, C, h, wq):
    """Projected ALE residual w u_x - div F at frozen reference coordinates.

    ``h`` holds the cell lengths at the stage time; ``wq`` the (constant in
    time) mesh velocity at the volume quadrature points.
    """
    U = np.einsum("qm,nmv->nqv", tab["phi_v"], C)
    dUdx = np.einsum("qm,nmv->nqv", tab["dphi_v"], C) * (2.0 / h)[:, None, None]
    ok = np.all(system.is_valid(U), axis=1)
    rhs = wq[..., None] * dUdx - system.flux_div(U, dUdx)
    K = np.einsum("q,qm,nqv->nmv", tab["wq"], tab["phi_v"], rhs)
    return K, ok


def predictor_coefficients(system, tab, C, h0, dh, wq, dt, degree):
    """Space-time predictor sampled at the time-quadrature nodes.

    ``dh`` is the cell-length rate (w_right - w_left), so the stage
    geometry is h(tau) = h0 + dh tau.  Returns (Ct, n_fallback) with Ct of
    shape (n_tnodes, n_cells, M, nv); cells whose Runge-Kutta stages leave
    the physical state space are downgraded to the Taylor predictor.
    """
    theta = tab["tnodes"]
    K1, ok = _stage_residual(system, tab, C, h0, wq)
    taylor = C[None] + (theta[:, None, None, None] * dt) * K1[None]
    if degree <= 1:
        return taylor, 0
    bad = ~ok
    if degree == 2:
        K2, ok2 = _stage_residual(system, tab, C + dt * K1, h0 + dh * dt, wq)
        bad |= ~ok2
        b1 = theta - 0.5 * theta ** 2
        b2 = 0.5 * theta ** 2
        Ct = C[None] + dt * (b1[:, None, None, None] * K1[None]
                             + b2[:, None, None, None] * K2[None])
    else:
        K2, ok2 = _stage_residual(system, tab, C + 0.5 * dt * K1, h0 + 0.5 * dh * dt, wq)
        K3, ok3 = _stage_residual(system, tab, C + 0.5 * dt * K2, h0 + 0.5 * dh * dt, wq)
        K4, ok4 = _stage_residual(system, tab, C + dt * K3, h0 + dh * dt, wq)
        bad |= ~ok2 | ~ok3 | ~ok4
        b1 = theta - 1.5 * theta ** 2 + (2.0 / 3.0) * theta ** 3
        b23 = theta ** 2 - (2.0 / 3.0) * theta ** 3
        b4 = -0.5 * theta ** 2 + (2.0 / 3.0) * theta ** 3
        Ct = C[None] + dt * (b1[:, None, None, None] * K1[None]
                             + b23[:, None, None, None] * (K2 + K3)[None]
                             + b4[:, None, None, None] * K4[None])
    if np.any(bad):
        Ct[:, bad] = taylor[:, bad]
    return Ct, int(bad.sum())


def step_1d(x, w, C, dt, system, fspec, bc, degree, ghost=(None, None)):
    """One fully discrete step; returns (x_new, C_new, predictor_fallbacks).

    ``x``/``w`` are vertex positions/velocities at the step start, ``C`` the
    modal coefficients (n, M, nv), ``bc`` the (left, right) boundary kinds.
    ``ghost`` optionally supplies far-field states for open boundaries;
    without them open boundaries fall back to zero-gradient ghosts, which
    weakly reflect at subsonic in/outflow.
    """
    tab = tables_1d(degree)
    theta, twts = tab["tnodes"], tab["twts"]
    ng = theta.size
    n = C.shape[0]
    nv = C.shape[2]

    h0 = np.diff(x)
    J0 = 0.5 * h0
    x1 = x + dt * w
    J1 = 0.5 * np.diff(x1)
    if np.any(J1 <= 0.0):
        raise MeshTanglingError(f"dt={dt} inverts a cell; time-step bound violated")

    # mesh velocity at the fixed reference quadrature points (constant in t)
    xi = tab["xi"]
    wq = 0.5 * (1.0 - xi)[None, :] * w[:-1, None] + 0.5 * (1.0 + xi)[None, :] * w[1:, None]
    dh = np.diff(w) * 1.0  # dh/dtau per cell

    Ct, fallbacks = predictor_coefficients(system, tab, C, h0, dh, wq, dt, degree)

    # --- volume term -----------------------------------------------------
    # In 1D the adjugate Jacobian is 1, so the volume kernel needs no
    # geometry factor even on the moved cells.
    Uq = np.einsum("qm,gnmv->gnqv", tab["phi_v"], Ct)
    ones = np.ones(Uq.shape[:-1] + (1,))
    Gq = system.ale_flux(Uq, np.broadcast_to(wq[None], Uq.shape[:-1]), ones)
    vol = dt * np.einsum("g,q,gnqv,qm->nmv", twts, tab["wq"], Gq, tab["dphi_v"])

    # --- face term --------------------------------------------------------
    trR = np.einsum("m,gnmv->gnv", tab["phi_r"], Ct)   # right-end traces
    trL = np.einsum("m,gnmv->gnv", tab["phi_l"], Ct)   # left-end traces

    UL = np.empty((ng, n + 1, nv))
    UR = np.empty((ng, n + 1, nv))
    UL[:, 1:] = trR
    UR[:, :-1] = trL
    if bc[0] == "periodic":
        UL[:, 0] = trR[:, -1]
        UR[:, -1] = trL[:, 0]
    else:
        UL[:, 0] = _ghost(UR[:, 0], bc[0], ghost[0])
        UR[:, -1] = _ghost(UL[:, -1], bc[1], ghost[1])

    wn_face = np.broadcast_to(w[None, :], (ng, n + 1))
    nf = np.ones((ng, n + 1, 1))
    H = system.numerical_flux(UL, UR, wn_face, nf, fspec)

    face = dt * (np.einsum("g,gnv,m->nmv", twts, H[:, :-1], tab["phi_l"])
                 - np.einsum("g,gnv,m->nmv", twts, H[:, 1:], tab["phi_r"]))

    C_new = (J0[:, None, None] * C + vol + face) / J1[:, None, None]
    return x1, C_new, fallbacks


def _ghost(U, kind, farfield):
    if kind == "reflective":
        G = U.copy()
        G[..., 1] = -G[..., 1]
        return G
    if farfield is not None:
        return np.broadcast_to(farfield, U.shape)
    return U  # open / closed without far-field data: zero-gradient


def cell_averages(C, degree):
    basis = dg_basis.basis_for(1, degree)
    phi0 = float(basis.eval(np.array([[0.0]]))[0, 0])
    return C[:, 0, :] * phi0


def totals(x, C, degree):
    """Integrals of all conserved variables over the domain."""
    return (np.diff(x)[:, None] * cell_averages(C, degree)).sum(axis=0)


def barycenter_values(C, degree):
    basis = dg_basis.basis_for(1, degree)
    phi = basis.eval(np.array([[0.0]]))[0]
    return np.einsum("m,nmv->nv", phi, C)


def face_traces(C, degree):
    """Left/right end values of each cell polynomial: (n, 2, nv)."""
    basis = dg_basis.basis_for(1, degree)
    phi = basis.eval(np.array([[-1.0], [1.0]]))
    return np.einsum("em,nmv->nev", phi, C)
