"""Conservation-law systems the DG kernels operate on.

The solver only needs fluxes, wave speeds, a Jacobian-vector product for
the in-cell predictor, and a numerical flux.  Euler and linear advection
(used for the dissipation analysis) implement the same small surface.
"""

import numpy as np

from . import euler, flux


class EulerSystem:
    name = "euler"

    def __init__(self, gamma=1.4, dim=1):
        self.gamma = float(gamma)
        self.dim = int(dim)
        self.n_vars = dim + 2

    def ale_flux(self, U, wn, n):
        return flux.ale_flux_arr(U, wn, n, self.gamma)

    def flux_tensor(self, U):
        """Full flux F(U) as (..., nvars, dim) columns per direction."""
        cols = []
        for d in range(self.dim):
            n = np.zeros(self.dim)
            n[d] = 1.0
            cols.append(euler.flux_dot_n_arr(U, n, self.gamma))
        return np.stack(cols, axis=-1)

    def flux_div(self, U, dU_dx, dU_dy=None):
        out = euler.flux_differential_arr(U, dU_dx, 0, self.gamma)
        if dU_dy is not None:
            out = out + euler.flux_differential_arr(U, dU_dy, 1, self.gamma)
        return out

    def numerical_flux(self, UL, UR, wn, n, spec):
        return flux.numerical_flux_arr(UL, UR, wn, n, self.gamma, spec)

    def max_signal(self, U, wn, n):
        return euler.max_signal_arr(U, wn, n, self.gamma)

    def is_valid(self, U):
        return (U[..., 0] > 0.0) & (euler.pressure_arr(U, self.gamma) > 0.0)

    def velocity(self, U):
        return U[..., 1:1 + self.dim] / U[..., 0:1]


class AdvectionSystem:
    """Scalar transport u_t + a . grad u = 0 with an upwind ALE flux."""

    name = "advection"
    n_vars = 1

    def __init__(self, a, dim=1):
        self.a = np.atleast_1d(np.asarray(a, dtype=float))
        self.dim = int(dim)

    def ale_flux(self, U, wn, n):
        an = np.sum(self.a * n, axis=-1)
        return (an - wn)[..., None] * U

    def flux_tensor(self, U):
        return U[..., None] * self.a[:self.dim]

    def flux_div(self, U, dU_dx, dU_dy=None):
        out = self.a[0] * dU_dx
        if dU_dy is not None:
            out = out + self.a[1] * dU_dy
        return out

    def numerical_flux(self, UL, UR, wn, n, spec):
        s = np.sum(self.a * n, axis=-1) - wn
        return np.where(s[..., None] >= 0.0, s[..., None] * UL, s[..., None] * UR)

    def max_signal(self, U, wn, n):
        return np.abs(np.sum(self.a * n, axis=-1) - wn) * np.ones(U.shape[:-1])

    def is_valid(self, U):
        return np.isfinite(U[..., 0])

    def velocity(self, U):
        return np.broadcast_to(self.a[:self.dim], U.shape[:-1] + (self.dim,))
