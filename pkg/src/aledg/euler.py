"""Euler-equation physics: states, fluxes, eigenstructure, exact Riemann solver.

Scalar state types carry the invariants (positive density and pressure);
the ``*_arr`` helpers are the vectorized versions the solver kernels use,
operating on arrays whose trailing axis is the conserved/primitive vector
``[rho, mom..., E]`` / ``[rho, vel..., p]``.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidStateError, NegativePressureError, VacuumError


@dataclass(frozen=True)
class EosParams:
    """Ideal-gas parameters; gamma is the ratio of specific heats."""

    gamma: float = 1.4

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise InvalidStateError(f"gamma must exceed 1, got {self.gamma}")


def _as_vec(v):
    a = np.atleast_1d(np.asarray(v, dtype=float))
    if a.ndim != 1 or a.size not in (1, 2):
        raise InvalidStateError(f"velocity must have length 1 or 2, got shape {a.shape}")
    return a


@dataclass(frozen=True)
class PrimitiveState:
    """(rho, velocity, pressure) with rho > 0 and p > 0 enforced."""

    rho: float
    vel: np.ndarray
    p: float

    def __post_init__(self):
        object.__setattr__(self, "vel", _as_vec(self.vel))
        if not (self.rho > 0.0 and np.isfinite(self.rho)):
            raise InvalidStateError(f"non-positive density {self.rho}", state=self)
        if not (self.p > 0.0 and np.isfinite(self.p)):
            raise InvalidStateError(f"non-positive pressure {self.p}", state=self)

    @property
    def dim(self):
        return self.vel.size


@dataclass(frozen=True)
class ConservedState:
    """(rho, momentum, total energy E)."""

    rho: float
    mom: np.ndarray
    energy: float

    def __post_init__(self):
        object.__setattr__(self, "mom", _as_vec(self.mom))
        if not (self.rho > 0.0 and np.isfinite(self.rho)):
            raise InvalidStateError(f"non-positive density {self.rho}", state=self)

    @property
    def dim(self):
        return self.mom.size

    def as_array(self):
        return np.concatenate([[self.rho], self.mom, [self.energy]])


def prim_to_cons(w: PrimitiveState, eos: EosParams) -> ConservedState:
    """E = p/(gamma-1) + rho |v|^2 / 2."""
    e = w.p / (eos.gamma - 1.0) + 0.5 * w.rho * float(w.vel @ w.vel)
    return ConservedState(rho=w.rho, mom=w.rho * w.vel, energy=e)


def cons_to_prim(u: ConservedState, eos: EosParams) -> PrimitiveState:
    """Invert the energy relation; raises NegativePressureError when p <= 0."""
    vel = u.mom / u.rho
    p = (eos.gamma - 1.0) * (u.energy - 0.5 * u.rho * float(vel @ vel))
    if not p > 0.0:
        raise NegativePressureError(f"pressure {p} <= 0", state=u)
    return PrimitiveState(rho=u.rho, vel=vel, p=p)


def sound_speed(w: PrimitiveState, eos: EosParams) -> float:
    """Ideal-gas sound speed sqrt(gamma p / rho)."""
    return float(np.sqrt(eos.gamma * w.p / w.rho))


def physical_flux(u: ConservedState, direction, eos: EosParams) -> np.ndarray:
    """Directional flux F(u) . n for a unit vector (or +-1 in 1D)."""
    n = np.atleast_1d(np.asarray(direction, dtype=float))
    w = cons_to_prim(u, eos)
    vn = float(w.vel @ n)
    out = np.empty(u.dim + 2)
    out[0] = u.rho * vn
    out[1:1 + u.dim] = u.mom * vn + w.p * n
    out[-1] = (u.energy + w.p) * vn
    return out


# ---------------------------------------------------------------------------
# vectorized helpers (trailing axis = state vector)

def pressure_arr(U, gamma):
    d = U.shape[-1] - 2
    ke = 0.5 * np.sum(U[..., 1:1 + d] ** 2, axis=-1) / U[..., 0]
    return (gamma - 1.0) * (U[..., -1] - ke)


def prim_arr(U, gamma):
    """(rho, vel..., p) arrays from conserved arrays; no positivity checks."""
    rho = U[..., 0]
    d = U.shape[-1] - 2
    vel = U[..., 1:1 + d] / rho[..., None]
    p = pressure_arr(U, gamma)
    return rho, vel, p


def cons_arr(rho, vel, p, gamma):
    rho = np.asarray(rho, dtype=float)
    vel = np.asarray(vel, dtype=float)
    p = np.asarray(p, dtype=float)
    if vel.ndim == rho.ndim:
        vel = vel[..., None]
    U = np.empty(rho.shape + (vel.shape[-1] + 2,))
    U[..., 0] = rho
    U[..., 1:-1] = rho[..., None] * vel
    U[..., -1] = p / (gamma - 1.0) + 0.5 * rho * np.sum(vel ** 2, axis=-1)
    return U


def flux_dot_n_arr(U, n, gamma):
    """F(U) . n, vectorized; ``n`` broadcasts against U[..., :-1] rows."""
    d = U.shape[-1] - 2
    n = np.asarray(n, dtype=float)
    if n.ndim == 1 and d == 1:
        n = n[..., None] if n.shape[-1] != 1 else n
    rho, vel, p = prim_arr(U, gamma)
    vn = np.sum(vel * n, axis=-1)
    out = np.empty_like(U)
    out[..., 0] = rho * vn
    out[..., 1:1 + d] = U[..., 1:1 + d] * vn[..., None] + p[..., None] * n
    out[..., -1] = (U[..., -1] + p) * vn
    return out


def flux_differential_arr(U, dU, axis, gamma):
    """Directional derivative dF_axis(U; dU): the Jacobian-vector product.

    Used by the space-time predictor to form the in-cell flux divergence
    sum_d A_d(u) du/dx_d without assembling Jacobian matrices.
    """
    d = U.shape[-1] - 2
    rho = U[..., 0]
    m = U[..., 1:1 + d]
    E = U[..., -1]
    v = m / rho[..., None]
    drho = dU[..., 0]
    dm = dU[..., 1:1 + d]
    dE = dU[..., -1]
    dv = (dm - v * drho[..., None]) / rho[..., None]
    p = (gamma - 1.0) * (E - 0.5 * np.sum(m * v, axis=-1))
    dp = (gamma - 1.0) * (dE - np.sum(v * dm, axis=-1) + 0.5 * np.sum(v * v, axis=-1) * drho)
    va = v[..., axis]
    dva = dv[..., axis]
    out = np.empty_like(U)
    out[..., 0] = dm[..., axis]
    out[..., 1:1 + d] = dm * va[..., None] + m * dva[..., None]
    out[..., 1 + axis] += dp
    out[..., -1] = (dE + dp) * va + (E + p) * dva
    return out


def max_signal_arr(U, wn, n, gamma, floor=1e-16):
    """|v.n - wn| + c with positivity floors, for CFL and Rusanov speeds."""
    rho, vel, p = prim_arr(U, gamma)
    rho = np.maximum(rho, floor)
    p = np.maximum(p, floor)
    vn = np.sum(vel * n, axis=-1)
    return np.abs(vn - wn) + np.sqrt(gamma * p / rho)


# ---------------------------------------------------------------------------
# eigenstructure

def eigen_decomposition(u: ConservedState, direction, eos: EosParams):
    """(R, R_inv, Lambda) of the directional flux Jacobian at state ``u``.

    2D eigenvectors are assembled in the face-normal frame and expressed in
    the fixed coordinate basis, so R diagonalizes dF.n/du directly.
    """
    n = np.atleast_1d(np.asarray(direction, dtype=float))
    w = cons_to_prim(u, eos)
    c = sound_speed(w, eos)
    g1 = eos.gamma - 1.0
    if u.dim == 1:
        v = float(w.vel[0])
        H = (u.energy + w.p) / u.rho
        R = np.array([
            [1.0, 1.0, 1.0],
            [v - c, v, v + c],
            [H - v * c, 0.5 * v * v, H + v * c],
        ])
        b1 = g1 / (c * c)
        b2 = 0.5 * b1 * v * v
        L = np.array([
            [0.5 * (b2 + v / c), -0.5 * (b1 * v + 1.0 / c), 0.5 * b1],
            [1.0 - b2, b1 * v, -b1],
            [0.5 * (b2 - v / c), -0.5 * (b1 * v - 1.0 / c), 0.5 * b1],
        ])
        # d(F.n)/du = n A(u): same eigenvectors as A, eigenvalues scaled by n
        if n[0] < 0:
            order = [2, 1, 0]
            return R[:, order], L[order, :], np.array([-(v + c), -v, -(v - c)])
        return R, L, np.array([v - c, v, v + c])
    vx, vy = float(w.vel[0]), float(w.vel[1])
    nx, ny = float(n[0]), float(n[1])
    vn = vx * nx + vy * ny
    tx, ty = -ny, nx
    vt = vx * tx + vy * ty
    H = (u.energy + w.p) / u.rho
    q2 = vx * vx + vy * vy
    R = np.array([
        [1.0, 1.0, 0.0, 1.0],
        [vx - c * nx, vx, tx, vx + c * nx],
        [vy - c * ny, vy, ty, vy + c * ny],
        [H - c * vn, 0.5 * q2, vt, H + c * vn],
    ])
    b1 = g1 / (c * c)
    b2 = 0.5 * b1 * q2
    L = np.array([
        [0.5 * (b2 + vn / c), -0.5 * (b1 * vx + nx / c), -0.5 * (b1 * vy + ny / c), 0.5 * b1],
        [1.0 - b2, b1 * vx, b1 * vy, -b1],
        [-vt, tx, ty, 0.0],
        [0.5 * (b2 - vn / c), -0.5 * (b1 * vx - nx / c), -0.5 * (b1 * vy - ny / c), 0.5 * b1],
    ])
    lam = np.array([vn - c, vn, vn, vn + c])
    return R, L, lam


def eigen_arrays(U, n, gamma, floor=1e-16):
    """Vectorized (R, L, lam) for batches of 2D states and unit normals."""
    rho = np.maximum(U[..., 0], floor)
    vx = U[..., 1] / rho
    vy = U[..., 2] / rho
    p = np.maximum(pressure_arr(U, gamma), floor)
    c = np.sqrt(gamma * p / rho)
    H = (U[..., 3] + p) / rho
    nx, ny = n[..., 0], n[..., 1]
    vn = vx * nx + vy * ny
    tx, ty = -ny, nx
    vt = vx * tx + vy * ty
    q2 = vx * vx + vy * vy
    z = np.zeros_like(rho)
    one = np.ones_like(rho)
    R = np.stack([
        np.stack([one, one, z, one], -1),
        np.stack([vx - c * nx, vx, tx, vx + c * nx], -1),
        np.stack([vy - c * ny, vy, ty, vy + c * ny], -1),
        np.stack([H - c * vn, 0.5 * q2, vt, H + c * vn], -1),
    ], -2)
    b1 = (gamma - 1.0) / (c * c)
    b2 = 0.5 * b1 * q2
    L = np.stack([
        np.stack([0.5 * (b2 + vn / c), -0.5 * (b1 * vx + nx / c), -0.5 * (b1 * vy + ny / c), 0.5 * b1], -1),
        np.stack([1.0 - b2, b1 * vx, b1 * vy, -b1], -1),
        np.stack([-vt, tx, ty, z], -1),
        np.stack([0.5 * (b2 - vn / c), -0.5 * (b1 * vx - nx / c), -0.5 * (b1 * vy - ny / c), 0.5 * b1], -1),
    ], -2)
    lam = np.stack([vn - c, vn, vn, vn + c], -1)
    return R, L, lam


def eigen_arrays_1d(U, gamma, floor=1e-16):
    """Vectorized (R, L, lam) for batches of 1D states in the +x direction."""
    rho = np.maximum(U[..., 0], floor)
    v = U[..., 1] / rho
    p = np.maximum(pressure_arr(U, gamma), floor)
    c = np.sqrt(gamma * p / rho)
    H = (U[..., 2] + p) / rho
    one = np.ones_like(rho)
    R = np.stack([
        np.stack([one, one, one], -1),
        np.stack([v - c, v, v + c], -1),
        np.stack([H - v * c, 0.5 * v * v, H + v * c], -1),
    ], -2)
    b1 = (gamma - 1.0) / (c * c)
    b2 = 0.5 * b1 * v * v
    L = np.stack([
        np.stack([0.5 * (b2 + v / c), -0.5 * (b1 * v + 1.0 / c), 0.5 * b1 * one], -1),
        np.stack([1.0 - b2, b1 * v, -b1 * one], -1),
        np.stack([0.5 * (b2 - v / c), -0.5 * (b1 * v - 1.0 / c), 0.5 * b1 * one], -1),
    ], -2)
    lam = np.stack([v - c, v, v + c], -1)
    return R, L, lam


# ---------------------------------------------------------------------------
# exact Riemann solver (reference solutions only)

def _pressure_function(p, rho_k, p_k, c_k, gamma):
    """f_K(p) and its derivative for the star-pressure equation."""
    if p > p_k:  # shock branch
        A = 2.0 / ((gamma + 1.0) * rho_k)
        B = (gamma - 1.0) / (gamma + 1.0) * p_k
        f = (p - p_k) * np.sqrt(A / (p + B))
        df = np.sqrt(A / (p + B)) * (1.0 - 0.5 * (p - p_k) / (p + B))
    else:  # rarefaction branch
        f = 2.0 * c_k / (gamma - 1.0) * ((p / p_k) ** ((gamma - 1.0) / (2.0 * gamma)) - 1.0)
        df = 1.0 / (rho_k * c_k) * (p / p_k) ** (-(gamma + 1.0) / (2.0 * gamma))
    return f, df


def riemann_star(left: PrimitiveState, right: PrimitiveState, eos: EosParams,
                 tol=1e-12, max_newton=60):
    """Star-region pressure and velocity (Newton with bisection fallback)."""
    g = eos.gamma
    rl, vl, pl = left.rho, float(left.vel[0]), left.p
    rr, vr, pr = right.rho, float(right.vel[0]), right.p
    cl, cr = sound_speed(left, eos), sound_speed(right, eos)
    dv = vr - vl
    if 2.0 * (cl + cr) / (g - 1.0) <= dv:
        raise VacuumError("rarefactions separate: vacuum is generated")

    def F(p):
        fl, dfl = _pressure_function(p, rl, pl, cl, g)
        fr, dfr = _pressure_function(p, rr, pr, cr, g)
        return fl + fr + dv, dfl + dfr

    # two-rarefaction initial guess, clipped away from zero
    z = (g - 1.0) / (2.0 * g)
    p0 = ((cl + cr - 0.5 * (g - 1.0) * dv) / (cl / pl ** z + cr / pr ** z)) ** (1.0 / z)
    p = max(p0, 1e-14 * min(pl, pr))
    lo, hi = 1e-300, None
    converged = False
    for _ in range(max_newton):
        f, df = F(p)
        if f > 0:
            hi = p if hi is None else min(hi, p)
        else:
            lo = max(lo, p)
        step = f / df
        pn = p - step
        if not (pn > 0) or (hi is not None and not lo < pn < hi):
            pn = 0.5 * (lo + hi) if hi is not None else 0.5 * p
        if abs(pn - p) <= tol * max(pn, p):
            p = pn
            converged = True
            break
        p = pn
    if not converged:
        # bisection fallback on a bracketed root
        if hi is None:
            hi = max(pl, pr)
            while F(hi)[0] < 0:
                hi *= 10.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if F(mid)[0] > 0:
                hi = mid
            else:
                lo = mid
            if hi - lo <= tol * hi:
                break
        p = 0.5 * (lo + hi)
    fl, _ = _pressure_function(p, rl, pl, cl, g)
    fr, _ = _pressure_function(p, rr, pr, cr, g)
    v = 0.5 * (vl + vr) + 0.5 * (fr - fl)
    return p, v


def exact_riemann(left: PrimitiveState, right: PrimitiveState, xi, eos: EosParams):
    """Sample the self-similar Riemann solution at xi = x/t.

    Returns the primitive state on the ray.  The structure is the usual
    left wave (shock or fan), contact, right wave.
    """
    g = eos.gamma
    ps, vs = riemann_star(left, right, eos)
    rl, vl, pl = left.rho, float(left.vel[0]), left.p
    rr, vr, pr = right.rho, float(right.vel[0]), right.p
    cl, cr = sound_speed(left, eos), sound_speed(right, eos)
    gp = (g + 1.0) / (2.0 * g)
    gm = (g - 1.0) / (2.0 * g)

    def make(rho, v, p):
        return PrimitiveState(rho=rho, vel=np.array([v]), p=p)

    if xi < vs:  # left of contact
        if ps > pl:  # left shock
            sl = vl - cl * np.sqrt(gp * ps / pl + gm)
            if xi < sl:
                return make(rl, vl, pl)
            r = rl * ((ps / pl + (g - 1.0) / (g + 1.0)) /
                      ((g - 1.0) / (g + 1.0) * ps / pl + 1.0))
            return make(r, vs, ps)
        # left rarefaction
        head = vl - cl
        cs = cl * (ps / pl) ** ((g - 1.0) / (2.0 * g))
        tail = vs - cs
        if xi < head:
            return make(rl, vl, pl)
        if xi > tail:
            return make(rl * (ps / pl) ** (1.0 / g), vs, ps)
        c = (2.0 / (g + 1.0)) * (cl + 0.5 * (g - 1.0) * (vl - xi))
        v = (2.0 / (g + 1.0)) * (cl + 0.5 * (g - 1.0) * vl + xi)
        r = rl * (c / cl) ** (2.0 / (g - 1.0))
        return make(r, v, pl * (c / cl) ** (2.0 * g / (g - 1.0)))
    # right of contact
    if ps > pr:  # right shock
        sr = vr + cr * np.sqrt(gp * ps / pr + gm)
        if xi > sr:
            return make(rr, vr, pr)
        r = rr * ((ps / pr + (g - 1.0) / (g + 1.0)) /
                  ((g - 1.0) / (g + 1.0) * ps / pr + 1.0))
        return make(r, vs, ps)
    head = vr + cr
    cs = cr * (ps / pr) ** ((g - 1.0) / (2.0 * g))
    tail = vs + cs
    if xi > head:
        return make(rr, vr, pr)
    if xi < tail:
        return make(rr * (ps / pr) ** (1.0 / g), vs, ps)
    c = (2.0 / (g + 1.0)) * (cr - 0.5 * (g - 1.0) * (vr - xi))
    v = (2.0 / (g + 1.0)) * (-cr + 0.5 * (g - 1.0) * vr + xi)
    r = rr * (c / cr) ** (2.0 / (g - 1.0))
    return make(r, v, pr * (c / cr) ** (2.0 * g / (g - 1.0)))
