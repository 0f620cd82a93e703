"""ALE numerical fluxes at moving faces.

The ALE analytical flux is G(u, w) = F(u) - u (x) w.  Each classical
approximate Riemann solver is applied to G with every wave-speed estimate
shifted by the face-normal mesh velocity w.n, which is the unique choice
that is consistent (H(u,u,w;n) = G.n) and reduces to the classical flux
for a static face.
"""

from dataclasses import dataclass

import numpy as np

from . import euler
from .errors import ConfigError, InvalidStateError

FLUX_KINDS = ("rusanov", "hllc", "roe")


@dataclass(frozen=True)
class FaceVelocity:
    """Mesh velocity interpolated to a face/quadrature point."""

    w: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "w", np.atleast_1d(np.asarray(self.w, dtype=float)))
        if not np.all(np.isfinite(self.w)):
            raise InvalidStateError(f"non-finite face velocity {self.w}")


@dataclass(frozen=True)
class FluxSpec:
    kind: str = "rusanov"
    roe_alpha: float = 0.1

    def __post_init__(self):
        if self.kind not in FLUX_KINDS:
            raise ConfigError(f"unknown flux kind {self.kind!r}; choose from {FLUX_KINDS}")
        if self.roe_alpha < 0:
            raise ConfigError(f"roe_alpha must be >= 0, got {self.roe_alpha}")


def _wvec(w):
    if isinstance(w, FaceVelocity):
        return w.w
    return np.atleast_1d(np.asarray(w, dtype=float))


def ale_flux(u: euler.ConservedState, w, direction, eos: euler.EosParams) -> np.ndarray:
    """(F(u) - u (x) w) . n for a single state."""
    n = np.atleast_1d(np.asarray(direction, dtype=float))
    wn = float(_wvec(w) @ n)
    return euler.physical_flux(u, n, eos) - wn * u.as_array()


def ale_flux_arr(U, wn, n, gamma):
    """Vectorized G.n; ``wn`` is the precomputed w.n per point."""
    return euler.flux_dot_n_arr(U, n, gamma) - wn[..., None] * U


def _roe_average(UL, UR, gamma, floor=1e-16):
    rl = np.maximum(UL[..., 0], floor)
    rr = np.maximum(UR[..., 0], floor)
    sl, sr = np.sqrt(rl), np.sqrt(rr)
    d = UL.shape[-1] - 2
    vl = UL[..., 1:1 + d] / rl[..., None]
    vr = UR[..., 1:1 + d] / rr[..., None]
    pl = np.maximum(euler.pressure_arr(UL, gamma), floor)
    pr = np.maximum(euler.pressure_arr(UR, gamma), floor)
    Hl = (UL[..., -1] + pl) / rl
    Hr = (UR[..., -1] + pr) / rr
    wsum = sl + sr
    v = (sl[..., None] * vl + sr[..., None] * vr) / wsum[..., None]
    H = (sl * Hl + sr * Hr) / wsum
    c2 = (gamma - 1.0) * (H - 0.5 * np.sum(v * v, axis=-1))
    c = np.sqrt(np.maximum(c2, floor))
    return v, H, c


def _contact_fix(lam_abs, lam_raw, c, alpha):
    """Harten-style magnitude floor on a linearly degenerate eigenvalue."""
    if alpha <= 0.0:
        return lam_abs
    delta = alpha * c
    small = lam_abs <= delta
    return np.where(small, 0.5 * (delta + lam_raw ** 2 / np.maximum(delta, 1e-300)), lam_abs)


def rusanov_arr(UL, UR, wn, n, gamma):
    sL = euler.max_signal_arr(UL, wn, n, gamma)
    sR = euler.max_signal_arr(UR, wn, n, gamma)
    s = np.maximum(sL, sR)
    GL = ale_flux_arr(UL, wn, n, gamma)
    GR = ale_flux_arr(UR, wn, n, gamma)
    return 0.5 * (GL + GR) - 0.5 * s[..., None] * (UR - UL)


def roe_arr(UL, UR, wn, n, gamma, alpha=0.1, floor=1e-16):
    d = UL.shape[-1] - 2
    v, H, c = _roe_average(UL, UR, gamma)
    # synthesize a conserved state at the Roe average to reuse the eigen tables
    rho1 = np.ones_like(c)
    p_eq = rho1 * c * c / gamma
    E = p_eq / (gamma - 1.0) + 0.5 * np.sum(v * v, axis=-1)
    Uroe = np.concatenate([rho1[..., None], v, E[..., None]], axis=-1)
    if d == 1:
        R, L, lam = euler.eigen_arrays_1d(Uroe, gamma, floor)
        nsc = n[..., 0]
        lam = lam * nsc[..., None]
        # n = -1 reverses the wave ordering; eigenvectors are unchanged
    else:
        R, L, lam = euler.eigen_arrays(Uroe, gamma=gamma, n=n, floor=floor)
    lam_ale = lam - wn[..., None]
    lam_abs = np.abs(lam_ale)
    if alpha > 0.0:
        mid = slice(1, 2) if d == 1 else slice(1, 3)
        lam_abs[..., mid] = _contact_fix(
            lam_abs[..., mid], lam_ale[..., mid], c[..., None], alpha)
    strengths = np.einsum("...ij,...j->...i", L, UR - UL)
    diss = np.einsum("...ij,...j->...i", R, lam_abs * strengths)
    GL = ale_flux_arr(UL, wn, n, gamma)
    GR = ale_flux_arr(UR, wn, n, gamma)
    return 0.5 * (GL + GR) - 0.5 * diss


def hllc_arr(UL, UR, wn, n, gamma, floor=1e-16):
    d = UL.shape[-1] - 2
    rl, vl, pl = euler.prim_arr(UL, gamma)
    rr, vr, pr = euler.prim_arr(UR, gamma)
    rl = np.maximum(rl, floor)
    rr = np.maximum(rr, floor)
    pl = np.maximum(pl, floor)
    pr = np.maximum(pr, floor)
    cl = np.sqrt(gamma * pl / rl)
    cr = np.sqrt(gamma * pr / rr)
    vnl = np.sum(vl * n, axis=-1)
    vnr = np.sum(vr * n, axis=-1)
    vroe, _, croe = _roe_average(UL, UR, gamma)
    vnroe = np.sum(vroe * n, axis=-1)
    SL = np.minimum(vnl - cl, vnroe - croe)
    SR = np.maximum(vnr + cr, vnroe + croe)
    num = pr - pl + rl * vnl * (SL - vnl) - rr * vnr * (SR - vnr)
    den = rl * (SL - vnl) - rr * (SR - vnr)
    den = np.where(np.abs(den) < 1e-300, 1e-300, den)
    Sstar = num / den

    def star(U, r, vn, p, S):
        # S - vn is bounded away from zero by the sound speed on each side
        fac = r * (S - vn) / np.where(np.abs(S - Sstar) < 1e-300, 1e-300, S - Sstar)
        out = np.empty_like(U)
        out[..., 0] = fac
        out[..., 1:1 + d] = fac[..., None] * (U[..., 1:1 + d] / r[..., None]
                                              + (Sstar - vn)[..., None] * n)
        out[..., -1] = fac * (U[..., -1] / r + (Sstar - vn) * (Sstar + p / (r * (S - vn))))
        return out

    USL = star(UL, rl, vnl, pl, SL)
    USR = star(UR, rr, vnr, pr, SR)
    GL = ale_flux_arr(UL, wn, n, gamma)
    GR = ale_flux_arr(UR, wn, n, gamma)
    HL_star = GL + (SL - wn)[..., None] * (USL - UL)
    HR_star = GR + (SR - wn)[..., None] * (USR - UR)
    out = np.where((SL - wn)[..., None] >= 0.0, GL,
                   np.where((Sstar - wn)[..., None] >= 0.0, HL_star,
                            np.where((SR - wn)[..., None] >= 0.0, HR_star, GR)))
    return out


def numerical_flux_arr(UL, UR, wn, n, gamma, spec: FluxSpec):
    if spec.kind == "rusanov":
        return rusanov_arr(UL, UR, wn, n, gamma)
    if spec.kind == "hllc":
        return hllc_arr(UL, UR, wn, n, gamma)
    return roe_arr(UL, UR, wn, n, gamma, alpha=spec.roe_alpha)


def numerical_flux(uL: euler.ConservedState, uR: euler.ConservedState, w, direction,
                   spec: FluxSpec, eos: euler.EosParams) -> np.ndarray:
    """Numerical ALE flux H(uL, uR, w; n) for a single face point."""
    euler.cons_to_prim(uL, eos)  # raises on invalid input states
    euler.cons_to_prim(uR, eos)
    n = np.atleast_1d(np.asarray(direction, dtype=float))
    wn = np.array([float(_wvec(w) @ n)])
    UL = uL.as_array()[None, :]
    UR = uR.as_array()[None, :]
    return numerical_flux_arr(UL, UR, wn, n[None, :], eos.gamma, spec)[0]
