"""Slope limiting: minmod machinery, 1D TVD/TVB, 2D TVB, positivity.

All limiters preserve cell averages exactly.  The TVB threshold M dx^2
applies to the first argument of the bounded minmod; with very large M the
limiters become no-ops on smooth data, preserving high-order accuracy.
"""

from dataclasses import dataclass

import numpy as np

from . import dg_basis, euler
from .errors import ConfigError, InvalidStateError

EPS_POS = 1e-13


@dataclass(frozen=True)
class LimiterConfig:
    kind: str = "none"              # none | tvd_1d | tvb_2d
    M: float = 0.0                  # TVB constant; 0 gives TVD
    nu: float = 1.5                 # amplification of neighbor differences
    eps_skip: float = 1e-12         # relative no-op tolerance
    positivity: bool = False
    characteristic: bool = True

    def __post_init__(self):
        if self.kind not in ("none", "tvd_1d", "tvb_2d"):
            raise ConfigError(f"unknown limiter kind {self.kind!r}")
        if self.M < 0:
            raise ConfigError("TVB constant M must be >= 0")
        if self.nu < 1.0:
            raise ConfigError("slope factor nu must be >= 1")


def minmod(*args):
    """Classic minmod: common-sign minimum magnitude, else zero.

    Arguments may be scalars or broadcastable arrays.
    """
    a = np.broadcast_arrays(*[np.asarray(x, dtype=float) for x in args])
    stack = np.stack(a)
    pos = np.all(stack > 0, axis=0)
    neg = np.all(stack < 0, axis=0)
    mini = np.min(np.abs(stack), axis=0)
    out = np.where(pos, mini, np.where(neg, -mini, 0.0))
    return out if out.ndim else float(out)


def minmod_tvb(*args, M=0.0, dx=1.0):
    """Bounded minmod: returns the first argument untouched below M dx^2."""
    a1 = np.asarray(args[0], dtype=float)
    m = minmod(*args)
    out = np.where(np.abs(a1) <= M * dx * dx, a1, m)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# 1D limiter

def tvd_limit_1d(coeffs, mesh, config: LimiterConfig, gamma=1.4, system="euler"):
    """Limit the linear mode against forward/backward average differences.

    Works on modal coefficients (n_cells, n_modes, n_vars) in place of the
    cell polynomials; returns (coeffs', n_limited).  Cell averages are
    untouched; modes above linear are zeroed in cells where limiting
    engages.
    """
    C = np.asarray(coeffs, dtype=float)
    n, nm, nv = C.shape
    degree = nm - 1
    if degree < 1 or config.kind == "none":
        return C.copy(), 0
    basis = dg_basis.basis_for(1, degree)
    phi0 = float(basis.eval(np.array([[0.0]]))[0, 0])
    phi1_r = float(basis.eval(np.array([[1.0]]))[0, 1])

    ubar = C[:, 0, :] * phi0
    xb = mesh.centers
    h = mesh.h
    # value increment (linear part) from center to the right face
    inc = C[:, 1, :] * phi1_r

    if mesh.periodic:
        ub_m = np.roll(ubar, 1, axis=0)
        ub_p = np.roll(ubar, -1, axis=0)
        dxp = np.roll(xb, -1) - xb
        dxm = xb - np.roll(xb, 1)
        L = mesh.x[-1] - mesh.x[0]
        dxp[-1] += L
        dxm[0] += L
    else:
        ub_m = np.concatenate([ubar[:1], ubar[:-1]])
        ub_p = np.concatenate([ubar[1:], ubar[-1:]])
        dxp = np.empty(n)
        dxm = np.empty(n)
        dxp[:-1] = xb[1:] - xb[:-1]
        dxp[-1] = h[-1]
        dxm[1:] = xb[1:] - xb[:-1]
        dxm[0] = h[0]
    # neighbor differences scaled to this cell's half width
    Dp = (ub_p - ubar) * (0.5 * h / dxp)[:, None]
    Dm = (ubar - ub_m) * (0.5 * h / dxm)[:, None]

    use_char = config.characteristic and system == "euler" and nv >= 3
    if use_char:
        R, Linv, _ = euler.eigen_arrays_1d(ubar, gamma)
        tr = lambda q: np.einsum("nij,nj->ni", Linv, q)
        inc_c, Dp_c, Dm_c = tr(inc), tr(Dp), tr(Dm)
    else:
        inc_c, Dp_c, Dm_c = inc, Dp, Dm

    lim_c = minmod_tvb(inc_c, config.nu * Dp_c, config.nu * Dm_c,
                       M=config.M, dx=h[:, None] * np.ones((1, nv)))
    if use_char:
        lim = np.einsum("nij,nj->ni", R, lim_c)
    else:
        lim = lim_c

    scale = np.maximum(1.0, np.abs(ubar))
    engaged = np.any(np.abs(lim - inc) > config.eps_skip * scale, axis=1)
    out = C.copy()
    out[engaged, 1, :] = lim[engaged] / phi1_r
    if nm > 2:
        out[engaged, 2:, :] = 0.0
    return out, int(engaged.sum())


# ---------------------------------------------------------------------------
# 2D TVB limiter

def psi_basis(verts):
    """Midpoint-cardinal linear functions of one triangle.

    Returns a (3, 3) array whose row i holds (a_0, a_x, a_y) with
    psi_i(m_j) = delta_ij, m_j the face midpoints (face j opposite
    vertex j).
    """
    v = np.asarray(verts, dtype=float)
    mids = np.array([0.5 * (v[1] + v[2]), 0.5 * (v[2] + v[0]), 0.5 * (v[0] + v[1])])
    A = np.column_stack([np.ones(3), mids[:, 0], mids[:, 1]])
    det = np.linalg.det(A)
    if abs(det) < 1e-300:
        raise InvalidStateError("degenerate cell: psi basis is singular")
    return np.linalg.inv(A)  # column i solves A a = e_i; rows of inv(A).T


def rebalance(delta):
    """Eq-style conservative correction: returns hat-deltas with zero sum.

    ``delta`` has the face axis last-but-one: (..., 3) or (..., 3, nvars)
    with the correction applied along the face axis.
    """
    d = np.asarray(delta, dtype=float)
    pos = np.sum(np.maximum(d, 0.0), axis=-1)
    neg = np.sum(np.maximum(-d, 0.0), axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        tp = np.where(pos > 0, np.minimum(1.0, neg / np.where(pos > 0, pos, 1.0)), 1.0)
        tm = np.where(neg > 0, np.minimum(1.0, pos / np.where(neg > 0, neg, 1.0)), 1.0)
    return tp[..., None] * np.maximum(d, 0.0) - tm[..., None] * np.maximum(-d, 0.0)


def solve_alphas(bc, mids, nb_bary):
    """Nonnegative expansion of each midpoint direction in neighbor directions.

    For every face midpoint the pair of neighbors spanning it with both
    alpha >= 0 is selected (smallest alpha-sum on ties).  Returns
    (alpha (ncells, 3, 2), pair index (ncells, 3, 2), ok (ncells, 3)).
    """
    dm = mids - bc[:, None, :]                       # (n,3,2)
    B = nb_bary - bc[:, None, :]                     # (n,3,2)
    pairs = np.array([(0, 1), (1, 2), (2, 0)])
    n = bc.shape[0]
    best = np.full((n, 3, 2), np.nan)
    best_pair = np.zeros((n, 3, 2), dtype=int)
    best_sum = np.full((n, 3), np.inf)
    for (j, k) in pairs:
        bj, bk = B[:, j, :], B[:, k, :]
        det = bj[:, 0] * bk[:, 1] - bj[:, 1] * bk[:, 0]
        ok = np.abs(det) > 1e-14 * np.maximum(1e-30, np.abs(bj).max(1) * np.abs(bk).max(1))
        safe = np.where(ok, det, 1.0)
        a1 = (dm[:, :, 0] * bk[:, None, 1] - dm[:, :, 1] * bk[:, None, 0]) / safe[:, None]
        a2 = (bj[:, None, 0] * dm[:, :, 1] - bj[:, None, 1] * dm[:, :, 0]) / safe[:, None]
        tol = -1e-12
        valid = ok[:, None] & (a1 >= tol) & (a2 >= tol)
        ssum = np.where(valid, np.maximum(a1, 0) + np.maximum(a2, 0), np.inf)
        better = ssum < best_sum
        best_sum = np.where(better, ssum, best_sum)
        best[..., 0] = np.where(better, np.maximum(a1, 0.0), best[..., 0])
        best[..., 1] = np.where(better, np.maximum(a2, 0.0), best[..., 1])
        best_pair[..., 0] = np.where(better, j, best_pair[..., 0])
        best_pair[..., 1] = np.where(better, k, best_pair[..., 1])
    return best, best_pair, np.isfinite(best_sum)


def tvb_limit_2d_all(ubar, umid, bc, mids, nb_bary, nb_ubar, hK,
                     config: LimiterConfig, gamma=1.4, system="euler"):
    """Vectorized 2D TVB limiter over a batch of cells.

    Parameters give, per cell: average ``ubar`` (n, nv), linear-part values
    at face midpoints ``umid`` (n, 3, nv), barycenter, face midpoints,
    neighbor barycenters/averages (ghost-resolved by the caller), and the
    length scale ``hK`` for the M dx^2 threshold.

    Returns (delta_hat (n, 3, nv), engaged (n,), fallback (n,)) where the
    limited linear polynomial is ubar + sum_i delta_hat_i psi_i(x) for the
    engaged cells.
    """
    n, nv = ubar.shape
    utilde = umid - ubar[:, None, :]
    alphas, pair_idx, ok = solve_alphas(bc, mids, nb_bary)
    dbar = nb_ubar - ubar[:, None, :]                # (n, 3, nv)
    # gather per-face neighbor differences for the chosen pair
    d_j = np.take_along_axis(dbar, np.broadcast_to(pair_idx[:, :, 0][..., None], (n, 3, nv)), axis=1)
    d_k = np.take_along_axis(dbar, np.broadcast_to(pair_idx[:, :, 1][..., None], (n, 3, nv)), axis=1)
    dubar = alphas[..., 0][..., None] * d_j + alphas[..., 1][..., None] * d_k

    use_char = config.characteristic and system == "euler" and nv == 4
    if use_char:
        dirs = mids - bc[:, None, :]
        dirs = dirs / np.linalg.norm(dirs, axis=-1, keepdims=True)
        Ub = np.broadcast_to(ubar[:, None, :], (n, 3, nv))
        R, Linv, _ = euler.eigen_arrays(Ub, dirs, gamma)
        ut_c = np.einsum("nfij,nfj->nfi", Linv, utilde)
        du_c = np.einsum("nfij,nfj->nfi", Linv, dubar)
        delta_c = minmod_tvb(ut_c, config.nu * du_c, M=config.M, dx=hK[:, None, None])
        delta = np.einsum("nfij,nfj->nfi", R, delta_c)
    else:
        delta = minmod_tvb(utilde, config.nu * dubar, M=config.M, dx=hK[:, None, None])

    scale = np.maximum(1.0, np.abs(ubar))[:, None, :]
    engaged = np.any(np.abs(utilde - delta) >= config.eps_skip * scale, axis=(1, 2))
    fallback = ~ok.all(axis=1)
    # conservative rebalancing along the face axis (per variable)
    dhat = rebalance(np.moveaxis(delta, 1, -1))
    dhat = np.moveaxis(dhat, -1, 1)
    dhat[fallback] = 0.0
    return dhat, engaged, fallback


def tvb_limit_2d(cell_verts, ubar, umid, nb_bary, nb_ubar, config: LimiterConfig,
                 gamma=1.4, system="euler"):
    """Single-cell front end of the 2D TVB limiter (see tvb_limit_2d_all).

    ``cell_verts`` is (3, 2); midpoints are taken opposite each vertex.
    Returns (delta_hat (3, nvars), engaged flag).
    """
    v = np.asarray(cell_verts, dtype=float)
    mids = np.array([0.5 * (v[1] + v[2]), 0.5 * (v[2] + v[0]), 0.5 * (v[0] + v[1])])
    bc = v.mean(axis=0)
    hK = float(max(np.linalg.norm(v[1] - v[0]), np.linalg.norm(v[2] - v[1]),
                   np.linalg.norm(v[0] - v[2])))
    ubar = np.atleast_1d(np.asarray(ubar, dtype=float))
    nv = ubar.size
    dhat, engaged, _ = tvb_limit_2d_all(
        ubar[None, :], np.asarray(umid, float).reshape(1, 3, nv), bc[None, :],
        mids[None], np.asarray(nb_bary, float)[None], np.asarray(nb_ubar, float).reshape(1, 3, nv),
        np.array([hK]), config, gamma=gamma, system=system)
    return dhat[0], bool(engaged[0])


def characteristic_limit(ubar, utilde, dubar, dirs, config: LimiterConfig, gamma, hK):
    """Characteristic-variable limiting for one cell (3 face directions).

    Transforms the midpoint differences by the left eigenvectors of the
    directional Jacobians, limits componentwise, and transforms back.
    """
    nv = ubar.size
    out = np.empty((3, nv))
    for i in range(3):
        st = euler.ConservedState(ubar[0], ubar[1:-1], ubar[-1])
        R, L, _ = euler.eigen_decomposition(st, dirs[i], euler.EosParams(gamma))
        a = L @ utilde[i]
        b = L @ dubar[i]
        lim = minmod_tvb(a, config.nu * b, M=config.M, dx=hK)
        out[i] = R @ lim
    return out


# ---------------------------------------------------------------------------
# positivity limiter (Zhang--Shu linear scaling about the cell average)

def positivity_limit(coeffs, basis, control_points, gamma, eps=EPS_POS):
    """Scale polynomials so rho and p stay >= eps at all control points.

    ``coeffs`` is (n_cells, n_modes, nvars) conserved modal data; the cell
    averages must already be physical, otherwise a fatal state error is
    raised.  Returns (coeffs', n_touched); idempotent.
    """
    C = np.asarray(coeffs, dtype=float)
    n, M, nv = C.shape
    phi = basis.eval(control_points)              # (nq, M)
    phi0 = float(phi[0, 0])
    ubar = C[:, 0, :] * phi0

    rho_bar = ubar[:, 0]
    p_bar = euler.pressure_arr(ubar, gamma)
    if np.any(rho_bar <= eps) or np.any(p_bar <= eps):
        bad = int(np.argmax((rho_bar <= eps) | (p_bar <= eps)))
        raise InvalidStateError(
            f"cell {bad} average is non-physical (rho={rho_bar[bad]}, p={p_bar[bad]})")

    out = C.copy()
    vals = np.einsum("qm,nmv->nqv", phi, out)
    rho_min = vals[..., 0].min(axis=1)
    need_rho = rho_min < eps
    if np.any(need_rho):
        den = np.where(need_rho, rho_bar - rho_min, 1.0)
        th = np.clip((rho_bar - eps) / den, 0.0, 1.0)
        out[need_rho, 1:, 0] *= th[need_rho, None]
        vals = np.einsum("qm,nmv->nqv", phi, out)

    p_min = euler.pressure_arr(vals, gamma).min(axis=1)
    need_p = p_min < eps
    if np.any(need_p):
        # pressure is concave in u, so the linear-bound scaling suffices
        den = np.where(need_p, p_bar - p_min, 1.0)
        th = np.clip(np.where(need_p, (p_bar - eps) / den, 1.0), 0.0, 1.0)
        out[need_p, 1:, :] *= th[need_p, None, None]
    return out, int(np.count_nonzero(need_rho | need_p))
