"""Fully discrete ALE DG update and master loop on moving triangle meshes.

Same structure as the 1D kernel: reference-frame space-time predictor,
volume quadrature against the adjugate Jacobian of the moved cells, one
numerical flux per face scattered to both sides, then TVB limiting,
positivity, and the edge-swap adaptation pass.
"""

from functools import lru_cache

import numpy as np

from . import dg_basis, euler, limiter, mesh2d, motion, systems
from .errors import InvalidStateError, MeshTanglingError, StepFailure

DT_FLOOR = 1e-13


@lru_cache(maxsize=None)
def tables_2d(degree):
    basis = dg_basis.basis_for(2, degree)
    vol = dg_basis.quadrature_for(2, 2 * degree + 1)
    phi_v = basis.eval(vol.points)
    grad_v = basis.grad(vol.points)
    lam = np.column_stack([1.0 - vol.points[:, 0] - vol.points[:, 1],
                           vol.points[:, 0], vol.points[:, 1]])
    s, wf = dg_basis.face_quadrature(2 * degree + 1)
    phi_face = np.empty((3, 2, s.size, basis.n_modes))
    for lf in range(3):
        pts = dg_basis.tri_face_points(lf, s)
        pts_rev = dg_basis.tri_face_points(lf, 1.0 - s)
        phi_face[lf, 0] = basis.eval(pts)
        phi_face[lf, 1] = basis.eval(pts_rev)
    tnodes, twts = dg_basis.time_quadrature(min(max(degree, 1), 3))
    mids = np.array([[0.5, 0.5], [0.0, 0.5], [0.5, 0.0]])  # midpoint of face i
    phi_mid = basis.eval(mids)
    phi_bary = basis.eval(np.array([[1.0 / 3.0, 1.0 / 3.0]]))[0]
    pos_pts = np.concatenate([vol.points] + [dg_basis.tri_face_points(lf, s)
                                             for lf in range(3)])
    return dict(basis=basis, vol_pts=vol.points, wq=vol.weights, phi_v=phi_v,
                grad_v=grad_v, lam=lam, s=s, wf=wf, phi_face=phi_face,
                tnodes=tnodes, twts=twts, phi_mid=phi_mid, phi_bary=phi_bary,
                pos_pts=pos_pts)


def _cell_jacobians(verts, cells):
    v = verts[:, cells, :] if verts.ndim == 3 else verts[cells]
    e1 = v[..., 1, :] - v[..., 0, :]
    e2 = v[..., 2, :] - v[..., 0, :]
    det = e1[..., 0] * e2[..., 1] - e1[..., 1] * e2[..., 0]
    adj = np.empty(det.shape + (2, 2))
    adj[..., 0, 0] = e2[..., 1]
    adj[..., 0, 1] = -e2[..., 0]
    adj[..., 1, 0] = -e1[..., 1]
    adj[..., 1, 1] = e1[..., 0]
    return det, adj


def _stage_residual_2d(system, tab, C, adj_s, det_s, wq):
    """Projected ALE residual at frozen reference coordinates (one stage)."""
    U = np.einsum("qm,nmv->nqv", tab["phi_v"], C)
    dUdxi = np.einsum("qme,nmv->nqve", tab["grad_v"], C)
    inv = adj_s / det_s[:, None, None]
    dUdx = np.einsum("nqve,ned->nqvd", dUdxi, inv)
    ok = np.all(system.is_valid(U), axis=1)
    rhs = (wq[..., 0:1] * dUdx[..., 0] + wq[..., 1:2] * dUdx[..., 1]
           - system.flux_div(U, dUdx[..., 0], dUdx[..., 1]))
    K = np.einsum("q,qm,nqv->nmv", tab["wq"], tab["phi_v"], rhs)
    return K, ok


def predictor_2d(system, tab, C, geom_at, wq, dt, degree):
    """CERK/Taylor predictor sampled at the time nodes; ALE reference frame.

    ``geom_at(tau)`` returns (det, adj) of the cell Jacobians at stage time
    tau (linear vertex motion).  Returns (Ct, n_fallback).
    """
    theta = tab["tnodes"]
    det0, adj0 = geom_at(0.0)
    K1, ok = _stage_residual_2d(system, tab, C, adj0, det0, wq)
    taylor = C[None] + (theta[:, None, None, None] * dt) * K1[None]
    if degree <= 1:
        return taylor, 0
    bad = ~ok
    if degree == 2:
        det1, adj1 = geom_at(dt)
        K2, ok2 = _stage_residual_2d(system, tab, C + dt * K1, adj1, det1, wq)
        bad |= ~ok2
        b1 = theta - 0.5 * theta ** 2
        b2 = 0.5 * theta ** 2
        Ct = C[None] + dt * (b1[:, None, None, None] * K1[None]
                             + b2[:, None, None, None] * K2[None])
    else:
        deth, adjh = geom_at(0.5 * dt)
        det1, adj1 = geom_at(dt)
        K2, ok2 = _stage_residual_2d(system, tab, C + 0.5 * dt * K1, adjh, deth, wq)
        K3, ok3 = _stage_residual_2d(system, tab, C + 0.5 * dt * K2, adjh, deth, wq)
        K4, ok4 = _stage_residual_2d(system, tab, C + dt * K3, adj1, det1, wq)
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


def step_2d(mesh, C, dt, system, fspec, degree, ghost_state=None):
    """One fully discrete step on the moving mesh; returns (C', fallbacks).

    The mesh object is advanced in place (vertices moved by dt).
    """
    tab = tables_2d(degree)
    theta, twts = tab["tnodes"], tab["twts"]
    ng = theta.size
    nc = mesh.n_cells
    nv = C.shape[2]
    verts0 = mesh.verts
    vels = mesh.vels
    cells = mesh.cells

    det0, _ = _cell_jacobians(verts0, cells)
    verts1 = verts0 + dt * vels
    det1, _ = _cell_jacobians(verts1, cells)
    if np.any(det1 <= 0.0):
        raise MeshTanglingError("dt inverts a cell; orientation bound violated")

    wq = np.einsum("qj,njd->nqd", tab["lam"], vels[cells])

    def geom_at(tau):
        return _cell_jacobians(verts0 + tau * vels, cells)

    Ct, fallbacks = predictor_2d(system, tab, C, geom_at, wq, dt, degree)

    # --- volume term -----------------------------------------------------
    verts_g = verts0[None] + (theta[:, None, None] * dt) * vels[None]
    det_g, adj_g = _cell_jacobians(verts_g, cells)
    U = np.einsum("qm,gnmv->gnqv", tab["phi_v"], Ct)
    FT = system.flux_tensor(U)
    G = FT - U[..., None] * wq[None, :, :, None, :]
    # grad_x phi . G = (grad_xi phi . J^{-1}) . G with adj = det J^{-1}
    Ghat = np.einsum("gnqvd,gned->gnqve", G, adj_g)
    vol = dt * np.einsum("g,q,gnqve,qme->nmv", twts, tab["wq"], Ghat, tab["grad_v"])

    # --- face term ---------------------------------------------------------
    faces = mesh.faces
    fc = mesh.face_cells
    nf = len(faces)
    s = tab["s"]
    nfq = s.size
    pa = verts_g[:, faces[:, 0]]
    pb = verts_g[:, faces[:, 1]]
    tang = pb - pa
    length = np.linalg.norm(tang, axis=-1)
    nrm = np.stack([tang[..., 1], -tang[..., 0]], axis=-1) / length[..., None]
    wfp = (vels[faces[:, 0]][:, None, :] * (1.0 - s)[None, :, None]
           + vels[faces[:, 1]][:, None, :] * s[None, :, None])       # (nf,nfq,2)
    wn = np.einsum("gfd,fqd->gfq", nrm, wfp)

    # left/right local-face bookkeeping
    lf_of = np.full((nf, 2), -1, dtype=np.int64)
    for lf in range(3):
        f_ids = mesh.cell_faces[:, lf]
        sides = np.where(mesh.cell_signs[:, lf] > 0, 0, 1)
        valid = f_ids >= 0
        lf_of[f_ids[valid], sides[valid]] = lf

    UL = np.empty((ng, nf, nfq, nv))
    UR = np.empty((ng, nf, nfq, nv))
    for lf in range(3):
        selL = (lf_of[:, 0] == lf)
        if np.any(selL):
            UL[:, selL] = np.einsum("qm,gnmv->gnqv", tab["phi_face"][lf, 0],
                                    Ct[:, fc[selL, 0]])
        selR = (lf_of[:, 1] == lf) & (fc[:, 1] >= 0)
        if np.any(selR):
            UR[:, selR] = np.einsum("qm,gnmv->gnqv", tab["phi_face"][lf, 1],
                                    Ct[:, fc[selR, 1]])

    # boundary ghosts
    interior = mesh.face_tag == "interior"
    periodic = mesh.face_tag == "periodic"
    partner_left = np.full(nf, -1, dtype=np.int64)
    for f in np.nonzero(periodic)[0]:
        fp = mesh.face_partner[f]
        lfp = lf_of[fp, 0]
        cp = fc[fp, 0]
        drc = 0 if mesh.partner_aligned[f] else 1
        UR[:, f] = np.einsum("qm,gmv->gqv", tab["phi_face"][lfp, drc], Ct[:, cp])
        partner_left[f] = cp
    open_like = (mesh.face_tag == "open") | (mesh.face_tag == "closed")
    if np.any(open_like):
        if ghost_state is not None:
            UR[:, open_like] = ghost_state
        else:
            UR[:, open_like] = UL[:, open_like]
    refl = mesh.face_tag == "reflective"
    if np.any(refl):
        Ub = UL[:, refl]
        nb = nrm[:, refl][:, :, None, :]
        mom = Ub[..., 1:3]
        Ub = Ub.copy()
        Ub[..., 1:3] = mom - 2.0 * np.sum(mom * nb, axis=-1, keepdims=True) * nb
        UR[:, refl] = Ub

    H = system.numerical_flux(UL, UR, wn, nrm[:, :, None, :], fspec)

    # periodic partners reuse the pair's flux; drop their own face rows
    skip = np.zeros(nf, dtype=bool)
    for f in np.nonzero(periodic)[0]:
        fp = mesh.face_partner[f]
        if fp < f:
            skip[f] = True

    # scatter: left cells get -H, right cells +H against their own traces
    face_rhs = np.zeros((nc, tab["basis"].n_modes, nv))
    wgt = twts[:, None, None] * length[..., None] * tab["wf"][None, None, :]
    for side, sign in ((0, -1.0), (1, +1.0)):
        for lf in range(3):
            if side == 0:
                sel = (lf_of[:, 0] == lf) & ~skip
                cids = fc[sel, 0]
                Hsel = H[:, sel]
                Wsel = wgt[:, sel]
                tabsel = tab["phi_face"][lf, 0]
            else:
                sel = (lf_of[:, 1] == lf) & (fc[:, 1] >= 0) & ~skip
                cids = fc[sel, 1]
                Hsel = H[:, sel]
                Wsel = wgt[:, sel]
                tabsel = tab["phi_face"][lf, 1]
            if not len(cids):
                continue
            contrib = sign * dt * np.einsum("gfq,gfqv,qm->fmv", Wsel, Hsel, tabsel)
            np.add.at(face_rhs, cids, contrib)
    # periodic: the skipped partner's cell receives +H through its own tables
    for f in np.nonzero(periodic & ~skip)[0]:
        fp = mesh.face_partner[f]
        cp = fc[fp, 0]
        lfp = lf_of[fp, 0]
        drc = 0 if mesh.partner_aligned[f] else 1
        contrib = dt * np.einsum("gq,gqv,qm->mv", wgt[:, f], H[:, f],
                                 tab["phi_face"][lfp, drc])
        face_rhs[cp] += contrib

    C_new = (det0[:, None, None] * C + vol + face_rhs) / det1[:, None, None]
    mesh.verts = verts1
    return C_new, fallbacks


# ---------------------------------------------------------------------------
# limiting on the triangle mesh

def limit_2d(mesh, C, lim_cfg, gamma, tab=None):
    """TVB limiting of the linear part with ghost/periodic patch assembly."""
    if lim_cfg.kind == "none":
        return C, 0
    degree = {3: 1, 6: 2, 10: 3}[C.shape[1]]
    if tab is None:
        tab = tables_2d(degree)
    nc = mesh.n_cells
    nv = C.shape[2]
    # mode 0 is constant: average = c0 * phi_0
    phi0 = float(tab["basis"].eval(np.zeros((1, 2)))[0, 0])
    ubar = C[:, 0, :] * phi0
    umid = np.einsum("fm,nmv->nfv", tab["phi_mid"][:, :3], C[:, :3, :])
    v = mesh.verts[mesh.cells]
    bc = v.mean(axis=1)
    mids = np.stack([0.5 * (v[:, 1] + v[:, 2]),
                     0.5 * (v[:, 2] + v[:, 0]),
                     0.5 * (v[:, 0] + v[:, 1])], axis=1)
    hK = np.maximum.reduce([np.linalg.norm(v[:, 1] - v[:, 0], axis=1),
                            np.linalg.norm(v[:, 2] - v[:, 1], axis=1),
                            np.linalg.norm(v[:, 0] - v[:, 2], axis=1)])

    nb_bary = np.empty((nc, 3, 2))
    nb_ubar = np.empty((nc, 3, nv))
    fids = mesh.cell_faces
    signs = mesh.cell_signs
    other = np.where(signs > 0, mesh.face_cells[fids, 1], mesh.face_cells[fids, 0])
    tagm = mesh.face_tag[fids]
    inter = tagm == "interior"
    nb_bary[inter] = bc[other[inter]]
    nb_ubar[inter] = ubar[other[inter]]
    per = tagm == "periodic"
    if np.any(per):
        pf = mesh.face_partner[fids[per]]
        pcell = mesh.face_cells[pf, 0]
        nb_bary[per] = bc[pcell] - mesh.partner_offset[fids[per]]
        nb_ubar[per] = ubar[pcell]
    ghost = ~inter & ~per
    if np.any(ghost):
        ci, fi = np.nonzero(ghost)
        d = mids[ci, fi] - bc[ci]
        nb_bary[ghost] = bc[ci] + 2.0 * d
        nb_ubar[ghost] = ubar[ci]

    dhat, engaged, fallback = limiter.tvb_limit_2d_all(
        ubar, umid, bc, mids, nb_bary, nb_ubar, hK, lim_cfg, gamma=gamma)
    idx = np.nonzero(engaged | fallback)[0]
    if idx.size == 0:
        return C, 0
    # rebuild the limited linear polynomial via the midpoint-cardinal basis
    A = np.concatenate([np.ones((idx.size, 3, 1)), mids[idx]], axis=2)
    coef = np.linalg.inv(A)                       # columns solve A a = e_i
    lam = tab["lam"]
    xq = np.einsum("qj,njd->nqd", lam, v[idx])    # physical volume points
    P1 = np.concatenate([np.ones(xq.shape[:2] + (1,)), xq], axis=2)
    psi = np.einsum("nqe,nei->nqi", P1, coef)     # (n, q, 3) cardinal values
    vals = ubar[idx][:, None, :] + np.einsum("nqi,niv->nqv", psi, dhat[idx])
    Cnew = C.copy()
    proj = np.einsum("q,qm,nqv->nmv", tab["wq"], tab["phi_v"], vals)
    Cnew[idx] = 0.0
    Cnew[idx, :proj.shape[1]] = proj
    return Cnew, int(idx.size)


# ---------------------------------------------------------------------------
# master loop

def vertex_fluid_velocities(mesh, C, system, tab):
    """Average of incident-cell barycenter fluid velocities per vertex."""
    ub = np.einsum("m,nmv->nv", tab["phi_bary"], C)
    vcell = system.velocity(ub)
    rho = ub[..., 0]
    bad = ~(rho > 0)
    if np.any(bad):
        vcell = vcell.copy()
        vcell[bad] = 0.0
    sums = np.zeros((mesh.n_verts, 2))
    counts = np.zeros(mesh.n_verts)
    vid = np.repeat(np.arange(mesh.n_verts), np.diff(mesh.vc_ptr))
    np.add.at(sums, vid, vcell[mesh.vc_cells])
    np.add.at(counts, vid, 1.0)
    w = sums / np.maximum(counts, 1.0)[:, None]
    return w


def compute_dt_2d(mesh, C, degree, cfl, system, t_remaining=np.inf):
    tab = tables_2d(degree)
    phi0 = float(tab["basis"].eval(np.zeros((1, 2)))[0, 0])
    ubar = C[:, 0, :] * phi0
    wv = mesh.vels[mesh.cells]                    # (nc, 3, 2)
    lam = np.zeros(mesh.n_cells)
    for j in range(3):
        # signal speed against each vertex velocity, direction-free bound
        rho = np.maximum(ubar[:, 0], 1e-16)
        p = np.maximum(euler.pressure_arr(ubar, system.gamma), 1e-16) \
            if system.name == "euler" else None
        if system.name == "euler":
            vel = ubar[:, 1:3] / rho[:, None]
            c = np.sqrt(system.gamma * p / rho)
            lam = np.maximum(lam, np.linalg.norm(vel - wv[:, j], axis=1) + c)
        else:
            lam = np.maximum(lam, np.linalg.norm(system.a[None, :] - wv[:, j], axis=1))
    h = mesh.h_cells()
    dt = cfl / (2.0 * degree + 1.0) * float(np.min(h / np.maximum(lam, 1e-14)))
    dt = min(dt, mesh2d.max_timestep_orientation(mesh))
    return min(dt, t_remaining)


def build_mesh_for(case, cfg):
    bc = case.bc
    if cfg.mesh_file:
        return mesh2d.read_mesh(cfg.mesh_file)
    n = cfg.n or case.default_n
    (x0, x1), (y0, y1) = case.domain
    if cfg.ny:
        ny = cfg.ny
    else:
        aspect = (y1 - y0) / (x1 - x0)
        ny = max(1, int(round(n * aspect)))
    if getattr(cfg, "unstructured", False):
        return mesh2d.delaunay_mesh(n, ny, case.domain, bc=bc, seed=cfg.seed)
    return mesh2d.structured_mesh(n, ny, case.domain, bc=bc)


def project_ic_2d(case, mesh, degree):
    basis = dg_basis.basis_for(2, degree)
    rule = dg_basis.quadrature_for(2, 2 * degree + 6)
    phi = basis.eval(rule.points)
    lam = np.column_stack([1.0 - rule.points[:, 0] - rule.points[:, 1],
                           rule.points[:, 0], rule.points[:, 1]])
    v = mesh.verts[mesh.cells]
    xq = np.einsum("qj,njd->nqd", lam, v)
    rho, vel, p = case.ic(xq.reshape(-1, 2))
    U = euler.cons_arr(rho, vel, p, case.gamma).reshape(xq.shape[:2] + (-1,))
    C = np.einsum("q,qm,nqv->nmv", rule.weights, phi, U)
    if case.ic_kind == "sedov":
        # floor state everywhere, blast energy in the cell nearest the center
        bary = mesh.barycenters()
        center = np.array([0.0, 0.0])
        i = int(np.argmin(np.linalg.norm(bary - center, axis=1)))
        area = float(np.abs(mesh.areas()[i]))
        from .cases import SEDOV_E0
        phi0 = float(basis.eval(np.zeros((1, 2)))[0, 0])
        C[i, 1:, :] = 0.0
        C[i, 0, 3] = (SEDOV_E0 / area) / phi0
    return C


def run_2d(case, cfg, callback=None, system=None):
    """2D master loop: velocities, smoothing, dt, step, limit, swap."""
    from .scheme import RunResult, StepReport  # shared containers
    cfg.validate()
    degree = cfg.degree
    T = case.final_time if cfg.final_time < 0 else cfg.final_time
    mesh = build_mesh_for(case, cfg)
    if system is None:
        system = systems.EulerSystem(case.gamma, dim=2)
    tab = tables_2d(degree)
    C = project_ic_2d(case, mesh, degree)
    lim_cfg = cfg.limiter_config(2)
    fspec = cfg.flux_spec()
    smooth_cfg = cfg.smoothing_config(2)
    swaps_on = cfg.swaps_enabled(2)
    rng = np.random.default_rng(cfg.seed)
    basis = tab["basis"]

    if lim_cfg.kind != "none":
        C, _ = limit_2d(mesh, C, lim_cfg, case.gamma, tab)
    if lim_cfg.positivity and system.name == "euler":
        C, _ = limiter.positivity_limit(C, basis, tab["pos_pts"], case.gamma)

    t = 0.0
    reports = []
    step_idx = 0
    while t < T - 1e-12 and step_idx < cfg.max_steps:
        if cfg.mesh_mode == "moving":
            w = vertex_fluid_velocities(mesh, C, system, tab)
            if cfg.velocity_noise > 0.0:
                w = w + cfg.velocity_noise * np.abs(w) * rng.uniform(-1, 1, w.shape)
            mesh.vels = mesh2d.apply_boundary_velocities(mesh, w)
            q = mesh.cell_quality()
            if smooth_cfg.kind != "none":
                project = lambda ww: mesh2d.apply_boundary_velocities(mesh, ww)
                dt_probe = compute_dt_2d(mesh, C, degree, cfg.cfl, system, T - t)
                def neighbor_of(cell_ids, vert_ids):
                    loc = np.argmax(mesh.cells[cell_ids] == vert_ids[:, None], axis=1)
                    f = mesh.cell_faces[cell_ids, loc]
                    left = mesh.cell_signs[cell_ids, loc] > 0
                    return np.where(left, mesh.face_cells[f, 1], mesh.face_cells[f, 0])

                dispatch = {
                    "laplacian": lambda ww: motion.laplacian_smooth(
                        mesh.verts, ww, (mesh.adj_src, mesh.adj_dst),
                        max(dt_probe, DT_FLOOR), smooth_cfg, project_bc=project),
                    "variable_diffusivity": lambda ww: motion.variable_diffusivity_smooth(
                        motion.DiffusionStencil(
                            mesh.verts, mesh.cells, _vertex_cells_list(mesh),
                            np.abs(mesh.areas()), smooth_cfg, neighbor_of=neighbor_of),
                        ww, smooth_cfg, project_bc=project),
                }
                wnew, used = motion.smooth(dispatch, mesh.vels, float(q.max()), smooth_cfg)
                mesh.vels = mesh2d.apply_boundary_velocities(mesh, wnew)
            else:
                used = "none"
        else:
            mesh.vels = np.zeros_like(mesh.verts)
            used = "none"
        dt = compute_dt_2d(mesh, C, degree, cfg.cfl, system, T - t)
        if not dt > DT_FLOOR:
            raise StepFailure(f"time step collapsed to {dt} at t={t}")
        for attempt in range(7):
            try:
                mesh_try = mesh
                verts_save = mesh.verts.copy()
                Cn, fallbacks = step_2d(mesh_try, C, dt, system, fspec, degree)
                n_lim = 0
                if lim_cfg.kind != "none":
                    Cn, n_lim = limit_2d(mesh_try, Cn, lim_cfg, case.gamma, tab)
                if lim_cfg.positivity and system.name == "euler":
                    Cn, _ = limiter.positivity_limit(Cn, basis, tab["pos_pts"], case.gamma)
                break
            except (InvalidStateError, MeshTanglingError):
                mesh.verts = verts_save
                if attempt == 6:
                    raise StepFailure(f"step rejected 7 times at t={t}")
                dt *= 0.5
        C = Cn
        nswaps = 0
        if swaps_on:
            nswaps = mesh2d.swap_pass(mesh, C, basis, cfg.quality_threshold,
                                      cfg.swap_hysteresis)
        t += dt
        step_idx += 1
        q = mesh.cell_quality()
        rep = StepReport(step=step_idx, t=t, dt=dt, limited=n_lim, swaps=nswaps,
                         predictor_fallbacks=fallbacks,
                         min_quality=float(q.min()), max_quality=float(q.max()),
                         totals=totals_2d(mesh, C), smoothing=used)
        reports.append(rep)
        if callback is not None:
            callback(step_idx, t, mesh, C, rep)
    return RunResult(case=case, config=cfg, degree=degree, t=t, steps=step_idx,
                     mesh=mesh, coeffs=C, reports=reports)


def _vertex_cells_list(mesh):
    return [mesh.vc_cells[mesh.vc_ptr[i]:mesh.vc_ptr[i + 1]]
            for i in range(mesh.n_verts)]


def cell_averages_2d(C, degree):
    basis = dg_basis.basis_for(2, degree)
    phi0 = float(basis.eval(np.zeros((1, 2)))[0, 0])
    return C[:, 0, :] * phi0


def totals_2d(mesh, C):
    degree = {3: 1, 6: 2, 10: 3}[C.shape[1]]
    ar = np.abs(mesh.areas())
    return (ar[:, None] * cell_averages_2d(C, degree)).sum(axis=0)


def error_norm_2d(mesh, C, degree, case, t, norm="L2", variable="rho"):
    """Quadrature norm of (numerical - reference) over the current mesh."""
    rule = dg_basis.quadrature_for(2, 2 * degree + 2)
    basis = dg_basis.basis_for(2, degree)
    phi = basis.eval(rule.points)
    lam = np.column_stack([1.0 - rule.points[:, 0] - rule.points[:, 1],
                           rule.points[:, 0], rule.points[:, 1]])
    v = mesh.verts[mesh.cells]
    xq = np.einsum("qj,njd->nqd", lam, v)
    U = np.einsum("qm,nmv->nqv", phi, C)
    from .cases import reference_solution
    rho, vel, p = reference_solution(case, xq.reshape(-1, 2), t)
    if variable == "rho":
        diff = U[..., 0] - rho.reshape(xq.shape[:2])
    elif variable == "p":
        diff = euler.pressure_arr(U, case.gamma) - p.reshape(xq.shape[:2])
    else:
        raise InvalidStateError(f"unknown error variable {variable!r}")
    jac = np.abs(_cell_jacobians(mesh.verts, mesh.cells)[0])
    if norm == "Linf":
        return float(np.abs(diff).max())
    if norm == "L1":
        return float(np.sum(jac[:, None] * rule.weights[None, :] * np.abs(diff)))
    return float(np.sqrt(np.sum(jac[:, None] * rule.weights[None, :] * diff ** 2)))
