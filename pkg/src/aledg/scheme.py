"""Scheme driver: time-step control, the master loop, and analysis operators."""

from dataclasses import dataclass, field

import numpy as np

from . import cases, dg_basis, euler, limiter, mesh1d, motion, solver1d, systems
from .config import RunConfig
from .errors import InvalidStateError, MeshTanglingError, StepFailure

DT_FLOOR = 1e-13


@dataclass
class StepReport:
    step: int
    t: float
    dt: float
    limited: int = 0
    swaps: int = 0
    predictor_fallbacks: int = 0
    min_quality: float = 0.0
    max_quality: float = 0.0
    totals: np.ndarray = None
    smoothing: str = "none"


@dataclass
class RunResult:
    case: object
    config: RunConfig
    degree: int
    t: float
    steps: int
    mesh: object            # Mesh1D or SimplicialMesh
    coeffs: np.ndarray
    reports: list = field(default_factory=list)

    @property
    def dim(self):
        return 1 if isinstance(self.mesh, mesh1d.Mesh1D) else 2


def compute_dt_1d(mesh, C, degree, cfl, system, t_remaining=np.inf):
    """CFL bound cfl/(2k+1) * min h/lambda, capped by the orientation bound.

    lambda is |vbar - w|+c with the cell-average state against both face
    velocities, so a co-moving mesh sees only the acoustic speed.
    """
    ubar = solver1d.cell_averages(C, degree)
    wl, wr = mesh.w[:-1], mesh.w[1:]
    ones = np.ones(ubar.shape[:-1] + (1,))
    lam = np.maximum(system.max_signal(ubar, wl, ones),
                     system.max_signal(ubar, wr, ones))
    dt = cfl / (2.0 * degree + 1.0) * float(np.min(mesh.h / lam))
    dt = min(dt, mesh1d.max_timestep(mesh))
    return min(dt, t_remaining)


def project_ic_1d(case, x, degree):
    """Conserved-variable L2 projection of the initial condition."""
    basis = dg_basis.basis_for(1, degree)
    rule = dg_basis.quadrature_for(1, 2 * degree + 8)
    phi = basis.eval(rule.points)
    xl, xr = x[:-1], x[1:]
    xq = xl[:, None] + 0.5 * (rule.points[:, 0] + 1.0)[None, :] * (xr - xl)[:, None]
    rho, vel, p = case.ic(xq.reshape(-1, 1))
    U = euler.cons_arr(rho, vel, p, case.gamma).reshape(xq.shape + (-1,))
    return np.einsum("q,qm,nqv->nmv", rule.weights, phi, U)


def _vertex_velocities_1d(mesh, C, degree, system, cfg: RunConfig, rng):
    static = cfg.mesh_mode == "static"
    if static:
        return np.zeros_like(mesh.x)
    if cfg.vertex_velocity == "linearized_riemann" and system.name == "euler":
        tr = solver1d.face_traces(C, degree)
        rho, vel, p = euler.prim_arr(tr, system.gamma)
        rho = np.maximum(rho, 1e-16)
        p = np.maximum(p, 1e-16)
        c = np.sqrt(system.gamma * p / rho)
        w = mesh1d.riemann_vertex_velocity(mesh, rho, c, vel[..., 0], p)
    else:
        ub = solver1d.barycenter_values(C, degree)
        v = system.velocity(ub)[:, 0]
        w = mesh1d.average_vertex_velocity(mesh, v)
    if cfg.velocity_noise > 0.0:
        amp = cfg.velocity_noise * np.abs(w)
        w = w + amp * rng.uniform(-1.0, 1.0, size=w.shape)
        if mesh.periodic:
            w[-1] = w[0]
        if mesh.bc_left == "reflective":
            w[0] = 0.0
        if mesh.bc_right == "reflective":
            w[-1] = 0.0
    return w


def run_1d(case, cfg: RunConfig, callback=None, system=None):
    """Master loop in 1D: velocities, dt, step, limit, adapt, repeat."""
    cfg.validate()
    degree = cfg.degree
    n = cfg.n or case.default_n
    T = case.final_time if cfg.final_time < 0 else cfg.final_time
    x = np.linspace(case.domain[0], case.domain[1], n + 1)
    mesh = mesh1d.Mesh1D(x, bc_left=case.bc[0], bc_right=case.bc[1])
    if system is None:
        system = systems.EulerSystem(case.gamma, dim=1)
    C = project_ic_1d(case, mesh.x, degree)
    lim_cfg = cfg.limiter_config(1)
    fspec = cfg.flux_spec()
    rng = np.random.default_rng(cfg.seed)
    basis = dg_basis.basis_for(1, degree)
    pos_nodes = np.concatenate([dg_basis.quadrature_for(1, 2 * degree + 1).points,
                                [[-1.0], [1.0]]])

    if lim_cfg.kind != "none":
        C, _ = limiter.tvd_limit_1d(C, mesh, lim_cfg, gamma=case.gamma, system=system.name)
    if lim_cfg.positivity and system.name == "euler":
        C, _ = limiter.positivity_limit(C, basis, pos_nodes, case.gamma)

    # far-field ghost states for open boundaries, frozen at the IC; only for
    # cases whose boundary state provably stays at the IC for all t <= T
    ghost = (None, None)
    if system.name == "euler" and getattr(case, "farfield_ghost", False):
        ends = np.array([[case.domain[0]], [case.domain[1]]])
        rho, vel, p = case.ic(ends)
        Uff = euler.cons_arr(rho, vel, p, case.gamma)
        ghost = (Uff[0] if case.bc[0] in ("open", "closed") else None,
                 Uff[1] if case.bc[1] in ("open", "closed") else None)

    smooth_cfg = cfg.smoothing_config(1)
    t = 0.0
    reports = []
    step_idx = 0
    while t < T - 1e-12 and step_idx < cfg.max_steps:
        mesh.w = _vertex_velocities_1d(mesh, C, degree, system, cfg, rng)
        if smooth_cfg.kind == "laplacian" and cfg.mesh_mode == "moving":
            nv = mesh.x.size
            src = np.concatenate([np.arange(1, nv), np.arange(0, nv - 1)])
            dst = np.concatenate([np.arange(0, nv - 1), np.arange(1, nv)])
            dt_probe = compute_dt_1d(mesh, C, degree, cfg.cfl, system, T - t)
            mesh.w = motion.laplacian_smooth(mesh.x[:, None], mesh.w[:, None],
                                             (src, dst), dt_probe, smooth_cfg)[:, 0]
        dt = compute_dt_1d(mesh, C, degree, cfg.cfl, system, T - t)
        if not dt > DT_FLOOR:
            raise StepFailure(f"time step collapsed to {dt} at t={t}")
        # step with rejection: near-vacuum states can push a cell average out
        # of the physical set at the nominal CFL; halving dt restores it
        for attempt in range(7):
            try:
                xn, Cn, fallbacks = solver1d.step_1d(mesh.x, mesh.w, C, dt, system,
                                                     fspec, (mesh.bc_left, mesh.bc_right),
                                                     degree, ghost=ghost)
                n_lim = 0
                if lim_cfg.kind != "none":
                    mtmp = mesh1d.Mesh1D(xn, mesh.w, mesh.bc_left, mesh.bc_right)
                    Cn, n_lim = limiter.tvd_limit_1d(Cn, mtmp, lim_cfg, gamma=case.gamma,
                                                     system=system.name)
                if lim_cfg.positivity and system.name == "euler":
                    Cn, _ = limiter.positivity_limit(Cn, basis, pos_nodes, case.gamma)
                break
            except (InvalidStateError, MeshTanglingError):
                if attempt == 6:
                    raise StepFailure(f"step rejected 7 times at t={t}")
                dt *= 0.5
        C = Cn
        mesh = mesh1d.Mesh1D(xn, mesh.w, mesh.bc_left, mesh.bc_right)
        if cfg.h_min or cfg.h_max:
            h_min = cfg.h_min or 1e-12
            h_max = cfg.h_max or 1e12
            mesh, C = mesh1d.adapt(mesh, C, h_min, h_max, degree)
        t += dt
        step_idx += 1
        rep = StepReport(step=step_idx, t=t, dt=dt, limited=n_lim,
                         predictor_fallbacks=fallbacks,
                         totals=solver1d.totals(mesh.x, C, degree))
        reports.append(rep)
        if callback is not None:
            callback(step_idx, t, mesh, C, rep)
    return RunResult(case=case, config=cfg, degree=degree, t=t, steps=step_idx,
                     mesh=mesh, coeffs=C, reports=reports)


def run(case_or_name, cfg: RunConfig, callback=None):
    """Run a registered benchmark under the given configuration."""
    case = case_or_name
    if isinstance(case, str):
        case = cases.get_case(case, boost=cfg.boost)
    elif cfg.boost:
        case = cases.get_case(case.name, boost=cfg.boost)
    if case.dim == 1:
        return run_1d(case, cfg, callback=callback)
    from . import solver2d
    return solver2d.run_2d(case, cfg, callback=callback)


# ---------------------------------------------------------------------------
# dissipation analysis operator (uniform periodic 1D mesh, constant a and w)

def linear_dissipation_operator(n_cells, h, degree):
    """Assemble A with dU/dt = -(a - w) A U for upwind linear advection.

    The entries are the volume matrix d_{rs} = int phi_r' phi_s, the own-face
    product q_{rs} = phi_r(-1) phi_s(-1) and the neighbor coupling
    p_{rs} = phi_r(+1) phi_s(-1); the assembled operator is block-circulant
    and independent of a and w (they only scale it).
    """
    basis = dg_basis.basis_for(1, degree)
    M = basis.n_modes
    rule = dg_basis.quadrature_for(1, 2 * degree)
    phi = basis.eval(rule.points)
    dphi = basis.grad(rule.points)[:, :, 0]
    d = dphi.T @ (rule.weights[:, None] * phi)      # d[r, s]
    phi_l = basis.eval(np.array([[-1.0]]))[0]
    phi_r = basis.eval(np.array([[1.0]]))[0]
    q = np.outer(phi_l, phi_l)
    p = np.outer(phi_r, phi_l)
    diag = (2.0 / h) * (d + q).T
    sub = -(2.0 / h) * p.T
    A = np.zeros((n_cells * M, n_cells * M))
    for j in range(n_cells):
        A[j * M:(j + 1) * M, j * M:(j + 1) * M] = diag
        jm = (j - 1) % n_cells
        A[j * M:(j + 1) * M, jm * M:(jm + 1) * M] = sub
    return A


def predictor(C, h, dt, degree, system, w=None):
    """Space-time predictor coefficients at the time-quadrature nodes.

    Thin wrapper over the solver kernel for testing and analysis; returns
    (Ct, n_fallback_cells) with Ct shaped (n_time_nodes, n_cells, M, nvars).
    ``w`` optionally gives vertex velocities (default: static mesh).
    """
    tab = solver1d.tables_1d(degree)
    C = np.asarray(C, float)
    h = np.asarray(h, float)
    if w is None:
        w = np.zeros(C.shape[0] + 1)
    xi = tab["xi"]
    wq = 0.5 * (1.0 - xi)[None, :] * w[:-1, None] + 0.5 * (1.0 + xi)[None, :] * w[1:, None]
    return solver1d.predictor_coefficients(system, tab, C, h, np.diff(w), wq, dt, degree)
