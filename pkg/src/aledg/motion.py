"""Mesh-velocity smoothing: Laplacian sweeps and variable-diffusivity relaxation.

Both smoothers only modify velocities, never topology or positions.  The
driver dispatches to the variable-diffusivity method normally and falls
back to Laplacian smoothing when the worst cell quality crosses a
threshold, which is more robust on badly distorted meshes.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class SmoothingConfig:
    kind: str = "none"            # none | laplacian | variable_diffusivity
    alpha: float = 0.5
    nsmooth: int = 4
    eps0: float = 0.05
    delta_l: float = 0.2
    delta_u: float = 0.8
    iterations: int = 10
    fallback_quality: float = 0.4

    def __post_init__(self):
        if self.kind not in ("none", "laplacian", "variable_diffusivity"):
            raise ConfigError(f"unknown smoothing kind {self.kind!r}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigError("alpha must lie in [0, 1]")
        if self.nsmooth < 0 or self.iterations < 0:
            raise ConfigError("iteration counts must be >= 0")
        if not 0.0 < self.eps0 <= 1.0:
            raise ConfigError("eps0 must lie in (0, 1]")
        if not 0.0 < self.delta_l < self.delta_u < 1.0:
            raise ConfigError("need 0 < delta_l < delta_u < 1")


def diffusivity(delta, config: SmoothingConfig):
    """Clamped ramp eps(delta) between eps0 and 1."""
    t = (np.asarray(delta, dtype=float) - config.delta_l) / (config.delta_u - config.delta_l)
    return config.eps0 + (1.0 - config.eps0) * np.clip(t, 0.0, 1.0)


def laplacian_smooth(positions, velocities, adjacency, dt, config: SmoothingConfig,
                     project_bc=None):
    """nsmooth sweeps of provisional-move / neighbor-centroid blending.

    ``adjacency`` is (edge_src, edge_dst) flat index arrays covering every
    directed vertex-neighbor pair.  Each sweep moves every vertex by its
    current velocity, averages the moved neighbor positions, and blends
    w <- alpha w + (1-alpha)(X - x_n)/dt; uniform velocity fields on
    centroidal meshes are fixed points.  ``project_bc`` re-imposes boundary
    velocities after each sweep.
    """
    if dt <= 0:
        raise ConfigError("laplacian smoothing needs dt > 0")
    x = np.asarray(positions, dtype=float)
    w = np.asarray(velocities, dtype=float).copy()
    src, dst = adjacency
    counts = np.zeros(len(x))
    np.add.at(counts, src, 1.0)
    counts = np.maximum(counts, 1.0)
    for _ in range(config.nsmooth):
        xp = x + dt * w
        X = np.zeros_like(xp)
        np.add.at(X, src, xp[dst])
        X /= counts[:, None] if x.ndim > 1 else counts
        w = config.alpha * w + (1.0 - config.alpha) * (X - x) / dt
        if project_bc is not None:
            w = project_bc(w)
    return w


class DiffusionStencil:
    """Precomputed patch-boundary flux stencil for one mesh geometry.

    For every (vertex i, incident cell) pair the patch-boundary face is the
    cell edge opposite i; the normal gradient averages the one-sided
    differences vertex -> face midpoint and face midpoint -> opposite-cell
    centroid.  Geometry (and the per-face diffusivity) is frozen at
    construction; only velocities change during relaxation.
    """

    def __init__(self, positions, cells, vertex_cells, cell_areas,
                 config: SmoothingConfig, neighbor_of=None):
        x = np.asarray(positions, dtype=float)
        cells = np.asarray(cells, dtype=int)
        rows_i, rows_c = [], []
        for i, cids in enumerate(vertex_cells):
            for c in cids:
                rows_i.append(i)
                rows_c.append(c)
        self.vi = np.asarray(rows_i, dtype=int)
        vc = np.asarray(rows_c, dtype=int)
        tri = cells[vc]                              # (npairs, 3)
        is_i = tri == self.vi[:, None]
        others = tri[~is_i].reshape(-1, 2)
        self.p = others[:, 0]
        self.q = others[:, 1]
        m = 0.5 * (x[self.p] + x[self.q])
        e = x[self.q] - x[self.p]
        lf = np.linalg.norm(e, axis=1)
        nu = np.stack([e[:, 1], -e[:, 0]], axis=1) / lf[:, None]
        d1 = m - x[self.vi]
        flip = np.sum(nu * d1, axis=1) < 0
        nu[flip] = -nu[flip]
        l1 = np.linalg.norm(d1, axis=1)
        self.a1 = np.sum(d1 * nu, axis=1) / np.maximum(l1, 1e-300) ** 2
        # opposite cell centroid across the patch-boundary face, when any
        if neighbor_of is not None:
            nb = neighbor_of(vc, self.vi)
            has_nb = nb >= 0
            self.tri2 = np.where(has_nb[:, None], cells[np.maximum(nb, 0)], tri)
        else:
            self.tri2 = tri
            has_nb = np.zeros(len(vc), dtype=bool)
        centroid2 = x[self.tri2].mean(axis=1)
        d2 = centroid2 - m
        l2 = np.linalg.norm(d2, axis=1)
        a2 = np.sum(d2 * nu, axis=1) / np.maximum(l2, 1e-300) ** 2
        self.a2 = np.where(has_nb & (l2 > 1e-300), a2, 0.0)
        lip = np.linalg.norm(x[self.p] - x[self.vi], axis=1)
        liq = np.linalg.norm(x[self.q] - x[self.vi], axis=1)
        delta = lf / np.maximum(lf, np.maximum(lip, liq))
        self.coef = diffusivity(delta, config) * lf
        self.patch_area = np.zeros(len(x))
        np.add.at(self.patch_area, self.vi, np.asarray(cell_areas, dtype=float)[vc])
        self.patch_area = np.maximum(self.patch_area, 1e-300)
        # diagonal coefficient of w_i inside the flux sum (the a1 half)
        self.diag = np.zeros(len(x))
        np.add.at(self.diag, self.vi, 0.5 * self.coef * self.a1)
        self.n_verts = len(x)

    def offdiag(self, w):
        """Flux sum with the w_i (diagonal) part removed."""
        wm = 0.5 * (w[self.p] + w[self.q])
        wc2 = (w[self.tri2[:, 0]] + w[self.tri2[:, 1]] + w[self.tri2[:, 2]]) / 3.0
        g = 0.5 * wm * self.a1[:, None] + 0.5 * (wc2 - wm) * self.a2[:, None]
        flux = np.zeros((self.n_verts, w.shape[1]))
        np.add.at(flux, self.vi, self.coef[:, None] * g)
        return flux


def variable_diffusivity_smooth(stencil: DiffusionStencil, velocities,
                                config: SmoothingConfig, project_bc=None):
    """Diagonally scaled Jacobi relaxation of -div(eps grad w) + w = w0.

    The diagonal of the discrete operator is folded into the update so the
    iteration contracts even when the diffusivity dominates the cell size;
    uniform velocity fields are exact fixed points.
    """
    w0 = np.asarray(velocities, dtype=float)
    w = w0.copy()
    A = stencil.patch_area[:, None]
    D = stencil.diag[:, None]
    for _ in range(config.iterations):
        w = (w0 * A + stencil.offdiag(w)) / (A + D)
        if project_bc is not None:
            w = project_bc(w)
    return w


def smooth(kind_dispatch, raw_velocities, max_quality, config: SmoothingConfig):
    """Dispatch between smoothing paths; Laplacian is the poor-quality fallback.

    ``kind_dispatch`` maps kind -> callable(velocities).  Returns
    (velocities', kind_used).
    """
    if config.kind == "none":
        return raw_velocities, "none"
    kind = config.kind
    if kind == "variable_diffusivity" and max_quality > config.fallback_quality:
        kind = "laplacian"
    return kind_dispatch[kind](raw_velocities), kind
