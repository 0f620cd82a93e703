"""Oriented simplicial meshes in 2D.

Connectivity is face-based: every face knows its left cell (the one whose
counterclockwise traversal contains the face's vertex order) and, for
interior faces, its right cell.  Periodic boundaries keep physical clone
vertices; clone groups share velocities and the paired faces exchange
traces during flux assembly.  Edge swapping and the conservative local
solution transfer operate on the interpolation-region decomposition of the
two-triangle quadrilateral.
"""

from dataclasses import dataclass, field

import numpy as np

from . import dg_basis
from .errors import (ConfigError, DecompositionError, InvalidStateError,
                     MeshTanglingError)

BOUNDARY_TAGS = ("open", "reflective", "periodic", "closed")
ORIENT_SAFETY = 0.1
SWAP_HYSTERESIS = 0.05

# face i of a cell is opposite local vertex i
_LOCAL_FACES = ((1, 2), (2, 0), (0, 1))


def orientation_det(verts):
    """Signed double area of a vertex triple (positive = counterclockwise)."""
    v = np.asarray(verts, dtype=float)
    e1 = v[..., 1, :] - v[..., 0, :]
    e2 = v[..., 2, :] - v[..., 1, :]
    return e1[..., 0] * e2[..., 1] - e1[..., 1] * e2[..., 0]


def signed_areas(verts, cells):
    v = verts[cells]
    e1 = v[:, 1] - v[:, 0]
    e2 = v[:, 2] - v[:, 0]
    return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])


def barycentric_velocity(cell_verts, cell_vels, point):
    """Velocity at a point inside one cell by barycentric interpolation."""
    v = np.asarray(cell_verts, dtype=float)
    T = np.column_stack([v[1] - v[0], v[2] - v[0]])
    lam12 = np.linalg.solve(T, np.asarray(point, dtype=float) - v[0])
    lam = np.array([1.0 - lam12.sum(), lam12[0], lam12[1]])
    return lam @ np.asarray(cell_vels, dtype=float)


def quality(verts, cells=None):
    """Shape quality: 0 for equilateral, growing with distortion.

    Normalized as (sum of squared side lengths)/(4 sqrt(3) area) - 1, which
    is scale- and rotation-invariant and exactly zero for 60-60-60.
    """
    if cells is not None:
        v = np.asarray(verts, dtype=float)[np.asarray(cells, dtype=int)]
    else:
        v = np.asarray(verts, dtype=float)
        if v.ndim == 2:
            v = v[None]
    s2 = ((v[:, 1] - v[:, 0]) ** 2).sum(-1) \
        + ((v[:, 2] - v[:, 1]) ** 2).sum(-1) \
        + ((v[:, 0] - v[:, 2]) ** 2).sum(-1)
    area = 0.5 * np.abs((v[:, 1, 0] - v[:, 0, 0]) * (v[:, 2, 1] - v[:, 0, 1])
                        - (v[:, 1, 1] - v[:, 0, 1]) * (v[:, 2, 0] - v[:, 0, 0]))
    if np.any(area <= 0):
        raise InvalidStateError("degenerate cell in quality evaluation")
    q = s2 / (4.0 * np.sqrt(3.0) * area) - 1.0
    return q if cells is not None or q.size > 1 else float(q[0])


class SimplicialMesh:
    """Moving triangle mesh with boundary tags and periodic clone groups."""

    def __init__(self, verts, cells, boundary_edges, vels=None):
        """``boundary_edges`` maps a sorted vertex pair to (tag, partner pair).

        ``partner pair`` is None except for periodic faces where it names
        the sorted vertex pair of the paired face on the opposite side.
        """
        self.verts = np.asarray(verts, dtype=float).copy()
        self.vels = (np.zeros_like(self.verts) if vels is None
                     else np.asarray(vels, dtype=float).copy())
        self.cells = np.asarray(cells, dtype=np.int64).copy()
        if np.any(signed_areas(self.verts, self.cells) <= 0.0):
            raise MeshTanglingError("mesh has non-positively oriented cells")
        self.boundary_edges = dict(boundary_edges)
        self._periodic_groups()
        self.rebuild_topology()

    # -- construction helpers ------------------------------------------

    def _periodic_groups(self):
        parent = {}

        def find(i):
            while parent.get(i, i) != i:
                parent[i] = parent.get(parent[i], parent[i])
                i = parent[i]
            return i

        def union(i, j):
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)

        for edge, (tag, partner) in self.boundary_edges.items():
            if tag != "periodic" or partner is None:
                continue
            (a, b), (c, d) = edge, partner
            # match endpoints by translated coordinates
            off = (self.verts[list(partner)].mean(axis=0)
                   - self.verts[list(edge)].mean(axis=0))
            for va in (a, b):
                target = self.verts[va] + off
                vc = c if np.allclose(self.verts[c], target, atol=1e-9) else d
                union(va, vc)
        groups = {}
        for i in list(parent):
            groups.setdefault(find(i), set()).add(i)
        for r in groups:
            groups[r].add(r)
        self.periodic_groups = [np.array(sorted(g)) for g in groups.values()
                                if len(g) > 1]

    def rebuild_topology(self):
        """Derive faces, adjacency and boundary links from the cell array."""
        nc = len(self.cells)
        tri = self.cells
        edges = np.concatenate([tri[:, [1, 2]], tri[:, [2, 0]], tri[:, [0, 1]]])
        owner = np.tile(np.arange(nc), 3)
        local = np.repeat(np.arange(3), nc)
        key = np.sort(edges, axis=1)
        order = np.lexsort((key[:, 1], key[:, 0]))
        key_s = key[order]
        same = np.all(key_s[1:] == key_s[:-1], axis=1)

        faces = []
        face_cells = []
        face_tag = []
        cell_faces = np.full((nc, 3), -1, dtype=np.int64)
        cell_signs = np.zeros((nc, 3), dtype=np.int8)
        edge_to_face = {}
        i = 0
        rows = order
        while i < len(rows):
            r = rows[i]
            if i + 1 < len(rows) and same[i]:
                r2 = rows[i + 1]
                # left cell = the one traversing the edge in its CCW order
                fid = len(faces)
                faces.append(edges[r])
                face_cells.append((owner[r], owner[r2]))
                face_tag.append("interior")
                cell_faces[owner[r], local[r]] = fid
                cell_signs[owner[r], local[r]] = 1
                cell_faces[owner[r2], local[r2]] = fid
                cell_signs[owner[r2], local[r2]] = -1
                edge_to_face[tuple(key[r])] = fid
                i += 2
            else:
                ek = tuple(key[r])
                if ek not in self.boundary_edges:
                    raise ConfigError(f"untagged boundary edge {ek}")
                tag = self.boundary_edges[ek][0]
                fid = len(faces)
                faces.append(edges[r])
                face_cells.append((owner[r], -1))
                face_tag.append(tag)
                cell_faces[owner[r], local[r]] = fid
                cell_signs[owner[r], local[r]] = 1
                edge_to_face[ek] = fid
                i += 1
        self.faces = np.array(faces, dtype=np.int64).reshape(-1, 2)
        self.face_cells = np.array(face_cells, dtype=np.int64).reshape(-1, 2)
        self.face_tag = np.array(face_tag)
        self.cell_faces = cell_faces
        self.cell_signs = cell_signs
        self.edge_to_face = edge_to_face

        # periodic partners (by edge pair) and their orientation alignment
        nf = len(self.faces)
        self.face_partner = np.full(nf, -1, dtype=np.int64)
        self.partner_aligned = np.ones(nf, dtype=bool)
        self.partner_offset = np.zeros((nf, 2))
        for ek, (tag, partner) in self.boundary_edges.items():
            if tag != "periodic" or partner is None or ek not in edge_to_face:
                continue
            f = edge_to_face[ek]
            fp = edge_to_face[tuple(sorted(partner))]
            self.face_partner[f] = fp
            a, b = self.faces[f]
            c, d = self.faces[fp]
            off = (self.verts[[c, d]].mean(axis=0) - self.verts[[a, b]].mean(axis=0))
            self.partner_offset[f] = off
            # aligned when a maps to c under the translation
            self.partner_aligned[f] = bool(np.allclose(self.verts[a] + off,
                                                       self.verts[c], atol=1e-9))

        # vertex -> incident cells (CSR, vectorized via stable sort)
        flat = tri.reshape(-1)
        cell_of = np.repeat(np.arange(nc), 3)
        srt = np.argsort(flat, kind="stable")
        counts = np.bincount(flat, minlength=len(self.verts))
        self.vc_ptr = np.concatenate([[0], np.cumsum(counts)])
        self.vc_cells = cell_of[srt]
        # vertex adjacency (unique undirected edges, both directions)
        und = np.unique(key, axis=0)
        self.adj_src = np.concatenate([und[:, 0], und[:, 1]])
        self.adj_dst = np.concatenate([und[:, 1], und[:, 0]])

    # -- geometry --------------------------------------------------------

    @property
    def n_cells(self):
        return len(self.cells)

    @property
    def n_verts(self):
        return len(self.verts)

    def areas(self, verts=None):
        return signed_areas(self.verts if verts is None else verts, self.cells)

    def barycenters(self, verts=None):
        v = self.verts if verts is None else verts
        return v[self.cells].mean(axis=1)

    def cell_quality(self, verts=None):
        return quality(self.verts if verts is None else verts, self.cells)

    def h_cells(self, verts=None):
        """Cell size 2 * inradius = 4 area / perimeter."""
        v = (self.verts if verts is None else verts)[self.cells]
        per = (np.linalg.norm(v[:, 1] - v[:, 0], axis=1)
               + np.linalg.norm(v[:, 2] - v[:, 1], axis=1)
               + np.linalg.norm(v[:, 0] - v[:, 2], axis=1))
        return 4.0 * np.abs(signed_areas(self.verts if verts is None else verts,
                                         self.cells)) / per

    def copy(self):
        m = object.__new__(SimplicialMesh)
        m.verts = self.verts.copy()
        m.vels = self.vels.copy()
        m.cells = self.cells.copy()
        m.boundary_edges = dict(self.boundary_edges)
        m.periodic_groups = [g.copy() for g in self.periodic_groups]
        m.rebuild_topology()
        return m

    def move(self, dt):
        verts = self.verts + dt * self.vels
        if np.any(signed_areas(verts, self.cells) <= 0.0):
            raise MeshTanglingError("mesh motion inverted a cell")
        self.verts = verts


def max_timestep_orientation(mesh, safety=1.0 - ORIENT_SAFETY):
    """Largest dt keeping every signed cell area above (1-safety) of start.

    Under linear vertex motion the area is quadratic in t; the bound is the
    smallest positive root of area(t) = (1-safety) area(0) over all cells.
    """
    v = mesh.verts[mesh.cells]
    w = mesh.vels[mesh.cells]
    a0 = signed_areas(mesh.verts, mesh.cells)
    if np.any(a0 <= 0):
        raise MeshTanglingError("degenerate cell at bound evaluation")
    e1, e2 = v[:, 1] - v[:, 0], v[:, 2] - v[:, 0]
    f1, f2 = w[:, 1] - w[:, 0], w[:, 2] - w[:, 0]
    cross = lambda p, q: p[:, 0] * q[:, 1] - p[:, 1] * q[:, 0]
    c1 = 0.5 * (cross(e1, f2) + cross(f1, e2))
    c2 = 0.5 * cross(f1, f2)
    c0 = safety * a0
    # smallest positive root of c2 t^2 + c1 t + c0 = 0
    best = np.inf
    lin = np.abs(c2) < 1e-14 * np.maximum(1.0, np.abs(c1))
    with np.errstate(divide="ignore", invalid="ignore"):
        t_lin = np.where((c1 < 0) & lin, -c0 / np.where(c1 < 0, c1, -1.0), np.inf)
    disc = c1 * c1 - 4.0 * c2 * c0
    has = (~lin) & (disc >= 0.0)
    if np.any(has):
        sq = np.sqrt(disc[has])
        r1 = (-c1[has] - sq) / (2.0 * c2[has])
        r2 = (-c1[has] + sq) / (2.0 * c2[has])
        roots = np.concatenate([r1, r2])
        roots = roots[roots > 0]
        if roots.size:
            best = float(roots.min())
    pos_lin = t_lin[t_lin > 0]
    if pos_lin.size:
        best = min(best, float(pos_lin.min()))
    return best


# ---------------------------------------------------------------------------
# boundary vertex velocities

def boundary_vertex_velocity(w0, normal):
    """Reflective correction: mirror the raw velocity about the wall plane."""
    nu = np.asarray(normal, dtype=float)
    nu = nu / np.linalg.norm(nu)
    w0 = np.asarray(w0, dtype=float)
    return w0 - 2.0 * (w0 @ nu) * nu


def apply_boundary_velocities(mesh, w):
    """Impose periodic equality and reflective mirroring on raw velocities."""
    for g in mesh.periodic_groups:
        w[g] = w[g].mean(axis=0)
    refl = {}
    for f in np.nonzero(mesh.face_tag == "reflective")[0]:
        a, b = mesh.faces[f]
        e = mesh.verts[b] - mesh.verts[a]
        nu = np.array([e[1], -e[0]])
        nu /= np.linalg.norm(nu)
        for vtx in (a, b):
            refl.setdefault(vtx, []).append(nu)
    for vtx, nus in refl.items():
        for nu in nus:
            w[vtx] = w[vtx] - 2.0 * (w[vtx] @ nu) * nu
    return w


# ---------------------------------------------------------------------------
# edge swapping and conservative transfer

def _seg_intersection(p1, p2, p3, p4):
    d1 = p2 - p1
    d2 = p4 - p3
    den = d1[0] * d2[1] - d1[1] * d2[0]
    if abs(den) < 1e-300:
        return None
    t = ((p3[0] - p1[0]) * d2[1] - (p3[1] - p1[1]) * d2[0]) / den
    return p1 + t * d1


def swap_regions(verts, a, b, o1, o2):
    """Interpolation regions of the quad (a, o1, b, o2) cut by both diagonals.

    Returns (point P, list of (triangle, old_side, new_side)) where old_side
    0/1 refers to the cells on either side of diagonal (a,b) and new_side
    0/1 to those of diagonal (o1,o2).
    """
    P = _seg_intersection(verts[a], verts[b], verts[o1], verts[o2])
    if P is None:
        raise DecompositionError("diagonals are parallel")
    tris = [
        (np.array([verts[a], P, verts[o1]]), 0, 0),
        (np.array([verts[o1], P, verts[b]]), 0, 1),
        (np.array([verts[b], P, verts[o2]]), 1, 1),
        (np.array([verts[o2], P, verts[a]]), 1, 0),
    ]
    return P, tris


def transfer_solution(old_polys, new_geoms, regions, basis):
    """Exact L2 transfer through disjoint interpolation regions.

    ``old_polys`` is a list of (vertex triple, coefficient matrix) for the
    donor cells; ``new_geoms`` a list of receiver vertex triples; ``regions``
    a list of (triangle vertices, old index, new index).  The quadrature is
    exact for degree 2k, so polynomial data transfers exactly and totals
    are conserved to round-off.
    """
    rule = dg_basis.quadrature_for(2, 2 * basis.degree)
    lam = np.column_stack([1.0 - rule.points[:, 0] - rule.points[:, 1],
                           rule.points[:, 0], rule.points[:, 1]])
    nv = old_polys[0][1].shape[1]
    out = [np.zeros((basis.n_modes, nv)) for _ in new_geoms]
    area_sum = 0.0
    for (tri, iold, inew) in regions:
        xq = lam @ tri
        a2 = orientation_det(tri[None])[0]
        area = 0.5 * abs(a2)
        if area < 1e-300:
            continue
        area_sum += area
        overts, ocoef = old_polys[iold]
        xi_old = _to_reference(overts, xq)
        u = basis.eval(xi_old) @ ocoef
        xi_new = _to_reference(new_geoms[inew], xq)
        phi_new = basis.eval(xi_new)
        jac_new = abs(orientation_det(np.asarray(new_geoms[inew])[None])[0])
        # c_m = (1/|J_new|) int_R u phi_m dx with |J_R| = 2 area_R and the
        # reference weights already summing to the half-area measure
        out[inew] += (2.0 * area / jac_new) * phi_new.T @ (rule.weights[:, None] * u)
    new_area = sum(0.5 * abs(orientation_det(np.asarray(g)[None])[0]) for g in new_geoms)
    if abs(area_sum - new_area) > 1e-9 * max(new_area, 1e-30):
        raise DecompositionError(
            f"regions cover {area_sum}, patch area is {new_area}")
    return out


def _to_reference(tri_verts, pts):
    v = np.asarray(tri_verts, dtype=float)
    T = np.column_stack([v[1] - v[0], v[2] - v[0]])
    Tinv = np.linalg.inv(T)
    return (pts - v[0]) @ Tinv.T


def edge_swap(mesh, coeffs, face, basis, hysteresis=SWAP_HYSTERESIS):
    """Try to swap one interior face; returns True when accepted.

    Acceptance needs a strictly convex quadrilateral and a strict
    improvement of the worse of the two cell qualities (with hysteresis to
    prevent swap cycling).  The solution is transferred exactly through the
    four interpolation regions, preserving totals to round-off.
    """
    if mesh.face_tag[face] != "interior":
        return False
    c1, c2 = mesh.face_cells[face]
    a, b = mesh.faces[face]
    o1 = int(mesh.cells[c1][~np.isin(mesh.cells[c1], (a, b))][0])
    o2 = int(mesh.cells[c2][~np.isin(mesh.cells[c2], (a, b))][0])
    V = mesh.verts
    new1 = np.array([a, o2, o1])
    new2 = np.array([b, o1, o2])
    d1 = orientation_det(V[new1][None])[0]
    d2 = orientation_det(V[new2][None])[0]
    scale = max(np.abs(V[[a, b, o1, o2]]).max(), 1.0) ** 2
    if d1 <= 1e-12 * scale or d2 <= 1e-12 * scale:
        return False  # non-convex quad
    q_old = max(quality(V[mesh.cells[c1]]), quality(V[mesh.cells[c2]]))
    q_new = max(quality(V[new1]), quality(V[new2]))
    if not q_new < q_old - hysteresis:
        return False
    _, regions = swap_regions(V, a, b, o1, o2)
    # old side 0 = cell holding o1 (c1), side 1 = c2; new side 0 holds a
    old_polys = [(V[mesh.cells[c1]], coeffs[c1]), (V[mesh.cells[c2]], coeffs[c2])]
    new_geoms = [V[new1], V[new2]]
    new_coefs = transfer_solution(old_polys, new_geoms, regions, basis)
    mesh.cells[c1] = new1
    mesh.cells[c2] = new2
    coeffs[c1] = new_coefs[0]
    coeffs[c2] = new_coefs[1]
    return True


def swap_pass(mesh, coeffs, basis, q_threshold, hysteresis=SWAP_HYSTERESIS,
              max_passes=8):
    """Poor-cell stack processing in batched passes.

    Within a pass a swap marks both cells and their neighbors dirty; dirty
    cells wait for the next pass (after one topology rebuild), which keeps
    the adjacency arrays valid without per-swap rebuilds.  Runs until the
    stack drains or ``max_passes`` is hit; returns the accepted swap count.
    """
    total = 0
    for _ in range(max_passes):
        q = mesh.cell_quality()
        poor = np.nonzero(q > q_threshold)[0]
        if poor.size == 0:
            break
        order = poor[np.argsort(q[poor])[::-1]]
        dirty = np.zeros(mesh.n_cells, dtype=bool)
        swaps = 0
        for c in order:
            if dirty[c]:
                continue
            for lf in range(3):
                f = mesh.cell_faces[c, lf]
                if f < 0 or mesh.face_tag[f] != "interior":
                    continue
                c2 = int(mesh.face_cells[f].sum() - c)
                if dirty[c2]:
                    continue
                if edge_swap(mesh, coeffs, f, basis, hysteresis):
                    swaps += 1
                    for cc in (c, c2):
                        dirty[cc] = True
                        for lf2 in range(3):
                            ff = mesh.cell_faces[cc, lf2]
                            if ff >= 0 and mesh.face_tag[ff] == "interior":
                                dirty[mesh.face_cells[ff].sum() - cc] = True
                    break
        total += swaps
        if swaps == 0:
            break
        mesh.rebuild_topology()
    return total


# ---------------------------------------------------------------------------
# generators and mesh file I/O

def structured_mesh(nx, ny, bounds, bc=("open", "open", "open", "open"),
                    jitter=0.0, seed=0, diagonal="right"):
    """Split an nx-by-ny block grid into triangles.

    ``bc`` tags the (left, right, bottom, top) sides; periodic sides pair
    opposite faces.  ``jitter`` displaces interior vertices by a fraction of
    the block size (seeded), used by the unstructured benchmark meshes.
    """
    (x0, x1), (y0, y1) = bounds
    xs = np.linspace(x0, x1, nx + 1)
    ys = np.linspace(y0, y1, ny + 1)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    verts = np.stack([X.reshape(-1), Y.reshape(-1)], axis=-1)
    vid = lambda i, j: i * (ny + 1) + j
    if jitter > 0.0:
        rng = np.random.default_rng(seed)
        hx, hy = (x1 - x0) / nx, (y1 - y0) / ny
        interior = np.ones(len(verts), dtype=bool)
        for i in (0, nx):
            for j in range(ny + 1):
                interior[vid(i, j)] = False
        for j in (0, ny):
            for i in range(nx + 1):
                interior[vid(i, j)] = False
        verts[interior] += jitter * np.stack([
            hx * rng.uniform(-1, 1, interior.sum()),
            hy * rng.uniform(-1, 1, interior.sum())], axis=-1)
    cells = []
    for i in range(nx):
        for j in range(ny):
            v00, v10 = vid(i, j), vid(i + 1, j)
            v01, v11 = vid(i, j + 1), vid(i + 1, j + 1)
            flip = diagonal == "alternating" and (i + j) % 2
            if diagonal == "right" or (diagonal == "alternating" and not flip):
                cells.append((v00, v10, v11))
                cells.append((v00, v11, v01))
            else:
                cells.append((v00, v10, v01))
                cells.append((v10, v11, v01))
    cells = np.array(cells, dtype=np.int64)

    boundary = {}
    left, right, bottom, top = bc

    def tag_edge(a, b, tag, partner=None):
        boundary[tuple(sorted((a, b)))] = (tag, tuple(sorted(partner)) if partner else None)

    for j in range(ny):
        pl = (vid(nx, j), vid(nx, j + 1)) if left == "periodic" else None
        tag_edge(vid(0, j), vid(0, j + 1), left, pl)
        pr = (vid(0, j), vid(0, j + 1)) if right == "periodic" else None
        tag_edge(vid(nx, j), vid(nx, j + 1), right, pr)
    for i in range(nx):
        pb = (vid(i, ny), vid(i + 1, ny)) if bottom == "periodic" else None
        tag_edge(vid(i, 0), vid(i + 1, 0), bottom, pb)
        pt = (vid(i, 0), vid(i + 1, 0)) if top == "periodic" else None
        tag_edge(vid(i, ny), vid(i + 1, ny), top, pt)
    return SimplicialMesh(verts, cells, boundary)


def delaunay_mesh(nx, ny, bounds, bc=("open", "open", "open", "open"),
                  jitter=0.35, seed=0):
    """Unstructured variant: jittered points retriangulated by Delaunay."""
    from scipy.spatial import Delaunay
    (x0, x1), (y0, y1) = bounds
    xs = np.linspace(x0, x1, nx + 1)
    ys = np.linspace(y0, y1, ny + 1)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    verts = np.stack([X.reshape(-1), Y.reshape(-1)], axis=-1)
    interior = ((verts[:, 0] > x0) & (verts[:, 0] < x1)
                & (verts[:, 1] > y0) & (verts[:, 1] < y1))
    rng = np.random.default_rng(seed)
    hx, hy = (x1 - x0) / nx, (y1 - y0) / ny
    verts[interior] += jitter * np.stack([hx * rng.uniform(-1, 1, interior.sum()),
                                          hy * rng.uniform(-1, 1, interior.sum())],
                                         axis=-1)
    tri = Delaunay(verts)
    cells = tri.simplices.astype(np.int64)
    neg = signed_areas(verts, cells) < 0
    cells[neg] = cells[neg][:, [0, 2, 1]]
    # collinear boundary points can produce zero-area slivers; drop them
    cells = cells[np.abs(signed_areas(verts, cells)) > 1e-10 * hx * hy]
    boundary = {}
    edges = np.concatenate([cells[:, [1, 2]], cells[:, [2, 0]], cells[:, [0, 1]]])
    key = np.sort(edges, axis=1)
    uniq, counts = np.unique(key, axis=0, return_counts=True)
    for a, b in uniq[counts == 1]:
        mid = 0.5 * (verts[a] + verts[b])
        if np.isclose(mid[0], x0):
            tag = bc[0]
        elif np.isclose(mid[0], x1):
            tag = bc[1]
        elif np.isclose(mid[1], y0):
            tag = bc[2]
        else:
            tag = bc[3]
        if tag == "periodic":
            raise ConfigError("delaunay_mesh does not support periodic sides")
        boundary[(int(a), int(b))] = (tag, None)
    return SimplicialMesh(verts, cells, boundary)


def write_mesh(mesh, path):
    """Line-oriented mesh file (meshdim / vertices / cells / boundary)."""
    lines = ["meshdim 2", f"vertices {mesh.n_verts}"]
    for i, (x, y) in enumerate(mesh.verts):
        lines.append(f"{i} {float(x):.17g} {float(y):.17g}")
    lines.append(f"cells {mesh.n_cells}")
    for i, (a, b, c) in enumerate(mesh.cells):
        lines.append(f"{i} {a} {b} {c}")
    edge_face_ids = {}
    items = sorted(mesh.boundary_edges.items())
    for idx, (edge, _) in enumerate(items):
        edge_face_ids[edge] = idx
    lines.append(f"boundary {len(items)}")
    for edge, (tag, partner) in items:
        row = f"{edge[0]} {edge[1]} {tag}"
        if tag == "periodic" and partner is not None:
            row += f" {edge_face_ids[tuple(sorted(partner))]}"
        lines.append(row)
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_mesh(path):
    """Parse the mesh file format; returns a SimplicialMesh."""
    tokens = []
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                tokens.append(line.split())
    it = iter(tokens)
    head = next(it)
    if head[0] != "meshdim" or head[1] != "2":
        raise ConfigError(f"unsupported mesh header {' '.join(head)}")
    sec = next(it)
    if sec[0] != "vertices":
        raise ConfigError("expected vertices section")
    nv = int(sec[1])
    verts = np.zeros((nv, 2))
    for _ in range(nv):
        row = next(it)
        verts[int(row[0])] = (float(row[1]), float(row[2]))
    sec = next(it)
    if sec[0] != "cells":
        raise ConfigError("expected cells section")
    nc = int(sec[1])
    cells = np.zeros((nc, 3), dtype=np.int64)
    for _ in range(nc):
        row = next(it)
        cells[int(row[0])] = (int(row[1]), int(row[2]), int(row[3]))
    sec = next(it)
    if sec[0] != "boundary":
        raise ConfigError("expected boundary section")
    nb = int(sec[1])
    rows = [next(it) for _ in range(nb)]
    boundary = {}
    edges = [tuple(sorted((int(r[0]), int(r[1])))) for r in rows]
    for r, edge in zip(rows, edges):
        tag = r[2]
        if tag not in BOUNDARY_TAGS:
            raise ConfigError(f"unknown boundary tag {tag!r}")
        partner = None
        if tag == "periodic":
            if len(r) < 4:
                raise ConfigError("periodic boundary face without partner id")
            partner = edges[int(r[3])]
        boundary[edge] = (tag, partner)
    return SimplicialMesh(verts, cells, boundary)
