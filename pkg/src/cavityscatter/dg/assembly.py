"""Assembly of the semi-discrete system M0 u'' + M1 u' + (M2 + A) u = F.

A = block-wise elastic volume stiffness (matrix-free tensor kernels) plus
symmetric interior-penalty face terms on every flux-coupled interface.  Face
terms are precomputed as small dense per-face operators: quadrature lives on
the finer (slave) side, the other side's traces are evaluated by polynomial
interpolation, which covers conforming faces, mixed-degree faces and
non-conforming mortar pairings uniformly.

M1/M2 hold the paraxial absorbing tractions on the outer boundary, derived
from the first-order paraxial relations combined with the isotropic
constitutive law:
    t*_tau_i = -rho vs d/dt(u.tau_i) + mu vs/vp d/dtau_i(u.n)
    t*_n     = -rho vp d/dt(u.n) + rho vs (vp - 2 vs) sum_i d/dtau_i(u.tau_i)
(the time-derivative parts populate M1, the tangential-derivative parts M2).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from ..basis import get_basis, lagrange_derivatives, lagrange_values
from ..materials import Material
from ..mesh import LOCAL_FACES, reference_map
from . import kernels
from .dofmap import DofMap, face_local_indices


# ---------------------------------------------------------------------------
# trace algebra (definitions of jumps and averages)
# ---------------------------------------------------------------------------

def _sym_outer(v, n):
    return 0.5 * (np.outer(v, n) + np.outer(n, v))


def trace_jump_average(v_e, v_a, n_e, boundary=False):
    """Jump tensor [[v]] = v_e (x) n_e + v_a (x) n_a (symmetrized outer
    products, n_a = -n_e) and average {v} = (v_e + v_a)/2.

    With boundary=True the one-sided forms are returned: [[v]] = v_e (x) n_e
    and {v} = v_e."""
    v_e = np.asarray(v_e, dtype=float)
    n_e = np.asarray(n_e, dtype=float)
    if boundary:
        return _sym_outer(v_e, n_e), v_e.copy()
    v_a = np.asarray(v_a, dtype=float)
    jump = _sym_outer(v_e, n_e) + _sym_outer(v_a, -n_e)
    return jump, 0.5 * (v_e + v_a)


# ---------------------------------------------------------------------------
# per-block geometry
# ---------------------------------------------------------------------------

def _face_axes(axis):
    return tuple(sorted({0, 1, 2} - {axis}))


def precompute_geometry(dof: DofMap):
    """Fill jinv / wdet for every block; raises on non-positive Jacobians."""
    for blk in dof.blocks:
        b = get_basis(blk.degree)
        n = blk.n1d
        ref = np.array([[a, c, d] for a in b.nodes for c in b.nodes for d in b.nodes])
        w3 = np.einsum("i,j,k->ijk", b.weights, b.weights, b.weights).reshape(-1)
        npts = n ** 3
        ne = len(blk.elements)
        jinv = np.empty((ne, npts, 3, 3))
        wdet = np.empty((ne, npts))
        from ..mesh import REF_VERTS
        # dN_v/dxi_d at all ref points: (npts, 8, 3)
        dsh = np.empty((npts, 8, 3))
        for d in range(3):
            term = np.full((npts, 8), 0.125)
            for a in range(3):
                if a == d:
                    term = term * REF_VERTS[None, :, a]
                else:
                    term = term * (1.0 + REF_VERTS[None, :, a] * ref[:, None, a])
            dsh[:, :, d] = term
        for row, e in enumerate(blk.elements):
            verts = dof.mesh.element_vertices(e)
            jac = np.einsum("pvd,vx->pxd", dsh, verts)   # dx_x/dxi_d
            det = np.linalg.det(jac)
            if np.any(det <= 0):
                raise RuntimeError(f"non-positive Jacobian in element {e}")
            inv = np.linalg.inv(jac)                      # dxi_d/dx_x
            jinv[row] = inv
            wdet[row] = w3 * det
        blk.jinv = jinv
        blk.wdet = wdet
    return dof


# ---------------------------------------------------------------------------
# face quadrature helpers
# ---------------------------------------------------------------------------

def _element_row(dof: DofMap, e):
    blk = dof.block_of(e)
    return blk, int(np.where(blk.elements == e)[0][0])


def _face_quad(dof: DofMap, e, lf):
    """Quadrature data on the GLL lattice of face (e, lf).

    Returns dict with local face indices, global node ids, points, weights,
    outward normals and per-point gradient rows (3, nloc)."""
    blk, row = _element_row(dof, e)
    n = blk.n1d
    b = get_basis(blk.degree)
    axis, val, _ = LOCAL_FACES[lf]
    a1, a2 = _face_axes(axis)
    fidx = face_local_indices(n, lf)
    nf = len(fidx)
    pts = blk.coords[row][fidx]
    gids = blk.gidx[row][fidx]

    rm = reference_map(dof.mesh, e)
    grid = b.nodes
    w2 = np.einsum("i,j->ij", b.weights, b.weights).reshape(-1)

    normals = np.empty((nf, 3))
    weights = np.empty(nf)
    grads = np.empty((nf, 3, n ** 3))
    D = b.diff
    jinv = blk.jinv[row]

    ref_pts = np.empty((nf, 3))
    for m, li in enumerate(fidx):
        i, j, k = np.unravel_index(li, (n, n, n))
        ref = np.empty(3)
        ref[0], ref[1], ref[2] = grid[i], grid[j], grid[k]
        ref_pts[m] = ref
        jac, _ = rm.jacobian(ref)
        t1 = jac[:, a1]
        t2 = jac[:, a2]
        nvec = np.cross(t1, t2)
        area = np.linalg.norm(nvec)
        nvec = nvec / area
        # orient outward: positive reference-axis direction maps through J
        out_dir = val * jac[:, axis]
        if np.dot(nvec, out_dir) < 0:
            nvec = -nvec
        normals[m] = nvec
        weights[m] = w2[m] * area

        # gradient rows of all element basis functions at this node
        g = np.zeros((3, n, n, n))
        for mm in range(n):
            g[0, mm, j, k] += D[i, mm]
            g[1, i, mm, k] += D[j, mm]
            g[2, i, j, mm] += D[k, mm]
        grads[m] = np.einsum("dx,dm->xm", jinv[li], g.reshape(3, -1))

    return {"blk": blk, "row": row, "n": n, "fidx": fidx, "gids": gids,
            "pts": pts, "w": weights, "normal": normals, "grads": grads,
            "ref": ref_pts, "axis": axis, "val": val}


def _invert_trilinear(rm, x, tol=1e-12):
    """Newton inversion of the trilinear map for a point on/in the element."""
    xi = np.zeros(3)
    for _ in range(60):
        r = rm.map(xi) - x
        if np.linalg.norm(r) < tol * max(1.0, np.linalg.norm(x)):
            break
        jac, _ = rm.jacobian(xi)
        xi -= np.linalg.solve(jac, r)
        xi = np.clip(xi, -1.0000001, 1.0000001)
    return xi


def _interp_rows(dof: DofMap, e, points, snap_face=None):
    """Value and physical-gradient rows of element e's basis at arbitrary
    physical points: val (np, nloc), grad (np, 3, nloc).  snap_face pins the
    inverted reference coordinates onto a local face (removes Newton noise
    normal to the face)."""
    blk, row = _element_row(dof, e)
    n = blk.n1d
    b = get_basis(blk.degree)
    rm = reference_map(dof.mesh, e)
    npts = len(points)
    val = np.empty((npts, n ** 3))
    grad = np.empty((npts, 3, n ** 3))
    for m, x in enumerate(points):
        xi = _invert_trilinear(rm, x)
        if snap_face is not None:
            axis, v, _ = LOCAL_FACES[snap_face]
            xi[axis] = float(v)
        xi = np.clip(xi, -1.0, 1.0)
        lv = [lagrange_values(b.nodes, [xi[d]])[0] for d in range(3)]
        ld = [lagrange_derivatives(b.nodes, [xi[d]])[0] for d in range(3)]
        val[m] = np.einsum("i,j,k->ijk", lv[0], lv[1], lv[2]).reshape(-1)
        gref = np.stack([
            np.einsum("i,j,k->ijk", ld[0], lv[1], lv[2]).reshape(-1),
            np.einsum("i,j,k->ijk", lv[0], ld[1], lv[2]).reshape(-1),
            np.einsum("i,j,k->ijk", lv[0], lv[1], ld[2]).reshape(-1),
        ])
        jac, _ = rm.jacobian(xi)
        grad[m] = np.einsum("dx,dm->xm", np.linalg.inv(jac), gref)
    return val, grad


# ---------------------------------------------------------------------------
# face operators
# ---------------------------------------------------------------------------

@dataclass
class FaceOp:
    """Dense SIPG operator of one quadrature face.

    u_nodes: all nodes of both elements (gradient support);
    v_nodes: trace nodes of both sides (face lattices);
    k_cons: (3 nv, 3 nu) so that  A(u,v) += -v.k_cons.u - u.k_cons^T.v(trace)
    k_pen: (3 nv, 3 nv) penalty block; eta recorded for the manifest."""

    u_nodes: np.ndarray
    v_nodes: np.ndarray
    k_cons: np.ndarray
    k_pen: np.ndarray
    eta: float


def _sigma_n_map(lam, mu, n, grads):
    """(sigma(u) n) as tensor T[c, m, c'] acting on element dofs u[m, c']."""
    nloc = grads.shape[1]
    T = np.zeros((3, nloc, 3))
    gn = n @ grads                      # normal-derivative row
    for c in range(3):
        T[c, :, c] += mu * gn
        T[c] += mu * np.outer(grads[c], n)      # mu n_c' du_c/dx_c'
        T[c] += lam * n[c] * grads.T            # lam n_c du_c'/dx_c'
    return T


def build_face_op(dof: DofMap, mats, e_quad, lf_quad, e_other, lf_other,
                  eta) -> FaceOp:
    """SIPG operator for one face; quadrature on (e_quad, lf_quad), the other
    side's traces interpolated.  Normal convention: outward from e_quad."""
    q = _face_quad(dof, e_quad, lf_quad)
    blk_q, row_q = q["blk"], q["row"]
    mat_q = mats[blk_q.name]
    blk_o, row_o = _element_row(dof, e_other)
    mat_o = mats[blk_o.name]

    val_o, grad_o = _interp_rows(dof, e_other, q["pts"], snap_face=lf_other)
    fidx_o = face_local_indices(blk_o.n1d, lf_other)
    gids_o = blk_o.gidx[row_o][fidx_o]

    u_nodes = np.concatenate([blk_q.gidx[row_q], blk_o.gidx[row_o]])
    v_nodes = np.concatenate([q["gids"], gids_o])
    nu, nv = len(u_nodes), len(v_nodes)
    nloc_q = blk_q.n1d ** 3
    nf_q = len(q["fidx"])

    # the other side's trace only involves its face nodes
    val_o_face = val_o[:, fidx_o]

    k_cons = np.zeros((3 * nv, 3 * nu))
    k_pen = np.zeros((3 * nv, 3 * nv))
    vrows = 3 * np.arange(nv)

    for m in range(nf_q):
        w = q["w"][m]
        n = q["normal"][m]
        # average stress map (acoustic side enters with mu = 0 naturally)
        Tq = _sigma_n_map(mat_q.lam, mat_q.mu, n, q["grads"][m])
        To = _sigma_n_map(mat_o.lam, mat_o.mu, n, grad_o[m])
        # delta v row: v_quad(point m) - v_other(point m)
        vrow = np.zeros(nv)
        vrow[m] = 1.0
        vrow[nf_q:] = -val_o_face[m]
        # consistency: sum_c dv_c {sigma(u) n}_c; columns flatten as 3*node+c'
        for c in range(3):
            tu = np.empty((nu, 3))
            tu[:nloc_q] = 0.5 * Tq[c]
            tu[nloc_q:] = 0.5 * To[c]
            k_cons[vrows + c] += w * np.outer(vrow, tu.reshape(-1))
        # penalty: eta * dv . (I + n n^T)/2 . du
        P = (0.5 * eta * w) * (np.eye(3) + np.outer(n, n))
        k_pen += np.einsum("v,cd,u->vcud", vrow, P, vrow).reshape(3 * nv, 3 * nv)

    return FaceOp(u_nodes=u_nodes, v_nodes=v_nodes, k_cons=k_cons,
                  k_pen=k_pen, eta=eta)


# ---------------------------------------------------------------------------
# system assembly
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PenaltyParams:
    """eta = alpha * max(lambda + 2 mu across the face) * N^2 / h_F, doubled
    on non-conforming (mortar or mixed-degree) faces."""

    alpha: float = 10.0
    nonconforming_factor: float = 2.0


@dataclass
class SemiDiscreteSystem:
    dof: DofMap
    mats: dict
    m0: np.ndarray                       # (n_nodes,) lumped mass
    face_ops: list = field(default_factory=list)
    m1_nodes: np.ndarray = None          # boundary nodes with ABC damping
    m1_blocks: np.ndarray = None         # (nb, 3, 3)
    m2: sp.csr_matrix = None
    eta_range: tuple = (0.0, 0.0)
    abc_warnings: list = field(default_factory=list)
    _groups: list = field(default_factory=list, repr=False)

    def finalize(self):
        """Group face operators by shape for batched application."""
        shapes = {}
        for op in self.face_ops:
            shapes.setdefault(op.k_cons.shape, []).append(op)
        self._groups = []
        for shape, ops in shapes.items():
            kc = np.stack([o.k_cons for o in ops])
            kp = np.stack([o.k_pen for o in ops])
            ui = np.stack([o.u_nodes for o in ops])
            vi = np.stack([o.v_nodes for o in ops])
            self._groups.append((kc, kp, ui, vi))
        return self

    def apply_stiffness(self, u, out=None):
        """A u: volume terms plus SIPG face terms; u, out are (n_nodes, 3)."""
        if out is None:
            out = np.zeros_like(u)
        for blk in self.dof.blocks:
            mat = self.mats[blk.name]
            ne = len(blk.elements)
            lam = np.full(ne, mat.lam)
            mu = np.full(ne, mat.mu)
            kernels.apply_volume_block(get_basis(blk.degree).diff, blk.gidx,
                                       blk.jinv, blk.wdet, lam, mu, u, out)
        for kc, kp, ui, vi in self._groups:
            uu = u[ui].reshape(len(ui), -1)          # (nf, 3 nu)
            tt = u[vi].reshape(len(vi), -1)          # (nf, 3 nv)
            y_v = -np.einsum("fvu,fu->fv", kc, uu)
            y_v += np.einsum("fvw,fw->fv", kp, tt)
            y_u = -np.einsum("fvu,fv->fu", kc, tt)
            np.add.at(out, vi.reshape(-1), y_v.reshape(-1, 3))
            np.add.at(out, ui.reshape(-1), y_u.reshape(-1, 3))
        return out

    def apply_m1(self, u, out=None):
        if out is None:
            out = np.zeros_like(u)
        if self.m1_nodes is not None and len(self.m1_nodes):
            vals = np.einsum("bij,bj->bi", self.m1_blocks, u[self.m1_nodes])
            np.add.at(out, self.m1_nodes, vals)
        return out

    def apply_m2(self, u, out=None):
        if out is None:
            out = np.zeros_like(u)
        if self.m2 is not None:
            out += (self.m2 @ u.reshape(-1)).reshape(-1, 3)
        return out

    def materialize(self, operator="A"):
        """Dense matrix of an operator by repeated application (tests/small
        meshes only)."""
        n = self.dof.n_dof
        mat = np.zeros((n, n))
        for j in range(n):
            e = np.zeros((self.dof.n_nodes, 3))
            e.reshape(-1)[j] = 1.0
            if operator == "A":
                col = self.apply_stiffness(e)
            elif operator == "M1":
                col = self.apply_m1(e)
            elif operator == "M2":
                col = self.apply_m2(e)
            else:
                raise ValueError(operator)
            mat[:, j] = col.reshape(-1)
        return mat


def _face_h(dof: DofMap, e, lf):
    return float(np.sqrt(dof.mesh.face_area(e, lf)))


def _collect_coupled_faces(dof: DofMap):
    """All flux-coupled face pairs: (e_quad, lf_quad, e_other, lf_other,
    nonconforming_flag)."""
    mesh = dof.mesh
    out = []
    sets = ["acoustic_elastic"]
    if "box_conforming" in getattr(dof, "dg_sets", set()):
        sets.append("box_conforming")
    for name in sets:
        for e1, f1, e2, f2 in mesh.face_sets.get(name, []):
            d1 = dof.block_of(e1).degree
            d2 = dof.block_of(e2).degree
            mixed = d1 != d2
            # quadrature on the higher-degree (finer-trace) side
            if d2 > d1:
                out.append((e2, f2, e1, f1, mixed))
            else:
                out.append((e1, f1, e2, f2, mixed))
    for pr in mesh.pairings:
        me, mlf = pr.master
        for se, slf in pr.slaves:
            out.append((se, slf, me, mlf, True))
    return out


def assemble_system(dof: DofMap, mats, penalty: PenaltyParams = None,
                    abc=True) -> SemiDiscreteSystem:
    """Build M0 (lumped), the SIPG face operators and the absorbing-boundary
    matrices.  `mats` maps block name -> Material."""
    penalty = penalty or PenaltyParams()
    precompute_geometry(dof)

    m0 = np.zeros(dof.n_nodes)
    for blk in dof.blocks:
        mat = mats[blk.name]
        rho = np.full(len(blk.elements), mat.rho)
        m0 += kernels.lumped_mass_block(blk.gidx, blk.wdet, rho, dof.n_nodes)

    sysm = SemiDiscreteSystem(dof=dof, mats=mats, m0=m0)

    etas = []
    for e_q, lf_q, e_o, lf_o, noncon in _collect_coupled_faces(dof):
        mod = max(mats[dof.block_of(e_q).name].lam + 2 * mats[dof.block_of(e_q).name].mu,
                  mats[dof.block_of(e_o).name].lam + 2 * mats[dof.block_of(e_o).name].mu)
        deg = max(dof.block_of(e_q).degree, dof.block_of(e_o).degree)
        eta = penalty.alpha * mod * deg ** 2 / _face_h(dof, e_q, lf_q)
        if noncon:
            eta *= penalty.nonconforming_factor
        etas.append(eta)
        sysm.face_ops.append(build_face_op(dof, mats, e_q, lf_q, e_o, lf_o, eta))
    sysm.eta_range = (min(etas), max(etas)) if etas else (0.0, 0.0)

    if abc:
        _assemble_abc(dof, mats, sysm)
    sysm.finalize()
    return sysm


def _assemble_abc(dof: DofMap, mats, sysm: SemiDiscreteSystem):
    """Paraxial absorbing tractions on the `absorbing` face set -> M1, M2."""
    mesh = dof.mesh
    m1 = {}
    rows, cols, vals = [], [], []
    for e, lf in mesh.face_sets.get("absorbing", []):
        blk = dof.block_of(e)
        mat = mats[blk.name]
        if mat.vs == 0:
            raise RuntimeError("absorbing boundary on an acoustic block")
        if mat.vp / mat.vs > 2.0:
            msg = f"vp/vs = {mat.vp / mat.vs:.2f} > 2 on absorbing face ({e},{lf})"
            if msg not in sysm.abc_warnings:
                sysm.abc_warnings.append(msg)
        q = _face_quad(dof, e, lf)
        blk_row = q["row"]
        gel = blk.gidx[blk_row]
        rho, vp, vs = mat.rho, mat.vp, mat.vs
        c_tan = mat.mu * vs / vp
        c_div = rho * vs * (vp - 2 * vs)
        for m, gnode in enumerate(q["gids"]):
            w = q["w"][m]
            n = q["normal"][m]
            t = np.array([0.0, 1.0, 0.0]) if abs(n[0]) > 0.9 else np.array([1.0, 0.0, 0.0])
            t1 = t - np.dot(t, n) * n
            t1 /= np.linalg.norm(t1)
            t2 = np.cross(n, t1)
            blkm = m1.setdefault(gnode, np.zeros((3, 3)))
            blkm += w * (rho * vs * np.eye(3) + rho * (vp - vs) * np.outer(n, n))
            # spatial terms -> M2 (moved to the left-hand side)
            g = q["grads"][m]                    # (3, nloc)
            dt1 = t1 @ g
            dt2 = t2 @ g
            for c in range(3):
                coef_c = c_tan * (t1[c] * dt1 + t2[c] * dt2)   # row over nloc
                for cp in range(3):
                    entry = coef_c * n[cp] + c_div * n[c] * (dt1 * t1[cp] + dt2 * t2[cp])
                    nz = np.nonzero(np.abs(entry) > 0)[0]
                    rows.extend([3 * gnode + c] * len(nz))
                    cols.extend((3 * gel[nz] + cp).tolist())
                    vals.extend((-w * entry[nz]).tolist())
    if m1:
        sysm.m1_nodes = np.array(sorted(m1.keys()), dtype=np.int64)
        sysm.m1_blocks = np.stack([m1[k] for k in sysm.m1_nodes])
    nd = dof.n_dof
    sysm.m2 = sp.csr_matrix((vals, (rows, cols)), shape=(nd, nd))
