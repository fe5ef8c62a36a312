"""Hexahedral meshes for the sphere-in-box scattering geometry.

The ball is meshed by a spherified-cube decomposition (a warped core cube
whose boundary is the sphere of radius a, plus spherical shells out to R);
the surrounding elastic region blends the sphere surface into the inner box,
which sits inside a coarser outer grid.  When the inner-box surface grid and
the outer grid agree the mesh is globally conforming; otherwise the box
interface is coupled through master/slave face pairings (integration happens
on the fine side).

Blocks: "Acoustic" (r <= R), "ElasticInner" (sphere..inner box),
"ElasticOuter" (inner box..domain boundary).
"""

from __future__ import annotations

import hashlib
import io
from dataclasses import dataclass, field

import numpy as np

BLOCKS = ("Acoustic", "ElasticInner", "ElasticOuter")

#: vertex order of the reference hexahedron (VTK hexahedron convention)
REF_VERTS = np.array([
    [-1, -1, -1], [1, -1, -1], [1, 1, -1], [-1, 1, -1],
    [-1, -1, 1], [1, -1, 1], [1, 1, 1], [-1, 1, 1],
], dtype=float)

#: local faces: (fixed reference axis, value) and their 4 corner indices
LOCAL_FACES = (
    (0, -1, (0, 3, 7, 4)),
    (0, +1, (1, 2, 6, 5)),
    (1, -1, (0, 1, 5, 4)),
    (1, +1, (3, 2, 6, 7)),
    (2, -1, (0, 1, 2, 3)),
    (2, +1, (4, 5, 6, 7)),
)


class MeshError(RuntimeError):
    pass


class TopologyError(MeshError):
    pass


@dataclass
class FacePairing:
    """One coarse master face covered by fine slave faces."""

    master: tuple  # (element, local face)
    slaves: list   # [(element, local face), ...]


@dataclass
class HexMesh:
    nodes: np.ndarray                    # (n_nodes, 3)
    elems: np.ndarray                    # (n_elems, 8) vertex ids
    blocks: np.ndarray                   # (n_elems,) block label strings
    face_sets: dict = field(default_factory=dict)     # name -> [(elem, lf)]
    pairings: list = field(default_factory=list)      # FacePairing list

    @property
    def n_elems(self):
        return len(self.elems)

    def element_vertices(self, e):
        return self.nodes[self.elems[e]]

    def face_vertex_ids(self, e, lf):
        return tuple(self.elems[e][v] for v in LOCAL_FACES[lf][2])

    def face_center(self, e, lf):
        return self.nodes[list(self.face_vertex_ids(e, lf))].mean(axis=0)

    def face_area(self, e, lf):
        v = self.nodes[list(self.face_vertex_ids(e, lf))]
        # bilinear quad split into two triangles (exact for planar faces)
        a1 = 0.5 * np.linalg.norm(np.cross(v[1] - v[0], v[3] - v[0]))
        a2 = 0.5 * np.linalg.norm(np.cross(v[1] - v[2], v[3] - v[2]))
        return a1 + a2

    def content_hash(self):
        return hashlib.sha256(write_mesh_text(self).encode()).hexdigest()[:16]


@dataclass
class ReferenceMap:
    """Trilinear map from the reference cube [-1,1]^3 to one element."""

    element: int
    vertices: np.ndarray  # (8, 3)

    def map(self, ref_point):
        xi = np.asarray(ref_point, dtype=float)
        shape = 0.125 * np.prod(1.0 + REF_VERTS * xi, axis=1)
        return shape @ self.vertices

    def jacobian(self, ref_point):
        xi = np.asarray(ref_point, dtype=float)
        jac = np.zeros((3, 3))
        for d in range(3):
            dshape = np.ones(8) * 0.125
            for a in range(3):
                if a == d:
                    dshape = dshape * REF_VERTS[:, a]
                else:
                    dshape = dshape * (1.0 + REF_VERTS[:, a] * xi[a])
            jac[:, d] = dshape @ self.vertices
        return jac, float(np.linalg.det(jac))


def reference_map(mesh: HexMesh, e) -> ReferenceMap:
    return ReferenceMap(element=e, vertices=mesh.element_vertices(e))


def jacobian(ref_map: ReferenceMap, ref_point):
    """Jacobian matrix and determinant of the trilinear map at a point."""
    return ref_map.jacobian(ref_point)


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------

class _NodePool:
    """Welds vertices by quantized coordinates."""

    def __init__(self, scale):
        self.tol = 1e-9 * scale
        self.index = {}
        self.coords = []

    def add(self, p):
        key = tuple(int(round(c / self.tol)) for c in p)
        idx = self.index.get(key)
        if idx is None:
            idx = len(self.coords)
            self.index[key] = idx
            self.coords.append(np.asarray(p, dtype=float))
        return idx


def _check_element_quality(mesh: HexMesh, hk_over_hf_max=10.0):
    probe = np.linspace(-1, 1, 4)
    pts = np.array([[a, b, c] for a in probe for b in probe for c in probe])
    for e in range(mesh.n_elems):
        rm = reference_map(mesh, e)
        for p in pts:
            _, det = rm.jacobian(p)
            if det <= 0:
                raise MeshError(f"non-positive Jacobian in element {e}")
        verts = mesh.element_vertices(e)
        h_k = np.max(np.linalg.norm(verts[:, None, :] - verts[None, :, :], axis=2))
        for lf in range(6):
            fv = mesh.nodes[list(mesh.face_vertex_ids(e, lf))]
            h_f = np.max(np.linalg.norm(fv[:, None, :] - fv[None, :, :], axis=2))
            if h_k > hk_over_hf_max * h_f:
                raise MeshError(
                    f"element {e} violates h_K <= {hk_over_hf_max} h_F")


def build_box_grid(lo, hi, n_cells, block="ElasticOuter", boundary_set="absorbing"):
    """Regular grid of hexahedra over an axis-aligned box."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    nx, ny, nz = (int(v) for v in n_cells)
    xs = [np.linspace(lo[d], hi[d], (nx, ny, nz)[d] + 1) for d in range(3)]

    def nid(i, j, k):
        return (i * (ny + 1) + j) * (nz + 1) + k

    nodes = np.array([[x, y, z] for x in xs[0] for y in xs[1] for z in xs[2]])
    elems = []
    for i in range(nx):
        for j in range(ny):
            for k in range(nz):
                elems.append([nid(i, j, k), nid(i + 1, j, k), nid(i + 1, j + 1, k),
                              nid(i, j + 1, k), nid(i, j, k + 1), nid(i + 1, j, k + 1),
                              nid(i + 1, j + 1, k + 1), nid(i, j + 1, k + 1)])
    mesh = HexMesh(nodes=nodes, elems=np.array(elems, dtype=int),
                   blocks=np.array([block] * len(elems)))
    mesh.face_sets = classify_faces(mesh)
    if boundary_set != "absorbing":
        mesh.face_sets[boundary_set] = mesh.face_sets.pop("absorbing")
    return mesh


def _cube_face_frame(face_axis, face_sign):
    """In-face axes (t1, t2) completing the outward cube-face normal."""
    t1 = (face_axis + 1) % 3
    t2 = (face_axis + 2) % 3
    return t1, t2


def build_sphere_in_box(radius, inner_box_half, outer_box_dims, h_inner,
                        h_outer, n_radial_layers=1, core_frac=0.5,
                        n_shell_layers=None):
    """Sphere-in-box hexahedral mesh.

    radius: sphere radius R; inner_box_half: half-width b of the conforming
    inner box; outer_box_dims: full extents of the outer box; h_inner: target
    grid size of the inner-box surface (sets the 6-patch resolution
    n = round(2 b / h_inner)); h_outer: outer grid size; n_radial_layers:
    shells between the warped core cube and the sphere surface.
    n_shell_layers: elastic layers sphere -> inner box (default from sizes).
    """
    R = float(radius)
    b = float(inner_box_half)
    dims = np.asarray(outer_box_dims, dtype=float)
    if not (R < b < min(dims) / 2):
        raise MeshError("need R < inner_box_half < min(outer_box_dims)/2")
    if h_inner > h_outer + 1e-12:
        raise MeshError("need h_inner <= h_outer")

    n = max(2, int(round(2 * b / h_inner)))
    L1 = max(1, int(n_radial_layers))
    a = core_frac * R
    if n_shell_layers is None:
        L2 = max(1, int(round((b - R) / h_inner)))
    else:
        L2 = max(1, int(n_shell_layers))

    # outer grid compatibility
    for d in range(3):
        if abs(dims[d] / h_outer - round(dims[d] / h_outer)) > 1e-9:
            raise MeshError("outer_box_dims must be multiples of h_outer")
    if abs(2 * b / h_outer - round(2 * b / h_outer)) > 1e-9:
        raise MeshError("inner box (2b) must be a multiple of h_outer")
    half = dims / 2.0
    for d in range(3):
        if abs((half[d] - b) / h_outer - round((half[d] - b) / h_outer)) > 1e-9:
            raise MeshError("inner box must align with the outer grid")

    f_in = 2 * b / n
    ratio = h_outer / f_in
    if abs(ratio - round(ratio)) < 1e-9:
        q = int(round(ratio))           # outer coarse (or equal): q faces per side
        inner_is_fine = True
    else:
        ratio = f_in / h_outer
        if abs(ratio - round(ratio)) > 1e-9:
            raise MeshError("inner and outer face grids must nest (integer ratio)")
        q = int(round(ratio))
        inner_is_fine = False           # inner faces are the coarse masters

    pool = _NodePool(scale=float(np.max(dims)))
    elems, blocks = [], []

    # --- core cube: spherified so its boundary is the sphere of radius a;
    # equiangular direction warp evens out the corner crowding of the
    # projected-cube parametrization
    t = np.linspace(-1.0, 1.0, n + 1)

    def equi_dir(Y):
        """Direction of a unit-cube surface point, equiangular warp."""
        Y = np.asarray(Y, dtype=float)
        ax = int(np.argmax(np.abs(Y)))
        d = np.tan(Y * (np.pi / 4))
        d[ax] = np.sign(Y[ax])
        return d / np.linalg.norm(d)

    def core_point(X):
        X = np.asarray(X, dtype=float)
        rin = np.max(np.abs(X))
        if rin < 1e-14:
            return np.zeros(3)
        return a * rin * equi_dir(X / rin)

    core_ids = np.empty((n + 1, n + 1, n + 1), dtype=int)
    for i, x in enumerate(t):
        for j, y in enumerate(t):
            for k, z in enumerate(t):
                core_ids[i, j, k] = pool.add(core_point((x, y, z)))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                elems.append([core_ids[i, j, k], core_ids[i + 1, j, k],
                              core_ids[i + 1, j + 1, k], core_ids[i, j + 1, k],
                              core_ids[i, j, k + 1], core_ids[i + 1, j, k + 1],
                              core_ids[i + 1, j + 1, k + 1], core_ids[i, j + 1, k + 1]])
                blocks.append("Acoustic")

    # --- radial shells: 6 patches, directions from the cube-face parameters
    def patch_dir(face_axis, face_sign, u, v):
        p = np.zeros(3)
        p[face_axis] = face_sign
        t1, t2 = _cube_face_frame(face_axis, face_sign)
        p[t1], p[t2] = u, v
        return equi_dir(p)

    def shell_nodes(radii):
        """For each patch, an (len(radii), n+1, n+1) id grid of r * d(u,v)."""
        out = []
        for face_axis in range(3):
            for face_sign in (-1, 1):
                ids = np.empty((len(radii), n + 1, n + 1), dtype=int)
                for iu, u in enumerate(t):
                    for iv, v in enumerate(t):
                        d = patch_dir(face_axis, face_sign, u, v)
                        for ir, r in enumerate(radii):
                            ids[ir, iu, iv] = pool.add(r * d)
                out.append(((face_axis, face_sign), ids))
        return out

    def add_shell_elems(ids_grid, block):
        (face_axis, face_sign), ids = ids_grid
        nr = ids.shape[0] - 1
        for ir in range(nr):
            for iu in range(n):
                for iv in range(n):
                    lo = ids[ir]
                    hi = ids[ir + 1]
                    quad_lo = [lo[iu, iv], lo[iu + 1, iv], lo[iu + 1, iv + 1], lo[iu, iv + 1]]
                    quad_hi = [hi[iu, iv], hi[iu + 1, iv], hi[iu + 1, iv + 1], hi[iu, iv + 1]]
                    conn = quad_lo + quad_hi
                    # keep orientation right-handed (positive Jacobian)
                    verts = np.array([pool.coords[c] for c in conn])
                    rm = ReferenceMap(element=-1, vertices=verts)
                    if rm.jacobian(np.zeros(3))[1] < 0:
                        conn = quad_lo[::-1] + quad_hi[::-1]
                    elems.append(conn)
                    blocks.append(block)

    acoustic_radii = [a + (R - a) * i / L1 for i in range(L1 + 1)]
    for grid_ids in shell_nodes(np.array(acoustic_radii)):
        add_shell_elems(grid_ids, "Acoustic")

    # --- elastic blend shells: sphere surface -> inner box surface
    def box_point(face_axis, face_sign, u, v):
        p = np.zeros(3)
        p[face_axis] = face_sign * b
        t1, t2 = _cube_face_frame(face_axis, face_sign)
        p[t1], p[t2] = u * b, v * b
        return p

    for face_axis in range(3):
        for face_sign in (-1, 1):
            ids = np.empty((L2 + 1, n + 1, n + 1), dtype=int)
            for iu, u in enumerate(t):
                for iv, v in enumerate(t):
                    d = patch_dir(face_axis, face_sign, u, v)
                    q_box = box_point(face_axis, face_sign, u, v)
                    for ir in range(L2 + 1):
                        s = ir / L2
                        ids[ir, iu, iv] = pool.add((1 - s) * R * d + s * q_box)
            add_shell_elems(((face_axis, face_sign), ids), "ElasticInner")

    # --- outer grid with the inner-box hole
    ncell = (dims / h_outer).round().astype(int)
    xs = [np.linspace(-half[d], half[d], ncell[d] + 1) for d in range(3)]
    for i in range(ncell[0]):
        for j in range(ncell[1]):
            for k in range(ncell[2]):
                c = np.array([0.5 * (xs[0][i] + xs[0][i + 1]),
                              0.5 * (xs[1][j] + xs[1][j + 1]),
                              0.5 * (xs[2][k] + xs[2][k + 1])])
                if np.all(np.abs(c) < b):
                    continue  # hole
                corners = [(xs[0][i], xs[1][j], xs[2][k]),
                           (xs[0][i + 1], xs[1][j], xs[2][k]),
                           (xs[0][i + 1], xs[1][j + 1], xs[2][k]),
                           (xs[0][i], xs[1][j + 1], xs[2][k]),
                           (xs[0][i], xs[1][j], xs[2][k + 1]),
                           (xs[0][i + 1], xs[1][j], xs[2][k + 1]),
                           (xs[0][i + 1], xs[1][j + 1], xs[2][k + 1]),
                           (xs[0][i], xs[1][j + 1], xs[2][k + 1])]
                elems.append([pool.add(p) for p in corners])
                blocks.append("ElasticOuter")

    mesh = HexMesh(nodes=np.array(pool.coords), elems=np.array(elems, dtype=int),
                   blocks=np.array(blocks))
    mesh.face_sets = classify_faces(mesh)
    mesh.pairings = mesh.face_sets.pop("_pairings", [])
    _check_element_quality(mesh)
    _check_sphere_surface(mesh, R)
    _check_pairing_areas(mesh)
    return mesh


def _check_sphere_surface(mesh, R):
    ids = set()
    for e1, f1, _e2, _f2 in mesh.face_sets.get("acoustic_elastic", []):
        ids.update(mesh.face_vertex_ids(e1, f1))
    if not ids:
        return
    r = np.linalg.norm(mesh.nodes[sorted(ids)], axis=1)
    if np.max(np.abs(r - R)) > 1e-12 * R:
        raise MeshError("sphere-surface vertices off r = R")


def _check_pairing_areas(mesh, rel_tol=1e-8):
    for pr in mesh.pairings:
        am = mesh.face_area(*pr.master)
        asl = sum(mesh.face_area(e, lf) for e, lf in pr.slaves)
        if abs(am - asl) > rel_tol * am:
            raise MeshError("non-conforming pairing does not conserve area")


# ---------------------------------------------------------------------------
# face classification
# ---------------------------------------------------------------------------

def classify_faces(mesh: HexMesh):
    """Recompute all face sets from connectivity and geometry alone.

    Returns a dict with `acoustic_elastic`, `box_conforming` (conforming
    same/cross-elastic block faces), `absorbing` (outer boundary) and, under
    the key `_pairings`, master/slave FacePairing records for non-conforming
    faces.  Raises TopologyError for dangling faces.
    """
    facemap = {}
    for e in range(mesh.n_elems):
        for lf in range(6):
            key = tuple(sorted(mesh.face_vertex_ids(e, lf)))
            facemap.setdefault(key, []).append((e, lf))

    sets = {"acoustic_elastic": [], "box_conforming": [], "absorbing": []}
    unmatched = []
    for key, members in facemap.items():
        if len(members) > 2:
            raise TopologyError(f"face shared by {len(members)} elements")
        if len(members) == 2:
            (e1, f1), (e2, f2) = members
            b1, b2 = mesh.blocks[e1], mesh.blocks[e2]
            if b1 != b2:
                pair = (e1, f1, e2, f2)
                if {b1, b2} == {"Acoustic", "ElasticInner"} or {b1, b2} == {"Acoustic", "ElasticOuter"}:
                    sets["acoustic_elastic"].append(pair)
                else:
                    sets["box_conforming"].append(pair)
            continue
        unmatched.append(members[0])

    # outer-boundary faces: centred on the domain's bounding box surface
    lo = mesh.nodes.min(axis=0)
    hi = mesh.nodes.max(axis=0)
    tol = 1e-7 * float(np.max(hi - lo))
    leftovers = []
    for e, lf in unmatched:
        c = mesh.face_center(e, lf)
        on_bnd = any(abs(c[d] - lo[d]) < tol or abs(c[d] - hi[d]) < tol
                     for d in range(3))
        if on_bnd:
            sets["absorbing"].append((e, lf))
        else:
            leftovers.append((e, lf))

    pairings = _pair_nonconforming(mesh, leftovers, tol)
    sets["_pairings"] = pairings
    sets["box_nonconforming"] = [fc for p in pairings
                                 for fc in [p.master] + list(p.slaves)]
    return sets


def _face_plane(mesh, e, lf, tol):
    """(axis, coordinate) of an axis-aligned face, or None."""
    v = mesh.nodes[list(mesh.face_vertex_ids(e, lf))]
    for d in range(3):
        if np.max(v[:, d]) - np.min(v[:, d]) < tol:
            return d, float(v[:, d].mean())
    return None


def _pair_nonconforming(mesh, faces, tol):
    if not faces:
        return []
    groups = {}
    for e, lf in faces:
        plane = _face_plane(mesh, e, lf, tol)
        if plane is None:
            raise TopologyError(f"dangling non-planar face ({e},{lf})")
        key = (plane[0], round(plane[1] / tol))
        groups.setdefault(key, []).append((e, lf))

    pairings = []
    used = set()
    for key, members in groups.items():
        axis = key[0]
        t1, t2 = (axis + 1) % 3, (axis + 2) % 3

        def bbox(e, lf):
            v = mesh.nodes[list(mesh.face_vertex_ids(e, lf))]
            return (v[:, t1].min(), v[:, t1].max(), v[:, t2].min(), v[:, t2].max())

        areas = [(mesh.face_area(e, lf), e, lf) for e, lf in members]
        amax = max(a for a, _, _ in areas)
        masters = [(e, lf) for a, e, lf in areas if a > 0.5 * amax * 1.999]
        if not masters:  # all same size but unmatched -> genuine danglers
            raise TopologyError("unpaired interior faces of equal size")
        slaves = [m for m in members if m not in masters]
        for me, mlf in masters:
            mb = bbox(me, mlf)
            mine = []
            for se, slf in slaves:
                if (se, slf) in used:
                    continue
                sb = bbox(se, slf)
                if (sb[0] >= mb[0] - tol and sb[1] <= mb[1] + tol and
                        sb[2] >= mb[2] - tol and sb[3] <= mb[3] + tol):
                    mine.append((se, slf))
                    used.add((se, slf))
            cover = sum(mesh.face_area(e, lf) for e, lf in mine)
            if abs(cover - mesh.face_area(me, mlf)) > 1e-8 * cover:
                raise TopologyError(
                    f"master face ({me},{mlf}) not fully covered by slaves")
            pairings.append(FacePairing(master=(me, mlf), slaves=mine))
    leftover = [m for m in faces if m not in used and m not in
                {p.master for p in pairings}]
    leftover = [m for m in leftover
                if not any(m in p.slaves for p in pairings)]
    if leftover:
        raise TopologyError(f"dangling faces: {leftover[:4]}")
    return pairings


def face_set_summary(mesh):
    out = {name: len(v) for name, v in mesh.face_sets.items()}
    out["pairings"] = len(mesh.pairings)
    out["slave_faces"] = sum(len(p.slaves) for p in mesh.pairings)
    return out


# ---------------------------------------------------------------------------
# text format and VTK export
# ---------------------------------------------------------------------------

def write_mesh_text(mesh: HexMesh):
    buf = io.StringIO()
    buf.write("# cavityscatter mesh v1\n")
    buf.write(f"NODES {len(mesh.nodes)}\n")
    for p in mesh.nodes:
        buf.write("%.17g %.17g %.17g\n" % tuple(p))
    buf.write(f"ELEMS {mesh.n_elems}\n")
    for conn, blk in zip(mesh.elems, mesh.blocks):
        buf.write(blk + " " + " ".join(str(v) for v in conn) + "\n")
    named = {k: v for k, v in mesh.face_sets.items() if not k.startswith("_")}
    buf.write(f"FACESETS {len(named)}\n")
    for name in sorted(named):
        entries = named[name]
        buf.write(f"SET {name} {len(entries)}\n")
        for entry in entries:
            buf.write(" ".join(str(x) for x in entry) + "\n")
    buf.write(f"PAIRINGS {len(mesh.pairings)}\n")
    for pr in mesh.pairings:
        buf.write(f"MASTER {pr.master[0]} {pr.master[1]} {len(pr.slaves)}\n")
        for e, lf in pr.slaves:
            buf.write(f"{e} {lf}\n")
    return buf.getvalue()


def read_mesh_text(text):
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    pos = 0

    def take():
        nonlocal pos
        ln = lines[pos]
        pos += 1
        return ln

    head = take().split()
    assert head[0] == "NODES"
    nn = int(head[1])
    nodes = np.array([[float(v) for v in take().split()] for _ in range(nn)])
    head = take().split()
    assert head[0] == "ELEMS"
    ne = int(head[1])
    elems, blocks = [], []
    for _ in range(ne):
        parts = take().split()
        blocks.append(parts[0])
        elems.append([int(v) for v in parts[1:9]])
    head = take().split()
    assert head[0] == "FACESETS"
    sets = {}
    for _ in range(int(head[1])):
        _, name, cnt = take().split()
        entries = []
        for _ in range(int(cnt)):
            entries.append(tuple(int(v) for v in take().split()))
        sets[name] = entries
    pairings = []
    if pos < len(lines):
        head = take().split()
        assert head[0] == "PAIRINGS"
        for _ in range(int(head[1])):
            parts = take().split()
            master = (int(parts[1]), int(parts[2]))
            slaves = [tuple(int(v) for v in take().split())
                      for _ in range(int(parts[3]))]
            pairings.append(FacePairing(master=master, slaves=slaves))
    return HexMesh(nodes=nodes, elems=np.array(elems, dtype=int),
                   blocks=np.array(blocks), face_sets=sets, pairings=pairings)


def write_vtk(mesh: HexMesh, path, point_data=None):
    """Legacy-VTK-ASCII unstructured-grid export (optionally with a named
    3-vector point field)."""
    with open(path, "w") as f:
        f.write("# vtk DataFile Version 3.0\ncavityscatter mesh\nASCII\n")
        f.write("DATASET UNSTRUCTURED_GRID\n")
        f.write(f"POINTS {len(mesh.nodes)} double\n")
        for p in mesh.nodes:
            f.write("%.9g %.9g %.9g\n" % tuple(p))
        f.write(f"CELLS {mesh.n_elems} {mesh.n_elems * 9}\n")
        for conn in mesh.elems:
            f.write("8 " + " ".join(str(v) for v in conn) + "\n")
        f.write(f"CELL_TYPES {mesh.n_elems}\n")
        f.write("\n".join(["12"] * mesh.n_elems) + "\n")
        f.write(f"CELL_DATA {mesh.n_elems}\n")
        f.write("SCALARS block int 1\nLOOKUP_TABLE default\n")
        f.write("\n".join(str(BLOCKS.index(b)) for b in mesh.blocks) + "\n")
        if point_data:
            f.write(f"POINT_DATA {len(mesh.nodes)}\n")
            for name, arr in point_data.items():
                f.write(f"VECTORS {name} double\n")
                for v in arr:
                    f.write("%.9g %.9g %.9g\n" % tuple(v))
