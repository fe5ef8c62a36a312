"""Degree-of-freedom numbering for block-wise continuous spectral elements.

Nodes are shared (continuous) inside each region; a region is a maximal set
of blocks glued through conforming interfaces that are NOT flux-coupled.
The acoustic-elastic interface and all non-conforming pairings are always
flux-coupled, so their nodes are duplicated per side.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..basis import get_basis
from ..mesh import LOCAL_FACES, REF_VERTS, HexMesh, reference_map


@dataclass
class BlockData:
    """Per-block element bundle sharing one polynomial degree."""

    name: str
    degree: int
    elements: np.ndarray        # element ids in mesh numbering
    gidx: np.ndarray            # (ne, n1d^3) global node ids
    coords: np.ndarray          # (ne, n1d^3, 3) node positions
    jinv: np.ndarray = field(default=None, repr=False)   # (ne, npts, 3, 3)
    wdet: np.ndarray = field(default=None, repr=False)   # (ne, npts)

    @property
    def n1d(self):
        return self.degree + 1


@dataclass
class DofMap:
    mesh: HexMesh
    degrees: dict               # block name -> N
    blocks: list                # BlockData, one per block present
    n_nodes: int
    node_coords: np.ndarray     # (n_nodes, 3)
    elem_block: np.ndarray      # element id -> index into self.blocks
    regions: dict               # block name -> region id
    dg_sets: set = field(default_factory=set)

    @property
    def n_dof(self):
        return 3 * self.n_nodes

    def block_of(self, e):
        return self.blocks[self.elem_block[e]]

    def element_gidx(self, e):
        blk = self.block_of(e)
        row = np.where(blk.elements == e)[0][0]
        return blk.gidx[row]

    def element_coords(self, e):
        blk = self.block_of(e)
        row = np.where(blk.elements == e)[0][0]
        return blk.coords[row]


def _local_grid(n1d):
    """Reference GLL lattice, index (i,j,k) flattened with k fastest."""
    g = get_basis(n1d - 1).nodes
    pts = np.array([[a, b, c] for a in g for b in g for c in g])
    return pts


def _regions_from_glue(mesh: HexMesh, dg_sets):
    """Union-find over blocks: conforming cross-block faces glue their blocks
    unless the face set is flux-coupled."""
    names = list(dict.fromkeys(mesh.blocks.tolist()))
    parent = {b: b for b in names}

    def find(b):
        while parent[b] != b:
            parent[b] = parent[parent[b]]
            b = parent[b]
        return b

    for setname, entries in mesh.face_sets.items():
        if setname.startswith("_") or setname in dg_sets:
            continue
        if setname in ("absorbing", "box_nonconforming"):
            continue
        for entry in entries:
            if len(entry) == 4:
                b1, b2 = mesh.blocks[entry[0]], mesh.blocks[entry[2]]
                if b1 != b2:
                    parent[find(b1)] = find(b2)
    return {b: find(b) for b in names}


def build_dofmap(mesh: HexMesh, degrees, dg_sets=("acoustic_elastic",)) -> DofMap:
    """Number GLL nodes; `degrees` maps block name -> polynomial degree.

    dg_sets lists conforming face sets treated discontinuously (the
    acoustic-elastic interface always is; pass `box_conforming` as well to
    flux-couple a matching box interface instead of merging it).
    """
    dg_sets = set(dg_sets) | {"acoustic_elastic"}
    region_of = _regions_from_glue(mesh, dg_sets)
    # blocks glued into one region must agree on the degree
    for b1, r1 in region_of.items():
        for b2, r2 in region_of.items():
            if r1 == r2 and degrees[b1] != degrees[b2]:
                raise ValueError(
                    f"blocks {b1}/{b2} are merged but have different degrees")

    scale = float(np.max(mesh.nodes.max(axis=0) - mesh.nodes.min(axis=0)))
    tol = 1e-9 * scale
    index = {}
    coords = []

    def node_id(region, p):
        key = (region, int(round(p[0] / tol)), int(round(p[1] / tol)),
               int(round(p[2] / tol)))
        idx = index.get(key)
        if idx is None:
            idx = len(coords)
            index[key] = idx
            coords.append(p)
        return idx

    blocks = []
    elem_block = np.full(mesh.n_elems, -1, dtype=int)
    names = list(dict.fromkeys(mesh.blocks.tolist()))
    for bi, name in enumerate(names):
        degree = degrees[name]
        n1d = degree + 1
        ref = _local_grid(n1d)
        els = np.where(mesh.blocks == name)[0]
        gidx = np.empty((len(els), n1d ** 3), dtype=np.int64)
        xyz = np.empty((len(els), n1d ** 3, 3))
        region = region_of[name]
        sh = 0.125 * np.prod(1.0 + REF_VERTS[None, :, :] * ref[:, None, :], axis=2)
        for row, e in enumerate(els):
            rm = reference_map(mesh, e)
            pts = sh @ rm.vertices
            xyz[row] = pts
            for li, p in enumerate(pts):
                gidx[row, li] = node_id(region, p)
        blocks.append(BlockData(name=name, degree=degree, elements=els,
                                gidx=gidx, coords=xyz))
        elem_block[els] = bi

    return DofMap(mesh=mesh, degrees=dict(degrees), blocks=blocks,
                  n_nodes=len(coords), node_coords=np.array(coords),
                  elem_block=elem_block, regions=region_of, dg_sets=dg_sets)


def face_local_indices(n1d, local_face):
    """Element-local flat indices of the (n1d x n1d) nodes on a local face,
    ordered by the face's own (a, b) lattice."""
    idx3 = np.arange(n1d ** 3).reshape(n1d, n1d, n1d)
    axis, val, _ = LOCAL_FACES[local_face]
    sl = [slice(None)] * 3
    sl[axis] = 0 if val < 0 else n1d - 1
    return idx3[tuple(sl)].reshape(-1)
