"""Time-dependent load vectors.

PlaneForceSource: body force phi(t) delta(z - z0) e_z applied on a grid plane
inside the domain (direct total-field runs).

ScatteredFieldSource: scattered-field injection of the closed-form plane
pulse.  Volume part over the acoustic block: (-rho_a d2u_I + div sigma_a(u_I))
= C phi'(tau) (lambda_a / vp_e^2 - rho_a) e_z with tau = t - (z - z0)/vp_e and
C = 1/(2 rho_e vp_e).  Because the incident traction jumps across the
material interface while the total field's traction is continuous, the
scattered field needs the compensating interface load
    F(v) += int_F (sigma_a(u_I) - sigma_e(u_I)) n_e . {v} dGamma,
with n_e outward from the elastic side.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..materials import Material
from ..synth import RickerParams, ricker, ricker_derivative
from .assembly import _face_quad
from .dofmap import DofMap


@dataclass
class PlaneForceSource:
    """phi(t) delta(z - z0) e_z; z0 must lie on a mesh node plane."""

    dof: DofMap
    profile: RickerParams
    z0: float
    shape: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        dof = self.dof
        load = np.zeros(dof.n_nodes)
        tol = 1e-6 * float(np.max(np.abs(dof.node_coords))) + 1e-12
        hits = 0
        for blk in dof.blocks:
            n = blk.n1d
            coords = blk.coords.reshape(len(blk.elements), n, n, n, 3)
            # quadrature over the z0-plane: pick the element faces lying on it
            for row in range(len(blk.elements)):
                zline = coords[row, 0, 0, :, 2]
                for k in (0, n - 1):
                    if abs(zline[k] - self.z0) < tol:
                        # 2D GLL weights on that face
                        from ..basis import get_basis
                        from ..mesh import reference_map
                        b = get_basis(blk.degree)
                        rm = reference_map(dof.mesh, blk.elements[row])
                        for i in range(n):
                            for j in range(n):
                                li = (i * n + j) * n + k
                                ref = np.array([b.nodes[i], b.nodes[j], b.nodes[k]])
                                jac, _ = rm.jacobian(ref)
                                area = np.linalg.norm(np.cross(jac[:, 0], jac[:, 1]))
                                load[blk.gidx[row, li]] += 0.5 * b.weights[i] * b.weights[j] * area
                        hits += 1
        if hits == 0:
            raise ValueError(f"z0 = {self.z0} does not lie on a mesh plane")
        # each interior plane is visited from both adjacent element layers,
        # hence the 0.5 factor above
        self.shape = load

    def __call__(self, t, out):
        out[:, 2] += ricker(self.profile, t) * self.shape
        return out


@dataclass
class ScatteredFieldSource:
    dof: DofMap
    interior: Material
    exterior: Material
    profile: RickerParams
    z0: float

    def __post_init__(self):
        dof = self.dof
        self.c_amp = 1.0 / (2.0 * self.exterior.rho * self.exterior.vp)
        self.vol_coef = self.interior.lam / self.exterior.vp ** 2 - self.interior.rho
        # volume quadrature data over acoustic elements
        vol_nodes, vol_w, vol_z = [], [], []
        for blk in dof.blocks:
            mat_is_acoustic = blk.name == "Acoustic"
            if not mat_is_acoustic:
                continue
            vol_nodes.append(blk.gidx.reshape(-1))
            vol_w.append(blk.wdet.reshape(-1))
            vol_z.append(blk.coords.reshape(-1, 3)[:, 2])
        self.vol_nodes = np.concatenate(vol_nodes) if vol_nodes else np.empty(0, dtype=int)
        self.vol_w = np.concatenate(vol_w) if vol_w else np.empty(0)
        self.vol_z = np.concatenate(vol_z) if vol_z else np.empty(0)

        # interface quadrature: acoustic-elastic faces, quadrature on the
        # higher-degree side exactly like the SIPG assembly
        f_nodes, f_w, f_z, f_tvec_unit, f_other_nodes, f_other_val = [], [], [], [], [], []
        dlam = self.exterior.lam - self.interior.lam
        dmu = self.exterior.mu
        from .assembly import _interp_rows
        from .dofmap import face_local_indices
        for e1, f1, e2, f2 in dof.mesh.face_sets.get("acoustic_elastic", []):
            d1, d2 = dof.block_of(e1).degree, dof.block_of(e2).degree
            (eq, lq, eo, lo) = (e1, f1, e2, f2) if d1 >= d2 else (e2, f2, e1, f1)
            q = _face_quad(dof, eq, lq)
            # normal outward from the acoustic side
            sign = 1.0 if dof.block_of(eq).name == "Acoustic" else -1.0
            n_a = sign * q["normal"]
            val_o, _ = _interp_rows(dof, eo, q["pts"], snap_face=lo)
            fidx_o = face_local_indices(dof.block_of(eo).n1d, lo)
            blk_o, row_o = dof.block_of(eo), int(np.where(dof.block_of(eo).elements == eo)[0][0])
            gids_o = blk_o.gidx[row_o][fidx_o]
            for m in range(len(q["gids"])):
                na = n_a[m]
                # (sigma_a - sigma_e)(u_I) n_a with grad u_I = -g' / vp e_z e_z
                # => t = (-g'/vp) [ (lam_a - lam_e) n_a + 2 mu_e n_a_z e_z ] * (-1)
                tvec = (dlam * na + 2 * dmu * na[2] * np.array([0.0, 0.0, 1.0]))
                # full vector applied with scalar time factor g'(tau)/vp later
                f_nodes.append(int(q["gids"][m]))
                f_w.append(0.5 * q["w"][m])
                f_z.append(float(q["pts"][m][2]))
                f_tvec_unit.append(tvec)
                f_other_nodes.append(gids_o)
                f_other_val.append(0.5 * q["w"][m] * val_o[m][fidx_o])
        self.f_nodes = np.array(f_nodes, dtype=int)
        self.f_w = np.array(f_w)
        self.f_z = np.array(f_z)
        self.f_tvec = np.array(f_tvec_unit).reshape(-1, 3) if f_tvec_unit else np.empty((0, 3))
        self.f_other_nodes = np.array(f_other_nodes, dtype=int) if f_other_nodes else np.empty((0, 0), dtype=int)
        self.f_other_val = np.array(f_other_val) if f_other_val else np.empty((0, 0))

    def _tau(self, z, t):
        return t - np.abs(z - self.z0) / self.exterior.vp

    def __call__(self, t, out):
        # volume: C phi'(tau) (lam_a/vp^2 - rho_a) e_z
        if len(self.vol_nodes):
            amp = self.c_amp * self.vol_coef * ricker_derivative(
                self.profile, self._tau(self.vol_z, t))
            np.add.at(out[:, 2], self.vol_nodes, self.vol_w * amp)
        # interface: (sigma_e - sigma_a)(u_I) n_a . {v};
        # sigma_i(u_I) = -g'(tau)/vp [lam_i I + 2 mu_i e_z e_z], g' = C phi,
        # valid for a source plane below the inclusion (z0 < z on Gamma_I)
        if len(self.f_nodes):
            gp = self.c_amp * ricker(self.profile, self._tau(self.f_z, t))
            scal = -gp / self.exterior.vp
            tv = self.f_tvec * scal[:, None]
            np.add.at(out, self.f_nodes, self.f_w[:, None] * tv)
            contrib = self.f_other_val[:, :, None] * tv[:, None, :]
            np.add.at(out, self.f_other_nodes.reshape(-1), contrib.reshape(-1, 3))
        return out
