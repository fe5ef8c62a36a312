"""1D spectral-element column experiments.

A thin vertical column carrying plane P-wave motion u_z(z, t): continuous GLL
elements within each material segment, SIPG coupling at material interfaces,
exact dashpot absorbers (t = -rho vp du/dt) at both ends.  Used to validate
the impedance physics of the acoustic-elastic interface, absorbing-boundary
reflection, and the scattered-field injection (volume + interface terms)
against a direct total-field run.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..basis import get_basis
from ..materials import Material
from ..synth import RickerParams, ricker, ricker_derivative


@dataclass
class Column:
    z_elem: np.ndarray        # (ne, 2) element extents
    mater: list               # per-element Material
    gidx: np.ndarray          # (ne, n1d) global node ids
    z_node: np.ndarray        # (n_nodes,)
    degree: int
    interfaces: list          # (left elem, right elem) DG-coupled pairs

    @property
    def n_nodes(self):
        return len(self.z_node)


def build_column(segments, degree, elems_per_segment):
    """segments: [(z_lo, z_hi, Material), ...] contiguous bottom-up; nodes are
    shared within a segment and duplicated at segment boundaries."""
    b = get_basis(degree)
    n1d = degree + 1
    z_elem, mats, gidx, z_node = [], [], [], []
    interfaces = []
    last_right_node = None
    eidx = 0
    for si, (z0, z1, mat) in enumerate(segments):
        edges = np.linspace(z0, z1, elems_per_segment[si] + 1)
        for k in range(elems_per_segment[si]):
            lo, hi = edges[k], edges[k + 1]
            pts = lo + (b.nodes + 1) * 0.5 * (hi - lo)
            ids = []
            for j, z in enumerate(pts):
                if j == 0 and k > 0:
                    ids.append(gidx[-1][-1])     # share within segment
                else:
                    z_node.append(z)
                    ids.append(len(z_node) - 1)
            z_elem.append((lo, hi))
            mats.append(mat)
            gidx.append(ids)
            if k == 0 and si > 0:
                interfaces.append((eidx - 1, eidx))
            eidx += 1
    return Column(z_elem=np.array(z_elem), mater=mats,
                  gidx=np.array(gidx, dtype=int), z_node=np.array(z_node),
                  degree=degree, interfaces=interfaces)


@dataclass
class System1D:
    col: Column
    m0: np.ndarray
    a_mat: np.ndarray         # dense stiffness (columns are short)
    m1: np.ndarray            # diagonal damping (absorbing ends)

    def apply_a(self, u):
        return self.a_mat @ u


def assemble_column(col: Column, alpha=10.0, absorbing=(True, True)):
    b = get_basis(col.degree)
    n1d = col.degree + 1
    nn = col.n_nodes
    m0 = np.zeros(nn)
    A = np.zeros((nn, nn))
    for e in range(len(col.mater)):
        lo, hi = col.z_elem[e]
        jac = 0.5 * (hi - lo)
        mod = col.mater[e].rho * col.mater[e].vp ** 2
        ids = col.gidx[e]
        m0[ids] += col.mater[e].rho * b.weights * jac
        ke = mod / jac * (b.diff.T * b.weights) @ b.diff
        A[np.ix_(ids, ids)] += ke

    # SIPG at material interfaces: jump [v] = v_L - v_R, {M u'} averaged
    for eL, eR in col.interfaces:
        idsL, idsR = col.gidx[eL], col.gidx[eR]
        nL, nR = idsL[-1], idsR[0]
        h = min(col.z_elem[eL][1] - col.z_elem[eL][0],
                col.z_elem[eR][1] - col.z_elem[eR][0])
        modL = col.mater[eL].rho * col.mater[eL].vp ** 2
        modR = col.mater[eR].rho * col.mater[eR].vp ** 2
        eta = alpha * max(modL, modR) * col.degree ** 2 / h
        jacL = 0.5 * (col.z_elem[eL][1] - col.z_elem[eL][0])
        jacR = 0.5 * (col.z_elem[eR][1] - col.z_elem[eR][0])
        dL = modL * b.diff[-1] / jacL          # M u'(top of left element)
        dR = modR * b.diff[0] / jacR
        jump = np.zeros(nn)
        jump[nL] += 1.0
        jump[nR] -= 1.0
        flux = np.zeros(nn)
        flux[idsL] += 0.5 * dL
        flux[idsR] += 0.5 * dR
        A -= np.outer(jump, flux) + np.outer(flux, jump)
        A += eta * np.outer(jump, jump)

    m1 = np.zeros(nn)
    if absorbing[0]:
        e0 = 0
        m1[col.gidx[e0][0]] += col.mater[e0].rho * col.mater[e0].vp
    if absorbing[1]:
        eN = len(col.mater) - 1
        m1[col.gidx[eN][-1]] += col.mater[eN].rho * col.mater[eN].vp
    return System1D(col=col, m0=m0, a_mat=A, m1=m1)


def leapfrog_column(sysm: System1D, dt, n_steps, force, monitors):
    """force(t, out) accumulates the load; monitors are node ids."""
    nn = sysm.col.n_nodes
    up = np.zeros(nn)
    uc = np.zeros(nn)
    lhs_inv = 1.0 / (sysm.m0 + 0.5 * dt * sysm.m1)
    seis = np.zeros((len(monitors), n_steps))
    f = np.zeros(nn)
    force(0.0, f)
    un = 0.5 * dt * dt * f / sysm.m0
    seis[:, 1] = un[monitors]
    for ns in range(2, n_steps):
        up, uc = uc, un
        f[:] = 0.0
        force((ns - 1) * dt, f)
        rhs = (2.0 * sysm.m0 * uc - dt * dt * sysm.apply_a(uc)
               - sysm.m0 * up + 0.5 * dt * sysm.m1 * up + dt * dt * f)
        un = lhs_inv * rhs
        seis[:, ns] = un[monitors]
    return dt * np.arange(n_steps), seis


def dt_for(col: Column, safety=0.2, const=0.175):
    b = get_basis(col.degree)
    gap = np.min(np.diff(b.nodes))
    h = np.min(col.z_elem[:, 1] - col.z_elem[:, 0])
    vmax = max(m.vp for m in col.mater)
    return safety * const * (h * gap / 2) / vmax


def plane_force(col: Column, profile: RickerParams, z0):
    """phi(t) delta(z - z0): unit point load at the matching node."""
    idx = int(np.argmin(np.abs(col.z_node - z0)))
    if abs(col.z_node[idx] - z0) > 1e-9 * (abs(z0) + 1):
        raise ValueError("z0 must coincide with a mesh node")

    def f(t, out):
        out[idx] += ricker(profile, t)
    return f


def scattered_sources(col: Column, acoustic: Material, exterior: Material,
                      profile: RickerParams, z0, z_interfaces):
    """Volume + interface loads of the 1D scattered-field formulation for an
    acoustic slab embedded in the elastic column (source plane below)."""
    b = get_basis(col.degree)
    c_amp = 1.0 / (2.0 * exterior.rho * exterior.vp)
    mod_a = acoustic.rho * acoustic.vp ** 2
    mod_e = exterior.rho * exterior.vp ** 2
    vol_coef = mod_a / exterior.vp ** 2 - acoustic.rho

    rows = []
    for e in range(len(col.mater)):
        if col.mater[e] is not acoustic:
            continue
        lo, hi = col.z_elem[e]
        jac = 0.5 * (hi - lo)
        z = lo + (b.nodes + 1) * jac
        rows.append((col.gidx[e], b.weights * jac, z))

    # interface terms with {v} = mean of the duplicated nodes; n_a outward
    # from the acoustic slab
    iface = []
    for eL, eR in col.interfaces:
        zi = col.z_elem[eL][1]
        if not np.any(np.isclose(z_interfaces, zi)):
            continue
        na = -1.0 if col.mater[eR] is acoustic else 1.0
        iface.append((col.gidx[eL][-1], col.gidx[eR][0], zi, na))

    def f(t, out):
        for ids, w, z in rows:
            tau = t - np.abs(z - z0) / exterior.vp
            out[ids] += w * c_amp * vol_coef * ricker_derivative(profile, tau)
        for nL, nR, zi, na in iface:
            tau = t - abs(zi - z0) / exterior.vp
            gp = c_amp * ricker(profile, tau)
            tval = -(gp / exterior.vp) * (mod_e - mod_a) * na
            out[nL] += 0.5 * tval
            out[nR] += 0.5 * tval
    return f
