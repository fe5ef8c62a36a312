"""Leap-frog time integration of M0 u'' + M1 u' + (M2 + A) u = F(t).

Scheme (damped leap-frog; the velocity matrix M1 appears symmetrically):
    M0 U_1 = dt^2/2 F_0,
    (M0 + dt/2 M1) U_{n+1} = (2 M0 - dt^2 Q) U_n + (-M0 + dt/2 M1) U_{n-1}
                             + dt^2 F_n,          Q = A + M2.
With GLL collocation M0 is diagonal and M1 couples only the three components
at each absorbing-boundary node, so the per-step solve is a precomputed
3x3-block scaling.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..basis import get_basis, lagrange_values
from ..mesh import reference_map
from .assembly import SemiDiscreteSystem
from .dofmap import DofMap


class StabilityError(RuntimeError):
    """Energy blow-up detected: the time step violates the CFL bound."""


@dataclass
class Receiver:
    location: np.ndarray
    element: int
    weights: np.ndarray       # interpolation weights over element nodes
    gidx: np.ndarray


def locate_point(dof: DofMap, x, prefer_block=None):
    """Element containing x and its interpolation data.  prefer_block breaks
    ties for points on an interface ('Acoustic' picks the interior side)."""
    from .assembly import _invert_trilinear
    x = np.asarray(x, dtype=float)
    best = None
    for blk in dof.blocks:
        for row, e in enumerate(blk.elements):
            verts = dof.mesh.element_vertices(e)
            lo, hi = verts.min(axis=0), verts.max(axis=0)
            pad = 1e-9 * float(np.max(hi - lo)) + 1e-12
            if np.any(x < lo - pad) or np.any(x > hi + pad):
                continue
            rm = reference_map(dof.mesh, e)
            xi = _invert_trilinear(rm, x)
            err = np.linalg.norm(rm.map(np.clip(xi, -1, 1)) - x)
            inside = np.max(np.abs(xi)) <= 1.0 + 1e-7
            if not inside or err > 1e-6 * max(1.0, np.linalg.norm(x)):
                continue
            rank = (0 if (prefer_block is None or blk.name == prefer_block) else 1,
                    float(np.max(np.abs(xi))))
            if best is None or rank < best[0]:
                best = (rank, blk, row, e, np.clip(xi, -1, 1))
    if best is None:
        raise ValueError(f"point {x} not inside any element")
    _, blk, row, e, xi = best
    b = get_basis(blk.degree)
    lv = [lagrange_values(b.nodes, [xi[d]])[0] for d in range(3)]
    w = np.einsum("i,j,k->ijk", lv[0], lv[1], lv[2]).reshape(-1)
    return Receiver(location=x, element=e, weights=w, gidx=blk.gidx[row])


@dataclass
class LeapfrogResult:
    times: np.ndarray
    seismograms: np.ndarray            # (n_receivers, 3, n_steps)
    energy: np.ndarray
    snapshots: dict = field(default_factory=dict)
    n_steps: int = 0


def leapfrog_run(system: SemiDiscreteSystem, dt, n_steps, sources=(),
                 receivers=(), snapshot_times=(), snapshot_sampler=None,
                 energy_every=10, blowup_factor=1e6, source_active_until=None,
                 progress=None):
    """Run the scheme; receivers are Receiver records (see locate_point).

    Returns LeapfrogResult.  Raises StabilityError when the discrete energy
    turns non-finite, or -- after `source_active_until` (seconds) -- when it
    exceeds blowup_factor times the maximum reached while the source acted.
    A CFL violation overflows to non-finite energy within a few hundred
    steps, so the non-finite check alone already detects instability.
    """
    dof = system.dof
    nn = dof.n_nodes
    u_prev = np.zeros((nn, 3))
    u_curr = np.zeros((nn, 3))

    minv_diag = 1.0 / system.m0
    # per-node inverse of (M0 + dt/2 M1) where M1 acts
    bn = system.m1_nodes if system.m1_nodes is not None else np.empty(0, dtype=int)
    inv_blocks = None
    if len(bn):
        blocks = (system.m0[bn, None, None] * np.eye(3)[None]
                  + 0.5 * dt * system.m1_blocks)
        inv_blocks = np.linalg.inv(blocks)

    def solve_lhs(rhs):
        out = rhs * minv_diag[:, None]
        if len(bn):
            out[bn] = np.einsum("bij,bj->bi", inv_blocks, rhs[bn])
        return out

    times = dt * np.arange(n_steps)
    seis = np.zeros((len(receivers), 3, n_steps))
    energy = np.zeros(n_steps)
    snaps = {}
    snap_steps = {int(round(ts / dt)): ts for ts in snapshot_times}

    f_buf = np.zeros((nn, 3))
    e_ref = 0.0

    def record(istep, u):
        for r, rec in enumerate(receivers):
            seis[r, :, istep] = rec.weights @ u[rec.gidx]

    record(0, u_curr)                       # U_0 = 0

    # first step: M0 U_1 = dt^2/2 F_0
    for s in sources:
        s(times[0], f_buf)
    u_next = 0.5 * dt * dt * f_buf * minv_diag[:, None]
    if n_steps > 1:
        record(1, u_next)

    for nstep in range(2, n_steps):
        # computing U_nstep from U_{nstep-1} (u_curr) and U_{nstep-2} (u_prev)
        u_prev, u_curr = u_curr, u_next

        qun = system.apply_stiffness(u_curr)
        m2un = system.apply_m2(u_curr)
        rhs = 2.0 * system.m0[:, None] * u_curr - dt * dt * (qun + m2un)
        rhs -= system.m0[:, None] * u_prev
        if len(bn):
            rhs[bn] += 0.5 * dt * np.einsum("bij,bj->bi", system.m1_blocks, u_prev[bn])
        f_buf[:] = 0.0
        for s in sources:
            s(times[nstep - 1], f_buf)
        rhs += dt * dt * f_buf
        u_next = solve_lhs(rhs)

        record(nstep, u_next)
        if nstep in snap_steps and snapshot_sampler is not None:
            snaps[snap_steps[nstep]] = snapshot_sampler(u_next)

        # discrete energy monitor (A only, per the scheme's invariant)
        if nstep % energy_every == 0 or nstep == n_steps - 1:
            aun = qun - m2un
            kin = 0.5 * np.sum(system.m0[:, None] * (u_next - u_curr) ** 2) / dt ** 2
            pot = 0.5 * float(np.sum(u_next * aun))
            e_n = kin + pot
            energy[nstep] = e_n
            if not np.isfinite(e_n):
                raise StabilityError(
                    f"non-finite energy at step {nstep}; dt={dt:.3e} exceeds the CFL bound")
            if source_active_until is None or nstep * dt <= source_active_until:
                e_ref = max(e_ref, e_n)
            elif e_ref > 0 and e_n > blowup_factor * e_ref:
                raise StabilityError(
                    f"energy blow-up at step {nstep} (E/E_ref = {e_n / e_ref:.2e}); "
                    f"dt={dt:.3e} exceeds the CFL bound")
        if progress and nstep % progress == 0:
            print(f"  step {nstep}/{n_steps}", flush=True)

    return LeapfrogResult(times=times, seismograms=seis, energy=energy,
                          snapshots=snaps, n_steps=n_steps)
