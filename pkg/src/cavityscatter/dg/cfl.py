"""Time-step control for the explicit leap-frog scheme."""

from __future__ import annotations

import numpy as np

from ..basis import get_basis
from .dofmap import DofMap

CFL_SAFETY = 0.2
CFL_CONST = 0.175


def cfl_formula(h_min, vp_max, safety=CFL_SAFETY, const=CFL_CONST):
    """dt = safety * const * h_min / vp_max."""
    return safety * const * h_min / vp_max


def min_gll_spacing(dof: DofMap):
    """Smallest distance between neighbouring GLL node images over all
    elements (scanning the three lattice directions)."""
    h = np.inf
    for blk in dof.blocks:
        n = blk.n1d
        xyz = blk.coords.reshape(len(blk.elements), n, n, n, 3)
        for axis in (1, 2, 3):
            d = np.diff(xyz, axis=axis)
            h = min(h, float(np.min(np.linalg.norm(d, axis=-1))))
    return h


def cfl_dt(dof: DofMap, mats, safety=CFL_SAFETY, const=CFL_CONST):
    """Paper-formula time step with h_min = minimal GLL node-spacing image."""
    vp_max = max(m.vp for m in mats.values())
    return cfl_formula(min_gll_spacing(dof), vp_max, safety, const)


def stability_limit(system, n_iter=60, seed=0):
    """Estimate the true leap-frog bound dt* = 2/sqrt(lambda_max(M0^-1 Q))
    by power iteration on Q = A + M2."""
    rng = np.random.default_rng(seed)
    dof = system.dof
    x = rng.normal(size=(dof.n_nodes, 3))
    x /= np.linalg.norm(x)
    lam = 0.0
    minv = 1.0 / system.m0[:, None]
    for _ in range(n_iter):
        y = system.apply_stiffness(x)
        system.apply_m2(x, y)
        y *= minv
        lam = float(np.linalg.norm(y.reshape(-1)))
        x = y / lam
    return 2.0 / np.sqrt(lam)
