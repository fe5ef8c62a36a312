"""Pure-NumPy volume-stiffness kernels (fallback when the compiled extension
is unavailable).  Batched einsum over all elements of a block."""

from __future__ import annotations

import numpy as np


def apply_volume_block(diff, gidx, jinv, wdet, lam, mu, u, out):
    """Accumulate the elastic volume term  out += K u  for one element block.

    diff: (n, n) 1D differentiation matrix; gidx: (ne, n^3) node ids;
    jinv: (ne, npts, 3, 3) with jinv[..., d, x] = d xi_d / d x_x;
    wdet: (ne, npts) quadrature weight * |det J|; lam/mu: (ne,) moduli;
    u: (n_nodes, 3) state; out: (n_nodes, 3) accumulator.
    """
    ne, npts = wdet.shape
    n = diff.shape[0]
    ul = u[gidx].reshape(ne, n, n, n, 3)

    g = np.empty((ne, 3, npts, 3))
    g[:, 0] = np.einsum("ab,ebjkc->eajkc", diff, ul).reshape(ne, npts, 3)
    g[:, 1] = np.einsum("ab,eibkc->eiakc", diff, ul).reshape(ne, npts, 3)
    g[:, 2] = np.einsum("ab,eijbc->eijac", diff, ul).reshape(ne, npts, 3)

    # physical gradient gx[e,p,x,c] = sum_d jinv[e,p,d,x] g[e,d,p,c]
    gx = np.einsum("epdx,edpc->epxc", jinv, g)
    div = np.trace(gx, axis1=2, axis2=3)
    eps = 0.5 * (gx + np.swapaxes(gx, 2, 3))
    sig = 2.0 * mu[:, None, None, None] * eps
    ii = np.arange(3)
    sig[:, :, ii, ii] += lam[:, None, None] * div[:, :, None]

    # td[e,d,p,c] = wdet * sum_x jinv[e,p,d,x] sig[e,p,x,c]
    td = np.einsum("epdx,epxc->edpc", jinv, sig) * wdet[:, None, :, None]
    td = td.reshape(ne, 3, n, n, n, 3)

    y = np.einsum("ba,ebjkc->eajkc", diff, td[:, 0])
    y += np.einsum("ba,eibkc->eiakc", diff, td[:, 1])
    y += np.einsum("ba,eijbc->eijac", diff, td[:, 2])

    np.add.at(out, gidx.reshape(-1), y.reshape(-1, 3))


def lumped_mass_block(gidx, wdet, rho, n_nodes):
    """Diagonal (lumped) mass per node from one block."""
    m = np.zeros(n_nodes)
    np.add.at(m, gidx.reshape(-1), (rho[:, None] * wdet).reshape(-1))
    return m
