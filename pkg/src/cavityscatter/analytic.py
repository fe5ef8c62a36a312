"""Frequency-domain modal solver for plane P-wave scattering by a sphere.

The displacement in each region is expanded on the axisymmetric Petrashen
basis.  Per order l the field splits into a compressional constituent
(gradient of F_l(kr) P_l, radial family F) and a shear (SV) constituent;
their radial displacement/traction factors reduce every interface condition
to a small complex linear system per order.

Conventions: time factor e^{-i omega t}; the incident wave is the unit plane
wave ẑ e^{i k z} travelling towards +z; outgoing scattered waves therefore
carry spherical Hankel functions of the first kind.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import specfun
from .materials import FrequencyContext, Material, SphereConfig

#: margin added to ceil(kp_e R) for the default series truncation
L_MARGIN = 12


def default_l_max(ctx: FrequencyContext, radius):
    # the slowest medium carries the largest wavenumber and so the slowest
    # modal decay; the margin must sit on top of max(kp_e, kp_a)
    return int(np.ceil(max(ctx.kp_e, ctx.kp_a) * radius)) + L_MARGIN


@dataclass(frozen=True)
class ModalCoefficients:
    """Scattering coefficients for one order l.

    a1/b1: interior compressional/shear amplitudes, a2/b2 exterior.  For an
    acoustic interior b1 is identically zero.  `residual` is the relative
    residual of the interface system, `cond` its 1-norm condition number.
    """

    l: int
    a1: complex
    b1: complex
    a2: complex
    b2: complex
    residual: float
    cond: float

    @property
    def flagged(self):
        """True when the truncated system was near machine-singular."""
        return self.cond > 1e14


@dataclass(frozen=True)
class FieldSample:
    location: np.ndarray
    displacement: np.ndarray


def incident_phase(l):
    """Per-order phase of the plane-wave expansion, i^(l+1)."""
    return 1j ** ((l + 1) % 4)


class _Radial:
    """Radial displacement/traction factors of one wave constituent.

    For a compressional constituent `coef * [F_{l+1}(kr) Y+ - F_{l-1}(kr) Y-]`
    (equal to -coef (2l+1)/k grad(F_l(kr) P_l)) and a shear constituent
    `coef * [l G_{l+1} Y+ + (l+1) G_{l-1} Y-]`, the displacement is
        u_r = f(r) P_l(cos th),  u_th = g(r) dP_l/dth,
    and the traction on a sphere of radius r is
        sigma_rr = T_r P_l,      sigma_rth = T_th dP_l/dth,
    with T_r = lam (f' + 2f/r - l(l+1) g/r) + 2 mu f',
         T_th = mu (f/r + g' - g/r).
    """

    def __init__(self, l, k, r, family, mode, material: Material):
        x = k * np.asarray(r, dtype=float)
        seq = family(l + 1, x)
        F = seq[l]
        # f_l' = f_{l-1} - (l+1)/x f_l for l >= 1; f_0' = -f_1 exactly
        dF = seq[l - 1] - (l + 1) / x * F if l >= 1 else -seq[1]
        # second derivative from the spherical Bessel ODE
        d2F = -2.0 / x * dF + (l * (l + 1) / x ** 2 - 1.0) * F
        if mode == "P":
            c = -(2 * l + 1)
            self.f = c * dF
            self.g = c * F / x
            self.df = c * k * d2F
            self.dg = c * k * (dF * x - F) / x ** 2
        elif mode == "SV":
            c = (2 * l + 1)
            self.f = c * l * (l + 1) * F / x
            self.g = c * (dF + F / x)
            self.df = c * l * (l + 1) * k * (dF * x - F) / x ** 2
            self.dg = c * k * (d2F + (dF * x - F) / x ** 2)
        else:
            raise ValueError(mode)
        self.l, self.r = l, r
        self.lam, self.mu = material.lam, material.mu

    def t_r(self):
        l, r = self.l, self.r
        return (self.lam * (self.df + 2 * self.f / r - l * (l + 1) * self.g / r)
                + 2 * self.mu * self.df)

    def t_th(self):
        r = self.r
        return self.mu * (self.f / r + self.dg - self.g / r)


def _constituents_at(cfg: SphereConfig, ctx: FrequencyContext, l, r):
    """Interior/exterior constituent factors and the incident factors at radius r."""
    jn, h1 = specfun.sph_jn_seq, lambda lm, x: (
        specfun.sph_jn_seq(lm, x) + 1j * specfun.sph_yn_seq(lm, x))
    inc = _Radial(l, ctx.kp_e, r, jn, "P", cfg.exterior)
    int_p = _Radial(l, ctx.kp_a, r, jn, "P", cfg.interior)
    ext_p = _Radial(l, ctx.kp_e, r, h1, "P", cfg.exterior)
    ext_sv = _Radial(l, ctx.ks_e, r, h1, "SV", cfg.exterior) if l >= 1 else None
    int_sv = None
    if cfg.interior.vs > 0 and l >= 1:
        ks_a = ctx.omega / cfg.interior.vs
        int_sv = _Radial(l, ks_a, r, jn, "SV", cfg.interior)
    return inc, int_p, int_sv, ext_p, ext_sv


def _cond1(m):
    try:
        return float(np.linalg.norm(m, 1) * np.linalg.norm(np.linalg.inv(m), 1))
    except np.linalg.LinAlgError:
        return np.inf


def solve_modal_coefficients(cfg: SphereConfig, ctx: FrequencyContext, l) -> ModalCoefficients:
    """Solve the order-l interface system at r = R.

    Acoustic interior: 3x3 system (a1, a2, b2) from continuity of normal
    displacement, continuity of normal traction and zero tangential traction
    on the elastic side.  Elastic interior (test-only configurations): the
    general 4x4 system with full displacement/traction continuity.  l = 0 has
    no tangential content and reduces to 2x2.
    """
    if l < 0:
        raise ValueError("order must be >= 0")
    R = cfg.radius
    eps = incident_phase(l)
    inc, int_p, int_sv, ext_p, ext_sv = _constituents_at(cfg, ctx, l, R)

    # row scales: displacement rows ~ O(1), traction rows ~ modulus * k
    tscale = (cfg.exterior.lam + 2 * cfg.exterior.mu) * ctx.kp_e
    general = cfg.interior.vs > 0

    cols = [int_p] + ([int_sv] if general and l >= 1 else [])
    ncols_int = len(cols)
    cols += [ext_p] + ([ext_sv] if l >= 1 else [])

    rows = []
    rhs = []

    def add_row(pick, scale, inc_val):
        row = []
        for idx, c in enumerate(cols):
            v = pick(c)
            if idx >= ncols_int:
                v = -v
            row.append(v / scale)
        rows.append(row)
        rhs.append(eps * inc_val / scale)

    add_row(lambda c: c.f, 1.0, inc.f)                       # u_r continuity
    if general and l >= 1:
        add_row(lambda c: c.g, 1.0, inc.g)                   # u_th continuity
    add_row(lambda c: c.t_r(), tscale, inc.t_r())            # sigma_rr continuity
    if l >= 1:
        if general:
            add_row(lambda c: c.t_th(), tscale, inc.t_th())  # sigma_rth continuity
        else:
            # interior side is traction-free tangentially (mu_a = 0): the
            # exterior total tangential traction must vanish.
            row = [0.0] * ncols_int
            row += [-ext_p.t_th() / tscale]
            row += [-ext_sv.t_th() / tscale]
            rows.append(row)
            rhs.append(eps * inc.t_th() / tscale)

    m = np.array(rows, dtype=complex)
    b = np.array(rhs, dtype=complex)

    # column equilibration keeps the solve well scaled when j_l / h_l span
    # many orders of magnitude at high l
    cscale = np.max(np.abs(m), axis=0)
    cscale[cscale == 0] = 1.0
    ms = m / cscale
    x = np.linalg.solve(ms, b) / cscale
    res = np.linalg.norm(m @ x - b) / max(np.linalg.norm(b), np.linalg.norm(m, 2) * np.linalg.norm(x))
    cond = _cond1(ms)

    a1 = x[0]
    b1 = x[1] if (general and l >= 1) else 0.0
    a2 = x[ncols_int]
    b2 = x[ncols_int + 1] if l >= 1 else 0.0
    return ModalCoefficients(l=l, a1=a1, b1=complex(b1), a2=a2, b2=complex(b2),
                             residual=float(res), cond=cond)


def solve_all_orders(cfg, ctx, l_max=None):
    if l_max is None:
        l_max = default_l_max(ctx, cfg.radius)
    if l_max > specfun.L_CAP:
        raise specfun.CapabilityError(f"l_max {l_max} exceeds cap {specfun.L_CAP}")
    return [solve_modal_coefficients(cfg, ctx, l) for l in range(l_max + 1)]


# ---------------------------------------------------------------------------
# field evaluation
# ---------------------------------------------------------------------------

def _to_spherical(points):
    p = np.atleast_2d(np.asarray(points, dtype=float))
    r = np.linalg.norm(p, axis=1)
    theta = np.arccos(np.clip(np.where(r > 0, p[:, 2] / np.where(r == 0, 1, r), 1.0), -1, 1))
    phi = np.mod(np.arctan2(p[:, 1], p[:, 0]), 2 * np.pi)
    return r, theta, phi


def _sph_to_cart(u_r, u_th, theta, phi):
    st, ct = np.sin(theta), np.cos(theta)
    sp, cp = np.sin(phi), np.cos(phi)
    ux = u_r * st * cp + u_th * ct * cp
    uy = u_r * st * sp + u_th * ct * sp
    uz = u_r * ct - u_th * st
    return np.stack([ux, uy, uz], axis=-1)


def incident_plane_p(ctx: FrequencyContext, points, l_max):
    """Truncated Petrashen-series expansion of the unit plane wave ẑ e^{ikz}.

    Returns Cartesian complex displacement, shape (3,) for a single point or
    (npts, 3) for an array of points.
    """
    if l_max > specfun.L_CAP:
        raise specfun.CapabilityError(f"l_max {l_max} exceeds cap {specfun.L_CAP}")
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    single = np.asarray(points).ndim == 1
    r, theta, phi = _to_spherical(pts)
    x = ctx.kp_e * r
    j = specfun.sph_jn_seq(l_max + 1, x)
    p = specfun.legendre_p_seq(l_max, np.cos(theta))
    dp = specfun.legendre_dtheta_seq(l_max, theta)
    u_r = np.zeros(len(pts), dtype=complex)
    u_th = np.zeros(len(pts), dtype=complex)
    for l in range(l_max + 1):
        eps = incident_phase(l)
        # Y+ term with j_{l+1}, Y- term with j_{l-1} and phase i^{l-1} = -eps
        u_r += eps * (l + 1) * j[l + 1] * p[l]
        u_th += eps * (-1.0) * j[l + 1] * dp[l]
        if l >= 1:
            u_r += (-eps) * l * j[l - 1] * p[l]
            u_th += (-eps) * j[l - 1] * dp[l]
    u = _sph_to_cart(u_r, u_th, theta, phi)
    return u[0] if single else u


INTERFACE_SNAP = 1e-9  # relative band around r = R where the caller must pick a side


def _resolve_sides(r, R, side):
    if side in ("interior", "exterior"):
        return np.full(len(r), side == "interior")
    near = np.abs(r - R) < INTERFACE_SNAP * R
    if np.any(near):
        raise ValueError("point on the interface: pass side='interior' or 'exterior'")
    return r < R


def scattered_field(cfg, ctx, coeffs, points, side=None):
    """Scattered displacement of the modal solution at Cartesian point(s).

    Interior points return the full interior field (which is the total field
    there); exterior points return the outgoing scattered part only.  `side`
    must be given explicitly for points within 1e-9 R of the interface.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    single = np.asarray(points).ndim == 1
    r, theta, phi = _to_spherical(pts)
    interior = _resolve_sides(r, cfg.radius, side)

    lmax = max(c.l for c in coeffs)
    p = specfun.legendre_p_seq(lmax, np.cos(theta))
    dp = specfun.legendre_dtheta_seq(lmax, theta)
    u_r = np.zeros(len(pts), dtype=complex)
    u_th = np.zeros(len(pts), dtype=complex)

    ri = np.where(interior, np.maximum(r, 1e-12 * cfg.radius), 1.0)
    re = np.where(~interior, r, 1.0)
    jn = specfun.sph_jn_seq
    h1 = lambda lm, x: specfun.sph_jn_seq(lm, x) + 1j * specfun.sph_yn_seq(lm, x)

    for c in coeffs:
        l = c.l
        if np.any(interior):
            cp = _Radial(l, ctx.kp_a, ri, jn, "P", cfg.interior)
            fr, gt = c.a1 * cp.f, c.a1 * cp.g
            if c.b1 != 0 and l >= 1:
                ks_a = ctx.omega / cfg.interior.vs
                cs = _Radial(l, ks_a, ri, jn, "SV", cfg.interior)
                fr = fr + c.b1 * cs.f
                gt = gt + c.b1 * cs.g
            u_r += np.where(interior, fr * p[l], 0.0)
            u_th += np.where(interior, gt * dp[l], 0.0)
        if np.any(~interior):
            ep = _Radial(l, ctx.kp_e, re, h1, "P", cfg.exterior)
            fr, gt = c.a2 * ep.f, c.a2 * ep.g
            if l >= 1:
                es = _Radial(l, ctx.ks_e, re, h1, "SV", cfg.exterior)
                fr = fr + c.b2 * es.f
                gt = gt + c.b2 * es.g
            u_r += np.where(~interior, fr * p[l], 0.0)
            u_th += np.where(~interior, gt * dp[l], 0.0)

    u = _sph_to_cart(u_r, u_th, theta, phi)
    return u[0] if single else u


def total_field(cfg, ctx, coeffs, points, side=None, l_max_incident=None):
    """Total displacement: interior series inside, incident + scattered outside."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    single = np.asarray(points).ndim == 1
    r, _, _ = _to_spherical(pts)
    interior = _resolve_sides(r, cfg.radius, side)
    u = scattered_field(cfg, ctx, coeffs, pts,
                        side="interior" if side == "interior" else side)
    # closed-form incident on the exterior side (exact, no truncation error)
    k = ctx.kp_e
    inc = np.zeros_like(u)
    inc[:, 2] = np.exp(1j * k * pts[:, 2])
    u = u + np.where(interior[:, None], 0.0, inc)
    return u[0] if single else u


def traction_of_series(cfg, ctx, coeffs, points, side, field="total"):
    """sigma(U) r̂ of the modal series evaluated from the chosen side.

    `field="total"` includes the incident wave on the exterior side (the
    interior series is already the total field there); `field="scattered"`
    uses the scattered series only.  Returned in Cartesian components.
    """
    if side not in ("interior", "exterior"):
        raise ValueError("side must be 'interior' or 'exterior'")
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    single = np.asarray(points).ndim == 1
    r, theta, phi = _to_spherical(pts)

    lmax = max(c.l for c in coeffs)
    p = specfun.legendre_p_seq(lmax, np.cos(theta))
    dp = specfun.legendre_dtheta_seq(lmax, theta)
    t_r = np.zeros(len(pts), dtype=complex)
    t_th = np.zeros(len(pts), dtype=complex)
    jn = specfun.sph_jn_seq
    h1 = lambda lm, x: specfun.sph_jn_seq(lm, x) + 1j * specfun.sph_yn_seq(lm, x)

    for c in coeffs:
        l = c.l
        if side == "interior":
            cp = _Radial(l, ctx.kp_a, r, jn, "P", cfg.interior)
            tr, tt = c.a1 * cp.t_r(), c.a1 * cp.t_th()
            if c.b1 != 0 and l >= 1:
                ks_a = ctx.omega / cfg.interior.vs
                cs = _Radial(l, ks_a, r, jn, "SV", cfg.interior)
                tr = tr + c.b1 * cs.t_r()
                tt = tt + c.b1 * cs.t_th()
        else:
            ep = _Radial(l, ctx.kp_e, r, h1, "P", cfg.exterior)
            tr, tt = c.a2 * ep.t_r(), c.a2 * ep.t_th()
            if l >= 1:
                es = _Radial(l, ctx.ks_e, r, h1, "SV", cfg.exterior)
                tr = tr + c.b2 * es.t_r()
                tt = tt + c.b2 * es.t_th()
            if field == "total":
                inc = _Radial(l, ctx.kp_e, r, jn, "P", cfg.exterior)
                eps = incident_phase(l)
                tr = tr + eps * inc.t_r()
                tt = tt + eps * inc.t_th()
        t_r += tr * p[l]
        t_th += tt * dp[l]

    t = _sph_to_cart(t_r, t_th, theta, phi)
    return t[0] if single else t


def interface_residuals(cfg, ctx, coeffs, thetas):
    """Re-evaluate the three interface conditions from the field series.

    Independent of the modal matrix: displacement and traction are evaluated
    on both sides of r = R at the sampled colatitudes.  Returns the maximum
    relative residual of (normal displacement jump, normal traction jump,
    exterior tangential traction).
    """
    R = cfg.radius
    pts = np.stack([R * np.sin(thetas), np.zeros_like(thetas), R * np.cos(thetas)], axis=1)
    normals = pts / R
    u_in = scattered_field(cfg, ctx, coeffs, pts, side="interior")
    u_out = total_field(cfg, ctx, coeffs, pts, side="exterior")
    t_in = traction_of_series(cfg, ctx, coeffs, pts, side="interior")
    t_out = traction_of_series(cfg, ctx, coeffs, pts, side="exterior")

    un_in = np.sum(u_in * normals, axis=1)
    un_out = np.sum(u_out * normals, axis=1)
    tn_in = np.sum(t_in * normals, axis=1)
    tn_out = np.sum(t_out * normals, axis=1)
    t_tan = t_out - tn_out[:, None] * normals

    uscale = max(np.max(np.abs(un_out)), 1e-30)
    tscale = max(np.max(np.abs(tn_out)), np.max(np.abs(t_out)), 1e-30)
    r_u = np.max(np.abs(un_in - un_out)) / uscale
    r_t = np.max(np.abs(tn_in - tn_out)) / tscale
    r_tt = np.max(np.linalg.norm(t_tan, axis=1)) / tscale
    return max(r_u, r_t, r_tt)


def energy_flux(cfg, ctx, coeffs, radius_factor=2.0, n_theta=32, n_phi=64):
    """Net time-averaged energy flux of the total field through r = factor*R,
    normalized by the incident plane-wave power through the sphere cross
    section.  Lossless scattering makes the net flux vanish."""
    R = radius_factor * cfg.radius
    # Gauss rule in mu = cos(theta): exact for the polynomial Legendre products
    mu, wmu = np.polynomial.legendre.leggauss(n_theta)
    th = np.arccos(mu)
    xp, wp = np.polynomial.legendre.leggauss(n_phi)
    ph = np.pi * (xp + 1.0)
    wph = np.pi * wp

    TH, PH = np.meshgrid(th, ph, indexing="ij")
    W = np.outer(wmu, wph)
    pts = np.stack([R * np.sin(TH) * np.cos(PH),
                    R * np.sin(TH) * np.sin(PH),
                    R * np.cos(TH)], axis=-1).reshape(-1, 3)
    u = total_field(cfg, ctx, coeffs, pts, side="exterior")
    t = traction_of_series(cfg, ctx, coeffs, pts, side="exterior")
    # <Re(-i w U e^{-iwt}) . Re(T e^{-iwt})> = 1/2 Re(-i w U . conj(T))
    dens = 0.5 * np.real(np.sum(-1j * ctx.omega * u * np.conj(t), axis=1))
    flux = np.sum(dens.reshape(TH.shape) * W) * R * R
    mat = cfg.exterior
    scale = 0.5 * mat.rho * mat.vp * ctx.omega ** 2 * np.pi * (2 * cfg.radius) ** 2
    return flux / scale
