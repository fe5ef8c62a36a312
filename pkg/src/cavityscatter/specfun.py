"""Special functions for the modal scattering solver.

Spherical Bessel functions of the first (j_l) and second (y_l) kind with
complex-argument support, spherical Hankel functions, unnormalized associated
Legendre functions, and the Petrashen vector basis {Y0, Y+, Y-} restricted to
the axisymmetric (m = 0) case exercised by plane P-wave incidence.

All evaluators are pure functions with no shared mutable state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

#: Largest supported order. The scattering problem needs l ~ kR + 15 (< 25
#: for every configuration here); 64 leaves headroom without requiring
#: arbitrary-precision arithmetic.
L_CAP = 64


class CapabilityError(ValueError):
    """Requested order exceeds the supported range."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of the function."""


def _check_order(l):
    if l < 0:
        raise DomainError(f"order must be >= 0, got {l}")
    if l > L_CAP:
        raise CapabilityError(f"order {l} exceeds cap {L_CAP}")


# ---------------------------------------------------------------------------
# spherical Bessel functions
# ---------------------------------------------------------------------------

def _j01(x):
    """j_0 and j_1 from closed forms, valid for complex x != 0."""
    sx, cx = np.sin(x), np.cos(x)
    j0 = sx / x
    j1 = sx / (x * x) - cx / x
    return j0, j1


def sph_jn_seq(lmax, x):
    """j_l(x) for l = 0..lmax at once.

    `x` may be a real/complex scalar or array; returns shape (lmax+1,) + x.shape.
    Upward recurrence is used where it is stable (l < |x|), Miller's downward
    recurrence with closed-form normalization elsewhere; x = 0 is exact.
    """
    _check_order(lmax)
    x = np.asarray(x)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    dtype = complex if np.iscomplexobj(x) else float
    out = np.zeros((lmax + 1,) + x.shape, dtype=dtype)

    zero = np.abs(x) < 1e-300
    xs = np.where(zero, 1.0, x)  # placeholder to avoid 0-division; fixed below

    j0, j1 = _j01(xs)
    out[0] = j0
    if lmax >= 1:
        out[1] = j1

    if lmax >= 2:
        up = np.abs(x) > lmax  # upward recurrence stable in this regime
        if np.any(up):
            jm, jc = j0.copy(), j1.copy()
            for l in range(1, lmax):
                jn = (2 * l + 1) / xs * jc - jm
                jm, jc = jc, jn
                out[l + 1] = np.where(up, jc, out[l + 1])
        down = ~up & ~zero
        if np.any(down):
            # Miller: recurse down from well above the turning point, then
            # normalize against the closed-form j_0 (or j_1 where j_0 ~ 0).
            xa = np.where(down, xs, 1.0)
            absx = np.abs(xa)
            start = lmax + 24 + int(np.ceil(np.max(np.where(down, absx, 0))))
            fp = np.zeros_like(xa, dtype=dtype)
            fc = np.full_like(xa, 1e-280, dtype=dtype)
            cols = np.zeros((lmax + 1,) + xa.shape, dtype=dtype)
            for l in range(start, 0, -1):
                fm = (2 * l + 1) / xa * fc - fp
                fp, fc = fc, fm
                big = np.abs(fc) > 1e250
                if np.any(big):
                    scale = np.where(big, 1e-250, 1.0)
                    fc = fc * scale
                    fp = fp * scale
                    if l <= lmax:
                        cols[l:] *= scale  # rescale already-stored orders
                if l - 1 <= lmax:
                    cols[l - 1] = fc
            j0d, j1d = _j01(xa)
            use1 = np.abs(j0d) < np.abs(j1d)
            denom = np.where(use1, cols[1] if lmax >= 1 else 1.0, cols[0])
            ref = np.where(use1, j1d, j0d)
            norm = np.where(np.abs(denom) > 0, ref / np.where(denom == 0, 1, denom), 0.0)
            vals = cols * norm
            out = np.where(down, vals, out)

    if np.any(zero):
        out[0] = np.where(zero, 1.0, out[0])
        for l in range(1, lmax + 1):
            out[l] = np.where(zero, 0.0, out[l])

    return out[:, 0] if scalar else out


def sph_yn_seq(lmax, x):
    """y_l(x) for l = 0..lmax; upward recurrence (stable for y). x = 0 is singular."""
    _check_order(lmax)
    x = np.asarray(x)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    if np.any(np.abs(x) < 1e-300):
        raise DomainError("y_l is singular at x = 0")
    dtype = complex if np.iscomplexobj(x) else float
    out = np.zeros((lmax + 1,) + x.shape, dtype=dtype)
    sx, cx = np.sin(x), np.cos(x)
    out[0] = -cx / x
    if lmax >= 1:
        out[1] = -cx / (x * x) - sx / x
    for l in range(1, lmax):
        out[l + 1] = (2 * l + 1) / x * out[l] - out[l - 1]
    return out[:, 0] if scalar else out


def sph_f_deriv(seq, x):
    """Derivatives f_l'(x) from a value sequence, f_0' = -f_1 and
    f_l' = f_{l-1} - (l+1)/x f_l."""
    x = np.asarray(x)
    out = np.zeros_like(seq)
    out[0] = -seq[1] if seq.shape[0] > 1 else -sph_jn_seq(1, x)[1]
    for l in range(1, seq.shape[0]):
        out[l] = seq[l - 1] - (l + 1) / x * seq[l]
    return out


def spherical_bessel_j(l, x):
    """Spherical Bessel function j_l(x); exact at x = 0."""
    _check_order(l)
    return sph_jn_seq(l, x)[l]


def spherical_bessel_y(l, x):
    """Spherical Bessel function of the second kind y_l(x), x != 0."""
    _check_order(l)
    return sph_yn_seq(l, x)[l]


def spherical_hankel2(l, x):
    """Spherical Hankel function of the second kind, h_l^(2) = j_l - i y_l."""
    _check_order(l)
    return spherical_bessel_j(l, x) - 1j * spherical_bessel_y(l, x)


def spherical_hankel1(l, x):
    """Spherical Hankel function of the first kind, h_l^(1) = j_l + i y_l."""
    _check_order(l)
    return spherical_bessel_j(l, x) + 1j * spherical_bessel_y(l, x)


# ---------------------------------------------------------------------------
# associated Legendre functions
# ---------------------------------------------------------------------------

def legendre_p_seq(lmax, x):
    """P_l(x) (m = 0) for l = 0..lmax via the stable upward recurrence."""
    _check_order(lmax)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(np.abs(x) > 1 + 1e-12):
        raise DomainError("Legendre argument must lie in [-1, 1]")
    x = np.clip(x, -1.0, 1.0)
    out = np.zeros((lmax + 1,) + x.shape)
    out[0] = 1.0
    if lmax >= 1:
        out[1] = x
    for l in range(1, lmax):
        out[l + 1] = ((2 * l + 1) * x * out[l] - l * out[l - 1]) / (l + 1)
    return out


def legendre_p(l, m, x):
    """Unnormalized associated Legendre function P_l^m(x), 0 <= m <= l.

    Includes the Condon-Shortley phase. Only the m = 0 branch is exercised by
    the scattering solver; general m is provided for validity checking.
    """
    _check_order(l)
    if m < 0 or m > l:
        raise DomainError(f"need 0 <= m <= l, got m={m}, l={l}")
    xarr = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(np.abs(xarr) > 1 + 1e-12):
        raise DomainError("Legendre argument must lie in [-1, 1]")
    if m == 0:
        val = legendre_p_seq(l, xarr)[l]
        return float(val[0]) if np.isscalar(x) else val
    xc = np.clip(xarr, -1.0, 1.0)
    # seed P_m^m = (-1)^m (2m-1)!! (1-x^2)^{m/2}, then raise l
    somx2 = np.sqrt(np.maximum(0.0, 1.0 - xc * xc))
    pmm = np.full_like(xc, (-1.0) ** m * math.prod(range(1, 2 * m, 2)))
    pmm = pmm * somx2 ** m
    if l == m:
        out = pmm
    else:
        pm1 = xc * (2 * m + 1) * pmm
        if l == m + 1:
            out = pm1
        else:
            for ll in range(m + 2, l + 1):
                pm2 = ((2 * ll - 1) * xc * pm1 - (ll + m - 1) * pmm) / (ll - m)
                pmm, pm1 = pm1, pm2
            out = pm1
    return float(out[0]) if np.isscalar(x) else out


def legendre_dtheta_seq(lmax, theta):
    """dP_l(cos θ)/dθ for l = 0..lmax.

    Uses dP_l/dθ = l (cot θ P_l - csc θ P_{l-1}); the poles θ ∈ {0, π} take
    the analytic limit 0 (dP/dθ = -sin θ · P_l'(cos θ)).
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    st, ct = np.sin(theta), np.cos(theta)
    pole = np.abs(st) < 1e-12
    sts = np.where(pole, 1.0, st)
    p = legendre_p_seq(lmax, ct)
    out = np.zeros_like(p)
    for l in range(1, lmax + 1):
        out[l] = l * (ct / sts * p[l] - p[l - 1] / sts)
        out[l] = np.where(pole, 0.0, out[l])
    return out


# ---------------------------------------------------------------------------
# Petrashen vector basis (m = 0)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SphericalPoint:
    """Point in spherical coordinates (r >= 0, θ in [0, π], φ in [0, 2π))."""

    r: float
    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if self.r < 0:
            raise DomainError("r must be >= 0")
        if not 0.0 <= self.theta <= np.pi + 1e-12:
            raise DomainError("theta must lie in [0, pi]")
        if not 0.0 <= self.phi < 2 * np.pi + 1e-12:
            raise DomainError("phi must lie in [0, 2*pi)")

    def to_cartesian(self):
        st, ct = np.sin(self.theta), np.cos(self.theta)
        return np.array([self.r * st * np.cos(self.phi),
                         self.r * st * np.sin(self.phi),
                         self.r * ct])


VALID_KINDS = ("Y0", "Yplus", "Yminus")


@dataclass(frozen=True)
class VectorSphericalHarmonic:
    """Label (kind, l, m) of one Petrashen basis vector."""

    kind: str
    l: int
    m: int = 0

    def __post_init__(self):
        if self.kind not in VALID_KINDS:
            raise DomainError(f"kind must be one of {VALID_KINDS}")
        if self.l < 0:
            raise DomainError("l must be >= 0")
        if abs(self.m) > self.l:
            raise DomainError("|m| must be <= l")


def petrashen_vector(harmonic: VectorSphericalHarmonic, point: SphericalPoint):
    """Petrashen basis vector in the spherical unit basis {r̂, θ̂, φ̂}.

    For m = 0 with Y_l = P_l(cos θ):
        Y+ = (l+1) r̂ Y_l - r∇Y_l,   Y- = l r̂ Y_l + r∇Y_l,   Y0 = r × ∇Y_l,
    where r∇Y_l has only the θ̂ component dP_l/dθ.
    """
    if harmonic.m != 0:
        raise CapabilityError("only the axisymmetric m = 0 basis is implemented")
    l = harmonic.l
    _check_order(l)
    p = legendre_p_seq(l, np.cos(point.theta))[l][0]
    dp = legendre_dtheta_seq(l, point.theta)[l][0]
    if harmonic.kind == "Yplus":
        return np.array([(l + 1) * p, -dp, 0.0])
    if harmonic.kind == "Yminus":
        return np.array([l * p, dp, 0.0])
    return np.array([0.0, 0.0, dp])  # Y0 = r x grad Y


def spherical_to_cartesian_vector(vec_sph, theta, phi):
    """Convert a {r̂, θ̂, φ̂} vector to Cartesian components."""
    st, ct = np.sin(theta), np.cos(theta)
    sp, cp = np.sin(phi), np.cos(phi)
    vr, vt, vp = vec_sph[..., 0], vec_sph[..., 1], vec_sph[..., 2]
    return np.stack([
        vr * st * cp + vt * ct * cp - vp * sp,
        vr * st * sp + vt * ct * sp + vp * cp,
        vr * ct - vt * st,
    ], axis=-1)
