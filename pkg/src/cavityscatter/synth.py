"""Time-domain synthesis: Ricker wavelets, the closed-form incident wave of a
plane force source, and inverse-Fourier assembly of seismograms from
per-frequency modal solutions.

Synthesis convention: a real signal is represented as
    s(t_n) = Re sum_k X_k e^{-i w_k t_n},  w_k = 2 pi k / (n dt),
realized by a Hermitian-extended spectrum pushed through the in-repo radix-2
FFT (forward kernel e^{-2*pi*i*k*n/N}).  This matches the e^{-i w t} ansatz of
the modal solver, whose incident wave e^{i k z} then travels towards +z.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import analytic
from .materials import FrequencyContext, Material, SphereConfig


@dataclass(frozen=True)
class RickerParams:
    """Ricker wavelet R(t) = A (1 - 2 beta (t-t0)^2) e^{-beta (t-t0)^2}
    with beta = (pi f_peak)^2."""

    f_peak: float
    t0: float = 0.0
    amplitude: float = 1.0

    def __post_init__(self):
        if self.f_peak <= 0:
            raise ValueError("f_peak must be positive")

    @property
    def beta(self):
        return (np.pi * self.f_peak) ** 2

    @classmethod
    def from_beta(cls, beta, t0=0.0, amplitude=1.0):
        return cls(f_peak=np.sqrt(beta) / np.pi, t0=t0, amplitude=amplitude)


def ricker(params: RickerParams, t):
    """Ricker wavelet value(s) at time(s) t."""
    tau = np.asarray(t, dtype=float) - params.t0
    b = params.beta
    return params.amplitude * (1.0 - 2.0 * b * tau ** 2) * np.exp(-b * tau ** 2)


def ricker_derivative(params: RickerParams, t):
    """dR/dt, used by the scattered-field volume source."""
    tau = np.asarray(t, dtype=float) - params.t0
    b = params.beta
    return params.amplitude * (-6.0 * b * tau + 4.0 * b * b * tau ** 3) * np.exp(-b * tau ** 2)


def ricker_integral(params: RickerParams, t):
    """Closed-form int_0^t R(tau) dtau (antiderivative of R is tau e^{-beta tau^2})."""
    b = params.beta
    tau = np.asarray(t, dtype=float) - params.t0
    return params.amplitude * (tau * np.exp(-b * tau ** 2)
                               + params.t0 * np.exp(-b * params.t0 ** 2))


def ricker_spectrum(params: RickerParams, f):
    """Analytic Fourier amplitude F[R](f) with kernel e^{+i w t}.

    |spectrum| peaks at f_peak; the t0 shift contributes the phase e^{i w t0}.
    """
    w = 2 * np.pi * np.asarray(f, dtype=float)
    b = params.beta
    mag = params.amplitude * np.sqrt(np.pi / b) * (w ** 2 / (2 * b)) * np.exp(-w ** 2 / (4 * b))
    return mag * np.exp(1j * w * params.t0)


def ricker_onset(params: RickerParams, threshold=0.05):
    """Earliest time where |R| crosses `threshold` x peak (front of the pulse)."""
    b = params.beta
    ts = params.t0 + np.linspace(-4.0, 0.0, 4001) / params.f_peak
    vals = np.abs(ricker(params, ts)) / params.amplitude
    idx = np.argmax(vals >= threshold)
    return float(ts[idx])


# ---------------------------------------------------------------------------
# quadrature and in-repo FFT
# ---------------------------------------------------------------------------

_GL_X, _GL_W = np.polynomial.legendre.leggauss(12)


def adaptive_quad(func, a, b, rel_tol=1e-10, abs_floor=1e-300, _depth=0):
    """Adaptive Gauss-Legendre quadrature of a scalar function on [a, b]."""
    def gl(lo, hi):
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        return half * np.sum(_GL_W * func(mid + half * _GL_X))

    whole = gl(a, b)
    mid = 0.5 * (a + b)
    left, right = gl(a, mid), gl(mid, b)
    err = abs(left + right - whole)
    if err <= rel_tol * max(abs(left + right), abs_floor) or _depth > 40:
        return left + right
    return (adaptive_quad(func, a, mid, rel_tol, abs_floor, _depth + 1)
            + adaptive_quad(func, mid, b, rel_tol, abs_floor, _depth + 1))


def fft_radix2(x):
    """Iterative radix-2 FFT, kernel e^{-2 pi i k n / N}; length must be a
    power of two.  Vectorized over leading axes."""
    x = np.asarray(x, dtype=complex)
    n = x.shape[-1]
    if n & (n - 1):
        raise ValueError("length must be a power of two")
    # bit-reversal permutation
    idx = np.arange(n)
    rev = np.zeros(n, dtype=int)
    bits = n.bit_length() - 1
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    y = x[..., rev]
    half = 1
    while half < n:
        w = np.exp(-2j * np.pi * np.arange(half) / (2 * half))
        y = y.reshape(y.shape[:-1] + (n // (2 * half), 2 * half))
        even = y[..., :half]
        odd = y[..., half:] * w
        y = np.concatenate([even + odd, even - odd], axis=-1)
        y = y.reshape(y.shape[:-2] + (n,))
        half *= 2
    return y


def ifft_radix2(x):
    """Inverse of fft_radix2 (kernel e^{+2 pi i k n / N}, 1/N scaling)."""
    x = np.asarray(x, dtype=complex)
    return np.conj(fft_radix2(np.conj(x))) / x.shape[-1]


def synthesize_real(coeff, n):
    """Real time series s(t_m) = Re sum_k coeff[k] e^{-i w_k t_m}.

    `coeff` holds the positive-frequency coefficients for k = 0..len-1
    (index 0 = DC); zero-padded/Hermitian-extended to length n (power of 2).
    Returns (series, max imaginary residue).
    """
    coeff = np.asarray(coeff, dtype=complex)
    if n & (n - 1):
        raise ValueError("n must be a power of two")
    if coeff.shape[-1] > n // 2 + 1:
        raise ValueError("too many frequency coefficients for the grid")
    spec = np.zeros(coeff.shape[:-1] + (n,), dtype=complex)
    spec[..., :coeff.shape[-1]] = coeff
    spec[..., 0] = np.real(spec[..., 0])
    if coeff.shape[-1] - 1 >= n // 2:
        spec[..., n // 2] = np.real(spec[..., n // 2])
    k = np.arange(1, n // 2)
    spec[..., n - k] = np.conj(spec[..., k])
    out = fft_radix2(spec)
    return np.real(out), float(np.max(np.abs(np.imag(out))))


# ---------------------------------------------------------------------------
# time grid / seismograms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TimeGrid:
    dt: float
    n_steps: int
    t_start: float = 0.0

    def __post_init__(self):
        if self.dt <= 0 or self.n_steps <= 0:
            raise ValueError("dt and n_steps must be positive")

    @property
    def times(self):
        return self.t_start + self.dt * np.arange(self.n_steps)

    @property
    def duration(self):
        return self.dt * self.n_steps


@dataclass
class Seismogram:
    receiver: np.ndarray
    component: str
    grid: TimeGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n_steps,):
            raise ValueError("values length must equal n_steps")


def incident_time_domain(exterior: Material, z0, profile, point, t,
                         quadrature=False):
    """z-component of the incident wave of a plane force at z = z0 (Eq. of a
    1D plane pulse):  u3 = 1/(2 rho vp) H(t - |z-z0|/vp) int_0^{t-...} phi.

    `profile` is RickerParams (closed-form integral) or, with
    `quadrature=True` / a general callable, the integral is evaluated by
    adaptive Gauss quadrature at relative tolerance 1e-10.
    """
    z = np.asarray(point, dtype=float)[..., 2] if np.ndim(point) else point
    tau = np.asarray(t, dtype=float) - np.abs(z - z0) / exterior.vp
    amp = 1.0 / (2.0 * exterior.rho * exterior.vp)
    if callable(profile):
        vals = np.array([adaptive_quad(profile, 0.0, tt) if tt > 0 else 0.0
                         for tt in np.atleast_1d(tau)])
        out = amp * vals.reshape(np.shape(tau))
        return out if np.ndim(tau) else float(out)
    if quadrature:
        return incident_time_domain(exterior, z0, lambda s: ricker(profile, s),
                                    point, t)
    return amp * np.where(tau > 0, ricker_integral(profile, tau), 0.0)


@dataclass(frozen=True)
class FreqPlan:
    """Synthesis frequencies w_k = 2 pi k df, k = 1..n_freq, df = 1/(n dt)."""

    df: float
    n_freq: int

    @property
    def freqs(self):
        return self.df * np.arange(1, self.n_freq + 1)

    @classmethod
    def for_grid(cls, grid: TimeGrid, f_max):
        df = 1.0 / grid.duration
        if f_max >= 0.5 / grid.dt:
            raise ValueError("f_max beyond the Nyquist frequency of the grid")
        return cls(df=df, n_freq=int(np.floor(f_max / df)))


def source_spectrum(exterior: Material, z0, profile: RickerParams, freqs,
                    mode="phase"):
    """Complex amplitude A(w) of the harmonic incident wave A e^{ikz} that the
    plane-force source radiates at each frequency.

    mode="phase": full spectrum of the integrated wavelet including the t0
    shift and the source-plane offset, A = i C F[R](w) e^{-i w z0/vp} / w with
    C = 1/(2 rho vp).  mode="magnitude": |F[R]| only (the plain convolution
    form); relative waveform shape without absolute time/amplitude alignment.
    """
    w = 2 * np.pi * np.asarray(freqs, dtype=float)
    if mode == "magnitude":
        return np.abs(ricker_spectrum(profile, freqs)).astype(complex)
    if mode != "phase":
        raise ValueError("mode must be 'phase' or 'magnitude'")
    c = 1.0 / (2.0 * exterior.rho * exterior.vp)
    return 1j * c * ricker_spectrum(profile, freqs) * np.exp(-1j * w * z0 / exterior.vp) / w


def synthesize_seismograms(cfg: SphereConfig, receivers, component, profile,
                           grid: TimeGrid, z0, f_max=None, mode="phase",
                           sides=None, what="total", l_max=None, threads=1):
    """Synthesize seismograms at `receivers` by frequency sweeping the modal
    solver and inverse-Fourier assembly.

    what="total": interior receivers get the interior series, exterior ones
    incident (closed form, exact) + scattered.  what="scattered": synthesized
    scattered part only (interior series counts as scattered there).
    Returns (list of Seismogram, diagnostics dict).
    """
    if grid.n_steps & (grid.n_steps - 1):
        raise ValueError("n_steps must be a power of two")
    recv = np.atleast_2d(np.asarray(receivers, dtype=float))
    comp_idx = {"x": 0, "y": 1, "z": 2}[component]
    if f_max is None:
        f_max = 3.0 * profile.f_peak
    plan = FreqPlan.for_grid(grid, f_max)
    freqs = plan.freqs
    amp = source_spectrum(cfg.exterior, z0, profile, freqs, mode=mode)

    if sides is None:
        sides = [None] * len(recv)
    r = np.linalg.norm(recv, axis=1)
    interior = np.zeros(len(recv), dtype=bool)
    for i, s in enumerate(sides):
        if s in ("interior", "exterior"):
            interior[i] = s == "interior"
        else:
            if abs(r[i] - cfg.radius) < analytic.INTERFACE_SNAP * cfg.radius:
                raise ValueError(f"receiver {i} on the interface: specify a side")
            interior[i] = r[i] < cfg.radius
    side_labels = np.where(interior, "interior", "exterior")

    def response(k):
        ctx = FrequencyContext.for_sphere(2 * np.pi * freqs[k], cfg)
        coeffs = analytic.solve_all_orders(cfg, ctx, l_max=l_max)
        vals = np.zeros(len(recv), dtype=complex)
        for side in ("interior", "exterior"):
            mask = side_labels == side
            if np.any(mask):
                u = analytic.scattered_field(cfg, ctx, coeffs, recv[mask], side=side)
                vals[mask] = u[:, comp_idx]
        max_res = max(c.residual for c in coeffs)
        return vals, max_res

    spec = np.zeros((len(recv), plan.n_freq + 1), dtype=complex)
    worst_residual = 0.0
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as ex:
            for k, (vals, res) in enumerate(ex.map(response, range(plan.n_freq))):
                spec[:, k + 1] = vals
                worst_residual = max(worst_residual, res)
    else:
        for k in range(plan.n_freq):
            vals, res = response(k)
            spec[:, k + 1] = vals
            worst_residual = max(worst_residual, res)

    # Fourier-series coefficients of the T-periodized transient:
    # c_k = A(w_k) U(w_k) / T; the Hermitian extension in synthesize_real
    # supplies the conjugate half (factor 2).
    spec[:, 1:] *= amp[None, :] / grid.duration
    spec[:, 0] = 0.0

    series, imag_residue = synthesize_real(spec, grid.n_steps)
    series = series[:, :grid.n_steps]

    if what == "total":
        for i in range(len(recv)):
            if not interior[i]:
                series[i] += incident_time_domain(cfg.exterior, z0, profile,
                                                  recv[i], grid.times)
    out = [Seismogram(receiver=recv[i], component=component, grid=grid,
                      values=series[i]) for i in range(len(recv))]
    diag = {"n_freq": plan.n_freq, "df": plan.df, "f_max": f_max,
            "imag_residue": imag_residue, "max_system_residual": worst_residual,
            "interior": interior}
    return out, diag
