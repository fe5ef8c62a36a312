import numpy as np
import pytest

from cavityscatter import synth
from cavityscatter.materials import DEFAULT_ELASTIC, default_sphere
from cavityscatter.synth import FreqPlan, RickerParams, Seismogram, TimeGrid

CFG = default_sphere()


def test_ricker_peak_and_zeros():
    p = RickerParams(f_peak=66.7, t0=0.03)
    assert synth.ricker(p, 0.03) == pytest.approx(1.0)
    tz = 1.0 / (np.sqrt(2) * np.pi * p.f_peak)
    assert abs(synth.ricker(p, p.t0 + tz)) < 1e-13
    assert abs(synth.ricker(p, p.t0 - tz)) < 1e-13


def test_beta_44000_peak_frequency():
    p = RickerParams.from_beta(44000.0)
    assert p.f_peak == pytest.approx(66.7, rel=2e-3)
    assert p.beta == pytest.approx(44000.0)


def test_spectrum_peak_by_grid_search():
    p = RickerParams(f_peak=20.0, t0=0.2)
    # FFT of the sampled wavelet locates the spectral peak
    dt, n = 2.5e-4, 16384
    w = synth.ricker(p, dt * np.arange(n))
    spec = np.abs(synth.fft_radix2(w.astype(complex))[: n // 2])
    freqs = np.arange(n // 2) / (n * dt)
    band = (freqs > 5) & (freqs < 60)
    f_fft = freqs[band][np.argmax(spec[band])]
    fs = np.linspace(5, 60, 20000)
    f_an = fs[np.argmax(np.abs(synth.ricker_spectrum(p, fs)))]
    assert abs(f_an - p.f_peak) / p.f_peak < 5e-3
    assert abs(f_fft - f_an) / f_an < 5e-3


def test_spectrum_band_edge_and_dc():
    p = RickerParams(f_peak=66.7)
    ratio = abs(synth.ricker_spectrum(p, 3 * p.f_peak)) / abs(synth.ricker_spectrum(p, p.f_peak))
    assert ratio < 0.05
    assert abs(synth.ricker_spectrum(p, 0.0)) == 0.0


def test_ricker_derivative_consistency():
    p = RickerParams(f_peak=25.0, t0=0.1)
    t = np.linspace(0, 0.3, 1001)
    h = 1e-7
    fd = (synth.ricker(p, t + h) - synth.ricker(p, t - h)) / (2 * h)
    assert np.max(np.abs(fd - synth.ricker_derivative(p, t))) < 1e-5


def test_fft_against_dft_oracle():
    rng = np.random.default_rng(7)
    x = rng.normal(size=128) + 1j * rng.normal(size=128)
    k = np.arange(128)
    dft = np.array([np.sum(x * np.exp(-2j * np.pi * kk * k / 128)) for kk in k])
    assert np.max(np.abs(synth.fft_radix2(x) - dft)) < 1e-11
    assert np.max(np.abs(synth.ifft_radix2(synth.fft_radix2(x)) - x)) < 1e-13


def test_fft_requires_power_of_two():
    with pytest.raises(ValueError):
        synth.fft_radix2(np.zeros(100))


# ---------------------------------------------------------------------------
# incident time-domain wave
# ---------------------------------------------------------------------------

def test_incident_causality():
    p = RickerParams(f_peak=20.0, t0=0.1)
    mat = DEFAULT_ELASTIC
    z0 = -430.0
    pt = np.array([0.0, 0.0, -100.0])
    t_front = abs(pt[2] - z0) / mat.vp
    for t in (0.0, 0.5 * t_front, 0.99 * t_front):
        assert synth.incident_time_domain(mat, z0, p, pt, t) == 0.0


def test_incident_late_time_constant():
    # t -> inf limit equals the full-wavelet integral; trapezoid oracle
    p = RickerParams(f_peak=20.0, t0=0.08)
    mat = DEFAULT_ELASTIC
    tt = np.linspace(0.0, 5.0, 2_000_001)
    full = np.trapezoid(synth.ricker(p, tt), tt) / (2 * mat.rho * mat.vp)
    late = synth.incident_time_domain(mat, 0.0, p, np.array([0, 0, 100.0]), 5.0)
    assert late == pytest.approx(full, abs=1e-15 + abs(full) * 1e-8)


def test_incident_arrival_time():
    # source plane 1200 m below, vp = 4000 -> 0.3 s travel offset plus t0
    p = RickerParams(f_peak=20.0, t0=0.1)
    mat = DEFAULT_ELASTIC
    ts = np.linspace(0, 1.0, 8001)
    vals = synth.incident_time_domain(mat, -1200.0, p, np.array([0, 0, 0.0]), ts)
    onset = ts[np.argmax(np.abs(vals) > 0.05 * np.max(np.abs(vals)))]
    expected = 0.3 + p.t0 + (synth.ricker_onset(p, 0.05) - p.t0)
    assert onset == pytest.approx(expected, abs=5e-3)


def test_incident_quadrature_matches_closed_form():
    p = RickerParams(f_peak=33.0, t0=0.07)
    mat = DEFAULT_ELASTIC
    pt = np.array([0.0, 0.0, -50.0])
    for t in (0.11, 0.15, 0.21):
        a = synth.incident_time_domain(mat, -430.0, p, pt, t)
        b = synth.incident_time_domain(mat, -430.0, p, pt, t, quadrature=True)
        assert a == pytest.approx(b, rel=1e-9, abs=1e-18)


def test_adaptive_quad_tolerance():
    val = synth.adaptive_quad(np.sin, 0.0, np.pi)
    assert val == pytest.approx(2.0, rel=1e-12)


# ---------------------------------------------------------------------------
# seismogram synthesis
# ---------------------------------------------------------------------------

GRID = TimeGrid(dt=1.0 / 1024.0, n_steps=2048)
PROF = RickerParams(f_peak=20.0, t0=0.15)
Z0 = -430.0


def test_freq_plan():
    plan = FreqPlan.for_grid(GRID, 60.0)
    assert plan.df == pytest.approx(0.5)
    assert plan.n_freq == 120
    with pytest.raises(ValueError):
        FreqPlan.for_grid(GRID, 600.0)


def test_synthesized_incident_matches_closed_form():
    # pushes the closed-form plane-wave response through the same spectrum,
    # pinning every sign/scale convention of the synthesis
    plan = FreqPlan.for_grid(GRID, 60.0)
    amp = synth.source_spectrum(CFG.exterior, Z0, PROF, plan.freqs, mode="phase")
    zr = -100.0
    spec = np.zeros(plan.n_freq + 1, dtype=complex)
    spec[1:] = amp * np.exp(1j * 2 * np.pi * plan.freqs / CFG.exterior.vp * zr) / GRID.duration
    series, imag_residue = synth.synthesize_real(spec, GRID.n_steps)
    ref = synth.incident_time_domain(CFG.exterior, Z0, PROF, np.array([0, 0, zr]), GRID.times)
    assert np.max(np.abs(series - ref)) / np.max(np.abs(ref)) < 1e-3  # band-limit floor
    assert imag_residue < 1e-12 * np.max(np.abs(series))


def test_zero_contrast_scattered_silence():
    from cavityscatter.materials import DEFAULT_ELASTIC, SphereConfig
    cfg0 = SphereConfig(radius=30.0, interior=DEFAULT_ELASTIC,
                        exterior=DEFAULT_ELASTIC, allow_elastic_interior=True)
    rec = np.array([[0.0, 0.0, -120.0]])
    seis, _ = synth.synthesize_seismograms(cfg0, rec, "z", PROF, GRID, Z0,
                                           what="scattered")
    inc = synth.incident_time_domain(cfg0.exterior, Z0, PROF, rec[0], GRID.times)
    assert np.max(np.abs(seis[0].values)) < 1e-10 * np.max(np.abs(inc))


def test_scattered_causality():
    rec = np.array([[0.0, 0.0, -300.0]])
    seis, _ = synth.synthesize_seismograms(CFG, rec, "z", PROF, GRID, Z0,
                                           what="scattered")
    s, t = seis[0].values, GRID.times
    t_path = (abs(Z0 + CFG.radius) + abs(-CFG.radius - rec[0][2])) / CFG.exterior.vp
    onset_shift = synth.ricker_onset(PROF, 0.05) - PROF.t0
    t_early = t_path + PROF.t0 + onset_shift - 0.01
    assert np.max(np.abs(s[t < t_early])) < 0.01 * np.max(np.abs(s))


def test_linearity_exact():
    rec = np.array([[0.0, 0.0, -300.0]])
    s1, _ = synth.synthesize_seismograms(CFG, rec, "z", PROF, GRID, Z0, what="scattered")
    p2 = RickerParams(f_peak=PROF.f_peak, t0=PROF.t0, amplitude=2.0)
    s2, _ = synth.synthesize_seismograms(CFG, rec, "z", p2, GRID, Z0, what="scattered")
    assert np.array_equal(s2[0].values, 2.0 * s1[0].values)


def test_real_output_imag_residue():
    rec = np.array([[0.0, 0.0, -120.0], [0.0, 0.0, 80.0]])
    _, diag = synth.synthesize_seismograms(CFG, rec, "z", PROF, GRID, Z0,
                                           what="scattered")
    assert diag["imag_residue"] < 1e-12


def test_parseval():
    rng = np.random.default_rng(3)
    nf = 40
    coeff = np.zeros(513, dtype=complex)
    coeff[1:nf + 1] = rng.normal(size=nf) + 1j * rng.normal(size=nf)
    series, _ = synth.synthesize_real(coeff, 1024)
    e_time = np.sum(series ** 2)
    # independent frequency-domain sum: N * sum |S_k|^2 over the full spectrum
    e_freq = 1024 * 2 * np.sum(np.abs(coeff) ** 2)
    assert e_time == pytest.approx(e_freq, rel=1e-8)


def test_interior_receiver_needs_side_on_interface():
    rec = np.array([[0.0, 0.0, CFG.radius]])
    with pytest.raises(ValueError):
        synth.synthesize_seismograms(CFG, rec, "z", PROF, GRID, Z0)


def test_reverberation_spacing_interior():
    # off-centre interior monitor: envelope bumps repeat every 4R/vp_a
    from scipy.signal import find_peaks
    prof = RickerParams.from_beta(44000.0, t0=0.025)
    grid = TimeGrid(dt=1.0 / 2048.0, n_steps=2048)
    seis, _ = synth.synthesize_seismograms(
        CFG, np.array([[0.0, 0.0, -15.0]]), "z", prof, grid, Z0,
        what="total", sides=["interior"])
    s = seis[0].values
    n = len(s)
    h = np.zeros(n)
    h[0] = 1
    h[1:n // 2] = 2
    h[n // 2] = 1
    env = np.abs(synth.ifft_radix2(synth.fft_radix2(s.astype(complex)) * h))
    pk, _ = find_peaks(env, height=0.12 * np.max(env), distance=int(0.05 / grid.dt))
    spacing = np.median(np.diff(grid.times[pk]))
    target = 4 * CFG.radius / CFG.interior.vp
    assert abs(spacing - target) / target < 0.10


def test_seismogram_shape_validation():
    with pytest.raises(ValueError):
        Seismogram(receiver=np.zeros(3), component="z", grid=GRID,
                   values=np.zeros(3))
