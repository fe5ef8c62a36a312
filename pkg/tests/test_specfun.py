import math
from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cavityscatter import specfun as sf

mp.mp.dps = 50


def series_j_oracle(l, x, terms=200):
    """Ascending-series oracle for j_l, evaluated in 50-digit arithmetic:
    j_l(x) = x^l/(2l+1)!! * sum_k (-x^2/2)^k / (k! (2l+3)(2l+5)...(2l+2k+1))."""
    x = mp.mpf(x)
    dfact = mp.mpf(1)
    for j in range(1, 2 * l + 2, 2):
        dfact *= j
    total = mp.mpf(0)
    term = mp.mpf(1)
    for k in range(terms):
        if k > 0:
            term *= (-x * x / 2) / (k * (2 * l + 2 * k + 1))
        total += term
    return float(x ** l / dfact * total)


def y_oracle(l, x):
    """Second-kind oracle from mpmath's hypergeometric-series Bessel Y."""
    x = mp.mpf(x)
    return float(mp.sqrt(mp.pi / (2 * x)) * mp.bessely(l + mp.mpf(1) / 2, x))


def test_j_at_zero_exact():
    assert sf.spherical_bessel_j(0, 0.0) == 1.0
    assert sf.spherical_bessel_j(1, 0.0) == 0.0
    assert sf.spherical_bessel_j(7, 0.0) == 0.0


def test_j0_at_pi():
    assert abs(sf.spherical_bessel_j(0, np.pi)) < 1e-14


def test_j_against_series_oracle():
    val = sf.spherical_bessel_j(5, 2.0)
    ref = series_j_oracle(5, 2.0)
    assert abs(val - ref) / abs(ref) < 1e-12


@pytest.mark.parametrize("l", range(0, 21))
def test_j_oracle_sweep(l):
    for x in [0.1, 0.7, 2.0, 5.5, 13.0, 27.0, 50.0]:
        ref = series_j_oracle(l, x, terms=300)
        val = sf.spherical_bessel_j(l, x)
        assert abs(val - ref) <= 1e-10 * max(abs(ref), 1e-300)


def test_j_complex_argument():
    z = 1.5 + 0.7j
    val = sf.spherical_bessel_j(0, z)
    assert abs(val - np.sin(z) / z) < 1e-13
    val3 = sf.spherical_bessel_j(3, z)
    ref = complex(mp.sqrt(mp.pi / (2 * mp.mpc(z))) * mp.besselj(mp.mpf(7) / 2, mp.mpc(z)))
    assert abs(val3 - ref) / abs(ref) < 1e-12


def test_order_cap():
    with pytest.raises(sf.CapabilityError):
        sf.spherical_bessel_j(sf.L_CAP + 1, 1.0)


def test_hankel2_closed_form():
    # h2_0(x) = i e^{-ix} / x
    x = 1.0
    ref = 1j * np.exp(-1j * x) / x
    assert abs(sf.spherical_hankel2(0, x) - ref) < 1e-14
    assert abs(abs(sf.spherical_hankel2(0, 10.0)) - 0.1) < 1e-14


def test_hankel2_series_oracle():
    x = 2.5
    ref = series_j_oracle(3, x) - 1j * y_oracle(3, x)
    val = sf.spherical_hankel2(3, x)
    assert abs(val - ref) / abs(ref) < 1e-10


def test_hankel_singular_at_zero():
    with pytest.raises(sf.DomainError):
        sf.spherical_hankel2(0, 0.0)


def test_wronskian_identity():
    # j_l y_l' - j_l' y_l = 1/x^2 with derivatives from the recurrences
    for x in np.linspace(0.5, 50.0, 23):
        lmax = 20
        j = sf.sph_jn_seq(lmax + 1, x)
        y = sf.sph_yn_seq(lmax + 1, x)
        dj = sf.sph_f_deriv(j, x)
        dy = sf.sph_f_deriv(y, x)
        for l in range(lmax + 1):
            w = j[l] * dy[l] - dj[l] * y[l]
            assert abs(w - 1.0 / x ** 2) < 1e-10 / x ** 2


@given(st.floats(min_value=0.5, max_value=45.0))
@settings(max_examples=40, deadline=None)
def test_recurrence_consistency(x):
    # (2l+1) f_l / x = f_{l-1} + f_{l+1} for f in {j, h2}
    lmax = 12
    j = sf.sph_jn_seq(lmax + 1, x)
    h = j - 1j * sf.sph_yn_seq(lmax + 1, x)
    for l in range(1, lmax):
        for f in (j, h):
            lhs = (2 * l + 1) * f[l] / x
            rhs = f[l - 1] + f[l + 1]
            assert abs(lhs - rhs) <= 1e-10 * max(abs(lhs), abs(rhs), 1e-280)


# ---------------------------------------------------------------------------
# Legendre
# ---------------------------------------------------------------------------

def rodrigues_oracle(l, x):
    """Exact-coefficient oracle: P_l = 1/(2^l l!) d^l/dx^l (x^2-1)^l computed
    with Fraction arithmetic."""
    # (x^2 - 1)^l coefficients
    coeffs = [Fraction(0)] * (2 * l + 1)
    for k in range(l + 1):
        coeffs[2 * k] = Fraction(math.comb(l, k) * (-1) ** (l - k))
    for _ in range(l):  # differentiate l times
        coeffs = [Fraction(i) * coeffs[i] for i in range(1, len(coeffs))]
    scale = Fraction(1, 2 ** l * math.factorial(l))
    return float(sum(scale * c * Fraction(x).limit_denominator(10 ** 12) ** i
                     for i, c in enumerate(coeffs)))


def test_legendre_at_one():
    for l in range(0, 65, 8):
        assert abs(sf.legendre_p(l, 0, 1.0) - 1.0) < 1e-12


def test_legendre_p1():
    assert abs(sf.legendre_p(1, 0, 0.5) - 0.5) < 1e-15


def test_legendre_rodrigues_oracle():
    assert abs(sf.legendre_p(6, 0, 0.3) - rodrigues_oracle(6, 0.3)) < 1e-13
    assert abs(sf.legendre_p(9, 0, -0.77) - rodrigues_oracle(9, -0.77)) < 1e-12


def test_legendre_domain_error():
    with pytest.raises(sf.DomainError):
        sf.legendre_p(3, 0, 1.5)
    with pytest.raises(sf.DomainError):
        sf.legendre_p(2, 3, 0.5)


def test_legendre_sign_changes():
    xs = np.linspace(-1, 1, 10001)[1:-1]
    for l in range(1, 11):
        vals = sf.legendre_p_seq(l, xs)[l]
        s = vals[vals != 0.0]
        changes = np.sum(s[1:] * s[:-1] < 0)
        assert changes == l


def test_legendre_m_branch_matches_scipy_convention():
    from scipy.special import lpmv
    for (l, m, x) in [(3, 2, 0.4), (5, 1, -0.3), (4, 4, 0.9)]:
        assert abs(sf.legendre_p(l, m, x) - lpmv(m, l, x)) < 1e-10


def test_dtheta_pole_limits():
    d = sf.legendre_dtheta_seq(6, np.array([0.0, np.pi]))
    assert np.all(d[:, :] == 0.0) or np.max(np.abs(d[1:, :])) == 0.0


def test_dtheta_against_finite_difference():
    th = 1.1
    h = 1e-6
    for l in range(1, 9):
        fd = (sf.legendre_p(l, 0, np.cos(th + h)) - sf.legendre_p(l, 0, np.cos(th - h))) / (2 * h)
        assert abs(sf.legendre_dtheta_seq(l, th)[l][0] - fd) < 1e-7


# ---------------------------------------------------------------------------
# Petrashen vectors
# ---------------------------------------------------------------------------

def test_petrashen_l0():
    pt = sf.SphericalPoint(r=2.0, theta=0.7, phi=0.3)
    yp = sf.petrashen_vector(sf.VectorSphericalHarmonic("Yplus", 0), pt)
    assert np.allclose(yp, [1.0, 0.0, 0.0])
    ym = sf.petrashen_vector(sf.VectorSphericalHarmonic("Yminus", 0), pt)
    assert np.allclose(ym, 0.0)


def test_petrashen_gradient_fd_oracle():
    # r grad Y has only a theta component; central difference in theta
    l, th = 2, np.pi / 3
    h = 1e-5
    dfd = (sf.legendre_p(l, 0, np.cos(th + h)) - sf.legendre_p(l, 0, np.cos(th - h))) / (2 * h)
    pt = sf.SphericalPoint(r=1.0, theta=th)
    yp = sf.petrashen_vector(sf.VectorSphericalHarmonic("Yplus", l), pt)
    p = sf.legendre_p(l, 0, np.cos(th))
    assert abs(yp[0] - (l + 1) * p) < 1e-12
    assert abs(yp[1] - (-dfd)) < 1e-8


def test_petrashen_axisymmetric_no_phi_component():
    for kind in ("Yplus", "Yminus"):
        for l in range(0, 8):
            for th in np.linspace(0.0, np.pi, 9):
                v = sf.petrashen_vector(sf.VectorSphericalHarmonic(kind, l),
                                        sf.SphericalPoint(r=1.0, theta=th))
                assert v[2] == 0.0


def test_petrashen_m_nonzero_rejected():
    with pytest.raises(sf.CapabilityError):
        sf.petrashen_vector(sf.VectorSphericalHarmonic("Yplus", 2, 1),
                            sf.SphericalPoint(r=1.0, theta=0.5))


def test_spherical_point_validation():
    with pytest.raises(sf.DomainError):
        sf.SphericalPoint(r=-1.0, theta=0.5)
    with pytest.raises(sf.DomainError):
        sf.SphericalPoint(r=1.0, theta=4.0)
