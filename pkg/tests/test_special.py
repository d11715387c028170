import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ffpe.special import (
    DomainError,
    bessel_j,
    erfcx_complex,
    gamma_fn,
    pochhammer,
    surface_area_sphere,
    upper_incomplete_gamma,
)

# 50-digit mpmath values
J32_AT_10 = 0.19798249275589310479770239992111732333538708943513
ERFCX_1_PLUS_1J = complex(
    0.30474420525691259245713884106959496013413834051769,
    -0.20821893820283162728743734725471561394145872072739,
)
GAMMA_3_7 = 4.1706517837966031653936029986179837279404455809898
UPPER_GAMMA_2_5_3 = 0.4070691758713029984342391747281107444956903674541


def test_bessel_examples():
    assert bessel_j(0, 0.0) == 1.0
    assert bessel_j(1, 0.0) == 0.0
    assert bessel_j(0.5, math.pi / 2) == pytest.approx(2 / math.pi, rel=1e-15)
    assert bessel_j(1.5, 10.0) == pytest.approx(J32_AT_10, rel=1e-13)


def test_bessel_rejects_bad_order():
    with pytest.raises(DomainError):
        bessel_j(0.3, 1.0)
    with pytest.raises(DomainError):
        bessel_j(-1.0, 1.0)


@pytest.mark.parametrize("nu", [-0.5, 0.0, 0.5, 1.0, 1.5, 3.5, 6.0, 13.5])
def test_bessel_against_mpmath(nu):
    xs = [1e-3, 0.3, 1.0, 4.2, 17.0, 150.0, 2.5e3, 9.9e4]
    with mpmath.workdps(40):
        for x in xs:
            ref = float(mpmath.besselj(nu, x))
            got = bessel_j(nu, x)
            # relative to the envelope: pointwise relative error is meaningless at zeros
            scale = max(abs(ref), min(1.0, math.sqrt(2 / (math.pi * x))))
            assert abs(got - ref) <= 1e-13 * scale, (nu, x)


def test_half_order_identity():
    x = np.linspace(1e-3, 100, 2001)
    lhs = bessel_j(0.5, x) * np.sqrt(np.pi * x / 2)
    assert np.max(np.abs(lhs - np.sin(x))) <= 1e-13


def test_three_term_recurrence():
    rng = np.random.default_rng(7)
    for _ in range(200):
        nu = rng.integers(1, 30) / 2
        x = rng.uniform(0.1, 200)
        jm, j0, jp = bessel_j(nu - 1, x), bessel_j(nu, x), bessel_j(nu + 1, x)
        assert abs(jm + jp - 2 * nu / x * j0) <= 1e-12 * max(1.0, abs(j0))


def test_erfcx_examples():
    assert erfcx_complex(0) == 1.0
    assert erfcx_complex(1.0).real == pytest.approx(0.427583576155807, rel=1e-14)
    got = erfcx_complex(1 + 1j)
    assert abs(got - ERFCX_1_PLUS_1J) <= 1e-14 * abs(ERFCX_1_PLUS_1J)
    assert erfcx_complex(1 - 1j) == pytest.approx(np.conj(got), rel=1e-15)


def test_erfcx_domain():
    with pytest.raises(DomainError):
        erfcx_complex(-0.1 + 2j)


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 30), st.floats(-60, 60))
def test_erfcx_against_mpmath(re, im):
    z = complex(re, im)
    with mpmath.workdps(40):
        mz = mpmath.mpc(re, im)
        ref = complex(mpmath.exp(mz * mz) * mpmath.erfc(mz))
    got = erfcx_complex(z)
    assert abs(got - ref) <= 1e-12 * abs(ref)
    assert erfcx_complex(z.conjugate()) == pytest.approx(got.conjugate(), rel=1e-15)


def test_erfcx_real_axis_matches_erfc():
    from scipy.special import erfc

    x = np.linspace(0, 5, 501)
    got = erfcx_complex(x.astype(complex)).real * np.exp(-x * x)
    assert np.max(np.abs(got - erfc(x)) / erfc(x)) <= 1e-12


def test_gamma():
    assert gamma_fn(1.0) == 1.0
    assert gamma_fn(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-15)
    assert gamma_fn(3.7) == pytest.approx(GAMMA_3_7, rel=1e-14)
    for n in range(1, 15):
        assert gamma_fn(n + 1.0) == pytest.approx(math.factorial(n), rel=1e-14)
    with pytest.raises(DomainError):
        gamma_fn(0.0)


def test_gamma_recurrence():
    x = np.linspace(0.01, 50, 997)
    assert np.max(np.abs(gamma_fn(x + 1) / (x * gamma_fn(x)) - 1)) <= 1e-13


def test_upper_incomplete_gamma():
    x = np.linspace(0, 20, 41)
    assert np.allclose(upper_incomplete_gamma(1.0, x), np.exp(-x), rtol=1e-14, atol=0)
    assert upper_incomplete_gamma(2.0, 0.0) == pytest.approx(1.0, rel=1e-15)
    assert upper_incomplete_gamma(2.5, 3.0) == pytest.approx(UPPER_GAMMA_2_5_3, rel=1e-13)
    vals = upper_incomplete_gamma(3.3, np.linspace(0, 40, 200))
    assert np.all(np.diff(vals) < 0)


@pytest.mark.parametrize("s,x", [(0.5, 0.7), (2.5, 3.0), (7.5, 4.0), (15.0, 20.0)])
def test_upper_plus_lower_is_gamma(s, x):
    from ffpe.quadrature import graded_panel_integral

    lower = graded_panel_integral(lambda t: t ** (s - 1) * np.exp(-t), 0.0, x)
    assert upper_incomplete_gamma(s, x) + lower == pytest.approx(math.gamma(s), rel=1e-10)


def test_surface_area():
    assert surface_area_sphere(1) == 2.0
    assert surface_area_sphere(2) == pytest.approx(2 * math.pi, rel=1e-15)
    assert surface_area_sphere(3) == pytest.approx(4 * math.pi, rel=1e-15)


def test_pochhammer():
    assert pochhammer(3.3, 0) == 1.0
    assert pochhammer(1, 6) == math.factorial(6)
    assert pochhammer(0.5, 3) == 1.875
