"""Scalar special functions used throughout the package.

The heavy lifting is delegated to :mod:`scipy.special`; the wrappers here pin
down the domains the solver relies on and raise ``ValueError`` outside them.
All functions accept numpy arrays where that makes sense.
"""

import math

import numpy as np
from scipy import special as sp


class DomainError(ValueError):
    """Argument outside the supported domain of a special function."""


def _is_half_integer_order(nu):
    k = 2.0 * nu
    return k == math.floor(k) and k >= -1


def bessel_j(nu, x):
    """Bessel function of the first kind J_nu(x) for x >= 0.

    Only integer and half-integer orders nu >= -1/2 are supported, which
    covers every order (d - 2) / 2 arising for a dimension d >= 1.
    """
    if not _is_half_integer_order(nu):
        raise DomainError(f"unsupported Bessel order {nu!r}; need k/2 with k >= -1")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("bessel_j requires x >= 0")
    out = sp.jv(nu, x)
    if nu == -0.5:
        out = np.where(x == 0, np.inf, out)
    return out[()] if out.ndim == 0 else out


def erfcx_complex(z):
    """Scaled complementary error function exp(z**2) * erfc(z).

    Complex arguments go through the Faddeeva implementation in scipy.
    The right half-plane is the only region the oracles need.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(z.real < 0):
        raise DomainError("erfcx_complex requires Re(z) >= 0")
    out = sp.erfcx(z)
    return out[()] if out.ndim == 0 else out


def gamma_fn(x):
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("gamma_fn requires x > 0")
    out = sp.gamma(x)
    return out[()] if out.ndim == 0 else out


def upper_incomplete_gamma(s, x):
    """Non-regularized upper incomplete gamma: integral of t**(s-1) e**-t over [x, inf)."""
    if s <= 0:
        raise DomainError("upper_incomplete_gamma requires s > 0")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("upper_incomplete_gamma requires x >= 0")
    out = sp.gammaincc(s, x) * sp.gamma(s)
    return out[()] if out.ndim == 0 else out


def surface_area_sphere(d):
    """Surface area S_{d-1} of the unit sphere in R^d, i.e. 2 pi^(d/2) / Gamma(d/2)."""
    if d < 1 or int(d) != d:
        raise DomainError("surface_area_sphere requires an integer d >= 1")
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


def pochhammer(a, n):
    """Rising factorial (a)_n = a (a+1) ... (a+n-1)."""
    if n < 0 or int(n) != n:
        raise DomainError("pochhammer requires an integer n >= 0")
    out = 1.0
    for k in range(int(n)):
        out *= a + k
    return out
