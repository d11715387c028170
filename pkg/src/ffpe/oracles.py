"""Reference solutions that share no code with the production solver.

Closed forms are evaluated in mpmath at raised precision. Each result carries
an estimate of its relative accuracy, obtained by re-evaluating at a higher
working precision (or, for truncated asymptotic series, from the first term
that was left out).
"""

import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np
from numpy.polynomial import legendre as npleg
from scipy.special import jv

from .quadrature import graded_panel_integral

# floor for est_accuracy, so the field stays strictly positive
_EPS_FLOOR = 1e-30
USABLE = 1e-12
_TRUNCATION_OK = 1e-16


@dataclass(frozen=True)
class OracleResult:
    value: float
    est_accuracy: float
    method: str
    usable: bool = True
    detail: str = ""


def _rel(a, b):
    if a == b:
        return _EPS_FLOOR
    return max(float(abs(a - b) / max(abs(a), abs(b))), _EPS_FLOOR)


def _two_precisions(fn, low=40, high=70):
    with mp.workdps(low):
        a = fn()
    with mp.workdps(high):
        b = fn()
    return b, _rel(a, b)


def _sphere(n):
    """Surface area of the unit sphere in R^n, as an mpf."""
    return 2 * mp.pi ** (mp.mpf(n) / 2) / mp.gamma(mp.mpf(n) / 2)


# ---------------------------------------------------------------- alpha = 1/2

def cauchy_density(y, t, d, Df):
    """Multivariate Cauchy density: the exact answer for alpha = 1/2, Do = 0."""
    def fn():
        y_, tau = mp.mpf(y), mp.mpf(Df) * mp.mpf(t)
        h = mp.mpf(d + 1) / 2
        return mp.gamma(h) / mp.pi ** h * tau / (tau ** 2 + y_ ** 2) ** h

    val, acc = _two_precisions(fn, 30, 50)
    return OracleResult(float(val), max(acc, 1e-17), "cauchy")


def _erfcx(z):
    return mp.exp(z * z) * mp.erfc(z)


def alpha_half_1d(y, t, Do, Df):
    """d = 1, alpha = 1/2 with ordinary diffusion, via two conjugate erfcx terms."""
    if not Do > 0:
        raise ValueError("alpha_half_1d needs Do > 0; use cauchy_density for Do = 0")

    def fn():
        a = mp.mpf(Do) * mp.mpf(t)
        b = mp.mpf(Df) * mp.mpf(t)
        y_ = mp.mpf(y)
        s = 2 * mp.sqrt(a)
        bracket = _erfcx((b - 1j * y_) / s) + _erfcx((b + 1j * y_) / s)
        return bracket / (2 * mp.sqrt(4 * mp.pi * a))

    val, acc = _two_precisions(fn)
    resid = abs(mp.im(val)) / abs(val) if val != 0 else 0
    acc = max(acc, float(resid), 1e-17)
    return OracleResult(float(mp.re(val)), acc, "erfcx_1d")


def k_sequence(z, n, Do, Df, t, sign=+1):
    """K_0 .. K_n where K_m(z) = integral of r**m exp(-Do t r**2 - (Df t + sign i z) r) over r > 0.

    Built with the three-term recurrence from two erfcx seeds. Works in the
    current mpmath precision; callers raise it to absorb cancellation.
    """
    a = mp.mpf(Do) * mp.mpf(t)
    c = mp.mpf(Df) * mp.mpf(t) + sign * 1j * mp.mpf(z)
    e = _erfcx(c / (2 * mp.sqrt(a)))
    ks = [mp.sqrt(mp.pi) / (2 * mp.sqrt(a)) * e]
    if n >= 1:
        ks.append(1 / (2 * a) - mp.sqrt(mp.pi) * c / (4 * a ** mp.mpf(1.5)) * e)
    for m in range(1, n):
        ks.append(-c / (2 * a) * ks[m] + m / (2 * a) * ks[m - 1])
    return ks


def k_recurrence_residuals(ks, Do, Df, t, z, sign=+1):
    """Relative residual of K_{m+1} = -(c/2a) K_m + (m/2a) K_{m-1} at each m."""
    a = mp.mpf(Do) * mp.mpf(t)
    c = mp.mpf(Df) * mp.mpf(t) + sign * 1j * mp.mpf(z)
    out = []
    for m in range(1, len(ks) - 1):
        lhs = ks[m + 1]
        rhs = -c / (2 * a) * ks[m] + m / (2 * a) * ks[m - 1]
        out.append(float(abs(lhs - rhs) / abs(lhs)))
    return out


def _t_plus(p, q, y, kp, km, memo):
    key = (p, q)
    if key in memo:
        return memo[key]
    iy = 1j * y
    if p == 1:
        val = (km[q - 1] - kp[q - 1]) / iy
    elif p == 3:
        val = -2 / y ** 2 * (km[q - 2] + kp[q - 2]) + 2 / (y ** 2 * iy) * (km[q - 3] - kp[q - 3])
    else:
        val = (-(p - 1) * (p - 3) / y ** 2 * _t_plus(p - 4, q - 2, y, kp, km, memo)
               + (p - 1) * (p - 2) / y ** 2 * _t_plus(p - 2, q - 2, y, kp, km, memo))
    memo[key] = val
    return val


def _odd_d_value(y, t, Do, Df, d):
    y_ = mp.mpf(y)
    if y_ == 0:
        k = k_sequence(0, d - 1, Do, Df, t)
        return _sphere(d) / (2 * mp.pi) ** d * mp.re(k[d - 1])
    kp = k_sequence(y_, d - 1, Do, Df, t, +1)
    km = k_sequence(y_, d - 1, Do, Df, t, -1)
    tv = _t_plus(d - 2, d - 1, y_, kp, km, {})
    return _sphere(d - 1) / (2 * mp.pi) ** d * tv


def alpha_half_odd_d(y, t, Do, Df, d):
    """alpha = 1/2, Do > 0, odd d >= 3: nested K / T recurrences in complex arithmetic."""
    if d < 3 or d % 2 == 0:
        raise ValueError("alpha_half_odd_d covers odd d >= 3 only")
    if not Do > 0:
        raise ValueError("alpha_half_odd_d needs Do > 0")
    # the T recurrence divides by y**2 repeatedly; give small y extra digits
    extra = int(max(0.0, -math.log10(y)) * (d + 2)) if y > 0 else 0
    val, acc = _two_precisions(lambda: _odd_d_value(y, t, Do, Df, d), 40 + extra, 70 + extra)
    resid = float(abs(mp.im(val)) / abs(val)) if val != 0 else 0.0
    acc = max(acc, resid, 1e-17)
    return OracleResult(float(mp.re(val)), acc, "recurrence_odd_d", acc <= USABLE)


def alpha_half_d3_closed(y, t, Do, Df):
    def fn():
        a = mp.mpf(Do) * mp.mpf(t)
        b = mp.mpf(Df) * mp.mpf(t)
        y_ = mp.mpf(y)
        s = 2 * mp.sqrt(a)
        num = -(b - 1j * y_) * _erfcx((b - 1j * y_) / s) + (b + 1j * y_) * _erfcx((b + 1j * y_) / s)
        return mp.re(num / (16 * (a * mp.pi) ** mp.mpf(1.5) * y_ * 1j))

    val, acc = _two_precisions(fn)
    return OracleResult(float(val), max(acc, 1e-17), "recurrence_odd_d", detail="closed form d=3")


def alpha_half_d5_closed(y, t, Do, Df):
    def fn():
        a = mp.mpf(Do) * mp.mpf(t)
        b = mp.mpf(Df) * mp.mpf(t)
        y_ = mp.mpf(y)
        s = 2 * mp.sqrt(a)
        em = _erfcx((b - 1j * y_) / s)
        ep = _erfcx((b + 1j * y_) / s)
        v = b / (16 * mp.pi * (a * mp.pi) ** 2 * y_ ** 2)
        v -= b / (32 * mp.pi * (a * mp.pi) ** mp.mpf(1.5) * y_ ** 3 * 1j) * (em - ep)
        v -= ((b - 1j * y_) ** 2 * em + (b + 1j * y_) ** 2 * ep) / (64 * (a * mp.pi) ** mp.mpf(2.5) * y_ ** 2)
        return mp.re(v)

    val, acc = _two_precisions(fn, 50, 80)
    return OracleResult(float(val), max(acc, 1e-17), "recurrence_odd_d", detail="closed form d=5")


def alpha_half(y, t, Do, Df, d):
    """Dispatch to the alpha = 1/2 reference that covers (d, Do)."""
    if Do == 0:
        return cauchy_density(y, t, d, Df)
    if d == 1:
        return alpha_half_1d(y, t, Do, Df)
    return alpha_half_odd_d(y, t, Do, Df, d)


# ------------------------------------------------------------ alpha = 1 / q

def _series_parts(y, t, d, Df, q):
    tau = mp.mpf(Df) * mp.mpf(t)
    prefactor = (_sphere(d) * mp.gamma(mp.mpf(q) * d / 2 + 1)
                 / ((2 * mp.pi) ** d * tau ** (mp.mpf(q) * d / 2) * d))
    upper = [mp.mpf(d) / 2 + mp.mpf(j) / q for j in range(1, q)]
    x = -mp.mpf(q) ** q * (mp.mpf(y) / 2) ** 2 / tau ** q
    return prefactor, upper, x


def _borel_hyp0(upper, x):
    """Borel sum of pF0(upper;; x) for x <= 0.

    Up to two parameters mpmath handles directly (through the confluent U
    function). Each further parameter c is peeled off with the Laplace
    transform pF0(.., c;; x) = 1/Gamma(c) * int_0^inf e^-s s^(c-1) (p-1)F0(..;; x s) ds.
    """
    if len(upper) <= 2 or x == 0:
        return mp.hyper(upper, [], x)
    c = upper[-1]
    inner = lambda s: mp.exp(-s) * s ** (c - 1) * _borel_hyp0(upper[:-1], x * s)
    return mp.quad(inner, [0, mp.mpf("1e-6"), mp.mpf("1e-3"), mp.mpf("0.1"), 1, 5, 20, 80]) / mp.gamma(c)


def rational_alpha_series(y, t, d, Df, q):
    """Do = 0, alpha = 1/q: prefactor times a (q-1)F0 series in -(y/2)^2 q^q / (Df t)^q.

    The series diverges for y != 0. It is first summed up to its smallest
    term; if the first omitted term exceeds 1e-16 of the sum, the
    Borel-summed value of the hypergeometric function is used and its
    accuracy is estimated by a precision comparison.
    """
    if q < 2 or int(q) != q:
        raise ValueError("q must be an integer >= 2")
    with mp.workdps(40):
        prefactor, upper, x = _series_parts(y, t, d, Df, q)
        total, term, m = mp.mpf(0), mp.mpf(1), 0
        while True:
            total += term
            nxt = term * x / (m + 1)
            for a in upper:
                nxt *= a + m
            m += 1
            if x == 0 or abs(nxt) >= abs(term) or m > 500:
                break
            term = nxt
        omitted = 0.0 if x == 0 else float(abs(nxt) / abs(total))
        # a truncated sum is only kept when it is as good as a double; the
        # Borel sum below is more accurate whenever it is not
        if omitted <= _TRUNCATION_OK:
            value = float(prefactor * total)
            return OracleResult(value, max(omitted, 1e-17), "rational_alpha_series",
                                detail=f"truncated after {m} terms")

    def fn():
        pre, up, xx = _series_parts(y, t, d, Df, q)
        return pre * _borel_hyp0(up, xx)

    val, acc = _two_precisions(fn, 30, 45)
    acc = max(acc, 1e-17)
    return OracleResult(float(val), acc, "rational_alpha_series", acc <= USABLE,
                        detail="Borel sum")


def zero_displacement_closed(t, d, Df, alpha):
    """p(0, t) for Do = 0 in closed form."""
    with mp.workdps(30):
        val = (_sphere(d) / ((2 * mp.pi) ** d * d) * (mp.mpf(Df) * mp.mpf(t)) ** (-mp.mpf(d) / (2 * mp.mpf(alpha)))
               * mp.gamma(mp.mpf(d) / (2 * mp.mpf(alpha)) + 1))
    return OracleResult(float(val), 1e-17, "closed_form")


# ------------------------------------------------------------- brute force

def _kernel(y, d):
    """Radial integrand factor (without the exponential) and its overall constant."""
    if y == 0:
        s = float(_sphere(d))
        return lambda r: s / (2 * np.pi) * (r / (2 * np.pi)) ** (d - 1)
    if d == 1:
        return lambda r: np.cos(y * r) / np.pi
    nu = (d - 2) / 2
    return lambda r: (r / (2 * np.pi)) ** (d / 2) * jv(nu, y * r) / y ** nu


def _tail_radius(d, t, Do, Df, alpha, tol=1e-22, cap=1e6):
    # the envelope r^(d-1) e^{-Do t r^2 - Df t r^{2 alpha}} must fall far below tol
    r = 1.0
    while r < cap:
        env = (d - 1) * math.log(r) - Do * t * r * r - Df * t * r ** (2 * alpha)
        if env < math.log(tol) and r > 4:
            return r
        r *= 1.25
    return cap


def _panel_sum(h, a, b, width, points):
    x, w = npleg.leggauss(points)
    n = max(1, int(math.ceil((b - a) / width)))
    total = 0.0
    edges = np.linspace(a, b, n + 1)
    # chunked to bound memory on long ranges
    step = 20000
    for k in range(0, n, step):
        lo = edges[k:k + step + 1]
        left, right = lo[:-1], lo[1:]
        half = 0.5 * (right - left)
        nodes = (left[:, None] + half[:, None] * (x + 1.0)).ravel()
        weights = (half[:, None] * w).ravel()
        total += float(np.dot(weights, h(nodes)))
    return total


def brute_force(y, t, d, Do, Df, alpha, R=None, points=20):
    """Composite Gauss-Legendre on the real axis, graded near r = 0.

    Panels span at most one oscillation period (and at most one unit), each
    carrying ``points`` nodes. The estimate compares against a run with
    panels half as wide.
    """
    kern = _kernel(y, d)

    def h(r):
        return kern(r) * np.exp(-Do * t * r * r - Df * t * r ** (2 * alpha))

    R = _tail_radius(d, t, Do, Df, alpha) if R is None else R
    width = min(1.0, 2 * np.pi / y) if y > 0 else 1.0
    head = float(graded_panel_integral(h, 0.0, 1.0))
    coarse = head + _panel_sum(h, 1.0, R, width, points)
    fine = head + _panel_sum(h, 1.0, R, width / 2, points)
    acc = max(_rel(coarse, fine), 1e-16)
    return OracleResult(fine, acc, "brute_force", acc <= 1e-10, detail=f"R={R:g}")


def cosine_tail_reference(alpha, tau, L=1.0):
    """Integral of cos(z) exp(-tau z**(2 alpha)) over [L, inf), by rotating the
    contour to z = L + i s where the integrand decays like exp(-s)."""

    def fn():
        a2 = 2 * mp.mpf(alpha)
        g = lambda s: 1j * mp.exp(1j * (L + 1j * s)) * mp.exp(-mp.mpf(tau) * (L + 1j * s) ** a2)
        return mp.re(mp.quad(g, [0, 1, 5, 20, 60, 200]))

    val, acc = _two_precisions(fn, 25, 35)
    return OracleResult(float(val), max(acc, 1e-17), "brute_force", detail="rotated contour")
