"""Fundamental solution of the constant-coefficient fractional Fokker-Planck equation.

    dp/dt + b . grad p = Do Lap p - Df (-Lap)^alpha p,    p(x, 0) = delta(x - x0)

The solution depends on x only through y = |x - x0 - b t|. It is written as a
one-dimensional Fourier-Bessel integral over the radial frequency r,

    p(y, t) = y^(-nu) int_0^inf (r / 2 pi)^(d/2) J_nu(y r) exp(-(Do r^2 + Df r^(2 alpha)) t) dr,

with nu = (d - 2) / 2 (for d = 1 this is (1/pi) int cos(y r) ...). The
integral is split at r = 1: the near-origin piece goes to the singular
integrator, the rest to the windowed far-field integrator.

Scaling law used for hard evaluations, valid for any T > 0:

    p(y, t; Do) = (t/T)^(-d/(2 alpha)) p((t/T)^(-1/(2 alpha)) y, T; (t/T)^(1 - 1/alpha) Do)
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import farfield, singular
from .farfield import FarFieldReport
from .special import bessel_j, gamma_fn, surface_area_sphere, upper_incomplete_gamma

Y_LIMIT = 10.0
Y_SCALED = math.pi / 2
L_SPLIT = 1.0


class BranchError(ValueError):
    pass


@dataclass(frozen=True)
class ProblemParams:
    d: int
    Do: float
    Df: float
    alpha: float
    b: tuple = None
    x0: tuple = None

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.d}")
        if self.Do < 0 or self.Df < 0:
            raise ValueError("diffusion coefficients must be nonnegative")
        if not self.Do + self.Df > 0:
            raise ValueError("Do + Df must be positive")
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        for name in ("b", "x0"):
            v = getattr(self, name)
            if v is not None and len(v) != self.d:
                raise ValueError(f"{name} has length {len(v)}, expected {self.d}")

    def replace(self, **kw):
        fields = dict(d=self.d, Do=self.Do, Df=self.Df, alpha=self.alpha, b=self.b, x0=self.x0)
        fields.update(kw)
        return ProblemParams(**fields)


@dataclass
class SolutionValue:
    density: float
    branch: str
    used_scaling: bool = False
    scaled_T: float = None
    scaled_Do: float = None
    farfield: FarFieldReport = None
    direct_flag: bool = False
    extra: dict = field(default_factory=dict)

    @property
    def flagged(self):
        """True when the far-field loop behind the returned value did not converge."""
        return self.farfield is not None and not self.farfield.converged

    def diagnostics(self):
        ff = self.farfield
        return {
            "branch": self.branch,
            "used_scaling": self.used_scaling,
            "scaled_T": self.scaled_T,
            "scaled_Do": self.scaled_Do,
            "final_M": None if ff is None else ff.final_M,
            "converged": None if ff is None else ff.converged,
            "iterations": None if ff is None else ff.iterations,
            "last_delta": None if ff is None else ff.last_delta,
            "direct_flag": self.direct_flag,
        }


def displacement(params: ProblemParams, x, t: float) -> float:
    """y = |x - x0 - b t| for a point x in d-space."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (params.d,):
        raise ValueError(f"point has shape {x.shape}, expected ({params.d},)")
    x0 = np.zeros(params.d) if params.x0 is None else np.asarray(params.x0, dtype=float)
    b = np.zeros(params.d) if params.b is None else np.asarray(params.b, dtype=float)
    return float(np.linalg.norm(x - x0 - b * t))


def _two_prod(a, b):
    """a * b as an unevaluated sum hi + lo (Dekker's splitting, exact barring overflow)."""
    p = a * b
    c = 134217729.0  # 2**27 + 1
    ah = a * c
    ah = ah - (ah - a)
    bh = b * c
    bh = bh - (bh - b)
    al, bl = a - ah, b - bh
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _gaussian_exponent(y, a):
    """y**2 / (4 a) as hi + lo. The exponent can reach several hundred, where a
    single rounding would cost ~1e-14 relative accuracy in exp."""
    n_hi, n_lo = _two_prod(y, y)
    q = n_hi / (4 * a)
    p_hi, p_lo = _two_prod(q, 4 * a)
    return q, ((n_hi - p_hi) - p_lo + n_lo) / (4 * a)


def gaussian_fallback(y: float, t: float, params: ProblemParams) -> float:
    if params.Df != 0:
        raise BranchError("the Gaussian closed form only applies when Df = 0")
    d = params.d
    a, a_lo = _two_prod(params.Do, t)
    q, q_lo = _gaussian_exponent(y, a)
    # a_lo / a is the relative rounding of Do t; it enters the exponent and the prefactor
    q_lo -= q * a_lo / a
    return (4 * math.pi * a) ** (-d / 2) * (1 - d / 2 * a_lo / a) * math.exp(-q) * math.exp(-q_lo)


def zero_displacement_closed_form(t: float, params: ProblemParams) -> float:
    d, al = params.d, params.alpha
    return (surface_area_sphere(d) / ((2 * math.pi) ** d * d)
            * (params.Df * t) ** (-d / (2 * al)) * math.gamma(d / (2 * al) + 1))


def _points_per_unit(base, y, decay, scale=2.0):
    """Node density for the far-field rule.

    ``base`` is enough for oscillation frequency y <= 2 and mild decay. Panels
    are narrowed so that neither the oscillation (frequency y) nor the decay
    rate of the integrand at r = L (``decay``) changes too much across one
    16-point panel; doubling M alone never refines the panels.
    """
    return max(base, scale * y, scale * decay)


class Solver:
    """Evaluation handle holding the integrator configurations.

    Rule caches are module-level and thread-safe, so one handle may serve
    concurrent ``solve`` calls.
    """

    def __init__(self, singular_config=singular.DEFAULT_CONFIG, farfield_config=farfield.DEFAULT_CONFIG,
                 y_limit=Y_LIMIT, tail_target=1e-16, tail_radius=None):
        self.singular_config = singular_config
        self.farfield_config = farfield_config
        self.y_limit = y_limit
        self.tail_target = tail_target
        self.tail_radius = farfield_config.M_init if tail_radius is None else tail_radius

    # -- the split integral -------------------------------------------------

    def _integrate(self, f, alpha, tau, y=0.0, gauss=0.0):
        cfg = self.farfield_config
        decay = 2 * alpha * tau * L_SPLIT ** (2 * alpha - 1) + 2 * gauss * L_SPLIT
        ppu = _points_per_unit(cfg.points_per_unit, y, decay)
        if ppu != cfg.points_per_unit:
            cfg = farfield.FarFieldConfig(cfg.M_init, cfg.M_max, cfg.epsilon, ppu, cfg.gamma)
        far = farfield.integrate_slow_decay(f, L_SPLIT, alpha, tau, cfg)
        near = singular.integrate_singular(f, L_SPLIT, alpha, tau, self.singular_config)
        return near + far.value, far

    # -- zero displacement -------------------------------------------------

    def zero_displacement_direct(self, t, params):
        d, Do = params.d, params.Do

        def f(r):
            return (r / (2 * np.pi)) ** (d - 1) * np.exp(-Do * r * r * t)

        g, far = self._integrate(f, params.alpha, params.Df * t, 0.0, Do * t)
        return SolutionValue(surface_area_sphere(d) / (2 * math.pi) * g, "zero_disp_quad", farfield=far)

    def tail_fraction(self, t, T, params):
        """Upper bound on the share of the radial mass beyond R after rescaling t -> T.

        Each of the two exponentials alone bounds the integrand; the share of
        the corresponding single-term integral beyond R is a regularized upper
        incomplete gamma function.
        """
        d, al, R = params.d, params.alpha, self.tail_radius
        xi1 = (t / T) ** (1 - 1 / al) * params.Do * T
        xi2 = params.Df * T
        shares = []
        if xi1 > 0:
            shares.append(upper_incomplete_gamma(d / 2, xi1 * R * R) / gamma_fn(d / 2))
        if xi2 > 0:
            s = d / (2 * al)
            shares.append(upper_incomplete_gamma(s, xi2 * R ** (2 * al)) / gamma_fn(s))
        return min(shares)

    def select_scaling_T(self, t, params, target=None):
        """Smallest T >= t (to bisection resolution) whose tail share is below target,
        or None when t itself already qualifies or Do = 0."""
        target = self.tail_target if target is None else target
        if params.Do == 0 or math.isinf(target):
            return None
        if self.tail_fraction(t, t, params) <= target:
            return None
        lo, hi = 0.0, 6.0  # log10(T / t)
        if self.tail_fraction(t, t * 10 ** hi, params) > target:
            return t * 10 ** hi
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if self.tail_fraction(t, t * 10 ** mid, params) <= target:
                hi = mid
            else:
                lo = mid
        return t * 10 ** hi

    def solve_zero_displacement(self, t, params):
        if params.Df == 0:
            raise BranchError("zero-displacement quadrature needs Df > 0")
        if params.Do == 0:
            return SolutionValue(zero_displacement_closed_form(t, params), "zero_disp_closed")
        T = self.select_scaling_T(t, params)
        if T is None or not T > t:
            return self.zero_displacement_direct(t, params)
        ratio = t / T
        Do_s = ratio ** (1 - 1 / params.alpha) * params.Do
        inner = self.zero_displacement_direct(T, params.replace(Do=Do_s))
        inner.density *= ratio ** (-params.d / (2 * params.alpha))
        inner.used_scaling, inner.scaled_T, inner.scaled_Do = True, T, Do_s
        return inner

    # -- nonzero displacement ----------------------------------------------

    def solve_radial(self, y, t, params, bessel_for_d1=False):
        if not y > 0:
            raise ValueError("solve_radial needs y > 0")
        if params.Df == 0:
            raise BranchError("radial quadrature needs Df > 0")
        d, Do = params.d, params.Do
        if d == 1 and not bessel_for_d1:
            def f(r):
                return np.cos(y * r) * np.exp(-Do * r * r * t)

            g, far = self._integrate(f, params.alpha, params.Df * t, y, Do * t)
            return SolutionValue(g / math.pi, "dim1", farfield=far)
        nu = (d - 2) / 2

        def f(r):
            return (r / (2 * np.pi)) ** (d / 2) * bessel_j(nu, y * r) * np.exp(-Do * r * r * t)

        g, far = self._integrate(f, params.alpha, params.Df * t, y, Do * t)
        return SolutionValue(g / y ** nu, "bessel", farfield=far)

    def solve_scaled(self, y, t, params, T):
        """Evaluate through the scaling law at time T."""
        ratio = t / T
        al = params.alpha
        Do_s = ratio ** (1 - 1 / al) * params.Do
        y_s = ratio ** (-1 / (2 * al)) * y
        inner = self.solve(y_s, T, params.replace(Do=Do_s), allow_scaling=False)
        inner.density *= ratio ** (-params.d / (2 * al))
        inner.used_scaling, inner.scaled_T, inner.scaled_Do = True, T, Do_s
        return inner

    def solve(self, y: float, t: float, params: ProblemParams, allow_scaling: bool = True) -> SolutionValue:
        if not t > 0:
            raise ValueError(f"t must be positive, got {t}")
        if not y >= 0:
            raise ValueError(f"y must be nonnegative, got {y}")
        if params.Df == 0:
            return SolutionValue(gaussian_fallback(y, t, params), "gaussian")
        if y == 0:
            if allow_scaling:
                return self.solve_zero_displacement(t, params)
            return (SolutionValue(zero_displacement_closed_form(t, params), "zero_disp_closed")
                    if params.Do == 0 else self.zero_displacement_direct(t, params))
        direct = None
        if y <= self.y_limit:
            direct = self.solve_radial(y, t, params)
            if direct.farfield.converged or not allow_scaling:
                return direct
        if not allow_scaling:
            return self.solve_radial(y, t, params)
        # move the displacement to Y_SCALED, where the far-field rule is most effective
        T = t * (Y_SCALED / y) ** (2 * params.alpha)
        out = self.solve_scaled(y, t, params, T)
        out.direct_flag = direct is not None
        return out

    def solve_point(self, x, t: float, params: ProblemParams) -> SolutionValue:
        return self.solve(displacement(params, x, t), t, params)


_default = Solver()


def solve(y: float, t: float, params: ProblemParams) -> SolutionValue:
    return _default.solve(y, t, params)


def solve_point(x, t: float, params: ProblemParams) -> SolutionValue:
    return _default.solve_point(x, t, params)
