"""Integrals of f(z) exp(-z**(2 alpha) tau) over [L, inf) by windowed truncation.

The integrand is multiplied by the smooth window w_M and integrated over
[L, M] with a composite Gauss-Legendre rule whose node count grows linearly
with M. M is doubled until two successive values agree to ``epsilon``.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from .quadrature import RuleCache, composite_gauss_legendre, rule_key, singular_weight
from .window import DEFAULT_GAMMA, WindowSpec, window

PANEL_POINTS = 16


@dataclass(frozen=True)
class FarFieldConfig:
    M_init: float = 80.0
    M_max: float = 5120.0
    epsilon: float = 1e-14
    points_per_unit: float = 4.0
    gamma: float = DEFAULT_GAMMA

    def __post_init__(self):
        if self.M_init > self.M_max:
            raise ValueError("M_init must not exceed M_max")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")


@dataclass
class FarFieldReport:
    value: float
    converged: bool
    final_M: float
    iterations: int
    last_delta: float


DEFAULT_CONFIG = FarFieldConfig()

_rules = RuleCache(directory="")


def panel_count(M, points_per_unit, points=PANEL_POINTS):
    return max(1, int(math.ceil(points_per_unit * M / points)))


def windowed_rule(L, M, points_per_unit=4.0):
    panels = panel_count(M, points_per_unit)
    key = rule_key("window", float(L), float(M), panels)
    return _rules.get_or_build(key, lambda: composite_gauss_legendre(L, M, panels, PANEL_POINTS))


def windowed_integral(f, L, M, alpha, tau, points_per_unit=4.0, gamma=DEFAULT_GAMMA):
    rule = windowed_rule(L, M, points_per_unit)
    z = rule.nodes
    vals = f(z) * singular_weight(z, alpha, tau) * window(z, WindowSpec(M, gamma))
    return float(np.dot(rule.weights, vals))


def truncated_integral(f, L, M, alpha, tau, points_per_unit=4.0):
    """Same as :func:`windowed_integral` but with a hard cutoff at M."""
    rule = windowed_rule(L, M, points_per_unit)
    z = rule.nodes
    return float(np.dot(rule.weights, f(z) * singular_weight(z, alpha, tau)))


def integrate_slow_decay(f, L, alpha, tau, config=DEFAULT_CONFIG):
    """Doubling loop; never raises on non-convergence, the report carries the flag.

    ``final_M`` is the cutoff of the last windowed integral that was evaluated.
    """
    M = config.M_init
    previous, current = 0.0, math.inf
    iterations = 0
    last_M = M
    while abs(current - previous) > config.epsilon and M <= config.M_max:
        previous = current
        current = windowed_integral(f, L, M, alpha, tau, config.points_per_unit, config.gamma)
        iterations += 1
        last_M = M
        M *= 2
    delta = abs(current - previous)
    return FarFieldReport(current, not delta > config.epsilon, last_M, iterations, delta)


def window_error_study(reference, f, alpha, tau, L=1.0, M_list=(80, 160, 320, 640, 1280),
                       points_per_unit=4.0):
    """Rows (M, E1, E2): errors of hard and windowed truncation at each M."""
    rows = []
    for M in M_list:
        e1 = abs(reference - truncated_integral(f, L, float(M), alpha, tau, points_per_unit))
        e2 = abs(reference - windowed_integral(f, L, float(M), alpha, tau, points_per_unit))
        rows.append((M, e1, e2))
    return rows


def write_error_study(rows, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["M", "E1", "E2"])
        for M, e1, e2 in rows:
            w.writerow([f"{M:g}", f"{e1:.5e}", f"{e2:.5e}"])
