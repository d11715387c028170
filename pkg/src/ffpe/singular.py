"""Integrals of f(z) exp(-z**(2 alpha) tau) over [0, L] with L <= 1.

The weight is not smooth at z = 0 (it behaves like 1 - tau z**(2 alpha)), so a
plain Gauss rule converges slowly. Two remedies are combined:

* expansion: Taylor-expand the weight in tau and integrate every term
  f(z) z**(2 alpha k) with a Gauss-Jacobi rule (good for tau <= 1);
* re-weighting: a rule built for the weight itself. Either fixed Legendre
  nodes with weights solved so the rule is exact for all polynomials of
  degree < N, or (the default) the N-point Gauss rule of the weight, exact
  up to degree 2N - 1 with nodes that follow the weight toward z = 0.
"""

import math
from dataclasses import dataclass

import numpy as np

from .quadrature import (
    RuleCache,
    gauss_jacobi_beta,
    graded_panel_integral,
    reweighted_rule,
    rule_key,
    singular_weight,
    weighted_gauss_rule,
)

_BUILDERS = {"gauss": ("weighted_gauss", weighted_gauss_rule), "legendre": ("reweighted", reweighted_rule)}


class RegimeError(ValueError):
    pass


@dataclass(frozen=True)
class SingularConfig:
    N: int = 16
    ladder: tuple = ((1e-3, 4), (1e-2, 6), (1e-1, 9), (1.0, 17))
    jacobi_points: int = 16
    nodes: str = "gauss"

    def __post_init__(self):
        if self.nodes not in _BUILDERS:
            raise ValueError(f"unknown node family {self.nodes!r}")
        taus = [t for t, _ in self.ladder]
        ks = [k for _, k in self.ladder]
        if any(b <= a for a, b in zip(taus, taus[1:])):
            raise ValueError("tau thresholds must be strictly increasing")
        if any(b <= a for a, b in zip(ks, ks[1:])):
            raise ValueError("expansion orders must grow with the threshold")


DEFAULT_CONFIG = SingularConfig()

_rules = RuleCache()


def default_cache():
    return _rules


def select_expansion_order(tau, config=DEFAULT_CONFIG):
    """Number of Taylor terms (beyond the constant) for the expansion technique."""
    if not tau > 0:
        raise RegimeError(f"tau must be positive, got {tau}")
    for bound, K in config.ladder:
        if tau <= bound:
            return K
    raise RegimeError(f"tau = {tau} is beyond the expansion range; use re-weighting")


def truncation_bound(tau, K):
    """tau**(K+1) / (K+1)!, the size of the first dropped Taylor term."""
    return tau ** (K + 1) / math.factorial(K + 1)


def _jacobi(n, beta, L):
    return _rules.get_or_build(rule_key("jacobi", n, float(beta), float(L)),
                               lambda: gauss_jacobi_beta(n, beta, L))


def integrate_expansion(f, L, alpha, tau, K, points=16):
    total = 0.0
    coef = 1.0
    for k in range(K + 1):
        if k:
            coef *= -tau / k
        rule = _jacobi(points, 2.0 * alpha * k, L)
        total += coef * rule.apply(f)
    return total


def _key(nodes, N, L, alpha, tau):
    return rule_key(_BUILDERS[nodes][0], N, float(L), float(alpha), float(tau))


def reweighted(L, alpha, tau, N=16, cache=None, nodes="gauss"):
    cache = _rules if cache is None else cache
    build = _BUILDERS[nodes][1]
    return cache.get_or_build(_key(nodes, N, L, alpha, tau), lambda: build(N, L, alpha, tau))


def integrate_reweighted(f, L, alpha, tau, N=16, cache=None, nodes="gauss"):
    return reweighted(L, alpha, tau, N, cache, nodes).apply(f)


def integrate_singular(f, L, alpha, tau, config=DEFAULT_CONFIG, cache=None):
    """Integral of f(z) exp(-z**(2 alpha) tau) over [0, L].

    Re-weighting is used for tau > 1 or whenever the rule for (L, alpha, tau)
    is already cached; otherwise the expansion technique with the ladder order.
    """
    if not 0 < L <= 1:
        raise ValueError("L must lie in (0, 1]")
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    if not tau > 0:
        raise ValueError("tau must be positive")
    cache = _rules if cache is None else cache
    key = _key(config.nodes, config.N, L, alpha, tau)
    if tau > config.ladder[-1][0] or key in cache:
        return integrate_reweighted(f, L, alpha, tau, config.N, cache, config.nodes)
    K = select_expansion_order(tau, config)
    return integrate_expansion(f, L, alpha, tau, K, config.jacobi_points)


def reference_singular(f, L, alpha, tau):
    """Brute-force graded-panel value, independent of both techniques."""
    return float(graded_panel_integral(lambda z: f(z) * singular_weight(z, alpha, tau), 0.0, L))
