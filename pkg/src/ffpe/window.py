"""Smooth partition-of-unity window used to truncate slowly decaying integrals.

w(z) = 1 for |z| <= gamma*M, 0 for |z| >= M, and in between

    w = exp(-2 exp(-1/s**2) / (1 - s)**2),   s = (|z| - gamma*M) / (M - gamma*M).

All derivatives vanish at both ends of the transition.
"""

from dataclasses import dataclass

import numpy as np

DEFAULT_GAMMA = 0.5

# below this s, exp(-1/s**2) underflows to zero anyway; guarding avoids 1/0
_S_FLOOR = 1.0 / np.sqrt(-np.log(np.finfo(float).tiny))


@dataclass(frozen=True)
class WindowSpec:
    M: float
    gamma: float = DEFAULT_GAMMA

    def __post_init__(self):
        if not self.M > 0:
            raise ValueError(f"window cutoff M must be positive, got {self.M}")
        if not 0 < self.gamma < 1:
            raise ValueError(f"gamma must lie in (0, 1), got {self.gamma}")

    @property
    def plateau(self):
        return self.gamma * self.M


def window(z, spec):
    """Evaluate the window at ``z`` (scalar or array)."""
    z = np.abs(np.asarray(z, dtype=float))
    lo = spec.gamma * spec.M
    s = (z - lo) / (spec.M - lo)
    out = np.zeros_like(s)
    out[s <= 0] = 1.0
    mid = (s > 0) & (s < 1)
    sm = s[mid]
    inner = np.zeros_like(sm)
    ok = sm > _S_FLOOR
    inner[ok] = np.exp(-1.0 / sm[ok] ** 2) / (1.0 - sm[ok]) ** 2
    out[mid] = np.exp(-2.0 * inner)
    return out[()] if out.ndim == 0 else out
