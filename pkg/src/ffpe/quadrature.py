"""Quadrature rules: Gauss-Legendre, Gauss-Jacobi with weight z**beta on [0, L],
and the re-weighted rule that is exact against exp(-z**(2 alpha) tau) on [0, L].

Rules are immutable and can be memoised in a :class:`RuleCache`, optionally
persisted to disk in a small binary format.
"""

import ast
import csv
import hashlib
import os
import struct
import threading
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numpy.polynomial import legendre as npleg
from scipy.linalg import eigh_tridiagonal
from scipy.special import roots_jacobi


class QuadratureError(ValueError):
    pass


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    interval: tuple
    kind: str
    params: tuple = field(default=())

    def __post_init__(self):
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)

    def __len__(self):
        return len(self.nodes)

    def apply(self, f):
        """Sum of w_j f(s_j); ``f`` must accept an array of nodes."""
        return float(np.dot(self.weights, f(self.nodes)))

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["node", "weight"])
            for s, w in zip(self.nodes, self.weights):
                writer.writerow([f"{s:.17g}", f"{w:.17g}"])


def _check_n(n):
    if int(n) != n or n < 1:
        raise QuadratureError(f"number of points must be a positive integer, got {n!r}")
    return int(n)


def gauss_legendre(n, a=-1.0, b=1.0):
    n = _check_n(n)
    if not a < b:
        raise QuadratureError(f"empty interval ({a}, {b})")
    x, w = npleg.leggauss(n)
    half = 0.5 * (b - a)
    nodes = a + half * (x + 1.0)
    return QuadratureRule(nodes, half * w, (a, b), "legendre", (n,))


def gauss_jacobi_beta(n, beta, L=1.0):
    """Gauss rule for the weight z**beta on [0, L]."""
    n = _check_n(n)
    if beta <= -1:
        raise QuadratureError(f"beta must exceed -1, got {beta}")
    if L <= 0:
        raise QuadratureError("L must be positive")
    if beta == 0:
        rule = gauss_legendre(n, 0.0, L)
        return QuadratureRule(rule.nodes.copy(), rule.weights.copy(), (0.0, L), "jacobi", (n, 0.0))
    # (1 - x)^0 (1 + x)^beta on [-1, 1], then z = L (1 + x) / 2
    x, w = roots_jacobi(n, 0.0, beta)
    nodes = 0.5 * L * (x + 1.0)
    weights = w * (0.5 * L) ** (beta + 1.0)
    return QuadratureRule(nodes, weights, (0.0, L), "jacobi", (n, float(beta)))


def composite_gauss_legendre(a, b, panels, points=16):
    """Composite rule with ``panels`` equal panels of ``points`` nodes each."""
    panels = _check_n(panels)
    if not a < b:
        raise QuadratureError(f"empty interval ({a}, {b})")
    x, w = npleg.leggauss(points)
    h = (b - a) / panels
    left = a + h * np.arange(panels)
    nodes = (left[:, None] + 0.5 * h * (x + 1.0)).ravel()
    weights = np.tile(0.5 * h * w, panels)
    return QuadratureRule(nodes, weights, (a, b), "composite", (panels, points))


_GRADED = {}


def _graded_nodes(a, b, ratio, smallest, points):
    key = (a, b, ratio, smallest, points)
    hit = _GRADED.get(key)
    if hit is not None:
        return hit
    x, w = npleg.leggauss(points)
    edges = [b]
    length = b - a
    while edges[-1] - a > smallest * length:
        edges.append(a + (edges[-1] - a) * ratio)
    edges.append(a)
    edges = np.array(edges[::-1])
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    nodes = (lo[:, None] + half[:, None] * (x + 1.0)).ravel()
    weights = (half[:, None] * w).ravel()
    _GRADED[key] = (nodes, weights)
    return nodes, weights


def graded_panel_integral(g, a, b, ratio=0.5, smallest=1e-40, points=32):
    """Integrate ``g`` over [a, b] with panels refined geometrically toward ``a``.

    Handles integrable endpoint singularities such as z**beta or
    exp(-z**(2 alpha) tau) at the left end. ``g`` is called once on the array
    of all nodes; a 2-d result integrates each trailing column.
    """
    nodes, weights = _graded_nodes(float(a), float(b), ratio, smallest, points)
    vals = g(nodes)
    return np.tensordot(weights, vals, axes=(0, 0))


def singular_weight(z, alpha, tau):
    return np.exp(-tau * z ** (2.0 * alpha))


def reweighted_moments(N, L, alpha, tau):
    """Integrals of P_k(2z/L - 1) exp(-z^(2 alpha) tau) over [0, L], k < N."""
    return graded_panel_integral(
        lambda z: npleg.legvander(2.0 * z / L - 1.0, N - 1) * singular_weight(z, alpha, tau)[:, None],
        0.0,
        L,
    )


def reweighted_rule(N, L, alpha, tau, tol=1e-12):
    """Legendre nodes on [0, L] with weights solved so the rule reproduces
    the weighted integral of every polynomial of degree < N."""
    N = _check_n(N)
    if not 0 < L <= 1:
        raise QuadratureError("L must lie in (0, 1]")
    if not 0 < alpha < 1:
        raise QuadratureError("alpha must lie in (0, 1)")
    if tau <= 0:
        raise QuadratureError("tau must be positive")
    x, _ = npleg.leggauss(N)
    nodes = 0.5 * L * (x + 1.0)
    vander = npleg.legvander(x, N - 1).T  # row k holds P_k at the nodes
    moments = reweighted_moments(N, L, alpha, tau)
    q, r = np.linalg.qr(vander)
    weights = np.linalg.solve(r, q.T @ moments)
    residual = np.max(np.abs(vander @ weights - moments))
    if not residual <= tol * moments[0]:
        raise QuadratureError(
            f"re-weighted rule residual {residual:.3e} exceeds {tol:g} * mass {moments[0]:.3e}"
        )
    return QuadratureRule(nodes, weights, (0.0, L), "reweighted", (N, L, alpha, tau))


def weighted_gauss_rule(N, L, alpha, tau, tol=1e-12):
    """Gauss rule for the weight exp(-z**(2 alpha) tau) on [0, L].

    The weight is represented by the graded-panel discretisation used for the
    moments; Stieltjes' procedure on that discrete measure gives the
    three-term recurrence, and the Golub-Welsch eigenproblem gives nodes and
    weights. The rule is exact for polynomials of degree < 2N, and its nodes
    follow the weight toward z = 0 when tau is large.
    """
    N = _check_n(N)
    if not 0 < L <= 1:
        raise QuadratureError("L must lie in (0, 1]")
    if not 0 < alpha < 1:
        raise QuadratureError("alpha must lie in (0, 1)")
    if tau <= 0:
        raise QuadratureError("tau must be positive")
    z, w = _graded_nodes(0.0, float(L), 0.5, 1e-40, 32)
    w = w * singular_weight(z, alpha, tau)
    mass = w.sum()
    diag, offdiag = np.empty(N), np.empty(N - 1)
    p_prev, p = np.zeros_like(z), np.full_like(z, 1.0 / np.sqrt(mass))
    b = 0.0
    for k in range(N):
        diag[k] = np.dot(w, z * p * p)
        q = (z - diag[k]) * p - b * p_prev
        b = np.sqrt(np.dot(w, q * q))
        if k < N - 1:
            offdiag[k] = b
        p_prev, p = p, q / b
    nodes, vecs = eigh_tridiagonal(diag, offdiag)
    weights = mass * vecs[0] ** 2
    x = 2.0 * nodes / L - 1.0
    moments = np.tensordot(w, npleg.legvander(2.0 * z / L - 1.0, 2 * N - 1), axes=(0, 0))
    residual = np.max(np.abs(npleg.legvander(x, 2 * N - 1).T @ weights - moments))
    if not residual <= tol * mass:
        raise QuadratureError(f"weighted Gauss rule residual {residual:.3e} exceeds {tol:g} * mass {mass:.3e}")
    return QuadratureRule(nodes, weights, (0.0, L), "weighted_gauss", (N, L, alpha, tau))


_DISK_KINDS = ("reweighted", "weighted_gauss")


def rule_key(kind, *params):
    """Hashable cache key; floats are compared through their exact bit pattern."""
    parts = [kind]
    for p in params:
        parts.append(float(p).hex() if isinstance(p, float) else p)
    return tuple(parts)


_MAGIC = b"FFPERULE"
_VERSION = 1


class RuleCache:
    """Thread-safe memo of quadrature rules.

    Inserts are serialised by a lock; readers see either nothing or the fully
    built rule. With ``directory`` set (or ``FFPE_CACHE_DIR`` in the
    environment), rules for the singular weight are also stored on disk.
    """

    def __init__(self, directory=None):
        self._rules = {}
        self._lock = threading.Lock()
        if directory is None:
            directory = os.environ.get("FFPE_CACHE_DIR") or None
        self.directory = Path(directory) if directory else None

    def __contains__(self, key):
        return key in self._rules

    def __len__(self):
        return len(self._rules)

    def get(self, key):
        return self._rules.get(key)

    def get_or_build(self, key, build):
        rule = self._rules.get(key)
        if rule is not None:
            return rule
        with self._lock:
            rule = self._rules.get(key)
            if rule is None:
                rule = self._load(key)
                if rule is None:
                    rule = build()
                    self._store(key, rule)
                self._rules[key] = rule
        return rule

    def _path(self, key):
        digest = hashlib.sha1(repr(key).encode()).hexdigest()
        return self.directory / f"{digest}.rule"

    def _store(self, key, rule):
        if self.directory is None or rule.kind not in _DISK_KINDS:
            return
        self.directory.mkdir(parents=True, exist_ok=True)
        write_rule(self._path(key), key, rule)

    def _load(self, key):
        if self.directory is None:
            return None
        path = self._path(key)
        if not path.exists():
            return None
        try:
            return read_rule(path, key)
        except (QuadratureError, struct.error):
            return None


def write_rule(path, key, rule):
    """Binary layout: magic, uint32 version, uint32 key length, key bytes,
    uint32 node count, float64 interval pair, nodes, weights (all little-endian)."""
    key_bytes = repr(key).encode()
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<II", _VERSION, len(key_bytes)))
        fh.write(key_bytes)
        fh.write(struct.pack("<I", len(rule)))
        fh.write(struct.pack("<2d", *rule.interval))
        fh.write(np.asarray(rule.nodes, dtype="<f8").tobytes())
        fh.write(np.asarray(rule.weights, dtype="<f8").tobytes())


def read_rule(path, key=None):
    data = Path(path).read_bytes()
    if data[:8] != _MAGIC:
        raise QuadratureError(f"{path}: not a rule file")
    version, klen = struct.unpack_from("<II", data, 8)
    if version != _VERSION:
        raise QuadratureError(f"{path}: unsupported version {version}")
    off = 16
    stored_key = data[off:off + klen].decode()
    off += klen
    if key is not None and stored_key != repr(key):
        raise QuadratureError(f"{path}: key mismatch")
    (n,) = struct.unpack_from("<I", data, off)
    off += 4
    a, b = struct.unpack_from("<2d", data, off)
    off += 16
    nodes = np.frombuffer(data, dtype="<f8", count=n, offset=off).astype(float)
    weights = np.frombuffer(data, dtype="<f8", count=n, offset=off + 8 * n).astype(float)
    kind, params = eval_key_params(stored_key)
    return QuadratureRule(nodes, weights, (a, b), kind, params)


def eval_key_params(key_repr):
    parts = ast.literal_eval(key_repr)
    params = tuple(float.fromhex(p) if isinstance(p, str) and p.startswith(("0x", "-0x")) else p
                   for p in parts[1:])
    return parts[0], params
