"""Composite adaptive Gauss-Legendre quadrature."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import IntegrationError


@dataclass(frozen=True)
class QuadConfig:
    base_order: int = 16
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_depth: int = 30

    def __post_init__(self):
        if int(self.base_order) != self.base_order or self.base_order < 2:
            raise ValueError("base_order must be an integer >= 2")
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_depth < 0:
            raise ValueError("max_depth must be >= 0")


DEFAULT_QUAD = QuadConfig()


@lru_cache(maxsize=64)
def gauss_legendre(order: int):
    """Nodes and weights on [-1, 1] (read-only arrays)."""
    x, w = np.polynomial.legendre.leggauss(int(order))
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def _apply(f, t):
    v = np.asarray(f(t), dtype=float)
    if v.shape != t.shape:
        v = np.broadcast_to(v, t.shape) if v.ndim == 0 else np.array([float(f(s)) for s in t])
    return v


def _panel(f, a, b, order):
    x, w = gauss_legendre(order)
    half = 0.5 * (b - a)
    t = a + half * (x + 1.0)
    return half * float(np.dot(w, _apply(f, t)))


def integrate(f, a: float, b: float, cfg: QuadConfig = DEFAULT_QUAD, breakpoints=()):
    """Integrate ``f`` over [a, b]; returns (value, error estimate).

    ``f`` is called with numpy arrays of interior Gauss nodes.  Each panel
    is compared against its two halves; a panel is accepted when the
    difference is below max(abs_tol * share, rel_tol * |panel value|).
    Breakpoints inside (a, b) are always panel boundaries.
    """
    a, b = float(a), float(b)
    if not a <= b:
        raise ValueError(f"need a <= b, got [{a}, {b}]")
    if a == b:
        return 0.0, 0.0
    cuts = sorted({a, b, *(float(p) for p in breakpoints if a < p < b)})
    width = b - a
    order = cfg.base_order
    total = 0.0
    err = 0.0
    failed = False
    # Depth-first, left to right: a fixed schedule keeps results bit-reproducible.
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        stack = [(lo, hi, _panel(f, lo, hi, order), 0)]
        while stack:
            p, q, whole, depth = stack.pop()
            m = 0.5 * (p + q)
            left = _panel(f, p, m, order)
            right = _panel(f, m, q, order)
            halves = left + right
            diff = abs(whole - halves)
            if not np.isfinite(halves):
                raise IntegrationError("non-finite integrand value", estimate=total, error=np.inf)
            if diff <= max(cfg.abs_tol * (q - p) / width, cfg.rel_tol * abs(halves)):
                total += halves
                err += diff
            elif depth >= cfg.max_depth:
                failed = True
                total += halves
                err += diff
            else:
                stack.append((m, q, right, depth + 1))
                stack.append((p, m, left, depth + 1))
    if failed:
        raise IntegrationError(
            f"quadrature did not converge within depth {cfg.max_depth} (error ~ {err:.3g})",
            estimate=total,
            error=err,
        )
    return total, err


def integrate_kernel_product(k, g, x: float, cfg: QuadConfig = DEFAULT_QUAD) -> float:
    """Integral over (0, 1] of t^alpha G(x, t) g(t), split at t = x and t = eta."""
    alpha = k.alpha

    def integrand(t):
        return t**alpha * k.eval(x, t) * _apply(g, t)

    value, _ = integrate(integrand, 0.0, 1.0, cfg, breakpoints=(x, k.eta))
    return value
