"""Finite-difference Newton solver for the nonlinear problem, and its residual."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import DivergenceError, IncompatibleGridError, InvalidMeshError, LinearAlgebraError
from .model import GridFunction, ProblemSpec, make_grid


@dataclass(frozen=True)
class FdConfig:
    n: int = 1024
    newton_tol: float = 1e-10
    newton_max: int = 50
    fy_step: float = 1e-6

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 16:
            raise InvalidMeshError(f"oracle mesh needs n >= 16, got {self.n}")


def oracle_mesh(p: ProblemSpec, cfg: FdConfig) -> np.ndarray:
    return make_grid(cfg.n, p.eta)


def _stencils(x):
    """Interior coefficients (lower, diag, upper) of -y'' - (alpha/x) y' without the alpha factor split."""
    hm = x[1:-1] - x[:-2]
    hp = x[2:] - x[1:-1]
    s = hm + hp
    # second derivative
    d2 = (2.0 / (hm * s), -2.0 / (hm * hp), 2.0 / (hp * s))
    # first derivative, second-order on a nonuniform mesh
    d1 = (-hp / (hm * s), (hp - hm) / (hm * hp), hm / (hp * s))
    return d2, d1


class _Discretization:
    def __init__(self, p: ProblemSpec, x: np.ndarray):
        self.p = p
        self.x = x
        n = x.size
        self.k_eta = int(np.searchsorted(x, p.eta))
        if x[self.k_eta] != p.eta:
            raise InvalidMeshError("eta must be a mesh node")
        d2, d1 = _stencils(x)
        xi = x[1:-1]
        a = p.alpha
        lo = -d2[0] - a / xi * d1[0]
        di = -d2[1] - a / xi * d1[1]
        up = -d2[2] - a / xi * d1[2]
        h1 = x[1]
        rows = [0, 0]
        cols = [0, 1]
        vals = [2.0 * (1.0 + a) / h1**2, -2.0 * (1.0 + a) / h1**2]
        idx = np.arange(1, n - 1)
        rows += list(np.repeat(idx, 3))
        cols += list(np.stack([idx - 1, idx, idx + 1], axis=1).ravel())
        vals += list(np.stack([lo, di, up], axis=1).ravel())
        rows += [n - 1, n - 1]
        cols += [n - 1, self.k_eta]
        vals += [1.0, -p.delta]
        self.A = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
        self.mask = np.ones(n)
        self.mask[-1] = 0.0

    def F(self, y):
        p = self.p
        r = self.A @ y - self.mask * p.f_on(self.x, y)
        r[-1] -= p.b
        return r

    def J(self, y, step):
        # central-difference df/dy; the last row is the linear nonlocal condition
        fy = (self.p.f_on(self.x, y + step) - self.p.f_on(self.x, y - step)) / (2.0 * step)
        return (self.A - sp.diags(self.mask * fy)).tocsc()


def _solve(J, r):
    with warnings.catch_warnings():
        warnings.simplefilter("error", spla.MatrixRankWarning)
        try:
            d = spla.spsolve(J, r)
        except (spla.MatrixRankWarning, RuntimeError) as exc:
            raise LinearAlgebraError(f"singular Newton matrix: {exc}") from exc
    if not np.all(np.isfinite(d)):
        raise LinearAlgebraError("Newton matrix is singular to working precision")
    return d


def fd_solve(p: ProblemSpec, cfg: FdConfig = FdConfig(), init: GridFunction | None = None) -> GridFunction:
    """Damped Newton iteration on the centered second-order discretization."""
    x = oracle_mesh(p, cfg)
    if init is None:
        y = np.zeros_like(x)
    else:
        if init.nodes.shape != x.shape or not np.array_equal(init.nodes, x):
            raise IncompatibleGridError("initial guess must live on the oracle mesh")
        y = np.array(init.values, dtype=float)
    disc = _Discretization(p, x)
    r = disc.F(y)
    rnorm = float(np.max(np.abs(r)))
    last_step = np.inf
    growth = 0
    for _ in range(cfg.newton_max):
        d = _solve(disc.J(y, cfg.fy_step), -r)
        step_norm = float(np.max(np.abs(d)))
        growth = growth + 1 if step_norm > last_step else 0
        if growth >= 3:
            raise DivergenceError("Newton step norm grew for 3 consecutive iterations")
        last_step = step_norm
        scale = 1.0
        for _ in range(11):
            trial = y + scale * d
            rt = disc.F(trial)
            rt_norm = float(np.max(np.abs(rt))) if np.all(np.isfinite(rt)) else np.inf
            if rt_norm < rnorm or step_norm <= cfg.newton_tol:
                break
            scale *= 0.5
        y, r, rnorm = trial, rt, rt_norm
        if not np.isfinite(rnorm):
            raise DivergenceError("Newton iterate left the domain of f")
        if scale * step_norm <= cfg.newton_tol * max(1.0, float(np.max(np.abs(y)))):
            return GridFunction(x, y)
    raise DivergenceError(f"Newton did not converge in {cfg.newton_max} iterations")


def residual(p: ProblemSpec, y: GridFunction) -> float:
    """Max of the discrete ODE defect (limit form at 0), the nonlocal-condition
    defect and a second-order one-sided estimate of y'(0)."""
    x, v = y.nodes, y.values
    if x.size < 16:
        raise InvalidMeshError("residual needs at least 16 nodes")
    k = int(np.searchsorted(x, p.eta))
    if x[k] != p.eta:
        raise InvalidMeshError("eta must be a mesh node")
    d2, d1 = _stencils(x)
    ypp = d2[0] * v[:-2] + d2[1] * v[1:-1] + d2[2] * v[2:]
    yp = d1[0] * v[:-2] + d1[1] * v[1:-1] + d1[2] * v[2:]
    xi = x[1:-1]
    interior = -ypp - p.alpha / xi * yp - p.f_on(xi, v[1:-1])
    a, b = x[1], x[2]
    # y''(0) from the cubic y0 + c x^2 + e x^3 through the first three nodes;
    # the ghost-point quotient 2(y1 - y0)/h^2 is only first order once y has
    # an x^3 term (f depending on x).
    r1, r2 = v[1] - v[0], v[2] - v[0]
    c = (r1 * b**3 - r2 * a**3) / (a * a * b * b * (b - a))
    origin = -(1.0 + p.alpha) * 2.0 * c - p.f_on(0.0, v[0])
    bc = v[-1] - p.delta * v[k] - p.b
    # quadratic through (0, v0), (a, v1), (b, v2), differentiated at 0
    dy0 = -(a + b) / (a * b) * v[0] + b / (a * (b - a)) * v[1] - a / (b * (b - a)) * v[2]
    return float(max(np.max(np.abs(interior)), abs(float(origin)), abs(bc), abs(dy0)))
