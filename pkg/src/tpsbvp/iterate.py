"""Monotone iteration from upper and lower solutions, enclosure and uniqueness."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .classify import RegimeTag, first_zero_square
from .errors import (
    EnclosureViolationError,
    HypothesisViolationError,
    InvalidMeshError,
    MonotonicityBreachError,
    OrderValidationError,
)
from .green import GreenKernel, build_kernel, solve_linear
from .model import DEFAULT_GRID_N, GridFunction, ProblemSpec, interp, make_grid, sup_norm_diff
from .oracle import residual

ODE_SLACK = 1e-9
NEUMANN_TOL = 1e-10
BC_SLACK = 1e-12
BREACH_SLACK = 1e-9
MONOTONE_SLACK = 1e-12
ENCLOSURE_SLACK = 1e-9


@dataclass(frozen=True)
class Validation:
    """Outcome of an upper/lower check; unpacks as (valid, margin, location).

    ``margin`` is the raw value of the most nearly violated check and
    ``location`` its x position (0 for the derivative condition, 1 for the
    three-point condition); ``check`` names it.
    """

    valid: bool
    margin: float
    location: float
    check: str

    def __iter__(self):
        return iter((self.valid, self.margin, self.location))


def _nodes(p: ProblemSpec, grid) -> np.ndarray:
    if grid is None:
        return make_grid(DEFAULT_GRID_N, p.eta)
    if isinstance(grid, GridFunction):
        return grid.nodes
    nodes = np.asarray(grid, dtype=float)
    if nodes[0] != 0.0 or nodes[-1] != 1.0 or not np.any(nodes == p.eta):
        raise InvalidMeshError("grid must contain 0, eta and 1")
    return nodes


def _validate(p: ProblemSpec, grid, side: str) -> Validation:
    g = p.upper0 if side == "upper" else p.lower0
    g.require_derivatives()
    x = _nodes(p, grid)
    sgn = 1.0 if side == "upper" else -1.0
    a = p.alpha
    xi = x[1:]
    u = np.asarray(g.value(x), dtype=float) * np.ones_like(x)
    d1 = np.asarray(g.d1(xi), dtype=float) * np.ones_like(xi)
    d2 = np.asarray(g.d2(x), dtype=float) * np.ones_like(x)
    # -(x^a u')' - x^a f(x, u), and its limit form at x = 0
    ode = np.empty_like(x)
    ode[1:] = -(xi**a) * d2[1:] - a * xi ** (a - 1.0) * d1 - xi**a * p.f_on(xi, u[1:])
    ode[0] = -(1.0 + a) * d2[0] - p.f_on(0.0, u[0])
    ode *= sgn
    neumann = g.neumann_defect()
    bc = sgn * (u[-1] - p.delta * u[x == p.eta][0] - p.b)
    checks = [
        (ode + ODE_SLACK, ode, x, "ode"),
        (np.array([NEUMANN_TOL - neumann]), np.array([-neumann]), np.array([0.0]), "neumann"),
        (np.array([bc + BC_SLACK]), np.array([bc]), np.array([1.0]), "bc"),
    ]
    worst = None
    for slack, raw, where, name in checks:
        i = int(np.argmin(slack))
        if worst is None or slack[i] < worst[0]:
            worst = (float(slack[i]), float(raw[i]), float(where[i]), name)
    valid = all(np.all(s >= 0.0) for s, *_ in checks)
    return Validation(valid, worst[1], worst[2], worst[3])


def validate_upper(p: ProblemSpec, grid=None) -> Validation:
    return _validate(p, grid, "upper")


def validate_lower(p: ProblemSpec, grid=None) -> Validation:
    return _validate(p, grid, "lower")


def regime_of(k: GreenKernel) -> RegimeTag:
    return RegimeTag.ReverseOrdered if k.hypothesis in ("H1", "H3") else RegimeTag.WellOrdered


def lambda_consistent(p: ProblemSpec, k: GreenKernel) -> bool:
    """The lambda inequality for the kernel's regime (non-strict)."""
    m = p.f_y_bound
    if k.lam < 0:
        return m + k.lam <= 0.0
    if regime_of(k) is RegimeTag.ReverseOrdered:
        return m - k.lam <= 0.0
    return m - k.lam >= 0.0


def step(p: ProblemSpec, k: GreenKernel, y: GridFunction) -> GridFunction:
    """One pass of the scheme: solve the shifted linear problem for y_n."""
    lam = k.lam

    def h(t):
        v = interp(y, t)
        return p.f_on(t, v) - lam * v

    return solve_linear(k, h, p.b, y.nodes)


@dataclass(frozen=True, eq=False)
class IterationTrace:
    iterates: list
    residuals: list
    step_norms: list
    min_gaps: list
    monotone_ok: bool
    enclosure_ok: bool
    converged: bool
    lambda_used: float
    regime: RegimeTag
    side: str
    direction: int

    def __len__(self):
        return len(self.iterates) - 1

    @property
    def final(self) -> GridFunction:
        return self.iterates[-1]


def _direction(regime: RegimeTag, side: str) -> int:
    up = side == "upper"
    if regime is RegimeTag.ReverseOrdered:
        return 1 if up else -1
    return -1 if up else 1


def iterate_monotone(p: ProblemSpec, k: GreenKernel, start: str, tol: float = 1e-8,
                     max_iter: int = 200, grid=None, check: bool = True) -> IterationTrace:
    """Iterate from upper0 (start="upper") or lower0 until successive iterates
    differ by at most ``tol``.  A step against the expected direction by more
    than 1e-9 raises MonotonicityBreachError."""
    if start not in ("upper", "lower"):
        raise ValueError("start must be 'upper' or 'lower'")
    if (k.alpha, k.delta, k.eta) != (p.alpha, p.delta, p.eta):
        raise ValueError("kernel and problem disagree on (alpha, delta, eta)")
    x = _nodes(p, grid)
    regime = regime_of(k)
    if check:
        v = _validate(p, x, start)
        if not v.valid:
            raise OrderValidationError(f"{start} solution fails {v.check} check at x={v.location} (margin {v.margin:.3g})")
        if not lambda_consistent(p, k):
            raise HypothesisViolationError(f"lambda={k.lam} violates the lambda inequality for M={p.f_y_bound}")
    d = _direction(regime, start)
    y = (p.upper0 if start == "upper" else p.lower0).on(x)
    lo = np.minimum(p.upper0.value(x), p.lower0.value(x))
    hi = np.maximum(p.upper0.value(x), p.lower0.value(x))
    iterates, res, norms, gaps = [y], [residual(p, y)], [float("nan")], [float("nan")]
    monotone = True
    inside = True
    converged = False
    for _ in range(max_iter):
        nxt = step(p, k, y)
        diff = d * (nxt.values - y.values)
        gap = float(np.min(diff))
        norm = float(np.max(np.abs(nxt.values - y.values)))
        iterates.append(nxt)
        res.append(residual(p, nxt))
        norms.append(norm)
        gaps.append(gap)
        monotone = monotone and gap >= -MONOTONE_SLACK
        inside = inside and bool(np.all(nxt.values >= lo - ENCLOSURE_SLACK) and np.all(nxt.values <= hi + ENCLOSURE_SLACK))
        trace = IterationTrace(iterates, res, norms, gaps, monotone, inside, False, k.lam, regime, start, d)
        if gap < -BREACH_SLACK:
            raise MonotonicityBreachError(
                f"{start} sequence moved against its direction by {-gap:.3g} at step {len(iterates) - 1}",
                trace=trace,
            )
        y = nxt
        if norm <= tol:
            converged = True
            break
    return IterationTrace(iterates, res, norms, gaps, monotone, inside, converged, k.lam, regime, start, d)


@dataclass(frozen=True, eq=False)
class SolveReport:
    u_star: GridFunction
    v_star: GridFunction
    enclosure_width: float
    unique_claimed: bool
    traces: tuple
    uniqueness_condition: bool = False
    kernel: GreenKernel = field(default=None, repr=False)

    @property
    def regime(self) -> RegimeTag:
        return self.traces[0].regime

    @property
    def converged(self) -> bool:
        return all(t.converged for t in self.traces)


def uniqueness_check(p: ProblemSpec, lambda_1_candidates=None) -> bool:
    """M_lambda < lambda_1, with lambda_1 the first-zero square for alpha's parity
    unless explicit candidates are given."""
    if lambda_1_candidates:
        lam1 = min(float(c) for c in lambda_1_candidates)
    else:
        lam1 = first_zero_square(p.alpha)
    return p.m_unique < lam1


def solve_enclosure(p: ProblemSpec, lam: float, tol: float = 1e-8, max_iter: int = 200,
                    grid=None) -> SolveReport:
    """Run both monotone sequences and check that every pair stays ordered."""
    x = _nodes(p, grid)
    k = build_kernel(p.alpha, lam, p.delta, p.eta)
    tu = iterate_monotone(p, k, "upper", tol, max_iter, x)
    tv = iterate_monotone(p, k, "lower", tol, max_iter, x)
    us = np.array([g.values for g in tu.iterates])
    vs = np.array([g.values for g in tv.iterates])
    if regime_of(k) is RegimeTag.ReverseOrdered:
        breach = float(np.max(us.max(axis=0) - vs.min(axis=0)))
        width = float(np.max(tv.final.values - tu.final.values))
    else:
        breach = float(np.max(vs.max(axis=0) - us.min(axis=0)))
        width = float(np.max(tu.final.values - tv.final.values))
    if breach > ENCLOSURE_SLACK:
        raise EnclosureViolationError(f"upper and lower sequences cross by {breach:.3g}")
    cond = uniqueness_check(p)
    claimed = cond and tu.converged and tv.converged and width <= 10.0 * tol
    return SolveReport(tu.final, tv.final, width, claimed, (tu, tv), cond, k)


def fixed_point_defect(p: ProblemSpec, k: GreenKernel, y: GridFunction) -> float:
    return sup_norm_diff(step(p, k, y), y)
