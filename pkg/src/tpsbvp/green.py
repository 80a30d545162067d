"""Green's kernels of the shifted linear problem and the linear solver.

For -(x^a y')' - lam x^a y = x^a h,  y'(0) = 0,  y(1) = delta y(eta) + b,
with phi the solution regular at 0 and psi a second solution,

    G(x, t) = c(t) phi(x) + [t < x] C (phi(t) psi(x) - psi(t) phi(x)),
    y(x)    = b phi(x) / D - int_0^1 t^a G(x, t) h(t) dt,

where C = 1 / (x^a W[phi, psi]) and D = phi(1) - delta phi(eta).  The
coefficient c(t) enforces the three-point condition and changes form at
t = eta.  This is the four-branch kernel written with its common factors
pulled out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .classify import CaseTag, ODD_TOL, case_for, check_hypotheses, classify_alpha, odd_integer
from .errors import (
    DomainError,
    EvaluationError,
    HypothesisViolationError,
    InvalidInputError,
    ResonantLambdaError,
    UnsupportedAlphaError,
)
from .model import GridFunction
from .quad import DEFAULT_QUAD, QuadConfig, gauss_legendre, integrate_kernel_product
from .specfun import bessel, bessel_and_derivative, cospi, regular_weighted, sinpi

RESONANCE_TOL = 1e-12
NEAR_INTEGER_NU = 1e-3
SIGN_EPS = 1e-6

_SIGN_OF = {"H0": "nonpositive", "H2": "nonpositive", "H'0": "nonpositive",
            "H1": "nonnegative", "H3": "nonnegative"}


@dataclass(frozen=True, eq=False)
class GreenKernel:
    case: CaseTag
    alpha: float
    lam: float
    delta: float
    eta: float
    nu: float
    denom: float
    sign_expectation: str
    hypothesis: str
    condition: float
    forced: bool = False
    _c: dict = field(default=None, repr=False)

    @property
    def k(self) -> float:
        return math.sqrt(abs(self.lam))

    # basis functions -----------------------------------------------------
    def phi(self, x):
        """x^nu J_{-nu}(kx) (I_{-nu} for lambda < 0), finite at x = 0."""
        fam = "I" if self.case is CaseTag.CaseIII else "J"
        return _vmap(lambda s: regular_weighted(fam, self.nu, self.k, s), x)

    def psi(self, x):
        """x^nu Z_nu(kx) with Z = J, Y or K by case; x > 0."""
        fam = {CaseTag.CaseI: "J", CaseTag.CaseII: "Y", CaseTag.CaseIII: "K"}[self.case]
        nu, k = self.nu, self.k
        return _vmap(lambda s: s**nu * bessel(fam, nu, k * s), x)

    def phi_dx(self, x):
        fam = "I" if self.case is CaseTag.CaseIII else "J"
        nu, k = self.nu, self.k

        def one(s):
            if s == 0.0:
                return 0.0
            v, d = bessel_and_derivative(fam, -nu, k * s)
            return nu * s ** (nu - 1.0) * v + k * s**nu * d

        return _vmap(one, x)

    def psi_dx(self, x):
        fam = {CaseTag.CaseI: "J", CaseTag.CaseII: "Y", CaseTag.CaseIII: "K"}[self.case]
        nu, k = self.nu, self.k

        def one(s):
            v, d = bessel_and_derivative(fam, nu, k * s)
            return nu * s ** (nu - 1.0) * v + k * s**nu * d

        return _vmap(one, x)

    def coef(self, t, phi_t=None, psi_t=None):
        """c(t), the multiple of phi(x) that fixes the boundary conditions."""
        t = np.asarray(t, dtype=float)
        pt = self.phi(t) if phi_t is None else phi_t
        qt = self.psi(t) if psi_t is None else psi_t
        c = self._c
        low = -c["C"] * (pt * c["Dpsi"] - qt * self.denom) / self.denom
        high = -c["C"] * (pt * c["psi1"] - qt * c["phi1"]) / self.denom
        return np.where(t <= self.eta, low, high)

    # kernel ---------------------------------------------------------------
    def eval(self, x, t):
        x = np.asarray(x, dtype=float)
        t = np.asarray(t, dtype=float)
        _check_xt(x, t)
        xb, tb = np.broadcast_arrays(x, t)
        pt, qt = self.phi(tb), self.psi(tb)
        px = self.phi(xb)
        g = self.coef(tb, pt, qt) * px
        right = xb > tb
        if np.any(right):
            qx = np.zeros_like(px)
            qx[right] = self.psi(xb[right])
            g = g + np.where(right, self._c["C"] * (pt * qx - qt * px), 0.0)
        if not np.all(np.isfinite(g)):
            raise EvaluationError("non-finite Green's kernel value")
        return g

    def eval_dx(self, x, t, side=+1):
        """dG/dx; at x = t the one-sided value from the right (side=+1) or left."""
        x = np.asarray(x, dtype=float)
        t = np.asarray(t, dtype=float)
        _check_xt(x, t)
        xb, tb = np.broadcast_arrays(x, t)
        pt, qt = self.phi(tb), self.psi(tb)
        dpx = self.phi_dx(xb)
        g = self.coef(tb, pt, qt) * dpx
        right = (xb > tb) | ((xb == tb) & (side > 0))
        if np.any(right):
            dqx = np.zeros_like(dpx)
            dqx[right] = self.psi_dx(xb[right])
            g = g + np.where(right, self._c["C"] * (pt * dqx - qt * dpx), 0.0)
        return g


def _vmap(fn, x):
    a = np.asarray(x, dtype=float)
    out = np.array([fn(float(s)) for s in a.ravel()], dtype=float).reshape(a.shape)
    return float(out) if a.ndim == 0 else out


def _check_xt(x, t):
    if np.any(t <= 0.0) or np.any(t > 1.0) or np.any(np.isnan(t)):
        raise DomainError("kernel needs t in (0, 1]")
    if np.any(x < 0.0) or np.any(x > 1.0) or np.any(np.isnan(x)):
        raise DomainError("kernel needs x in [0, 1]")


def wronskian_constant(case: CaseTag, nu: float) -> float:
    """C = 1 / (x^alpha W[phi, psi]), constant in x."""
    if case is CaseTag.CaseI:
        return math.pi / (2.0 * sinpi(nu))
    if case is CaseTag.CaseII:
        return math.pi / (2.0 * cospi(nu))
    return -1.0


def build_kernel(alpha: float, lam: float, delta: float, eta: float, force: bool = False) -> GreenKernel:
    """Build the kernel; refuses resonant lambda and (unless forced) parameters
    where the governing hypothesis fails."""
    if not alpha >= 1.0:
        raise UnsupportedAlphaError(f"alpha must be >= 1, got {alpha}")
    if not delta > 0.0 or not 0.0 < eta < 1.0:
        raise InvalidInputError("need delta > 0 and 0 < eta < 1")
    report = check_hypotheses(alpha, lam, delta, eta)
    case = report.case
    nu = report.nu
    if case is CaseTag.CaseI and abs(nu - round(nu)) < NEAR_INTEGER_NU:
        raise UnsupportedAlphaError(
            f"alpha={alpha} is within {2 * NEAR_INTEGER_NU} of an odd integer; "
            f"use the odd-integer kernel (alpha rounded to within {ODD_TOL})"
        )
    k = math.sqrt(abs(lam))
    fam = "I" if case is CaseTag.CaseIII else "J"
    phi1 = regular_weighted(fam, nu, k, 1.0)
    phie = regular_weighted(fam, nu, k, eta)
    denom = phi1 - delta * phie
    scale = abs(phi1) + abs(delta * phie)
    if abs(denom) <= RESONANCE_TOL:
        raise ResonantLambdaError(f"kernel denominator {denom:.3e} vanishes (resonant lambda={lam})")
    hyp = report.governing()
    if hyp is None:
        if not force:
            raise HypothesisViolationError(
                f"no hypothesis holds at alpha={alpha}, lambda={lam}, delta={delta}, eta={eta}: "
                f"margins {report.margins}"
            )
        hyp = classify_alpha(alpha, "negative" if lam < 0 else "positive")[2]
    sfam = {CaseTag.CaseI: "J", CaseTag.CaseII: "Y", CaseTag.CaseIII: "K"}[case]
    psi1 = bessel(sfam, nu, k)
    psie = eta**nu * bessel(sfam, nu, eta * k)
    consts = {
        "C": wronskian_constant(case, nu),
        "phi1": phi1,
        "phie": phie,
        "psi1": psi1,
        "psie": psie,
        "Dpsi": psi1 - delta * psie,
    }
    return GreenKernel(
        case=case,
        alpha=float(alpha),
        lam=float(lam),
        delta=float(delta),
        eta=float(eta),
        nu=nu,
        denom=denom,
        sign_expectation=_SIGN_OF[hyp],
        hypothesis=hyp,
        condition=abs(denom) / scale,
        forced=report.governing() is None,
        _c=consts,
    )


def eval_kernel(k: GreenKernel, x, t):
    return k.eval(x, t)


def kernel_grid(k: GreenKernel, m: int, eps: float = SIGN_EPS):
    """G on the m x m grid [0, 1] x [eps, 1]; returns (xs, ts, G[i, j] = G(xs[i], ts[j]))."""
    xs = np.linspace(0.0, 1.0, m)
    ts = np.linspace(eps, 1.0, m)
    px, pt, qt = k.phi(xs), k.phi(ts), k.psi(ts)
    qx = np.zeros_like(xs)
    qx[1:] = k.psi(xs[1:])
    ct = k.coef(ts, pt, qt)
    g = np.outer(px, ct)
    tail = k._c["C"] * (np.outer(qx, pt) - np.outer(px, qt))
    g += np.where(xs[:, None] > ts[None, :], tail, 0.0)
    return xs, ts, g


def kernel_sign_report(k: GreenKernel, m: int = 101):
    """Largest wrong-signed kernel value on the m x m sweep (0 if none) and its (x, t)."""
    if m < 11:
        raise InvalidInputError("sign sweep needs m >= 11")
    xs, ts, g = kernel_grid(k, m)
    bad = g if k.sign_expectation == "nonpositive" else -g
    i, j = np.unravel_index(int(np.argmax(bad)), bad.shape)
    worst = float(bad[i, j])
    if worst <= 0.0:
        return 0.0, None
    return worst, (float(xs[i]), float(ts[j]))


# linear solve -----------------------------------------------------------

PANEL_ORDER = 10
GRADED_LEVELS = 40


class PanelOperator:
    """Separable quadrature of the Green's representation on a fixed mesh.

    Gauss nodes sit in every mesh cell (geometrically graded in the first
    cell, where t^a psi(t) may carry a logarithm), so an integrand built
    from piecewise-linear data is smooth on each cell.  With G split as
    above the integral at node x_i is

        phi(x_i) A + C (psi(x_i) P_i - phi(x_i) Q_i),

    A = int_0^1 t^a c h, and P_i, Q_i the running integrals of t^a phi h
    and t^a psi h over [0, x_i].
    """

    def __init__(self, k: GreenKernel, nodes, order: int = PANEL_ORDER):
        nodes = np.asarray(nodes, dtype=float)
        self.kernel = k
        self.nodes = nodes
        gx, gw = gauss_legendre(order)
        first = nodes[1]
        graded = first * 0.5 ** np.arange(GRADED_LEVELS, 0, -1)
        cells_lo = np.concatenate([[0.0], graded, nodes[1:-1]])
        cells_hi = np.concatenate([graded, [first], nodes[2:]])
        half = 0.5 * (cells_hi - cells_lo)
        t = (cells_lo[:, None] + half[:, None] * (gx[None, :] + 1.0)).ravel()
        w = (half[:, None] * gw[None, :]).ravel()
        # mesh cell that each node belongs to: the graded cells all lie in cell 0
        cell = np.concatenate([np.zeros(GRADED_LEVELS + 1, dtype=int), np.arange(1, nodes.size - 1)])
        self.cell = np.repeat(cell, order)
        self.t = t
        pt, qt = k.phi(t), k.psi(t)
        ta = t**k.alpha
        self.w_phi = w * ta * pt
        self.w_psi = w * ta * qt
        self.w_c = w * ta * k.coef(t, pt, qt)
        self.phi_x = k.phi(nodes)
        self.psi_x = np.zeros_like(nodes)
        self.psi_x[1:] = k.psi(nodes[1:])
        if not all(np.all(np.isfinite(a)) for a in (self.w_phi, self.w_psi, self.w_c, self.psi_x)):
            raise EvaluationError("non-finite basis values while assembling the panel operator")

    def integral(self, hq):
        """int_0^1 t^a G(x_i, t) h(t) dt for h sampled at ``self.t``."""
        n = self.nodes.size
        a = float(np.dot(self.w_c, hq))
        p = np.zeros(n)
        q = np.zeros(n)
        p[1:] = np.cumsum(np.bincount(self.cell, self.w_phi * hq, minlength=n - 1))
        q[1:] = np.cumsum(np.bincount(self.cell, self.w_psi * hq, minlength=n - 1))
        c = self.kernel._c["C"]
        return self.phi_x * a + c * (self.psi_x * p - self.phi_x * q)

    def apply(self, hq, b=0.0):
        return b * self.phi_x / self.kernel.denom - self.integral(hq)


@lru_cache(maxsize=32)
def _operator_cached(k, key, order):
    return PanelOperator(k, np.frombuffer(key), order)


def panel_operator(k: GreenKernel, nodes, order: int = PANEL_ORDER) -> PanelOperator:
    nodes = np.ascontiguousarray(nodes, dtype=float)
    return _operator_cached(k, nodes.tobytes(), order)


def solve_linear(k: GreenKernel, h, b: float, grid, method: str = "panel",
                 cfg: QuadConfig = DEFAULT_QUAD) -> GridFunction:
    """Solve the shifted linear problem for forcing ``h`` (vectorized callable) on ``grid``.

    ``method="direct"`` integrates each node adaptively through
    integrate_kernel_product; ``"panel"`` uses the separable operator.
    """
    nodes = grid.nodes if isinstance(grid, GridFunction) else np.asarray(grid, dtype=float)
    if method == "panel":
        op = panel_operator(k, nodes)
        hq = np.asarray(h(op.t), dtype=float) * np.ones_like(op.t)
        values = op.apply(hq, b)
    elif method == "direct":
        values = np.array([b * k.phi(x) / k.denom - integrate_kernel_product(k, h, x, cfg) for x in nodes])
    else:
        raise ValueError(f"unknown method {method!r}")
    return GridFunction(nodes, values)


__all__ = [
    "GreenKernel",
    "PanelOperator",
    "build_kernel",
    "case_for",
    "eval_kernel",
    "kernel_grid",
    "kernel_sign_report",
    "odd_integer",
    "panel_operator",
    "solve_linear",
    "wronskian_constant",
]
