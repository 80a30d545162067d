"""Regime classification in alpha, hypothesis checks and lambda-window search."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DegenerateLambdaError, InvalidInputError, UnsupportedAlphaError
from .specfun import bessel, first_positive_zero

ODD_TOL = 1e-12
LAMBDA_FLOOR = -100.0
SCAN_POINTS = 400
BISECT_TOL = 1e-8
ZERO_GAP_TOL = 1e-10  # relative; first zeros are only known to about this accuracy

HYPOTHESES = ("H0", "H1", "H2", "H3", "H'0")


class CaseTag(str, Enum):
    CaseI = "CaseI"
    CaseII = "CaseII"
    CaseIII = "CaseIII"


class RegimeTag(str, Enum):
    WellOrdered = "WellOrdered"
    ReverseOrdered = "ReverseOrdered"


def normalize_sign(sign) -> str:
    """Map user spellings of a sign onto 'positive' / 'negative'."""
    s = str(getattr(sign, "value", sign)).strip().lower()
    if s in ("positive", "pos", "+", "p", "1", "+1"):
        return "positive"
    if s in ("negative", "neg", "-", "n", "-1"):
        return "negative"
    raise InvalidInputError(f"unrecognised sign {sign!r}")


def odd_integer(alpha: float) -> int | None:
    """The odd integer within ODD_TOL of alpha, or None."""
    r = round(alpha)
    if abs(alpha - r) <= ODD_TOL and int(r) % 2 == 1:
        return int(r)
    return None


def _alpha_class(alpha: float) -> str:
    """Which positive-lambda hypothesis governs alpha."""
    m = odd_integer(alpha)
    if m is not None:
        return "H2" if m % 4 == 3 else "H3"
    return "H0" if 1.0 < math.fmod(alpha, 4.0) < 3.0 else "H1"


_REGIME = {
    "H0": (CaseTag.CaseI, RegimeTag.WellOrdered),
    "H1": (CaseTag.CaseI, RegimeTag.ReverseOrdered),
    "H2": (CaseTag.CaseII, RegimeTag.WellOrdered),
    "H3": (CaseTag.CaseII, RegimeTag.ReverseOrdered),
    "H'0": (CaseTag.CaseIII, RegimeTag.WellOrdered),
}


def classify_alpha(alpha: float, fy_sign) -> tuple[CaseTag, RegimeTag, str]:
    if not alpha >= 1.0:
        raise UnsupportedAlphaError(f"alpha must be >= 1, got {alpha}")
    hyp = "H'0" if normalize_sign(fy_sign) == "negative" else _alpha_class(alpha)
    case, regime = _REGIME[hyp]
    return case, regime, hyp


def case_for(alpha: float, lam: float) -> CaseTag:
    if lam < 0:
        return CaseTag.CaseIII
    return CaseTag.CaseII if odd_integer(alpha) is not None else CaseTag.CaseI


def first_zero_square(alpha: float) -> float:
    """j_{nu,1}^2 for non-odd alpha, y_{nu,1}^2 for odd alpha."""
    nu = 0.5 * (1.0 - alpha)
    fam = "Y" if odd_integer(alpha) is not None else "J"
    return first_positive_zero(fam, nu) ** 2


@dataclass(frozen=True)
class HypothesisReport:
    case: CaseTag
    holds: dict = field(default_factory=dict)
    margins: dict = field(default_factory=dict)
    nu: float = 0.0

    def governing(self) -> str | None:
        for name in HYPOTHESES:
            if self.holds.get(name):
                return name
        return None


def check_hypotheses(alpha: float, lam: float, delta: float, eta: float) -> HypothesisReport:
    """Evaluate the hypotheses applicable to (alpha, lambda) with their margins.

    Margins: ``zero_gap`` = first-zero square minus lambda (positive lambda
    only), ``psi_combo`` = the second-solution combination and ``phi_combo``
    = the regular-solution combination (the kernel denominator).
    """
    if not alpha >= 1.0:
        raise UnsupportedAlphaError(f"alpha must be >= 1, got {alpha}")
    if lam == 0.0:
        raise DegenerateLambdaError("lambda must be nonzero")
    if not delta > 0.0 or not 0.0 < eta < 1.0:
        raise InvalidInputError("need delta > 0 and 0 < eta < 1")
    nu = 0.5 * (1.0 - alpha)
    k = math.sqrt(abs(lam))
    w = delta * eta**nu
    case = case_for(alpha, lam)
    holds = dict.fromkeys(HYPOTHESES, False)
    margins = {}
    if case is CaseTag.CaseIII:
        psi = bessel("K", nu, k) - w * bessel("K", nu, eta * k)
        phi = bessel("I", -nu, k) - w * bessel("I", -nu, eta * k)
        margins.update(psi_combo=psi, phi_combo=phi)
        holds["H'0"] = delta > 0 and psi <= 0 and phi > 0
    else:
        fam = "J" if case is CaseTag.CaseI else "Y"
        z = first_zero_square(alpha)
        # sign of  delta eta^nu F_nu(eta k) - F_nu(k), F = J or Y
        psi = w * bessel(fam, nu, eta * k) - bessel(fam, nu, k)
        phi = bessel("J", -nu, k) - w * bessel("J", -nu, eta * k)
        margins.update(zero_gap=z - lam, psi_combo=psi, phi_combo=phi)
        in_range = 0.0 < lam < z * (1.0 - ZERO_GAP_TOL)
        cls = _alpha_class(alpha)
        well, rev = ("H0", "H1") if case is CaseTag.CaseI else ("H2", "H3")
        holds[well] = cls == well and in_range and 0 < delta < 1 and psi >= 0 and phi > 0
        holds[rev] = cls == rev and in_range and delta >= 1 and psi <= 0 and phi < 0
    return HypothesisReport(case=case, holds=holds, margins=margins, nu=nu)


@dataclass(frozen=True)
class LambdaWindow:
    lo: float
    hi: float
    sign: str
    nonempty: bool
    hypothesis: str = ""


def _largest_run(flags):
    best, start = None, None
    for i, f in enumerate(list(flags) + [False]):
        if f and start is None:
            start = i
        elif not f and start is not None:
            if best is None or i - start > best[1] - best[0] + 1:
                best = (start, i - 1)
            start = None
    return best


def admissible_lambda_window(alpha, delta, eta, M, regime, sign, floor=LAMBDA_FLOOR,
                             points=SCAN_POINTS, tol=BISECT_TOL) -> LambdaWindow:
    """Largest lambda interval meeting both the lambda inequality of its regime and
    the governing hypothesis; scan ``points`` candidates then bisect the edges."""
    sign = normalize_sign(sign)
    regime = RegimeTag(regime)
    if M < 0:
        raise InvalidInputError("M must be >= 0")
    _, expect_regime, hyp = classify_alpha(alpha, sign)
    if regime is not expect_regime:
        raise InvalidInputError(f"regime {regime.value} is inconsistent with alpha={alpha}, sign {sign}")
    empty = LambdaWindow(0.0, 0.0, sign, False, hyp)

    if sign == "negative":
        lo, hi = floor, -M
    elif regime is RegimeTag.ReverseOrdered:
        lo, hi = M, first_zero_square(alpha)
    else:
        lo, hi = 0.0, min(M, first_zero_square(alpha))
    if not hi > lo:
        return empty

    if sign == "negative":
        def inside(lam):
            return lo <= lam <= hi
    elif regime is RegimeTag.ReverseOrdered:
        def inside(lam):
            return lam >= M
    else:
        def inside(lam):
            return lam <= M

    def ok(lam):
        if lam == 0.0 or not inside(lam):
            return False
        return check_hypotheses(alpha, lam, delta, eta).holds[hyp]

    cand = np.linspace(lo, hi, points)
    flags = [ok(c) for c in cand]
    run = _largest_run(flags)
    if run is None:
        return empty
    i, j = run

    def edge(good, bad):
        while abs(bad - good) > tol:
            mid = 0.5 * (good + bad)
            if ok(mid):
                good = mid
            else:
                bad = mid
        return good

    wlo = cand[i] if i == 0 else edge(cand[i], cand[i - 1])
    whi = cand[j] if j == len(cand) - 1 else edge(cand[j], cand[j + 1])
    if not whi > wlo:
        return empty
    return LambdaWindow(float(wlo), float(whi), sign, True, hyp)
