"""Real-order Bessel functions J, Y, I, K and their first positive zeros.

Nonnegative orders are evaluated with Temme's series for small arguments and
Steed's continued fraction (J, Y) or Temme's continued fraction (K) for
larger ones, with the ratio J'/J (I'/I) from the first continued fraction
and Miller-type recurrence between the reduced order and the target order.
Negative orders go through the connection formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

from .errors import BesselRangeError, DomainError, ZeroNotFoundError

_EPS = 2.220446049250313e-16
_FPMIN = 1e-300
_BIG = 1e250
_TINY = 1e-250
_MAX_ORDER = 50.0
_I_OVERFLOW_X = 700.0

EULER_GAMMA = 0.5772156649015329

# Taylor coefficients of 1/Gamma(1+z) at odd powers z^1, z^3, z^5, z^7.
_RGAMMA_ODD = (
    0.5772156649015329,
    -0.0420026350340952,
    -0.0421977345555443,
    0.0072189432466630,
)


class BesselFamily(str, Enum):
    J = "J"
    Y = "Y"
    I = "I"  # noqa: E741
    K = "K"


@dataclass(frozen=True)
class EvalPolicy:
    series_cutoff: float = 2.0
    target_rel_err: float = 1e-12
    max_terms: int = 100000

    def __post_init__(self):
        if not self.series_cutoff > 0:
            raise ValueError("series_cutoff must be positive")
        if not 0 < self.target_rel_err < 1e-6:
            raise ValueError("target_rel_err must lie in (0, 1e-6)")


DEFAULT_POLICY = EvalPolicy()


def _octant(r: float) -> float:
    """sin(pi r) for r in [0, 1/2], from the nearer of sin and cos."""
    if r <= 0.25:
        return math.sin(math.pi * r)
    return math.cos(math.pi * (0.5 - r))


def sinpi(v: float) -> float:
    """sin(pi v) with exact argument reduction, so it stays accurate near integers."""
    sign = -1.0 if v < 0 else 1.0
    r = math.fmod(abs(v), 2.0)
    if r >= 1.0:
        r -= 1.0
        sign = -sign
    if r > 0.5:
        r = 1.0 - r
    return sign * _octant(r) if r else 0.0


def cospi(v: float) -> float:
    """cos(pi v) with exact argument reduction."""
    r = math.fmod(abs(v), 2.0)
    sign = 1.0
    if r >= 1.0:
        r -= 1.0
        sign = -sign
    if r > 0.5:
        r = 1.0 - r
        sign = -sign
    return sign * _octant(0.5 - r) if r != 0.5 else 0.0


def _gamma_pieces(mu):
    """(gam1, gam2, 1/Gamma(1+mu), 1/Gamma(1-mu)) for |mu| <= 1/2."""
    gampl = 1.0 / math.gamma(1.0 + mu)
    gammi = 1.0 / math.gamma(1.0 - mu)
    gam2 = 0.5 * (gammi + gampl)
    if abs(mu) < 1e-2:
        m2 = mu * mu
        c1, c3, c5, c7 = _RGAMMA_ODD
        gam1 = -(c1 + m2 * (c3 + m2 * (c5 + m2 * c7)))
    else:
        gam1 = (gammi - gampl) / (2.0 * mu)
    return gam1, gam2, gampl, gammi


def _ascending(nu, x, sign, eps):
    """Ascending series for J_nu (sign -1) or I_nu (sign +1); accurate for x < 2, nu >= 0."""
    lead = math.exp(nu * math.log(0.5 * x) - math.lgamma(nu + 1.0))
    q = sign * 0.25 * x * x
    term = total = 1.0
    for k in range(1, 200):
        term *= q / (k * (nu + k))
        total += term
        if abs(term) <= eps * abs(total):
            break
    return lead * total


def _jy_nonneg(nu, x, policy=DEFAULT_POLICY):
    """Return (J_nu, Y_nu, J'_nu, Y'_nu) for nu >= 0, x > 0."""
    xmin = policy.series_cutoff
    eps = max(policy.target_rel_err * 1e-4, _EPS)
    maxit = policy.max_terms
    nl = int(nu + 0.5) if x < xmin else max(0, int(nu - x + 1.5))
    xmu = nu - nl
    xmu2 = xmu * xmu
    xi = 1.0 / x
    xi2 = 2.0 * xi
    w = xi2 / math.pi

    # CF1: J'_nu / J_nu.
    isign = 1
    h = nu * xi
    if h < _FPMIN:
        h = _FPMIN
    b = xi2 * nu
    d = 0.0
    c = h
    for _ in range(maxit):
        b += xi2
        d = b - d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b - 1.0 / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        de = c * d
        h *= de
        if d < 0.0:
            isign = -isign
        if abs(de - 1.0) <= eps:
            break
    else:
        raise ArithmeticError(f"CF1 did not converge for J_{nu}({x})")

    if x < xmin:
        # J from its ascending series: obtaining it from the Wronskian cancels
        # badly when the reduced order is negative and x is tiny.
        rj = _ascending(nu, x, -1.0, eps)
        rjp = h * rj
        x2 = 0.5 * x
        pimu = math.pi * xmu
        fact = 1.0 if abs(pimu) < _EPS else pimu / math.sin(pimu)
        d = -math.log(x2)
        e = xmu * d
        fact2 = 1.0 if abs(e) < _EPS else math.sinh(e) / e
        gam1, gam2, gampl, gammi = _gamma_pieces(xmu)
        ff = 2.0 / math.pi * fact * (gam1 * math.cosh(e) + gam2 * fact2 * d)
        e = math.exp(e)
        p = e / (gampl * math.pi)
        q = 1.0 / (e * math.pi * gammi)
        pimu2 = 0.5 * pimu
        fact3 = 1.0 if abs(pimu2) < _EPS else math.sin(pimu2) / pimu2
        r = math.pi * pimu2 * fact3 * fact3
        c = 1.0
        d = -x2 * x2
        sum0 = ff + r * q
        sum1 = p
        for i in range(1, maxit):
            ff = (i * ff + p + q) / (i * i - xmu2)
            c *= d / i
            p /= i - xmu
            q /= i + xmu
            de = c * (ff + r * q)
            sum0 += de
            sum1 += c * p - i * de
            if abs(de) < (1.0 + abs(sum0)) * eps:
                break
        else:
            raise ArithmeticError(f"Temme series did not converge for Y_{nu}({x})")
        rymu = -sum0
        ry1 = -sum1 * xi2
    else:
        rjl = float(isign)
        rjpl = h * rjl
        rjl1, rjp1 = rjl, rjpl
        nscale = 0
        fact = nu * xi
        for _ in range(nl):
            rjtemp = fact * rjl + rjpl
            fact -= xi
            rjpl = fact * rjtemp - rjl
            rjl = rjtemp
            if abs(rjl) > _BIG:
                rjl *= _TINY
                rjpl *= _TINY
                nscale += 1
        if rjl == 0.0:
            rjl = _EPS
        f = rjpl / rjl
        # CF2 (Steed): p + iq = (J' + iY') / (J + iY).
        a = 0.25 - xmu2
        p = -0.5 * xi
        q = 1.0
        br = 2.0 * x
        bi = 2.0
        fact = a * xi / (p * p + q * q)
        cr = br + q * fact
        ci = bi + p * fact
        den = br * br + bi * bi
        dr = br / den
        di = -bi / den
        dlr = cr * dr - ci * di
        dli = cr * di + ci * dr
        p, q = p * dlr - q * dli, p * dli + q * dlr
        for i in range(2, maxit):
            a += 2 * (i - 1)
            bi += 2.0
            dr = a * dr + br
            di = a * di + bi
            if abs(dr) + abs(di) < _FPMIN:
                dr = _FPMIN
            fact = a / (cr * cr + ci * ci)
            cr = br + cr * fact
            ci = bi - ci * fact
            if abs(cr) + abs(ci) < _FPMIN:
                cr = _FPMIN
            den = dr * dr + di * di
            dr /= den
            di /= -den
            dlr = cr * dr - ci * di
            dli = cr * di + ci * dr
            p, q = p * dlr - q * dli, p * dli + q * dlr
            if abs(dlr - 1.0) + abs(dli) <= eps:
                break
        else:
            raise ArithmeticError(f"CF2 did not converge for J_{nu}({x})")
        gam = (p - f) / q
        rjmu = math.copysign(math.sqrt(w / ((p - f) * gam + q)), rjl)
        rymu = rjmu * gam
        rymup = rymu * (p + q / gam)
        ry1 = xmu * xi * rymu - rymup
        fact = rjmu / rjl
        rj = rjl1 * fact
        rjp = rjp1 * fact
        for _ in range(nscale):
            rj *= _TINY
            rjp *= _TINY

    for i in range(1, nl + 1):
        rymu, ry1 = ry1, (xmu + i) * xi2 * ry1 - rymu
    ry = rymu
    ryp = nu * xi * rymu - ry1
    return rj, ry, rjp, ryp


def _ik_nonneg(nu, x, policy=DEFAULT_POLICY, need_i=True):
    """Return (I_nu, K_nu, I'_nu, K'_nu) for nu >= 0, x > 0."""
    xmin = policy.series_cutoff
    eps = max(policy.target_rel_err * 1e-4, _EPS)
    maxit = policy.max_terms
    nl = int(nu + 0.5)
    xmu = nu - nl
    xmu2 = xmu * xmu
    xi = 1.0 / x
    xi2 = 2.0 * xi

    if x < xmin:
        x2 = 0.5 * x
        pimu = math.pi * xmu
        fact = 1.0 if abs(pimu) < _EPS else pimu / math.sin(pimu)
        d = -math.log(x2)
        e = xmu * d
        fact2 = 1.0 if abs(e) < _EPS else math.sinh(e) / e
        gam1, gam2, gampl, gammi = _gamma_pieces(xmu)
        ff = fact * (gam1 * math.cosh(e) + gam2 * fact2 * d)
        sum0 = ff
        e = math.exp(e)
        p = 0.5 * e / gampl
        q = 0.5 / (e * gammi)
        c = 1.0
        d = x2 * x2
        sum1 = p
        for i in range(1, maxit):
            ff = (i * ff + p + q) / (i * i - xmu2)
            c *= d / i
            p /= i - xmu
            q /= i + xmu
            de = c * ff
            sum0 += de
            sum1 += c * (p - i * ff)
            if abs(de) < abs(sum0) * eps:
                break
        else:
            raise ArithmeticError(f"Temme series did not converge for K_{nu}({x})")
        rkmu = sum0
        rk1 = sum1 * xi2
    else:
        b = 2.0 * (1.0 + x)
        d = 1.0 / b
        h = delh = d
        q1, q2 = 0.0, 1.0
        a1 = 0.25 - xmu2
        q = c = a1
        a = -a1
        s = 1.0 + q * delh
        for i in range(2, maxit):
            a -= 2 * (i - 1)
            c = -a * c / i
            qnew = (q1 - b * q2) / a
            q1, q2 = q2, qnew
            q += c * qnew
            b += 2.0
            d = 1.0 / (b + a * d)
            delh = (b * d - 1.0) * delh
            h += delh
            dels = q * delh
            s += dels
            if abs(dels / s) <= eps:
                break
        else:
            raise ArithmeticError(f"CF2 did not converge for K_{nu}({x})")
        h = a1 * h
        rkmu = math.sqrt(math.pi / (2.0 * x)) * math.exp(-x) / s
        rk1 = rkmu * (xmu + x + 0.5 - h) * xi
    rkmup = xmu * xi * rkmu - rk1

    ri = rip = math.inf
    if need_i:
        # CF1: I'_nu / I_nu, then recur down to the reduced order.
        h = nu * xi
        if h < _FPMIN:
            h = _FPMIN
        b = xi2 * nu
        d = 0.0
        c = h
        for _ in range(maxit):
            b += xi2
            d = 1.0 / (b + d)
            c = b + 1.0 / c
            de = c * d
            h *= de
            if abs(de - 1.0) <= eps:
                break
        else:
            raise ArithmeticError(f"CF1 did not converge for I_{nu}({x})")
        if x < xmin:
            ri = _ascending(nu, x, 1.0, eps)
            rip = h * ri
            need_i = False
    if need_i:
        ril = 1.0
        ripl = h * ril
        ril1, rip1 = ril, ripl
        nscale = 0
        fact = nu * xi
        for _ in range(nl):
            ritemp = fact * ril + ripl
            fact -= xi
            ripl = fact * ritemp + ril
            ril = ritemp
            if abs(ril) > _BIG:
                ril *= _TINY
                ripl *= _TINY
                nscale += 1
        f = ripl / ril
        rimu = xi / (f * rkmu - rkmup)
        ri = rimu * ril1 / ril
        rip = rimu * rip1 / ril
        for _ in range(nscale):
            ri *= _TINY
            rip *= _TINY

    for i in range(1, nl + 1):
        rkmu, rk1 = rk1, (xmu + i) * xi2 * rk1 + rkmu
    rk = rkmu
    rkp = nu * xi * rkmu - rk1
    return ri, rk, rip, rkp


@lru_cache(maxsize=1 << 16)
def _jy(nu, x):
    return _jy_nonneg(nu, x)


@lru_cache(maxsize=1 << 16)
def _ik(nu, x, need_i):
    return _ik_nonneg(nu, x, need_i=need_i)


def _check_args(family, nu, x):
    if not abs(nu) <= _MAX_ORDER:
        raise DomainError(f"order {nu} outside [-{_MAX_ORDER}, {_MAX_ORDER}]")
    if not x > 0.0:
        raise DomainError(f"{family.value}_{nu} needs x > 0, got {x}")
    if family is BesselFamily.I and x > _I_OVERFLOW_X:
        raise BesselRangeError(f"I_{nu}({x}) overflows")


def bessel_and_derivative(family, nu: float, x: float, policy: EvalPolicy | None = None):
    """Value and x-derivative of the Bessel function of the given family."""
    family = BesselFamily(family)
    nu = float(nu)
    x = float(x)
    _check_args(family, nu, x)
    mu = abs(nu)
    if family in (BesselFamily.J, BesselFamily.Y):
        j, y, jp, yp = _jy(mu, x) if policy is None else _jy_nonneg(mu, x, policy)
        if nu < 0.0:
            s, c = sinpi(mu), cospi(mu)
            if family is BesselFamily.J:
                val, der = c * j - s * y, c * jp - s * yp
            else:
                val, der = s * j + c * y, s * jp + c * yp
        elif family is BesselFamily.J:
            val, der = j, jp
        else:
            val, der = y, yp
    else:
        need_i = family is BesselFamily.I
        i, k, ip, kp = _ik(mu, x, need_i) if policy is None else _ik_nonneg(mu, x, policy, need_i)
        if family is BesselFamily.K:
            val, der = k, kp
        else:
            val, der = i, ip
            if nu < 0.0:
                s = sinpi(mu)
                if s != 0.0:
                    val += 2.0 / math.pi * s * k
                    der += 2.0 / math.pi * s * kp
    if not (math.isfinite(val) and math.isfinite(der)):
        raise BesselRangeError(f"{family.value}_{nu}({x}) is not representable")
    return val, der


def bessel(family, nu: float, x: float, policy: EvalPolicy | None = None) -> float:
    return bessel_and_derivative(family, nu, x, policy)[0]


def bessel_limit_at_zero(family, nu: float, lambda_abs: float) -> float:
    """Limit as x -> 0 of x^nu J_{-nu}(x sqrt(lambda)) (or the I analogue), nu <= 0."""
    family = BesselFamily(family)
    if family not in (BesselFamily.J, BesselFamily.I):
        raise DomainError("limit at zero is defined for the J and I families only")
    if nu > 0 or not lambda_abs > 0:
        raise DomainError("need nu <= 0 and lambda_abs > 0")
    return (math.sqrt(lambda_abs) / 2.0) ** (-nu) / math.gamma(1.0 - nu)


def regular_weighted(family, nu: float, k: float, x: float) -> float:
    """x^nu J_{-nu}(k x) or x^nu I_{-nu}(k x) for nu <= 0, including x = 0.

    Small arguments use the power series, where the product of a diverging
    power and a vanishing Bessel value would lose accuracy.
    """
    family = BesselFamily(family)
    if x == 0.0:
        return bessel_limit_at_zero(family, nu, k * k)
    z = k * x
    if z < 1.0:
        sign = -1.0 if family is BesselFamily.J else 1.0
        q = 0.25 * z * z
        term = 1.0 / math.gamma(1.0 - nu)
        total = term
        for j in range(1, 40):
            term *= sign * q / (j * (j - nu))
            total += term
            if abs(term) < 1e-17 * abs(total):
                break
        return (k / 2.0) ** (-nu) * total
    return x**nu * bessel(family, -nu, z)


def first_positive_zero(family, nu: float, scan_limit: float = 100.0) -> float:
    """Smallest x > 0 with J_nu(x) = 0 (or Y_nu(x) = 0): scan in steps pi/8, then bisect."""
    family = BesselFamily(family)
    if family not in (BesselFamily.J, BesselFamily.Y):
        raise DomainError("zeros are supported for the J and Y families only")
    if not abs(nu) <= _MAX_ORDER:
        raise DomainError(f"order {nu} outside [-{_MAX_ORDER}, {_MAX_ORDER}]")
    step = math.pi / 8.0

    def g(t):
        return bessel(family, nu, t)

    a = 1e-4
    while True:
        try:
            ga = g(a)
            break
        except BesselRangeError:
            a *= 10.0
            if a >= step:
                raise ZeroNotFoundError(f"cannot start zero scan for {family.value}_{nu}")
    k = 1
    while True:
        b = min(k * step, scan_limit)
        if b <= a:
            k += 1
            continue
        gb = g(b)
        if gb == 0.0:
            return b
        if (ga < 0.0) != (gb < 0.0):
            break
        if b >= scan_limit:
            raise ZeroNotFoundError(f"no sign change of {family.value}_{nu} below {scan_limit}")
        a, ga = b, gb
        k += 1
    for _ in range(200):
        m = 0.5 * (a + b)
        if m <= a or m >= b or b - a < 1e-14:
            break
        gm = g(m)
        if gm == 0.0:
            return m
        if (gm < 0.0) == (ga < 0.0):
            a, ga = m, gm
        else:
            b = m
    return 0.5 * (a + b)


def cross_product_phi(s: float, r: float, nu: float, lam: float, kind: str = "JJ") -> float:
    """Bessel cross products used in the kernel sign arguments, for 0 < r <= s <= 1.

    kind "JJ": r^nu (J_{-nu}(s k) J_nu(r k) - J_nu(s k) J_{-nu}(r k))
    kind "JY": r^nu (J_{-nu}(s k) Y_nu(r k) - Y_nu(s k) J_{-nu}(r k))
    kind "IK": r^nu (K_nu(s k) I_{-nu}(r k) - I_{-nu}(s k) K_nu(r k)),  k = sqrt|lam|
    """
    if not (0.0 < r <= s <= 1.0):
        raise DomainError(f"need 0 < r <= s <= 1, got r={r}, s={s}")
    if lam == 0.0:
        raise DomainError("lambda must be nonzero")
    kind = kind.upper()
    k = math.sqrt(abs(lam))
    if kind == "JJ":
        a = bessel("J", -nu, s * k) * bessel("J", nu, r * k)
        b = bessel("J", nu, s * k) * bessel("J", -nu, r * k)
    elif kind == "JY":
        a = bessel("J", -nu, s * k) * bessel("Y", nu, r * k)
        b = bessel("Y", nu, s * k) * bessel("J", -nu, r * k)
    elif kind == "IK":
        a = bessel("K", nu, s * k) * bessel("I", -nu, r * k)
        b = bessel("I", -nu, s * k) * bessel("K", nu, r * k)
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return r**nu * (a - b)
