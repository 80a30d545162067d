import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tpsbvp.errors import BesselRangeError, DomainError, ZeroNotFoundError
from tpsbvp.specfun import (
    EvalPolicy,
    bessel,
    bessel_and_derivative,
    bessel_limit_at_zero,
    cross_product_phi,
    first_positive_zero,
    cospi,
    regular_weighted,
    sinpi,
)

mp.mp.dps = 30
REF = {"J": mp.besselj, "Y": mp.bessely, "I": mp.besseli, "K": mp.besselk}


def reference(fam, nu, x):
    try:
        return REF[fam](nu, x)
    except ValueError:  # mpmath gives up on some cancellations at default precision
        if fam == "I" and nu < 0:
            m = -nu
            return mp.besseli(m, x) + 2 / mp.pi * mp.sinpi(m) * mp.besselk(m, x)
        with mp.workdps(120):
            return REF[fam](nu, x)


def rel(a, b):
    return abs(a - b) / abs(b)


def series_j0(x):
    """Alternating series for J0, summed with mpmath."""
    q = mp.mpf(x) ** 2 / 4
    return float(mp.nsum(lambda k: (-q) ** k / mp.factorial(k) ** 2, [0, mp.inf]))


def series_i0(x):
    q = mp.mpf(x) ** 2 / 4
    return float(mp.nsum(lambda k: q**k / mp.factorial(k) ** 2, [0, mp.inf]))


def series_y0(x):
    x = mp.mpf(x)
    q = x * x / 4
    s = mp.nsum(lambda k: (-1) ** (k + 1) * mp.harmonic(k) * q**k / mp.factorial(k) ** 2, [1, mp.inf])
    return float(2 / mp.pi * ((mp.log(x / 2) + mp.euler) * series_j0(x) + s))


def series_k0(x):
    x = mp.mpf(x)
    q = x * x / 4
    s = mp.nsum(lambda k: mp.harmonic(k) * q**k / mp.factorial(k) ** 2, [1, mp.inf])
    return float(-(mp.log(x / 2) + mp.euler) * series_i0(x) + s)


def test_j_half_order_zero_at_pi():
    assert abs(bessel("J", 0.5, math.pi)) <= 1e-12


def test_k_half_order():
    assert bessel("K", 0.5, 1.0) == pytest.approx(math.sqrt(math.pi / 2) * math.exp(-1), rel=1e-12)


def test_j0_of_one():
    assert abs(bessel("J", 0, 1.0) - 0.7651976866) <= 1e-10


@pytest.mark.parametrize("x", [0.01, 0.5, 1.0, 1.9, 2.1, 5.0, 17.0])
def test_order_zero_against_series(x):
    assert rel(bessel("J", 0, x), series_j0(x)) <= 1e-10 or abs(bessel("J", 0, x) - series_j0(x)) <= 1e-14
    assert rel(bessel("Y", 0, x), series_y0(x)) <= 1e-10 or abs(bessel("Y", 0, x) - series_y0(x)) <= 1e-14
    assert rel(bessel("I", 0, x), series_i0(x)) <= 1e-10
    if x < 10:
        assert rel(bessel("K", 0, x), series_k0(x)) <= 1e-10


@pytest.mark.parametrize("x", [1e-6, 0.3, 1.0, 2.0, 7.5, 40.0, 99.0])
def test_half_order_closed_forms(x):
    c = math.sqrt(2 / (math.pi * x))
    assert bessel("J", 0.5, x) == pytest.approx(c * math.sin(x), rel=1e-10, abs=1e-14)
    assert bessel("J", -0.5, x) == pytest.approx(c * math.cos(x), rel=1e-10, abs=1e-14)
    assert bessel("Y", 0.5, x) == pytest.approx(-c * math.cos(x), rel=1e-10, abs=1e-14)
    assert bessel("Y", -0.5, x) == pytest.approx(c * math.sin(x), rel=1e-10, abs=1e-14)
    assert bessel("I", 0.5, x) == pytest.approx(c * math.sinh(x), rel=1e-10)
    assert bessel("I", -0.5, x) == pytest.approx(c * math.cosh(x), rel=1e-10)
    assert bessel("K", 0.5, x) == pytest.approx(math.sqrt(math.pi / (2 * x)) * math.exp(-x), rel=1e-10)


@settings(max_examples=300, deadline=None)
@given(
    st.sampled_from("JYIK"),
    st.floats(-50, 50),
    st.floats(-8, 2),
)
def test_against_mpmath(fam, nu, lx):
    x = 10.0**lx
    ref = reference(fam, nu, x)
    if not mp.mpf("1e-290") < abs(ref) < mp.mpf("1e290"):
        return
    try:
        v = bessel(fam, nu, x)
    except BesselRangeError:
        return
    # near a zero only absolute accuracy is meaningful
    scale = max(abs(ref), abs(reference(fam, nu + 1, x)) if fam in "JY" else 0)
    assert abs(v - float(ref)) <= 1e-10 * float(scale)


@pytest.mark.parametrize("nu", [-2 + 7e-15, -2 + 1e-10, -3 + 1e-12, -1 + 1e-13, -5 + 1e-9, -0.5 + 1e-14])
@pytest.mark.parametrize("x", [0.01, 0.5, 1.9, 2.5, 30.0])
def test_near_integer_negative_orders(nu, x):
    for fam in "JYI":
        assert rel(bessel(fam, nu, x), float(reference(fam, nu, x))) <= 1e-12


def test_sinpi_cospi():
    rng = np.random.default_rng(9)
    vals = list(rng.uniform(-10, 10, 500)) + [3 - 1e-12, 2 + 1e-15, -7.25, 1e-300, 0.75, -0.25]
    for v in vals:
        assert sinpi(v) == pytest.approx(float(mp.sinpi(v)), rel=1e-15, abs=1e-300)
        assert cospi(v) == pytest.approx(float(mp.cospi(v)), rel=1e-15, abs=1e-300)
    for m in range(-6, 7):
        assert sinpi(m) == 0.0 and cospi(m + 0.5) == 0.0
        assert cospi(m) == (-1.0) ** m and sinpi(m + 0.5) == (-1.0) ** m


def test_integer_negative_orders():
    for m in range(1, 6):
        for x in (0.3, 2.5, 11.0):
            assert bessel("Y", -m, x) == pytest.approx((-1) ** m * bessel("Y", m, x), rel=1e-13)
            assert bessel("J", -m, x) == pytest.approx((-1) ** m * bessel("J", m, x), rel=1e-13)
            assert bessel("I", -m, x) == pytest.approx(bessel("I", m, x), rel=1e-13)
            assert bessel("K", -m, x) == bessel("K", m, x)


def _box(seed, n=200):
    rng = np.random.default_rng(seed)
    return zip(rng.uniform(0, 6, n), rng.uniform(0.1, 50, n))


def test_wronskian_jy():
    for nu, x in _box(1):
        j, jp = bessel_and_derivative("J", nu, x)
        y, yp = bessel_and_derivative("Y", nu, x)
        assert rel(j * yp - jp * y, 2 / (math.pi * x)) <= 1e-9


def test_wronskian_ik():
    for nu, x in _box(2):
        if x > 50:
            continue
        i, ip = bessel_and_derivative("I", nu, x)
        k, kp = bessel_and_derivative("K", nu, x)
        assert rel(i * kp - ip * k, -1 / x) <= 1e-9


def test_connection_formula():
    rng = np.random.default_rng(3)
    for nu, x in zip(rng.uniform(0, 6, 200), rng.uniform(0.1, 50, 200)):
        if abs(nu - round(nu)) < 1e-6:
            continue
        lhs = bessel("J", -nu, x)
        rhs = bessel("J", nu, x) * math.cos(nu * math.pi) - bessel("Y", nu, x) * math.sin(nu * math.pi)
        scale = abs(bessel("J", nu, x)) + abs(bessel("Y", nu, x))
        assert abs(lhs - rhs) <= 1e-9 * max(abs(lhs), 1e-3 * scale)


def test_positivity():
    rng = np.random.default_rng(4)
    for nu, x in zip(rng.uniform(0, 20, 300), rng.uniform(1e-3, 50, 300)):
        assert bessel("I", nu, x) > 0
        assert bessel("K", nu, x) > 0


def test_derivative_matches_mpmath():
    for fam in "JYIK":
        for nu, x in ((0.3, 0.7), (-2.4, 3.3), (5.0, 12.0), (-0.5, 1.5)):
            _, d = bessel_and_derivative(fam, nu, x)
            ref = float(mp.diff(lambda t: REF[fam](nu, t), x))
            assert d == pytest.approx(ref, rel=1e-9, abs=1e-13)


def test_domain_errors():
    for fam in "JYIK":
        with pytest.raises(DomainError):
            bessel(fam, 0.5, 0.0)
        with pytest.raises(DomainError):
            bessel(fam, 0.5, -1.0)
    with pytest.raises(DomainError):
        bessel("J", 50.5, 1.0)
    with pytest.raises(BesselRangeError):
        bessel("I", 0.0, 800.0)


def test_policy_validation():
    with pytest.raises(ValueError):
        EvalPolicy(series_cutoff=0)
    with pytest.raises(ValueError):
        EvalPolicy(target_rel_err=1e-3)
    p = EvalPolicy(series_cutoff=1.0)
    assert bessel("J", 0.3, 1.5, p) == pytest.approx(bessel("J", 0.3, 1.5), rel=1e-12)


def test_limit_at_zero():
    assert bessel_limit_at_zero("J", 0, 1) == pytest.approx(1.0)
    assert bessel_limit_at_zero("J", -0.5, 1) == pytest.approx(0.7978845608, rel=1e-10)
    assert bessel_limit_at_zero("I", -1, 4) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        bessel_limit_at_zero("Y", -1, 4)
    # the limit is approached by the weighted function
    for fam in "JI":
        for nu in (0.0, -0.5, -1.5, -3.0):
            v = regular_weighted(fam, nu, 1.3, 1e-7)
            assert v == pytest.approx(bessel_limit_at_zero(fam, nu, 1.69), rel=1e-10)


@pytest.mark.parametrize("fam,nu", [("J", -0.5), ("J", -2.5), ("I", -1.0), ("J", 0.0)])
def test_regular_weighted_continuous_across_series_switch(fam, nu):
    k = 2.0
    x = 0.5  # k x = 1, the switch point
    a = regular_weighted(fam, nu, k, x * (1 - 1e-12))
    b = regular_weighted(fam, nu, k, x * (1 + 1e-12))
    assert a == pytest.approx(b, rel=1e-10)
    assert b == pytest.approx(x**nu * bessel(fam, -nu, k * x), rel=1e-13)


def test_zeros():
    assert abs(first_positive_zero("J", -0.5) - math.pi / 2) <= 1e-10
    assert abs(first_positive_zero("J", 0) - float(mp.besseljzero(0, 1))) <= 1e-10
    assert abs(first_positive_zero("Y", 0) - float(mp.besselyzero(0, 1))) <= 1e-10
    assert abs(first_positive_zero("J", 0) - 2.4048255577) <= 1e-10
    assert abs(first_positive_zero("Y", 0) - 0.8935769663) <= 1e-10
    for nu in (0.5, 1, 2.7, 10):
        assert first_positive_zero("J", nu) == pytest.approx(float(mp.besseljzero(nu, 1)), abs=1e-10)
    with pytest.raises(ZeroNotFoundError):
        first_positive_zero("J", 0, scan_limit=1.0)


def test_zero_is_first_sign_change():
    for fam, nu in (("J", -1.5), ("J", -2.5), ("Y", -1), ("Y", -2), ("J", 3.3)):
        z = first_positive_zero(fam, nu)
        assert abs(bessel(fam, nu, z)) <= 1e-12 * max(1.0, abs(bessel(fam, nu + 1, z)))
        xs = np.linspace(1e-3, z * (1 - 1e-6), 400)
        vals = [bessel(fam, nu, t) for t in xs]
        assert all(v > 0 for v in vals) or all(v < 0 for v in vals)


def test_cross_product_examples():
    assert cross_product_phi(0.5, 0.5, -0.5, 1.0) == 0.0
    assert cross_product_phi(0.8, 0.4, -0.5, 1.0) >= 0
    # closed forms: r^{-1/2} (J_{1/2}(s) J_{-1/2}(r) - J_{-1/2}(s) J_{1/2}(r)) = (2/pi) sin(s - r) / sqrt(s r)
    s, r = 0.8, 0.4
    assert cross_product_phi(s, r, -0.5, 1.0) == pytest.approx(
        r**-0.5 * (2 / math.pi) * math.sin(s - r) / math.sqrt(s * r), rel=1e-12
    )
    v = cross_product_phi(0.9, 0.3, -0.5, -1.0, kind="IK")
    assert v <= 0
    # K_{-1/2}(s) I_{1/2}(r) - I_{1/2}(s) K_{-1/2}(r) = (e^{-s} sinh r - sinh s e^{-r}) / sqrt(s r)
    s, r = 0.9, 0.3
    ref = r**-0.5 * (math.exp(-s) * math.sinh(r) - math.sinh(s) * math.exp(-r)) / math.sqrt(s * r)
    assert v == pytest.approx(ref, rel=1e-12)
    with pytest.raises(DomainError):
        cross_product_phi(0.3, 0.5, -0.5, 1.0)
    with pytest.raises(DomainError):
        cross_product_phi(1.2, 0.5, -0.5, 1.0)


def _cross_samples(alphas, lam_of, kind, n, seed):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        a = float(rng.choice(alphas))
        nu = 0.5 * (1 - a)
        lam = lam_of(rng, a, nu)
        s, r = sorted(rng.uniform(1e-3, 1, 2), reverse=True)
        out.append(cross_product_phi(s, r, nu, lam, kind))
    return np.array(out)


def _below_first_zero(rng, a, nu):
    return rng.uniform(0, 1) * first_positive_zero("J", nu) ** 2 or 1e-3


def test_cross_jj_nonnegative_low_class():
    v = _cross_samples([1.5, 2, 2.5], _below_first_zero, "JJ", 100, 5)
    assert v.min() >= -1e-12


def test_cross_jj_nonpositive_high_class():
    v = _cross_samples([3.5, 4, 4.5], _below_first_zero, "JJ", 100, 6)
    assert v.max() <= 1e-12


def test_cross_ik_nonpositive():
    v = _cross_samples([1, 2, 3, 5, 8], lambda rng, a, nu: -float(rng.choice([0.5, 2, 10])), "IK", 100, 7)
    assert v.max() <= 1e-12
