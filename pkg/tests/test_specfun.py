import math

import numpy as np
import pytest

from emlens.specfun import (AiryOverflowError, LaguerreSeq, ai_upper_bound, airy, airy_ld_scaled,
                            ci, laguerre_seq, weighted_laguerre)


def _scale(v):
    return max(1.0, abs(v))


def test_airy_against_frozen_mpmath(frozen):
    for key, ref in frozen["airy"].items():
        x = float(key)
        a = airy(x)
        got = (a.ai, a.ai_prime, a.bi, a.bi_prime)
        for g, r in zip(got, map(float, ref)):
            if abs(x) <= 8:
                # absolute on a max(1, |f|) scale: Bi(8) ~ 8e4 has an ulp of 1.5e-11
                assert abs(g - r) <= 1e-12 * _scale(r), (x, g, r)
            else:
                assert abs(g - r) <= 1e-12 * abs(r), (x, g, r)


def test_airy_wronskian_everywhere():
    for x in np.linspace(-300, 90, 3901):
        assert abs(airy(float(x)).wronskian * math.pi - 1) < 1e-10


def test_airy_continuity_at_region_switches():
    for x0 in (-8.0, 5.0, 10.0):
        lo = airy(np.nextafter(x0, -np.inf))
        hi = airy(np.nextafter(x0, np.inf))
        for u, v in ((lo.ai, hi.ai), (lo.bi, hi.bi), (lo.ai_prime, hi.ai_prime), (lo.bi_prime, hi.bi_prime)):
            assert abs(u - v) <= 1e-12 * max(1.0, abs(v))


def test_airy_scaled_products_do_not_overflow():
    ai, aip, bi, bip, zeta = airy_ld_scaled(900.0)
    # Ai Bi = ai * bi exactly since the exponentials cancel; ~ 1/(2 pi sqrt(x))
    assert float(np.ravel(ai * bi)[0]) == pytest.approx(1 / (2 * math.pi * math.sqrt(900.0)), rel=1e-4)
    assert zeta == pytest.approx(2 / 3 * 900.0**1.5)
    with pytest.raises(AiryOverflowError):
        airy(150.0)


def test_ci_combines_bi_and_ai():
    x = -3.7
    a = airy(x)
    c, cp = ci(x)
    assert c == complex(a.bi, a.ai)
    assert cp == complex(a.bi_prime, a.ai_prime)


def test_ai_upper_bound_dominates():
    for a in (0.5, 2.0, 10.0, 40.0):
        assert airy(a).ai <= ai_upper_bound(a)


def test_laguerre_small_orders():
    s = laguerre_seq(3, 2.0)
    assert np.allclose(s.values, [1.0, -1.0, -1.0, -1 / 3], atol=1e-15)
    assert np.allclose(s.derivatives, [0.0, -1.0, 0.0, 1.0], atol=1e-14)
    assert s.recurrence_residual() < 1e-14


def test_laguerre_residual_flags_overflow():
    assert math.isinf(laguerre_seq(5000, 1e4).recurrence_residual())


def test_weighted_laguerre_against_frozen_mpmath(frozen):
    for key, ref in frozen["weighted_laguerre"].items():
        n, u = key.split(",")
        w, _ = weighted_laguerre(int(n), float(u))
        r = float(ref)
        assert abs(w[int(n)] - r) <= 1e-12 * max(abs(r), 1e-3), key


def test_weighted_laguerre_finite_and_recurrent_up_to_1e4():
    for u in (0.0, 1.0, 50.0, 2500.0, 1e4):
        w, dw = weighted_laguerre(5000, u)
        assert np.all(np.isfinite(w)) and np.all(np.isfinite(dw))
        assert np.all(np.abs(w) <= 1.0 + 1e-12)
        assert LaguerreSeq(u, w, dw).recurrence_residual() < 1e-10


def test_weighted_laguerre_derivative_by_differences():
    u, h = 37.0, 1e-5
    _, dw = weighted_laguerre(300, u)
    wp, _ = weighted_laguerre(300, u + h)
    wm, _ = weighted_laguerre(300, u - h)
    assert np.allclose(dw, (wp - wm) / (2 * h), atol=1e-8)


def test_negative_argument_rejected():
    with pytest.raises(ValueError):
        laguerre_seq(3, -1.0)
    with pytest.raises(ValueError):
        weighted_laguerre(3, -1.0)
