"""Airy functions and Laguerre sequences in extended precision.

The Landau-level series needs Ci(x) = Bi(x) + i Ai(x) at arguments as large as
|x| ~ 1e7, where the oscillation phase (2/3)|x|^(3/2) reaches ~1e10 rad.  In
double precision that phase carries an absolute error of ~1e-6 rad, so every
routine here runs in ``numpy.longdouble`` (x87 80-bit on x86-64, eps ~1e-19)
and only the final values are rounded to double.

Regions (same split in the compiled kernels):

    Ai, Ai'   x < -8 oscillatory asymptotic | -8..5 Maclaurin | 5..10 Taylor about 10 | >10 asymptotic
    Bi, Bi'   x < -8 oscillatory asymptotic | -8..10 Maclaurin                        | >10 asymptotic
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

LD = np.longdouble


def _ld(hi: float, lo: float) -> np.longdouble:
    return LD(hi) + LD(lo)


# (hi, lo) double pairs of the exact values
AI0 = _ld(0.3550280538878172, 2.05233632436212e-17)
AIP0 = _ld(0.2588194037928068, -2.522243111610832e-17)  # -Ai'(0)
SQRT3 = _ld(1.7320508075688772, 1.0035084221806903e-16)
PI = _ld(3.141592653589793, 1.2246467991473532e-16)
TWO_PI = _ld(6.283185307179586, 2.4492935982947064e-16)
SQRT_PI = _ld(1.772453850905516, -7.666586499825799e-17)
AI10 = _ld(1.1047532552898686e-10, -7.711912802715521e-28)
AIP10 = _ld(-3.5206336767389237e-10, 5.975810321396732e-27)

NEG_SWITCH = -8.0
AI_MACLAURIN_MAX = 5.0
POS_SWITCH = 10.0
X_MAX = 100.0  # Bi(100) ~ 1e288; beyond this Bi overflows a double


def _asymptotic_coefficients(n: int) -> tuple[np.ndarray, np.ndarray]:
    # u_k = (2k+1)(2k+3)...(6k-1) / (216^k k!),  v_k = -(6k+1)/(6k-1) u_k
    u = [LD(1)]
    v = [LD(1)]
    for k in range(1, n):
        u.append(u[-1] * LD((6 * k - 5) * (6 * k - 3) * (6 * k - 1)) / LD((2 * k - 1) * 216 * k))
        v.append(-LD(6 * k + 1) / LD(6 * k - 1) * u[-1])
    return np.array(u, dtype=LD), np.array(v, dtype=LD)


U_COEF, V_COEF = _asymptotic_coefficients(40)


@dataclass(frozen=True)
class AiryPair:
    ai: float
    ai_prime: float
    bi: float
    bi_prime: float

    @property
    def wronskian(self) -> float:
        return self.ai * self.bi_prime - self.ai_prime * self.bi


class AiryOverflowError(OverflowError):
    pass


def _maclaurin(x):
    x = np.asarray(x, dtype=LD)
    x2 = x * x
    x3 = x2 * x
    f = np.ones_like(x)
    g = x.copy()
    fp = np.zeros_like(x)
    gp = np.ones_like(x)
    tf = np.ones_like(x)  # x^(3k) term of f
    tg = x.copy()  # x^(3k+1) term of g
    for k in range(1, 90):
        # derivative terms from the previous power, no division by x
        fp += tf * x2 / LD(3 * k - 1)
        gp += tg * x2 / LD(3 * k)
        tf = tf * x3 / LD((3 * k - 1) * (3 * k))
        tg = tg * x3 / LD((3 * k) * (3 * k + 1))
        f += tf
        g += tg
        if k > 3 and np.all(np.abs(tf) <= 1e-22 * np.abs(f)) and np.all(np.abs(tg) <= 1e-22 * np.maximum(np.abs(g), 1e-300)):
            break
    ai = AI0 * f - AIP0 * g
    bi = SQRT3 * (AI0 * f + AIP0 * g)
    aip = AI0 * fp - AIP0 * gp
    bip = SQRT3 * (AI0 * fp + AIP0 * gp)
    return ai, aip, bi, bip


def _taylor_ai(x):
    """Ai, Ai' on (5, 10] by Taylor expansion about x0 = 10 (Ai grows leftward: stable)."""
    x = np.asarray(x, dtype=LD)
    h = x - LD(10)
    x0 = LD(10)
    # k(k-1) c_k = x0 c_{k-2} + c_{k-3}
    c = [AI10, AIP10]
    val = c[0] + c[1] * h
    der = c[1] + np.zeros_like(h)
    hkm1 = h.copy()  # h^(k-1)
    for k in range(2, 140):
        ck = (x0 * c[k - 2] + (c[k - 3] if k >= 3 else LD(0))) / LD(k * (k - 1))
        c.append(ck)
        der = der + LD(k) * ck * hkm1
        hkm1 = hkm1 * h
        val = val + ck * hkm1
        if k > 20 and np.all(np.abs(ck * hkm1) <= 1e-23 * np.abs(val)):
            break
    return val, der


def _asym_pos_scaled(x):
    """(Ai e^z, Ai' e^z, Bi e^-z, Bi' e^-z, z) for x > 10, z = (2/3) x^(3/2)."""
    x = np.asarray(x, dtype=LD)
    r = np.sqrt(x)
    zeta = LD(2) / 3 * x * r
    q = np.sqrt(r)  # x^(1/4)
    s_alt = np.zeros_like(x)
    s_pos = np.zeros_like(x)
    t_alt = np.zeros_like(x)
    t_pos = np.zeros_like(x)
    pw = np.ones_like(x)
    inv = 1 / zeta
    for k in range(25):
        sg = LD(-1) ** k
        s_alt += sg * U_COEF[k] * pw
        s_pos += U_COEF[k] * pw
        t_alt += sg * V_COEF[k] * pw
        t_pos += V_COEF[k] * pw
        pw = pw * inv
    ai = s_alt / (2 * SQRT_PI * q)
    aip = -q / (2 * SQRT_PI) * t_alt
    bi = s_pos / (SQRT_PI * q)
    bip = q / SQRT_PI * t_pos
    return ai, aip, bi, bip, zeta


def _asym_pos(x):
    ai, aip, bi, bip, zeta = _asym_pos_scaled(x)
    em = np.exp(-zeta)
    ep = np.exp(zeta)
    return ai * em, aip * em, bi * ep, bip * ep


def _asym_neg_parts(X):
    """Modulus/phase pieces for argument -X, X >= 8.

    Returns (A, P, Q, Ad, R, S, phase) with
        Ci(-X)  = A  (P - iQ) exp(i(phase + pi/4))
        Ci'(-X) = Ad (R - iS) exp(i(phase - pi/4))
    where ``phase`` is (2/3) X^(3/2) reduced mod 2 pi in long double.
    """
    X = np.asarray(X, dtype=LD)
    r = np.sqrt(X)
    zeta = LD(2) / 3 * X * r
    q = np.sqrt(r)
    inv = 1 / zeta
    P = np.zeros_like(X)
    Q = np.zeros_like(X)
    R = np.zeros_like(X)
    S = np.zeros_like(X)
    pw = np.ones_like(X)
    live = np.ones(X.shape, dtype=bool)
    last = np.full(X.shape, np.inf, dtype=LD)
    for k in range(40):
        term = U_COEF[k] * pw
        # optimal truncation: stop once terms stop shrinking or are negligible
        live &= (np.abs(term) < last) & (np.abs(term) > LD(1e-24))
        if not live.any():
            break
        sg = LD(1) if (k // 2) % 2 == 0 else LD(-1)
        tu = np.where(live, sg * term, 0)
        tv = np.where(live, sg * V_COEF[k] * pw, 0)
        if k % 2 == 0:
            P += tu
            R += tv
        else:
            Q += tu
            S += tv
        last = np.abs(term)
        pw = pw * inv
    phase = np.fmod(zeta, TWO_PI)
    return 1 / (SQRT_PI * q), P, Q, q / SQRT_PI, R, S, phase


def _asym_neg(X):
    A, P, Q, Ad, R, S, ph = _asym_neg_parts(X)
    c1, s1 = np.cos(ph + PI / 4), np.sin(ph + PI / 4)
    c2, s2 = np.cos(ph - PI / 4), np.sin(ph - PI / 4)
    bi = A * (P * c1 + Q * s1)
    ai = A * (P * s1 - Q * c1)
    bip = Ad * (R * c2 + S * s2)
    aip = Ad * (R * s2 - S * c2)
    return ai, aip, bi, bip


def airy_ld_scaled(x):
    """(Ai, Ai', Bi, Bi', zeta) in long double.

    For x > 10 the Ai parts are multiplied by e^zeta and the Bi parts by
    e^-zeta (zeta = (2/3) x^(3/2)); elsewhere zeta = 0 and values are plain.
    Products like Bi(x) Ai(y) can then be formed without overflow.
    """
    x = np.atleast_1d(np.asarray(x, dtype=LD))
    ai = np.empty_like(x)
    aip = np.empty_like(x)
    bi = np.empty_like(x)
    bip = np.empty_like(x)
    zeta = np.zeros_like(x)
    neg = x < NEG_SWITCH
    mid = (x >= NEG_SWITCH) & (x <= POS_SWITCH)
    big = x > POS_SWITCH
    if neg.any():
        ai[neg], aip[neg], bi[neg], bip[neg] = _asym_neg(-x[neg])
    if mid.any():
        a, ap, b, bp = _maclaurin(x[mid])
        ai[mid], aip[mid], bi[mid], bip[mid] = a, ap, b, bp
        tay = mid.copy()
        tay[mid] = x[mid] > AI_MACLAURIN_MAX
        if tay.any():
            ai[tay], aip[tay] = _taylor_ai(x[tay])
    if big.any():
        ai[big], aip[big], bi[big], bip[big], zeta[big] = _asym_pos_scaled(x[big])
    return ai, aip, bi, bip, zeta


def airy_ld(x):
    """Vectorised (Ai, Ai', Bi, Bi') in long double for any finite x <= X_MAX."""
    ai, aip, bi, bip, zeta = airy_ld_scaled(x)
    em = np.exp(-zeta)
    ep = np.exp(zeta)
    return ai * em, aip * em, bi * ep, bip * ep


def airy(x: float) -> AiryPair:
    """Ai, Ai', Bi, Bi' at a real point.

    Raises AiryOverflowError above ``X_MAX`` where Bi is not representable.
    """
    x = float(x)
    if not np.isfinite(x):
        raise ValueError(f"airy argument must be finite, got {x!r}")
    if x > X_MAX:
        raise AiryOverflowError(f"Bi({x}) overflows double precision (x > {X_MAX})")
    ai, aip, bi, bip = airy_ld(x)
    return AiryPair(float(ai[0]), float(aip[0]), float(bi[0]), float(bip[0]))


def ci(x):
    """Ci = Bi + i Ai and its derivative as complex128 arrays (long double inside)."""
    ai, aip, bi, bip = airy_ld(x)
    return (bi.astype(float) + 1j * ai.astype(float), bip.astype(float) + 1j * aip.astype(float))


def ai_upper_bound(a):
    """exp(-(2/3)a^(3/2)) / (2 sqrt(pi) a^(1/4)) >= Ai(a) for a > 0."""
    a = np.asarray(a, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        return np.exp(-2.0 / 3.0 * a**1.5) / (2.0 * np.sqrt(np.pi) * a**0.25)


# ---------------------------------------------------------------- Laguerre


@dataclass(frozen=True)
class LaguerreSeq:
    x: float
    values: np.ndarray
    derivatives: np.ndarray

    def recurrence_residual(self) -> float:
        """max |(n+1)L_{n+1} - (2n+1-x)L_n + n L_{n-1}| / max |term| (inf if any value is not finite)."""
        L = self.values
        if not np.all(np.isfinite(L)):
            return math.inf
        if len(L) < 3:
            return 0.0
        n = np.arange(1, len(L) - 1, dtype=float)
        a = (n + 1) * L[2:]
        b = (2 * n + 1 - self.x) * L[1:-1]
        c = n * L[:-2]
        scale = np.maximum.reduce([np.abs(a), np.abs(b), np.abs(c)])
        # rows deep in the underflow range carry no relative precision
        scale = np.maximum(scale, 1e-280)
        return float(np.max(np.abs(a - b + c) / scale))


def laguerre_seq(n_max: int, x: float) -> LaguerreSeq:
    """L_0(x)..L_{n_max}(x) by upward recurrence, with derivatives.

    The raw values overflow for large x and n (use ``weighted_laguerre``
    there); overflow shows up as an infinite recurrence residual.
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    if x < 0:
        raise ValueError(f"Laguerre argument must be >= 0, got {x!r}")
    x = float(x)
    L = np.empty(n_max + 1)
    L[0] = 1.0
    if n_max >= 1:
        L[1] = 1.0 - x
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(1, n_max):
            L[n + 1] = ((2 * n + 1 - x) * L[n] - n * L[n - 1]) / (n + 1)
    n = np.arange(n_max + 1, dtype=float)
    dL = np.zeros(n_max + 1)
    if x == 0:
        dL = -n
    elif n_max >= 1:
        dL[1:] = n[1:] * (L[1:] - L[:-1]) / x
    return LaguerreSeq(x=x, values=L, derivatives=dL)


def weighted_laguerre(n_max: int, u: float) -> tuple[np.ndarray, np.ndarray]:
    """w_n = exp(-u/2) L_n(u) and dw_n/du for n = 0..n_max, as float arrays.

    The recurrence runs in long double with a running scale exponent, so the
    product stays finite even when L_n(u) alone would overflow.
    """
    if u < 0:
        raise ValueError(f"Laguerre argument must be >= 0, got {u!r}")
    u = LD(u)
    w = np.empty(n_max + 1)
    dw = np.empty(n_max + 1)
    lm1 = LD(0)
    l0 = LD(1)
    log_scale = -u / 2
    big = LD(1e300)
    for n in range(n_max + 1):
        fac = np.exp(log_scale)
        w[n] = float(l0 * fac)
        if n == 0:
            dl = LD(0)
        elif u == 0:
            dl = LD(-n) * l0
        else:
            dl = LD(n) * (l0 - lm1) / u
        dw[n] = float((dl - l0 / 2) * fac)
        lm1, l0 = l0, ((2 * n + 1 - u) * l0 - n * lm1) / (n + 1)
        if abs(l0) > big:
            lm1 /= big
            l0 /= big
            log_scale += np.log(big)
    return w, dw
