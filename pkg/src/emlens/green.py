"""Retarded Green function of a point source in parallel E and B fields.

Two independent routes:

* ``green_series`` -- the Landau-level expansion

      G(rho, z) = -(m^2 omega_L / (hbar^3 F beta)) exp(-u/2)
                  * sum_n L_n(u) Ci(x_<) Ai(x_>)

  with u = m omega_L rho^2 / hbar, a_n = 2 beta (hbar omega_L (2n+1) - E),
  x_n = a_n + 2 beta F z, and (x_<, x_>) = (x_n, a_n) below the source,
  (a_n, x_n) above it.  G solves (E - H) G = delta.

* ``green_time_integral`` -- the propagator integral

      G = (1 / i hbar) int_0^inf a(t) exp(i (S_cl + E t) / hbar) dt

  along a ray slightly below the real t axis.  It works for B = 0 as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from . import backend
from .config import FieldConfig
from .quadrature import QuadratureError, gk15
from .specfun import LD, PI

DEFAULT_TOL = 1e-8
MAX_TERMS = 400_000


class SeriesError(ArithmeticError):
    """The Landau series did not converge within the term budget."""

    def __init__(self, message: str, n: int):
        super().__init__(message)
        self.n = n


class OracleError(ArithmeticError):
    """The time-integral route failed to converge."""


@dataclass(frozen=True)
class ComplexField:
    g: complex
    dg_drho: complex
    dg_dz: complex

    def __iter__(self):
        return iter((self.g, self.dg_drho, self.dg_dz))


@dataclass(frozen=True)
class SeriesDiagnostics:
    n_open: int
    n_used: int
    tail_bound: float  # bound on the dropped terms, relative to |g|


def landau_channel_count(cfg: FieldConfig) -> int:
    """Number of open Landau channels, max{n : hbar omega_L (2n+1) < E} + 1."""
    if not cfg.has_field:
        raise ValueError("Landau channels need B > 0")
    hw = cfg.hbar_omega_L
    if hw >= cfg.E:
        return 0
    n = math.floor((cfg.E / hw - 1.0) / 2.0)
    # guard the floor against rounding at exact thresholds
    while hw * (2 * (n + 1) + 1) < cfg.E:
        n += 1
    while n >= 0 and not hw * (2 * n + 1) < cfg.E:
        n -= 1
    return n + 1


def series_prefactor(cfg: FieldConfig) -> float:
    """-(m^2 omega_L)/(hbar^3 F beta); note the overall minus sign."""
    return -(cfg.m**2 * cfg.omega_L) / (cfg.hbar**3 * cfg.F * cfg.beta)


def _a_stop(tol: float) -> float:
    # Ai(a) <= exp(-(2/3) a^1.5) / (2 sqrt(pi) a^0.25); aim well below tol
    return (1.5 * math.log(1.0 / (tol * 1e-4))) ** (2.0 / 3.0)


def _n_for_a(cfg: FieldConfig, a: float) -> int:
    """Smallest term count whose last a_n exceeds ``a``."""
    n = (a / (2 * cfg.beta) + cfg.E) / (2 * cfg.hbar_omega_L) - 0.5
    return max(int(math.ceil(n)) + 1, 1)


def _kernel_args(cfg: FieldConfig):
    return cfg.m, cfg.hbar, cfg.F, cfg.E, cfg.omega_L


def _beyond(absP: np.ndarray) -> np.ndarray:
    """Geometric estimate of sum_{n >= N} |P_n| from the last two computed terms."""
    last = absP[..., -1]
    prev = absP[..., -2]
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(prev > 0, last / prev, 0.0)
        return np.where(r < 1, last * r / (1 - r), np.inf)


def _check_series_args(cfg: FieldConfig, tol: float):
    if not cfg.has_field:
        raise ValueError("green_series needs B > 0; use green_time_integral for B = 0")
    if not (0 < tol <= 1e-3):
        raise ValueError(f"tol must be in (0, 1e-3], got {tol!r}")


def green_series(cfg: FieldConfig, rho: float, z: float, tol: float = DEFAULT_TOL):
    """G and its gradient from the Landau-level series, with truncation diagnostics."""
    _check_series_args(cfg, tol)
    rho = float(rho)
    z = float(z)
    if rho < 0:
        raise ValueError("rho must be >= 0")
    if rho == 0 and z == 0:
        raise ValueError("G is singular at the source point")
    n_open = landau_channel_count(cfg)
    a_first_closed = _n_for_a(cfg, 0.0)
    n_min = max(n_open, a_first_closed, 2)
    n1 = max(_n_for_a(cfg, _a_stop(tol)), n_min + 2)
    P_fn = backend.get("landau_factors")
    W_fn = backend.get("weighted_laguerre_rows")
    while True:
        P, dP = P_fn(*_kernel_args(cfg), np.array([z]), n1)
        W, dW = W_fn(cfg.m, cfg.hbar, cfg.omega_L, np.array([rho]), n1)
        P, dP, W, dW = P[0], dP[0], W[0], dW[0]
        terms = W * P
        S = np.cumsum(terms)
        absP = np.abs(P)
        beyond = float(_beyond(absP))
        # tail[N] = sum_{n >= N} |P_n| (|W_n| <= 1) plus the geometric remainder
        tail = np.cumsum(absP[::-1])[::-1] + beyond
        # keeping the first i+1 terms drops tail_after[i]
        tail_after = np.append(tail[1:], beyond)
        good = (np.arange(1, n1 + 1) >= n_min) & (tail_after <= tol * np.abs(S))
        if good.any():
            i = int(np.argmax(good))
            break
        if n1 >= MAX_TERMS:
            raise SeriesError(f"Landau series not converged after {n1} terms at (rho={rho}, z={z})", n1)
        n1 = min(int(n1 * 1.6) + 16, MAX_TERMS)
    k = i + 1
    pref = series_prefactor(cfg)
    g = pref * S[k - 1]
    gr = 0j if rho == 0 else pref * np.sum(dW[:k] * P[:k])
    gz = pref * np.sum(W[:k] * dP[:k])
    rel_tail = float(tail_after[i] / abs(S[i]))
    return (
        ComplexField(complex(g), complex(gr), complex(gz)),
        SeriesDiagnostics(n_open=n_open, n_used=k, tail_bound=rel_tail),
    )


@dataclass
class SeriesGrid:
    """G and gradients on a tensor grid; arrays are indexed [z, rho]."""

    g: np.ndarray
    dg_drho: np.ndarray
    dg_dz: np.ndarray
    n_open: int
    n_used: int
    tail_bound: np.ndarray  # relative, per cell


def green_series_grid(cfg: FieldConfig, rho, z, tol: float = DEFAULT_TOL, pool=None) -> SeriesGrid:
    """Evaluate the series on every (z_i, rho_j) of a tensor grid.

    The series separates into a radial factor W_n(rho) and an axial factor
    P_n(z), so each is computed once per grid line and the double sum is a
    fixed-order reduction.  ``pool`` (a ``concurrent.futures`` executor) may be
    given to split work over z rows; the term count is fixed globally so the
    result does not depend on how the rows are split.
    """
    _check_series_args(cfg, tol)
    rho = np.ascontiguousarray(rho, dtype=float)
    z = np.ascontiguousarray(z, dtype=float)
    if (rho < 0).any():
        raise ValueError("rho must be >= 0")
    n_open = landau_channel_count(cfg)
    n_min = max(n_open, _n_for_a(cfg, 0.0), 2)
    n1 = max(_n_for_a(cfg, _a_stop(tol)), n_min + 2)
    P_fn = backend.get("landau_factors")
    W_fn = backend.get("weighted_laguerre_rows")
    R_fn = backend.get("series_reduce")
    zchunks = _chunks(len(z), pool)

    while True:
        W, dW = W_fn(cfg.m, cfg.hbar, cfg.omega_L, rho, n1)

        def row_block(sl):
            P, dP = P_fn(*_kernel_args(cfg), np.ascontiguousarray(z[sl]), n1)
            g, gr, gz = R_fn(W, dW, P, dP)
            return g, gr, gz, _beyond(np.abs(P))

        parts = list(pool.map(row_block, zchunks)) if pool is not None else [row_block(s) for s in zchunks]
        g = np.concatenate([p[0] for p in parts])
        beyond = np.concatenate([p[3] for p in parts])
        with np.errstate(divide="ignore", invalid="ignore"):
            rel = beyond[:, None] / np.abs(g)
        if np.all(rel <= tol) or n1 >= MAX_TERMS:
            break
        # cells with |g| ~ 0 never satisfy a relative test; stop once the
        # remainder is below tol relative to the row scale
        row_scale = np.max(np.abs(g), axis=1)
        if np.all(beyond <= tol * 1e-3 * row_scale):
            break
        n1 = min(int(n1 * 1.6) + 16, MAX_TERMS)
    pref = series_prefactor(cfg)
    gr = np.concatenate([p[1] for p in parts])
    gz = np.concatenate([p[2] for p in parts])
    gr[:, rho == 0] = 0
    return SeriesGrid(pref * g, pref * gr, pref * gz, n_open, n1, rel)


def _chunks(n: int, pool) -> list[slice]:
    k = getattr(pool, "_max_workers", 1) if pool is not None else 1
    size = max(1, -(-n // max(1, 4 * k)))
    return [slice(i, min(i + size, n)) for i in range(0, n, size)]


def unitarity_series(cfg: FieldConfig, tol: float = 1e-14) -> float:
    """-(2/hbar) Im G(o, o): the total emission rate of a unit point source.

    On the source point every L_n(0) = 1 and Im[Ci(a_n)] Ai(a_n) = Ai(a_n)^2,
    so Im G(o, o) = -prefactor' sum_n Ai(a_n)^2 -- a rapidly convergent sum.
    """
    if not cfg.has_field:
        raise ValueError("unitarity series needs B > 0")
    n1 = _n_for_a(cfg, _a_stop(tol))
    _, ai = backend.get("landau_ai")(*_kernel_args(cfg), n1)
    im_g = series_prefactor(cfg) * float(np.sum(ai * ai))
    return -2.0 / cfg.hbar * im_g


# ---------------------------------------------------------------- time integral


def classical_time_window(cfg: FieldConfig, z: float) -> tuple[float, float]:
    """Shortest and longest flight times to height z (launch straight down / up)."""
    p, m, F = cfg.p, cfg.m, cfg.F
    d = p * p - 2 * m * F * z
    if z <= 0:
        sd = math.sqrt(d)
        tmin = -2 * m * z / (sd + p) if z < 0 else 0.0
        return tmin, (p + sd) / F
    if d <= 0:
        # classically forbidden height: centre the window on the turning time
        return 0.5 * p / F, 1.5 * p / F
    sd = math.sqrt(d)
    return 2 * m * z / (p + sd), (p + sd) / F


def default_rotation(cfg: FieldConfig, z: float, c_rot: float = 1.0) -> float:
    """Ray angle c * hbar / (E t_max), capped at pi/8.

    The rotated integrand grows like exp(alpha s E / hbar); for the field
    strengths of interest E t_max / hbar is 1e2..1e4, so fixed angles such as
    pi/16 make the integrand overflow.  With this choice the growth over the
    window is about e^c.
    """
    _, tmax = classical_time_window(cfg, z)
    return min(math.pi / 8, c_rot * cfg.hbar / (cfg.E * tmax))


def _reference_phase(cfg: FieldConfig, rho: float, z: float, t0: complex, eps: float):
    """(S(t0) + (E + i eps) t0) / hbar in 40-digit arithmetic, real part mod 2 pi."""
    with mpmath.workdps(40):
        m, hb, F, E, w = (mpmath.mpf(v) for v in (cfg.m, cfg.hbar, cfg.F, cfg.E, cfg.omega_L))
        rho, z = mpmath.mpf(rho), mpmath.mpf(z)
        t = mpmath.mpc(t0)
        S = m * z * z / (2 * t) - F * t * z / 2 - F * F * t**3 / (24 * m)
        if cfg.has_field:
            S += m * w / 2 * rho * rho * mpmath.cot(w * t)
        else:
            S += m * rho * rho / (2 * t)
        q = (S + (E + 1j * mpmath.mpf(eps)) * t) / hb
        re = mpmath.fmod(q.real, 2 * mpmath.pi)
        return LD(str(re)), LD(str(q.imag))


def _integrand_factory(cfg: FieldConfig, rho: float, z: float, alpha: float, eps: float, s0=None):
    """Integrand of the time integral and of its rho and z derivatives.

    With ``s0 = None`` the argument is s and t = s e^{-i alpha}; this form is
    only used to locate the support.  Otherwise the argument is the offset
    u and t = (s0 + u) e^{-i alpha}.  Far from the source the phase reaches
    ~1e10 rad, beyond what long double resolves to 1e-10 rad, so the phase
    at t0 = s0 e^{-i alpha} is taken once in high precision and only the
    difference S(t) - S(t0) is formed in long double, with every term
    carrying an explicit factor (t - t0).
    """
    m, hb, F, w = (LD(v) for v in (cfg.m, cfg.hbar, cfg.F, cfg.omega_L))
    E = LD(cfg.E)
    Ec = E + 1j * LD(eps)
    rho_l, z_l = LD(rho), LD(z)
    rot = np.exp(-1j * np.clongdouble(alpha))
    ph0 = np.exp(np.clongdouble(-3j) * PI / 4)
    inv_i_hbar = 1 / (np.clongdouble(1j) * hb)
    has_field = cfg.has_field
    if s0 is not None:
        t0 = LD(s0) * rot
        q0r, q0i = _reference_phase(cfg, rho, z, complex(t0), eps)
        if has_field:
            sn0 = np.sin(w * t0)

    def f(s):
        if s0 is None:
            t = np.asarray(s, dtype=LD) * rot
        else:
            d = np.asarray(s, dtype=LD) * rot
            t = t0 + d
        if has_field:
            sn = np.sin(w * t)
            cot = np.cos(w * t) / sn
            amp = ph0 * (m * w / (2 * PI * hb * sn)) * np.sqrt(m / (2 * PI * hb * t))
            dS_drho = m * w * rho_l * cot
        else:
            amp = ph0 * (m / (2 * PI * hb * t)) ** LD(1.5)
            dS_drho = m * rho_l / t
        dS_dz = m * z_l / t - F * t / 2
        if s0 is None:
            S = m * z_l * z_l / (2 * t) - F * t * z_l / 2 - F * F * t**3 / (24 * m)
            S = S + (m * w / 2 * rho_l * rho_l * cot if has_field else m * rho_l * rho_l / (2 * t))
            q = (S + Ec * t) / hb
        else:
            tt0 = t * t0
            dS = d * (-m * z_l * z_l / (2 * tt0) - F * z_l / 2 - F * F * (t * t + tt0 + t0 * t0) / (24 * m) + Ec)
            if has_field:
                # cot(wt) - cot(wt0) = -sin(w d) / (sin(wt) sin(wt0))
                dS = dS - m * w / 2 * rho_l * rho_l * np.sin(w * d) / (sn * sn0)
            else:
                dS = dS - d * m * rho_l * rho_l / (2 * tt0)
            q = q0r + 1j * q0i + dS / hb
        val = inv_i_hbar * amp * np.exp(1j * q) * rot
        ik = 1j / hb
        out = np.empty((len(s), 3), dtype=np.complex128)
        out[:, 0] = val.astype(np.complex128)
        out[:, 1] = (val * ik * dS_drho).astype(np.complex128)
        out[:, 2] = (val * ik * dS_dz).astype(np.complex128)
        return out

    return f


def _time_integral_once(cfg, rho, z, alpha, eps, rtol):
    f = _integrand_factory(cfg, rho, z, alpha, eps)
    tmin, tmax = classical_time_window(cfg, z)
    lo = 0.5 * tmin if tmin > 0 else 1e-3 * tmax
    hi = 1.5 * tmax
    # widen until the integrand has died off at both window ends
    for _ in range(12):
        s = np.linspace(lo, hi, 40001)
        mag = np.abs(f(s)[:, 0])
        if not np.all(np.isfinite(mag)):
            raise OracleError("rotated integrand overflowed; use a smaller rotation angle")
        peak = mag.max()
        if not peak > 0:
            raise OracleError(f"integrand underflows on the whole ray at (rho={rho}, z={z})")
        ok_lo = mag[0] <= 1e-30 * peak or lo <= 1e-6 * tmax
        ok_hi = mag[-1] <= 1e-30 * peak
        if ok_lo and ok_hi:
            break
        if not ok_lo:
            lo *= 0.5
        if not ok_hi:
            hi *= 1.5
    else:
        raise OracleError("could not bracket the support of the time integrand")
    keep = np.nonzero(mag > 1e-30 * peak)[0]
    lo2 = s[max(keep[0] - 1, 0)]
    hi2 = s[min(keep[-1] + 1, len(s) - 1)]
    breaks = []
    if cfg.has_field:
        # closest approach of the ray to the real-axis poles t = k T1
        k = np.arange(max(1, math.floor(lo2 / cfg.T1)), math.ceil(hi2 / cfg.T1) + 1)
        breaks = list(k * cfg.T1 * math.cos(alpha))
    s0 = 0.5 * (lo2 + hi2)
    fu = _integrand_factory(cfg, rho, z, alpha, eps, s0)
    try:
        res = gk15(fu, lo2 - s0, hi2 - s0, breaks=[b - s0 for b in breaks], rtol=rtol, noise=1e-10)
    except QuadratureError as exc:
        raise OracleError(f"time integral did not converge at (rho={rho}, z={z})") from exc
    return res.value


def green_time_integral(cfg: FieldConfig, rho: float, z: float, epsilon: float = 0.0,
                        rotation: float | None = None, tol: float = 1e-10, c_rot: float = 1.0) -> ComplexField:
    """G and gradient from the propagator integral on a rotated time ray.

    ``rotation`` defaults to ``default_rotation``.  With ``epsilon > 0`` the
    energy is shifted to E + i eps, E + i eps/2, E + i eps/4 and the results
    are Richardson-extrapolated to eps -> 0; the two extrapolants must agree
    to 100 * tol.  The rotation alone already makes the integral converge, so
    the default is eps = 0 and no extrapolation.  The gradient is computed by
    differentiating the phase under the integral sign.
    """
    rho = float(rho)
    z = float(z)
    if rho < 0:
        raise ValueError("rho must be >= 0")
    if rho == 0 and z == 0:
        raise ValueError("G is singular at the source point")
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    alpha = default_rotation(cfg, z, c_rot) if rotation is None else float(rotation)
    if not (0 < alpha <= math.pi / 8):
        raise ValueError(f"rotation must be in (0, pi/8], got {alpha!r}")
    if epsilon == 0:
        v = _time_integral_once(cfg, rho, z, alpha, 0.0, tol)
    else:
        e1, e2, e3 = (_time_integral_once(cfg, rho, z, alpha, epsilon / d, tol) for d in (1, 2, 4))
        r1 = 2 * e2 - e1
        r2 = 2 * e3 - e2
        if np.any(np.abs(r1 - r2) > 100 * tol * np.abs(r2) + 1e-300):
            raise OracleError(f"epsilon extrapolation not converged: {r1[0]} vs {r2[0]}")
        v = r2
    gr = 0j if rho == 0 else complex(v[1])
    return ComplexField(complex(v[0]), gr, complex(v[2]))
