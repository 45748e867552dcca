"""Pure numpy versions of the compiled kernels (same names, same signatures).

Selected when the extension is not built or ``EMLENS_BACKEND=python``.  All
arithmetic that feeds an oscillation phase is done in ``numpy.longdouble``.
"""

from __future__ import annotations

import numpy as np

from .specfun import LD, TWO_PI, airy_ld, airy_ld_scaled


def airy_values(x):
    ai, aip, bi, bip = airy_ld(np.asarray(x, dtype=float))
    return ai.astype(float), aip.astype(float), bi.astype(float), bip.astype(float)


def _two_beta(m, hbar, F):
    return 2 * np.cbrt(LD(m) / (4 * LD(hbar) * LD(hbar) * LD(F) * LD(F)))


def _a_n(m, hbar, F, E, omega, n1):
    n = np.arange(n1, dtype=LD)
    return _two_beta(m, hbar, F) * (LD(hbar) * LD(omega) * (2 * n + 1) - LD(E))


def landau_ai(m, hbar, F, E, omega, n1):
    a = _a_n(m, hbar, F, E, omega, n1)
    ai = airy_ld(a)[0]
    return a.astype(float), ai.astype(float)


def landau_factors(m, hbar, F, E, omega, z, n1):
    z = np.asarray(z, dtype=float)
    tb = _two_beta(m, hbar, F)
    a = _a_n(m, hbar, F, E, omega, n1)[None, :]
    x = a + tb * LD(F) * z.astype(LD)[:, None]
    upper = (z > 0)[:, None]
    xl = np.where(upper, a, x)
    xg = np.where(upper, x, a)
    shape = xl.shape
    l_ai, l_aip, l_bi, l_bip, zl = (v.reshape(shape) for v in airy_ld_scaled(xl.ravel()))
    g_ai, g_aip, _, _, zg = (v.reshape(shape) for v in airy_ld_scaled(xg.ravel()))
    eb = np.exp(zl - zg)
    ea = np.exp(-zl - zg)
    dfac = tb * LD(F)
    P = (l_bi * g_ai * eb).astype(float) + 1j * (l_ai * g_ai * ea).astype(float)
    dP_upper = (dfac * l_bi * g_aip * eb).astype(float) + 1j * (dfac * l_ai * g_aip * ea).astype(float)
    dP_lower = (dfac * l_bip * g_ai * eb).astype(float) + 1j * (dfac * l_aip * g_ai * ea).astype(float)
    dP = np.where(upper, dP_upper, dP_lower)
    return np.ascontiguousarray(P), np.ascontiguousarray(dP)


def weighted_laguerre_rows(m, hbar, omega, rho, n1):
    rho = np.asarray(rho, dtype=LD)
    u = LD(m) * LD(omega) * rho * rho / LD(hbar)
    dudr = 2 * LD(m) * LD(omega) * rho / LD(hbar)
    W = np.empty((len(rho), n1))
    dW = np.empty((len(rho), n1))
    lm1 = np.zeros_like(u)
    l0 = np.ones_like(u)
    fac = np.exp(-u / 2)
    big = LD(1e300)
    zero = u == 0
    safe_u = np.where(zero, LD(1), u)
    for n in range(n1):
        if n == 0:
            dl = np.zeros_like(u)
        else:
            dl = np.where(zero, -LD(n) * l0, LD(n) * (l0 - lm1) / safe_u)
        W[:, n] = (l0 * fac).astype(float)
        dW[:, n] = ((dl - l0 / 2) * fac * dudr).astype(float)
        lm1, l0 = l0, ((2 * n + 1 - u) * l0 - n * lm1) / (n + 1)
        over = np.abs(l0) > big
        if over.any():
            l0[over] /= big
            lm1[over] /= big
            fac[over] *= big
    return W, dW


def series_reduce(W, dW, P, dP):
    W = np.asarray(W)
    if W.shape[1] != P.shape[1] or dW.shape[1] != P.shape[1] or dP.shape[1] != P.shape[1]:
        raise ValueError("term counts differ between radial and axial factors")
    # explicit loop over n keeps the summation order identical to the compiled kernel
    nz, nn = P.shape
    nr = W.shape[0]
    sr = np.zeros((nz, nr))
    si = np.zeros((nz, nr))
    rr = np.zeros((nz, nr))
    ri = np.zeros((nz, nr))
    zr = np.zeros((nz, nr))
    zi = np.zeros((nz, nr))
    for n in range(nn):
        w = W[None, :, n]
        dw = dW[None, :, n]
        p = P[:, n, None]
        dp = dP[:, n, None]
        sr += w * p.real
        si += w * p.imag
        rr += dw * p.real
        ri += dw * p.imag
        zr += w * dp.real
        zi += w * dp.imag
    return sr + 1j * si, rr + 1j * ri, zr + 1j * zi


# ------------------------------------------------------------ classical paths


def _t_of(c, branch, p, m, F, z):
    """Arrival time for launch cosine c (arrays broadcast); NaN where invalid."""
    d = p * p * c * c - 2 * m * F * z
    with np.errstate(invalid="ignore", divide="ignore"):
        sd = np.sqrt(d)
        lower = np.where(c >= 0, (p * c + sd) / F, -2 * m * z / (sd - p * c))
        late = (p * c + sd) / F
        early = 2 * m * z / (p * c + sd)
    upper_t = late if branch > 0 else np.where(z == 0, np.nan, early)
    upper_t = np.where(c > 0, upper_t, np.nan)
    t = np.where(z < 0, lower, upper_t)
    return np.where(d >= 0, t, np.nan)


def _rho_of(theta, t, p, m, omega):
    if omega > 0:
        return p * np.sin(theta) * np.abs(np.sin(omega * t)) / (m * omega)
    return p * np.sin(theta) * t / m


def path_scan(m, F, E, omega, rho, z, n_theta=512, max_roots=64, chunk=1024):
    rho = np.asarray(rho, dtype=float)
    z = np.asarray(z, dtype=float)
    p = np.sqrt(2 * m * E)
    npt = len(rho)
    roots: list[list[tuple[float, float, int]]] = [[] for _ in range(npt)]
    over = np.zeros(npt, dtype=bool)
    pi = np.pi

    for s in range(0, npt, chunk):
        sl = slice(s, min(s + chunk, npt))
        r = rho[sl][:, None]
        zz = z[sl][:, None]
        lim = 2 * m * F * zz
        th_hi = np.where(zz > 0, np.arccos(np.sqrt(np.clip(lim, 0, None)) / p, where=lim < p * p, out=np.full_like(zz, np.nan)), pi)
        valid = ~np.isnan(th_hi[:, 0])
        for branch in (1, -1):
            if branch < 0 and not (zz > 0).any():
                continue
            u = np.linspace(0.0, 1.0, n_theta + 1)[None, :]
            th = th_hi * u
            extra = np.empty((th.shape[0], 0))
            if omega > 0:
                t0 = _t_of(np.cos(0.0) + 0 * zz, branch, p, m, F, zz)
                t1 = _t_of(np.cos(th_hi), branch, p, m, F, zz)
                tmin = np.clip(np.fmin(t0, t1), 0, None)
                tmax = np.fmax(t0, t1)
                kmin = np.floor(np.nan_to_num(tmin) * omega / pi)
                kmax = np.floor(np.nan_to_num(tmax) * omega / pi) + 1
                nk = int(np.nanmax(kmax - kmin) + 1) if len(kmin) else 0
                nk = min(nk, 4 * n_theta)
                k = kmin + np.arange(nk)[None, :]
                tk = k * pi / omega
                with np.errstate(invalid="ignore", divide="ignore"):
                    c = (zz + F * tk * tk / (2 * m)) * m / (p * tk)
                    thk = np.arccos(np.where((c >= -1) & (c <= 1) & (k >= 1) & (k <= kmax), c, np.nan))
                thk = np.where((thk > 0) & (thk < th_hi), thk, np.nan)
                extra = thk
            grid = np.sort(np.concatenate([th, extra], axis=1), axis=1)  # NaN sorts last
            t = _t_of(np.cos(grid), branch, p, m, F, zz)
            R = np.where(np.isnan(t), -r - 1.0, _rho_of(grid, t, p, m, omega) - r)
            R = np.where(np.isnan(grid), np.nan, R)
            neg = R < 0
            change = (neg[:, 1:] != neg[:, :-1]) & ~np.isnan(R[:, 1:]) & ~np.isnan(R[:, :-1])
            change &= (r[:, 0] > 0)[:, None]
            change &= valid[:, None]
            if branch < 0:
                change &= (zz[:, 0] > 0)[:, None]
            pi_idx, ci_idx = np.nonzero(change)
            if len(pi_idx) == 0:
                continue
            lo = grid[pi_idx, ci_idx].copy()
            hi = grid[pi_idx, ci_idx + 1].copy()
            ra_neg = neg[pi_idx, ci_idx]
            rb = r[pi_idx, 0]
            zb = zz[pi_idx, 0]
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                tm = _t_of(np.cos(mid), branch, p, m, F, zb)
                Rm = np.where(np.isnan(tm), -rb - 1.0, _rho_of(mid, tm, p, m, omega) - rb)
                same = (Rm < 0) == ra_neg
                lo = np.where(same, mid, lo)
                hi = np.where(same, hi, mid)
            mid = 0.5 * (lo + hi)
            tt = _t_of(np.cos(mid), branch, p, m, F, zb)
            for i_p, th_r, t_r in zip(pi_idx + s, mid, tt):
                if not (t_r > 0):
                    continue
                lst = roots[i_p]
                if any(abs(a - th_r) < 1e-9 and abs(b - t_r) < 1e-9 * t_r for a, b, _ in lst):
                    continue
                lst.append((th_r, t_r, branch))
        # on-axis destinations: the two axial launches
        for i_p in np.nonzero(rho[sl] == 0)[0] + s:
            for branch in ((1, -1) if z[i_p] > 0 else (1,)):
                for th_r in (0.0, pi):
                    tt = _t_of(np.array(np.cos(th_r)), branch, p, m, F, np.array(z[i_p]))
                    if tt > 0:
                        roots[i_p].append((th_r, float(tt), branch))

    counts = np.array([len(lst) for lst in roots], dtype=np.int64)
    over = counts > max_roots
    counts[over] = 0
    offsets = np.zeros(npt + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    flat = [x for lst, o in zip(roots, over) if not o for x in lst]
    theta = np.array([x[0] for x in flat], dtype=float)
    t = np.array([x[1] for x in flat], dtype=float)
    br = np.array([x[2] for x in flat], dtype=np.int8)
    return offsets, theta, t, br, over


def path_phase(m, hbar, F, E, omega, rho, z, t):
    M, f, e, h, w = (LD(v) for v in (m, F, E, hbar, omega))
    tt = np.asarray(t, dtype=LD)
    rr = np.asarray(rho, dtype=LD)
    zz = np.asarray(z, dtype=LD)
    S = M * zz * zz / (2 * tt) - f * tt * zz / 2 - f * f * tt**3 / (24 * M)
    dS = -M * zz * zz / (2 * tt * tt) - f * zz / 2 - f * f * tt * tt / (8 * M)
    d2S = M * zz * zz / tt**3 - f * f * tt / (4 * M)
    if omega > 0:
        s = np.sin(w * tt)
        c = np.cos(w * tt)
        S = S + M * w / 2 * rr * rr * c / s
        dS = dS - M * w * w / 2 * rr * rr / (s * s)
        d2S = d2S + M * w**3 * rr * rr * c / s**3
    else:
        S = S + M * rr * rr / (2 * tt)
        dS = dS - M * rr * rr / (2 * tt * tt)
        d2S = d2S + M * rr * rr / tt**3
    phi = e * tt + S
    return (
        np.fmod(phi / h, TWO_PI).astype(float),
        phi.astype(float),
        (e + dS).astype(float),
        d2S.astype(float),
    )
