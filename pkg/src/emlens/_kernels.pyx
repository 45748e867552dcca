# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops (x87 long double inside, float64/complex128 at the boundary).

Every function here has a numpy twin with the same name and signature in
``emlens._fallback``; ``emlens.backend`` picks one at import time.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, sin, cos, fabs, floor, acos
from libc.stdlib cimport malloc, free

cnp.import_array()

ctypedef long double ld

cdef extern from "math.h" nogil:
    long double sqrtl(long double)
    long double cbrtl(long double)
    long double expl(long double)
    long double sinl(long double)
    long double cosl(long double)
    long double fmodl(long double, long double)
    long double fabsl(long double)

cdef ld AI0, AIP0, SQRT3, PI_L, TWO_PI_L, SQRT_PI_L, AI10, AIP10
AI0 = <ld>0.3550280538878172 + <ld>2.05233632436212e-17
AIP0 = <ld>0.2588194037928068 + <ld>(-2.522243111610832e-17)
SQRT3 = <ld>1.7320508075688772 + <ld>1.0035084221806903e-16
PI_L = <ld>3.141592653589793 + <ld>1.2246467991473532e-16
TWO_PI_L = <ld>6.283185307179586 + <ld>2.4492935982947064e-16
SQRT_PI_L = <ld>1.772453850905516 + <ld>(-7.666586499825799e-17)
AI10 = <ld>1.1047532552898686e-10 + <ld>(-7.711912802715521e-28)
AIP10 = <ld>(-3.5206336767389237e-10) + <ld>5.975810321396732e-27

DEF NCOEF = 40
DEF NTAYLOR = 160
cdef ld U_C[NCOEF]
cdef ld V_C[NCOEF]
cdef ld TAY[NTAYLOR]


cdef void _init_tables():
    cdef int k
    U_C[0] = 1
    V_C[0] = 1
    for k in range(1, NCOEF):
        U_C[k] = U_C[k - 1] * <ld>((6 * k - 5) * (6 * k - 3) * (6 * k - 1)) / <ld>((2 * k - 1) * 216 * k)
        V_C[k] = -<ld>(6 * k + 1) / <ld>(6 * k - 1) * U_C[k]
    TAY[0] = AI10
    TAY[1] = AIP10
    for k in range(2, NTAYLOR):
        TAY[k] = (<ld>10 * TAY[k - 2] + (TAY[k - 3] if k >= 3 else <ld>0)) / <ld>(k * (k - 1))


_init_tables()


cdef void _maclaurin(ld x, ld* out) noexcept nogil:
    cdef ld x2 = x * x
    cdef ld x3 = x2 * x
    cdef ld f = 1, g = x, fp = 0, gp = 1, tf = 1, tg = x
    cdef int k
    for k in range(1, 90):
        fp += tf * x2 / <ld>(3 * k - 1)
        gp += tg * x2 / <ld>(3 * k)
        tf = tf * x3 / <ld>((3 * k - 1) * (3 * k))
        tg = tg * x3 / <ld>((3 * k) * (3 * k + 1))
        f += tf
        g += tg
        if k > 3 and fabsl(tf) <= 1e-22 * fabsl(f) and fabsl(tg) <= 1e-22 * fabsl(g):
            break
    out[0] = AI0 * f - AIP0 * g
    out[1] = AI0 * fp - AIP0 * gp
    out[2] = SQRT3 * (AI0 * f + AIP0 * g)
    out[3] = SQRT3 * (AI0 * fp + AIP0 * gp)


cdef void _taylor_ai(ld x, ld* out) noexcept nogil:
    cdef ld h = x - 10
    cdef ld val = TAY[0] + TAY[1] * h
    cdef ld der = TAY[1]
    cdef ld hk1 = h
    cdef ld term
    cdef int k
    for k in range(2, NTAYLOR):
        der += <ld>k * TAY[k] * hk1
        hk1 = hk1 * h
        term = TAY[k] * hk1
        val += term
        if k > 20 and fabsl(term) <= 1e-23 * fabsl(val):
            break
    out[0] = val
    out[1] = der


cdef void _asym_pos_scaled(ld x, ld* out, ld* zeta) noexcept nogil:
    # out = (Ai e^z, Ai' e^z, Bi e^-z, Bi' e^-z), zeta = (2/3) x^1.5
    cdef ld r = sqrtl(x)
    cdef ld z = <ld>2 / 3 * x * r
    cdef ld q = sqrtl(r)
    cdef ld inv = 1 / z
    cdef ld sa = 0, sp = 0, ta = 0, tp = 0, pw = 1, sg = 1
    cdef int k
    for k in range(25):
        sa += sg * U_C[k] * pw
        sp += U_C[k] * pw
        ta += sg * V_C[k] * pw
        tp += V_C[k] * pw
        pw = pw * inv
        sg = -sg
        if U_C[k] * pw < 1e-24:
            break
    out[0] = sa / (2 * SQRT_PI_L * q)
    out[1] = -q * ta / (2 * SQRT_PI_L)
    out[2] = sp / (SQRT_PI_L * q)
    out[3] = q * tp / SQRT_PI_L
    zeta[0] = z


cdef void _asym_neg(ld X, ld* out) noexcept nogil:
    # argument -X, X >= 8; the oscillation phase is reduced mod 2 pi in long double
    cdef ld r = sqrtl(X)
    cdef ld z = <ld>2 / 3 * X * r
    cdef ld q = sqrtl(r)
    cdef ld inv = 1 / z
    cdef ld P = 0, Q = 0, R = 0, S = 0, pw = 1, last = 1e300, term, sg
    cdef int k
    for k in range(NCOEF):
        term = U_C[k] * pw
        if term >= last or term < 1e-24:
            break
        sg = 1 if (k // 2) % 2 == 0 else -1
        if k % 2 == 0:
            P += sg * term
            R += sg * V_C[k] * pw
        else:
            Q += sg * term
            S += sg * V_C[k] * pw
        last = term
        pw = pw * inv
    cdef ld ph = fmodl(z, TWO_PI_L)
    cdef ld c1 = cosl(ph + PI_L / 4), s1 = sinl(ph + PI_L / 4)
    cdef ld c2 = cosl(ph - PI_L / 4), s2 = sinl(ph - PI_L / 4)
    cdef ld A = 1 / (SQRT_PI_L * q)
    cdef ld Ad = q / SQRT_PI_L
    out[0] = A * (P * s1 - Q * c1)
    out[1] = Ad * (R * s2 - S * c2)
    out[2] = A * (P * c1 + Q * s1)
    out[3] = Ad * (R * c2 + S * s2)


cdef void airy_scaled(ld x, ld* out, ld* zeta) noexcept nogil:
    """(Ai, Ai', Bi, Bi'); for x > 10 Ai-parts carry e^zeta and Bi-parts e^-zeta."""
    zeta[0] = 0
    if x < -8:
        _asym_neg(-x, out)
    elif x <= 10:
        _maclaurin(x, out)
        if x > 5:
            _taylor_ai(x, out)
    else:
        _asym_pos_scaled(x, out, zeta)


cdef inline void airy_plain(ld x, ld* out) noexcept nogil:
    cdef ld zeta
    airy_scaled(x, out, &zeta)
    if zeta != 0:
        out[0] *= expl(-zeta)
        out[1] *= expl(-zeta)
        out[2] *= expl(zeta)
        out[3] *= expl(zeta)


def airy_values(double[::1] x):
    """Ai, Ai', Bi, Bi' at each x (float64 out)."""
    cdef Py_ssize_t n = x.shape[0], i
    res = np.empty((4, n))
    cdef double[:, ::1] r = res
    cdef ld out[4]
    with nogil:
        for i in range(n):
            airy_plain(<ld>x[i], out)
            r[0, i] = <double>out[0]
            r[1, i] = <double>out[1]
            r[2, i] = <double>out[2]
            r[3, i] = <double>out[3]
    return res[0], res[1], res[2], res[3]


cdef inline ld _two_beta(double m, double hbar, double F) noexcept nogil:
    return 2 * cbrtl(<ld>m / (4 * <ld>hbar * <ld>hbar * <ld>F * <ld>F))


def landau_ai(double m, double hbar, double F, double E, double omega, Py_ssize_t n1):
    """a_n = 2 beta (hbar omega (2n+1) - E) and Ai(a_n) for n < n1."""
    a_out = np.empty(n1)
    ai_out = np.empty(n1)
    cdef double[::1] av = a_out, aiv = ai_out
    cdef ld tb = _two_beta(m, hbar, F)
    cdef ld hw = <ld>hbar * <ld>omega
    cdef ld a
    cdef ld out[4]
    cdef Py_ssize_t n
    with nogil:
        for n in range(n1):
            a = tb * (hw * (2 * n + 1) - <ld>E)
            airy_plain(a, out)
            av[n] = <double>a
            aiv[n] = <double>out[0]
    return a_out, ai_out


def landau_factors(double m, double hbar, double F, double E, double omega,
                   double[::1] z, Py_ssize_t n1):
    """P[i, n] = Ci(x_<) Ai(x_>) and dP/dz for x = a_n and a_n + 2 beta F z_i.

    Ci = Bi + i Ai.  For z <= 0 that is Ci(a_n + 2 beta F z) Ai(a_n); above the
    source the arguments swap.  Exponential factors of large positive
    arguments are combined before exponentiating, so the product stays finite.
    """
    cdef Py_ssize_t nz = z.shape[0], i, n
    P = np.empty((nz, n1), dtype=np.complex128)
    dP = np.empty((nz, n1), dtype=np.complex128)
    cdef double complex[:, ::1] Pv = P, dPv = dP
    cdef ld tb = _two_beta(m, hbar, F)
    cdef ld hw = <ld>hbar * <ld>omega
    cdef ld a, x, xl, xg, zl, zg, eb, ea, sh, dfac
    cdef ld ol[4]
    cdef ld og[4]
    cdef bint upper
    with nogil:
        for i in range(nz):
            sh = tb * <ld>F * <ld>z[i]
            upper = z[i] > 0
            for n in range(n1):
                a = tb * (hw * (2 * n + 1) - <ld>E)
                x = a + sh
                if upper:
                    xl = a
                    xg = x
                else:
                    xl = x
                    xg = a
                airy_scaled(xl, ol, &zl)
                airy_scaled(xg, og, &zg)
                # Ci(xl) Ai(xg): Bi(xl) carries e^{+zl}, Ai(xl) e^{-zl}, Ai(xg) e^{-zg}
                eb = expl(zl - zg)
                ea = expl(-zl - zg)
                dfac = tb * <ld>F
                if upper:
                    Pv[i, n] = <double>(ol[2] * og[0] * eb) + 1j * <double>(ol[0] * og[0] * ea)
                    dPv[i, n] = <double>(dfac * ol[2] * og[1] * eb) + 1j * <double>(dfac * ol[0] * og[1] * ea)
                else:
                    Pv[i, n] = <double>(ol[2] * og[0] * eb) + 1j * <double>(ol[0] * og[0] * ea)
                    dPv[i, n] = <double>(dfac * ol[3] * og[0] * eb) + 1j * <double>(dfac * ol[1] * og[0] * ea)
    return P, dP


def weighted_laguerre_rows(double m, double hbar, double omega, double[::1] rho, Py_ssize_t n1):
    """W[j, n] = exp(-u/2) L_n(u), u = m omega rho_j^2 / hbar, and dW/drho."""
    cdef Py_ssize_t nr = rho.shape[0], j, n
    W = np.empty((nr, n1))
    dW = np.empty((nr, n1))
    cdef double[:, ::1] Wv = W, dWv = dW
    cdef ld u, dudr, lm1, l0, l1, fac, dl, big = 1e300
    with nogil:
        for j in range(nr):
            u = <ld>m * <ld>omega * <ld>rho[j] * <ld>rho[j] / <ld>hbar
            dudr = 2 * <ld>m * <ld>omega * <ld>rho[j] / <ld>hbar
            lm1 = 0
            l0 = 1
            fac = expl(-u / 2)
            for n in range(n1):
                if n == 0:
                    dl = 0
                elif u == 0:
                    dl = -<ld>n * l0
                else:
                    dl = <ld>n * (l0 - lm1) / u
                Wv[j, n] = <double>(l0 * fac)
                dWv[j, n] = <double>((dl - l0 / 2) * fac * dudr)
                l1 = ((2 * n + 1 - u) * l0 - n * lm1) / (n + 1)
                lm1 = l0
                l0 = l1
                if fabsl(l0) > big:
                    l0 = l0 / big
                    lm1 = lm1 / big
                    fac = fac * big
    return W, dW


def series_reduce(double[:, ::1] W, double[:, ::1] dW,
                  double complex[:, ::1] P, double complex[:, ::1] dP):
    """Sum over n of W*P, dW*P, W*dP for every (z_i, rho_j); fixed summation order."""
    cdef Py_ssize_t nz = P.shape[0], nr = W.shape[0], nn = P.shape[1], i, j, n
    if W.shape[1] != nn or dW.shape[1] != nn or dP.shape[1] != nn:
        raise ValueError("term counts differ between radial and axial factors")
    g = np.empty((nz, nr), dtype=np.complex128)
    gr = np.empty((nz, nr), dtype=np.complex128)
    gz = np.empty((nz, nr), dtype=np.complex128)
    cdef double complex[:, ::1] gv = g, grv = gr, gzv = gz
    cdef double sr, si, rr, ri, zr, zi, w, dw
    cdef double complex p, dp
    with nogil:
        for i in range(nz):
            for j in range(nr):
                sr = 0; si = 0; rr = 0; ri = 0; zr = 0; zi = 0
                for n in range(nn):
                    w = W[j, n]
                    dw = dW[j, n]
                    p = P[i, n]
                    dp = dP[i, n]
                    sr += w * p.real
                    si += w * p.imag
                    rr += dw * p.real
                    ri += dw * p.imag
                    zr += w * dp.real
                    zi += w * dp.imag
                gv[i, j] = sr + 1j * si
                grv[i, j] = rr + 1j * ri
                gzv[i, j] = zr + 1j * zi
    return g, gr, gz


# ------------------------------------------------------------ classical paths

cdef struct PathParams:
    double m
    double F
    double p
    double omega
    double rho
    double z


cdef inline double _t_of(PathParams* P, double c, int branch) noexcept nogil:
    # arrival time for launch cosine c; branch +1 late root, -1 early root (z > 0 only)
    cdef double d = P.p * P.p * c * c - 2 * P.m * P.F * P.z
    if d < 0:
        return -1.0
    cdef double sd = sqrt(d)
    if P.z < 0:
        if c >= 0:
            return (P.p * c + sd) / P.F
        return -2 * P.m * P.z / (sd - P.p * c)
    if c <= 0:
        return -1.0
    if branch > 0:
        return (P.p * c + sd) / P.F
    if P.z == 0:
        return -1.0
    return 2 * P.m * P.z / (P.p * c + sd)


cdef inline double _rho_of(PathParams* P, double theta, double t) noexcept nogil:
    if P.omega > 0:
        return P.p * sin(theta) * fabs(sin(P.omega * t)) / (P.m * P.omega)
    return P.p * sin(theta) * t / P.m


cdef inline double _resid(PathParams* P, double theta, int branch) noexcept nogil:
    cdef double t = _t_of(P, cos(theta), branch)
    if t <= 0:
        return -P.rho - 1.0  # outside the branch domain: treat as "below"
    return _rho_of(P, theta, t) - P.rho


cdef int _scan_point(PathParams* P, int n_theta, int max_roots,
                     double* th_out, double* t_out, signed char* br_out, double* th_s) noexcept nogil:
    """Roots (theta, t) of rho(theta, t(theta)) = rho on each time branch. Returns count, -1 on overflow."""
    cdef int nb = 2 if P.z > 0 else 1
    cdef int b, branch, i, ns, cnt = 0, it, k, kmin, kmax, jj
    cdef double th_lo = 0, th_hi = acos(-1.0), lim, c, tk, tmin, tmax, ta, tb2, ra, rb, lo, hi, mid, rm, tt, thr
    cdef double sd
    if P.z > 0:
        lim = 2 * P.m * P.F * P.z
        if lim >= P.p * P.p:
            return 0
        th_hi = acos(sqrt(lim) / P.p)
    if P.rho == 0:
        # on-axis launches, plus nothing else that is a regular stationary point
        for b in range(nb):
            branch = 1 if b == 0 else -1
            for i in range(2):
                thr = 0.0 if i == 0 else acos(-1.0)
                if thr > th_hi:
                    continue
                tt = _t_of(P, cos(thr), branch)
                if tt > 0:
                    if cnt >= max_roots:
                        return -1
                    th_out[cnt] = thr
                    t_out[cnt] = tt
                    br_out[cnt] = branch
                    cnt += 1
        return cnt
    for b in range(nb):
        branch = 1 if b == 0 else -1
        # uniform samples in theta plus the focal angles where t(theta) = k pi / omega
        ns = 0
        for i in range(n_theta + 1):
            th_s[ns] = th_lo + (th_hi - th_lo) * i / n_theta
            ns += 1
        if P.omega > 0:
            ta = _t_of(P, cos(th_lo), branch)
            tb2 = _t_of(P, cos(th_hi), branch)
            tmin = ta if ta < tb2 else tb2
            tmax = ta if ta > tb2 else tb2
            if tmin <= 0:
                tmin = 0
            kmin = <int>floor(tmin * P.omega / acos(-1.0))
            kmax = <int>floor(tmax * P.omega / acos(-1.0)) + 1
            for k in range(kmin, kmax + 1):
                if k < 1 or ns >= n_theta + 1 + 4 * n_theta:
                    continue
                tk = k * acos(-1.0) / P.omega
                # z = p c tk / m - F tk^2 / (2m)  ->  c
                c = (P.z + P.F * tk * tk / (2 * P.m)) * P.m / (P.p * tk)
                if c >= -1 and c <= 1:
                    thr = acos(c)
                    if thr > th_lo and thr < th_hi:
                        th_s[ns] = thr
                        ns += 1
            # insertion sort of the appended focal angles
            for i in range(n_theta + 1, ns):
                thr = th_s[i]
                jj = i - 1
                while jj >= 0 and th_s[jj] > thr:
                    th_s[jj + 1] = th_s[jj]
                    jj -= 1
                th_s[jj + 1] = thr
        ra = _resid(P, th_s[0], branch)
        for i in range(1, ns):
            rb = _resid(P, th_s[i], branch)
            if (ra < 0) != (rb < 0):
                lo = th_s[i - 1]
                hi = th_s[i]
                rm = ra
                for it in range(80):
                    mid = 0.5 * (lo + hi)
                    if mid <= lo or mid >= hi:
                        break
                    if (_resid(P, mid, branch) < 0) == (ra < 0):
                        lo = mid
                    else:
                        hi = mid
                mid = 0.5 * (lo + hi)
                tt = _t_of(P, cos(mid), branch)
                if tt > 0:
                    # merge with a root already found on the other branch (they meet at th_hi)
                    jj = 0
                    for k in range(cnt):
                        if fabs(th_out[k] - mid) < 1e-9 and fabs(t_out[k] - tt) < 1e-9 * tt:
                            jj = 1
                    if not jj:
                        if cnt >= max_roots:
                            return -1
                        th_out[cnt] = mid
                        t_out[cnt] = tt
                        br_out[cnt] = branch
                        cnt += 1
            ra = rb
    return cnt


def path_scan(double m, double F, double E, double omega,
              double[::1] rho, double[::1] z, int n_theta=512, int max_roots=64):
    """Classical paths to each (rho_i, z_i).

    Returns (offsets, theta, t, branch, overflow): roots of point i are
    ``offsets[i]:offsets[i+1]``; ``overflow[i]`` is set when more than
    ``max_roots`` roots were found (the list is then truncated to zero).
    """
    cdef Py_ssize_t npt = rho.shape[0], i
    cdef int cap = max_roots
    th_all = np.empty(npt * cap)
    t_all = np.empty(npt * cap)
    br_all = np.empty(npt * cap, dtype=np.int8)
    counts = np.zeros(npt, dtype=np.int64)
    over = np.zeros(npt, dtype=np.bool_)
    cdef double[::1] thv = th_all, tv = t_all
    cdef signed char[::1] brv = br_all
    cdef long long[::1] cv = counts
    cdef cnp.npy_bool[::1] ov = over
    cdef double* work = <double*>malloc(sizeof(double) * (5 * n_theta + 8))
    if work == NULL:
        raise MemoryError()
    cdef PathParams P
    cdef int c
    P.m = m
    P.F = F
    P.p = sqrt(2 * m * E)
    P.omega = omega
    try:
        with nogil:
            for i in range(npt):
                P.rho = rho[i]
                P.z = z[i]
                c = _scan_point(&P, n_theta, cap, &thv[i * cap], &tv[i * cap], &brv[i * cap], work)
                if c < 0:
                    ov[i] = 1
                    c = 0
                cv[i] = c
    finally:
        free(work)
    offsets = np.zeros(npt + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    sel = (np.arange(cap)[None, :] < counts[:, None]).ravel()
    return offsets, th_all[sel], t_all[sel], br_all[sel], over


def path_phase(double m, double hbar, double F, double E, double omega,
               double[::1] rho, double[::1] z, double[::1] t):
    """Reduced phase (E t + S_cl)/hbar mod 2 pi, Phi, Phi', Phi'' along the constraint."""
    cdef Py_ssize_t n = t.shape[0], i
    res = np.empty((4, n))
    cdef double[:, ::1] r = res
    cdef ld w = omega, M = m, f = F, e = E, h = hbar
    cdef ld tt, rr, zz, s, c, S, dS, d2S
    with nogil:
        for i in range(n):
            tt = t[i]
            rr = rho[i]
            zz = z[i]
            S = M * zz * zz / (2 * tt) - f * tt * zz / 2 - f * f * tt * tt * tt / (24 * M)
            dS = -M * zz * zz / (2 * tt * tt) - f * zz / 2 - f * f * tt * tt / (8 * M)
            d2S = M * zz * zz / (tt * tt * tt) - f * f * tt / (4 * M)
            if w > 0:
                s = sinl(w * tt)
                c = cosl(w * tt)
                S += M * w / 2 * rr * rr * c / s
                dS -= M * w * w / 2 * rr * rr / (s * s)
                d2S += M * w * w * w * rr * rr * c / (s * s * s)
            else:
                S += M * rr * rr / (2 * tt)
                dS -= M * rr * rr / (2 * tt * tt)
                d2S += M * rr * rr / (tt * tt * tt)
            r[0, i] = <double>fmodl((e * tt + S) / h, TWO_PI_L)
            r[1, i] = <double>(e * tt + S)
            r[2, i] = <double>(e + dS)
            r[3, i] = <double>d2S
    return res[0], res[1], res[2], res[3]
