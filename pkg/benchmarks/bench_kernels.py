"""Compiled kernels versus the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

Times every kernel on inputs shaped like the production calls (a
200 x 400 map of the fourth resonance at 60.8 ueV, 116 eV/m, 1 mT)
and reports the largest relative difference between the two backends.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from emlens import _fallback
from emlens.classical import resonance_info
from emlens.config import FIG2, build_config

try:
    from emlens import _kernels
except ImportError:  # pragma: no cover
    _kernels = None


def _time(fn, args, repeat):
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def _maxrel(a, b):
    a = a if isinstance(a, tuple) else (a,)
    b = b if isinstance(b, tuple) else (b,)
    worst = 0.0
    for x, y in zip(a, b):
        x = np.asarray(x)
        y = np.asarray(y)
        if x.dtype == bool or y.dtype == bool:
            x, y = x.astype(int), y.astype(int)
        if x.shape != y.shape:
            return np.inf
        if x.size == 0:
            continue
        scale = np.maximum(np.abs(y), np.max(np.abs(y)) * 1e-300 + 1e-300)
        worst = max(worst, float(np.max(np.abs(x - y) / scale)))
    return worst


def cases():
    cfg = build_config(**FIG2)
    info = resonance_info(cfg, 4)
    rho = np.linspace(0.0, 2e-6, 200)
    z = np.linspace(info.z_k - 2e-3, info.z_k + 2e-3, 400)
    n1 = 1700
    m, hb, F, E, w = cfg.m, cfg.hbar, cfg.F, cfg.E, cfg.omega_L
    W, dW = _fallback.weighted_laguerre_rows(m, hb, w, rho, n1)
    P, dP = _fallback.landau_factors(m, hb, F, E, w, z, n1)
    R, Z = np.meshgrid(rho, z)
    r_flat, z_flat = R.ravel()[::20].copy(), Z.ravel()[::20].copy()
    offs, _, t, _, _ = _fallback.path_scan(m, F, E, w, r_flat, z_flat, 512)
    own = np.repeat(np.arange(r_flat.size), np.diff(offs))
    xs = np.linspace(-200.0, 100.0, 20001)
    return [
        ("airy_values", (xs,)),
        ("landau_ai", (m, hb, F, E, w, n1)),
        ("landau_factors", (m, hb, F, E, w, z, n1)),
        ("weighted_laguerre_rows", (m, hb, w, rho, n1)),
        ("series_reduce", (W, dW, P, dP)),
        ("path_scan", (m, F, E, w, r_flat, z_flat, 512)),
        ("path_phase", (m, hb, F, E, w, r_flat[own].copy(), z_flat[own].copy(), t)),
    ]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if _kernels is None:
        print("compiled extension not built; nothing to compare")
        return 1
    print(f"{'kernel':<24}{'compiled [s]':>14}{'numpy [s]':>12}{'speed-up':>10}{'max rel diff':>15}")
    for name, a in cases():
        tc, oc = _time(getattr(_kernels, name), a, args.repeat)
        tp, op = _time(getattr(_fallback, name), a, args.repeat)
        if name == "path_phase":
            # the reduced phase is compared modulo 2 pi by absolute difference
            diff = float(np.max(np.abs(np.angle(np.exp(1j * (oc[0] - op[0]))))))
            diff = max(diff, _maxrel(oc[1:], op[1:]))
        else:
            diff = _maxrel(oc, op)
        print(f"{name:<24}{tc:>14.4f}{tp:>12.4f}{tp / tc:>10.1f}{diff:>15.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
