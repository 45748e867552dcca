"""Regenerate ``frozen.json``: reference values computed without the package's numerics.

    python3 tests/oracles/generate.py

Everything here is evaluated with mpmath at 30+ digits from the defining
formulas; the package is imported only for the CODATA constants and the
unit conversion of the field configurations.  The test-suite reads the frozen
file and never recomputes these values.
"""

from __future__ import annotations

import json
from pathlib import Path

import mpmath as mp

from emlens.config import FIG1C, FIG2, build_config

OUT = Path(__file__).with_name("frozen.json")
mp.mp.dps = 40


def params(cfg):
    return {k: mp.mpf(v) for k, v in dict(m=cfg.m, hbar=cfg.hbar, F=cfg.F, E=cfg.E, B=cfg.B,
                                            e=cfg.const.elementary_charge).items()}


def beta(P):
    return mp.cbrt(P["m"] / (4 * P["hbar"] ** 2 * P["F"] ** 2))


def ci(x, d=0):
    return mp.airybi(x, d) + 1j * mp.airyai(x, d)


def closed_form_b0(P, rho, z):
    """Uniform-field point-source Green function (parabolic-coordinate product form)."""
    b = beta(P)
    r = mp.sqrt(mp.mpf(rho) ** 2 + mp.mpf(z) ** 2)
    xp = b * P["F"] * (z + r) - 2 * b * P["E"]
    xm = b * P["F"] * (z - r) - 2 * b * P["E"]
    return -P["m"] / (2 * P["hbar"] ** 2 * r) * (ci(xm, 1) * mp.airyai(xp) - ci(xm) * mp.airyai(xp, 1))


def landau_series(P, rho, z, n_max):
    """Direct 40-digit sum of the Landau-level series (B > 0, z <= 0)."""
    b = beta(P)
    w = P["e"] * P["B"] / (2 * P["m"])
    hw = P["hbar"] * w
    u = P["m"] * w * mp.mpf(rho) ** 2 / P["hbar"]
    pref = -(P["m"] ** 2 * w) / (P["hbar"] ** 3 * P["F"] * b)
    s = mp.mpc(0)
    Lm, L = mp.mpf(0), mp.mpf(1)
    for n in range(n_max):
        a = 2 * b * (hw * (2 * n + 1) - P["E"])
        x = a + 2 * b * P["F"] * z
        s += L * ci(x) * mp.airyai(a)
        Lm, L = L, ((2 * n + 1 - u) * L - n * Lm) / (n + 1)
    return pref * mp.exp(-u / 2) * s


def cplx(v):
    return [mp.nstr(mp.re(v), 25), mp.nstr(mp.im(v), 25)]


def main():
    out = {}
    xs = [-200, -60.5, -25, -8.0, -4.5, -1.0, 0.0, 0.7, 3.3, 4.5, 5.0, 7.5, 10.0, 12.5, 30.0, 80.0]
    out["airy"] = {str(x): [mp.nstr(mp.airyai(x), 25), mp.nstr(mp.airyai(x, 1), 25),
                            mp.nstr(mp.airybi(x), 25), mp.nstr(mp.airybi(x, 1), 25)] for x in xs}

    lag = {}
    for n, u in [(0, 3.0), (7, 0.25), (50, 10.0), (400, 300.0), (2000, 4000.0), (5000, 10000.0), (5000, 19000.0)]:
        # exp(-u/2) L_n(u) directly from the hypergeometric representation
        lag[f"{n},{u}"] = mp.nstr(mp.exp(-mp.mpf(u) / 2) * mp.laguerre(n, 0, u), 25)
    out["weighted_laguerre"] = lag

    c1 = build_config(**FIG1C)
    P1 = params(c1)
    b0 = {}
    for rho, z in [(0.0, -0.514), (1e-4, -0.514), (2.1e-4, -0.514), (6.3e-4, -0.514), (3e-5, -0.05), (0.0, -0.001)]:
        b0[f"{rho},{z}"] = cplx(closed_form_b0(P1, rho, z))
    out["green_b0_fig1c"] = b0
    b1 = beta(P1)
    x0 = -2 * b1 * P1["E"]
    flux = P1["m"] ** 2 / (2 * P1["hbar"] ** 5 * P1["F"] * b1**2) * (mp.airyai(x0, 1) ** 2 - x0 * mp.airyai(x0) ** 2)
    out["unitarity_b0_fig1c"] = mp.nstr(flux, 25)
    out["delta_phi_fig1c"] = mp.nstr(mp.mpf(4) / 3 * mp.sqrt(2 * P1["m"]) * P1["E"] ** 1.5 / (P1["F"] * P1["hbar"]), 25)

    c2 = build_config(**FIG2)
    P2 = params(c2)
    w = P2["e"] * P2["B"] / (2 * P2["m"])
    T4 = 4 * mp.pi / w
    out["resonance_fig2_k4"] = {
        "T_k": mp.nstr(T4, 20),
        "z_k": mp.nstr(-P2["F"] * T4**2 / (2 * P2["m"]), 20),
        "AC": mp.nstr(P2["E"] / P2["F"], 20),
        "BD": mp.nstr(2 * 4 * mp.pi * mp.sqrt(2 * P2["m"] * P2["E"]) / (w * P2["m"]), 20),
        "rho_max": mp.nstr(mp.sqrt(2 * P2["m"] * P2["E"]) / (P2["m"] * w), 20),
        "n_open": int(mp.floor(P2["E"] / (2 * P2["hbar"] * w) - mp.mpf(1) / 2)) + 1,
        "classical_uncertainty_over_hbar": mp.nstr(P2["E"] / P2["F"] * mp.sqrt(mp.mpf(32) / 45 * P2["m"] * P2["E"]) / P2["hbar"], 20),
    }
    series = {}
    for rho, z, n in [(1e-6, -0.05, 2000), (0.0, -0.2, 2000)]:
        series[f"{rho},{z}"] = cplx(landau_series(P2, rho, z, n))
    out["green_series_fig2"] = series
    OUT.write_text(json.dumps(out, indent=1) + "\n")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
