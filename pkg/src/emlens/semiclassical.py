"""Stationary-phase evaluation of the propagator integral over classical paths.

Each classical path j (flight time t_j, stationary in t for the phase
Phi(t) = E t + S_cl) contributes

    (1 / i hbar) a(t_j) sqrt(2 pi hbar / |Phi''|) exp(i Phi/hbar + i sgn(Phi'') pi/4 - i pi mu_j)

with a(t) built from |sin(omega_L t)| and mu_j the number of refocusing times
T_k = k pi / omega_L passed before t_j (each a two-dimensional focus).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classical import N_THETA, PathBatch, scan_paths
from .config import FieldConfig
from .grid import FieldMap, GridSpec, parallel_cells
from .observables import current_components

MASLOV_CONVENTIONS = ("standard", "flipped", "no-crossing")
CAUSTIC_RATIO = 1e-3
# a path is too close to a refocusing time when the stationary-phase width
# sqrt(hbar/|Phi''|) is not small against the distance to the nearest T_k
FOCAL_RATIO = 0.5


@dataclass
class SemiclassicalValue:
    g_sc: complex
    contributions: list[complex]
    caustic_flag: bool
    focal_flag: bool = False


def _prefactor_abs(cfg: FieldConfig, t: np.ndarray) -> np.ndarray:
    """|a(t)| / hbar with |sin| (the sign goes into the crossing phase)."""
    m, hb = cfg.m, cfg.hbar
    if cfg.has_field:
        w = cfg.omega_L
        return m * w / (2 * math.pi * hb * np.abs(np.sin(w * t))) * np.sqrt(m / (2 * math.pi * hb * t)) / hb
    return (m / (2 * math.pi * hb * t)) ** 1.5 / hb


def path_contributions(cfg: FieldConfig, batch: PathBatch, maslov: str = "standard") -> np.ndarray:
    """Complex amplitude of every root in ``batch``."""
    if maslov not in MASLOV_CONVENTIONS:
        raise ValueError(f"maslov must be one of {MASLOV_CONVENTIONS}")
    if len(batch.t) == 0:
        return np.zeros(0, dtype=complex)
    d2 = batch.d2phi
    sg = np.sign(d2)
    if maslov == "flipped":
        sg = -sg
    crossing = np.zeros_like(batch.phase) if maslov == "no-crossing" else -math.pi * batch.maslov
    # (1/i) e^{-3 i pi/4} = e^{-i 5 pi/4}
    phase = batch.phase + sg * math.pi / 4 + crossing - 1.25 * math.pi
    amp = _prefactor_abs(cfg, batch.t) * np.sqrt(2 * math.pi * cfg.hbar / np.abs(d2))
    return amp * np.exp(1j * phase)


def _curvature_scale(cfg: FieldConfig, rho, z, t) -> np.ndarray:
    """Sum of the magnitudes of the terms making up Phi''(t)."""
    m, F = cfg.m, cfg.F
    s = m * z * z / t**3 + F * F * t / (4 * m)
    if cfg.has_field:
        w = cfg.omega_L
        s = s + m * w**3 * rho * rho * np.abs(np.cos(w * t) / np.sin(w * t) ** 3)
    else:
        s = s + m * rho * rho / t**3
    return s


def _focal_closeness(cfg: FieldConfig, batch: PathBatch) -> np.ndarray:
    """sqrt(hbar/|Phi''|) divided by the distance to the nearest refocusing time."""
    if not cfg.has_field or len(batch.t) == 0:
        return np.zeros(len(batch.t))
    T1 = cfg.T1
    k = np.rint(batch.t / T1)
    dist = np.abs(batch.t - k * T1)
    dist = np.where(k >= 1, dist, np.inf)
    width = np.sqrt(cfg.hbar / np.abs(batch.d2phi))
    with np.errstate(divide="ignore"):
        return width / dist


def semiclassical_batch(cfg: FieldConfig, rho, z, maslov: str = "standard", n_theta: int = N_THETA):
    """g_sc at many points.

    Returns (g, min_abs_d2phi, min_cancellation_ratio, max_focal_closeness, n_paths);
    the per-point minima are +inf where there are no paths.
    """
    b = scan_paths(cfg, rho, z, n_theta)
    contrib = path_contributions(cfg, b, maslov)
    npt = len(b.rho)
    g = np.zeros(npt, dtype=complex)
    own = b.owner()
    np.add.at(g, own, contrib)
    absd2 = np.abs(b.d2phi) if len(b.t) else np.zeros(0)
    ratio = absd2 / _curvature_scale(cfg, b.rho[own], b.z[own], b.t) if len(b.t) else np.zeros(0)
    focal = _focal_closeness(cfg, b)
    min_d2 = np.full(npt, np.inf)
    min_ratio = np.full(npt, np.inf)
    max_focal = np.zeros(npt)
    np.minimum.at(min_d2, own, absd2)
    np.minimum.at(min_ratio, own, ratio)
    np.maximum.at(max_focal, own, focal)
    # on the axis inside a focal segment the paths form a continuum
    on_axis_focus = (b.rho == 0) & _on_focal_segment(cfg, b.z)
    max_focal[on_axis_focus] = np.inf
    return g, min_d2, min_ratio, max_focal, b.counts


def _on_focal_segment(cfg: FieldConfig, z) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    if not cfg.has_field:
        return np.zeros(z.shape, dtype=bool)
    # z(T_k, theta) spans z_k -/+ p T_k / m
    p, m, F, T1 = cfg.p, cfg.m, cfg.F, cfg.T1
    # largest k whose segment could reach z
    kmax = int(math.ceil(math.sqrt(2 * m * max(1e-300, float(np.max(np.abs(z)) + 1)) / F) / T1)) + 2
    out = np.zeros(z.shape, dtype=bool)
    for k in range(1, kmax + 1):
        T = k * T1
        zk = -F * T * T / (2 * m)
        out |= np.abs(z - zk) <= p * T / m
    return out


def semiclassical_green(cfg: FieldConfig, rho: float, z: float, maslov: str = "standard",
                        caustic_tol: float | None = None) -> SemiclassicalValue:
    """Sum of stationary-phase contributions of all classical paths to (rho, z).

    ``caustic_flag`` is raised when some path has |Phi''| below ``caustic_tol``
    or, when no absolute tolerance is given, when Phi'' is smaller than 1e-3
    of the magnitude of the terms it is made of (near-total cancellation).
    ``focal_flag`` marks points whose paths pass within a stationary-phase
    width of a refocusing time, where a(t) itself varies too fast for the
    method (thin sheath around the axial focal segments).
    """
    if rho == 0 and z == 0:
        raise ValueError("destination coincides with the source")
    b = scan_paths(cfg, [rho], [z])
    contrib = path_contributions(cfg, b, maslov)
    if caustic_tol is None:
        ratio = np.abs(b.d2phi) / _curvature_scale(cfg, rho, z, b.t) if len(b.t) else np.zeros(0)
        flag = bool((ratio < CAUSTIC_RATIO).any())
    else:
        flag = bool((np.abs(b.d2phi) < caustic_tol).any())
    focal = bool((_focal_closeness(cfg, b) > FOCAL_RATIO).any()) or bool(rho == 0 and _on_focal_segment(cfg, z))
    return SemiclassicalValue(complex(contrib.sum()), [complex(c) for c in contrib], flag, focal)


def semiclassical_current_map(cfg: FieldConfig, grid: GridSpec, maslov: str = "standard",
                              pool=None, step_wavelengths: float = 1e-3, use_focal_mask: bool = True) -> FieldMap:
    """|j| from g_sc with central-difference gradients; caustic cells are masked.

    A cell is masked when any path to it (or to its difference-stencil
    neighbours) has |Phi''| < 1e-3 * median |Phi''| over the window, and --
    with ``use_focal_mask`` -- when a path lies within a stationary-phase
    width of a refocusing time.
    """
    R, Z = grid.mesh()
    r = R.ravel()
    zz = Z.ravel()
    lam = np.array([cfg.de_broglie(v) for v in grid.z])
    h_rows = step_wavelengths * lam
    H = np.repeat(h_rows, grid.n_rho)

    def work(sl):
        rs, zs, hs = r[sl], zz[sl], H[sl]
        # stencil: centre, rho+h, rho-h (mirrored through the axis), z+h, z-h
        rp = rs + hs
        rm = np.abs(rs - hs)
        zp = zs + hs
        zm = zs - hs
        pts_r = np.concatenate([rs, rp, rm, rs, rs])
        pts_z = np.concatenate([zs, zs, zs, zp, zm])
        g, d2, ratio, focal, npaths = semiclassical_batch(cfg, pts_r, pts_z, maslov)
        n = len(rs)
        g0, gp, gm, gzp, gzm = (g[i * n:(i + 1) * n] for i in range(5))
        # g is even in rho, so g(|rho - h|) = g(rho - h) and the central
        # difference holds right up to the axis (where it gives exactly 0)
        dgr = (gp - gm) / (rp - (rs - hs))
        dgz = (gzp - gzm) / (zp - zm)
        d2 = d2.reshape(5, n).min(axis=0)
        focal = focal.reshape(5, n).max(axis=0)
        return np.stack([g0.real, g0.imag, dgr.real, dgr.imag, dgz.real, dgz.imag, d2, focal, npaths[:n]], axis=1)

    res = parallel_cells(work, r.size, pool)
    res = res.reshape(grid.n_z, grid.n_rho, 9)
    g = res[..., 0] + 1j * res[..., 1]
    gr = res[..., 2] + 1j * res[..., 3]
    gz = res[..., 4] + 1j * res[..., 5]
    d2 = res[..., 6]
    focal = res[..., 7]
    jr, jphi, jz = current_components(cfg, g, gr, gz, R)
    jmag = np.sqrt(jr**2 + jphi**2 + jz**2)
    finite_d2 = d2[np.isfinite(d2)]
    med = float(np.median(finite_d2)) if finite_d2.size else 0.0
    mask = d2 < CAUSTIC_RATIO * med
    if use_focal_mask:
        mask |= focal > FOCAL_RATIO
    mask |= ~np.isfinite(jmag)
    return FieldMap(grid, "jmag_semiclassical", np.where(np.isfinite(jmag), jmag, 0.0), mask)
