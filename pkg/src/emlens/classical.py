"""Classical trajectories from the source, resonance geometry and caustics.

Equations of motion (launch angle theta from +z, speed p/m):

    rho(t, theta) = p sin(theta) |sin(omega_L t)| / (m omega_L)
    z(t, theta)   = p cos(theta) t / m - F t^2 / (2m)

For a destination (rho, z) the height equation gives the flight time as a
closed-form function of theta (one root below the source, two above), so the
search is one-dimensional: scan theta for sign changes of
rho(theta, t(theta)) - rho and bisect.  The scan grid always contains the
angles whose flight time is a refocusing time k pi / omega_L, so narrow root
pairs straddling a focal time are never stepped over.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_legendre

from . import backend
from .config import FieldConfig

N_THETA = 512


@dataclass(frozen=True)
class Trajectory:
    theta: float
    t: float
    branch: int  # +1 late time root, -1 early root (only above the source)
    S: float  # classical action S_cl(r, t; o, 0), J s
    phi: float  # S + E t, J s
    phase: float  # phi / hbar reduced to [0, 2 pi) in extended precision
    dphi_dt: float  # should vanish at a stationary point
    d2phi_dt2: float
    maslov: int  # number of refocusing times T_j passed, 0 < T_j < t
    near_turn: bool = False  # |cos theta| < 1e-10


def trajectory_state(cfg: FieldConfig, theta: float, t: float) -> tuple[float, float]:
    """(rho, z) reached at time t by the path launched at angle theta."""
    if not t > 0:
        raise ValueError("t must be positive")
    if not 0 <= theta <= math.pi:
        raise ValueError("theta must be in [0, pi]")
    p, m = cfg.p, cfg.m
    if cfg.has_field:
        w = cfg.omega_L
        rho = p * math.sin(theta) * abs(math.sin(w * t)) / (m * w)
    else:
        rho = p * math.sin(theta) * t / m
    z = p * math.cos(theta) * t / m - cfg.F * t * t / (2 * m)
    return rho, z


def _crossings(cfg: FieldConfig, t: np.ndarray) -> np.ndarray:
    if not cfg.has_field:
        return np.zeros(len(t), dtype=int)
    return np.floor(cfg.omega_L * np.asarray(t) / math.pi).astype(int)


@dataclass
class PathBatch:
    """Flat root arrays for many destinations; point i owns ``offsets[i]:offsets[i+1]``."""

    rho: np.ndarray
    z: np.ndarray
    offsets: np.ndarray
    theta: np.ndarray
    t: np.ndarray
    branch: np.ndarray
    overflow: np.ndarray
    phase: np.ndarray = field(default=None)
    phi: np.ndarray = field(default=None)
    dphi: np.ndarray = field(default=None)
    d2phi: np.ndarray = field(default=None)
    maslov: np.ndarray = field(default=None)

    @property
    def counts(self) -> np.ndarray:
        return np.diff(self.offsets)

    def owner(self) -> np.ndarray:
        """Index of the destination each root belongs to."""
        return np.repeat(np.arange(len(self.rho)), self.counts)


def scan_paths(cfg: FieldConfig, rho, z, n_theta: int = N_THETA, with_phase: bool = True) -> PathBatch:
    """All classical paths to each destination (vectorised over points)."""
    rho = np.ascontiguousarray(np.atleast_1d(rho), dtype=float)
    z = np.ascontiguousarray(np.atleast_1d(z), dtype=float)
    if rho.shape != z.shape:
        raise ValueError("rho and z must have the same shape")
    if (rho < 0).any():
        raise ValueError("rho must be >= 0")
    off, th, t, br, over = backend.get("path_scan")(cfg.m, cfg.F, cfg.E, cfg.omega_L, rho, z, n_theta)
    batch = PathBatch(rho, z, off, th, t, br, over)
    if with_phase:
        own = batch.owner()
        r_o = np.ascontiguousarray(rho[own])
        z_o = np.ascontiguousarray(z[own])
        phase, phi, dphi, d2phi = backend.get("path_phase")(cfg.m, cfg.hbar, cfg.F, cfg.E, cfg.omega_L, r_o, z_o, np.ascontiguousarray(t))
        batch.phase, batch.phi, batch.dphi, batch.d2phi = phase, phi, dphi, d2phi
        batch.maslov = _crossings(cfg, t)
    return batch


def find_paths(cfg: FieldConfig, rho: float, z: float, n_theta: int = N_THETA) -> list[Trajectory]:
    """Every classical path of energy E from the source to (rho, z), sorted by time."""
    if rho == 0 and z == 0:
        raise ValueError("destination coincides with the source")
    b = scan_paths(cfg, [rho], [z], n_theta)
    out = []
    for i in range(len(b.t)):
        out.append(
            Trajectory(
                theta=float(b.theta[i]),
                t=float(b.t[i]),
                branch=int(b.branch[i]),
                S=float(b.phi[i] - cfg.E * b.t[i]),
                phi=float(b.phi[i]),
                phase=float(b.phase[i]),
                dphi_dt=float(b.dphi[i]),
                d2phi_dt2=float(b.d2phi[i]),
                maslov=int(b.maslov[i]),
                near_turn=bool(abs(math.cos(b.theta[i])) < 1e-10),
            )
        )
    return sorted(out, key=lambda tr: tr.t)


def path_count_map(cfg: FieldConfig, grid, n_theta: int = N_THETA, pool=None):
    """Number of classical paths at every grid cell (FieldMap of ints)."""
    from .grid import FieldMap, parallel_cells

    R, Z = grid.mesh()

    def work(sl):
        b = scan_paths(cfg, R.ravel()[sl], Z.ravel()[sl], n_theta, with_phase=False)
        return b.counts

    counts = parallel_cells(work, R.size, pool)
    return FieldMap(grid, "paths", counts.reshape(R.shape))


# ------------------------------------------------------------------ resonances


@dataclass(frozen=True)
class ResonanceInfo:
    k: int
    T_k: float
    z_k: float
    width_AC: float
    length_BD: float
    rho_max: float
    overlapping: bool


def resonance_info(cfg: FieldConfig, k: int) -> ResonanceInfo:
    """Geometry of the k-th magnetic focus."""
    if not cfg.has_field:
        raise ValueError("resonances need B > 0")
    if int(k) != k or k < 1:
        raise ValueError(f"resonance index must be an integer >= 1, got {k!r}")
    k = int(k)
    m, p, F, w = cfg.m, cfg.p, cfg.F, cfg.omega_L
    T = k * math.pi / w
    e = cfg.const.elementary_charge
    return ResonanceInfo(
        k=k,
        T_k=T,
        z_k=-F * T * T / (2 * m),
        width_AC=cfg.E / F,
        length_BD=2 * k * math.pi * p / (w * m),
        rho_max=p / (m * w),
        overlapping=F / (p * cfg.B) < e / (math.pi * m),
    )


@dataclass(frozen=True)
class CausticCurve:
    k: int
    theta: np.ndarray
    rho: np.ndarray
    z: np.ndarray

    @property
    def branch(self) -> np.ndarray:
        """+1 for cos(theta) > 0 (upward launches), -1 otherwise."""
        return np.where(np.cos(self.theta) > 0, 1, -1)

    @property
    def samples(self) -> list[tuple[float, float, float]]:
        return list(zip(self.theta.tolist(), self.rho.tolist(), self.z.tolist()))


def caustic_point(cfg: FieldConfig, k: int, theta):
    """(rho, z) on the approximate caustic of resonance k at launch angle theta."""
    info = resonance_info(cfg, k)
    theta = np.asarray(theta, dtype=float)
    c = np.cos(theta)
    s = np.sin(theta)
    rho = (2 * cfg.E / cfg.F) * np.abs(s**3 / c)
    z = info.z_k + (cfg.p / cfg.m) * info.T_k * np.cos(2 * theta) / c
    return rho, z


def caustic_curve(cfg: FieldConfig, k: int, n_samples: int = 256, guard: float = 0.05) -> CausticCurve:
    """Both caustic branches of resonance k, skipping |theta - pi/2| < guard."""
    if n_samples < 16:
        raise ValueError("n_samples must be >= 16")
    if not 0 < guard < math.pi / 2:
        raise ValueError("guard must be in (0, pi/2)")
    half = n_samples // 2
    th = np.concatenate([
        np.linspace(0.0, math.pi / 2 - guard, half),
        np.linspace(math.pi / 2 + guard, math.pi, n_samples - half),
    ])
    rho, z = caustic_point(cfg, k, th)
    return CausticCurve(k, th, rho, z)


# ------------------------------------------------------------------ uncertainty


def classical_uncertainty_closed_form(cfg: FieldConfig) -> float:
    """(E/F) sqrt(32/45 m E): the classical focal-plane transverse action."""
    return cfg.E / cfg.F * math.sqrt(32.0 / 45.0 * cfg.m * cfg.E)


def _focal_plane_rho2(cfg: FieldConfig, k: int, n: int = 400):
    info = resonance_info(cfg, k)
    if info.overlapping:
        raise ValueError(f"resonance {k} overlaps its neighbours; the focal-plane average is not defined")
    x, w = roots_legendre(n)  # x = cos(theta), uniform for isotropic emission
    p, m, F, zk = cfg.p, cfg.m, cfg.F, info.z_k
    # arrival time at z_k, the single root below the source
    d = p * p * x * x - 2 * m * F * zk
    t = (p * x + np.sqrt(d)) / F
    s = np.sqrt(1 - x * x)
    rho = p * s * np.abs(np.sin(cfg.omega_L * t)) / (m * cfg.omega_L)
    vz = np.abs(p * x - F * t) / m
    return rho, w, vz


def classical_uncertainty(cfg: FieldConfig, k: int) -> tuple[float, float]:
    """(closed_form, numeric) classical sqrt(<rho^2> <p_perp^2>) at the k-th focus.

    ``numeric`` averages rho^2 over isotropic launches (uniform in cos theta),
    evaluating each path where it crosses the focal plane z_k; <p_perp^2> is
    (2/3) p^2 = (4/3) m E.
    """
    rho, w, _ = _focal_plane_rho2(cfg, k)
    r2 = 0.5 * float(np.sum(w * rho * rho))
    return classical_uncertainty_closed_form(cfg), math.sqrt(r2 * 4.0 / 3.0 * cfg.m * cfg.E)


def classical_uncertainty_density_weighted(cfg: FieldConfig, k: int) -> float:
    """Variant that weights each crossing by its dwell time 1/|v_z| (diagnostic)."""
    rho, w, vz = _focal_plane_rho2(cfg, k)
    ww = w / vz
    r2 = float(np.sum(ww * rho * rho) / np.sum(ww))
    return math.sqrt(r2 * 4.0 / 3.0 * cfg.m * cfg.E)
