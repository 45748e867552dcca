"""Current density, detector profiles, emission rate and uncertainty products.

Current of a stationary state in the symmetric gauge A = (B/2) z_hat x r:

    j = (hbar/m) Im(conj(G) grad G) - (omega_L x r) |G|^2

For an axially symmetric G the azimuthal part is j_phi = -omega_L rho |G|^2.
The outward current is negative along z (the electric force pulls to -z), so
emission rates through a detector plane are -2 pi int j_z rho drho.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classical import classical_uncertainty, resonance_info
from .config import FieldConfig
from .green import ComplexField, green_series_grid, green_time_integral, unitarity_series
from .grid import FieldMap, GridSpec, parallel_cells
from .quadrature import QuadratureError, gk15
from .specfun import airy


class FluxError(ArithmeticError):
    def __init__(self, message: str, estimate: float | None = None):
        super().__init__(message)
        self.estimate = estimate


@dataclass(frozen=True)
class CurrentVector:
    j_rho: float
    j_phi: float
    j_z: float

    @property
    def magnitude(self) -> float:
        return math.sqrt(self.j_rho**2 + self.j_phi**2 + self.j_z**2)


def current_components(cfg: FieldConfig, g, dg_drho, dg_dz, rho):
    """Vectorised (j_rho, j_phi, j_z)."""
    g = np.asarray(g)
    c = cfg.hbar / cfg.m
    jr = c * np.imag(np.conj(g) * dg_drho)
    jz = c * np.imag(np.conj(g) * dg_dz)
    jphi = -cfg.omega_L * np.asarray(rho) * np.abs(g) ** 2
    return jr, jphi, jz


def current_density(cfg: FieldConfig, field: ComplexField, rho: float) -> CurrentVector:
    vals = (field.g, field.dg_drho, field.dg_dz)
    if not all(np.isfinite(complex(v)) for v in vals):
        raise ValueError("field components must be finite")
    jr, jphi, jz = current_components(cfg, field.g, field.dg_drho, field.dg_dz, rho)
    return CurrentVector(float(jr), float(jphi), float(jz))


# --------------------------------------------------------------- plane samples


def plane_fields(cfg: FieldConfig, z_plane: float, rho, tol: float = 1e-8, pool=None):
    """(g, dg_drho, dg_dz) along a plane of constant z."""
    rho = np.asarray(rho, dtype=float)
    if cfg.has_field:
        sg = green_series_grid(cfg, rho, [z_plane], tol=tol, pool=pool)
        return sg.g[0], sg.dg_drho[0], sg.dg_dz[0]

    def work(sl):
        out = np.empty((len(rho[sl]), 3), dtype=complex)
        for i, r in enumerate(rho[sl]):
            out[i] = tuple(green_time_integral(cfg, r, z_plane))
        return out

    res = parallel_cells(work, len(rho), pool, min_chunk=8)
    return res[:, 0], res[:, 1], res[:, 2]


def detector_profile(cfg: FieldConfig, z_plane: float, rho_grid, tol: float = 1e-8, pool=None):
    """[(rho, |j|, j_z)] along the detector plane."""
    if not z_plane < 0:
        raise ValueError("the detector plane must lie below the source (z < 0)")
    rho = np.asarray(rho_grid, dtype=float)
    g, gr, gz = plane_fields(cfg, z_plane, rho, tol, pool)
    jr, jphi, jz = current_components(cfg, g, gr, gz, rho)
    jmag = np.sqrt(jr**2 + jphi**2 + jz**2)
    return [(float(r), float(a), float(b)) for r, a, b in zip(rho, jmag, jz)]


def classical_radius(cfg: FieldConfig, z: float) -> float:
    """Largest distance from the axis a classical path reaches at height z."""
    ef = cfg.E / cfg.F
    if z > ef:
        return 0.0
    r = 2.0 * math.sqrt(ef * (ef - z))
    if cfg.has_field:
        r = min(r, cfg.rho_max)
    return r


def _support_cut(cfg: FieldConfig, z_plane: float, tol: float, rel: float = 1e-8, pool=None) -> float:
    """rho beyond which |g| stays below ``rel`` of its peak on the plane."""
    r_env = classical_radius(cfg, z_plane)
    r_scan = 1.5 * r_env + 20.0 / (cfg.beta * cfg.F)
    rho = np.linspace(0.0, r_scan, 1201)[1:]
    g, _, _ = plane_fields(cfg, z_plane, rho, tol, pool)
    a = np.abs(g)
    above = np.nonzero(a > rel * a.max())[0]
    cut = rho[min(above[-1] + 2, len(rho) - 1)]
    if above[-1] >= len(rho) - 3:
        raise FluxError(f"|g| has not decayed by rho = {r_scan:.3e} m on z = {z_plane}")
    return float(cut)


def total_flux(cfg: FieldConfig, z_plane: float, rtol: float = 1e-6, tol: float = 1e-10, pool=None) -> float:
    """Emission rate through the plane z = z_plane, -2 pi int j_z rho drho."""
    if not z_plane < 0:
        raise ValueError("the detector plane must lie below the source (z < 0)")
    cut = _support_cut(cfg, z_plane, tol, pool=pool)

    def f(rho):
        g, gr, gz = plane_fields(cfg, z_plane, rho, tol, pool)
        _, _, jz = current_components(cfg, g, gr, gz, rho)
        return -2 * math.pi * rho * jz

    try:
        res = gk15(f, 0.0, cut, n_init=256, rtol=rtol, noise=1e-13)
    except QuadratureError as exc:
        est = None if exc.estimate is None else float(np.real(exc.estimate[0]))
        raise FluxError(f"flux quadrature did not converge on z = {z_plane}", est) from exc
    return float(res.value[0])


def unitarity_flux(cfg: FieldConfig) -> float:
    """Emission rate from the source-point value -(2/hbar) Im G(o, o).

    For B = 0 the Landau sum becomes an integral over a, and
    int_x^inf Ai^2 = Ai'(x)^2 - x Ai(x)^2 gives it in closed form.
    """
    if cfg.has_field:
        return unitarity_series(cfg)
    x = -2.0 * cfg.beta * cfg.E
    a = airy(x)
    integral = a.ai_prime**2 - x * a.ai**2
    return cfg.m**2 / (2.0 * cfg.hbar**5 * cfg.F * cfg.beta**2) * integral


# ----------------------------------------------------------------- uncertainty


@dataclass(frozen=True)
class UncertaintyReport:
    energy: float
    k: int
    z_plane: float
    r2_mean: float
    p2_mean: float
    product: float
    classical_product: float  # closed-form focal-plane estimate
    classical_numeric: float  # isotropic average over the actual arrival points

    @property
    def spot_radius(self) -> float:
        return math.sqrt(self.r2_mean)


def uncertainty_product(cfg: FieldConfig, k: int, z_plane: float | None = None,
                        rtol: float = 1e-6, tol: float = 1e-10, pool=None) -> UncertaintyReport:
    """sqrt(<rho^2><p_perp^2>) of psi(rho) = G(rho, z_plane) on the k-th focal plane.

    Moments are |psi|^2-normalised over the plane; <p_perp^2> is the
    canonical transverse momentum hbar^2 <|d psi/d rho|^2>, which is the full
    transverse kinetic content for an azimuth-independent state up to the
    gauge term.  ``z_plane`` defaults to z_k.
    """
    if not cfg.has_field:
        raise ValueError("uncertainty product needs B > 0")
    info = resonance_info(cfg, k)
    if info.overlapping:
        raise ValueError(f"resonance {k} overlaps its neighbours")
    z = info.z_k if z_plane is None else float(z_plane)
    cut = _support_cut(cfg, z, tol, rel=1e-9, pool=pool)

    def f(rho):
        g, gr, _ = plane_fields(cfg, z, rho, tol, pool)
        a2 = np.abs(g) ** 2
        return np.stack([a2 * rho, a2 * rho**3, np.abs(gr) ** 2 * rho], axis=1)

    try:
        res = gk15(f, 0.0, cut, n_init=128, rtol=rtol, noise=1e-14)
    except QuadratureError as exc:
        raise FluxError("uncertainty quadrature did not converge") from exc
    norm, m2, d2 = (float(v) for v in res.value)
    r2 = m2 / norm
    p2 = cfg.hbar**2 * d2 / norm
    closed, numeric = classical_uncertainty(cfg, k)
    return UncertaintyReport(cfg.E, int(k), z, r2, p2, math.sqrt(r2 * p2), closed, numeric)


# ---------------------------------------------------------------------- maps


def quantum_current_map(cfg: FieldConfig, grid: GridSpec, quantity: str = "jmag",
                        tol: float = 1e-8, pool=None) -> FieldMap:
    """|j|, j_z or |g|^2 on a grid (series for B > 0, time integral for B = 0)."""
    if quantity not in ("jmag", "jz", "gsq"):
        raise ValueError("quantity must be jmag, jz or gsq")
    R, Z = grid.mesh()
    failures = 0
    if cfg.has_field:
        sg = green_series_grid(cfg, grid.rho, grid.z, tol=tol, pool=pool)
        g, gr, gz = sg.g, sg.dg_drho, sg.dg_dz
        bad = ~(sg.tail_bound <= tol) & ~np.isfinite(sg.tail_bound)
    else:
        r = R.ravel()
        zz = Z.ravel()

        def work(sl):
            out = np.full((len(r[sl]), 3), np.nan, dtype=complex)
            for i, (a, b) in enumerate(zip(r[sl], zz[sl])):
                try:
                    out[i] = tuple(green_time_integral(cfg, a, b))
                except (ArithmeticError, ValueError):
                    pass
            return out

        res = parallel_cells(work, r.size, pool, min_chunk=8).reshape(grid.n_z, grid.n_rho, 3)
        g, gr, gz = res[..., 0], res[..., 1], res[..., 2]
        bad = ~np.isfinite(g)
    jr, jphi, jz = current_components(cfg, g, gr, gz, R)
    if quantity == "jmag":
        vals = np.sqrt(jr**2 + jphi**2 + jz**2)
    elif quantity == "jz":
        vals = jz
    else:
        vals = np.abs(g) ** 2
    bad = bad | ~np.isfinite(vals)
    failures = int(bad.sum())
    vals = np.where(bad, 0.0, vals)
    return FieldMap(grid, quantity, vals, bad if failures else None, failures)
