import math

import numpy as np
import pytest

from emlens.classical import resonance_info
from emlens.config import build_config
from emlens.green import ComplexField, green_series, green_time_integral
from emlens.grid import GridSpec
from emlens.observables import (classical_radius, current_components, current_density,
                                detector_profile, quantum_current_map, total_flux,
                                uncertainty_product, unitarity_flux)


def test_current_components_definition(fig2):
    g = 2.0 + 1.0j
    jr, jphi, jz = current_components(fig2, g, 1j, 3.0 + 0j, 1e-6)
    c = fig2.hbar / fig2.m
    assert jr == pytest.approx(c * 2.0)
    assert jz == pytest.approx(c * -3.0)
    assert jphi == pytest.approx(-fig2.omega_L * 1e-6 * 5.0)


def test_zero_field_has_no_azimuthal_current(fig1c):
    f = green_time_integral(fig1c, 1e-4, -0.1)
    j = current_density(fig1c, f, 1e-4)
    assert j.j_phi == 0.0
    assert j.j_z < 0  # downwards, away from the source
    assert j.magnitude == pytest.approx(math.hypot(j.j_rho, j.j_z))


def test_current_density_rejects_non_finite(fig2):
    with pytest.raises(ValueError):
        current_density(fig2, ComplexField(complex("nan"), 0j, 0j), 0.0)


def test_magnetic_current_circulates(fig2):
    f, _ = green_series(fig2, 1e-6, -0.05)
    j = current_density(fig2, f, 1e-6)
    assert j.j_phi < 0 and j.j_z < 0


def test_zero_field_unitarity_against_frozen(fig1c, frozen):
    assert unitarity_flux(fig1c) == pytest.approx(float(frozen["unitarity_b0_fig1c"]), rel=1e-11)


def test_unitarity_continuous_in_field():
    weak = build_config(60.8, 116.0, 1e-7)
    none = build_config(60.8, 116.0, 0.0)
    assert unitarity_flux(weak) == pytest.approx(unitarity_flux(none), rel=1e-3)


def test_flux_through_plane_equals_source_rate(fig2):
    u = unitarity_flux(fig2)
    assert total_flux(fig2, -0.12) == pytest.approx(u, rel=1e-6)


def test_flux_rejects_planes_above_source(fig2):
    with pytest.raises(ValueError):
        total_flux(fig2, 0.01)
    with pytest.raises(ValueError):
        detector_profile(fig2, 0.0, [0.0, 1e-6])


def test_classical_radius(fig1c, fig2):
    h = fig1c.E / fig1c.F
    assert classical_radius(fig1c, -0.514) == pytest.approx(2 * math.sqrt(h * (h + 0.514)))
    assert classical_radius(fig1c, 2 * h) == 0.0
    assert classical_radius(fig2, -0.2) == fig2.rho_max


def test_uncertainty_bounded_below_and_classical_at_high_energy():
    low = uncertainty_product(build_config(2.0, 116.0, 1e-3), 4)
    assert low.product >= build_config(2.0, 116.0, 1e-3).hbar
    assert low.product / low.classical_product > 1.0
    high_cfg = build_config(200.0, 116.0, 1e-3)
    high = uncertainty_product(high_cfg, 4)
    assert high.product == pytest.approx(high.classical_product, rel=0.15)
    assert high.spot_radius > low.spot_radius
    assert high.z_plane == resonance_info(high_cfg, 4).z_k


def test_uncertainty_needs_field(fig1c):
    with pytest.raises(ValueError):
        uncertainty_product(fig1c, 1)


def test_quantum_map_quantities(fig2):
    zk = resonance_info(fig2, 4).z_k
    grid = GridSpec(0.0, 1e-6, zk - 1e-4, zk + 1e-4, 5, 4)
    gsq = quantum_current_map(fig2, grid, "gsq")
    jz = quantum_current_map(fig2, grid, "jz")
    jm = quantum_current_map(fig2, grid, "jmag")
    assert gsq.values.shape == (4, 5) and np.all(gsq.values > 0)
    assert np.all(jm.values >= np.abs(jz.values) * (1 - 1e-12))
    with pytest.raises(ValueError):
        quantum_current_map(fig2, grid, "phase")


def test_zero_field_profile_and_map(fig1c):
    prof = detector_profile(fig1c, -0.1, np.linspace(0.0, 2e-4, 5))
    assert len(prof) == 5 and all(jz < 0 for _, _, jz in prof)
    grid = GridSpec(0.0, 1e-4, -0.101, -0.1, 3, 2)
    fmap = quantum_current_map(fig1c, grid)
    assert fmap.failures == 0 and np.all(fmap.values > 0)
