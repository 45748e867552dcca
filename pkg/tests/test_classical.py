import math

import numpy as np
import pytest

from emlens.classical import (caustic_curve, caustic_point, classical_uncertainty,
                              classical_uncertainty_density_weighted, find_paths, path_count_map,
                              resonance_info, scan_paths, trajectory_state)
from emlens.grid import GridSpec
from emlens.observables import classical_radius
from emlens.selfcheck import sample_classical_points


def test_paths_land_on_target(fig2):
    pts = [(1e-6, -0.05), (2e-7, -0.208)] + sample_classical_points(fig2, 4, np.random.default_rng(3))
    for rho, z in pts:
        paths = find_paths(fig2, rho, z)
        assert paths
        for p in paths:
            r, zz = trajectory_state(fig2, p.theta, p.t)
            assert abs(r - rho) <= 1e-9 * max(rho, 1e-6)
            assert abs(zz - z) <= 1e-12 * abs(z) + 1e-15
            # stationarity of S + E t in t
            assert abs(p.dphi_dt) <= 1e-6 * fig2.E


def test_zero_field_two_paths_inside_none_outside(fig1c):
    for z in (-0.01, -0.1, -0.514):
        r = classical_radius(fig1c, z)
        assert len(find_paths(fig1c, 0.5 * r, z)) == 2
        assert len(find_paths(fig1c, 1.01 * r, z)) == 0
        assert all(p.maslov == 0 for p in find_paths(fig1c, 0.5 * r, z))


def test_paths_sorted_and_crossings_counted(fig2):
    paths = find_paths(fig2, 1e-6, -0.25)
    ts = [p.t for p in paths]
    assert ts == sorted(ts)
    for p in paths:
        assert p.maslov == math.floor(fig2.omega_L * p.t / math.pi)


def test_resonance_geometry_against_frozen(fig2, frozen):
    ref = frozen["resonance_fig2_k4"]
    info = resonance_info(fig2, 4)
    assert info.T_k == pytest.approx(float(ref["T_k"]), rel=1e-12)
    assert info.z_k == pytest.approx(float(ref["z_k"]), rel=1e-12)
    assert info.width_AC == pytest.approx(float(ref["AC"]), rel=1e-12)
    assert info.length_BD == pytest.approx(float(ref["BD"]), rel=1e-12)
    assert info.rho_max == pytest.approx(float(ref["rho_max"]), rel=1e-12)
    assert not info.overlapping
    # rounded values quoted for this configuration
    assert info.z_k == pytest.approx(-0.2083, abs=1e-4)
    assert info.width_AC == pytest.approx(0.524e-6, rel=1e-3)
    assert info.length_BD == pytest.approx(1.32e-3, rel=2e-3)


def test_resonance_argument_checks(fig2, fig1c):
    with pytest.raises(ValueError):
        resonance_info(fig2, 0)
    with pytest.raises(ValueError):
        resonance_info(fig2, 1.5)
    with pytest.raises(ValueError):
        resonance_info(fig1c, 1)


def test_caustic_curve_shape(fig2):
    info = resonance_info(fig2, 4)
    cc = caustic_curve(fig2, 4, n_samples=64)
    assert len(cc.samples) == 64
    assert set(np.unique(cc.branch)) == {-1, 1}
    # at theta -> 0 the caustic closes on the axis at the top of the focal segment
    rho0, z0 = caustic_point(fig2, 4, 1e-6)
    assert rho0 < 1e-20
    assert z0 == pytest.approx(info.z_k + info.length_BD / 2, rel=1e-9)


def test_path_count_changes_across_caustic(fig2):
    info = resonance_info(fig2, 4)
    th = 0.8
    rc, zc = caustic_point(fig2, 4, th)
    inside = scan_paths(fig2, [0.5 * rc], [zc], with_phase=False).counts[0]
    outside = scan_paths(fig2, [3.0 * rc], [zc], with_phase=False).counts[0]
    assert inside > outside
    assert inside % 2 == 0 and outside % 2 == 0
    assert info.z_k - info.length_BD < zc < info.z_k + info.length_BD


def test_path_count_map_even_counts(fig2):
    zk = resonance_info(fig2, 4).z_k
    grid = GridSpec(1e-7, 2e-6, zk - 1e-3, zk + 1e-3, 12, 14)
    fmap = path_count_map(fig2, grid)
    assert fmap.values.dtype.kind == "i"
    assert np.all(fmap.values % 2 == 0)
    assert fmap.values.max() >= 4


def test_classical_uncertainty_closed_form_and_quadrature(fig2, frozen):
    closed, numeric = classical_uncertainty(fig2, 4)
    assert closed / fig2.hbar == pytest.approx(float(frozen["resonance_fig2_k4"]["classical_uncertainty_over_hbar"]), rel=1e-12)
    assert numeric == pytest.approx(closed, rel=0.15)
    assert classical_uncertainty_density_weighted(fig2, 4) > 0


def test_trajectory_state_checks(fig2):
    with pytest.raises(ValueError):
        trajectory_state(fig2, 0.1, 0.0)
    with pytest.raises(ValueError):
        trajectory_state(fig2, 4.0, 1e-9)
    with pytest.raises(ValueError):
        find_paths(fig2, 0.0, 0.0)
