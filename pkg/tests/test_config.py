import math

import pytest

from emlens.config import (CONFIG_KEYS, ConfigError, FieldConfig, build_config, load_config,
                           read_config_file, write_config_file)
from emlens.constants import CONSTANTS_VERSION, constants


def test_codata_values():
    c = constants()
    assert c.electron_mass == 9.1093837015e-31
    assert c.elementary_charge == 1.602176634e-19
    assert c.hbar == 1.054571817e-34
    assert CONSTANTS_VERSION == "CODATA-2018"


def test_unit_conversion_fig2(fig2):
    e = constants().elementary_charge
    assert fig2.E == pytest.approx(60.8e-6 * e, rel=1e-15)
    assert fig2.F == pytest.approx(116 * e, rel=1e-15)
    assert fig2.hbar_omega_L / e * 1e6 == pytest.approx(0.0579, abs=2e-4)
    back = fig2.to_input_units()
    assert back["E_ueV"] == pytest.approx(60.8, rel=1e-14)
    assert back["B_T"] == 1e-3


def test_beta_definition(fig2):
    b = fig2.beta
    assert b**3 == pytest.approx(fig2.m / (4 * fig2.hbar**2 * fig2.F**2), rel=1e-14)


def test_zero_field_limits(fig1c):
    assert fig1c.omega_L == 0.0
    assert not fig1c.has_field
    assert math.isinf(fig1c.T1) and math.isinf(fig1c.rho_max)


@pytest.mark.parametrize("kw, field", [
    (dict(E_ueV=0.0, F_eV_per_m=1.0, B_T=0.0), "E_ueV"),
    (dict(E_ueV=1.0, F_eV_per_m=-1.0, B_T=0.0), "F_eV_per_m"),
    (dict(E_ueV=1.0, F_eV_per_m=1.0, B_T=-1e-3), "B_T"),
    (dict(E_ueV=float("nan"), F_eV_per_m=1.0, B_T=0.0), "E_ueV"),
])
def test_invalid_parameters_name_the_field(kw, field):
    with pytest.raises(ConfigError) as exc:
        build_config(**kw)
    assert exc.value.field == field


def test_fieldconfig_validates_si_values():
    with pytest.raises(ConfigError):
        FieldConfig(E=1e-23, F=0.0, B=0.0)


def test_config_file_round_trip(tmp_path, fig2):
    p = tmp_path / "run.cfg"
    write_config_file(fig2, p)
    assert set(read_config_file(p)) == set(CONFIG_KEYS)
    again = load_config(p)
    assert again.E == pytest.approx(fig2.E, rel=1e-15)
    assert again.B == fig2.B


def test_config_file_errors(tmp_path):
    p = tmp_path / "bad.cfg"
    p.write_text("E_ueV = 10  # comment\nF_eV_per_m=abc\n")
    with pytest.raises(ConfigError) as exc:
        read_config_file(p)
    assert exc.value.field == "F_eV_per_m"
    p.write_text("E_ueV=10\nvoltage=3\n")
    with pytest.raises(ConfigError):
        read_config_file(p)
    p.write_text("E_ueV=10\nF_eV_per_m=100\n")
    with pytest.raises(ConfigError) as exc:
        load_config(p)
    assert exc.value.field == "B_T"


def test_de_broglie_shrinks_downstream(fig2):
    assert fig2.de_broglie(-0.2) < fig2.de_broglie(-0.01) < fig2.de_broglie(0.0)
