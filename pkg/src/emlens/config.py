"""Field configuration in SI units.

Parameters come in the units used for photodetachment experiments (emission
energy in micro-eV, electric force in eV/m, magnetic field in tesla) and are
converted once, here.  Everything downstream works in SI doubles.

Sign convention: the electric force has magnitude ``F`` and points along -z,
so electrons drift to negative z and the detector side is ``z < 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from .constants import PhysicalConstants, constants


class ConfigError(ValueError):
    """Invalid physical parameters or config file contents."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass(frozen=True)
class FieldConfig:
    E: float  # emission energy, J
    F: float  # electric force magnitude, N
    B: float  # magnetic field, T
    const: PhysicalConstants = field(default_factory=constants)

    def __post_init__(self):
        if not (math.isfinite(self.E) and self.E > 0):
            raise ConfigError("E", f"emission energy must be positive, got {self.E!r}")
        if not (math.isfinite(self.F) and self.F > 0):
            raise ConfigError("F", f"electric force must be positive, got {self.F!r}")
        if not (math.isfinite(self.B) and self.B >= 0):
            raise ConfigError("B", f"magnetic field must be non-negative, got {self.B!r}")

    @property
    def m(self) -> float:
        return self.const.electron_mass

    @property
    def hbar(self) -> float:
        return self.const.hbar

    @property
    def omega_L(self) -> float:
        """Larmor frequency eB/(2m) in rad/s (0 for B = 0)."""
        return self.const.elementary_charge * self.B / (2.0 * self.const.electron_mass)

    @property
    def p(self) -> float:
        return math.sqrt(2.0 * self.m * self.E)

    @property
    def beta(self) -> float:
        """Airy energy scale (m / (4 hbar^2 F^2))^(1/3), in 1/J."""
        return (self.m / (4.0 * self.hbar**2 * self.F**2)) ** (1.0 / 3.0)

    @property
    def hbar_omega_L(self) -> float:
        return self.hbar * self.omega_L

    @property
    def has_field(self) -> bool:
        return self.B > 0

    @property
    def T1(self) -> float:
        """First refocusing time pi/omega_L (inf for B = 0)."""
        return math.pi / self.omega_L if self.B > 0 else math.inf

    @property
    def rho_max(self) -> float:
        """Cyclotron radius p/(m omega_L) (inf for B = 0)."""
        return self.p / (self.m * self.omega_L) if self.B > 0 else math.inf

    def de_broglie(self, z: float) -> float:
        """Local de Broglie wavelength on the axis at height z."""
        kin = self.E - self.F * z
        if kin <= 0:
            kin = self.E
        return 2.0 * math.pi * self.hbar / math.sqrt(2.0 * self.m * kin)

    def to_input_units(self) -> dict[str, float]:
        e = self.const.elementary_charge
        return {"E_ueV": self.E / e * 1e6, "F_eV_per_m": self.F / e, "B_T": self.B}

    def describe(self) -> dict[str, float]:
        d = self.to_input_units()
        d.update(omega_L=self.omega_L, p=self.p, beta=self.beta, hbar_omega_L=self.hbar_omega_L)
        return d


def build_config(E_ueV: float, F_eV_per_m: float, B_T: float) -> FieldConfig:
    """Convert experimental units (micro-eV, eV/m, T) to a validated SI config."""
    for name, val in (("E_ueV", E_ueV), ("F_eV_per_m", F_eV_per_m)):
        if not (math.isfinite(val) and val > 0):
            raise ConfigError(name, f"must be positive, got {val!r}")
    if not (math.isfinite(B_T) and B_T >= 0):
        raise ConfigError("B_T", f"must be non-negative, got {B_T!r}")
    e = constants().elementary_charge
    return FieldConfig(E=E_ueV * 1e-6 * e, F=F_eV_per_m * e, B=float(B_T))


CONFIG_KEYS = ("E_ueV", "F_eV_per_m", "B_T")


def read_config_file(path: str | Path) -> dict[str, float]:
    """Parse a ``key=value`` file.  Blank lines and ``#`` comments are ignored."""
    values: dict[str, float] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected key=value, got {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(key, f"unknown key (allowed: {', '.join(CONFIG_KEYS)})")
        try:
            values[key] = float(val)
        except ValueError:
            raise ConfigError(key, f"not a number: {val!r}") from None
    return values


def load_config(path: str | Path) -> FieldConfig:
    vals = read_config_file(path)
    missing = [k for k in CONFIG_KEYS if k not in vals]
    if missing:
        raise ConfigError(missing[0], "missing from config file")
    return build_config(vals["E_ueV"], vals["F_eV_per_m"], vals["B_T"])


def write_config_file(cfg: FieldConfig, path: str | Path) -> None:
    d = cfg.to_input_units()
    Path(path).write_text("".join(f"{k}={d[k]!r}\n" for k in CONFIG_KEYS))


# parameter sets of the published figures
FIG1C = dict(E_ueV=100.5, F_eV_per_m=423.0, B_T=0.0)
FIG2 = dict(E_ueV=60.8, F_eV_per_m=116.0, B_T=1e-3)
