"""Physical constants (CODATA 2018, SI)."""

from dataclasses import dataclass

CONSTANTS_VERSION = "CODATA-2018"


@dataclass(frozen=True)
class PhysicalConstants:
    electron_mass: float = 9.1093837015e-31
    elementary_charge: float = 1.602176634e-19
    hbar: float = 1.054571817e-34

    def __post_init__(self):
        for name in ("electron_mass", "elementary_charge", "hbar"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


CODATA2018 = PhysicalConstants()

_active = CODATA2018


def constants() -> PhysicalConstants:
    return _active


def _override_for_tests(c: PhysicalConstants | None) -> None:
    """Swap the active constant set; ``None`` restores CODATA 2018.

    Only meant for unit tests that need round numbers.
    """
    global _active
    _active = CODATA2018 if c is None else c
