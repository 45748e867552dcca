"""Electron currents from a point source in parallel electric and magnetic fields.

Quantum (Landau-level series and propagator time integral), semiclassical
(sum over classical paths) and classical (trajectory counting, caustics)
descriptions of a monochromatic isotropic point emitter.
"""

from .backend import BACKEND
from .classical import (CausticCurve, ResonanceInfo, Trajectory, caustic_curve, classical_uncertainty,
                        find_paths, path_count_map, resonance_info)
from .config import ConfigError, FieldConfig, build_config, load_config
from .constants import CONSTANTS_VERSION, PhysicalConstants
from .green import (ComplexField, OracleError, SeriesDiagnostics, SeriesError, green_series,
                    green_series_grid, green_time_integral, landau_channel_count)
from .grid import FieldMap, GridSpec
from .observables import (CurrentVector, UncertaintyReport, current_density, detector_profile,
                          quantum_current_map, total_flux, uncertainty_product, unitarity_flux)
from .semiclassical import SemiclassicalValue, semiclassical_current_map, semiclassical_green
from .specfun import airy, laguerre_seq, weighted_laguerre

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "CONSTANTS_VERSION", "CausticCurve", "ComplexField", "ConfigError", "CurrentVector",
    "FieldConfig", "FieldMap", "GridSpec", "OracleError", "PhysicalConstants", "ResonanceInfo",
    "SemiclassicalValue", "SeriesDiagnostics", "SeriesError", "Trajectory", "UncertaintyReport",
    "airy", "build_config", "caustic_curve", "classical_uncertainty", "current_density",
    "detector_profile", "find_paths", "green_series", "green_series_grid", "green_time_integral",
    "landau_channel_count", "laguerre_seq", "load_config", "path_count_map", "quantum_current_map",
    "resonance_info", "semiclassical_current_map", "semiclassical_green", "total_flux",
    "uncertainty_product", "unitarity_flux", "weighted_laguerre",
]
