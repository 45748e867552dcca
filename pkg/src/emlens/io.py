"""CSV / PGM serialisation of field maps and the JSON run manifest."""

from __future__ import annotations

import csv
import json
import math
import platform
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .constants import CONSTANTS_VERSION
from .grid import FieldMap, GridSpec

DEFAULT_DECADES = 6.0


def _fmt(v: float) -> str:
    # repr of a Python float is the shortest string that round-trips exactly
    return repr(float(v))


def write_map_csv(fmap: FieldMap, path) -> None:
    """``rho_m,z_m,value[,mask]`` rows, z-outer (row-major over grid.shape)."""
    R, Z = fmap.grid.mesh()
    vals = np.asarray(fmap.values)
    is_int = np.issubdtype(vals.dtype, np.integer)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        head = ["rho_m", "z_m", "value"]
        if fmap.mask is not None:
            head.append("mask")
        w.writerow(head)
        for idx in np.ndindex(vals.shape):
            v = vals[idx]
            row = [_fmt(R[idx]), _fmt(Z[idx]), str(int(v)) if is_int else _fmt(v)]
            if fmap.mask is not None:
                row.append("1" if fmap.mask[idx] else "0")
            w.writerow(row)


def read_map_csv(path) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray | None]:
    """Inverse of :func:`write_map_csv`: (rho, z, values, mask) as 2-D arrays."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    head, body = rows[0], rows[1:]
    if head[:3] != ["rho_m", "z_m", "value"]:
        raise ValueError(f"unexpected CSV header {head!r}")
    rho = np.array([float(r[0]) for r in body])
    z = np.array([float(r[1]) for r in body])
    raw = [r[2] for r in body]
    if all(s.lstrip("-").isdigit() for s in raw):
        vals = np.array([int(s) for s in raw])
    else:
        vals = np.array([float(s) for s in raw])
    mask = np.array([r[3] == "1" for r in body]) if len(head) > 3 else None
    n_rho = int(np.argmax(z != z[0])) if (z != z[0]).any() else len(z)
    shape = (len(z) // n_rho, n_rho)
    return (rho.reshape(shape), z.reshape(shape), vals.reshape(shape),
            None if mask is None else mask.reshape(shape))


def log_scale_u16(values, decades: float = DEFAULT_DECADES, x_max: float | None = None) -> np.ndarray:
    """round(65535 * clamp(log10(x/x_max) + D, 0, D) / D); zero and negative cells map to 0."""
    if not decades > 0:
        raise ValueError("decades must be positive")
    x = np.abs(np.asarray(values, dtype=float))
    x = np.where(np.isfinite(x), x, 0.0)
    if x_max is None:
        x_max = float(x.max()) if x.size else 0.0
    if x_max <= 0:
        return np.zeros(x.shape, dtype=np.uint16)
    with np.errstate(divide="ignore"):
        lv = np.log10(x / x_max) + decades
    lv = np.clip(np.where(np.isfinite(lv), lv, 0.0), 0.0, decades)
    return np.rint(65535.0 * lv / decades).astype(np.uint16)


def write_map_pgm(fmap: FieldMap, path, decades: float = DEFAULT_DECADES) -> None:
    """Binary P5, 16-bit big-endian.  Image rows run from z_max (top) down to z_min."""
    vals = np.where(fmap.mask, 0.0, fmap.values) if fmap.mask is not None else fmap.values
    img = log_scale_u16(vals, decades)[::-1]
    h, w = img.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n65535\n".encode("ascii"))
        fh.write(img.astype(">u2").tobytes())


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    parts = data.split(maxsplit=4)
    if parts[0] != b"P5":
        raise ValueError("not a binary PGM")
    w, h, maxval = int(parts[1]), int(parts[2]), int(parts[3])
    if maxval != 65535:
        raise ValueError("expected a 16-bit PGM")
    raw = parts[4]
    return np.frombuffer(raw[: 2 * w * h], dtype=">u2").reshape(h, w)


def write_rows_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) if isinstance(v, float) else v for v in r])


@dataclass
class RunManifest:
    command: str
    argv: list[str]
    config: dict
    tolerances: dict = field(default_factory=dict)
    grid: dict | None = None
    outputs: list[str] = field(default_factory=list)
    wall_time_s: float = 0.0
    failures: int = 0
    extra: dict = field(default_factory=dict)
    constants_version: str = CONSTANTS_VERSION
    backend: str = ""
    python: str = field(default_factory=lambda: sys.version.split()[0])
    platform: str = field(default_factory=platform.platform)

    def write(self, path) -> None:
        def clean(o):
            if isinstance(o, float) and not math.isfinite(o):
                return str(o)
            if isinstance(o, dict):
                return {k: clean(v) for k, v in o.items()}
            if isinstance(o, (list, tuple)):
                return [clean(v) for v in o]
            if isinstance(o, np.generic):
                return clean(o.item())
            return o

        Path(path).write_text(json.dumps(clean(asdict(self)), indent=2, sort_keys=True) + "\n")

    @classmethod
    def read(cls, path) -> "RunManifest":
        return cls(**json.loads(Path(path).read_text()))


def manifest_path(out) -> Path:
    out = Path(out)
    return out.with_name(out.name + ".manifest.json")


class Stopwatch:
    def __init__(self):
        self.t0 = time.perf_counter()

    @property
    def elapsed(self) -> float:
        return time.perf_counter() - self.t0


__all__ = [
    "DEFAULT_DECADES", "GridSpec", "RunManifest", "Stopwatch", "log_scale_u16", "manifest_path",
    "read_map_csv", "read_pgm", "write_map_csv", "write_map_pgm", "write_rows_csv",
]
