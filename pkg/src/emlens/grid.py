"""(rho, z) grids, sampled maps, and the thread pool used to fill them."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GridSpec:
    rho_min: float
    rho_max: float
    z_min: float
    z_max: float
    n_rho: int
    n_z: int

    def __post_init__(self):
        if not (self.rho_min >= 0):
            raise ValueError("rho_min must be >= 0")
        if not (self.rho_max > self.rho_min and self.z_max > self.z_min):
            raise ValueError("grid bounds must satisfy max > min on both axes")
        if int(self.n_rho) != self.n_rho or int(self.n_z) != self.n_z or self.n_rho < 2 or self.n_z < 2:
            raise ValueError("n_rho and n_z must be integers >= 2")
        for v in (self.rho_min, self.rho_max, self.z_min, self.z_max):
            if not math.isfinite(v):
                raise ValueError("grid bounds must be finite")

    @property
    def rho(self) -> np.ndarray:
        return np.linspace(self.rho_min, self.rho_max, self.n_rho)

    @property
    def z(self) -> np.ndarray:
        return np.linspace(self.z_min, self.z_max, self.n_z)

    @property
    def shape(self) -> tuple[int, int]:
        """(n_z, n_rho): maps are stored z-outer."""
        return (self.n_z, self.n_rho)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        Z, R = np.meshgrid(self.z, self.rho, indexing="ij")
        return R, Z

    def as_dict(self) -> dict:
        return dict(rho_min=self.rho_min, rho_max=self.rho_max, z_min=self.z_min,
                    z_max=self.z_max, n_rho=self.n_rho, n_z=self.n_z)


@dataclass
class FieldMap:
    grid: GridSpec
    channel: str
    values: np.ndarray  # shape grid.shape, z-outer
    mask: np.ndarray | None = None  # True = unreliable/failed cell
    failures: int = 0

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.values.shape != self.grid.shape:
            raise ValueError(f"values shape {self.values.shape} != grid shape {self.grid.shape}")
        if self.mask is not None:
            self.mask = np.asarray(self.mask, dtype=bool)
            if self.mask.shape != self.grid.shape:
                raise ValueError("mask shape must match the grid")

    @property
    def mask_fraction(self) -> float:
        return 0.0 if self.mask is None else float(self.mask.mean())

    def unmasked(self) -> np.ndarray:
        return self.values if self.mask is None else self.values[~self.mask]


def thread_count() -> int:
    """Worker count from EMLENS_THREADS (default: available cores)."""
    raw = os.environ.get("EMLENS_THREADS", "").strip()
    if not raw:
        try:
            return max(1, len(os.sched_getaffinity(0)))
        except AttributeError:  # pragma: no cover - non-Linux
            return max(1, os.cpu_count() or 1)
    n = int(raw)
    if n < 1:
        raise ValueError("EMLENS_THREADS must be >= 1")
    return n


@contextmanager
def worker_pool(n_threads: int | None = None):
    """Thread pool, or None for a single thread (kernels release the GIL)."""
    n = thread_count() if n_threads is None else n_threads
    if n <= 1:
        yield None
        return
    with ThreadPoolExecutor(max_workers=n) as ex:
        yield ex


def chunk_slices(n: int, pool, min_chunk: int = 256) -> list[slice]:
    workers = getattr(pool, "_max_workers", 1) if pool is not None else 1
    size = max(min_chunk, -(-n // max(1, 4 * workers)))
    return [slice(i, min(i + size, n)) for i in range(0, n, size)]


def parallel_cells(work, n: int, pool, min_chunk: int = 256) -> np.ndarray:
    """Apply ``work(slice) -> array`` over 0..n-1 in chunks and concatenate in order."""
    slices = chunk_slices(n, pool, min_chunk)
    parts = list(pool.map(work, slices)) if pool is not None else [work(s) for s in slices]
    return np.concatenate(parts) if parts else np.empty(0)
