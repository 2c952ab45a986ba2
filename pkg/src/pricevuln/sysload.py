"""System load when every user who can disguise at a given threshold does so."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

import numpy as np

from .disguise import DisguiseRecord
from .profiles import Dataset
from .zones import ThetaGrid, thetas

Extent = Literal["cr", "full"]


@dataclass(frozen=True, eq=False)
class SystemLoadRow:
    theta: float
    hourly_load: np.ndarray
    peak: float
    peak_hour: int
    peak_ratio: float


def _load(data: Dataset, records: Sequence[DisguiseRecord], theta: float, extent: Extent,
          centers: np.ndarray | None) -> np.ndarray:
    if theta < 0:
        raise ValueError("theta must be >= 0")
    if len(records) != len(data):
        raise ValueError("records must cover every profile")
    if extent not in ("cr", "full"):
        raise ValueError(f"unknown disguise extent {extent!r}")
    if extent == "full" and centers is None:
        raise ValueError("extent='full' needs the cluster centers")
    W = np.array(data.weights, copy=True)
    for i, r in enumerate(records):
        if r.cr <= theta:
            W[i] = r.disguised_weights if extent == "cr" else centers[r.target]
    # fixed profile order keeps the float sum reproducible
    return data.totals @ W


def aggregate(data: Dataset, records: Sequence[DisguiseRecord], theta: float,
              extent: Extent = "cr", centers: np.ndarray | None = None,
              baseline_peak: float | None = None) -> SystemLoadRow:
    """Hourly system load with users of CR <= theta disguised (each scaled by its own energy).

    ``extent="cr"`` moves users only as far as their minimal effort;
    ``"full"`` relocates them onto the target center.
    """
    load = _load(data, records, theta, extent, centers)
    h = int(np.argmax(load))
    peak = float(load[h])
    if baseline_peak is None:
        baseline_peak = float(_load(data, records, 0.0, extent, centers).max())
    return SystemLoadRow(theta, load, peak, h, peak / baseline_peak)


def peak_sweep(data: Dataset, records: Sequence[DisguiseRecord], grid: ThetaGrid | Iterable[float],
               extent: Extent = "cr", centers: np.ndarray | None = None) -> list[SystemLoadRow]:
    base = float(_load(data, records, 0.0, extent, centers).max())
    return [aggregate(data, records, th, extent, centers, base) for th in thetas(grid)]
