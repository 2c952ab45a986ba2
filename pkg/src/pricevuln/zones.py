"""Sensitive-zone statistics per cluster over a grid of disguise thresholds."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .clustering import ClusterModel, cluster_radius
from .disguise import DisguiseRecord
from .profiles import Dataset

AGGREGATE = -1


@dataclass(frozen=True)
class ThetaGrid:
    start: float = 0.0
    stop: float = 0.5
    step: float = 0.005

    def __post_init__(self):
        if not (0 <= self.start < self.stop) or not self.step > 0:
            raise ValueError("theta grid needs 0 <= start < stop and step > 0")
        if len(self.points()) < 2:
            raise ValueError("theta grid needs at least 2 points")

    def points(self) -> list[float]:
        n = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        # rounding keeps 0.1 + 0.2 style drift out of reports
        return [round(self.start + i * self.step, 12) for i in range(n)]


def thetas(grid: ThetaGrid | Iterable[float]) -> list[float]:
    return grid.points() if isinstance(grid, ThetaGrid) else [float(t) for t in grid]


@dataclass(frozen=True)
class ZoneRow:
    theta: float
    cluster: int
    n_sensitive: int
    pct_sensitive: float
    radius: float


def _crs(records: Sequence[DisguiseRecord]) -> np.ndarray:
    return np.array([r.cr for r in records], dtype=float)


def _homes(records: Sequence[DisguiseRecord]) -> np.ndarray:
    return np.array([r.home_cluster for r in records], dtype=int)


def n_sensitive(records: Sequence[DisguiseRecord], n: int, theta: float, k: int | None = None) -> int:
    if n < 0 or (k is not None and n >= k):
        raise ValueError(f"unknown cluster index {n}")
    return sum(1 for r in records if r.home_cluster == n and r.cr <= theta)


def stable_radius(records: Sequence[DisguiseRecord], data: Dataset, model: ClusterModel, n: int,
                  theta: float, empty_value: float | None = None) -> float:
    """Distance from center ``n`` to its nearest member that can disguise at ``theta``.

    With no such member the whole cluster is stable and the full cluster
    radius is returned, unless ``empty_value`` is given.
    """
    X = data.weights
    idx = model.members(n)
    if idx.size == 0:
        raise ValueError(f"cluster {n} is empty")
    crs = _crs(records)[idx]
    strategic = idx[crs <= theta]
    if strategic.size == 0:
        return cluster_radius(model, n, X) if empty_value is None else empty_value
    return float(np.abs(X[strategic] - model.centers[n]).sum(axis=1).min())


def sweep(records: Sequence[DisguiseRecord], data: Dataset, model: ClusterModel,
          grid: ThetaGrid | Iterable[float], aggregate: bool = True,
          empty_value: float | None = None) -> list[ZoneRow]:
    """One row per (theta, cluster), ordered by theta then cluster.

    With ``aggregate`` a population row keyed ``cluster = -1`` leads each
    theta block; its radius is the smallest home-center distance among all
    strategic users (largest cluster radius when there are none).
    """
    X = data.weights
    crs = _crs(records)
    homes = _homes(records)
    own_dist = np.abs(X - model.centers[homes]).sum(axis=1)
    members = [model.members(n) for n in range(model.k)]
    full = [float(own_dist[m].max()) if m.size else math.nan for m in members]
    fallback_all = max((r for r in full if not math.isnan(r)), default=math.nan)
    N = len(records)

    rows = []
    for th in thetas(grid):
        ok = crs <= th
        if aggregate:
            strat = own_dist[ok]
            r = float(strat.min()) if strat.size else (fallback_all if empty_value is None else empty_value)
            cnt = int(ok.sum())
            rows.append(ZoneRow(th, AGGREGATE, cnt, cnt / N if N else 0.0, r))
        for n in range(model.k):
            m = members[n]
            if m.size == 0:
                rows.append(ZoneRow(th, n, 0, 0.0, math.nan))
                continue
            s = m[ok[m]]
            if s.size:
                r = float(own_dist[s].min())
            else:
                r = full[n] if empty_value is None else empty_value
            rows.append(ZoneRow(th, n, int(s.size), s.size / m.size, r))
    return rows
