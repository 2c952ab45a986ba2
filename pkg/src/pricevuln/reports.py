"""CSV readers and writers for every emitted report.

Floats are written with 12 significant digits; ``inf``/``nan`` are literal.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .clustering import ClusterModel
from .disguise import DisguiseRecord
from .economics import BenefitCurveRow, BenefitRecord
from .pricing import ClusterPrices
from .profiles import hour_columns
from .sysload import SystemLoadRow
from .zones import ZoneRow


class ReportError(ValueError):
    pass


def fmt(x: float) -> str:
    return format(float(x), ".12g")


def _write(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _read(path: Path, header: Sequence[str]) -> list[list[str]]:
    path = Path(path)
    if not path.exists():
        raise ReportError(f"missing {path.name}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        got = next(reader, None)
        if got != list(header):
            raise ReportError(f"{path.name}: unexpected header {got}")
        return [row for row in reader if row]


def write_rejected(path, rejected: Iterable[tuple[int, str]]) -> None:
    _write(path, ["row_number", "reason"], rejected)


def write_centers(path, model: ClusterModel) -> None:
    rows = [[n, *map(fmt, c), int(s)] for n, (c, s) in enumerate(zip(model.centers, model.sizes))]
    _write(path, ["cluster", *hour_columns(model.H), "size"], rows)


def read_centers(path, H: int) -> tuple[np.ndarray, np.ndarray]:
    rows = _read(path, ["cluster", *hour_columns(H), "size"])
    if [int(r[0]) for r in rows] != list(range(len(rows))):
        raise ReportError(f"{Path(path).name}: clusters must be numbered 0..k-1 in order")
    centers = np.array([[float(x) for x in r[1:-1]] for r in rows]).reshape(len(rows), H)
    sizes = np.array([int(r[-1]) for r in rows], dtype=int)
    return centers, sizes


def write_assignments(path, ids: Sequence[str], assignment: Sequence[int]) -> None:
    _write(path, ["profile_id", "cluster"], zip(ids, (int(a) for a in assignment)))


def read_assignments(path) -> tuple[list[str], np.ndarray]:
    rows = _read(path, ["profile_id", "cluster"])
    return [r[0] for r in rows], np.array([int(r[1]) for r in rows], dtype=int)


def write_cluster_prices(path, prices: ClusterPrices) -> None:
    _write(path, ["cluster", "price"], ((n, fmt(p)) for n, p in enumerate(prices.price)))


def read_cluster_prices(path) -> ClusterPrices:
    rows = _read(path, ["cluster", "price"])
    if [int(r[0]) for r in rows] != list(range(len(rows))):
        raise ReportError(f"{Path(path).name}: clusters must be numbered 0..k-1 in order")
    return ClusterPrices(np.array([float(r[1]) for r in rows]))


def write_cr(path, records: Sequence[DisguiseRecord]) -> None:
    rows = [[r.profile_id, r.home_cluster, fmt(r.cr), "" if r.target is None else r.target]
            for r in records]
    _write(path, ["profile_id", "home_cluster", "cr", "target_cluster"], rows)


def read_cr(path) -> tuple[list[str], list[int], list[float], list[int | None]]:
    rows = _read(path, ["profile_id", "home_cluster", "cr", "target_cluster"])
    ids = [r[0] for r in rows]
    homes = [int(r[1]) for r in rows]
    crs = [float(r[2]) for r in rows]
    targets = [int(r[3]) if r[3] != "" else None for r in rows]
    return ids, homes, crs, targets


def write_trajectories(path, table: Iterable[tuple[float, dict[tuple[int, int], int]]]) -> None:
    rows = []
    for theta, counts in table:
        rows.extend([fmt(theta), a, b, c] for (a, b), c in counts.items())
    _write(path, ["theta", "from", "to", "count"], rows)


def write_zones(path, rows: Iterable[ZoneRow]) -> None:
    _write(path, ["theta", "cluster", "n_sensitive", "pct_sensitive", "radius"],
           ([fmt(z.theta), z.cluster, z.n_sensitive, fmt(z.pct_sensitive), fmt(z.radius)] for z in rows))


def write_benefits(path, rows: Iterable[BenefitRecord]) -> None:
    _write(path, ["profile_id", "benefit", "basis"],
           ([b.profile_id, fmt(b.benefit), b.basis] for b in rows))


def write_utility(path, rows: Iterable[tuple[str, float]]) -> None:
    _write(path, ["profile_id", "utility_gain"], ([pid, fmt(g)] for pid, g in rows))


def write_benefit_curve(path, rows: Iterable[BenefitCurveRow]) -> None:
    _write(path, ["theta", "avg_cumulative", "avg_marginal", "n_strategic"],
           ([fmt(r.theta), fmt(r.avg_cumulative), fmt(r.avg_marginal), r.n_strategic] for r in rows))


def write_sysload(path, rows: Sequence[SystemLoadRow]) -> None:
    H = rows[0].hourly_load.size if rows else 24
    _write(path, ["theta", *hour_columns(H), "peak", "peak_hour", "peak_ratio"],
           ([fmt(r.theta), *map(fmt, r.hourly_load), fmt(r.peak), r.peak_hour, fmt(r.peak_ratio)]
            for r in rows))

