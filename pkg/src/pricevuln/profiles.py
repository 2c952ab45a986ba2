"""Daily load profiles: ingestion, validation, l1 normalization and synthesis."""

from __future__ import annotations

import csv
import datetime as dt
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

DEFAULT_H = 24


class IngestError(ValueError):
    """Fatal problem with an input file (unreadable, bad header, wrong width)."""


def hour_columns(H: int) -> list[str]:
    return [f"h{t:02d}" for t in range(H)]


def _frozen(x) -> np.ndarray:
    arr = np.array(x, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class LoadProfile:
    """One consumer-day of raw hourly energy (kWh)."""

    profile_id: str
    user_id: str
    date: dt.date
    energy: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "energy", _frozen(self.energy))


@dataclass(frozen=True, eq=False)
class NormalizedProfile:
    profile_id: str
    weights: np.ndarray
    total_energy: float

    def __post_init__(self):
        object.__setattr__(self, "weights", _frozen(self.weights))

    @property
    def H(self) -> int:
        return len(self.weights)

    @property
    def raw(self) -> np.ndarray:
        return self.weights * self.total_energy


@dataclass(frozen=True, eq=False)
class Dataset:
    """Pooled user-days in ingestion order.

    ``labels`` is only set for synthetic data and holds the index of the
    generating prototype for each profile.
    """

    profiles: tuple[NormalizedProfile, ...]
    rejected: tuple[tuple[int, str], ...] = ()
    labels: tuple[int, ...] | None = None
    _weights: np.ndarray = field(init=False, repr=False)
    _totals: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "profiles", tuple(self.profiles))
        object.__setattr__(self, "rejected", tuple(self.rejected))
        if self.profiles:
            W = np.vstack([p.weights for p in self.profiles])
        else:
            W = np.zeros((0, 0))
        W.setflags(write=False)
        totals = _frozen([p.total_energy for p in self.profiles])
        object.__setattr__(self, "_weights", W)
        object.__setattr__(self, "_totals", totals)

    def __len__(self) -> int:
        return len(self.profiles)

    @property
    def weights(self) -> np.ndarray:
        """(n, H) matrix of normalized weights."""
        return self._weights

    @property
    def totals(self) -> np.ndarray:
        return self._totals

    @property
    def ids(self) -> list[str]:
        return [p.profile_id for p in self.profiles]

    @property
    def H(self) -> int:
        return self._weights.shape[1] if len(self) else 0

    def raw_aggregate(self) -> np.ndarray:
        """Hourly sum of the original (un-normalized) profiles."""
        return self._totals @ self._weights


def normalize(raw: LoadProfile) -> NormalizedProfile:
    e = raw.energy
    if e.ndim != 1 or e.size == 0:
        raise ValueError("energy must be a non-empty vector")
    if not np.all(np.isfinite(e)):
        raise ValueError("non-finite energy")
    if np.any(e < 0):
        raise ValueError("negative energy")
    total = float(e.sum())
    if total <= 0:
        raise ValueError("zero total energy")
    return NormalizedProfile(raw.profile_id, e / total, total)


def _row_problem(values: list[str]) -> tuple[str | None, np.ndarray | None]:
    out = np.empty(len(values))
    for t, s in enumerate(values):
        s = s.strip()
        if s == "":
            return "missing value", None
        try:
            out[t] = float(s)
        except ValueError:
            return "unparseable energy", None
    if not np.all(np.isfinite(out)):
        # NaN is how most exports spell a missing reading
        return ("missing value" if np.any(np.isnan(out)) else "non-finite energy"), None
    if np.any(out < 0):
        return "negative energy", None
    if out.sum() <= 0:
        return "zero total energy", None
    return None, out


def ingest_csv(path: str | Path, H: int = DEFAULT_H) -> Dataset:
    """Read ``user_id,date,h00..`` rows into a normalized dataset.

    Invalid rows end up in ``Dataset.rejected`` as ``(row_number, reason)``
    with 1-based data-row numbering. A row with the wrong number of fields
    is a fatal error.
    """
    path = Path(path)
    expected = ["user_id", "date", *hour_columns(H)]
    try:
        fh = path.open(newline="", encoding="utf-8")
    except OSError as exc:
        raise IngestError(f"cannot read {path}: {exc.strerror or exc}") from exc
    profiles: list[NormalizedProfile] = []
    rejected: list[tuple[int, str]] = []
    seen: set[str] = set()
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != expected:
            raise IngestError(
                f"{path}: malformed header, expected {','.join(expected[:3])},...,{expected[-1]}"
            )
        for row_number, row in enumerate(reader, start=1):
            if not row:
                rejected.append((row_number, "empty row"))
                continue
            if len(row) != H + 2:
                raise IngestError(
                    f"{path}: row {row_number} has {len(row) - 2} hourly values, expected {H}"
                )
            user_id, date_s = row[0].strip(), row[1].strip()
            try:
                date = dt.date.fromisoformat(date_s)
            except ValueError:
                rejected.append((row_number, "bad date"))
                continue
            reason, energy = _row_problem(row[2:])
            if reason is not None:
                rejected.append((row_number, reason))
                continue
            pid = f"{user_id}@{date.isoformat()}"
            if pid in seen:
                rejected.append((row_number, "duplicate user/date"))
                continue
            seen.add(pid)
            profiles.append(normalize(LoadProfile(pid, user_id, date, energy)))
    return Dataset(tuple(profiles), tuple(rejected))


@dataclass
class MixtureSpec:
    """Recipe for a synthetic population.

    Each profile is ``prototype * scale + N(0, sigma^2)`` clipped at zero and
    then normalized. ``prototypes`` are given in the same units as ``sigma``;
    ``scale`` draws a per-profile daily-energy multiplier uniformly from the
    given range so that bills differ between users.
    """

    prototypes: Sequence[Sequence[float]]
    counts: Sequence[int]
    sigma: float = 0.0
    seed: int = 0
    scale: tuple[float, float] = (1.0, 1.0)
    n_users: int = 40
    start_date: dt.date = dt.date(2015, 5, 1)


def synthesize(spec: MixtureSpec) -> Dataset:
    protos = [np.asarray(p, dtype=float) for p in spec.prototypes]
    if not protos:
        raise ValueError("empty prototype list")
    if len(spec.counts) != len(protos):
        raise ValueError("counts must match prototypes")
    if spec.sigma < 0:
        raise ValueError("sigma must be >= 0")
    H = protos[0].size
    for p in protos:
        if p.shape != (H,) or np.any(p < 0) or not np.all(np.isfinite(p)) or p.sum() <= 0:
            raise ValueError("prototypes must be non-negative H-vectors with positive sum")
    lo, hi = spec.scale
    if not 0 < lo <= hi:
        raise ValueError("scale range must satisfy 0 < lo <= hi")

    rng = np.random.default_rng(spec.seed)
    n_users = max(1, spec.n_users)
    profiles, labels = [], []
    i = 0
    for label, (proto, count) in enumerate(zip(protos, spec.counts)):
        for _ in range(count):
            s = rng.uniform(lo, hi) if hi > lo else lo
            noise = rng.normal(0.0, spec.sigma, H) if spec.sigma > 0 else np.zeros(H)
            energy = np.clip(proto * s + noise, 0.0, None)
            if energy.sum() <= 0:
                energy = proto * s
            user = f"u{i % n_users:03d}"
            date = spec.start_date + dt.timedelta(days=i // n_users)
            pid = f"{user}@{date.isoformat()}"
            profiles.append(normalize(LoadProfile(pid, user, date, energy)))
            labels.append(label)
            i += 1
    return Dataset(tuple(profiles), (), tuple(labels))


def _bump(H: int, center: float, width: float) -> np.ndarray:
    t = np.arange(H) * (24.0 / H)
    d = np.minimum(np.abs(t - center), 24.0 - np.abs(t - center))
    return np.exp(-0.5 * (d / width) ** 2)


def demo_prototypes(H: int = DEFAULT_H) -> list[np.ndarray]:
    """A library of recognisable residential day shapes (raw kWh/hour, ~30 kWh/day).

    Synthetic; meant for demos and tests, not calibrated against any dataset.
    """
    base = 0.15 * np.ones(H)
    shapes = [
        base + 1.0 * _bump(H, 12.5, 2.0) + 1.4 * _bump(H, 20.0, 2.0),  # classic two-peak
        base + 2.0 * _bump(H, 2.0, 2.5),  # night owl
        base + 1.6 * _bump(H, 7.5, 1.5) + 0.6 * _bump(H, 19.0, 2.0),  # early riser
        base + 1.8 * _bump(H, 18.5, 1.5),  # evening
        base + 1.8 * _bump(H, 14.5, 3.0),  # afternoon cooling
        0.5 * np.ones(H),  # flat
        base + 1.5 * _bump(H, 23.0, 1.5),  # late evening
        base + 1.2 * _bump(H, 10.0, 2.0) + 1.2 * _bump(H, 16.0, 2.0),  # working from home
        base + 2.2 * _bump(H, 5.0, 1.5),  # pre-dawn
        base + 1.0 * _bump(H, 8.0, 1.5) + 1.0 * _bump(H, 21.0, 1.5),  # commuter
    ]
    out = []
    for s in shapes:
        out.append(s * (30.0 / s.sum()))
    return out


def demo_mixture(
    n: int, n_prototypes: int = 10, H: int = DEFAULT_H, sigma: float = 0.15, seed: int = 0
) -> MixtureSpec:
    """Split ``n`` profiles as evenly as possible across the demo prototypes.

    ``n_prototypes`` beyond the base library are filled with seeded random
    mixtures of two library shapes.
    """
    lib = demo_prototypes(H)
    protos = list(lib[: min(n_prototypes, len(lib))])
    rng = np.random.default_rng(seed + 7919)
    while len(protos) < n_prototypes:
        a, b = rng.choice(len(lib), size=2, replace=False)
        w = rng.uniform(0.25, 0.75)
        protos.append(w * lib[a] + (1 - w) * lib[b])
    q, r = divmod(n, len(protos))
    counts = [q + (1 if j < r else 0) for j in range(len(protos))]
    return MixtureSpec(protos, counts, sigma=sigma, seed=seed, scale=(0.5, 1.5))


def write_profiles_csv(path: str | Path, data: Dataset, digits: int = 12) -> None:
    """Write raw energies back out in the ingestion schema."""
    rows = []
    for p in data.profiles:
        user, _, date = p.profile_id.partition("@")
        rows.append([user, date, *(format(x, f".{digits}g") for x in p.raw)])
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["user_id", "date", *hour_columns(data.H)])
        w.writerows(rows)


def is_unit_sum(x: np.ndarray, tol: float = 1e-9) -> bool:
    return bool(np.all(x >= 0) and math.isclose(float(np.sum(x)), 1.0, rel_tol=0, abs_tol=tol))
