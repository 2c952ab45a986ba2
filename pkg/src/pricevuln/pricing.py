"""Real-time price curves and marginal-cost-impact (MCI) pricing of profiles and clusters."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .clustering import ClusterModel


class PriceCurveError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class PriceCurve:
    """Hourly price vector, currency per kWh. Negative prices are allowed."""

    prices: np.ndarray

    def __post_init__(self):
        p = np.array(self.prices, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise PriceCurveError("price curve must be a non-empty vector")
        if not np.all(np.isfinite(p)):
            raise PriceCurveError("non-finite price")
        p.setflags(write=False)
        object.__setattr__(self, "prices", p)

    @property
    def H(self) -> int:
        return self.prices.size

    @classmethod
    def flat(cls, value: float, H: int = 24) -> "PriceCurve":
        return cls(np.full(H, float(value)))


PRICE_TIE_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class ClusterPrices:
    price: np.ndarray

    def __post_init__(self):
        p = np.array(self.price, dtype=float)
        p.setflags(write=False)
        object.__setattr__(self, "price", p)

    def __getitem__(self, n: int) -> float:
        return float(self.price[n])

    def __len__(self) -> int:
        return self.price.size

    def cheaper(self, n: int) -> np.ndarray:
        """Mask of clusters strictly cheaper than cluster ``n``.

        Gaps within ``PRICE_TIE_RTOL`` of the price scale are rounding (centers
        sum to one only up to a few ulps) and count as equal prices.
        """
        p = self.price
        scale = float(np.max(np.abs(p))) if p.size else 0.0
        return p < p[n] - PRICE_TIE_RTOL * scale


def mci(profile, curve: PriceCurve, tol: float = 1e-6) -> float:
    """Price-weighted sum of a unit-sum profile: its marginal cost impact per kWh."""
    w = np.asarray(profile, dtype=float)
    if w.shape != curve.prices.shape:
        raise ValueError(f"dimension mismatch: {w.shape} vs {curve.prices.shape}")
    if abs(w.sum() - 1.0) > tol:
        raise ValueError(f"profile is not unit-sum (sum={w.sum():.12g})")
    return float(w @ curve.prices)


def price_clusters(model: ClusterModel, curve: PriceCurve) -> ClusterPrices:
    return ClusterPrices(np.array([mci(c, curve) for c in model.centers]))


def load_price_curve(path: str | Path, H: int | None = None) -> PriceCurve:
    """Read a ``hour,price`` CSV. Rows may come in any order; every hour 0..H-1 must appear once."""
    path = Path(path)
    try:
        fh = path.open(newline="", encoding="utf-8")
    except OSError as exc:
        raise PriceCurveError(f"cannot read {path}: {exc.strerror or exc}") from exc
    seen: dict[int, float] = {}
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["hour", "price"]:
            raise PriceCurveError(f"{path}: header must be 'hour,price'")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise PriceCurveError(f"{path}:{lineno}: expected 2 fields")
            try:
                hour = int(row[0])
                price = float(row[1])
            except ValueError:
                raise PriceCurveError(f"{path}:{lineno}: unparseable row {row!r}") from None
            if not math.isfinite(price):
                raise PriceCurveError(f"{path}:{lineno}: non-finite price")
            if hour in seen:
                raise PriceCurveError(f"{path}:{lineno}: duplicate hour {hour}")
            seen[hour] = price
    n = H if H is not None else (max(seen) + 1 if seen else 0)
    missing = [h for h in range(n) if h not in seen]
    if missing or n == 0:
        raise PriceCurveError(f"{path}: missing hour {missing[0] if missing else 0}")
    extra = sorted(h for h in seen if not 0 <= h < n)
    if extra:
        raise PriceCurveError(f"{path}: hour {extra[0]} out of range 0..{n - 1}")
    return PriceCurve(np.array([seen[h] for h in range(n)]))


def write_price_curve(path: str | Path, curve: PriceCurve) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["hour", "price"])
        for h, p in enumerate(curve.prices):
            w.writerow([h, format(p, ".12g")])


def synthetic_curve(H: int = 24) -> PriceCurve:
    """Synthetic two-peak day ($/kWh): cheap overnight, a midday shoulder and an evening peak.

    Not market data; shipped for demos only.
    """
    t = np.arange(H) * (24.0 / H)

    def bump(c, w):
        d = np.minimum(np.abs(t - c), 24.0 - np.abs(t - c))
        return np.exp(-0.5 * (d / w) ** 2)

    return PriceCurve(np.round(0.06 + 0.05 * bump(12.0, 2.5) + 0.14 * bump(18.5, 1.8), 6))
