"""Bill-difference benefits of disguising and the utility-based generalization."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

import numpy as np

from .clustering import l1_distance
from .disguise import DisguiseRecord
from .pricing import ClusterPrices
from .profiles import NormalizedProfile
from .zones import ThetaGrid, thetas

Basis = Literal["actual", "normalized"]


@dataclass(frozen=True)
class BenefitRecord:
    profile_id: str
    benefit: float
    basis: Basis
    strategic: bool = True


@dataclass(frozen=True)
class UtilityParams:
    """Satiation level ``u_max`` and discomfort ``c`` per unit of l1 deviation."""

    u_max: float = 0.0
    c: float = 0.0

    def __post_init__(self):
        if self.c < 0:
            raise ValueError("discomfort coefficient c must be >= 0")


@dataclass(frozen=True)
class BenefitCurveRow:
    theta: float
    avg_cumulative: float
    avg_marginal: float
    n_strategic: int


def bill_difference(p_home: float, d, p_target: float, d_tilde) -> float:
    """Old bill minus new bill, evaluated term by term on the given vectors."""
    return p_home * float(np.sum(d)) - p_target * float(np.sum(d_tilde))


def bill_benefit(record: DisguiseRecord, profile: NormalizedProfile, prices: ClusterPrices,
                 basis: Basis = "actual") -> BenefitRecord:
    """Daily saving from disguising.

    Normalized profile and disguised profile both sum to one, so the saving
    per kWh is the price gap; ``basis="actual"`` scales it by the day's energy.
    """
    if basis not in ("actual", "normalized"):
        raise ValueError(f"unknown basis {basis!r}")
    if not record.finite or record.target is None:
        return BenefitRecord(record.profile_id, 0.0, basis, strategic=False)
    gap = prices[record.home_cluster] - prices[record.target]
    scale = profile.total_energy if basis == "actual" else 1.0
    return BenefitRecord(record.profile_id, scale * gap, basis)


def happiness(d_tilde, d, params: UtilityParams) -> float:
    return params.u_max - params.c * l1_distance(d_tilde, d)


def utility(profile_weights, total_energy: float, price: float, d_ref,
            params: UtilityParams) -> float:
    return happiness(profile_weights, d_ref, params) - price * total_energy


def utility_gain(record: DisguiseRecord, profile: NormalizedProfile, prices: ClusterPrices,
                 params: UtilityParams) -> float:
    """Utility after disguising minus utility before; positive means disguising pays.

    Note the orientation: disguised minus original.
    """
    if not record.finite or record.disguised_weights is None:
        raise ValueError(f"profile {record.profile_id} cannot disguise (infinite effort)")
    d = profile.weights
    E = profile.total_energy
    before = utility(d, E, prices[record.home_cluster], d, params)
    after = utility(record.disguised_weights, E, prices[record.target], d, params)
    return after - before


def benefits(records: Sequence[DisguiseRecord], profiles: Sequence[NormalizedProfile],
             prices: ClusterPrices, basis: Basis = "actual") -> list[BenefitRecord]:
    return [bill_benefit(r, p, prices, basis) for r, p in zip(records, profiles)]


def benefit_curves(records: Sequence[DisguiseRecord], profiles: Sequence[NormalizedProfile],
                   prices: ClusterPrices, grid: ThetaGrid | Iterable[float],
                   basis: Basis = "actual") -> list[BenefitCurveRow]:
    """Average benefit of users able to disguise at each theta.

    ``avg_cumulative`` averages over everyone with CR <= theta;
    ``avg_marginal`` only over those whose CR falls in (previous theta, theta].
    """
    pts = thetas(grid)
    if not pts:
        raise ValueError("empty theta grid")
    crs = np.array([r.cr for r in records], dtype=float)
    b = np.array([x.benefit for x in benefits(records, profiles, prices, basis)])
    rows = []
    prev = -math.inf
    for th in pts:
        cum = crs <= th
        marg = cum & (crs > prev)
        rows.append(BenefitCurveRow(
            th,
            float(b[cum].mean()) if cum.any() else 0.0,
            float(b[marg].mean()) if marg.any() else 0.0,
            int(cum.sum()),
        ))
        prev = th
    return rows
