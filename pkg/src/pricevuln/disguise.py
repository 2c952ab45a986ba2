"""Minimal-effort disguising: how far a profile must move toward a cheaper center to switch.

Moving a profile ``d`` toward a target center by ``lam`` gives
``(1 - lam) d + lam c_target``. With ``a = d - c_home``, ``v = c_target - d``
and ``D = |d - c_target|_1`` the switch test is ``gap(lam) >= 0`` where

    gap(lam) = |a + lam v|_1 - (1 - lam) D

``gap`` is convex and piecewise linear in ``lam`` with kinks at ``-a_t / v_t``,
and ``gap(1) = |c_target - c_home|_1 >= 0``, so the smallest feasible ``lam``
is found exactly by walking the sorted kinks and solving one linear equation.
"""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

import numpy as np

from .clustering import ClusterModel
from .pricing import ClusterPrices
from .profiles import Dataset

# a gap at lam = 0 this close to zero is rounding noise: by convexity the exact gap can only be
# flat at zero on a stretch starting at 0, and the smallest root there is 0
GAP_TOL = 1e-12

SwitchRule = Literal["pairwise", "strict"]
INF = math.inf


@dataclass(frozen=True)
class EffortResult:
    lambda_star: float
    target: int
    feasible: bool


@dataclass(frozen=True, eq=False)
class DisguiseRecord:
    profile_id: str
    home_cluster: int
    cr: float
    target: int | None
    disguised_weights: np.ndarray | None

    @property
    def finite(self) -> bool:
        return math.isfinite(self.cr)


def _vec(x) -> np.ndarray:
    return np.asarray(x, dtype=float)


def switch_condition(d, c_home, c_target, lam: float) -> bool:
    """True when the moved profile is at least as far from home as from the target."""
    d, c_home, c_target = _vec(d), _vec(c_home), _vec(c_target)
    if not d.shape == c_home.shape == c_target.shape:
        raise ValueError("dimension mismatch")
    lhs = np.abs((1 - lam) * d + lam * c_target - c_home).sum()
    rhs = np.abs((1 - lam) * (d - c_target)).sum()
    return bool(lhs >= rhs)


def effort_gap(d, c_home, c_target, lam: float) -> float:
    d, c_home, c_target = _vec(d), _vec(c_home), _vec(c_target)
    a = d - c_home
    v = c_target - d
    return float(np.abs(a + lam * v).sum() - (1 - lam) * np.abs(v).sum())


def _solve(d: np.ndarray, c_home: np.ndarray, c_target: np.ndarray) -> np.ndarray:
    """Smallest feasible effort for a batch of (d, c_home, c_target) rows."""
    d, c_home, c_target = np.broadcast_arrays(d, c_home, c_target)
    a = d - c_home
    v = c_target - d
    m = a.shape[0]
    D = np.abs(v).sum(axis=1)
    f0 = np.abs(a).sum(axis=1) - D
    out = np.zeros(m)
    need = np.flatnonzero(f0 < -GAP_TOL)
    if need.size == 0:
        return out
    a, v, D, f0 = a[need], v[need], D[need], f0[need]

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        kinks = -a / v
    kinks[~((kinks > 0) & (kinks < 1))] = 1.0
    pts = np.sort(np.concatenate([kinks, np.ones((len(need), 1))], axis=1), axis=1)
    F = np.abs(a[:, None, :] + pts[:, :, None] * v[:, None, :]).sum(axis=2) - (1 - pts) * D[:, None]
    # gap(1) = |a + v|_1 >= 0 exactly, so the last column always qualifies
    first = np.argmax(F >= 0, axis=1)
    rows = np.arange(len(need))
    hi = pts[rows, first]
    prev = np.maximum(first - 1, 0)
    lo = np.where(first > 0, pts[rows, prev], 0.0)
    flo = np.where(first > 0, F[rows, prev], f0)

    mid = 0.5 * (lo + hi)
    slope = D + (v * np.sign(a + mid[:, None] * v)).sum(axis=1)
    # slope > 0 on the crossing segment unless gap is rounding noise there
    step = np.divide(-flo, slope, out=np.full_like(flo, np.inf), where=slope > 0)
    lam = np.clip(lo + step, lo, hi)

    out[need] = lam
    return out


def min_effort(d, c_home, c_target) -> float:
    """Smallest ``lam`` in [0, 1] at which ``switch_condition`` holds."""
    d, c_home, c_target = _vec(d), _vec(c_home), _vec(c_target)
    if not d.shape == c_home.shape == c_target.shape:
        raise ValueError("dimension mismatch")
    return float(_solve(d[None, :], c_home[None, :], c_target[None, :])[0])


def disguised_profile(d, c_target, lam: float) -> np.ndarray:
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")
    return (1 - lam) * _vec(d) + lam * _vec(c_target)


def _candidate_efforts(d: np.ndarray, home: int, cands: np.ndarray, centers: np.ndarray,
                       rule: str) -> np.ndarray:
    if rule == "pairwise":
        return _solve(d[None, :], centers[home][None, :], centers[cands])
    # strict: the moved profile must beat every other center, i.e. the largest pairwise threshold
    k = centers.shape[0]
    t_idx, m_idx = [], []
    for t in cands:
        others = [m for m in range(k) if m != t]
        t_idx.extend([t] * len(others))
        m_idx.extend(others)
    t_idx, m_idx = np.array(t_idx), np.array(m_idx)
    lam = _solve(d[None, :], centers[m_idx], centers[t_idx])
    return lam.reshape(len(cands), k - 1).max(axis=1)


def efforts(d, home: int, model: ClusterModel, prices: ClusterPrices,
            rule: SwitchRule = "pairwise") -> list[EffortResult]:
    """Effort toward every other cluster; clusters that are not cheaper come back infeasible."""
    d = _vec(d)
    cheaper = prices.cheaper(home)
    others = np.array([n for n in range(model.k) if n != home], dtype=int)
    if others.size == 0:
        return []
    lam = _candidate_efforts(d, home, others, model.centers, rule)
    return [
        EffortResult(float(l), int(n), True) if cheaper[n] else EffortResult(INF, int(n), False)
        for n, l in zip(others, lam)
    ]


def compute_cr(i: int, model: ClusterModel, prices: ClusterPrices, X: np.ndarray,
               rule: SwitchRule = "pairwise", profile_id: str | None = None) -> DisguiseRecord:
    """Cheapest-effort disguise for profile ``i`` (row of ``X``).

    Only strictly cheaper clusters are candidates. Equal efforts are broken
    toward the lower price, then the lower index.
    """
    if rule not in ("pairwise", "strict"):
        raise ValueError(f"unknown switch rule {rule!r}")
    if not 0 <= i < X.shape[0]:
        raise IndexError(f"profile index {i} out of range")
    pid = profile_id if profile_id is not None else str(i)
    home = int(model.assignment[i])
    p = prices.price
    cands = np.flatnonzero(prices.cheaper(home))
    if cands.size == 0:
        return DisguiseRecord(pid, home, INF, None, None)
    d = X[i]
    lam = _candidate_efforts(d, home, cands, model.centers, rule)
    best = np.lexsort((cands, p[cands], lam))[0]
    cr = float(lam[best])
    target = int(cands[best])
    return DisguiseRecord(pid, home, cr, target, disguised_profile(d, model.centers[target], cr))


def compute_all(data: Dataset, model: ClusterModel, prices: ClusterPrices,
                rule: SwitchRule = "pairwise", threads: int = 1) -> list[DisguiseRecord]:
    """Records for every profile, in profile order regardless of ``threads``."""
    X = data.weights
    ids = data.ids

    def chunk(rng: range) -> list[DisguiseRecord]:
        return [compute_cr(i, model, prices, X, rule, ids[i]) for i in rng]

    n = len(data)
    threads = max(1, int(threads))
    if threads == 1 or n < 2 * threads:
        return chunk(range(n))
    step = -(-n // threads)
    parts = [range(s, min(n, s + step)) for s in range(0, n, step)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        results = list(pool.map(chunk, parts))
    return [r for part in results for r in part]


def trajectories(records: Iterable[DisguiseRecord], theta: float) -> dict[tuple[int, int], int]:
    """Count of profiles able to disguise at ``theta``, keyed by (home, target)."""
    if theta < 0:
        raise ValueError("theta must be >= 0")
    counts = Counter((r.home_cluster, r.target) for r in records if r.cr <= theta)
    return dict(sorted(counts.items()))


def rebuild_records(X: np.ndarray, ids: Sequence[str], centers: np.ndarray, homes: Sequence[int],
                    crs: Sequence[float], targets: Sequence[int | None]) -> list[DisguiseRecord]:
    """Reconstruct records (with disguised profiles) from tabulated cr/target values."""
    out = []
    for i, (pid, h, cr, t) in enumerate(zip(ids, homes, crs, targets)):
        if t is None or not math.isfinite(cr):
            out.append(DisguiseRecord(pid, int(h), INF, None, None))
        else:
            out.append(DisguiseRecord(pid, int(h), float(cr), int(t),
                                      disguised_profile(X[i], centers[t], float(cr))))
    return out
