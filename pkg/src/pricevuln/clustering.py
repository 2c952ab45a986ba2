"""k-medians / k-means style clustering of normalized profiles under the l1 metric."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .profiles import Dataset, NormalizedProfile

CenterUpdate = Literal["median", "mean"]


def l1_distance(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    return float(np.abs(a - b).sum())


def l1_to_centers(X: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """(n, k) matrix of l1 distances between rows of ``X`` and ``centers``."""
    return np.abs(X[:, None, :] - centers[None, :, :]).sum(axis=2)


@dataclass
class ClusterConfig:
    seed: int = 0
    max_iters: int = 300
    tol: float = 1e-10
    center_update: CenterUpdate = "median"


@dataclass(eq=False)
class ClusterModel:
    centers: np.ndarray  # (k, H), unit l1 sum rows
    assignment: np.ndarray  # (n,) int, the cluster of each profile
    sizes: np.ndarray  # (k,) int
    objective: float
    iterations: int
    history: list[float] = field(default_factory=list)

    @property
    def k(self) -> int:
        return self.centers.shape[0]

    @property
    def H(self) -> int:
        return self.centers.shape[1]

    def members(self, n: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == n)


def _renormalize(c: np.ndarray) -> np.ndarray:
    s = c.sum()
    # leave already-unit vectors bit-identical (a singleton's median is the point itself)
    return c if abs(s - 1.0) <= 1e-14 else c / s


def _seed_centers(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Seeded greedy farthest-point initialization (ties go to the lowest index)."""
    n = X.shape[0]
    chosen = [int(rng.integers(n))]
    mind = np.abs(X - X[chosen[0]]).sum(axis=1)
    for _ in range(1, k):
        j = int(np.argmax(mind))
        chosen.append(j)
        mind = np.minimum(mind, np.abs(X - X[j]).sum(axis=1))
    return X[chosen].copy()


def _update(X: np.ndarray, labels: np.ndarray, centers: np.ndarray, rule: str) -> np.ndarray:
    k = centers.shape[0]
    new = centers.copy()
    for j in range(k):
        idx = labels == j
        if not idx.any():
            continue
        pts = X[idx]
        c = np.median(pts, axis=0) if rule == "median" else pts.mean(axis=0)
        if c.sum() <= 0:
            # all-zero coordinate median; the mean is the closest unit-sum fallback
            c = pts.mean(axis=0)
        new[j] = _renormalize(c)
    return new


def _reseed_empty(X, labels, dist, centers):
    """Move each empty center onto the profile farthest from its own center."""
    k = centers.shape[0]
    own = dist[np.arange(len(labels)), labels]
    taken: set[int] = set()
    for j in range(k):
        if np.any(labels == j):
            continue
        order = np.argsort(-own, kind="stable")
        for i in order:
            if int(i) not in taken and np.sum(labels == labels[i]) > 1:
                break
        else:
            raise RuntimeError("cannot reseed empty cluster")
        taken.add(int(i))
        centers[j] = X[i]
        labels[i] = j
        own[i] = 0.0
    return centers, labels


def _assign(X, centers):
    dist = l1_to_centers(X, centers)
    labels = np.argmin(dist, axis=1)
    if np.bincount(labels, minlength=centers.shape[0]).min() == 0:
        centers, labels = _reseed_empty(X, labels, dist, centers)
        dist = l1_to_centers(X, centers)
        # duplicated points can leave a reseeded center tied with a lower index
        labels = np.argmin(dist, axis=1)
    return dist, labels


def fit(data: Dataset | np.ndarray, k: int, config: ClusterConfig | None = None) -> ClusterModel:
    """Lloyd-style alternation under l1.

    Assignment uses the nearest center (lowest index on ties); the update is
    the coordinate-wise median (default) or mean, renormalized to unit sum.
    Stops when assignments repeat, the objective improves by less than
    ``tol``, or ``max_iters`` is reached.
    """
    cfg = config or ClusterConfig()
    if cfg.center_update not in ("median", "mean"):
        raise ValueError(f"unknown center_update {cfg.center_update!r}")
    if cfg.max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    X = data.weights if isinstance(data, Dataset) else np.asarray(data, dtype=float)
    n = X.shape[0]
    if n == 0:
        raise ValueError("empty dataset")
    if not 1 <= k <= n:
        raise ValueError(f"k={k} must be in [1, {n}]")

    rng = np.random.default_rng(cfg.seed)
    centers = _seed_centers(X, k, rng)
    dist, labels = _assign(X, centers)
    obj = float(dist[np.arange(n), labels].sum())
    history = [obj]

    it = 0
    while it < cfg.max_iters:
        it += 1
        centers = _update(X, labels, centers, cfg.center_update)
        dist, new_labels = _assign(X, centers)
        new_obj = float(dist[np.arange(n), new_labels].sum())
        history.append(new_obj)
        unchanged = np.array_equal(new_labels, labels)
        improvement = obj - new_obj
        labels, obj = new_labels, new_obj
        if unchanged or improvement < cfg.tol:
            break

    sizes = np.bincount(labels, minlength=k)
    return ClusterModel(centers, labels.astype(int), sizes, obj, it, history)


def assign(model: ClusterModel, p: NormalizedProfile | np.ndarray) -> int:
    w = p.weights if isinstance(p, NormalizedProfile) else np.asarray(p, dtype=float)
    if w.shape != (model.H,):
        raise ValueError(f"dimension mismatch: {w.shape} vs ({model.H},)")
    return int(np.argmin(np.abs(model.centers - w).sum(axis=1)))


def cluster_radius(model: ClusterModel, n: int, X: np.ndarray) -> float:
    """Largest l1 distance from center ``n`` to one of its members (rows of ``X``)."""
    idx = model.members(n)
    if idx.size == 0:
        raise ValueError(f"cluster {n} is empty")
    return float(np.abs(X[idx] - model.centers[n]).sum(axis=1).max())
