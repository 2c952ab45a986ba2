"""Hand-built populations with known disguise behaviour."""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

import numpy as np

from .pricing import PriceCurve, mci, synthetic_curve
from .profiles import DEFAULT_H, Dataset, LoadProfile, demo_prototypes, normalize

# night owl, classic two-peak, evening: cheap -> expensive under synthetic_curve()
PLANTED_SHAPES = (1, 0, 3)
BOUNDARY_EPS = (0.002, 0.004, 0.015, 0.02)


@dataclass
class PlantedPopulation:
    data: Dataset
    prototypes: np.ndarray  # (3, H) unit-sum, sorted by price
    curve: PriceCurve
    roles: tuple[str, ...]  # "center" or "boundary" per profile
    homes: tuple[int, ...]  # generating prototype per profile
    expected_cr: tuple[float, ...]  # boundary profiles only, nan elsewhere

    @property
    def boundary(self) -> np.ndarray:
        return np.array([r == "boundary" for r in self.roles])


def planted_population(members: int = 40, H: int = DEFAULT_H, seed: int = 0) -> PlantedPopulation:
    """Three clusters plus profiles planted just inside the home side of an l1 boundary.

    Cluster members are the prototype itself plus symmetric pairs
    ``c +/- delta (e_a - e_b)``. Each coordinate then has a median equal to the
    prototype, so median clustering recovers the prototypes exactly. A boundary
    profile ``(0.5 + eps) c_home + (0.5 - eps) c_target`` has effort
    ``eps / (0.5 + eps)`` toward the cheaper ``c_target``.
    """
    lib = demo_prototypes(H)
    curve = synthetic_curve(H)
    protos = np.array([lib[j] / lib[j].sum() for j in PLANTED_SHAPES])
    protos = protos[np.argsort([mci(p, curve) for p in protos], kind="stable")]
    rng = np.random.default_rng(seed)

    weights, roles, homes, expected = [], [], [], []
    for h, c in enumerate(protos):
        weights.append(c)
        pairs = (members - 1) // 2
        for _ in range(pairs):
            a, b = rng.choice(H, size=2, replace=False)
            delta = 0.3 * min(c[a], c[b])
            e = np.zeros(H)
            e[a], e[b] = delta, -delta
            weights.extend([c + e, c - e])
        roles.extend(["center"] * (1 + 2 * pairs))
        homes.extend([h] * (1 + 2 * pairs))
        expected.extend([np.nan] * (1 + 2 * pairs))
    for h in (1, 2):
        for t in range(h):
            for eps in BOUNDARY_EPS:
                weights.append((0.5 + eps) * protos[h] + (0.5 - eps) * protos[t])
                roles.append("boundary")
                homes.append(h)
                expected.append(eps / (0.5 + eps))

    profiles = []
    day0 = dt.date(2015, 5, 1)
    for i, w in enumerate(weights):
        energy = 30.0 * w
        user = f"p{i:04d}"
        profiles.append(normalize(LoadProfile(f"{user}@{day0.isoformat()}", user, day0, energy)))
    data = Dataset(tuple(profiles), (), tuple(homes))
    return PlantedPopulation(data, protos, curve, tuple(roles), tuple(homes), tuple(expected))
