"""Clustering-based electricity pricing and how consumers can game it by disguising their load profiles."""

from .clustering import ClusterConfig, ClusterModel, assign, cluster_radius, fit, l1_distance
from .disguise import (
    DisguiseRecord,
    EffortResult,
    compute_all,
    compute_cr,
    disguised_profile,
    min_effort,
    switch_condition,
    trajectories,
)
from .economics import (
    BenefitRecord,
    UtilityParams,
    benefit_curves,
    bill_benefit,
    happiness,
    utility,
    utility_gain,
)
from .pricing import ClusterPrices, PriceCurve, load_price_curve, mci, price_clusters, synthetic_curve
from .profiles import (
    Dataset,
    LoadProfile,
    MixtureSpec,
    NormalizedProfile,
    ingest_csv,
    normalize,
    synthesize,
)
from .sysload import SystemLoadRow, aggregate, peak_sweep
from .zones import ThetaGrid, ZoneRow, n_sensitive, stable_radius, sweep

__version__ = "0.1.0"
