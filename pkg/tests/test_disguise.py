import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from pricevuln import (
    PriceCurve,
    compute_all,
    compute_cr,
    disguised_profile,
    min_effort,
    price_clusters,
    switch_condition,
    trajectories,
)
from pricevuln.clustering import ClusterModel
from pricevuln.disguise import DisguiseRecord, effort_gap, efforts
from pricevuln.pricing import ClusterPrices

import oracles


def _simplex(H):
    return hnp.arrays(float, H, elements=st.floats(0, 1)).filter(lambda x: x.sum() > 1e-3).map(lambda x: x / x.sum())


def _well_posed(t):
    # with all three points within rounding distance the gap is pure noise
    d, ch, ct = t
    return np.abs(d - ct).sum() > 1e-6 and np.abs(ct - ch).sum() > 1e-6


triples = (
    st.sampled_from([2, 3, 5, 24])
    .flatmap(lambda H: st.tuples(_simplex(H), _simplex(H), _simplex(H)))
    .filter(_well_posed)
)


def test_switch_condition_examples():
    ch, ct = np.array([0.0, 1.0]), np.array([1.0, 0.0])
    assert switch_condition([0.3, 0.7], ch, ct, 1.0)
    assert switch_condition([0.5, 0.5], ch, ct, 0.0)  # equality counts
    assert not switch_condition(ch, ch, ct, 0.25)
    with pytest.raises(ValueError):
        switch_condition([1.0], ch, ct, 0.5)


def test_min_effort_anchors():
    ch, ct = np.array([0.0, 1.0]), np.array([1.0, 0.0])
    assert min_effort(ch, ch, ct) == 0.5
    rng = np.random.default_rng(3)
    for _ in range(20):
        c1, c2 = rng.dirichlet(np.ones(6), size=2)
        assert min_effort(c1, c1, c2) == 0.5
    assert min_effort([0.5, 0.5], ch, ct) == 0
    lam = min_effort([0.25, 0.75], ch, ct)
    assert abs(lam - 1 / 3) <= 1e-12
    assert abs(oracles.bisect_effort([0.25, 0.75], ch, ct) - 1 / 3) <= 1e-12
    # degenerate: identical centers, f is identically zero
    assert min_effort(ch, ch, ch) == 0


@given(triples)
@settings(max_examples=500, deadline=None)
def test_min_effort_matches_bisection(t):
    d, ch, ct = t
    lam = min_effort(d, ch, ct)
    assert 0 <= lam <= 1
    assert abs(lam - oracles.bisect_effort(d.tolist(), ch.tolist(), ct.tolist())) <= 1e-9


@given(triples)
@settings(max_examples=500, deadline=None)
def test_root_certificate(t):
    d, ch, ct = t
    lam = min_effort(d, ch, ct)
    if lam == 0:
        assert effort_gap(d, ch, ct, 0.0) >= -1e-12
    if 0 < lam < 1:
        assert abs(effort_gap(d, ch, ct, lam)) <= 1e-9
        # a flat stretch of the gap near zero makes the 1e-9 probes meaningless
        slope = (effort_gap(d, ch, ct, min(1.0, lam + 1e-6)) - effort_gap(d, ch, ct, lam)) / 1e-6
        assume(slope > 1e-5)
        assert switch_condition(d, ch, ct, lam + 1e-9)
        assert not switch_condition(d, ch, ct, lam - 1e-9)


@given(triples, hnp.arrays(float, 1, elements=st.floats(-5, 5)))
@settings(max_examples=300, deadline=None)
def test_translation_invariance(t, shift):
    d, ch, ct = t
    s = np.random.default_rng(int(abs(shift[0]) * 1e6)).normal(size=d.size) * shift[0]
    assert abs(min_effort(d + s, ch + s, ct + s) - min_effort(d, ch, ct)) <= 1e-9


def test_disguised_profile():
    d, c = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    assert disguised_profile(d, c, 0).tolist() == d.tolist()
    assert disguised_profile(d, c, 1).tolist() == c.tolist()
    assert disguised_profile(d, c, 0.5).tolist() == [0.5, 0.5]
    with pytest.raises(ValueError):
        disguised_profile(d, c, 1.5)


def _toy(rng, k=3, H=5):
    centers = rng.dirichlet(np.ones(H), size=k)
    X = rng.dirichlet(np.ones(H), size=40)
    assignment = np.abs(X[:, None] - centers[None]).sum(axis=2).argmin(axis=1)
    model = ClusterModel(centers, assignment, np.bincount(assignment, minlength=k), 0.0, 0)
    curve = PriceCurve(rng.uniform(0.05, 0.3, H))
    return X, model, price_clusters(model, curve)


@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("rule", ["pairwise", "strict"])
def test_compute_cr_matches_brute_force(seed, rule):
    rng = np.random.default_rng(seed)
    X, model, prices = _toy(rng, k=3 + seed % 3)
    centers = model.centers.tolist()
    for i in range(len(X)):
        rec = compute_cr(i, model, prices, X, rule)
        cr, target = oracles.brute_cr(X[i].tolist(), int(model.assignment[i]), centers,
                                      prices.price.tolist(), strict=rule == "strict")
        if math.isinf(cr):
            assert math.isinf(rec.cr) and rec.target is None and rec.disguised_weights is None
            continue
        assert abs(rec.cr - cr) <= 1e-9
        assert rec.target == target or abs(
            oracles.bisect_effort(X[i].tolist(), centers[rec.home_cluster], centers[rec.target]) - cr
        ) <= 1e-9
        assert prices[rec.target] < prices[rec.home_cluster]
        assert abs(rec.disguised_weights.sum() - 1) <= 1e-9


def test_strict_rule_is_never_easier(rng):
    X, model, prices = _toy(rng, k=5)
    for i in range(len(X)):
        a = compute_cr(i, model, prices, X, "pairwise")
        b = compute_cr(i, model, prices, X, "strict")
        assert b.cr >= a.cr - 1e-12 or math.isinf(a.cr)
        if b.target is not None:
            # the moved profile is nearest to the target among all centers
            x = b.disguised_weights
            dist = np.abs(model.centers - x).sum(axis=1)
            assert dist[b.target] <= dist.min() + 1e-9


def test_cheapest_cluster_and_flat_curve(rng):
    X, model, prices = _toy(rng)
    cheapest = int(np.argmin(prices.price))
    for i in np.flatnonzero(model.assignment == cheapest):
        assert math.isinf(compute_cr(int(i), model, prices, X).cr)
    flat = ClusterPrices(np.full(model.k, 0.1))
    assert all(math.isinf(compute_cr(i, model, flat, X).cr) for i in range(len(X)))
    with pytest.raises(IndexError):
        compute_cr(len(X), model, prices, X)


def test_tie_breaking_prefers_cheaper_then_lower_index():
    # two targets that are mirror images of each other relative to d and home
    centers = np.array([[0.5, 0.25, 0.25], [0.25, 0.5, 0.25], [0.25, 0.25, 0.5]])
    X = np.array([[0.6, 0.2, 0.2]])
    model = ClusterModel(centers, np.array([0]), np.array([1, 0, 0]), 0.0, 0)
    lam = min_effort(X[0], centers[0], centers[1])
    assert lam == min_effort(X[0], centers[0], centers[2])
    assert compute_cr(0, model, ClusterPrices([0.3, 0.2, 0.1]), X).target == 2
    assert compute_cr(0, model, ClusterPrices([0.3, 0.1, 0.1]), X).target == 1


def test_efforts_marks_expensive_targets_infeasible(rng):
    X, model, prices = _toy(rng, k=4)
    home = int(model.assignment[0])
    res = efforts(X[0], home, model, prices)
    assert [r.target for r in res] == [n for n in range(4) if n != home]
    for r in res:
        assert r.feasible == (prices[r.target] < prices[home])
        if r.feasible:
            assert r.lambda_star == pytest.approx(min_effort(X[0], model.centers[home], model.centers[r.target]))


def test_compute_all_thread_independent(demo600):
    f = demo600
    one = compute_all(f.data, f.model, f.prices, threads=1)
    four = compute_all(f.data, f.model, f.prices, threads=4)
    assert [(r.profile_id, r.cr, r.target) for r in one] == [(r.profile_id, r.cr, r.target) for r in four]


def _rec(home, cr, target):
    return DisguiseRecord("x", home, cr, target, None)


def test_trajectories():
    recs = [_rec(0, 0.0, 1), _rec(0, 0.004, 1), _rec(2, 0.3, 1), _rec(1, math.inf, None), _rec(2, 0.0, 0)]
    assert trajectories(recs, 0) == {(0, 1): 1, (2, 0): 1}
    assert trajectories(recs, 0.01) == {(0, 1): 2, (2, 0): 1}
    assert trajectories(recs, 1.0) == {(0, 1): 2, (2, 0): 1, (2, 1): 1}
    with pytest.raises(ValueError):
        trajectories(recs, -0.1)


def test_trajectories_match_filter(demo600):
    recs = demo600.records
    for theta in (0.0, 0.01, 0.05, 0.2, 1.0):
        want = {}
        for r in recs:
            if r.cr <= theta:
                want[(r.home_cluster, r.target)] = want.get((r.home_cluster, r.target), 0) + 1
        assert trajectories(recs, theta) == want
    assert sum(trajectories(recs, 1.0).values()) == sum(1 for r in recs if r.finite)
