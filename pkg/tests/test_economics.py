import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from pricevuln import disguised_profile
from pricevuln.disguise import DisguiseRecord
from pricevuln.economics import (
    UtilityParams,
    benefit_curves,
    benefits,
    bill_benefit,
    bill_difference,
    happiness,
    utility,
    utility_gain,
)
from pricevuln.pricing import ClusterPrices
from pricevuln.profiles import NormalizedProfile

simplex = hnp.arrays(float, 24, elements=st.floats(0, 1)).filter(lambda x: x.sum() > 1e-3).map(lambda x: x / x.sum())


def _profile(w, E=30.0):
    return NormalizedProfile("x", np.asarray(w, float), E)


def test_bill_benefit_examples():
    prices = ClusterPrices([0.20, 0.15, 0.20])
    d = np.full(4, 0.25)
    rec = DisguiseRecord("x", 0, 0.1, 1, d)
    assert bill_benefit(rec, _profile(d), prices).benefit == pytest.approx(1.5, abs=1e-12)
    assert bill_benefit(rec, _profile(d), prices, "normalized").benefit == pytest.approx(0.05, abs=1e-15)
    same = DisguiseRecord("x", 0, 0.1, 2, d)
    assert bill_benefit(same, _profile(d), prices).benefit == 0
    none = bill_benefit(DisguiseRecord("x", 0, math.inf, None, None), _profile(d), prices)
    assert none.benefit == 0 and not none.strategic
    with pytest.raises(ValueError):
        bill_benefit(rec, _profile(d), prices, "kwh")


@given(simplex, simplex, st.floats(0, 1), st.floats(0.01, 1.0), st.floats(0.01, 1.0))
@settings(max_examples=300)
def test_literal_bill_difference_reduces_to_price_gap(d, c, lam, p_home, p_target):
    # a convex combination of unit-sum vectors stays unit-sum, so the bills differ only by price
    d_tilde = disguised_profile(d, c, lam)
    assert abs(bill_difference(p_home, d, p_target, d_tilde) - (p_home - p_target)) <= 1e-12


def test_happiness_and_utility_examples():
    d = np.array([0.5, 0.5])
    p = UtilityParams(u_max=10, c=2)
    assert happiness(d, d, p) == 10
    assert happiness([0.75, 0.25], d, p) == 9
    assert happiness([1.0, 0.0], d, UtilityParams(u_max=3, c=0)) == 3
    assert utility(d, 30, 0.2, d, p) == pytest.approx(10 - 6)
    assert utility([0.75, 0.25], 30, 0.0, d, p) == 9
    # composite case recomputed term by term
    assert utility([0.75, 0.25], 30, 0.2, d, p) == pytest.approx(10 - 2 * 0.5 - 0.2 * 30)
    with pytest.raises(ValueError):
        UtilityParams(c=-1)


def test_utility_gain(demo600):
    f = demo600
    strat = [(r, p) for r, p in zip(f.records, f.data.profiles) if r.finite]
    assert strat
    for r, p in strat:
        bb = bill_benefit(r, p, f.prices).benefit
        assert bb > 0
        assert abs(utility_gain(r, p, f.prices, UtilityParams(u_max=5.0, c=0.0)) - bb) <= 1e-12
        moved = np.abs(r.disguised_weights - p.weights).sum()
        g = utility_gain(r, p, f.prices, UtilityParams(c=3.0))
        assert g == pytest.approx(bb - 3.0 * moved, abs=1e-12)
        assert utility_gain(r, p, f.prices, UtilityParams(c=1e6)) < 0 or moved == 0
    r0 = DisguiseRecord("x", 0, 0.0, 1, np.array([0.5, 0.5]))
    prof = _profile([0.5, 0.5])
    prices = ClusterPrices([0.3, 0.1])
    assert utility_gain(r0, prof, prices, UtilityParams(c=100)) == pytest.approx(bill_benefit(r0, prof, prices).benefit, abs=1e-12)
    with pytest.raises(ValueError):
        utility_gain(DisguiseRecord("x", 0, math.inf, None, None), prof, prices, UtilityParams())


def test_benefit_curves_recompute(demo600):
    f = demo600
    grid = [0.0, 0.01, 0.05, 0.2, 1.0]
    rows = benefit_curves(f.records, f.data.profiles, f.prices, grid)
    b = [x.benefit for x in benefits(f.records, f.data.profiles, f.prices)]
    prev = -1.0
    for row in rows:
        cum = [b[i] for i, r in enumerate(f.records) if r.cr <= row.theta]
        marg = [b[i] for i, r in enumerate(f.records) if prev < r.cr <= row.theta]
        assert row.n_strategic == len(cum)
        assert row.avg_cumulative == pytest.approx(sum(cum) / len(cum) if cum else 0.0, abs=1e-12)
        assert row.avg_marginal == pytest.approx(sum(marg) / len(marg) if marg else 0.0, abs=1e-12)
        prev = row.theta
    finite = [b[i] for i, r in enumerate(f.records) if r.finite]
    assert rows[-1].avg_cumulative == pytest.approx(np.mean(finite), abs=1e-12)
    with pytest.raises(ValueError):
        benefit_curves(f.records, f.data.profiles, f.prices, [])


def test_benefit_curve_below_min_cr(demo600):
    f = demo600
    lo = min(r.cr for r in f.records)
    if lo > 0:
        row = benefit_curves(f.records, f.data.profiles, f.prices, [lo / 2, 1.0])[0]
        assert row.avg_cumulative == 0 and row.n_strategic == 0
