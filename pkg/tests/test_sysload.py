import math

import numpy as np
import pytest

from pricevuln.disguise import DisguiseRecord
from pricevuln.profiles import Dataset, NormalizedProfile
from pricevuln.sysload import aggregate, peak_sweep
from pricevuln.zones import ThetaGrid


def _brute(data, records, theta, centers=None):
    total = [0.0] * data.H
    for p, r in zip(data.profiles, records):
        w = p.weights
        if r.cr <= theta:
            w = r.disguised_weights if centers is None else centers[r.target]
        for t in range(data.H):
            total[t] += p.total_energy * w[t]
    return np.array(total)


def test_single_profile():
    p = NormalizedProfile("a", np.array([0.6, 0.4]), 10.0)
    r = DisguiseRecord("a", 0, 0.2, 1, np.array([0.5, 0.5]))
    data = Dataset((p,))
    row = aggregate(data, [r], 0.3)
    assert row.hourly_load.tolist() == [5.0, 5.0]
    assert aggregate(data, [r], 0.1).hourly_load.tolist() == [6.0, 4.0]
    assert row.peak_ratio == pytest.approx(5 / 6)
    with pytest.raises(ValueError):
        aggregate(data, [r], -0.1)


def test_matches_brute_force(demo600):
    f = demo600
    rows = peak_sweep(f.data, f.records, [0.0, 0.05, 0.2, 0.5])
    for row in rows:
        want = _brute(f.data, f.records, row.theta)
        np.testing.assert_allclose(row.hourly_load, want, rtol=1e-12)
        assert row.peak == row.hourly_load.max()
        assert row.peak_hour == int(np.argmax(row.hourly_load))
        assert row.hourly_load.min() >= 0
    full = peak_sweep(f.data, f.records, [0.2], extent="full", centers=f.model.centers)[0]
    np.testing.assert_allclose(full.hourly_load, _brute(f.data, f.records, 0.2, f.model.centers), rtol=1e-12)
    with pytest.raises(ValueError):
        aggregate(f.data, f.records, 0.1, extent="full")


def test_baseline_and_conservation(demo600):
    f = demo600
    rows = peak_sweep(f.data, f.records, ThetaGrid())
    assert rows[0].peak_ratio == 1.0
    if min(r.cr for r in f.records) > 0:
        np.testing.assert_allclose(rows[0].hourly_load, f.data.raw_aggregate(), rtol=1e-12)
    totals = np.array([r.hourly_load.sum() for r in rows])
    assert np.all(np.abs(totals - totals[0]) <= 1e-6 * totals[0])


def test_nobody_moves_under_flat_prices():
    X = np.tile([0.2, 0.3, 0.5], (5, 1))
    data = Dataset(tuple(NormalizedProfile(f"p{i}", x, 2.0 + i) for i, x in enumerate(X)))
    recs = [DisguiseRecord(f"p{i}", 0, math.inf, None, None) for i in range(5)]
    rows = peak_sweep(data, recs, [0.0, 0.5, 1.0])
    assert all(r.hourly_load.tolist() == rows[0].hourly_load.tolist() and r.peak_ratio == 1 for r in rows)
