import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regimescope.errors import DegenerateMarginal, DegenerateMarginalWarning, LengthMismatch, NoPeCoverage, TooShort
from regimescope.infoflow import (
    JointHistogram,
    driver_target,
    info_report,
    lagged_nmi,
    mutual_information,
    symbolize,
    transfer_entropy,
    transfer_entropy_detail,
)
from regimescope.market_data import DailySeries

from .conftest import make_series
from .oracles import brute_plugin_mi, exact_te_coupled_coin

N = 10_000


def _coins(seed, n=N):
    return np.random.default_rng(seed).integers(0, 2, n).astype(float)


def test_mi_self_four_symbols():
    x = np.tile([0.0, 1.0, 2.0, 3.0], 250)
    assert mutual_information(x, x) == pytest.approx(math.log(4), abs=1e-12)


def test_mi_independent_discrete():
    rng = np.random.default_rng(1)
    x = rng.integers(0, 4, N).astype(float)
    y = rng.integers(0, 4, N).astype(float)
    mi = mutual_information(x, y)
    assert mi <= 0.02
    assert mi == pytest.approx(brute_plugin_mi(symbolize(x)[0], symbolize(y)[0]), abs=1e-12)


def test_mi_matches_brute_force_on_continuous(rng):
    x = rng.normal(size=3000)
    y = x + rng.normal(size=3000)
    assert mutual_information(x, y) == pytest.approx(brute_plugin_mi(symbolize(x)[0], symbolize(y)[0]), abs=1e-12)


def test_mi_negation_bijection(rng):
    x = rng.normal(size=2000)
    assert mutual_information(x, -x) == pytest.approx(mutual_information(x, x), abs=1e-12)


def test_mi_degenerate_marginal_warns():
    with pytest.warns(DegenerateMarginalWarning):
        assert mutual_information(np.ones(50), np.arange(50.0)) == 0.0


def test_mi_length_mismatch():
    with pytest.raises(LengthMismatch):
        mutual_information(np.arange(5.0), np.arange(6.0))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 400), st.floats(0, 3))
def test_mi_symmetric_exactly(seed, n, coupling):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=n)
    y = coupling * x + rng.normal(size=n)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateMarginalWarning)
        assert mutual_information(x, y) == mutual_information(y, x)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(["exp", "cube", "rank"]))
def test_mi_monotone_invariance_with_mapped_edges(seed, kind):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=500)
    y = np.sin(x) + 0.3 * rng.normal(size=500)
    base = JointHistogram.build(x, y)
    if kind == "rank":
        # piecewise-linear map through the order statistics sends each value to its rank
        order = np.sort(x)
        f = lambda v: np.interp(v, order, np.arange(order.size, dtype=float))  # noqa: E731
    else:
        f = np.exp if kind == "exp" else (lambda v: v**3)
    moved = JointHistogram.build(f(x), y, x_edges=f(base.x_edges), y_edges=base.y_edges)
    np.testing.assert_array_equal(moved.joint, base.joint)
    assert moved.mutual_information() == base.mutual_information()


def test_joint_histogram_marginals(rng):
    x, y = rng.normal(size=700), rng.exponential(size=700)
    h = JointHistogram.build(x, y)
    assert h.joint.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(h.joint >= 0)
    np.testing.assert_allclose(h.joint.sum(axis=1), np.histogram(x, h.x_edges)[0] / 700, atol=1e-15)
    np.testing.assert_allclose(h.joint.sum(axis=0), np.histogram(y, h.y_edges)[0] / 700, atol=1e-15)


def test_symbolize_matches_histogram(rng):
    x = rng.normal(size=1000)
    sym, edges = symbolize(x)
    np.testing.assert_array_equal(np.bincount(sym, minlength=len(edges) - 1), np.histogram(x, edges)[0])


def test_nmi_lagged_copy():
    g = np.random.default_rng(2).normal(size=2000)
    curve = lagged_nmi(g, np.roll(g, 3), max_lag=5)
    assert curve[2] == pytest.approx(1.0, abs=1e-12)
    assert np.all(curve[[0, 1, 3, 4]] < 0.5)


def test_nmi_self_is_one(rng):
    x = rng.normal(size=500)
    # target[t + 1] == x[t], so lag 1 pairs x with itself
    assert lagged_nmi(x, np.roll(x, 1), 1)[0] == pytest.approx(1.0, abs=1e-12)


def test_nmi_independent(rng):
    curve = lagged_nmi(rng.integers(0, 4, N).astype(float), rng.integers(0, 4, N).astype(float), 10)
    assert np.all(curve <= 0.05)
    assert np.all(curve >= 0)


def test_nmi_zero_lag_empty():
    assert lagged_nmi(np.arange(10.0), np.arange(10.0), 0).size == 0


def test_nmi_too_short():
    with pytest.raises(TooShort):
        lagged_nmi(np.arange(5.0), np.arange(5.0), 4)


def test_te_oracle_value():
    assert exact_te_coupled_coin() == pytest.approx(math.log(2), abs=1e-15)


def test_te_coupled_coin():
    x = _coins(3)
    y = np.r_[0.0, x[:-1]]
    assert transfer_entropy(x, y) == pytest.approx(math.log(2), abs=0.02)
    assert transfer_entropy(y, x) <= 0.02


def test_te_independent():
    x, y = _coins(4), _coins(5)
    assert transfer_entropy(x, y) <= 0.02
    assert transfer_entropy(y, x) <= 0.02


def test_te_shuffle_baseline():
    x = _coins(6)
    y = np.r_[0.0, x[:-1]]
    shuffled = np.random.default_rng(7).permutation(x)
    assert transfer_entropy(shuffled, y) <= 0.02


def test_te_longer_history():
    x = _coins(8)
    y = np.r_[0.0, 0.0, x[:-2]]  # two-step delay: visible only with k >= 2
    assert transfer_entropy(x, y, k=1) <= 0.02
    assert transfer_entropy(x, y, k=2) == pytest.approx(math.log(2), abs=0.02)


def test_te_clipping_flag():
    d = transfer_entropy_detail(_coins(9, 200), _coins(10, 200))
    assert d.value == max(0.0, d.raw)
    assert d.clipped == (d.raw < 0)


def test_te_degenerate():
    with pytest.raises(DegenerateMarginal):
        transfer_entropy(np.ones(100), _coins(1, 100))


def test_te_too_short():
    with pytest.raises(TooShort):
        transfer_entropy(np.arange(3.0), np.arange(3.0), k=2)


def _coupled_market(n=4000, seed=12):
    rng = np.random.default_rng(seed)
    pe = rng.uniform(15, 25, n)
    ret = np.empty(n - 1)  # ret[t]: close[t] -> close[t + 1]
    ret[0] = 0.1
    ret[1:] = np.where(pe[:-2] > 20, 1.0, -1.0) + 0.05 * rng.standard_normal(n - 2)
    close = 100 * np.cumprod(np.r_[1.0, 1 + ret / 100])
    return DailySeries(np.datetime64("2001-01-01") + np.arange(n), close, pe)


def test_info_report_direction():
    rep = info_report(_coupled_market(), k=1, max_lag=5)
    assert rep.te_forward > 0.5
    assert rep.te_forward > rep.te_backward
    assert rep.mi >= 0
    assert all(0 <= v <= 1 for v in rep.nmi)


def test_info_report_echoes_parameters():
    rep = info_report(_coupled_market(), k=2, max_lag=7)
    assert rep.history_k == 2 and rep.max_lag == 7 and len(rep.nmi) == 7


def test_info_report_deterministic():
    s = _coupled_market()
    a, b = info_report(s, max_lag=4), info_report(s, max_lag=4)
    assert (a.mi, a.nmi, a.te_forward, a.te_backward) == (b.mi, b.nmi, b.te_forward, b.te_backward)


def test_info_report_constant_pe():
    s = make_series(np.linspace(100, 120, 300), np.full(300, 18.0))
    with pytest.raises(DegenerateMarginal):
        info_report(s)


def test_info_report_needs_pe():
    with pytest.raises(NoPeCoverage):
        info_report(make_series(np.linspace(100, 120, 300)))


def test_driver_target_pairing():
    s = make_series([100.0, 110.0, 99.0, 99.0], [np.nan, 10.0, 11.0, 12.0])
    pe, ret = driver_target(s)
    np.testing.assert_array_equal(pe, [10.0, 11.0])
    np.testing.assert_allclose(ret, [-10.0, 0.0])
