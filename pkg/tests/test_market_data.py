import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regimescope.errors import (
    DuplicateDate,
    EmptyResult,
    MalformedRow,
    NoPeCoverage,
    NonContiguousPe,
    NonPositiveValue,
    ParameterError,
)
from regimescope.market_data import (
    IngestConfig,
    eps_proxy,
    ingest_csv,
    subset_by_date,
    write_csv,
)

from .conftest import make_series, write_rows


def test_three_valid_rows(tmp_path):
    p = write_rows(tmp_path / "a.csv", ["2020-01-01,100,20", "2020-01-02,101,20.5", "2020-01-03,102,21"])
    s = ingest_csv(p)
    assert len(s) == 3
    np.testing.assert_array_equal(s.close, [100, 101, 102])
    assert s.pe_start == 0


def test_rows_are_sorted_by_date(tmp_path):
    p = write_rows(tmp_path / "a.csv", ["2020-01-03,102,", "2020-01-01,100,", "2020-01-02,101,"])
    s = ingest_csv(p)
    assert [str(d) for d in s.dates] == ["2020-01-01", "2020-01-02", "2020-01-03"]
    assert s.pe_start is None


def test_negative_close_rejected(tmp_path):
    p = write_rows(tmp_path / "a.csv", ["2020-01-01,100,20", "2020-01-02,-5,20"])
    with pytest.raises(NonPositiveValue) as exc:
        ingest_csv(p)
    assert "line 3" in str(exc.value)


def test_zero_pe_rejected(tmp_path):
    p = write_rows(tmp_path / "a.csv", ["2020-01-01,100,0"])
    with pytest.raises(NonPositiveValue):
        ingest_csv(p)


def test_pe_gap_rejected(tmp_path):
    p = write_rows(tmp_path / "a.csv", ["2020-01-01,100,20", "2020-01-02,101,", "2020-01-03,102,21"])
    with pytest.raises(NonContiguousPe):
        ingest_csv(p)


@pytest.mark.parametrize("row", ["2020-01-02,abc,20", "01/02/2020,100,20", "2020-01-02,100,x", "2020-13-02,1,1"])
def test_malformed_rows(tmp_path, row):
    p = write_rows(tmp_path / "a.csv", ["2020-01-01,100,20", row])
    with pytest.raises(MalformedRow):
        ingest_csv(p)


def test_missing_close_column(tmp_path):
    p = write_rows(tmp_path / "a.csv", ["2020-01-01,100"], header="date,price")
    with pytest.raises(MalformedRow):
        ingest_csv(p)


def test_duplicate_date(tmp_path):
    p = write_rows(tmp_path / "a.csv", ["2020-01-01,100,", "2020-01-01,101,"])
    with pytest.raises(DuplicateDate):
        ingest_csv(p)


def test_date_filter(tmp_path):
    import datetime as dt

    p = write_rows(tmp_path / "a.csv", [f"2020-01-0{i},{100 + i}," for i in range(1, 6)])
    s = ingest_csv(p, IngestConfig(start=dt.date(2020, 1, 2), end=dt.date(2020, 1, 4)))
    np.testing.assert_array_equal(s.close, [102, 103, 104])


def test_pe_column_optional(tmp_path):
    p = write_rows(tmp_path / "a.csv", ["2020-01-01,100", "2020-01-02,101"], header="date,close")
    assert not ingest_csv(p).has_pe.any()


def test_eps_simple():
    e = eps_proxy(make_series([100.0], [20.0]))
    assert e.eps[0] == 5.0


def test_eps_growth_formula():
    close = np.full(253, 100.0)
    pe = np.full(253, 20.0)
    pe[252] = 100.0 / 6.0  # eps 6 vs 5 a year earlier
    e = eps_proxy(make_series(close, pe))
    assert e.trailing_growth[252] == pytest.approx(20.0, abs=1e-9)
    assert np.isnan(e.trailing_growth[:252]).all()


def test_eps_constant_growth_zero():
    e = eps_proxy(make_series(np.full(504, 100.0), np.full(504, 20.0)))
    defined = e.trailing_growth[~np.isnan(e.trailing_growth)]
    assert defined.size == 252
    assert np.all(defined == 0.0)


def test_eps_requires_pe():
    with pytest.raises(NoPeCoverage):
        eps_proxy(make_series([100.0, 101.0]))


def test_eps_only_on_covered_suffix():
    e = eps_proxy(make_series([100.0, 50.0, 60.0], [np.nan, 10.0, 12.0]))
    assert len(e) == 2 and str(e.dates[0]) == "2000-01-04"
    np.testing.assert_array_equal(e.eps, [5.0, 5.0])


positive = st.floats(min_value=1e-3, max_value=1e6, allow_nan=False, allow_infinity=False)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(positive, positive), min_size=1, max_size=40))
def test_eps_times_pe_recovers_close(pairs):
    close, pe = map(np.array, zip(*pairs))
    e = eps_proxy(make_series(close, pe))
    back = e.eps * pe
    assert np.all(np.abs(back - close) <= np.spacing(close))


@settings(max_examples=40, deadline=None)
@given(
    st.lists(positive, min_size=1, max_size=30),
    st.integers(min_value=0, max_value=30),
)
def test_csv_round_trip(tmp_path_factory, close, gap):
    pe = np.array([np.nan] * min(gap, len(close)) + [c / 7.3 for c in close[min(gap, len(close)):]])
    s = make_series(close, pe)
    path = tmp_path_factory.mktemp("rt") / "s.csv"
    write_csv(s, path)
    assert ingest_csv(path) == s


def test_subset_full_range_identity():
    s = make_series([1.0, 2.0, 3.0])
    assert subset_by_date(s, s.dates[0], s.dates[-1]) == s


def test_subset_single_day():
    s = make_series([1.0, 2.0, 3.0])
    sub = subset_by_date(s, s.dates[1], s.dates[1])
    assert len(sub) == 1 and sub.close[0] == 2.0


def test_subset_no_overlap():
    s = make_series([1.0, 2.0, 3.0])
    with pytest.raises(EmptyResult):
        subset_by_date(s, np.datetime64("1990-01-01"), np.datetime64("1990-02-01"))


def test_subset_reversed_bounds():
    s = make_series([1.0, 2.0, 3.0])
    with pytest.raises(ParameterError):
        subset_by_date(s, s.dates[2], s.dates[0])


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 19), st.integers(0, 19))
def test_subset_idempotent(a, b):
    s = make_series(np.arange(1.0, 21.0), np.r_[np.full(5, np.nan), np.arange(5.0, 20.0)])
    lo, hi = s.dates[min(a, b)], s.dates[max(a, b)]
    once = subset_by_date(s, lo, hi)
    assert subset_by_date(once, lo, hi) == once


def test_series_is_immutable():
    s = make_series([1.0, 2.0])
    with pytest.raises(ValueError):
        s.close[0] = 5.0
