import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from qvar.errors import DataError, DomainError, ParseError
from qvar.series import (
    PriceSeries,
    ReturnSeries,
    aggregate_scale,
    denormalize,
    ingest_csv,
    log_returns,
    normalize,
)

finite_returns = arrays(np.float64, st.integers(60, 300),
                        elements=st.floats(-0.2, 0.2, allow_nan=False, allow_infinity=False))


def _write(tmp_path, text, name="idx.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


def _prices(closes, start="2001-01-01"):
    dates = np.datetime64(start, "D") + np.arange(len(closes))
    return PriceSeries("t", dates, np.asarray(closes, dtype=float))


# ---------------------------------------------------------------- ingestion


def test_ingest_two_rows(tmp_path):
    ps = ingest_csv(_write(tmp_path, "date,close\n2020-01-02,100.0\n2020-01-03,105.0\n"))
    assert len(ps) == 2
    assert ps.index_name == "idx"
    assert ps.dates[0] == np.datetime64("2020-01-02")
    np.testing.assert_array_equal(ps.closes, [100.0, 105.0])


def test_ingest_unsorted_equals_sorted(tmp_path):
    a = ingest_csv(_write(tmp_path, "date,close\n2020-01-02,1\n2020-01-03,2\n2020-01-06,3\n", "a.csv"))
    b = ingest_csv(_write(tmp_path, "date,close\n2020-01-06,3\n2020-01-02,1\n2020-01-03,2\n", "b.csv"))
    np.testing.assert_array_equal(a.dates, b.dates)
    np.testing.assert_array_equal(a.closes, b.closes)


def test_ingest_blank_rows_extra_columns_and_name(tmp_path):
    text = "Date,Open,Close\n\n2020-01-02,1,10\n  ,  ,  \n2020-01-03,1,11\n\n"
    ps = ingest_csv(_write(tmp_path, text), index_name="DJIA")
    assert ps.index_name == "DJIA"
    np.testing.assert_array_equal(ps.closes, [10.0, 11.0])


@pytest.mark.parametrize("bad, row", [
    ("2020-01-03,-5", 3), ("2020-01-03,0", 3), ("2020-01-03,abc", 3),
    ("2020-13-03,5", 3), ("03/01/2020,5", 3), ("2020-01-03", 3), ("2020-01-03,nan", 3),
])
def test_ingest_parse_error_names_row(tmp_path, bad, row):
    p = _write(tmp_path, f"date,close\n2020-01-02,100\n{bad}\n2020-01-06,101\n")
    with pytest.raises(ParseError) as exc:
        ingest_csv(p)
    assert exc.value.row == row
    assert f"row {row}" in str(exc.value)


def test_ingest_duplicate_date(tmp_path):
    with pytest.raises(DataError, match="duplicate"):
        ingest_csv(_write(tmp_path, "date,close\n2020-01-02,1\n2020-01-02,2\n"))


@pytest.mark.parametrize("text", ["date,close\n2020-01-02,1\n", "date,close\n", ""])
def test_ingest_too_short(tmp_path, text):
    with pytest.raises(DataError):
        ingest_csv(_write(tmp_path, text))


def test_ingest_missing_file_and_header(tmp_path):
    with pytest.raises(DataError, match="no such input"):
        ingest_csv(tmp_path / "absent.csv")
    with pytest.raises(ParseError):
        ingest_csv(_write(tmp_path, "day,price\n2020-01-02,1\n2020-01-03,2\n"))


def test_price_series_invariants():
    with pytest.raises(DataError):
        PriceSeries("x", np.array(["2020-01-02", "2020-01-02"], dtype="datetime64[D]"), [1.0, 2.0])
    with pytest.raises(DataError):
        PriceSeries("x", np.array(["2020-01-03", "2020-01-02"], dtype="datetime64[D]"), [1.0, 2.0])
    with pytest.raises(DataError):
        _prices([1.0, -2.0])


def test_price_between():
    ps = _prices([1, 2, 3, 4, 5])
    sub = ps.between("2001-01-02", "2001-01-04")
    np.testing.assert_array_equal(sub.closes, [2, 3, 4])


# ---------------------------------------------------------------- returns


def test_log_returns_examples():
    r = log_returns(_prices([100.0, 105.0]))
    assert r.values.tolist() == pytest.approx([0.0487902], abs=1e-7)
    assert r.scale_days == 1 and not r.normalized
    assert r.dates[0] == np.datetime64("2001-01-02")
    np.testing.assert_array_equal(log_returns(_prices([7.0] * 5)).values, np.zeros(4))


@settings(max_examples=50)
@given(arrays(np.float64, st.integers(2, 200), elements=st.floats(0.01, 1e6)))
def test_log_returns_telescope(closes):
    r = log_returns(_prices(closes))
    assert len(r) == closes.size - 1
    assert r.values.sum() == pytest.approx(math.log(closes[-1] / closes[0]), abs=1e-9)


@pytest.mark.parametrize("value", [0.0, 0.1, -0.013, 1e-300])
def test_normalize_rejects_constant_series(value):
    # 61 copies of 0.1 average to 0.1 + 1 ulp, leaving a spurious spread
    with pytest.raises(DataError, match="zero variance"):
        normalize(ReturnSeries.from_values(np.full(61, value)))


def test_normalize_examples():
    z = normalize(ReturnSeries.from_values([1.0, 2.0, 3.0]))
    np.testing.assert_allclose(z.values, [-1.0, 0.0, 1.0], atol=1e-15)
    assert z.normalized and z.mu_r == 2.0 and z.sigma_r == 1.0


@settings(max_examples=50)
@given(finite_returns)
def test_normalize_properties(x):
    r = ReturnSeries.from_values(x)
    if np.ptp(x) == 0.0:
        with pytest.raises(DataError):
            normalize(r)
        return
    # away from a near-constant series, so rounding in the mean stays small
    assume(np.std(x) > 1e-6 * np.max(np.abs(x)))
    z = normalize(r)
    assert abs(z.values.mean()) < 1e-12
    assert z.values.std(ddof=1) == pytest.approx(1.0, abs=1e-12)
    assert normalize(z) is z
    np.testing.assert_allclose(denormalize(z).values, x, rtol=0, atol=1e-12)
    np.testing.assert_allclose(z.raw_values(), x, rtol=0, atol=1e-12)


def test_normalize_zero_variance():
    with pytest.raises(DataError):
        normalize(ReturnSeries.from_values([0.01, 0.01, 0.01]))


def test_normalized_series_refuses_slicing():
    z = normalize(ReturnSeries.from_values([1.0, 2.0, 4.0]))
    with pytest.raises(DataError):
        z.between("2000-01-01", None)


def test_return_between_recomputes_moments():
    r = ReturnSeries.from_values([1.0, 2.0, 3.0, 10.0])
    sub = r.between(None, str(r.dates[2]))
    assert sub.mu_r == 2.0 and sub.sigma_r == 1.0


# ---------------------------------------------------------------- aggregation


def test_aggregate_examples():
    r = ReturnSeries.from_values([1.0, 2.0, 3.0, 4.0])
    assert aggregate_scale(r, 1) is r
    agg = aggregate_scale(r, 2)
    np.testing.assert_array_equal(agg.values, [3.0, 7.0])
    assert agg.scale_days == 2
    np.testing.assert_array_equal(agg.dates, r.dates[[1, 3]])
    assert len(aggregate_scale(ReturnSeries.from_values(np.arange(10.0)), 3)) == 3


@pytest.mark.parametrize("k", [0, 61, -1, 2.5])
def test_aggregate_k_out_of_range(k):
    with pytest.raises(DomainError):
        aggregate_scale(ReturnSeries.from_values(np.arange(100.0)), k)


def test_aggregate_needs_raw_daily_input():
    r = ReturnSeries.from_values(np.arange(100.0))
    with pytest.raises(DataError):
        aggregate_scale(normalize(r), 2)
    with pytest.raises(DataError):
        aggregate_scale(aggregate_scale(r, 2), 2)
    with pytest.raises(DataError):
        aggregate_scale(ReturnSeries.from_values([1.0, 2.0]), 5)


@settings(max_examples=50)
@given(finite_returns, st.integers(1, 60))
def test_aggregate_sum_invariant(x, k):
    r = ReturnSeries.from_values(x)
    if x.size < k:
        return
    agg = aggregate_scale(r, k)
    m = x.size // k
    assert len(agg) == m
    assert agg.values.sum() == pytest.approx(x[: m * k].sum(), abs=1e-12)
