"""Daily close / P/E ingestion and the implied-earnings (EPS) proxy."""

from __future__ import annotations

import csv
import datetime as dt
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    DuplicateDate,
    EmptyResult,
    MalformedRow,
    NoPeCoverage,
    NonContiguousPe,
    NonPositiveValue,
    ParameterError,
)

TRADING_YEAR = 252


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def _as_date(value) -> np.datetime64:
    if isinstance(value, np.datetime64):
        return value.astype("datetime64[D]")
    if isinstance(value, dt.date):
        return np.datetime64(value.isoformat(), "D")
    return np.datetime64(dt.date.fromisoformat(str(value)).isoformat(), "D")


@dataclass(frozen=True, eq=False)
class DailySeries:
    """Trading-day observations: close price and optional P/E.

    ``pe`` holds NaN where the ratio is absent. Present values always form a
    contiguous suffix of the date range.
    """

    dates: np.ndarray
    close: np.ndarray
    pe: np.ndarray

    def __post_init__(self):
        dates = np.asarray(self.dates, dtype="datetime64[D]")
        close = np.asarray(self.close, dtype=float)
        pe = (
            np.full(len(close), np.nan)
            if self.pe is None
            else np.asarray(self.pe, dtype=float)
        )
        if not (len(dates) == len(close) == len(pe)):
            raise ParameterError("dates, close and pe must have equal length")
        if len(dates) > 1:
            steps = np.diff(dates).astype(np.int64)
            if np.any(steps == 0):
                i = int(np.flatnonzero(steps == 0)[0]) + 1
                raise DuplicateDate("duplicate date", date=str(dates[i]))
            if np.any(steps < 0):
                raise ParameterError("dates must be strictly increasing")
        bad = ~(close > 0)
        if np.any(bad):
            i = int(np.flatnonzero(bad)[0])
            raise NonPositiveValue(f"close must be > 0, got {close[i]}", date=str(dates[i]))
        present = ~np.isnan(pe)
        if np.any(pe[present] <= 0):
            i = int(np.flatnonzero(present & (pe <= 0))[0])
            raise NonPositiveValue(f"pe must be > 0, got {pe[i]}", date=str(dates[i]))
        if present.any():
            first = int(np.argmax(present))
            if not present[first:].all():
                i = first + int(np.argmin(present[first:]))
                raise NonContiguousPe(
                    "pe coverage must be a contiguous suffix of the date range",
                    date=str(dates[i]),
                )
        object.__setattr__(self, "dates", _frozen(dates))
        object.__setattr__(self, "close", _frozen(close))
        object.__setattr__(self, "pe", _frozen(pe))

    def __len__(self) -> int:
        return len(self.dates)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DailySeries):
            return NotImplemented
        return (
            np.array_equal(self.dates, other.dates)
            and np.array_equal(self.close, other.close)
            and np.array_equal(self.pe, other.pe, equal_nan=True)
        )

    @property
    def has_pe(self) -> np.ndarray:
        return ~np.isnan(self.pe)

    @property
    def pe_start(self) -> int | None:
        """Row index where P/E coverage begins, or None."""
        present = self.has_pe
        return int(np.argmax(present)) if present.any() else None


@dataclass(frozen=True)
class IngestConfig:
    date_col: str = "date"
    close_col: str = "close"
    pe_col: str = "pe"
    start: dt.date | None = None
    end: dt.date | None = None


def _parse_float(text: str, what: str, line: int, date: str | None) -> float:
    try:
        value = float(text)
    except ValueError:
        raise MalformedRow(f"unparseable {what} {text!r}", row=line, date=date) from None
    if not math.isfinite(value):
        raise MalformedRow(f"non-finite {what} {text!r}", row=line, date=date)
    return value


def ingest_csv(path: str | Path, config: IngestConfig | None = None) -> DailySeries:
    """Read a ``date,close[,pe]`` CSV into a validated, date-sorted series."""
    config = config or IngestConfig()
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in (config.date_col, config.close_col):
            if col not in header:
                raise MalformedRow(f"missing column {col!r} in header", row=1)
        has_pe_col = config.pe_col in header
        for rec in reader:
            line = reader.line_num
            raw_date = (rec.get(config.date_col) or "").strip()
            try:
                day = dt.date.fromisoformat(raw_date)
                if len(raw_date) != 10:
                    raise ValueError
            except ValueError:
                raise MalformedRow(f"unparseable date {raw_date!r}", row=line) from None
            iso = day.isoformat()
            close = _parse_float((rec.get(config.close_col) or "").strip(), "close", line, iso)
            if close <= 0:
                raise NonPositiveValue(f"close must be > 0, got {close}", row=line, date=iso)
            pe = math.nan
            raw_pe = (rec.get(config.pe_col) or "").strip() if has_pe_col else ""
            if raw_pe:
                pe = _parse_float(raw_pe, "pe", line, iso)
                if pe <= 0:
                    raise NonPositiveValue(f"pe must be > 0, got {pe}", row=line, date=iso)
            rows.append((day, close, pe, line))

    rows = [
        r
        for r in rows
        if (config.start is None or r[0] >= config.start)
        and (config.end is None or r[0] <= config.end)
    ]
    rows.sort(key=lambda r: r[0])
    for prev, cur in zip(rows, rows[1:]):
        if prev[0] == cur[0]:
            raise DuplicateDate("duplicate date", row=cur[3], date=cur[0].isoformat())
    seen_pe = False
    gap_line = None
    for day, _, pe, line in rows:
        if not math.isnan(pe):
            if gap_line is not None:
                raise NonContiguousPe(
                    "pe present, then absent, then present again",
                    row=gap_line[0],
                    date=gap_line[1],
                )
            seen_pe = True
        elif seen_pe and gap_line is None:
            gap_line = (line, day.isoformat())
    if gap_line is not None:
        raise NonContiguousPe(
            "pe coverage ends before the last row", row=gap_line[0], date=gap_line[1]
        )

    return DailySeries(
        dates=np.array([r[0].isoformat() for r in rows], dtype="datetime64[D]"),
        close=np.array([r[1] for r in rows], dtype=float),
        pe=np.array([r[2] for r in rows], dtype=float),
    )


def write_csv(series: DailySeries, path: str | Path) -> None:
    """Write ``series`` in the ingest format; ``repr`` keeps floats lossless."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["date", "close", "pe"])
        for d, c, p in zip(series.dates, series.close, series.pe):
            writer.writerow([str(d), repr(float(c)), "" if math.isnan(p) else repr(float(p))])


@dataclass(frozen=True, eq=False)
class EpsSeries:
    """Implied EPS over the P/E-covered dates.

    ``trailing_growth`` is percent change versus 252 rows earlier and NaN for
    the first 252 rows.
    """

    dates: np.ndarray
    eps: np.ndarray
    trailing_growth: np.ndarray

    def __len__(self) -> int:
        return len(self.dates)


def eps_proxy(series: DailySeries) -> EpsSeries:
    start = series.pe_start
    if start is None:
        raise NoPeCoverage("series has no P/E values")
    eps = series.close[start:] / series.pe[start:]
    growth = np.full(len(eps), np.nan)
    if len(eps) > TRADING_YEAR:
        prior = eps[:-TRADING_YEAR]
        growth[TRADING_YEAR:] = (eps[TRADING_YEAR:] - prior) / prior * 100.0
    return EpsSeries(
        dates=_frozen(series.dates[start:]),
        eps=_frozen(eps),
        trailing_growth=_frozen(growth),
    )


def subset_by_date(series: DailySeries, start, end) -> DailySeries:
    """Rows with ``start <= date <= end`` (both inclusive)."""
    lo, hi = _as_date(start), _as_date(end)
    if lo > hi:
        raise ParameterError(f"empty date range: {lo} > {hi}")
    keep = (series.dates >= lo) & (series.dates <= hi)
    if not keep.any():
        raise EmptyResult(f"no rows between {lo} and {hi}")
    return DailySeries(series.dates[keep], series.close[keep], series.pe[keep])


def pct_change(close: np.ndarray, days: int) -> np.ndarray:
    """Percent change from row t to row t+days, one value per valid t."""
    close = np.asarray(close, dtype=float)
    return (close[days:] - close[:-days]) / close[:-days] * 100.0
