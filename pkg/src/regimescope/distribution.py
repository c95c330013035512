"""Freedman-Diaconis PMFs and the statistics read off them.

Binning: width ``2 * IQR * n**(-1/3)`` with linearly interpolated quartiles,
``ceil(range / width)`` equal bins (at most one per sample) spanning ``[min, max]``, bins left-closed
except the last, which is closed on both sides.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import DegenerateSample, NoPeCoverage, ParameterError, SeriesTooShort
from .market_data import TRADING_YEAR, DailySeries, pct_change

PE_BAND_LO = 10
PE_BAND_HI = 31  # exclusive upper edge of the last band [30, 31)


@dataclass(frozen=True, eq=False)
class Pmf:
    edges: np.ndarray
    probs: np.ndarray
    n: int
    rule: str = "fd"
    mids: np.ndarray = field(init=False)

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=float)
        probs = np.asarray(self.probs, dtype=float)
        if edges.ndim != 1 or len(edges) != len(probs) + 1 or len(probs) == 0:
            raise ParameterError("need len(edges) == len(probs) + 1 >= 2")
        if np.any(np.diff(edges) <= 0):
            raise ParameterError("bin edges must be strictly increasing")
        if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-12:
            raise ParameterError("probabilities must be >= 0 and sum to 1")
        mids = (edges[:-1] + edges[1:]) / 2
        for name, arr in (("edges", edges), ("probs", probs), ("mids", mids)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_points(cls, points: Mapping[float, float], n: int = 0) -> "Pmf":
        """PMF with the given bin midpoints and probabilities.

        Edges are placed so consecutive bins touch and each midpoint is exact;
        handy for hand-specified distributions.
        """
        xs = np.array(sorted(points), dtype=float)
        ps = np.array([points[x] for x in sorted(points)], dtype=float)
        # edges[i] = offset[i] + (-1)**i * edges[0]; need edges[i] < xs[i] for all i
        offset = np.zeros(len(xs))
        for i in range(1, len(xs)):
            offset[i] = 2 * xs[i - 1] - offset[i - 1]
        sign = (-1.0) ** np.arange(len(xs))
        upper = np.min((xs - offset)[sign > 0])
        lower = np.max((offset - xs)[sign < 0], initial=-np.inf)
        if not lower < upper:
            raise ParameterError("points too unevenly spaced for contiguous bins")
        first = upper - 0.5 if np.isinf(lower) else (lower + upper) / 2
        edges = np.empty(len(xs) + 1)
        edges[0] = first
        for i, x in enumerate(xs):
            edges[i + 1] = 2 * x - edges[i]
        return cls(edges=edges, probs=ps / ps.sum(), n=n, rule="manual")

    @property
    def mode_index(self) -> int:
        return int(np.argmax(self.probs))  # first maximum, i.e. lowest midpoint

    @property
    def mode(self) -> float:
        return float(self.mids[self.mode_index])

    @property
    def mode_prob(self) -> float:
        return float(self.probs[self.mode_index])


def iqr(samples) -> float:
    q1, q3 = np.percentile(np.asarray(samples, dtype=float), [25, 75])
    return float(q3 - q1)


def fd_bin_width(samples) -> float:
    x = np.asarray(samples, dtype=float)
    if x.size < 2:
        raise DegenerateSample("need at least two samples for a bin width")
    width = 2.0 * iqr(x) * x.size ** (-1.0 / 3.0)
    if width <= 0:
        raise DegenerateSample("interquartile range is zero")
    return width


def _point_bin(v: float) -> np.ndarray:
    """A single bin whose midpoint is exactly ``v``."""
    candidates = (
        (v - 0.5, v + 0.5),
        (0.0, 2 * v) if v > 0 else (2 * v, 0.0),
        (v / 2, 3 * v / 2) if v > 0 else (3 * v / 2, v / 2),
    )
    for a, b in candidates:
        if a < b and math.isfinite(b - a) and (a + b) / 2 == v:
            return np.array([a, b])
    return np.array([np.nextafter(v, -np.inf), np.nextafter(v, np.inf)])


def fd_edges(samples) -> np.ndarray:
    """FD bin edges, falling back to one bin when the width is degenerate."""
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise ParameterError("cannot bin an empty sample")
    lo, hi = float(x.min()), float(x.max())
    if lo == hi:
        return _point_bin(lo)
    try:
        width = fd_bin_width(x)
    except DegenerateSample:
        return np.array([lo, hi])
    # a near-zero IQR beside an outlier would ask for astronomically many bins
    # and a range of a few ulps cannot be split into distinct edges
    resolvable = int((hi - lo) / (16 * np.spacing(max(abs(lo), abs(hi)))))
    count = max(1, min(math.ceil((hi - lo) / width), x.size, resolvable))
    return np.linspace(lo, hi, count + 1)


def histogram(samples, edges) -> np.ndarray:
    counts, _ = np.histogram(np.asarray(samples, dtype=float), bins=edges)
    return counts


def build_pmf(samples) -> Pmf:
    x = np.asarray(samples, dtype=float)
    edges = fd_edges(x)
    counts = histogram(x, edges)
    return Pmf(edges=edges, probs=counts / x.size, n=int(x.size), rule="fd")


@dataclass(frozen=True)
class Band:
    lo: float
    hi: float
    coverage: float


@dataclass(frozen=True)
class PmfStats:
    mode: float
    mode_prob: float
    mean: float
    std: float
    band1: Band
    band2: Band
    cdf_at: dict


def pmf_stats(pmf: Pmf, samples, thresholds: Sequence[float] = ()) -> PmfStats:
    """Mode from the PMF; mean, population sigma and coverages from raw samples.

    Bands are centred on the mean. ``cdf_at`` maps each threshold t to the
    fraction of samples <= t.
    """
    x = np.asarray(samples, dtype=float)
    mean = float(x.mean())
    std = float(x.std())
    dev = np.abs(x - mean)

    def band(k: int) -> Band:
        return Band(mean - k * std, mean + k * std, float(np.mean(dev <= k * std)))

    cdf = {float(t): float(np.mean(x <= t)) for t in thresholds}
    return PmfStats(pmf.mode, pmf.mode_prob, mean, std, band(1), band(2), cdf)


@dataclass(frozen=True)
class AsymmetryStats:
    exp_pos: float
    exp_neg: float
    rrr_magnitude: float | None
    prp: float
    nrp: float
    rrr_probability: float | None


def _ratio(num: float, den: float) -> float | None:
    if den > 0:
        return num / den
    if num > 0:
        return math.inf
    return None


def asymmetry(pmf: Pmf) -> AsymmetryStats:
    """Expected gain/loss and probability-of-gain/loss read off bin midpoints.

    A bin counts as positive or negative by the sign of its midpoint; a bin
    centred exactly on zero counts as neither.
    """
    pos = pmf.mids > 0
    neg = pmf.mids < 0
    exp_pos = float(np.sum(pmf.mids[pos] * pmf.probs[pos]))
    exp_neg = float(np.sum(-pmf.mids[neg] * pmf.probs[neg]))
    prp = float(pmf.probs[pos].sum())
    nrp = float(pmf.probs[neg].sum())
    return AsymmetryStats(
        exp_pos=exp_pos,
        exp_neg=exp_neg,
        rrr_magnitude=_ratio(exp_pos, exp_neg),
        prp=prp,
        nrp=nrp,
        rrr_probability=_ratio(prp, nrp),
    )


@dataclass(frozen=True)
class MonthlyPmfs:
    pmfs: dict  # calendar month (1-12) -> Pmf
    samples: dict  # calendar month -> raw values
    empty: tuple  # months with no observations


def monthly_pmfs(values, dates) -> MonthlyPmfs:
    values = np.asarray(values, dtype=float)
    months = np.asarray(dates, dtype="datetime64[M]").astype(int) % 12 + 1
    keep = ~np.isnan(values)
    values, months = values[keep], months[keep]
    pmfs, samples, empty = {}, {}, []
    for month in range(1, 13):
        chunk = values[months == month]
        if chunk.size == 0:
            empty.append(month)
            continue
        samples[month] = chunk
        pmfs[month] = build_pmf(chunk)
    return MonthlyPmfs(pmfs, samples, tuple(empty))


@dataclass(frozen=True)
class ConditionalCell:
    band: int  # lower edge of [band, band + 1)
    years: int
    stats: AsymmetryStats
    n: int

    @property
    def label(self) -> str:
        return f"{self.band}-{self.band + 1}"


def conditional_cells(series: DailySeries, max_years: int = 7) -> list[ConditionalCell]:
    """Forward-return asymmetry stats per (P/E band, holding period).

    Each start row whose P/E lies in ``[lo, lo + 1)`` for ``lo`` in 10..30
    contributes its 252*years-row forward return to that band's cell. Cells
    are ordered by band then years; empty cells are omitted.
    """
    if not 1 <= max_years <= 7:
        raise ParameterError("max_years must be in 1..7")
    start = series.pe_start
    if start is None:
        raise NoPeCoverage("series has no P/E values")
    if len(series) - start <= TRADING_YEAR:
        raise SeriesTooShort("P/E coverage shorter than one holding year")
    cells = []
    bands = np.floor(series.pe)
    in_range = (series.pe >= PE_BAND_LO) & (series.pe < PE_BAND_HI)
    for lo in range(PE_BAND_LO, PE_BAND_HI):
        member = in_range & (bands == lo)
        for years in range(1, max_years + 1):
            days = years * TRADING_YEAR
            if len(series) <= days:
                continue
            starts = np.flatnonzero(member[: len(series) - days])
            if starts.size == 0:
                continue
            rets = pct_change(series.close, days)[starts]
            cells.append(ConditionalCell(lo, years, asymmetry(build_pmf(rets)), int(rets.size)))
    return cells


@dataclass(frozen=True, eq=False)
class PmfReport:
    label: str
    pmf: Pmf
    stats: PmfStats
    asymmetry: AsymmetryStats | None = None


def pmf_report(samples, label: str, thresholds: Sequence[float] = (), with_asymmetry: bool = False) -> PmfReport:
    x = np.asarray(samples, dtype=float)
    x = x[~np.isnan(x)]
    pmf = build_pmf(x)
    return PmfReport(
        label=label,
        pmf=pmf,
        stats=pmf_stats(pmf, x, thresholds),
        asymmetry=asymmetry(pmf) if with_asymmetry else None,
    )
