"""Forward returns over a ladder of holding periods, CAGR, and per-horizon summaries."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .distribution import Pmf, build_pmf
from .errors import EmptySet, ParameterError, SeriesTooShort, TotalLoss
from .market_data import TRADING_YEAR, DailySeries, pct_change

UNIT_DAYS = {"d": 1, "w": 5, "m": 21, "y": TRADING_YEAR}


@dataclass(frozen=True)
class HorizonSpec:
    label: str
    days: int

    def __post_init__(self):
        if int(self.days) != self.days or self.days < 1:
            raise ParameterError(f"horizon days must be a positive integer, got {self.days}")


def _spec(count: int, unit: str) -> HorizonSpec:
    return HorizonSpec(f"{count}{unit.upper()}", count * UNIT_DAYS[unit])


DEFAULT_LADDER: tuple[HorizonSpec, ...] = tuple(
    [_spec(1, "d"), _spec(1, "w"), _spec(2, "w"), _spec(1, "m"), _spec(3, "m"), _spec(6, "m")]
    + [_spec(k, "y") for k in range(1, 13)]
)

_TOKEN = re.compile(r"^(\d+)([dwmy])(?:\.\.(\d+)([dwmy]))?$")


def parse_ladder(text: str) -> list[HorizonSpec]:
    """Parse ``"1d,1w,1y,2y..12y"`` into a ladder sorted by days.

    A range ``a<u>..b<u>`` expands to every count from a to b in unit u.
    """
    specs = []
    for token in filter(None, (t.strip().lower() for t in text.split(","))):
        m = _TOKEN.match(token)
        if not m:
            raise ParameterError(f"bad horizon token {token!r}")
        first, unit, last, unit2 = m.groups()
        if last is None:
            specs.append(_spec(int(first), unit))
            continue
        if unit2 != unit or int(last) < int(first):
            raise ParameterError(f"bad horizon range {token!r}")
        specs.extend(_spec(k, unit) for k in range(int(first), int(last) + 1))
    if not specs:
        raise ParameterError("empty horizon list")
    labels = [s.label for s in specs]
    if len(set(labels)) != len(labels):
        raise ParameterError("horizon labels must be unique")
    return sorted(specs, key=lambda s: s.days)


@dataclass(frozen=True, eq=False)
class HorizonReturnSet:
    spec: HorizonSpec
    returns: np.ndarray  # percent
    start_dates: np.ndarray

    def __len__(self) -> int:
        return len(self.returns)


def forward_returns(series: DailySeries, spec: HorizonSpec) -> HorizonReturnSet:
    """Overlapping percent returns, one per start row."""
    if len(series) <= spec.days:
        raise SeriesTooShort(
            f"{spec.label} needs more than {spec.days} rows, series has {len(series)}"
        )
    returns = pct_change(series.close, spec.days)
    returns.setflags(write=False)
    return HorizonReturnSet(spec, returns, series.dates[: len(returns)])


def to_cagr(r_abs, years: int):
    """Annualize a cumulative percent return over ``years`` years, in percent.

    Accepts scalars or arrays.
    """
    if years < 1 or int(years) != years:
        raise ParameterError("years must be a positive integer")
    r = np.asarray(r_abs, dtype=float)
    if np.any(r <= -100):
        raise TotalLoss("cumulative return of -100% or worse cannot be annualized")
    if years == 1:
        out = r.copy()
    else:
        out = (np.power(1.0 + r / 100.0, 1.0 / years) - 1.0) * 100.0
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class HorizonSummary:
    spec: HorizonSpec
    min: float
    max: float
    mode: float
    mode_prob: float
    n: int


def horizon_summary(returns: HorizonReturnSet, pmf: Pmf | None = None) -> HorizonSummary:
    if len(returns) == 0:
        raise EmptySet(f"no returns for {returns.spec.label}")
    pmf = pmf or build_pmf(returns.returns)
    return HorizonSummary(
        spec=returns.spec,
        min=float(returns.returns.min()),
        max=float(returns.returns.max()),
        mode=pmf.mode,
        mode_prob=pmf.mode_prob,
        n=len(returns),
    )


def trapping_horizon(summaries: Sequence[HorizonSummary]) -> HorizonSpec | None:
    """Shortest horizon from which every worst case in the ladder is >= 0."""
    days = [s.spec.days for s in summaries]
    if days != sorted(days):
        raise ParameterError("summaries must be ordered by ascending days")
    found = None
    for s in reversed(summaries):
        if s.min < 0:
            break
        found = s.spec
    return found


@dataclass(frozen=True)
class CagrSummary:
    years: int
    min_cagr: float
    max_cagr: float
    mode_cagr: float
    mode_prob: float
    n: int


def cagr_summary(series: DailySeries, years: int) -> CagrSummary:
    """Min/max/mode of per-window CAGRs for a ``years``-year holding period.

    The mode comes from the FD PMF of the annualized per-window values.
    """
    rs = forward_returns(series, HorizonSpec(f"{years}Y", years * TRADING_YEAR))
    cagr = np.asarray(to_cagr(rs.returns, years), dtype=float).reshape(-1)
    pmf = build_pmf(cagr)
    return CagrSummary(
        years=years,
        min_cagr=float(cagr.min()),
        max_cagr=float(cagr.max()),
        mode_cagr=pmf.mode,
        mode_prob=pmf.mode_prob,
        n=int(cagr.size),
    )
