"""Entropy / Hurst / largest-Lyapunov triplet for every horizon of a ladder.

The Hurst exponent is estimated directly on each horizon's overlapping
return series. Short-horizon returns are close to white noise, so H(2) sits
near 0 there; long-horizon overlapping returns wander like a random walk over
the default lag range and H(2) approaches 0.5. Passing
``hurst_input="increments"`` instead treats the non-overlapping returns as
increments of a cumulative path, which reads 0.5 for uncorrelated returns at
any horizon but needs ``days * 4 * max(taus)`` rows.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..distribution import build_pmf
from ..errors import DegenerateSeries, ParameterError, RegimeScopeError
from ..horizons import HorizonSpec, forward_returns
from ..market_data import DailySeries
from .entropy import shannon_entropy_norm
from .hurst import DEFAULT_TAUS, generalized_hurst
from .lyapunov import lyapunov_spectrum


@dataclass(frozen=True)
class ProfileEntry:
    spec: HorizonSpec
    sne: float | None = None
    hurst: float | None = None
    lle: float | None = None
    error: str | None = None  # exception class name when the horizon failed
    message: str | None = None


@dataclass(frozen=True)
class ComplexityProfile:
    entries: tuple
    params: dict

    @property
    def ok(self) -> bool:
        return all(e.error is None for e in self.entries)


def _hurst_series(returns: np.ndarray, days: int, mode: str) -> np.ndarray:
    if mode == "returns":
        return returns
    return np.cumsum(returns[::days])


def complexity_profile(
    series: DailySeries,
    ladder: Sequence[HorizonSpec],
    dim: int = 5,
    delay: int = 1,
    taus=DEFAULT_TAUS,
    hurst_input: str = "returns",
) -> ComplexityProfile:
    """One entry per horizon; failures are recorded on the entry, not raised."""
    if hurst_input not in ("returns", "increments"):
        raise ParameterError(f"unknown hurst_input {hurst_input!r}")
    entries = []
    for spec in ladder:
        try:
            rs = forward_returns(series, spec).returns
            if np.ptp(rs) == 0:
                raise DegenerateSeries(f"{spec.label} returns are constant")
            sne = shannon_entropy_norm(build_pmf(rs))
            h = generalized_hurst(_hurst_series(rs, spec.days, hurst_input), qs=(2.0,), taus=taus).h[2.0]
            lle = lyapunov_spectrum(rs, dim=dim, delay=delay).largest
        except RegimeScopeError as exc:
            entries.append(ProfileEntry(spec, error=type(exc).__name__, message=str(exc)))
            continue
        entries.append(ProfileEntry(spec, sne=sne, hurst=h, lle=lle))
    params = {"dim": dim, "delay": delay, "taus": list(taus), "hurst_q": 2.0, "hurst_input": hurst_input}
    return ComplexityProfile(tuple(entries), params)
