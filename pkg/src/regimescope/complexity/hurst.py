"""Generalized Hurst exponents from q-th order structure functions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateSeries, ParameterError, TooShort

DEFAULT_QS = (1.0, 2.0, 3.0, 4.0, 5.0)
DEFAULT_TAUS = tuple(range(1, 20))


@dataclass(frozen=True)
class HurstCurve:
    qs: tuple
    h: dict  # q -> H(q)
    fit_r2: dict  # q -> coefficient of determination of the log-log fit
    taus: tuple


def structure_function(x: np.ndarray, q: float, taus) -> np.ndarray:
    """``K_q(tau) = mean_t |x(t + tau) - x(t)|**q`` for each tau."""
    return np.array([np.mean(np.abs(x[tau:] - x[:-tau]) ** q) for tau in taus])


def generalized_hurst(x, qs=DEFAULT_QS, taus=DEFAULT_TAUS) -> HurstCurve:
    """H(q) = slope of ln K_q(tau) against ln tau, divided by q."""
    x = np.asarray(x, dtype=float)
    taus = tuple(int(t) for t in taus)
    qs = tuple(float(q) for q in qs)
    if len(taus) < 2 or min(taus) < 1:
        raise ParameterError("need at least two positive lags")
    if any(not q > 0 for q in qs):
        raise ParameterError("moment orders must be positive")
    if x.size < 4 * max(taus):
        raise TooShort(f"generalized Hurst needs at least {4 * max(taus)} points, got {x.size}")
    if np.ptp(x) == 0:
        raise DegenerateSeries("series is constant")
    log_tau = np.log(taus)
    h, r2 = {}, {}
    for q in qs:
        k = structure_function(x, q, taus)
        if np.any(k <= 0):
            raise DegenerateSeries(f"zero structure function at q={q}")
        log_k = np.log(k)
        slope, intercept = np.polyfit(log_tau, log_k, 1)
        resid = log_k - (slope * log_tau + intercept)
        ss_tot = float(np.sum((log_k - log_k.mean()) ** 2))
        h[q] = float(slope / q)
        r2[q] = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return HurstCurve(qs=qs, h=h, fit_r2=r2, taus=taus)
