"""Plug-in mutual information, lagged NMI and transfer entropy on FD bins.

Every variable is discretized once with its own Freedman-Diaconis edges
(computed on the full series) and the resulting symbols are reused for all
lags, so curves across lags are comparable.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .distribution import fd_edges
from .errors import (
    DegenerateMarginal,
    DegenerateMarginalWarning,
    LengthMismatch,
    NoPeCoverage,
    TooShort,
)
from .market_data import DailySeries, pct_change


def symbolize(x, edges: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Bin indices of ``x`` under ``edges`` (FD edges of ``x`` by default).

    Matches ``numpy.histogram``: bins are left-closed, the last one also
    right-closed.
    """
    x = np.asarray(x, dtype=float)
    if edges is None:
        edges = fd_edges(x)
    sym = np.searchsorted(edges, x, side="right") - 1
    sym[x == edges[-1]] = len(edges) - 2
    return np.clip(sym, 0, len(edges) - 2), edges


def _entropy_of_counts(counts: np.ndarray) -> float:
    p = counts[counts > 0] / counts.sum()
    return -math.fsum(p * np.log(p))


def _joint_entropy(*columns: np.ndarray) -> float:
    stacked = np.column_stack(columns)
    _, counts = np.unique(stacked, axis=0, return_counts=True)
    return _entropy_of_counts(counts)


@dataclass(frozen=True, eq=False)
class JointHistogram:
    x_edges: np.ndarray
    y_edges: np.ndarray
    counts: np.ndarray  # integer cell counts, shape (len(x_edges) - 1, len(y_edges) - 1)
    n: int

    @classmethod
    def build(cls, x, y, x_edges=None, y_edges=None) -> "JointHistogram":
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.shape != y.shape:
            raise LengthMismatch(f"lengths differ: {x.size} vs {y.size}")
        if x.size < 2:
            raise TooShort("need at least two paired samples")
        x_edges = fd_edges(x) if x_edges is None else x_edges
        y_edges = fd_edges(y) if y_edges is None else y_edges
        counts, _, _ = np.histogram2d(x, y, bins=[x_edges, y_edges])
        return cls(x_edges, y_edges, counts.astype(np.int64), int(x.size))

    @property
    def joint(self) -> np.ndarray:
        return self.counts / self.n

    def mutual_information(self) -> float:
        # integer marginals and fsum keep MI(x, y) == MI(y, x) bit for bit
        cx = self.counts.sum(axis=1)
        cy = self.counts.sum(axis=0)
        i, j = np.nonzero(self.counts)
        c = self.counts[i, j].astype(float)
        ratio = c * self.n / (cx[i].astype(float) * cy[j])
        return max(0.0, math.fsum(c / self.n * np.log(ratio)))


def mutual_information(x, y) -> float:
    """Plug-in MI in nats; 0 (with a warning) when a marginal occupies one bin."""
    hist = JointHistogram.build(x, y)
    if np.count_nonzero(hist.counts.sum(axis=1)) < 2 or np.count_nonzero(hist.counts.sum(axis=0)) < 2:
        warnings.warn("a marginal occupies a single bin; MI is 0", DegenerateMarginalWarning, stacklevel=2)
        return 0.0
    return hist.mutual_information()


def _nmi(sx: np.ndarray, sy: np.ndarray) -> float:
    hx = _entropy_of_counts(np.bincount(sx))
    hy = _entropy_of_counts(np.bincount(sy))
    if hx <= 0 or hy <= 0:
        return 0.0
    mi = hx + hy - _joint_entropy(sx, sy)
    return min(1.0, max(0.0, mi / math.sqrt(hx * hy)))


def lagged_nmi(driver, target, max_lag: int) -> np.ndarray:
    """NMI between ``driver[t]`` and ``target[t + lag]`` for lag = 1..max_lag.

    Normalized by the geometric mean of the binned marginal entropies of the
    paired samples.
    """
    driver = np.asarray(driver, dtype=float)
    target = np.asarray(target, dtype=float)
    if driver.shape != target.shape:
        raise LengthMismatch(f"lengths differ: {driver.size} vs {target.size}")
    if max_lag < 0:
        raise TooShort("max_lag must be non-negative")
    if max_lag == 0:
        return np.empty(0)
    if driver.size <= max_lag + 1:
        raise TooShort(f"need more than {max_lag + 1} points for lags up to {max_lag}")
    sx, _ = symbolize(driver)
    sy, _ = symbolize(target)
    return np.array([_nmi(sx[:-lag], sy[lag:]) for lag in range(1, max_lag + 1)])


def _histories(sym: np.ndarray, k: int, stop: int) -> np.ndarray:
    """Row t holds ``(s[t], s[t-1], ..., s[t-k+1])`` for t = k-1 .. stop-1."""
    return np.column_stack([sym[k - 1 - j : stop - j] for j in range(k)])


@dataclass(frozen=True)
class TransferEntropy:
    value: float
    raw: float  # plug-in estimate before clipping at zero
    clipped: bool


def transfer_entropy_detail(driver, target, k: int = 1) -> TransferEntropy:
    driver = np.asarray(driver, dtype=float)
    target = np.asarray(target, dtype=float)
    if driver.shape != target.shape:
        raise LengthMismatch(f"lengths differ: {driver.size} vs {target.size}")
    if k < 1:
        raise TooShort("history length k must be >= 1")
    if driver.size <= k + 1:
        raise TooShort(f"need more than {k + 1} points for history length {k}")
    sx, _ = symbolize(driver)
    sy, _ = symbolize(target)
    if np.unique(sx).size < 2 or np.unique(sy).size < 2:
        raise DegenerateMarginal("driver or target occupies a single bin")
    n = driver.size
    y_next = sy[k:n]
    y_hist = _histories(sy, k, n - 1)
    x_hist = _histories(sx, k, n - 1)
    # TE = H(y+, yh) + H(yh, xh) - H(yh) - H(y+, yh, xh)
    raw = (
        _joint_entropy(y_next, y_hist)
        + _joint_entropy(y_hist, x_hist)
        - _joint_entropy(y_hist)
        - _joint_entropy(y_next, y_hist, x_hist)
    )
    return TransferEntropy(max(0.0, raw), raw, raw < 0)


def transfer_entropy(driver, target, k: int = 1) -> float:
    """Plug-in transfer entropy driver -> target in nats, clipped at 0."""
    return transfer_entropy_detail(driver, target, k).value


@dataclass(frozen=True)
class InfoFlowReport:
    mi: float
    nmi: tuple  # lag 1..max_lag
    max_lag: int
    te_forward: float
    te_backward: float
    te_forward_clipped: bool
    te_backward_clipped: bool
    history_k: int
    n: int
    driver_edges: np.ndarray
    target_edges: np.ndarray


def driver_target(series: DailySeries) -> tuple[np.ndarray, np.ndarray]:
    """P/E level ``pe[t]`` paired with the next-day return realized at t+1.

    ``target[t]`` is the one-day return from row t to t+1, so lag 0 pairs a
    valuation with the following session's move.
    """
    start = series.pe_start
    if start is None:
        raise NoPeCoverage("series has no P/E values")
    pe = series.pe[start:-1]
    ret = pct_change(series.close[start:], 1)
    return pe, ret


def info_report(series: DailySeries, k: int = 1, max_lag: int = 50) -> InfoFlowReport:
    driver, target = driver_target(series)
    if driver.size < k + 2:
        raise TooShort(f"P/E coverage too short for history length {k}")
    sx, x_edges = symbolize(driver)
    sy, y_edges = symbolize(target)
    if np.unique(sx).size < 2:
        raise DegenerateMarginal("P/E occupies a single bin")
    if np.unique(sy).size < 2:
        raise DegenerateMarginal("returns occupy a single bin")
    mi = JointHistogram.build(driver, target, x_edges, y_edges).mutual_information()
    nmi = lagged_nmi(driver, target, max_lag) if driver.size > max_lag + 1 else np.empty(0)
    fwd = transfer_entropy_detail(driver, target, k)
    bwd = transfer_entropy_detail(target, driver, k)
    return InfoFlowReport(
        mi=mi,
        nmi=tuple(float(v) for v in nmi),
        max_lag=max_lag,
        te_forward=fwd.value,
        te_backward=bwd.value,
        te_forward_clipped=fwd.clipped,
        te_backward_clipped=bwd.clipped,
        history_k=k,
        n=int(driver.size),
        driver_edges=x_edges,
        target_edges=y_edges,
    )
