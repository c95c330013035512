"""Distributional (Shannon, Tsallis) and temporal (sample, permutation) entropies.

Natural logs throughout. Shannon and Tsallis are normalized by their maximum
over the *occupied* bins, so empty histogram bins never inflate the value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from ..distribution import Pmf, build_pmf
from ..errors import InvalidQ, NoMatches, ParameterError, TooShort


def _occupied(pmf: Pmf) -> np.ndarray:
    p = np.asarray(pmf.probs, dtype=float)
    return p[p > 0]


def shannon_entropy_norm(pmf: Pmf) -> float:
    p = _occupied(pmf)
    if p.size <= 1:
        return 0.0
    h = -float(np.sum(p * np.log(p)))
    return min(1.0, max(0.0, h / math.log(p.size)))


def tsallis_entropy_norm(pmf: Pmf, q: float) -> float:
    """``S_q = (1 - sum p**q) / (q - 1)`` over its maximum ``(1 - k**(1-q)) / (q - 1)``."""
    if not q > 0 or q == 1:
        raise InvalidQ(f"Tsallis order must be positive and != 1, got {q}")
    p = _occupied(pmf)
    k = p.size
    if k <= 1:
        return 0.0
    s = (1.0 - float(np.sum(p**q))) / (q - 1.0)
    s_max = (1.0 - k ** (1.0 - q)) / (q - 1.0)
    return min(1.0, max(0.0, s / s_max))


def _templates(x: np.ndarray, length: int, count: int) -> np.ndarray:
    return np.lib.stride_tricks.sliding_window_view(x, length)[:count]


def _pair_count(points: np.ndarray, r: float) -> int:
    """Unordered pairs within Chebyshev distance ``r``, self-pairs excluded."""
    tree = cKDTree(points)
    ordered = tree.count_neighbors(tree, r, p=np.inf)
    return (int(ordered) - len(points)) // 2


def sample_entropy(x, m: int = 2, r: float | None = None) -> float:
    """``-ln(A/B)``: template pairs matching at length m+1 (A) vs. m (B).

    Both counts use the same N - m templates; distances are Chebyshev and a
    match means ``distance <= r``. ``r`` defaults to 0.2 times the population
    standard deviation.
    """
    x = np.asarray(x, dtype=float)
    if m < 1:
        raise ParameterError("template length m must be >= 1")
    if x.size < m + 2:
        raise TooShort(f"sample entropy needs at least {m + 2} points")
    if r is None:
        r = 0.2 * float(np.std(x))
        if r == 0:
            r = 1e-12  # constant series: every template matches
    if not r > 0:
        raise ParameterError("tolerance r must be positive")
    count = x.size - m
    b = _pair_count(_templates(x, m, count), r)
    a = _pair_count(_templates(x, m + 1, count), r)
    if a == 0 or b == 0:
        raise NoMatches(f"sample entropy undefined: A={a}, B={b} at m={m}, r={r:g}")
    return -math.log(a / b)


def ordinal_patterns(x, order: int, delay: int = 1) -> np.ndarray:
    """Rank pattern (stable argsort) of each delay vector, one row per vector."""
    x = np.asarray(x, dtype=float)
    n = x.size - (order - 1) * delay
    if order < 2:
        raise ParameterError("permutation order must be >= 2")
    if delay < 1:
        raise ParameterError("delay must be >= 1")
    if n < 1:
        raise TooShort(f"need at least {(order - 1) * delay + 1} points")
    vectors = np.lib.stride_tricks.sliding_window_view(x, (order - 1) * delay + 1)[:, ::delay]
    return np.argsort(vectors, axis=1, kind="stable")


def permutation_entropy_norm(x, order: int = 5, delay: int = 1) -> float:
    patterns = ordinal_patterns(x, order, delay)
    _, counts = np.unique(patterns, axis=0, return_counts=True)
    # sorted counts and fsum: relabelled patterns (e.g. a reversed series) give identical bits
    p = np.sort(counts) / counts.sum()
    h = -math.fsum(p * np.log(p))
    return min(1.0, max(0.0, h / math.log(math.factorial(order))))


@dataclass(frozen=True)
class EntropyReport:
    shannon_norm: float
    tsallis_norm: dict
    sample_entropy: float | None  # None when undefined (no template matches)
    permutation_norm: float
    params: dict = field(default_factory=dict)


def entropy_report(
    x,
    tsallis_qs=(0.1, 2.0),
    m: int = 2,
    r: float | None = None,
    order: int = 5,
    delay: int = 1,
) -> EntropyReport:
    """All four entropies of one series: FD-PMF based ones and raw-series ones."""
    x = np.asarray(x, dtype=float)
    pmf = build_pmf(x)
    r_used = 0.2 * float(np.std(x)) if r is None else float(r)
    try:
        sampen = sample_entropy(x, m, r_used if r_used > 0 else None)
    except NoMatches:
        sampen = None
    return EntropyReport(
        shannon_norm=shannon_entropy_norm(pmf),
        tsallis_norm={float(q): tsallis_entropy_norm(pmf, q) for q in tsallis_qs},
        sample_entropy=sampen,
        permutation_norm=permutation_entropy_norm(x, order, delay),
        params={"m": m, "r": r_used, "order": order, "delay": delay, "bins": len(pmf.probs)},
    )
