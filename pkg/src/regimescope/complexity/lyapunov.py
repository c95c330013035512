"""Lyapunov spectrum of a scalar series by local linear maps in delay space.

For every reconstructed point the tangent map is fitted by least squares on
its nearest neighbours' one-step displacements (with an intercept column to
absorb curvature bias). Products of the fitted maps are re-orthonormalized
with a QR decomposition each step; the log stretch factors average to the
spectrum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from ..errors import DegenerateSeries, InsufficientNeighbors, ParameterError, TooShort


@dataclass(frozen=True)
class LyapunovReport:
    spectrum: tuple  # descending, nats per step
    dim: int
    delay: int
    neighbors: int
    theiler: int
    ks_entropy: float
    ky_dimension: float

    @property
    def largest(self) -> float:
        return self.spectrum[0]


def ks_entropy(spectrum) -> float:
    """Sum of the strictly positive exponents."""
    return math.fsum(l for l in spectrum if l > 0)


def ky_dimension(spectrum) -> float:
    """Kaplan-Yorke dimension ``j + S_j / |l_{j+1}|``.

    ``j`` is the largest index whose partial sum ``S_j`` is non-negative.
    Returns 0 if the largest exponent is negative and the full dimension if
    every partial sum is non-negative.
    """
    lam = sorted((float(v) for v in spectrum), reverse=True)
    if not lam or lam[0] < 0:
        return 0.0
    partial = np.cumsum(lam)
    j = int(np.flatnonzero(partial >= 0)[-1]) + 1
    if j == len(lam):
        return float(len(lam))
    return j + float(partial[j - 1]) / abs(lam[j])


def delay_embed(x, dim: int, delay: int = 1) -> np.ndarray:
    """Rows ``(x[t], x[t + delay], ..., x[t + (dim - 1) * delay])``."""
    x = np.asarray(x, dtype=float)
    n = x.size - (dim - 1) * delay
    if n < 1:
        raise TooShort("series shorter than one embedding window")
    return np.lib.stride_tricks.sliding_window_view(x, (dim - 1) * delay + 1)[:, ::delay]


def _neighbor_table(points: np.ndarray, k: int, theiler: int) -> np.ndarray:
    n = len(points)
    kq = k + 2 * theiler + 1
    if n < kq:
        raise InsufficientNeighbors(f"{n} points cannot supply {k} neighbours outside the Theiler window")
    _, idx = cKDTree(points).query(points, k=kq)
    allowed = np.abs(idx - np.arange(n)[:, None]) > theiler
    if np.any(allowed.sum(axis=1) < k):
        raise InsufficientNeighbors("too many duplicate points to find neighbours")
    order = np.argsort(~allowed, axis=1, kind="stable")[:, :k]
    return np.take_along_axis(idx, order, axis=1)


def local_jacobians(x, dim: int, delay: int = 1, neighbors: int | None = None, theiler: int | None = None):
    """Least-squares tangent map at every reconstructed point but the last."""
    k = neighbors if neighbors is not None else 2 * dim + 2
    w = theiler if theiler is not None else delay * dim
    if k < dim + 1:
        raise ParameterError(f"need at least {dim + 1} neighbours for a {dim}-d fit with intercept")
    emb = delay_embed(x, dim, delay)
    base, succ = emb[:-1], emb[1:]
    nb = _neighbor_table(base, k, w)
    dx = base[nb] - base[:, None, :]
    dy = succ[nb] - succ[:, None, :]
    design = np.concatenate([dx, np.ones(dx.shape[:2] + (1,))], axis=2)
    coef = np.linalg.pinv(design) @ dy  # (n, dim + 1, dim)
    return np.transpose(coef[:, :dim, :], (0, 2, 1))


def spectrum_from_jacobians(jacobians: np.ndarray) -> np.ndarray:
    """Average log stretch of a product of maps, via repeated QR (descending)."""
    n, dim, _ = jacobians.shape
    q = np.eye(dim)
    total = np.zeros(dim)
    tiny = np.finfo(float).tiny
    for jac in jacobians:
        q, r = np.linalg.qr(jac @ q)
        diag = np.diag(r)
        signs = np.where(diag < 0, -1.0, 1.0)
        q = q * signs
        total += np.log(np.maximum(np.abs(diag), tiny))
    return np.sort(total / n)[::-1]


def lyapunov_spectrum(
    x,
    dim: int = 5,
    delay: int = 1,
    neighbors: int | None = None,
    theiler: int | None = None,
) -> LyapunovReport:
    x = np.asarray(x, dtype=float)
    if dim < 1 or delay < 1:
        raise ParameterError("dimension and delay must be >= 1")
    if x.size < 50 * dim:
        raise TooShort(f"Lyapunov spectrum needs at least {50 * dim} points, got {x.size}")
    if np.ptp(x) == 0:
        raise DegenerateSeries("series is constant")
    k = neighbors if neighbors is not None else 2 * dim + 2
    w = theiler if theiler is not None else delay * dim
    spec = spectrum_from_jacobians(local_jacobians(x, dim, delay, k, w))
    values = tuple(float(v) for v in spec)
    return LyapunovReport(
        spectrum=values,
        dim=dim,
        delay=delay,
        neighbors=k,
        theiler=w,
        ks_entropy=ks_entropy(values),
        ky_dimension=ky_dimension(values),
    )
