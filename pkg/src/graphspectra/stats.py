"""Distances between empirical and theoretical laws, empirical moments,
and row-sum statistics.

The Kolmogorov-Smirnov distance is the primary convergence diagnostic.
The bounded-Lipschitz metric is never computed exactly (that is an
optimization over a function ball); callers get certified upper bounds
instead: the first Wasserstein distance on a window, and for a pair of
symmetric matrices the trace bound
``d_BL^2 <= tr((M1 - M2)^2) / n`` on their spectral measures.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .ensemble import SymmetricMatrix
from .errors import ConfigError, PreconditionError
from .limit_laws import DensityGrid, MomentSequence
from .spectra import ESD

DEFAULT_WINDOW = (-10.0, 10.0)


def ks_distance(esd: ESD, cdf: Callable) -> float:
    """Kolmogorov sup-distance between an ESD and a law's CDF.

    Both functions are nondecreasing, so the supremum is attained at a
    one-sided limit of some ESD jump point; the left limits of the law
    are taken at the adjacent float, which is exact for step laws and a
    no-op for continuous ones.  The distance of an ESD to its own step
    function is 0.
    """
    pts = esd.jump_points()
    law_right = np.asarray(cdf(pts), dtype=float)
    law_left = np.asarray(cdf(np.nextafter(pts, -np.inf)), dtype=float)
    return float(np.max(np.maximum(np.abs(esd.cdf(pts) - law_right),
                                   np.abs(esd.cdf_left(pts) - law_left))))


def wasserstein1_on_window(esd: ESD, grid: DensityGrid,
                           window: Tuple[float, float]) -> float:
    """W1 between the ESD and a gridded law: the integral of
    ``|F_emp - F_law|`` over the window by the trapezoid rule."""
    lo, hi = window
    step = grid.step
    x = np.arange(lo, hi + step / 2, step)
    diff = np.abs(esd.cdf(x) - grid.cdf_at(x))
    return float(np.trapezoid(diff, x))


def bl_distance_upper_bound(esd: ESD, grid: DensityGrid,
                            matrices: Optional[Tuple[SymmetricMatrix,
                                                     SymmetricMatrix]] = None,
                            window: Tuple[float, float] = DEFAULT_WINDOW) -> float:
    """Certified upper bound for the bounded-Lipschitz distance between
    the ESD and the gridded law.

    Returns W1 on the window (the Lipschitz-dual bound d_BL <= W1); when
    a matrix pair is supplied, also forms the trace bound
    ``sqrt(tr((M1 - M2)^2) / n)`` and returns the smaller of the two.
    Eigenvalue mass outside the window is an error, never silently cut.
    """
    lo, hi = window
    slack = 1e-9 * (hi - lo)  # boundary rounding only, never real mass
    if esd.points[0] < lo - slack or esd.points[-1] > hi + slack:
        raise PreconditionError(
            f"ESD support [{esd.points[0]:.3g}, {esd.points[-1]:.3g}] "
            f"not covered by window [{lo}, {hi}]")
    bound = wasserstein1_on_window(esd, grid, window)
    if matrices is not None:
        m1, m2 = matrices
        if m1.n != m2.n:
            raise ConfigError("matrix pair must share a dimension")
        trace_bound = float(np.linalg.norm(m1.array - m2.array) / np.sqrt(m1.n))
        bound = min(bound, trace_bound)
    return bound


def empirical_moments(esd: ESD, order: int) -> MomentSequence:
    """Moments ``m_k = mean(lambda^k)`` of the normalized eigenvalues,
    k = 0..order (order capped at 8)."""
    if order > 8:
        raise ConfigError("empirical moments are capped at order 8")
    return MomentSequence(tuple(float(np.mean(esd.points ** k))
                                for k in range(order + 1)))


def row_sum_statistics(adjacency: SymmetricMatrix) -> dict:
    """The two quadratic row statistics of an adjacency matrix:

    * ``s1``: sum over ordered pairs i != j of xi_ij^2;
    * ``s2``: sum over rows of (row sum)^2.

    Their means are ``n(n-1) E[xi^2]`` and
    ``n[(n-1) sigma^2 + (n-1)^2 mu^2]``.
    """
    if not adjacency.zero_diagonal:
        raise PreconditionError("row-sum statistics need a zero-diagonal matrix")
    a = adjacency.array
    return {"s1": float(np.sum(a * a)),
            "s2": float(np.sum(a.sum(axis=1) ** 2))}


@dataclass
class DistanceReport:
    """Distances and low moments of one trial's ESD against a law."""

    ks: float
    w1: float
    window: Tuple[float, float]
    moments: tuple  # m_1 .. m_6 of the normalized eigenvalues

    def __post_init__(self):
        if not (0.0 <= self.ks <= 1.0) or self.w1 < 0.0:
            raise ConfigError("distances out of range")
        if not all(np.isfinite(self.moments)):
            raise ConfigError("moments must be finite")

    def to_json(self) -> str:
        return json.dumps({"ks": self.ks, "w1": self.w1,
                           "window": list(self.window),
                           "moments": list(self.moments)}, sort_keys=True)

    @classmethod
    def from_esd(cls, esd: ESD, grid: DensityGrid,
                 window: Tuple[float, float] = DEFAULT_WINDOW) -> "DistanceReport":
        ks = ks_distance(esd, grid.cdf_at)
        w1 = bl_distance_upper_bound(esd, grid, window=window)
        ms = empirical_moments(esd, 6)
        return cls(ks=ks, w1=w1, window=window, moments=tuple(ms.moments[1:]))
