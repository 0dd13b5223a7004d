"""Probabilities that a real random variable lands in a set modulo 1.

For a centered Gaussian the wrapped law has the theta-series density
``1 + 2 sum_k exp(-2 pi^2 alpha^2 k^2) cos(2 pi k x)``; integrating it over
an interval set gives :func:`gaussian_mod1_prob`. For a tabulated density
the set is unwrapped over every integer shift that meets the grid.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .digits import UnitIntervalSet
from .errors import CoverageError, DomainError

__all__ = [
    "WrappedGaussianQuery",
    "Mod1Result",
    "default_k_max",
    "wrapped_gaussian_cap",
    "gaussian_mod1_prob",
    "wrapped_prob_from_density",
    "grid_cumulative",
]

TWO_PI2 = 2.0 * math.pi ** 2


def default_k_max(alpha: float) -> int:
    """Smallest k with ``exp(-2 pi^2 alpha^2 k^2) < 1e-18`` (about)."""
    return max(1, math.ceil(math.sqrt(41.0 / (TWO_PI2 * alpha * alpha))))


def wrapped_gaussian_cap(alpha: float) -> float:
    """``4 exp(-2 pi^2 alpha^2)``, bound on ``|P - total_length|``."""
    return 4.0 * math.exp(-TWO_PI2 * alpha * alpha)


@dataclass(frozen=True)
class WrappedGaussianQuery:
    """``P(frac(alpha Z) in set)`` with ``k_max`` theta-series terms."""

    alpha: float
    set: UnitIntervalSet
    k_max: int | None = None

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise DomainError(f"alpha must be a positive real, got {self.alpha!r}")
        if self.k_max is not None and (int(self.k_max) != self.k_max or self.k_max < 1):
            raise DomainError("k_max must be an integer >= 1")


@dataclass(frozen=True)
class Mod1Result:
    """Wrapped-Gaussian probability with its error accounting.

    Attributes
    ----------
    prob : float
        Clamped to [0, 1].
    error_cap : float
        ``gaussian_cap + truncation_error``.
    gaussian_cap : float
        ``4 exp(-2 pi^2 alpha^2)``, the distance allowed from total_length.
    truncation_error : float
        Bound on the dropped theta-series terms.
    raw : float
        Value before clamping.
    """

    prob: float
    error_cap: float
    gaussian_cap: float
    truncation_error: float
    raw: float


def _sin_2pi(y: np.ndarray) -> np.ndarray:
    """``sin(2 pi y)`` after exact reduction mod 1; zero at half-integers."""
    r = np.remainder(y, 1.0)
    out = np.sin(2.0 * math.pi * r)
    out[(r == 0.0) | (r == 0.5)] = 0.0
    return out


def gaussian_mod1_prob(q: WrappedGaussianQuery) -> Mod1Result:
    """Probability that ``alpha Z`` mod 1 falls in ``q.set``, Z standard normal.

    Examples
    --------
    >>> from cbedigits.digits import UnitIntervalSet
    >>> gaussian_mod1_prob(WrappedGaussianQuery(0.3, UnitIntervalSet([0.0], [0.5]))).prob
    0.5
    """
    s = q.set
    alpha = float(q.alpha)
    k_max = default_k_max(alpha) if q.k_max is None else int(q.k_max)
    length = s.total_length
    k = np.arange(1, k_max + 1, dtype=np.float64)
    w = np.exp(-TWO_PI2 * alpha * alpha * k * k)
    if len(s):
        kk = k[:, None]
        coef = (_sin_2pi(kk * s.hi[None, :]) - _sin_2pi(kk * s.lo[None, :])).sum(axis=1)
        series = math.fsum((2.0 * w * coef / (2.0 * math.pi * k)).tolist())
    else:
        series = 0.0
    raw = length + series
    g = TWO_PI2 * alpha * alpha
    trunc = 2.0 * length * math.exp(-g * (k_max + 1) ** 2) / -math.expm1(-g * (2 * k_max + 3))
    cap = wrapped_gaussian_cap(alpha)
    return Mod1Result(min(1.0, max(0.0, raw)), cap + trunc, cap, trunc, raw)


def grid_cumulative(x, rho, where):
    """Integral of the piecewise-linear interpolant of ``rho`` up to ``where``.

    Points outside ``[x[0], x[-1]]`` are clipped, so the interpolant
    vanishes beyond the grid.
    """
    x = np.asarray(x, dtype=np.float64)
    rho = np.asarray(rho, dtype=np.float64)
    h = x[1] - x[0]
    cells = 0.5 * h * (rho[1:] + rho[:-1])
    cum = np.concatenate([[0.0], np.cumsum(cells)])
    w = np.clip(np.asarray(where, dtype=np.float64), x[0], x[-1])
    i = np.clip(((w - x[0]) / h).astype(np.int64), 0, x.shape[0] - 2)
    d = w - x[i]
    slope = (rho[i + 1] - rho[i]) / h
    return cum[i] + rho[i] * d + 0.5 * slope * d * d


def wrapped_prob_from_density(density, set_: UnitIntervalSet, period: float,
                              max_tail: float = 1e-6, min_span_sigmas: float = 12.0) -> float:
    """``P(frac(X / period) in set_)`` for X with a tabulated density.

    Parameters
    ----------
    density : DensityGrid
        Uniform grid ``x`` with density values ``rho``; ``meta`` must
        provide ``sigma`` and ``tail_mass``.
    set_ : UnitIntervalSet
    period : float
        Length of one wrap in the units of ``x`` (``log b`` for base-b
        digits of ``exp(X)``).

    Raises
    ------
    CoverageError
        If the grid covers fewer than ``min_span_sigmas`` standard
        deviations or the tail mass outside it may exceed ``max_tail``.
    """
    if not period > 0:
        raise DomainError("period must be positive")
    x, rho, meta = density.x, density.rho, density.meta
    span = x[-1] - x[0]
    if span < min_span_sigmas * meta["sigma"]:
        raise CoverageError(f"grid spans {span / meta['sigma']:.2f} sigma, need {min_span_sigmas}")
    if meta["tail_mass"] > max_tail:
        raise CoverageError(f"grid tail mass {meta['tail_mass']:.3g} exceeds {max_tail:g}")
    if len(set_) == 0:
        return 0.0
    k = np.arange(math.floor(x[0] / period) - 1, math.ceil(x[-1] / period) + 2, dtype=np.float64)
    lo = (set_.lo[None, :] + k[:, None]) * period
    hi = (set_.hi[None, :] + k[:, None]) * period
    # drop shifts that miss the grid entirely
    live = (hi.max(axis=1) > x[0]) & (lo.min(axis=1) < x[-1])
    diff = grid_cumulative(x, rho, hi[live]) - grid_cumulative(x, rho, lo[live])
    return float(min(1.0, max(0.0, math.fsum(diff.ravel().tolist()))))
