"""Cumulants of log|D| from their Hurwitz-zeta series, and related bounds.

With ``a_j = j beta / 2`` the k-th cumulant is

    C_k = (-1)^k (2^{k-1} - 1) / 2^{k-1} (k-1)! sum_j zeta(k, a_j)

where ``zeta(k, s) = sum_{n>=1} (n+s)^{-k}``. The mean is zero and the
variance is ``C_2 = (1/2) sum_j zeta(2, a_j)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .charfn import EnsembleParams
from .errors import DomainError
from .specfun import hurwitz_zeta_array

__all__ = [
    "CumulantVector",
    "zeta_sum",
    "variance",
    "cumulant",
    "cumulant_vector",
    "t_n",
    "variance_bracket",
    "third_derivative_cap",
    "third_log_derivative_bound",
    "gaussian_c1",
    "gaussian_approx_error",
    "moments",
    "chebyshev_tail_bound",
]

K_CAP = 12


@lru_cache(maxsize=512)
def _zeta_sum(n: int, beta: float, k: int) -> float:
    a = np.arange(n, dtype=np.float64) * (beta / 2.0)
    # ascending magnitude: large-j terms are the smallest
    return math.fsum(hurwitz_zeta_array(k, a)[::-1])


def zeta_sum(p: EnsembleParams, k: int) -> float:
    """``sum_j zeta(k, j beta/2)`` over j = 0..n-1."""
    if int(k) != k or k < 2:
        raise DomainError(f"zeta_sum needs an integer k >= 2, got {k!r}")
    return _zeta_sum(p.n, p.beta, int(k))


def variance(p: EnsembleParams) -> float:
    """Variance of log|D|, ``(1/2) sum_j zeta(2, j beta/2)``.

    Examples
    --------
    >>> round(variance(EnsembleParams(1, 2)), 7)
    0.822467
    """
    return 0.5 * zeta_sum(p, 2)


def cumulant(p: EnsembleParams, k: int, k_cap: int = K_CAP) -> float:
    """The k-th cumulant of log|D|.

    Parameters
    ----------
    p : EnsembleParams
    k : int
        Order, ``2 <= k <= k_cap``.
    k_cap : int
        Guard against factorial overflow; raise it explicitly for
        high-order moment bounds.

    Raises
    ------
    DomainError
        For ``k < 2`` or ``k > k_cap``.
    """
    if int(k) != k or k < 2:
        raise DomainError(f"cumulant order must be an integer >= 2, got {k!r}")
    if k > k_cap:
        raise DomainError(f"cumulant order {k} exceeds the cap {k_cap}")
    k = int(k)
    if k == 2:
        return variance(p)
    pref = (2.0 ** (k - 1) - 1.0) / 2.0 ** (k - 1) * math.factorial(k - 1)
    return (-1) ** k * pref * zeta_sum(p, k)


@dataclass(frozen=True)
class CumulantVector:
    """Cumulants ``C_1..C_kmax``; ``values[0]`` is the mean, exactly 0."""

    params: EnsembleParams
    values: tuple[float, ...]

    def __getitem__(self, k: int) -> float:
        """1-based access, ``cv[k] == C_k``."""
        if k < 1 or k > len(self.values):
            raise IndexError(k)
        return self.values[k - 1]


def cumulant_vector(p: EnsembleParams, k_max: int = 4, k_cap: int = K_CAP) -> CumulantVector:
    """Cumulants of orders 1..k_max."""
    if k_max < 1:
        raise DomainError("k_max must be at least 1")
    vals = [0.0] + [cumulant(p, k, k_cap) for k in range(2, k_max + 1)]
    return CumulantVector(p, tuple(vals))


def t_n(p: EnsembleParams) -> float:
    """Standard deviation ``T_N`` of log|D|."""
    return math.sqrt(variance(p))


def variance_bracket(p: EnsembleParams) -> tuple[float, float]:
    """Closed-form lower and upper bounds on the variance.

    ``(1/beta) log(1 + beta N / 2) < var <= (1/beta)(log N + 1 + beta)``.
    """
    b, n = p.beta, p.n
    return math.log1p(b * n / 2.0) / b, (math.log(n) + 1.0 + b) / b


def third_derivative_cap(beta: float) -> float:
    """Closed cap ``5/beta + 15/4`` on the third log-derivative of psi."""
    return 5.0 / beta + 3.75


def third_log_derivative_bound(p: EnsembleParams) -> float:
    """``min((5/2) sum_j zeta(3, a_j), 5/beta + 15/4)``."""
    return min(2.5 * zeta_sum(p, 3), third_derivative_cap(p.beta))


def gaussian_c1(beta: float) -> float:
    """``c1 = (c/6) exp(c/6)`` with ``c = 5/beta + 15/4``."""
    c = third_derivative_cap(beta)
    return c / 6.0 * math.exp(c / 6.0)


def gaussian_approx_error(p: EnsembleParams, t: float) -> float:
    """Bound on ``|psi(t/T_N) - exp(-t^2/2)|`` for ``|t| <= T_N``.

    Returns ``(c1 / T_N^3) exp(-t^2/2) |t|^3``.

    Raises
    ------
    DomainError
        When ``|t| > T_N``.
    """
    tn = t_n(p)
    if not abs(t) <= tn:
        raise DomainError(f"|t| = {abs(t):g} exceeds T_N = {tn:g}")
    return gaussian_c1(p.beta) / tn ** 3 * math.exp(-0.5 * t * t) * abs(t) ** 3


def moments(p: EnsembleParams, order: int) -> np.ndarray:
    """Raw moments ``E X^0 .. E X^order`` of ``X = log|D|`` from cumulants.

    Uses ``m_n = sum_{k=1}^{n} binom(n-1, k-1) C_k m_{n-k}``. Moments grow
    factorially, so orders much beyond 100 overflow.
    """
    kap = [0.0, 0.0] + [cumulant(p, k, k_cap=order) for k in range(2, order + 1)]
    m = np.zeros(order + 1)
    m[0] = 1.0
    for n in range(1, order + 1):
        m[n] = math.fsum(math.comb(n - 1, k - 1) * kap[k] * m[n - k] for k in range(1, n + 1))
    return m


def chebyshev_tail_bound(p: EnsembleParams, y: float, max_order: int = 60) -> float:
    """Moment bound on ``P(|X| >= y)``: ``min_k E X^{2k} / y^{2k}``."""
    if y <= 0:
        return 1.0
    m = moments(p, max_order)
    even = np.arange(2, max_order + 1, 2)
    with np.errstate(over="ignore"):
        logs = np.log(m[even]) - even * math.log(y)
    return float(min(1.0, math.exp(np.min(logs))))
