"""Characteristic function of log|D| for the circular beta ensemble.

Three equivalent evaluations are provided:

* ``psi_gamma``: the finite gamma-ratio product over j = 0..N-1;
* ``psi_weierstrass``: the infinite product over n of rational factors,
  truncated at ``n_max`` with a Hurwitz-series tail correction;
* ``psi_dissected``: gamma ratios at the fractional parts of j*beta/2
  times the finite rational k-products, whose j >= 1 part is the P-factor.

All evaluations work in log space. The value at -t is the conjugate of the
value at t by construction, and t = 0 returns exactly 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from . import _kernels
from .errors import DomainError
from .specfun import hurwitz_zeta_array

__all__ = [
    "EnsembleParams",
    "WeierstrassResult",
    "log_psi_gamma",
    "psi_gamma",
    "log_psi_weierstrass",
    "psi_weierstrass",
    "log_psi_dissected",
    "psi_dissected",
    "log_p_factor",
    "p_factor",
    "w_function",
    "relative_discrepancy",
]


def parse_beta(beta) -> tuple[float, Fraction | None]:
    """Return ``(float value, exact rational or None)`` for a beta given as a number or string.

    Integers, ``Fraction`` objects and strings such as ``"3/2"`` are kept
    exact; floats are not.
    """
    if isinstance(beta, bool):
        raise DomainError("beta must be a number")
    if isinstance(beta, str):
        try:
            exact = Fraction(beta.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"cannot parse beta {beta!r}") from exc
        return float(exact), exact
    if isinstance(beta, (int, np.integer, Fraction)):
        exact = Fraction(int(beta)) if not isinstance(beta, Fraction) else beta
        return float(exact), exact
    return float(beta), None


@dataclass(frozen=True)
class EnsembleParams:
    """Matrix size ``n`` and Dyson index ``beta`` of one ensemble.

    ``beta`` may be given as ``int``, ``Fraction`` or a ``"p/q"`` string,
    in which case the floors ``[j beta / 2]`` are computed exactly. A float
    beta uses a floating floor that snaps to the nearest integer within
    one ulp.
    """

    n: int
    beta: float
    beta_exact: Fraction | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be an integer >= 1, got {self.n!r}")
        value, exact = parse_beta(self.beta)
        if self.beta_exact is not None:
            exact = Fraction(self.beta_exact)
            value = float(exact)
        if not (math.isfinite(value) and value > 0):
            raise DomainError(f"beta must be a finite positive real, got {self.beta!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "beta", value)
        object.__setattr__(self, "beta_exact", exact)

    @cached_property
    def offsets(self) -> np.ndarray:
        """``a_j = j beta / 2`` for j = 0..n-1 (read-only)."""
        a = np.arange(self.n, dtype=np.float64) * (self.beta / 2.0)
        a.flags.writeable = False
        return a

    @cached_property
    def floors_fracs(self) -> tuple[np.ndarray, np.ndarray]:
        """Integer parts and fractional parts of the offsets (read-only)."""
        j = np.arange(self.n, dtype=np.int64)
        if self.beta_exact is not None:
            p, q = self.beta_exact.numerator, 2 * self.beta_exact.denominator
            if p * (self.n - 1) < 2 ** 62:
                num = j * p
                floors = num // q
                fracs = (num % q) / q
            else:
                floors = np.array([(k * p) // q for k in range(self.n)], dtype=np.int64)
                fracs = np.array([float(Fraction((k * p) % q, q)) for k in range(self.n)])
        else:
            x = np.asarray(self.offsets)
            r = np.rint(x)
            snap = np.abs(x - r) <= np.spacing(np.maximum(r, 1.0))
            floors = np.where(snap, r, np.floor(x)).astype(np.int64)
            fracs = np.where(snap, 0.0, x - np.floor(x))
        floors.flags.writeable = False
        fracs.flags.writeable = False
        return floors, fracs


def _t_array(t):
    arr = np.asarray(t, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise DomainError("frequencies must be finite")
    return arr, arr.ndim == 0


def _finish(vals, arr, scalar):
    vals = np.where(arr.ravel() < 0, np.conj(vals), vals)
    vals = np.where(arr.ravel() == 0, 0j, vals)
    if scalar:
        return complex(vals[0])
    return vals.reshape(arr.shape)


def log_psi_gamma(p: EnsembleParams, t):
    """Logarithm of psi from the gamma-ratio product.

    Each j contributes ``lg(1+it+a_j) + lg(1+a_j) - 2 lg(1+it/2+a_j)``;
    the contributions are summed with compensation before any
    exponentiation.

    Parameters
    ----------
    p : EnsembleParams
    t : float or array_like

    Returns
    -------
    complex or ndarray of complex
    """
    arr, scalar = _t_array(t)
    vals = _kernels.log_psi_gamma(np.abs(arr.ravel()), np.asarray(p.offsets))
    return _finish(vals, arr, scalar)


def psi_gamma(p: EnsembleParams, t):
    """Characteristic function ``E |D|^{it}`` from the gamma-ratio product.

    Examples
    --------
    >>> psi_gamma(EnsembleParams(10, 2), 0.0)
    (1+0j)
    """
    lv = log_psi_gamma(p, t)
    return complex(np.exp(lv)) if np.ndim(lv) == 0 else np.exp(lv)


@dataclass(frozen=True)
class WeierstrassResult:
    """Truncated infinite-product evaluation of psi.

    Attributes
    ----------
    value, log_value : complex or ndarray
        psi and its logarithm.
    tail_error : float or ndarray
        Bound on the error in ``log_value`` left by the truncated tail
        series; infinite when the series does not converge.
    truncation_warning : bool
        True when any ``tail_error`` exceeds 1e-8.
    """

    value: complex | np.ndarray
    log_value: complex | np.ndarray
    tail_error: float | np.ndarray
    truncation_warning: bool


def _scaled_hurwitz(m: int, s: np.ndarray) -> np.ndarray:
    """``(s+1)^m * sum_{n>=1} (n+s)^{-m}``, safe from underflow."""
    a = s + 1.0
    big = a >= 16.0 + m
    out = np.empty_like(a)
    if np.any(~big):
        out[~big] = hurwitz_zeta_array(m, s[~big]) * a[~big] ** m
    if np.any(big):
        ab = a[big]
        tot = ab / (m - 1.0) + 0.5
        rising = float(m)
        pw = 1.0 / ab
        for j, c in enumerate(_kernels.EM_COEF):
            tot = tot + c * rising * pw
            rising *= (m + 2 * j + 1.0) * (m + 2 * j + 2.0)
            pw = pw / (ab * ab)
        out[big] = tot
    return out


_TAIL_TERMS = 400


def _weierstrass_tail(t_abs: np.ndarray, a: np.ndarray, n_max: int):
    """Sum over n > n_max of the log-factors, by the Hurwitz power series.

    With u = t/(n + a) the log-factor expands as
    sum_{m>=2} c_m (iu)^m, c_m = (-1)^{m+1} (2^{1-m} - 1)/m.
    """
    s = n_max + a
    r = t_abs[:, None] / (s[None, :] + 1.0)
    rmax = r.max(axis=1) if r.size else np.zeros(t_abs.shape)
    tail = np.zeros(t_abs.shape[0], dtype=np.complex128)
    err = np.zeros(t_abs.shape[0])
    conv = rmax < 1.0
    n = a.shape[0]
    done = ~conv | (rmax == 0)
    if np.any(~conv):
        # the power series diverges; keep only the leading term
        zeta2 = hurwitz_zeta_array(2, s)
        tail[~conv] = -0.25 * t_abs[~conv] ** 2 * math.fsum(zeta2)
        err[~conv] = np.inf
    pw = np.ones_like(r)
    for m in range(2, _TAIL_TERMS + 2):
        if np.all(done):
            break
        pw = pw * r if m > 2 else r * r
        cm = (-1) ** (m + 1) * (2.0 ** (1 - m) - 1.0) / m
        im = (1j) ** (m % 4)
        zt = _scaled_hurwitz(m, s)
        live = ~done
        term = (pw[live] * zt[None, :]).sum(axis=1)
        tail[live] += cm * im * term
        # bound on everything after this m
        rl = rmax[live]
        nxt = m + 1
        bound = n * rl ** nxt * (1.0 + (n_max + 1.0) / (nxt - 1)) / nxt / (1.0 - rl)
        idx = np.flatnonzero(live)
        err[idx] = bound
        done[idx[bound < 1e-18]] = True
    return tail, err


def log_psi_weierstrass(p: EnsembleParams, t, n_max: int = 100_000):
    """Log of the truncated infinite product; see :func:`psi_weierstrass`."""
    res = psi_weierstrass(p, t, n_max)
    return res.log_value


def psi_weierstrass(p: EnsembleParams, t, n_max: int = 100_000) -> WeierstrassResult:
    """Infinite-product evaluation of psi, truncated at ``n_max``.

    The explicit product runs over n = 1..n_max for every j. The neglected
    factors are summed through their power series in ``t/(n + a_j)``,
    which telescopes into Hurwitz zeta values at ``n_max + a_j``; the
    returned ``tail_error`` bounds the terms dropped from that series.

    Parameters
    ----------
    p : EnsembleParams
    t : float or array_like
    n_max : int
        Number of explicit factors per j, at least 1.

    Returns
    -------
    WeierstrassResult
    """
    if int(n_max) != n_max or n_max < 1:
        raise DomainError(f"n_max must be a positive integer, got {n_max!r}")
    n_max = int(n_max)
    arr, scalar = _t_array(t)
    ta = np.abs(arr.ravel())
    floors, fracs = p.floors_fracs
    partial = _kernels.log_weierstrass(ta, floors, fracs, n_max)
    a = np.asarray(fracs) + np.asarray(floors)
    tail, err = _weierstrass_tail(ta, a, n_max)
    err = np.where(ta == 0, 0.0, err)
    lv = _finish(partial + tail, arr, scalar)
    err_out = float(err[0]) if scalar else err.reshape(arr.shape)
    val = complex(np.exp(lv)) if scalar else np.exp(lv)
    return WeierstrassResult(val, lv, err_out, bool(np.any(err > 1e-8)))


def log_p_factor(p: EnsembleParams, t):
    """Log of the P-factor, the product over j >= 1 of the k-products.

    The factor for (j, k) is ``(v+it) v / (v+it/2)^2`` with
    ``v = 1 + j beta/2 - k`` and k = 1..[j beta/2]. The imaginary part
    is reduced to the principal branch.
    """
    arr, scalar = _t_array(t)
    floors, fracs = p.floors_fracs
    vals = _kernels.log_kprod(np.abs(arr.ravel()), 1.0 + np.asarray(fracs), np.asarray(floors))
    return _finish(vals, arr, scalar)


def p_factor(p: EnsembleParams, t):
    """The finite double product P(t); equals 1 when every product is empty."""
    lv = log_p_factor(p, t)
    return complex(np.exp(lv)) if np.ndim(lv) == 0 else np.exp(lv)


def log_psi_dissected(p: EnsembleParams, t):
    """Log of psi from gamma ratios at fractional offsets times k-products."""
    arr, scalar = _t_array(t)
    floors, fracs = p.floors_fracs
    ta = np.abs(arr.ravel())
    g = _kernels.log_psi_gamma(ta, np.asarray(fracs))
    k = _kernels.log_kprod(ta, 1.0 + np.asarray(fracs), np.asarray(floors))
    return _finish(g + k, arr, scalar)


def psi_dissected(p: EnsembleParams, t):
    """Characteristic function from the dissected representation."""
    lv = log_psi_dissected(p, t)
    return complex(np.exp(lv)) if np.ndim(lv) == 0 else np.exp(lv)


def w_function(y):
    """``W(y) = log(4 y^2 + 1) - y arctan(2 y)`` for y >= 0.

    Examples
    --------
    >>> w_function(0.0)
    0.0
    """
    arr = np.asarray(y, dtype=np.float64)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0):
        raise DomainError("w_function needs finite y >= 0")
    out = np.log1p(4.0 * arr * arr) - arr * np.arctan(2.0 * arr)
    return float(out) if out.ndim == 0 else out


def relative_discrepancy(log_a, log_b):
    """``|psi_a / psi_b - 1|`` computed from two logarithms.

    The imaginary difference is wrapped to ``(-pi, pi]`` so logs that
    differ by a multiple of ``2 pi i`` compare equal.
    """
    d = np.asarray(log_a, dtype=np.complex128) - np.asarray(log_b, dtype=np.complex128)
    im = np.angle(np.exp(1j * d.imag))
    out = np.abs(np.expm1(d.real + 1j * im))
    return float(out) if out.ndim == 0 else out
