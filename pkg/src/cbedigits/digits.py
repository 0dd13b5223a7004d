"""Base-b digits, Benford probabilities and digit events as interval sets.

A positive x has leading digits ``k_1..k_m`` exactly when
``frac(log_b x)`` lies in ``[log_b n - (m-1), log_b(n+1) - (m-1))`` with
``n = sum_j k_j b^{m-j}``. Events on later digits are finite unions of
such intervals over the unconstrained digits.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import CapacityError, DomainError

__all__ = [
    "PatternKind",
    "DigitPattern",
    "UnitIntervalSet",
    "extract_digits",
    "leading_interval",
    "benford_prob",
    "single_digit_prob",
    "positioned_digit_set",
    "digit_event_set",
    "positioned_deviation_bound",
    "MAX_INTERVALS",
]

MAX_INTERVALS = 10_000_000
MAX_BASE = 36


class PatternKind(str, enum.Enum):
    LEADING = "LEADING"
    POSITIONED = "POSITIONED"


def _check_base(b):
    if isinstance(b, bool) or int(b) != b or not 2 <= b <= MAX_BASE:
        raise DomainError(f"base must be an integer in [2, {MAX_BASE}], got {b!r}")
    return int(b)


@dataclass(frozen=True)
class DigitPattern:
    """Constraint on the digits of a number in base ``base``.

    LEADING patterns fix ``d_1..d_l = values`` (``d_1 != 0``). POSITIONED
    patterns fix ``d_{m_s} = k_s`` at strictly increasing positions
    ``m_s >= 2`` and leave every other digit free.
    """

    base: int
    kind: PatternKind
    values: tuple[int, ...]
    positions: tuple[int, ...] = ()

    def __post_init__(self):
        b = _check_base(self.base)
        vals = tuple(int(v) for v in self.values)
        if not vals:
            raise DomainError("a digit pattern needs at least one digit")
        if any(v < 0 or v >= b for v in vals):
            raise DomainError(f"digits must lie in 0..{b - 1}")
        kind = PatternKind(self.kind)
        pos = tuple(int(m) for m in self.positions)
        if kind is PatternKind.LEADING:
            if pos:
                raise DomainError("LEADING patterns take no positions")
            if vals[0] == 0:
                raise DomainError("the leading digit cannot be 0")
        else:
            if len(pos) != len(vals):
                raise DomainError("positions and values must have equal length")
            if pos[0] < 2 or any(b2 <= a2 for a2, b2 in zip(pos, pos[1:])):
                raise DomainError("positions must be strictly increasing and >= 2")
        object.__setattr__(self, "base", b)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "positions", pos)

    @classmethod
    def leading(cls, base: int, digits) -> "DigitPattern":
        if isinstance(digits, int):
            digits = (digits,)
        return cls(base, PatternKind.LEADING, tuple(digits))

    @classmethod
    def positioned(cls, base: int, pairs) -> "DigitPattern":
        """From ``[(m_1, k_1), (m_2, k_2), ...]``."""
        pairs = sorted((int(m), int(k)) for m, k in pairs)
        return cls(base, PatternKind.POSITIONED, tuple(k for _, k in pairs),
                   tuple(m for m, _ in pairs))

    def matches(self, digits) -> bool:
        """Whether a digit tuple ``(d_1, d_2, ...)`` satisfies the pattern."""
        if self.kind is PatternKind.LEADING:
            return tuple(digits[:len(self.values)]) == self.values
        return all(digits[m - 1] == k for m, k in zip(self.positions, self.values))

    @property
    def depth(self) -> int:
        """Number of leading digits needed to decide the pattern."""
        return len(self.values) if self.kind is PatternKind.LEADING else self.positions[-1]


class UnitIntervalSet:
    """Ordered disjoint half-open intervals ``[lo_i, hi_i)`` inside [0, 1].

    Parameters
    ----------
    lo, hi : array_like
        Endpoints with ``0 <= lo_0 < hi_0 <= lo_1 < ... <= 1``.
    lengths : array_like, optional
        Interval lengths when they are known more accurately than
        ``hi - lo`` (for example ``log_b(1 + 1/n)``).
    """

    def __init__(self, lo, hi, lengths=None):
        lo = np.array(lo, dtype=np.float64).ravel()
        hi = np.array(hi, dtype=np.float64).ravel()
        if lo.shape != hi.shape:
            raise DomainError("lo and hi must have the same length")
        if lo.size:
            if lo[0] < 0 or hi[-1] > 1 or np.any(hi <= lo) or np.any(lo[1:] < hi[:-1]):
                raise DomainError("intervals must be ordered, disjoint, nonempty and inside [0, 1]")
        lengths = hi - lo if lengths is None else np.array(lengths, dtype=np.float64).ravel()
        for arr in (lo, hi, lengths):
            arr.flags.writeable = False
        self.lo, self.hi, self.lengths = lo, hi, lengths
        self.total_length = math.fsum(lengths.tolist())

    @classmethod
    def full(cls) -> "UnitIntervalSet":
        return cls([0.0], [1.0])

    def __len__(self) -> int:
        return self.lo.shape[0]

    def __iter__(self):
        return iter(zip(self.lo.tolist(), self.hi.tolist()))

    def __repr__(self) -> str:
        return f"UnitIntervalSet({len(self)} intervals, total_length={self.total_length!r})"

    def contains(self, u):
        """Membership of points ``u`` in [0, 1) (vectorized)."""
        u = np.asarray(u, dtype=np.float64)
        idx = np.searchsorted(self.lo, u, side="right") - 1
        ok = idx >= 0
        res = np.zeros(u.shape, dtype=bool)
        res[ok] = u[ok] < self.hi[idx[ok]]
        return res

    def complement(self) -> "UnitIntervalSet":
        """``[0, 1)`` minus this set."""
        edges_lo = np.concatenate([[0.0], self.hi])
        edges_hi = np.concatenate([self.lo, [1.0]])
        keep = edges_hi > edges_lo
        return UnitIntervalSet(edges_lo[keep], edges_hi[keep])

    def shifted(self, c: float) -> "UnitIntervalSet":
        """Rotate by ``c`` modulo 1, splitting intervals that wrap."""
        c = c - math.floor(c)
        lo = self.lo + c
        hi = self.hi + c
        pieces = []
        for a, b in zip(lo.tolist(), hi.tolist()):
            if a >= 1.0:
                pieces.append((a - 1.0, b - 1.0))
            elif b > 1.0:
                pieces.append((a, 1.0))
                pieces.append((0.0, b - 1.0))
            else:
                pieces.append((a, b))
        pieces = sorted(p for p in pieces if p[1] > p[0])
        merged = []
        for a, b in pieces:
            if merged and a <= merged[-1][1]:
                merged[-1] = (merged[-1][0], max(b, merged[-1][1]))
            else:
                merged.append((a, b))
        return UnitIntervalSet([a for a, _ in merged], [b for _, b in merged])

    def to_dict(self) -> dict:
        return {"intervals": [[a, b] for a, b in self], "total_length": self.total_length}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "UnitIntervalSet":
        iv = d["intervals"]
        return cls([a for a, _ in iv], [b for _, b in iv])


def _fraction_pow(b: int, m: int) -> Fraction:
    return Fraction(b) ** m


def extract_digits(x: float, b: int, m: int) -> tuple[tuple[int, ...], int]:
    """First ``m`` base-``b`` digits of ``x`` and its exponent.

    Returns ``(digits, M)`` with ``b^M <= x < b^(M+1)``. All comparisons
    are exact on the binary value of ``x``.

    Examples
    --------
    >>> extract_digits(123.4, 10, 3)
    ((1, 2, 3), 2)
    >>> extract_digits(0.005, 10, 2)
    ((5, 0), -3)
    """
    b = _check_base(b)
    if int(m) != m or m < 1:
        raise DomainError("m must be a positive integer")
    x = float(x)
    if not (x > 0 and math.isfinite(x)):
        raise DomainError(f"extract_digits needs a finite x > 0, got {x!r}")
    exact = Fraction(x)
    e = math.floor(math.log(x) / math.log(b))
    while _fraction_pow(b, e) > exact:
        e -= 1
    while _fraction_pow(b, e + 1) <= exact:
        e += 1
    sig = exact / _fraction_pow(b, e)
    scaled = math.floor(sig * b ** (m - 1))
    digits = []
    for _ in range(int(m)):
        digits.append(scaled % b)
        scaled //= b
    return tuple(reversed(digits)), e


def _prefix_value(values, b) -> int:
    n = 0
    for v in values:
        n = n * b + v
    return n


def _intervals_from_runs(starts, ends, m: int, b: int) -> UnitIntervalSet:
    """Intervals ``[log_b s - (m-1), log_b e - (m-1))`` for integer runs."""
    lb = math.log(b)
    scale = float(b) ** (m - 1)
    s = np.asarray(starts, dtype=np.float64)
    e = np.asarray(ends, dtype=np.float64)
    lo = np.log(s / scale) / lb
    hi = np.log(e / scale) / lb
    top = np.asarray(ends) == b ** m
    hi = np.where(top, 1.0, hi)
    lo = np.where(np.asarray(starts) == b ** (m - 1), 0.0, lo)
    lengths = np.log1p((e - s) / s) / lb
    return UnitIntervalSet(lo, hi, lengths)


def leading_interval(pattern: DigitPattern) -> UnitIntervalSet:
    """The single interval of ``frac(log_b x)`` giving the leading digits."""
    if pattern.kind is not PatternKind.LEADING:
        raise DomainError("leading_interval needs a LEADING pattern")
    b = pattern.base
    n = _prefix_value(pattern.values, b)
    return _intervals_from_runs([n], [n + 1], len(pattern.values), b)


def benford_prob(pattern: DigitPattern) -> float:
    """``log_b(1 + 1/n)`` where n is the digit prefix read as an integer.

    Examples
    --------
    >>> round(benford_prob(DigitPattern.leading(10, 1)), 7)
    0.30103
    """
    if pattern.kind is not PatternKind.LEADING:
        raise DomainError("benford_prob needs a LEADING pattern")
    n = _prefix_value(pattern.values, pattern.base)
    return math.log1p(1.0 / n) / math.log(pattern.base)


def single_digit_prob(ell: int, k: int, b: int) -> float:
    """Limit probability that digit number ``ell >= 2`` equals ``k``.

    ``sum_{s=b^(ell-2)}^{b^(ell-1)-1} log_b(1 + 1/(b s + k))``.
    """
    b = _check_base(b)
    if int(ell) != ell or ell < 2:
        raise DomainError("single_digit_prob needs ell >= 2")
    if not 0 <= k < b:
        raise DomainError(f"digit must lie in 0..{b - 1}")
    lo, hi = b ** (ell - 2), b ** (ell - 1)
    if hi - lo > MAX_INTERVALS:
        raise CapacityError("too many terms")
    s = np.arange(lo, hi, dtype=np.float64)
    return math.fsum((np.log1p(1.0 / (b * s + k)) / math.log(b)).tolist())


def positioned_deviation_bound(b: int, m1: int) -> float:
    """``log_b(1 + b^(1 - m1))``: the gap between a positioned set length and ``b^-L``."""
    return math.log1p(float(b) ** (1 - m1)) / math.log(b)


def positioned_digit_set(pattern: DigitPattern) -> UnitIntervalSet:
    """Union of leading intervals over all free digits of a positioned pattern.

    Digits ``d_1..d_{m_L}`` are enumerated with ``d_1 != 0`` and the fixed
    positions set; each tuple contributes the interval of its prefix
    integer. Consecutive prefixes are merged into one interval.

    Raises
    ------
    CapacityError
        When the enumeration would exceed ``MAX_INTERVALS`` intervals or the
        prefixes would not be exact in double precision.
    """
    if pattern.kind is not PatternKind.POSITIONED:
        raise DomainError("positioned_digit_set needs a POSITIONED pattern")
    b = pattern.base
    m_last = pattern.positions[-1]
    n_fixed = len(pattern.positions)
    count = (b - 1) * b ** (m_last - n_fixed - 1)
    if count > MAX_INTERVALS:
        raise CapacityError(f"{count} intervals exceed the cap of {MAX_INTERVALS}")
    if b ** m_last >= 2 ** 53:
        raise CapacityError("prefix integers are not exact in double precision")
    fixed = dict(zip(pattern.positions, pattern.values))
    n = np.arange(1, b, dtype=np.int64)
    for j in range(2, m_last + 1):
        if j in fixed:
            n = n * b + fixed[j]
        else:
            n = (n[:, None] * b + np.arange(b, dtype=np.int64)[None, :]).ravel()
    # merge runs of consecutive integers
    brk = np.flatnonzero(np.diff(n) != 1)
    starts = n[np.concatenate([[0], brk + 1])]
    ends = n[np.concatenate([brk, [n.shape[0] - 1]])] + 1
    return _intervals_from_runs(starts, ends, m_last, b)


def digit_event_set(pattern: DigitPattern) -> UnitIntervalSet:
    """Set S with ``pattern holds for x  <=>  frac(log_b x) in S``."""
    if pattern.kind is PatternKind.LEADING:
        return leading_interval(pattern)
    return positioned_digit_set(pattern)
