"""Samplers for log|D|, a small-N rejection oracle and a negative control.

Random numbers come from numpy's counter-based Philox generator keyed by
``(seed, stream)``. Draws are produced in fixed-size chunks, one stream per
chunk, so a batch is the same whatever order or worker count produces it.

The negative control is a family where the CLT holds but Benford's law
fails: ``X = 10^{Y + eps Z}`` with Y binomial and Z standard normal, and
the plain sign sum whose characteristic function is ``cos(t)^n``.
"""
from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .charfn import EnsembleParams
from .density import build_density
from .digits import DigitPattern, digit_event_set
from .errors import CapacityError, DomainError

__all__ = [
    "Method",
    "Variant",
    "ValueKind",
    "CounterexampleParams",
    "SampleBatch",
    "EigenvalueBatch",
    "stream_generator",
    "sample_log_abs_d",
    "sample_eigenvalues_smallN",
    "counterexample_sample",
    "digit_frequencies",
    "CHUNK",
]

CHUNK = 1 << 16
MAX_SMALL_N = 4
MAX_SMALL_BETA = 8.0


class Method(str, enum.Enum):
    INVERSE_CDF = "INVERSE_CDF"
    REJECTION = "REJECTION"
    COUNTEREXAMPLE = "COUNTEREXAMPLE"


class Variant(str, enum.Enum):
    BINOMIAL_POWER = "BINOMIAL_POWER"
    SIGN_SUM = "SIGN_SUM"


class ValueKind(str, enum.Enum):
    """How stored values relate to the number whose digits are studied."""

    LN = "ln"        # value = log X
    LOG10 = "log10"  # value = log10 X
    RAW = "raw"      # value = X


@dataclass(frozen=True)
class CounterexampleParams:
    """Sign-sum or binomial-power process with ``n`` summands."""

    n: int
    eps: float = 0.0
    variant: Variant = Variant.BINOMIAL_POWER

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError("n must be an integer >= 1")
        if not (self.eps >= 0 and math.isfinite(self.eps)):
            raise DomainError("eps must be a finite real >= 0")
        object.__setattr__(self, "variant", Variant(self.variant))


@dataclass(frozen=True, eq=False)
class SampleBatch:
    """Draws with everything needed to reproduce them.

    ``values`` holds log|D| for the ensemble samplers. For BINOMIAL_POWER
    it holds ``log10 X = Y + eps Z`` rather than ``X`` itself, which would
    overflow for large n and lose the exact powers of ten when eps = 0.
    """

    params: EnsembleParams | CounterexampleParams
    seed: int
    values: np.ndarray
    method: Method
    value_kind: ValueKind = ValueKind.LN
    acceptance_rate: float | None = None

    def __len__(self) -> int:
        return self.values.shape[0]

    def to_csv(self) -> str:
        """One value per line under a commented header line."""
        buf = io.StringIO()
        p = self.params
        if isinstance(p, EnsembleParams):
            desc = f"n={p.n},beta={p.beta!r}"
        else:
            desc = f"n={p.n},eps={p.eps!r},variant={p.variant.value}"
        buf.write(f"# {desc},seed={self.seed},method={self.method.value},"
                  f"value_kind={self.value_kind.value}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["value"])
        for v in self.values.tolist():
            w.writerow([repr(v)])
        return buf.getvalue()


def _check_seed(seed) -> int:
    if isinstance(seed, bool) or int(seed) != seed or not 0 <= seed < 2 ** 64:
        raise DomainError("seed must be an integer in [0, 2**64)")
    return int(seed)


def stream_generator(seed: int, stream: int) -> np.random.Generator:
    """Philox generator keyed by ``(seed, stream)``."""
    return np.random.Generator(np.random.Philox(key=[_check_seed(seed), int(stream)]))


def _chunks(count: int):
    for s, start in enumerate(range(0, count, CHUNK)):
        yield s, min(CHUNK, count - start)


def _check_count(count) -> int:
    if int(count) != count or count < 1:
        raise DomainError("count must be a positive integer")
    return int(count)


def _inverse_cdf(grid):
    cdf = np.asarray(grid.cdf)
    keep = np.concatenate([[True], np.diff(cdf) > 0])
    return PchipInterpolator(cdf[keep], np.asarray(grid.x)[keep], extrapolate=False)


def sample_log_abs_d(p: EnsembleParams, count: int, seed: int, grid=None) -> SampleBatch:
    """Draws of log|D| by inverse transform of the tabulated CDF.

    The inverse CDF is the monotone cubic (PCHIP) interpolant through the
    grid nodes where the CDF strictly increases.
    """
    count = _check_count(count)
    seed = _check_seed(seed)
    grid = build_density(p) if grid is None else grid
    inv = _inverse_cdf(grid)
    top = float(grid.cdf[-1])
    out = np.empty(count)
    pos = 0
    for s, m in _chunks(count):
        u = stream_generator(seed, s).random(m) * top
        out[pos:pos + m] = inv(u)
        pos += m
    out.flags.writeable = False
    return SampleBatch(p, seed, out, Method.INVERSE_CDF)


@dataclass(frozen=True, eq=False)
class EigenvalueBatch:
    """Eigenangle draws from the rejection oracle."""

    params: EnsembleParams
    seed: int
    theta: np.ndarray
    log_abs_d: np.ndarray
    acceptance_rate: float
    proposals: int

    def as_sample_batch(self) -> SampleBatch:
        return SampleBatch(self.params, self.seed, self.log_abs_d, Method.REJECTION,
                           ValueKind.LN, self.acceptance_rate)


def _log_vandermonde(theta: np.ndarray) -> np.ndarray:
    n = theta.shape[1]
    out = np.zeros(theta.shape[0])
    for j in range(n):
        for k in range(j + 1, n):
            out += np.log(np.abs(2.0 * np.sin(0.5 * (theta[:, j] - theta[:, k]))))
    return out


def sample_eigenvalues_smallN(p: EnsembleParams, count: int, seed: int) -> EigenvalueBatch:
    """Exact eigenangle samples for N <= 4 by rejection from the uniform law.

    A uniform proposal on ``[0, 2 pi)^N`` is accepted with probability
    ``prod_{j<k} |e^{i theta_j} - e^{i theta_k}|^beta / 2^{beta N (N-1)/2}``.
    ``log|D| = sum_j log|2 sin(theta_j / 2)|`` is evaluated at theta = 0.

    Raises
    ------
    CapacityError
        For N > 4, where the acceptance rate collapses.
    DomainError
        For beta > 8.
    """
    count = _check_count(count)
    seed = _check_seed(seed)
    if p.n > MAX_SMALL_N:
        raise CapacityError(f"the rejection oracle supports N <= {MAX_SMALL_N}")
    if p.beta > MAX_SMALL_BETA:
        raise DomainError(f"the rejection oracle supports beta <= {MAX_SMALL_BETA:g}")
    n, beta = p.n, p.beta
    log_env = beta * n * (n - 1) / 2.0 * math.log(2.0)
    thetas = []
    got = 0
    proposals = 0
    stream = 0
    while got < count:
        rng = stream_generator(seed, stream)
        stream += 1
        th = rng.random((CHUNK, n)) * (2.0 * math.pi)
        u = rng.random(CHUNK)
        proposals += CHUNK
        acc = np.log(u) <= beta * _log_vandermonde(th) - log_env
        thetas.append(th[acc])
        got += int(acc.sum())
    theta = np.concatenate(thetas)[:count]
    logd = np.log(np.abs(2.0 * np.sin(0.5 * theta))).sum(axis=1)
    theta.flags.writeable = False
    logd.flags.writeable = False
    return EigenvalueBatch(p, seed, theta, logd, got / proposals, proposals)


def counterexample_sample(cp: CounterexampleParams, count: int, seed: int) -> SampleBatch:
    """Draws of the negative-control process.

    BINOMIAL_POWER stores ``log10 X = Y + eps Z`` with ``Y ~ Bin(n, 1/2)``;
    SIGN_SUM stores ``sum_k xi_k`` with independent fair signs.
    """
    count = _check_count(count)
    seed = _check_seed(seed)
    out = np.empty(count)
    pos = 0
    for s, m in _chunks(count):
        rng = stream_generator(seed, s)
        y = rng.binomial(cp.n, 0.5, size=m)
        if cp.variant is Variant.SIGN_SUM:
            out[pos:pos + m] = 2.0 * y - cp.n
        else:
            z = rng.standard_normal(m)
            out[pos:pos + m] = y + cp.eps * z if cp.eps > 0 else y.astype(np.float64)
        pos += m
    out.flags.writeable = False
    kind = ValueKind.RAW if cp.variant is Variant.SIGN_SUM else ValueKind.LOG10
    return SampleBatch(cp, seed, out, Method.COUNTEREXAMPLE, kind)


def _log_b(batch: SampleBatch, b: int) -> np.ndarray:
    v = np.asarray(batch.values, dtype=np.float64)
    if batch.value_kind is ValueKind.LN:
        return v / math.log(b)
    if batch.value_kind is ValueKind.LOG10:
        return v if b == 10 else v * (math.log(10.0) / math.log(b))
    a = np.abs(v)
    res = np.full(a.shape, np.nan)
    nz = a > 0
    res[nz] = np.log(a[nz]) / math.log(b)
    return res


def digit_frequencies(batch: SampleBatch, pattern: DigitPattern) -> tuple[float, float]:
    """Empirical frequency of a digit event and its binomial standard error.

    Membership is decided on ``frac(log_b X)``. Zero raw values have no
    digits and count as misses.
    """
    n = len(batch)
    if n == 0:
        raise DomainError("empty batch")
    lb = _log_b(batch, pattern.base)
    ok = np.isfinite(lb)
    u = np.zeros(n)
    # integers stay exact: frac of an exact power is 0
    u[ok] = lb[ok] - np.floor(lb[ok])
    hit = np.zeros(n, dtype=bool)
    hit[ok] = digit_event_set(pattern).contains(u[ok])
    f = float(hit.mean())
    return f, math.sqrt(f * (1.0 - f) / n)
