"""Frequency-regime upper bounds on |psi| as executable certificates.

Three regimes partition the frequency axis:

* LOW, ``|t| <= N^{5/7} beta/2``: ``|psi(t/T_N)| <= exp(-t^2/64)``;
* INTERMEDIATE, up to ``N beta sqrt(2)``: a power of ``c_*/sqrt(t)``;
* HIGH, beyond: ``sqrt(2/pi) c_*^{N-1} t^{-N/2} exp(-N^2 beta/50 + c3 N)``.

Edge points belong to the lower regime. The low-regime bound is stated for
the rescaled argument ``t/T_N``; the other two for ``t`` itself. Every
comparison happens in log space so that bounds far below the smallest
double still certify.
"""
from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .charfn import EnsembleParams, log_p_factor, log_psi_gamma, w_function
from .cumulants import gaussian_c1, t_n
from .errors import DomainError
from .specfun import log_gamma

__all__ = [
    "Regime",
    "Status",
    "BoundConstants",
    "RegimeBoundReport",
    "C_STAR",
    "C2",
    "C4",
    "FOUR_E",
    "c3",
    "bound_constants",
    "low_edge",
    "high_edge",
    "low_n_threshold",
    "classify",
    "log_bound_low",
    "bound_low",
    "intermediate_exponent",
    "log_bound_intermediate",
    "bound_intermediate",
    "intermediate_cap_applies",
    "log_intermediate_cap",
    "log_bound_high",
    "bound_high",
    "simplified_high_applies",
    "log_bound_high_simplified",
    "bound_high_simplified",
    "log_bound_unit_p",
    "stirling_ratio_bound",
    "stirling_ratio",
    "log_p_factor_bound",
    "log_certified_tail_bound",
    "verify_all",
    "reports_to_csv",
    "reports_to_json",
]

C_STAR = 9.0 * math.e / (4.0 * math.sqrt(2.0) * math.pi)
C2 = 1.0 / 32.0
C4 = C_STAR ** 4
FOUR_E = 4.0 * math.e
_LOG_C_STAR = math.log(C_STAR)
_SQRT2 = math.sqrt(2.0)
TOL = 1e-12


class Regime(str, enum.Enum):
    LOW = "LOW"
    INTERMEDIATE = "INTERMEDIATE"
    HIGH = "HIGH"


class Status(str, enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    SKIPPED = "SKIPPED"


def c3(p: EnsembleParams) -> float:
    """``(beta/8 - 1)/(2N) + 3 beta/8 + 3/2``."""
    return (p.beta / 8.0 - 1.0) / (2.0 * p.n) + 0.375 * p.beta + 1.5


@dataclass(frozen=True)
class BoundConstants:
    """Explicit constants of the regime bounds for one (N, beta)."""

    c_star: float
    c1: float
    c2: float
    c3: float
    c4: float


def bound_constants(p: EnsembleParams) -> BoundConstants:
    return BoundConstants(C_STAR, gaussian_c1(p.beta), C2, c3(p), C4)


def low_edge(p: EnsembleParams) -> float:
    """Upper end ``N^{5/7} beta / 2`` of the low regime."""
    return p.n ** (5.0 / 7.0) * p.beta / 2.0


def high_edge(p: EnsembleParams) -> float:
    """Lower end ``N beta sqrt(2)`` of the high regime."""
    return p.n * p.beta * _SQRT2


def low_n_threshold(beta: float) -> int:
    """Smallest N for which the low-regime bound is certified."""
    return max(6, math.ceil(math.exp(1.0 + beta)))


def classify(p: EnsembleParams, t: float) -> Regime:
    """Regime of frequency ``t``; edges go to the lower regime.

    Examples
    --------
    >>> classify(EnsembleParams(128, 2), 300.0).value
    'INTERMEDIATE'
    """
    a = abs(float(t))
    if a <= low_edge(p):
        return Regime.LOW
    if a <= high_edge(p):
        return Regime.INTERMEDIATE
    return Regime.HIGH


# ------------------------------------------------------------------ LOW

def _check_low(p, t):
    if abs(t) > low_edge(p):
        raise DomainError(f"|t| = {abs(t):g} is outside the low regime")
    if p.n < low_n_threshold(p.beta):
        raise DomainError(f"low-regime bound needs N >= {low_n_threshold(p.beta)}")


def log_bound_low(p: EnsembleParams, t: float) -> float:
    """``-t^2/64``, the log of the low-regime bound on ``|psi(t/T_N)|``."""
    _check_low(p, t)
    return -C2 * t * t / 2.0


def bound_low(p: EnsembleParams, t: float) -> float:
    """``exp(-t^2/64)``; compare against ``|psi(t/T_N)|``."""
    return math.exp(log_bound_low(p, t))


# --------------------------------------------------------- INTERMEDIATE

def intermediate_exponent(beta: float, t: float) -> int:
    """``J = [(|t|/(2 sqrt 2) - 1)/(beta/2)]``."""
    return math.floor((abs(t) / (2.0 * _SQRT2) - 1.0) / (beta / 2.0))


def _check_intermediate(p, t):
    a = abs(t)
    if not (FOUR_E < a <= high_edge(p)):
        raise DomainError("intermediate bound needs 4e < |t| <= N beta sqrt(2)")


def log_bound_intermediate(p: EnsembleParams, t: float) -> float:
    """Log of ``(2/pi)(c_*/sqrt|t|)^J``."""
    _check_intermediate(p, t)
    j = intermediate_exponent(p.beta, t)
    return math.log(2.0 / math.pi) + j * (_LOG_C_STAR - 0.5 * math.log(abs(t)))


def bound_intermediate(p: EnsembleParams, t: float) -> float:
    """``(2/pi)(c_*/sqrt|t|)^J`` for ``4e < |t| <= N beta sqrt(2)``.

    Examples
    --------
    >>> j = intermediate_exponent(2.0, 2 * 2 ** 0.5 * 11)
    >>> j
    10
    """
    return math.exp(log_bound_intermediate(p, t))


def intermediate_cap_applies(p: EnsembleParams, t: float) -> bool:
    """Whether the ``c_*^4 / t^2`` cap is certified at ``t``."""
    a = abs(t)
    big_n = p.n > (9.0 * _SQRT2 + 2.0 * _SQRT2 / p.beta) ** 1.4
    return big_n and low_edge(p) < a <= high_edge(p) and a > FOUR_E


def log_intermediate_cap(p: EnsembleParams, t: float) -> float:
    """Log of the cap ``c_*^4 / t^2``."""
    if not intermediate_cap_applies(p, t):
        raise DomainError("intermediate cap needs N > (9 sqrt2 + 2 sqrt2/beta)^{7/5} "
                          "and t in the intermediate regime")
    return math.log(C4) - 2.0 * math.log(abs(t))


# ----------------------------------------------------------------- HIGH

def _check_high(p, t):
    edge = high_edge(p)
    if not edge > FOUR_E:
        raise DomainError("high-regime bound needs N beta sqrt(2) > 4e")
    if abs(t) < edge:
        raise DomainError("high-regime bound needs |t| >= N beta sqrt(2)")


def log_bound_high(p: EnsembleParams, t: float) -> float:
    """Log of ``sqrt(2/pi) c_*^{N-1} |t|^{-N/2} exp(-N^2 beta/50) exp(c3 N)``."""
    _check_high(p, t)
    n = p.n
    return (0.5 * math.log(2.0 / math.pi) + (n - 1) * _LOG_C_STAR - 0.5 * n * math.log(abs(t))
            - n * n * p.beta / 50.0 + c3(p) * n)


def bound_high(p: EnsembleParams, t: float) -> float:
    """Full high-regime bound (may underflow; use the log form)."""
    return math.exp(log_bound_high(p, t))


def simplified_high_applies(p: EnsembleParams) -> bool:
    """``N > 75/beta + 75/4``."""
    return p.n > 75.0 / p.beta + 18.75


def log_bound_high_simplified(p: EnsembleParams, t: float) -> float:
    """Log of ``(2/pi) c_*^{N-1} |t|^{-N/2}``."""
    _check_high(p, t)
    if not simplified_high_applies(p):
        raise DomainError("simplified high bound needs N > 75/beta + 75/4")
    return math.log(2.0 / math.pi) + (p.n - 1) * _LOG_C_STAR - 0.5 * p.n * math.log(abs(t))


def bound_high_simplified(p: EnsembleParams, t: float) -> float:
    return math.exp(log_bound_high_simplified(p, t))


def unit_p_edge(p: EnsembleParams) -> float:
    """Frequency beyond which every P-factor term has modulus at most 1."""
    return max(FOUR_E, _SQRT2 * (p.n - 1) * p.beta)


def log_bound_unit_p(p: EnsembleParams, t: float) -> float:
    """Log of ``sqrt(2/pi) c_*^{N-1} |t|^{-N/2}`` for ``|t| > unit_p_edge``.

    Each factor ``|(v+it) v| / |v+it/2|^2`` of the P-factor is at most 1
    once ``v <= |t|/(2 sqrt 2)``; the largest v is ``(N-1) beta/2``. The
    gamma ratios are bounded exactly as in the high-regime bound.
    """
    if not abs(t) > unit_p_edge(p):
        raise DomainError("needs |t| > max(4e, sqrt(2)(N-1) beta)")
    return 0.5 * math.log(2.0 / math.pi) + (p.n - 1) * _LOG_C_STAR - 0.5 * p.n * math.log(abs(t))


def log_certified_tail_bound(p: EnsembleParams, t: float) -> float:
    """Smallest certified log-bound on ``|psi(t)|`` available at ``t``.

    Takes the minimum over the intermediate bound, both high-regime
    forms and the unit-P bound wherever their hypotheses hold, and 0
    (``|psi| <= 1``) otherwise.
    """
    cands = [0.0]
    a = abs(t)
    if FOUR_E < a <= high_edge(p):
        cands.append(log_bound_intermediate(p, a))
    if high_edge(p) > FOUR_E and a >= high_edge(p):
        cands.append(log_bound_high(p, a))
        if simplified_high_applies(p):
            cands.append(log_bound_high_simplified(p, a))
    if a > unit_p_edge(p):
        cands.append(log_bound_unit_p(p, a))
    return min(cands)


# ------------------------------------------------------- auxiliary bounds

def stirling_ratio(t: float, eps: float) -> float:
    """``|Gamma(1+it+eps) / Gamma(1+it/2+eps)^2|`` from log-gamma."""
    v = log_gamma(complex(1.0 + eps, t)).value - 2.0 * log_gamma(complex(1.0 + eps, t / 2.0)).value
    return math.exp(v.real)


def stirling_ratio_bound(t: float, eps: float = 0.0) -> float:
    """``c_* / sqrt|t|`` for ``|t| > 4e``, ``0 <= eps < 1``."""
    if not abs(t) > FOUR_E:
        raise DomainError("the gamma-ratio bound needs |t| > 4e")
    if not 0.0 <= eps < 1.0:
        raise DomainError("eps must lie in [0, 1)")
    return C_STAR / math.sqrt(abs(t))


def log_p_factor_bound(p: EnsembleParams, t: float) -> float:
    """Log of the bound on ``|P(t)|^2``: ``-(t^2/(2 beta)) W(N beta/(2t)) + 2 c3 N``.

    Valid for ``|t| >= (N-1) beta/2``.
    """
    a = abs(t)
    if not a >= (p.n - 1) * p.beta / 2.0 or a == 0:
        raise DomainError("P-factor bound needs |t| >= (N-1) beta / 2")
    return -(a * a / (2.0 * p.beta)) * w_function(p.n * p.beta / (2.0 * a)) + 2.0 * c3(p) * p.n


# --------------------------------------------------------------- reports

@dataclass(frozen=True)
class RegimeBoundReport:
    """One certificate evaluation.

    ``psi_abs`` is ``|psi(t/T_N)|`` in the LOW regime and ``|psi(t)|``
    otherwise. ``margin = bound - psi_abs`` may underflow to 0; the
    decision uses ``log_margin = log bound - log psi_abs``, and ``holds``
    is true when ``log_margin >= -1e-12`` or the row is SKIPPED.
    """

    t: float
    regime: Regime
    status: Status
    psi_abs: float
    bound: float
    log_psi_abs: float
    log_bound: float
    margin: float
    log_margin: float
    form: str
    note: str = ""

    @property
    def holds(self) -> bool:
        return self.status != Status.FAIL

    def as_dict(self) -> dict:
        d = asdict(self)
        d["regime"] = self.regime.value
        d["status"] = self.status.value
        d["holds"] = self.holds
        return d


_HIGH_FORMS = ("full", "simplified")
_INTERMEDIATE_FORMS = ("main", "cap")


def _report(t, regime, log_psi, log_bound, form, note=""):
    if log_bound is None:
        return RegimeBoundReport(t, regime, Status.SKIPPED, math.exp(log_psi), math.nan,
                                 log_psi, math.nan, math.nan, math.nan, form, note)
    lm = log_bound - log_psi
    status = Status.PASS if lm >= -TOL else Status.FAIL
    psi_abs = math.exp(log_psi)
    bound = math.exp(log_bound)
    return RegimeBoundReport(t, regime, status, psi_abs, bound, log_psi, log_bound,
                             bound - psi_abs, lm, form, note)


def verify_all(p: EnsembleParams, t_grid, intermediate_form: str = "main",
               high_form: str = "full") -> list[RegimeBoundReport]:
    """Evaluate the regime certificate at every grid frequency.

    Parameters
    ----------
    p : EnsembleParams
    t_grid : array_like
        Frequencies; reports come back sorted by t.
    intermediate_form : {"main", "cap"}
        Power bound, or the ``c_*^4/t^2`` cap.
    high_form : {"full", "simplified"}
        Full high-regime bound or the ``N > 75/beta + 75/4`` form.

    Returns
    -------
    list of RegimeBoundReport
        Rows whose hypotheses fail are SKIPPED with a note, never FAIL.
    """
    if intermediate_form not in _INTERMEDIATE_FORMS:
        raise DomainError(f"intermediate_form must be one of {_INTERMEDIATE_FORMS}")
    if high_form not in _HIGH_FORMS:
        raise DomainError(f"high_form must be one of {_HIGH_FORMS}")
    ts = np.sort(np.asarray(t_grid, dtype=np.float64).ravel())
    if ts.size == 0:
        return []
    if not np.all(np.isfinite(ts)):
        raise DomainError("t grid must be finite")
    regimes = [classify(p, t) for t in ts.tolist()]
    tn = t_n(p)
    eval_at = np.array([t / tn if r is Regime.LOW else t for t, r in zip(ts.tolist(), regimes)])
    log_psi = np.real(log_psi_gamma(p, eval_at))
    out = []
    for t, r, lp in zip(ts.tolist(), regimes, log_psi.tolist()):
        try:
            if r is Regime.LOW:
                lb, form = log_bound_low(p, t), "low"
            elif r is Regime.INTERMEDIATE:
                if intermediate_form == "cap":
                    lb, form = log_intermediate_cap(p, t), "cap"
                else:
                    lb, form = log_bound_intermediate(p, t), "main"
            else:
                if high_form == "simplified":
                    lb, form = log_bound_high_simplified(p, t), "simplified"
                else:
                    lb, form = log_bound_high(p, t), "full"
            out.append(_report(t, r, lp, lb, form))
        except DomainError as exc:
            out.append(_report(t, r, lp, None, "", str(exc)))
    return out


_CSV_FIELDS = ["t", "psi_abs", "bound", "regime", "holds", "margin",
               "status", "log_psi_abs", "log_bound", "log_margin", "form", "note"]


def reports_to_csv(reports) -> str:
    """CSV text with a stable header."""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=_CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in reports:
        d = r.as_dict()
        w.writerow({k: (repr(d[k]) if isinstance(d[k], float) else d[k]) for k in _CSV_FIELDS})
    return buf.getvalue()


def reports_to_json(reports, params: EnsembleParams | None = None) -> str:
    """JSON document ``{"schema": 1, "params": ..., "reports": [...]}``."""
    rows = []
    for r in reports:
        d = r.as_dict()
        rows.append({k: (None if isinstance(v, float) and not math.isfinite(v) else v)
                     for k, v in d.items()})
    doc = {"schema": 1, "reports": rows}
    if params is not None:
        doc["params"] = {"n": params.n, "beta": params.beta}
    return json.dumps(doc, indent=1, sort_keys=True)
