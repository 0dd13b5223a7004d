"""End-to-end acceptance criteria, one test per criterion.

Each criterion returns ``(ok, detail)`` and is timed against its budget.
A summary line per criterion is printed at the end of the pytest run, or
directly when this file is executed as a script.
"""
import itertools
import math
import time

import numpy as np
import pytest
from scipy import integrate

from cbedigits.charfn import (EnsembleParams, log_p_factor, log_psi_dissected, log_psi_gamma,
                              log_psi_weierstrass, psi_gamma, relative_discrepancy)
from cbedigits.cumulants import cumulant, t_n, variance, variance_bracket
from cbedigits.density import build_density, digit_prob_exact, kolmogorov_distance, tv_distance
from cbedigits.digits import DigitPattern, UnitIntervalSet, positioned_deviation_bound, positioned_digit_set
from cbedigits.mod1 import WrappedGaussianQuery, gaussian_mod1_prob, wrapped_gaussian_cap
from cbedigits.regimes import Status, high_edge, log_p_factor_bound, low_edge, verify_all
from cbedigits.sampler import (CounterexampleParams, Variant, counterexample_sample,
                               digit_frequencies, sample_eigenvalues_smallN, sample_log_abs_d)
from helpers import fd_cumulant, ks_two_sample

CRITERIA = {}


def criterion(number, title, budget):
    def wrap(fn):
        CRITERIA[number] = (title, budget, fn)
        return fn
    return wrap


def first_digit_probs(p, grid=None):
    grid = build_density(p) if grid is None else grid
    return np.array([digit_prob_exact(p, DigitPattern.leading(10, k), grid) for k in range(1, 10)])


BENFORD = np.log10(1 + 1 / np.arange(1, 10))


@criterion(1, "exact identity for N = 1", 1.0)
def acc_exact_identity():
    worst = 0.0
    for beta in (0.5, 1, 2, 4):
        p = EnsembleParams(1, beta)
        for t in (0.1, 1.0, 10.0, 100.0):
            exact = 2 / (math.pi * t) * math.tanh(math.pi * t / 2)
            worst = max(worst, abs(abs(psi_gamma(p, t)) ** 2 / exact - 1))
    return worst <= 1e-12, f"max rel err {worst:.2e}"


@criterion(2, "three representations agree", 30.0)
def acc_representations():
    t = np.geomspace(1e-2, 1e3, 200)
    worst = 0.0
    for n, beta in [(1, 2), (5, 1), (10, 2), (8, 4), (25, 2)]:
        p = EnsembleParams(n, beta)
        g, d, w = log_psi_gamma(p, t), log_psi_dissected(p, t), log_psi_weierstrass(p, t, 100_000)
        disc = np.maximum.reduce([relative_discrepancy(g, d), relative_discrepancy(g, w),
                                  relative_discrepancy(d, w)])
        worst = max(worst, float(disc.max()))
    return worst <= 1e-8, f"max rel discrepancy {worst:.2e}"


@criterion(3, "finite-difference cumulants", 10.0)
def acc_fd_cumulants():
    worst = 0.0
    for n, beta in [(5, 2), (20, 1), (10, 4)]:
        p = EnsembleParams(n, beta)
        f = lambda t: log_psi_weierstrass(p, t)
        for k in (2, 3, 4):
            worst = max(worst, abs(fd_cumulant(f, k, 1e-3) / cumulant(p, k) - 1))
    return worst <= 1e-6, f"max rel err {worst:.2e} (h = 1e-3, Richardson)"


@criterion(4, "variance bracket", 10.0)
def acc_variance_bracket():
    bad = 0
    closest = math.inf
    for beta in (0.5, 1.0, 2.0, 4.0):
        for n in range(1, 1001):
            p = EnsembleParams(n, beta)
            lo, hi = variance_bracket(p)
            v = variance(p)
            bad += not (lo < v <= hi)
            closest = min(closest, v - lo, hi - v)
    return bad == 0, f"{bad} violations in 4000 cases, min slack {closest:.3e}"


def _regime_grids(p, which):
    lo, hi = low_edge(p), high_edge(p)
    grids = {}
    if "low" in which:
        grids["low"] = np.linspace(0.0, lo, 500)
    if "intermediate" in which:
        grids["intermediate"] = np.geomspace(lo, hi, 501)[1:]
    if "high" in which:
        grids["high"] = np.geomspace(hi, 50 * hi, 501)[1:]
    return grids


@criterion(5, "regime certificates", 120.0)
def acc_regimes():
    cases = [((100, 2), ("low", "intermediate", "high")), ((1000, 2), ("low", "intermediate", "high")),
             ((200, 1), ("low", "intermediate", "high")), ((60, 2), ("high",))]
    counts = {s: 0 for s in Status}
    for (n, beta), which in cases:
        p = EnsembleParams(n, beta)
        for grid in _regime_grids(p, which).values():
            for forms in (("main", "full"), ("cap", "simplified")):
                for r in verify_all(p, grid, *forms):
                    counts[r.status] += 1
    detail = ", ".join(f"{s.value}={c}" for s, c in counts.items())
    return counts[Status.FAIL] == 0 and counts[Status.PASS] > 0, detail


@criterion(6, "P-factor certificate", 10.0)
def acc_p_factor():
    worst = math.inf
    for n, beta in [(10, 2), (20, 1)]:
        p = EnsembleParams(n, beta)
        for t in np.geomspace((n - 1) * beta / 2, 1e4, 100):
            worst = min(worst, log_p_factor_bound(p, t) - 2 * float(np.real(log_p_factor(p, t))))
    return worst >= -1e-12, f"min log margin {worst:.3f}"


def _quad_wrapped(alpha, s):
    pdf = lambda x: math.exp(-0.5 * (x / alpha) ** 2) / (alpha * math.sqrt(2 * math.pi))
    reach = math.ceil(12 * alpha) + 2
    return math.fsum(integrate.quad(pdf, a + k, b + k, epsabs=1e-15, epsrel=1e-13)[0]
                     for k in range(-reach, reach + 1) for a, b in s)


@criterion(7, "Poisson summation", 30.0)
def acc_poisson():
    rng = np.random.default_rng(2024)
    worst_quad, worst_cap = 0.0, -math.inf
    ok = True
    for alpha in (0.5, 1.0, 2.0):
        cap = wrapped_gaussian_cap(alpha)
        for _ in range(50):
            k = int(rng.integers(1, 21))
            pts = np.sort(rng.uniform(0, 1, 2 * k))
            s = UnitIntervalSet(pts[0::2], pts[1::2])
            r = gaussian_mod1_prob(WrappedGaussianQuery(alpha, s))
            dq = abs(r.raw - _quad_wrapped(alpha, s))
            dl = abs(r.prob - s.total_length)
            ok &= dq <= cap + 1e-10 and dl <= cap + 1e-10
            worst_quad = max(worst_quad, dq)
            worst_cap = max(worst_cap, dl - cap)
    return ok, f"max |theta - quad| {worst_quad:.1e}, max excess over cap {worst_cap:.1e}"


@criterion(8, "interval combinatorics", 30.0)
def acc_intervals():
    ok = True
    notes = []
    for b, L, m1, m2 in [(2, 2, 3, 5), (10, 1, 2, None), (10, 2, 2, 4)]:
        positions = [m1] if L == 1 else [m1, m2]
        total = []
        worst = -math.inf
        for ks in itertools.product(range(b), repeat=L):
            s = positioned_digit_set(DigitPattern.positioned(b, list(zip(positions, ks))))
            total.append(s.total_length)
            worst = max(worst, abs(s.total_length - b ** -L) - positioned_deviation_bound(b, m1))
        err = abs(math.fsum(total) - 1.0)
        ok &= worst <= 0 and err <= 1e-12
        notes.append(f"b={b} L={L}: sum err {err:.1e}")
    return ok, "; ".join(notes)


@criterion(9, "Benford at desk scale", 120.0)
def acc_benford():
    gap30 = float(np.max(np.abs(first_digit_probs(EnsembleParams(30, 2)) - BENFORD)))
    gap15 = float(np.max(np.abs(first_digit_probs(EnsembleParams(15, 2)) - BENFORD)))
    gap60 = float(np.max(np.abs(first_digit_probs(EnsembleParams(60, 2)) - BENFORD)))
    return gap30 <= 0.01 and gap60 < gap15, f"gap N=15 {gap15:.2e}, N=30 {gap30:.2e}, N=60 {gap60:.2e}"


@criterion(10, "Monte Carlo Benford", 120.0)
def acc_mc_benford():
    p = EnsembleParams(30, 2)
    grid = build_density(p)
    dens = first_digit_probs(p, grid)
    batch = sample_log_abs_d(p, 100_000, seed=20240601, grid=grid)
    freq = np.array([digit_frequencies(batch, DigitPattern.leading(10, k))[0] for k in range(1, 10)])
    worst = float(np.max(np.abs(freq - dens)))
    return worst <= 0.006, f"max |MC - density| {worst:.4f}"


@criterion(11, "uniform higher digits", 120.0)
def acc_higher_digits():
    p = EnsembleParams(30, 2)
    grid = build_density(p)
    d4 = max(abs(digit_prob_exact(p, DigitPattern.positioned(10, [(4, k)]), grid) - 0.1) for k in range(10))
    pair = max(abs(digit_prob_exact(p, DigitPattern.positioned(10, [(3, a), (4, b)]), grid) - 0.01)
               for a in range(10) for b in range(10))
    return d4 <= 0.01 and pair <= 0.02, f"max |P(d4=k) - 0.1| {d4:.2e}, max pair gap {pair:.2e}"


@criterion(12, "TV and Kolmogorov trend", 300.0)
def acc_distances():
    ns = (8, 16, 32, 64, 128)
    tv, ko, sc = [], [], []
    for n in ns:
        p = EnsembleParams(n, 2)
        g = build_density(p)
        tv.append(tv_distance(p, g))
        ko.append(kolmogorov_distance(p, g))
        sc.append(tv[-1] * t_n(p) ** 2.5)
    ok = bool(np.all(np.diff(tv) < 0) and np.all(np.diff(ko) < 0) and max(sc) <= 2 * sc[0])
    return ok, "tv " + " ".join(f"{v:.4f}" for v in tv) + "; scaled max/first " + f"{max(sc) / sc[0]:.3f}"


@criterion(13, "counterexample", 30.0)
def acc_counterexample():
    f0 = digit_frequencies(counterexample_sample(CounterexampleParams(100, 0.0), 100_000, 1),
                           DigitPattern.leading(10, 1))[0]
    f5 = digit_frequencies(counterexample_sample(CounterexampleParams(100, 0.05), 100_000, 2),
                           DigitPattern.leading(10, 1))[0]
    ss = counterexample_sample(CounterexampleParams(100, variant=Variant.SIGN_SUM), 100_000, 3).values
    c2 = float(np.var(ss, ddof=1))
    ok = f0 == 1.0 and f5 >= 0.45 and abs(c2 / 100 - 1) <= 0.05
    return ok, f"eps=0 freq {f0}, eps=0.05 freq {f5:.4f}, SIGN_SUM C2 {c2:.2f}"


@criterion(14, "small-N oracle", 120.0)
def acc_small_n():
    pv = []
    for n in (3, 4):
        p = EnsembleParams(n, 2)
        a = sample_eigenvalues_smallN(p, 10_000, seed=100 + n).log_abs_d
        b = sample_log_abs_d(p, 10_000, seed=200 + n).values
        pv.append(ks_two_sample(a, b))
    return min(pv) > 1e-3, "KS p-values " + ", ".join(f"{v:.3f}" for v in pv)


def warm_kernels():
    """Trigger JIT compilation once so budgets time evaluation only."""
    p = EnsembleParams(3, 2)
    psi_gamma(p, 1.0)
    log_psi_gamma(p, np.array([1.0, 2.0]))
    log_psi_dissected(p, np.array([1.0, 2.0]))
    log_psi_weierstrass(p, np.array([1.0, 2.0]), 10)
    cumulant(p, 2)


def run_criterion(number):
    title, budget, fn = CRITERIA[number]
    t0 = time.perf_counter()
    ok, detail = fn()
    elapsed = time.perf_counter() - t0
    in_time = elapsed < budget
    status = "PASS" if ok and in_time else "FAIL"
    line = f"[{status}] criterion {number:2d} {title}: {detail} ({elapsed:.2f} s / {budget:g} s)"
    return ok, in_time, line


@pytest.fixture(scope="module", autouse=True)
def _warm():
    warm_kernels()


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_acceptance(number, acceptance_log):
    ok, in_time, line = run_criterion(number)
    acceptance_log.append(line)
    print(line)
    assert ok, line
    assert in_time, line


if __name__ == "__main__":
    warm_kernels()
    results = [run_criterion(k) for k in sorted(CRITERIA)]
    for _, _, line in results:
        print(line)
    raise SystemExit(0 if all(a and b for a, b, _ in results) else 1)
