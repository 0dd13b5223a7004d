"""Shared numerical oracles for the test suite."""
import numpy as np


def central_difference(f, k: int, h: float) -> complex:
    """Central-difference k-th derivative of ``f`` at 0, k in {2, 3, 4}."""
    if k == 2:
        return (f(h) - 2 * f(0.0) + f(-h)) / h ** 2
    if k == 3:
        return (f(2 * h) - 2 * f(h) + 2 * f(-h) - f(-2 * h)) / (2 * h ** 3)
    if k == 4:
        return (f(2 * h) - 4 * f(h) + 6 * f(0.0) - 4 * f(-h) + f(-2 * h)) / h ** 4
    raise ValueError(k)


def richardson_derivative(f, k: int, h: float) -> complex:
    """Two Richardson levels on step halving; error O(h^6)."""
    d = [central_difference(f, k, h / 2 ** i) for i in range(3)]
    r1 = [(4 * d[i + 1] - d[i]) / 3 for i in range(2)]
    return (16 * r1[1] - r1[0]) / 15


def fd_cumulant(log_psi, k: int, h: float = 1e-3) -> float:
    """C_k from derivatives of ``log psi``: ``d^k log psi(0) = i^k C_k``."""
    f = lambda t: complex(log_psi(t))
    return (richardson_derivative(f, k, h) / 1j ** k).real


def ks_two_sample(a, b) -> float:
    from scipy import stats
    return float(stats.ks_2samp(np.asarray(a), np.asarray(b)).pvalue)
