"""Digit statistics of the characteristic polynomial of circular beta ensembles.

The log-modulus ``log|D_N|`` of ``det(I - U)`` for U drawn from the circular
beta ensemble has an explicit characteristic function. This package
evaluates it in several independent forms, certifies decay bounds on it,
inverts it to a density, and turns that density into digit probabilities
of ``|D_N|`` that approach Benford's law.

Set ``CBEDIGITS_BACKEND=numpy`` before import to bypass the numba kernels.
"""
from ._accel import BACKEND, HAVE_NUMBA
from .charfn import (EnsembleParams, WeierstrassResult, log_psi_dissected, log_psi_gamma,
                     log_psi_weierstrass, p_factor, parse_beta, psi_dissected, psi_gamma,
                     psi_weierstrass, relative_discrepancy, w_function)
from .cumulants import (CumulantVector, cumulant, cumulant_vector, gaussian_approx_error,
                        t_n, variance, variance_bracket)
from .density import (DensityGrid, build_density, digit_prob_exact, kolmogorov_distance,
                      tv_distance)
from .digits import (DigitPattern, PatternKind, UnitIntervalSet, benford_prob,
                     digit_event_set, extract_digits, single_digit_prob)
from .errors import (CapacityError, CbeError, CoverageError, DomainError, PoleError,
                     TailError, TruncationWarning)
from .mod1 import Mod1Result, WrappedGaussianQuery, gaussian_mod1_prob
from .regimes import Regime, RegimeBoundReport, Status, classify, verify_all
from .sampler import (CounterexampleParams, SampleBatch, counterexample_sample,
                      digit_frequencies, sample_eigenvalues_smallN, sample_log_abs_d)
from .specfun import hurwitz_zeta, log_gamma, morris_product, selberg_product

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
