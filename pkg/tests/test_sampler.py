import math

import numpy as np
import pytest
from scipy import stats

from cbedigits.charfn import EnsembleParams, psi_gamma
from cbedigits.cumulants import variance
from cbedigits.digits import DigitPattern, extract_digits
from cbedigits.errors import CapacityError, DomainError
from cbedigits.sampler import (CHUNK, CounterexampleParams, Method, SampleBatch, ValueKind,
                               Variant, counterexample_sample, digit_frequencies,
                               sample_eigenvalues_smallN, sample_log_abs_d, stream_generator)
from helpers import ks_two_sample

P30 = EnsembleParams(30, 2)
FIRST1 = DigitPattern.leading(10, 1)


@pytest.fixture(scope="module")
def batch30():
    return sample_log_abs_d(P30, 100_000, seed=7)


class TestInverseCdf:
    def test_variance(self, batch30):
        assert np.var(batch30.values) == pytest.approx(variance(P30), rel=0.02)

    def test_third_cumulant_negative(self, batch30):
        assert stats.kstat(batch30.values, 3) < 0

    def test_seed_determinism(self):
        a = sample_log_abs_d(P30, 5000, seed=3)
        b = sample_log_abs_d(P30, 5000, seed=3)
        c = sample_log_abs_d(P30, 5000, seed=4)
        assert np.array_equal(a.values, b.values)
        assert not np.array_equal(a.values, c.values)

    def test_prefix_stable_across_chunks(self):
        a = sample_log_abs_d(P30, CHUNK + 100, seed=11)
        b = sample_log_abs_d(P30, CHUNK, seed=11)
        assert np.array_equal(a.values[:CHUNK], b.values)

    def test_first_digit(self, batch30):
        f, se = digit_frequencies(batch30, FIRST1)
        assert abs(f - 0.301) <= 0.0045
        assert se == pytest.approx(math.sqrt(f * (1 - f) / 1e5))

    def test_csv(self):
        text = sample_log_abs_d(P30, 3, seed=1).to_csv()
        lines = text.splitlines()
        assert lines[0] == "# n=30,beta=2.0,seed=1,method=INVERSE_CDF,value_kind=ln"
        assert lines[1] == "value" and len(lines) == 5

    @pytest.mark.parametrize("count,seed", [(0, 1), (1.5, 1), (10, -1), (10, 2 ** 64), (10, True)])
    def test_invalid(self, count, seed):
        with pytest.raises(DomainError):
            sample_log_abs_d(P30, count, seed)


class TestRejection:
    def test_n1(self):
        b = sample_eigenvalues_smallN(EnsembleParams(1, 2), 40_000, seed=5)
        assert b.acceptance_rate == 1.0
        sd = math.sqrt(math.pi ** 2 / 12)
        assert abs(b.log_abs_d.mean()) < 4 * sd / math.sqrt(40_000)
        assert np.var(b.log_abs_d) == pytest.approx(math.pi ** 2 / 12, rel=0.02)

    def test_n2_charfn(self):
        b = sample_eigenvalues_smallN(EnsembleParams(2, 2), 20_000, seed=9)
        emp = np.mean(np.exp(1j * b.log_abs_d))
        assert abs(emp - psi_gamma(EnsembleParams(2, 2), 1.0)) < 3 / math.sqrt(20_000)

    def test_acceptance_matches_morris(self):
        # acceptance = normalization / envelope = Gamma(1+N g)/Gamma(1+g)^N / 2^{beta N(N-1)/2}
        from cbedigits.specfun import morris_product
        b = sample_eigenvalues_smallN(EnsembleParams(3, 2), 5000, seed=2)
        expected = morris_product(3, 0, 0, 1.0).real / 2 ** 6
        se = math.sqrt(expected * (1 - expected) / b.proposals)
        assert abs(b.acceptance_rate - expected) < 5 * se

    def test_batch_view(self):
        b = sample_eigenvalues_smallN(EnsembleParams(2, 1), 10, seed=0)
        sb = b.as_sample_batch()
        assert sb.method is Method.REJECTION and sb.acceptance_rate == b.acceptance_rate
        assert b.theta.shape == (10, 2)

    def test_limits(self):
        with pytest.raises(CapacityError):
            sample_eigenvalues_smallN(EnsembleParams(5, 2), 10, 0)
        with pytest.raises(DomainError):
            sample_eigenvalues_smallN(EnsembleParams(2, 9), 10, 0)

    def test_matches_inverse_cdf(self):
        p = EnsembleParams(3, 2)
        a = sample_eigenvalues_smallN(p, 10_000, seed=1).log_abs_d
        b = sample_log_abs_d(p, 10_000, seed=2).values
        assert ks_two_sample(a, b) > 1e-3


class TestCounterexample:
    def test_eps0_always_one(self):
        b = counterexample_sample(CounterexampleParams(100, 0.0), 100_000, seed=1)
        assert b.value_kind is ValueKind.LOG10
        assert digit_frequencies(b, FIRST1)[0] == 1.0
        # where 10^Y is an exact double the digit extractor agrees
        small = b.values[b.values <= 22][:50]
        for y in small.tolist():
            assert extract_digits(float(10 ** int(y)), 10, 1)[0] == (1,)

    def test_eps0_exact_for_small_n(self):
        b = counterexample_sample(CounterexampleParams(20, 0.0), 2000, seed=4)
        for y in b.values.tolist():
            assert extract_digits(float(10 ** int(y)), 10, 1)[0] == (1,)

    def test_eps_smoothing(self):
        b = counterexample_sample(CounterexampleParams(100, 0.05), 100_000, seed=2)
        assert digit_frequencies(b, FIRST1)[0] >= 0.45

    def test_sign_sum(self):
        b = counterexample_sample(CounterexampleParams(100, variant=Variant.SIGN_SUM), 100_000, seed=3)
        assert b.value_kind is ValueKind.RAW
        assert stats.kstat(b.values, 2) == pytest.approx(100, abs=5)
        for t in (0.3, 1.0):
            emp = np.mean(np.exp(1j * t * b.values))
            assert abs(emp - math.cos(t) ** 100) < 3 / math.sqrt(100_000)

    def test_clt_holds_but_benford_fails(self):
        n = 100
        s = counterexample_sample(CounterexampleParams(n, variant=Variant.SIGN_SUM), 10_000, seed=8).values
        # spread each lattice atom uniformly over its cell before testing normality
        u = stream_generator(8, 10 ** 6).uniform(-1.0, 1.0, s.shape[0])
        z = (s + u) / math.sqrt(n + 1.0 / 3.0)
        assert stats.kstest(z, "norm").pvalue > 1e-3
        b = counterexample_sample(CounterexampleParams(n, 0.0), 10_000, seed=8)
        assert digit_frequencies(b, FIRST1)[0] - math.log10(2) > 0.69

    def test_validation(self):
        with pytest.raises(DomainError):
            CounterexampleParams(0)
        with pytest.raises(DomainError):
            CounterexampleParams(10, -0.1)
        with pytest.raises(ValueError):
            CounterexampleParams(10, 0.0, "OTHER")


class TestFrequencies:
    def test_all_ones(self):
        b = SampleBatch(P30, 0, np.zeros(100), Method.INVERSE_CDF)
        assert digit_frequencies(b, FIRST1) == (1.0, 0.0)

    def test_raw_zero_is_miss(self):
        b = SampleBatch(CounterexampleParams(4), 0, np.array([0.0, 1.0, -1.0, 30.0]),
                        Method.COUNTEREXAMPLE, ValueKind.RAW)
        assert digit_frequencies(b, FIRST1)[0] == 0.5

    def test_base_change(self):
        b = SampleBatch(CounterexampleParams(4), 0, np.array([3.0]), Method.COUNTEREXAMPLE,
                        ValueKind.LOG10)
        # 10^3 = 1111101000 in binary
        assert digit_frequencies(b, DigitPattern.positioned(2, [(2, 1), (3, 1)]))[0] == 1.0

    def test_empty(self):
        b = SampleBatch(P30, 0, np.zeros(0), Method.INVERSE_CDF)
        with pytest.raises(DomainError):
            digit_frequencies(b, FIRST1)
