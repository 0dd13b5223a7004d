import math
import struct

import numpy as np
import pytest
from scipy import integrate

from cbedigits.charfn import EnsembleParams, psi_gamma
from cbedigits.cumulants import chebyshev_tail_bound, cumulant, variance
from cbedigits.density import (DensityGrid, build_density, certified_tail, digit_prob_exact,
                               gaussian_reference, kolmogorov_distance, tv_distance)
from cbedigits.digits import DigitPattern
from cbedigits.errors import DomainError, TailError


@pytest.fixture(scope="module")
def grid10():
    return build_density(EnsembleParams(10, 2))


@pytest.fixture(scope="module")
def grid30():
    return build_density(EnsembleParams(30, 2))


class TestGrid:
    def test_moments(self, grid10):
        p = EnsembleParams(10, 2)
        assert abs(grid10.moment(1)) < 1e-6
        assert grid10.moment(2) == pytest.approx(variance(p), rel=1e-5)
        assert grid10.moment(3) == pytest.approx(cumulant(p, 3), rel=1e-4)

    def test_mass(self):
        g = build_density(EnsembleParams(5, 1))
        assert g.mass() == pytest.approx(1.0, abs=1e-6)
        assert g.cdf[-1] == pytest.approx(1.0, abs=1e-6)
        assert np.all(np.diff(g.cdf) >= 0) and np.all(g.rho >= 0)

    def test_meta(self, grid10):
        m = grid10.meta
        assert m["x_hi"] <= 10 * math.log(2) + 1e-12
        assert m["tail_cdf_bound"] <= 1e-10 and m["tail_mass"] <= 1e-12
        assert abs(m["min_prefloor"]) < 1e-8
        with pytest.raises(TypeError):
            m["step"] = 1.0

    def test_read_only(self, grid10):
        with pytest.raises(ValueError):
            grid10.rho[0] = 1.0

    def test_against_quadrature(self, grid10):
        # rho(x) = (1/pi) int_0^inf Re(psi(t) e^{-itx}) dt by Fourier-weighted quadrature
        p = EnsembleParams(10, 2)
        re = lambda t: psi_gamma(p, t).real
        im = lambda t: psi_gamma(p, t).imag
        for x in (-2.0, -0.5, 0.0, 0.7, 2.0):
            c = integrate.quad(re, 0, 60, weight="cos", wvar=x, limit=400)[0]
            s = integrate.quad(im, 0, 60, weight="sin", wvar=x, limit=400)[0]
            ref = (c + s) / math.pi
            assert np.interp(x, grid10.x, grid10.rho) == pytest.approx(ref, abs=1e-7)

    def test_inversion_round_trip(self, grid10):
        p = EnsembleParams(10, 2)
        for t in np.linspace(-10, 10, 21):
            back = np.trapezoid(grid10.rho * np.exp(1j * t * grid10.x), dx=grid10.step)
            assert abs(back - psi_gamma(p, t)) < 1e-6

    @pytest.mark.parametrize("m", [6, 8])
    def test_chebyshev_tail(self, grid10, m):
        p = EnsembleParams(10, 2)
        s = grid10.meta["sigma"]
        out = grid10.x[np.abs(grid10.x) >= m * s]
        mass = np.trapezoid(grid10.rho[np.abs(grid10.x) >= m * s], dx=grid10.step) if out.size > 1 else 0.0
        assert mass <= chebyshev_tail_bound(p, m * s)

    def test_small_n_rejected(self):
        for n in (1, 2):
            with pytest.raises(DomainError):
                build_density(EnsembleParams(n, 2))

    @pytest.mark.parametrize("kw", [{"span_sigmas": 5}, {"points": 1000}, {"points": 1 << 13},
                                    {"max_points": 1 << 14, "points": 1 << 15}])
    def test_bad_params(self, kw):
        with pytest.raises(DomainError):
            build_density(EnsembleParams(10, 2), **kw)

    def test_tail_error(self):
        with pytest.raises(TailError):
            build_density(EnsembleParams(3, 2), max_points=1 << 14)

    def test_certified_tail_decreasing(self):
        p = EnsembleParams(10, 2)
        c1, d1 = certified_tail(p, 50.0)
        c2, d2 = certified_tail(p, 100.0)
        assert c2 < c1 and d2 < d1


class TestSerialization:
    def test_csv(self, grid10):
        text = grid10.to_csv()
        lines = text.splitlines()
        assert lines[0] == "x,rho,cdf" and len(lines) == grid10.x.shape[0] + 1
        x0, r0, c0 = (float(v) for v in lines[1].split(","))
        assert x0 == grid10.x[0] and r0 == grid10.rho[0] and c0 == grid10.cdf[0]

    def test_binary(self, grid10):
        blob = grid10.to_bytes()
        n, beta, step, count = struct.unpack_from("<qddq", blob)
        assert (n, beta, count) == (10, 2.0, grid10.x.shape[0])
        assert len(blob) == 32 + 24 * count
        back = DensityGrid.from_bytes(blob)
        assert back.params == EnsembleParams(10, 2)
        for a in ("x", "rho", "cdf"):
            assert np.array_equal(getattr(back, a), getattr(grid10, a))


class TestDigits:
    def test_first_digit(self, grid30):
        p = EnsembleParams(30, 2)
        probs = [digit_prob_exact(p, DigitPattern.leading(10, k), grid30) for k in range(1, 10)]
        assert abs(probs[0] - math.log10(2)) < 0.01
        assert math.fsum(probs) == pytest.approx(1.0, abs=1e-8)
        assert np.all(np.diff(probs) < 0)

    def test_fourth_digit(self, grid30):
        p = EnsembleParams(30, 2)
        for k in range(10):
            assert abs(digit_prob_exact(p, DigitPattern.positioned(10, [(4, k)]), grid30) - 0.1) < 0.01

    def test_gap_shrinks(self):
        gaps = []
        for n in (15, 30, 60):
            p = EnsembleParams(n, 2)
            gaps.append(max(abs(digit_prob_exact(p, DigitPattern.leading(10, k)) - math.log10(1 + 1 / k))
                            for k in range(1, 10)))
        assert gaps[0] > gaps[1] > gaps[2]


class TestDistances:
    def test_tv_trend(self):
        tv = [tv_distance(EnsembleParams(n, 2)) for n in (16, 64)]
        assert 0 <= tv[1] < tv[0] <= 1

    def test_kolmogorov(self):
        p = EnsembleParams(32, 2)
        g = build_density(p)
        k = kolmogorov_distance(p, g)
        assert 0 < k <= tv_distance(p, g) + 1e-6
        ks = [kolmogorov_distance(EnsembleParams(n, 2)) for n in (8, 16, 32, 64)]
        assert np.all(np.diff(ks) < 0)


class TestReference:
    def test_values(self):
        g = gaussian_reference(np.linspace(-1.96, 1.96, 3))
        assert g.rho[1] == pytest.approx(0.3989423, abs=5e-8)
        assert g.cdf[1] == 0.5
        assert g.cdf[2] == pytest.approx(0.9750021, abs=5e-8)

    def test_invalid(self):
        with pytest.raises(DomainError):
            gaussian_reference([0.0])
        with pytest.raises(DomainError):
            gaussian_reference([0.0, 1.0, 3.0])
