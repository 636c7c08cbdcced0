import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from blockcorr import analytics as A
from blockcorr.blockage import beta_moment, spatial_cross_moment
from blockcorr.errors import UndefinedCorrelation, UnsupportedConfiguration, ValidationError
from blockcorr.mobility import DisplacementLaw, displacement_law, steady_state_pmf
from blockcorr.network import MeasurementPoint, NetworkConfig

BASE = NetworkConfig()
SMALL = NetworkConfig(N=12, K=20, M=3, N_o=4, gamma=0.4)


def g(d, cfg):
    return 1.0 / (cfg.epsilon + abs(d) ** cfg.a)


def brute_moments(cfg, y):
    """First two moments by explicit loops over lattice points."""
    f = steady_state_pmf(cfg.mobility)
    bs = cfg.blockage
    first = sum(beta_moment(1, abs(n - y), bs) * g(n - y, cfg) * f[n - 1] for n in range(1, cfg.N + 1))
    square = sum(beta_moment(2, abs(n - y), bs) * g(n - y, cfg) ** 2 * f[n - 1]
                 for n in range(1, cfg.N + 1))
    sigma = 0.0
    for n in range(1, cfg.N + 1):
        for m in range(1, cfg.N + 1):
            c = spatial_cross_moment(abs(n - y), abs(m - y), (n > y) == (m > y), bs)
            sigma += f[n - 1] * f[m - 1] * g(n - y, cfg) * g(m - y, cfg) * c
    K, xi = cfg.K, cfg.xi
    return K * xi * first, 2 * K * xi * square + K**2 * xi**2 * sigma


class TestMoments:
    @pytest.mark.parametrize("y", [1.5, 4.25, 6.5, 11.9])
    def test_against_loops(self, y):
        m1, m2 = brute_moments(SMALL, y)
        assert A.mean_interference(SMALL, y) == pytest.approx(m1, rel=1e-12)
        assert A.second_moment_interference(SMALL, y) == pytest.approx(m2, rel=1e-12)

    def test_no_blockage_variance(self):
        # Poisson users with unit-mean exponential fading: Var I = 2 K xi sum g^2 f
        cfg = BASE.replace(N_o=0, xi=0.5)
        f = steady_state_pmf(cfg.mobility)
        n = np.arange(1, 51)
        gg = 1 / (0.5 + (n - 10.5) ** 2)
        var = A.std_interference(cfg, 10.5) ** 2
        assert var == pytest.approx(2 * cfg.K * cfg.xi * np.sum(gg**2 * f), rel=1e-12)

    def test_accepts_measurement_point(self):
        assert A.mean_interference(BASE, MeasurementPoint(3, 0.5)) == A.mean_interference(BASE, 3.5)

    @pytest.mark.parametrize("y", [1.0, 50.0, 0.5, 7.0])
    def test_probe_validation(self, y):
        with pytest.raises(ValidationError):
            A.mean_interference(BASE, y)

    def test_blockage_lowers_mean(self):
        assert A.mean_interference(BASE, 10.5) < A.mean_interference(BASE.replace(N_o=0), 10.5)

    def test_spatial_flag(self):
        cfg = BASE
        first = A.mean_interference(cfg, 5.5) / (cfg.K * cfg.xi)
        assert A.sigma_spatial(cfg, 5.5) > first**2
        no_sp = A.second_moment_interference(cfg, 5.5, spatial=False)
        assert no_sp < A.second_moment_interference(cfg, 5.5)


class TestTemporalTerm:
    def test_against_loops(self):
        cfg, y = SMALL, 5.5
        law = displacement_law(cfg.mobility, 2)
        f = steady_state_pmf(cfg.mobility)
        want = 0.0
        for n in range(1, cfg.N + 1):
            for m in range(1, cfg.N + 1):
                c = spatial_cross_moment(abs(n - y), abs(m - y), (n > y) == (m > y), cfg.blockage)
                want += g(n - y, cfg) * f[n - 1] * law.kernel[n - 1, m - 1] * c * g(m - y, cfg)
        assert A.sigma_l_generic(cfg, y, law) == pytest.approx(want, rel=1e-12)

    @pytest.mark.parametrize("cfg", [BASE, BASE.replace(N_o=40), BASE.replace(M=0, gamma=0.0),
                                     BASE.replace(N_o=0), SMALL.replace(u=1, M=0)])
    def test_case_decomposition_matches(self, cfg):
        law = displacement_law(cfg.mobility, 1)
        for n in range(1, cfg.N):
            for c in (0.5, 0.1, 0.9):
                y = n + c
                a = A.sigma_1_cases(cfg, y, law)
                b = A.sigma_l_generic(cfg, y, law)
                assert abs(a - b) <= 1e-12 * max(1.0, abs(b))

    def test_case_decomposition_rejects_fast_users(self):
        cfg = BASE.replace(u=2)
        with pytest.raises(UnsupportedConfiguration):
            A.sigma_1_cases(cfg, 5.5, displacement_law(cfg.mobility, 1))
        with pytest.raises(UnsupportedConfiguration):
            A.sigma_1_cases(BASE, 5.5, displacement_law(BASE.mobility, 2))

    def test_static_equals_spatial_second_moment(self):
        cfg = BASE.replace(M=math.inf)
        law = DisplacementLaw.identity(cfg.mobility, 1)
        f = steady_state_pmf(cfg.mobility)
        n = np.arange(1, 51)
        d = np.abs(n - 8.5)
        want = np.sum(f * g(d, cfg) ** 2 * beta_moment(2, d, cfg.blockage))
        assert A.sigma_l_generic(cfg, 8.5, law) == pytest.approx(want, rel=1e-12)


class TestCorrelation:
    @pytest.mark.parametrize("K", [2, 7, 50, 400])
    @pytest.mark.parametrize("l", [1, 2])
    def test_rational_form(self, K, l):
        cfg = BASE.replace(K=K)
        co = A.rho_coefficients(cfg, 6.5, l)
        direct = A.pearson_rho(cfg, 6.5, l)
        assert co.rho(K) == pytest.approx(direct, abs=1e-12)

    def test_single_interferer(self):
        cfg = BASE.replace(K=1)
        co = A.rho_coefficients(cfg, 6.5, 1)
        assert A.pearson_rho(cfg, 6.5, 1) == pytest.approx(co.c1 / co.c3, rel=1e-13)
        assert co.rho(1) == co.c1 / co.c3

    def test_no_blockage_oracle(self):
        # without obstacles rho_l = xi sum g f P g / (2 sum g^2 f), for any K
        cfg = BASE.replace(N_o=0, xi=0.5, K=80)
        law = displacement_law(cfg.mobility, 1)
        f = steady_state_pmf(cfg.mobility)
        n = np.arange(1, 51)
        gg = g(n - 12.5, cfg)
        want = 0.5 * (gg * f) @ law.kernel @ gg / (2 * np.sum(gg**2 * f))
        assert A.pearson_rho(cfg, 12.5, 1) == pytest.approx(want, rel=1e-12)
        assert A.rho_without_blockage(BASE.replace(xi=0.5), 12.5, 1) == pytest.approx(want, rel=1e-12)

    @pytest.mark.parametrize("xi", [0.25, 0.5, 1.0])
    def test_static_no_blockage_is_half_xi(self, xi):
        cfg = BASE.replace(N_o=0, xi=xi, M=math.inf)
        for y in (1.5, 10.5, 25.5):
            assert A.pearson_rho(cfg, y, 1) == pytest.approx(xi / 2, abs=1e-14)

    def test_rho_bounds_and_lag_decay(self):
        for y in (2.5, 12.5, 25.5):
            r1, r2 = A.pearson_rho(BASE, y, 1), A.pearson_rho(BASE, y, 2)
            assert 0 < r2 < r1 < 1

    def test_no_spatial_is_K_free(self):
        vals = [A.pearson_rho(BASE.replace(K=K), 9.5, 1, spatial=False) for K in (2, 30, 300)]
        assert max(vals) - min(vals) < 1e-12

    @pytest.mark.parametrize("kw", [dict(K=0), dict(xi=0.0)])
    def test_undefined(self, kw):
        with pytest.raises(UndefinedCorrelation):
            A.pearson_rho(BASE.replace(**kw), 5.5, 1)

    @settings(max_examples=25, deadline=None)
    @given(N_o=st.sampled_from([5.0, 10.0, 40.0]), gamma=st.sampled_from([0.0, 0.5, 1.0]),
           base=st.integers(1, 24), K=st.integers(2, 499))
    def test_increasing_in_K(self, N_o, gamma, base, K):
        cfg = BASE.replace(N_o=N_o, gamma=gamma)
        co = A.rho_coefficients(cfg, base + 0.5, 1)
        assert co.c2 > 0
        assert co.rho(K + 1) > co.rho(K)


class TestCrossover:
    @pytest.mark.parametrize("N_o", [10, 40])
    @pytest.mark.parametrize("y", [1.5, 12.5, 25.5])
    def test_rho_equals_reference_at_K_star(self, N_o, y):
        cfg = BASE.replace(N_o=N_o)
        k = A.critical_user_count(cfg, y, 1)
        assert k is not None and k > 1
        co = A.rho_coefficients(cfg, y, 1)
        ref = A.rho_without_blockage(cfg, y, 1)
        assert co.rho(k) == pytest.approx(ref, rel=1e-10)
        assert co.rho(1) < ref < co.rho(2 * k)

    def test_no_obstacles_no_crossover(self):
        assert A.critical_user_count(BASE.replace(N_o=0), 5.5, 1) is None
