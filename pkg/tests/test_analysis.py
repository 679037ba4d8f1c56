import math

import numpy as np
import pytest
from scipy import integrate, special, stats

from rislink import rng
from rislink.analysis import (
    QuadratureRule,
    Wedge,
    apsk_layer_wedges,
    craig_wedge,
    dcmc_capacity_gh,
    dcmc_capacity_ub,
    gain_moments,
    gamma_fit,
    laguerre_half,
    q_function,
    rician_amplitude_mean,
    scheme_block_size,
    sep_apsk_theory,
    sep_qapsk_theory,
)
from rislink.channel import LinkConfig, draw_channel, phase_grid, quantize_phase_index
from rislink.errors import ConfigError
from rislink.modulation import (
    SchemeConfig,
    partition_blocks,
    received_signal_set,
    statistical_signal_set,
)

TWO_PI = 2 * np.pi


class TestLaguerreHalf:
    def test_at_zero(self):
        assert laguerre_half(0.0) == 1.0

    def test_at_one_against_rician_mean_quadrature(self):
        # Frozen from the independent oracle: E[alpha] for Rician(nu, sigma)
        # with nu^2/(2 sigma^2) = 1, computed by adaptive quadrature of the
        # Rician density, divided by sigma sqrt(pi/2).
        assert laguerre_half(1.0) == pytest.approx(1.4464913440831721, abs=1e-10)

    def test_oracle_quadrature_live(self):
        # Same oracle evaluated in place for a couple of arguments.
        for x in (0.5, 2.0, 10.0):
            nu, sigma = math.sqrt(2 * x), 1.0
            pdf_mean, _ = integrate.quad(
                lambda a: a
                * (a / sigma**2)
                * math.exp(-((a - nu) ** 2) / (2 * sigma**2))
                * special.i0e(a * nu / sigma**2),
                0,
                nu + 40 * sigma,
                limit=400,
            )
            oracle = pdf_mean / (sigma * math.sqrt(math.pi / 2))
            assert laguerre_half(x) == pytest.approx(oracle, rel=1e-9)

    def test_high_snr_asymptote(self):
        # E[alpha] -> nu: L_{1/2}(-x) sqrt(pi)/(2 sqrt(x)) -> 1.
        x = 400.0
        assert laguerre_half(x) * math.sqrt(math.pi) / (2 * math.sqrt(x)) == pytest.approx(
            1.0, abs=2e-3
        )

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            laguerre_half(-0.5)


class TestGainMoments:
    def test_angular_factors_b3(self):
        # Frozen from 1-D quadrature of cos, cos^2 over U(-pi/8, pi/8).
        m1 = gain_moments(1, 3, 0.0)
        e_cos = m1.mean / rician_amplitude_mean(0.0)
        assert e_cos == pytest.approx(0.9744953584044327, abs=1e-12)
        assert m1.second == pytest.approx(0.950158158078553, abs=1e-12)

    def test_reference_value_64_3_0(self):
        m = gain_moments(64, 3, 0.0)
        assert m.mean == pytest.approx(55.271937622191594, rel=1e-9)

    def test_fine_grid_limit(self):
        # B large: quantization vanishes, Rayleigh moments remain.
        m = gain_moments(1, 10, 0.0)
        assert m.mean == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-5)
        assert m.second == pytest.approx(1.0, abs=1e-5)

    def test_mc_agreement_spot(self):
        # One (n, B, kappa') cell of the acceptance grid, small draw count.
        n, B, kp = 16, 3, 1.0
        gen = rng.stream(21, rng.TAG_GENERIC, n, B)
        draws = 20000
        los = np.exp(1j * gen.uniform(0, TWO_PI, (draws, n)))
        nl = (gen.standard_normal((draws, n)) + 1j * gen.standard_normal((draws, n))) / np.sqrt(2)
        g = np.sqrt(kp / (1 + kp)) * los + np.sqrt(1 / (1 + kp)) * nl
        idx = quantize_phase_index(np.conj(g), B)
        x = np.sum(g * np.exp(1j * phase_grid(B)[idx]), axis=1).real
        m = gain_moments(n, B, kp)
        assert np.mean(x) == pytest.approx(m.mean, rel=0.02)
        assert np.mean(x**2) == pytest.approx(m.second, rel=0.02)

    def test_variance_positive(self):
        for n in (1, 8, 64):
            for B in (1, 3):
                m = gain_moments(n, B, 1.0)
                assert m.second > m.mean**2 > 0


class TestGammaFit:
    def test_moment_matching_arithmetic(self):
        from rislink.analysis import GainMoments

        fit = gamma_fit(GainMoments(mean=2.0, second=5.0, n_block=1, B=1, kappa_prime=0))
        assert fit.k == pytest.approx(4.0)
        assert fit.theta == pytest.approx(0.5)

    def test_reproduces_input_moments(self):
        m = gain_moments(64, 3, 0.0)
        fit = gamma_fit(m)
        assert fit.k * fit.theta == pytest.approx(m.mean, rel=1e-12)
        assert fit.k * fit.theta**2 == pytest.approx(m.variance, rel=1e-12)

    def test_ks_distance_small(self):
        n, B, kp = 64, 3, 0.0
        gen = rng.stream(22, rng.TAG_GENERIC, n, B)
        draws = 20000
        los = np.exp(1j * gen.uniform(0, TWO_PI, (draws, n)))
        nl = (gen.standard_normal((draws, n)) + 1j * gen.standard_normal((draws, n))) / np.sqrt(2)
        g = los * 0.0 + nl  # kappa' = 0
        idx = quantize_phase_index(np.conj(g), B)
        x = np.sum(g * np.exp(1j * phase_grid(B)[idx]), axis=1).real
        fit = gamma_fit(gain_moments(n, B, kp))
        ks = stats.kstest(x, stats.gamma(a=fit.k, scale=fit.theta).cdf)
        assert ks.statistic < 0.03


class TestQuadratureRule:
    def test_weights_and_symmetry(self):
        for order in (8, 16, 24):
            rule = QuadratureRule.gauss_hermite(order)
            assert abs(rule.weights.sum() - math.sqrt(math.pi)) < 1e-12
            assert np.allclose(rule.nodes, -rule.nodes[::-1])


class TestCapacity:
    def setup_method(self):
        link = LinkConfig(N=32, K=1, kappa=1.0, B=3)
        scheme = SchemeConfig(kind="APSK", M=16, V=4)
        ch = draw_channel(link, rng.stream(30, rng.TAG_CHANNEL, 0, 0))
        self.const = received_signal_set(ch, scheme, partition_blocks(32, scheme), 3)
        self.scheme = scheme

    def test_zero_snr_limit(self):
        assert dcmc_capacity_gh(self.const, 1e-12) < 1e-6

    def test_high_snr_saturation(self):
        assert dcmc_capacity_gh(self.const, 1e12) == pytest.approx(4.0, abs=1e-3)

    def test_high_snr_m128(self):
        link = LinkConfig(N=64, K=1, kappa=1.0, B=3)
        scheme = SchemeConfig(kind="QAPSK", M=128, V=8)
        ch = draw_channel(link, rng.stream(31, rng.TAG_CHANNEL, 0, 0))
        const = received_signal_set(ch, scheme, partition_blocks(64, scheme), 3)
        assert dcmc_capacity_gh(const, 1e12) == pytest.approx(7.0, abs=1e-3)

    def test_bpsk_against_independent_mc(self):
        # Oracle: direct Monte Carlo of the mutual-information expectation
        # with 10^6 noise draws, written without the quadrature path.
        points = np.array([1.0 + 0j, -1.0 + 0j])
        rho = 1.0
        gen = np.random.default_rng(77)
        draws = 1_000_000
        total = 0.0
        for m1 in range(2):
            n = (gen.standard_normal(draws) + 1j * gen.standard_normal(draws)) / np.sqrt(2)
            d = np.sqrt(rho) * (points[m1] - points)  # (2,)
            expo = -np.abs(d[None, :] + n[:, None]) ** 2 + (np.abs(n) ** 2)[:, None]
            total += np.mean(np.log2(np.sum(np.exp(expo), axis=1)))
        mc = 1.0 - total / 2
        gh = dcmc_capacity_gh(points, rho)
        assert abs(gh - mc) < 0.01

    def test_monotone_in_snr(self):
        vals = [dcmc_capacity_gh(self.const, 10 ** (s / 10)) for s in range(-40, 0, 4)]
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))

    def test_gh_order_convergence(self):
        r16 = dcmc_capacity_gh(self.const, 0.01, QuadratureRule.gauss_hermite(16))
        r24 = dcmc_capacity_gh(self.const, 0.01, QuadratureRule.gauss_hermite(24))
        assert abs(r16 - r24) < 1e-3

    def test_ub_saturates(self):
        mean = gain_moments(8, 3, 1.0).mean
        assert dcmc_capacity_ub(self.scheme, mean, 1e12) == pytest.approx(4.0, abs=1e-3)

    def test_ub_distinct_radii(self):
        scheme = SchemeConfig(kind="APSK", M=128, V=8)
        const = statistical_signal_set(scheme, gain_moments(8, 3, 1.0).mean)
        radii = np.unique(np.round(np.abs(const.points), 9))
        assert len(radii) == scheme.layers

    def test_ub_rejects_psk(self):
        with pytest.raises(ConfigError):
            dcmc_capacity_ub(SchemeConfig(kind="PSK", M=16), 1.0, 1.0)


class TestCraigWedge:
    def test_zero_snr_is_angle_fraction(self):
        assert craig_wedge(1.0, np.pi / 2, np.pi / 2, 0.0) == pytest.approx(0.25, abs=1e-12)

    def test_infinite_snr_vanishes(self):
        assert craig_wedge(1.0, np.pi / 2, np.pi / 2, 1e12) < 1e-12

    def test_against_fine_grid_simpson(self):
        # Oracle: composite Simpson on 10^6+1 points via scipy.
        b, psi, theta_max, rho = 1.0, np.pi / 2, np.pi / 2, 2.0
        theta = np.linspace(0.0, theta_max, 1_000_001)
        f = np.exp(-rho * b**2 * np.sin(psi) ** 2 / np.sin(theta + psi) ** 2)
        oracle = integrate.simpson(f, x=theta) / (2 * np.pi)
        assert craig_wedge(b, theta_max, psi, rho) == pytest.approx(oracle, abs=1e-10)

    def test_bounds(self):
        gen = np.random.default_rng(9)
        for _ in range(20):
            b = gen.uniform(0.1, 5)
            theta_max = gen.uniform(0.1, 2 * np.pi - 0.1)
            psi = gen.uniform(0.05, np.pi - 0.05)
            rho = gen.uniform(0, 10)
            val = craig_wedge(b, theta_max, psi, rho)
            assert 0.0 <= val <= theta_max / (2 * np.pi) + 1e-15

    def test_invalid_geometry_rejected(self):
        with pytest.raises(ConfigError):
            craig_wedge(-1.0, np.pi / 2, np.pi / 2, 1.0)
        with pytest.raises(ConfigError):
            craig_wedge(1.0, 7.0, np.pi / 2, 1.0)
        with pytest.raises(ConfigError):
            craig_wedge(1.0, np.pi / 2, np.pi, 1.0)


class TestApskSep:
    def test_equal_gain_layer1_geometry(self):
        # With equal gains the first layer has b1 = c and the inner angle
        # 2 arctan(3 tan(pi/V)): the (1 + 2 X1/X2) factor is 3.
        c, V = 2.5, 8
        wedges = apsk_layer_wedges(np.full(4, c), 1, V)
        a = math.atan(3 * math.tan(math.pi / V))
        assert wedges[1].b == pytest.approx(c)
        assert wedges[1].theta_max == pytest.approx(2 * a)
        assert wedges[1].psi == pytest.approx(math.pi / V)
        assert wedges[0].theta_max == pytest.approx(math.pi - a)
        assert wedges[0].psi == pytest.approx(a - math.pi / V)

    def test_layer1_total_angle_closes(self):
        # Triangle region: wedge openings add to a full turn.
        wedges = apsk_layer_wedges(np.array([1.0, 1.2, 0.9, 1.1]), 1, 8)
        assert sum(w.theta_max for w in wedges) == pytest.approx(2 * math.pi)

    def test_zero_snr_layer1_is_one(self):
        x = np.array([1.0, 1.3, 0.8, 1.1])
        from rislink.analysis import apsk_layer_error

        assert apsk_layer_error(x, 1, 8, 0.0) == pytest.approx(1.0, abs=1e-10)

    def test_vanishes_at_high_snr(self):
        x = np.full(4, 2.0)
        assert sep_apsk_theory(x, 1e9, 32, 8) < 1e-12

    def test_invalid_geometry_names_layer(self):
        with pytest.raises(ConfigError, match="layer"):
            sep_apsk_theory(np.full(4, 1.0), 1.0, 32, 2)  # V=2: tan(pi/2)

    def test_positive_gains_required(self):
        with pytest.raises(ConfigError):
            sep_apsk_theory(np.array([1.0, -1.0, 1.0, 1.0]), 1.0, 32, 8)

    def test_matches_simulation_midrange(self):
        # Cross-check one SNR point against a quick end-to-end simulation.
        from rislink.montecarlo import SweepSpec, simulate_sep, theory_sep_sweep

        link = LinkConfig(N=64, K=1, kappa=1.0, B=3)
        scheme = SchemeConfig(kind="APSK", M=16, V=4)
        spec = SweepSpec(
            link=link,
            scheme=scheme,
            snr_grid_db=(-18.0,),
            trials_per_point=40000,
            channels_per_point=5,
            master_seed=12,
        )
        snr, sep, _ = simulate_sep(spec, workers=1).series("sep_sim")
        _, th, _ = theory_sep_sweep(spec, theory_channels=40).series("sep_theory")
        assert 1 / 1.5 < th[0] / sep[0] < 1.5


class TestQapskSep:
    def test_q_function_at_zero(self):
        assert q_function(0.0) == 0.5

    def test_zero_snr_value(self):
        # (2/2)(0.5 + 0.5) + (4/4)(0.5) = 1.5 for M/V = 4, V = 4.
        assert sep_qapsk_theory([1.0, 1.0], [1.0, 1.0], 0.0, 16, 4) == pytest.approx(1.5)

    def test_v8_weighting(self):
        # q = 2 for V >= 8: (2/2)(0.5+0.5) + (2/4)(0.5) = 1.25 at rho'=0.
        assert sep_qapsk_theory([1.0, 1.0], [1.0, 1.0], 0.0, 32, 8) == pytest.approx(1.25)

    def test_vanishes_at_high_snr(self):
        assert sep_qapsk_theory([2.0, 2.0], [2.0, 2.0], 1e9, 16, 4) < 1e-12

    def test_v_below_4_rejected(self):
        with pytest.raises(ConfigError):
            sep_qapsk_theory([1.0], [1.0], 1.0, 4, 2)

    def test_matches_simulation_midrange(self):
        from rislink.montecarlo import SweepSpec, simulate_sep, theory_sep_sweep

        link = LinkConfig(N=64, K=1, kappa=1.0, B=3)
        scheme = SchemeConfig(kind="QAPSK", M=16, V=4)
        spec = SweepSpec(
            link=link,
            scheme=scheme,
            snr_grid_db=(-19.0,),
            trials_per_point=40000,
            channels_per_point=5,
            master_seed=13,
        )
        snr, sep, _ = simulate_sep(spec, workers=1).series("sep_sim")
        _, th, _ = theory_sep_sweep(spec, theory_channels=40).series("sep_theory")
        assert 1 / 1.5 < th[0] / sep[0] < 1.5


def test_scheme_block_size():
    assert scheme_block_size(SchemeConfig(kind="APSK", M=128, V=8), 128) == 8
    assert scheme_block_size(SchemeConfig(kind="QAPSK", M=128, V=8), 128) == 16
    assert scheme_block_size(SchemeConfig(kind="PSK", M=128), 128) == 128
