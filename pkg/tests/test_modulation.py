import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rislink import rng
from rislink.channel import ChannelRealization, LinkConfig, draw_channel, phase_grid
from rislink.errors import ConfigError
from rislink.modulation import (
    BRANCH_I,
    BRANCH_Q,
    SchemeConfig,
    all_labels,
    apsk_pattern,
    index_to_label,
    label_to_index,
    partition_blocks,
    psk_pattern,
    qapsk_pattern,
    received_signal_set,
    statistical_signal_set,
    validate_scheme,
)

TWO_PI = 2 * np.pi


def make_channel(n, seed=0, kappa=1.0, K=1):
    cfg = LinkConfig(N=n, K=K, kappa=kappa, B=3)
    return draw_channel(cfg, rng.stream(seed, rng.TAG_CHANNEL, 0, 0))


class TestSchemeConfig:
    def test_psk_takes_no_v(self):
        SchemeConfig(kind="PSK", M=128)
        with pytest.raises(ConfigError):
            SchemeConfig(kind="PSK", M=128, V=8)

    def test_m_power_of_two(self):
        with pytest.raises(ConfigError):
            SchemeConfig(kind="PSK", M=100)

    def test_qapsk_needs_square_layer_count(self):
        SchemeConfig(kind="QAPSK", M=128, V=8)  # M/V = 16 = 4^2
        with pytest.raises(ConfigError, match="perfect square"):
            SchemeConfig(kind="QAPSK", M=32, V=4)  # M/V = 8

    def test_v_divides_grid(self):
        with pytest.raises(ConfigError, match="V must divide 2\\^B"):
            validate_scheme(SchemeConfig(kind="APSK", M=32, V=8), N=32, B=2)

    def test_qapsk_needs_two_bits(self):
        with pytest.raises(ConfigError, match="B >= 2"):
            validate_scheme(SchemeConfig(kind="QAPSK", M=8, V=2), N=8, B=1)


class TestPartition:
    def test_apsk_16_blocks_of_8(self):
        part = partition_blocks(128, SchemeConfig(kind="APSK", M=128, V=8))
        assert part.n_blocks == 16
        assert all(stop - start == 8 for start, stop in part.blocks)
        flat = np.concatenate([part.indices(b) for b in range(16)])
        assert np.array_equal(flat, np.arange(128))

    def test_qapsk_4_plus_4_blocks_of_16(self):
        part = partition_blocks(128, SchemeConfig(kind="QAPSK", M=128, V=8))
        assert part.n_blocks == 8
        assert all(stop - start == 16 for start, stop in part.blocks)
        assert part.branch == (BRANCH_I,) * 4 + (BRANCH_Q,) * 4
        # I-branch covers exactly the first half.
        assert part.blocks[3][1] == 64 and part.blocks[4][0] == 64

    def test_divisibility_violation_named(self):
        with pytest.raises(ConfigError, match="M/V must divide N"):
            partition_blocks(100, SchemeConfig(kind="APSK", M=128, V=8))

    def test_psk_single_block(self):
        part = partition_blocks(64, SchemeConfig(kind="PSK", M=16))
        assert part.blocks == ((0, 64),)


class TestPskPattern:
    def test_zero_symbol_real_positive_channel(self):
        g = np.abs(np.random.default_rng(0).standard_normal(16)) + 0.0
        ch = ChannelRealization(g=g.astype(complex), los=g, nlos=np.zeros(16))
        pat = psk_pattern(ch, 0, 16, 3)
        assert np.all(pat.amplitude == 1)
        assert np.all(pat.phase_index == 0)

    def test_low_order_rotation_exact(self):
        # M <= 2^B: every received point is the base point rotated by 2pi m/M.
        ch = make_channel(64, seed=3)
        M, B = 8, 3
        z0 = psk_pattern(ch, 0, M, B).received_point(ch.g)
        for m in range(M):
            zm = psk_pattern(ch, m, M, B).received_point(ch.g)
            assert abs(zm - np.exp(1j * TWO_PI * m / M) * z0) <= 1e-12 * abs(z0)

    def test_high_order_envelope_varies(self):
        # M > 2^B: quantization breaks the constant envelope.
        ch = make_channel(64, seed=4)
        env = [abs(psk_pattern(ch, m, 128, 3).received_point(ch.g)) for m in range(128)]
        env = np.array(env)
        assert env.std() / env.mean() > 1e-3

    def test_symbol_range_checked(self):
        ch = make_channel(8)
        with pytest.raises(ConfigError):
            psk_pattern(ch, 16, 16, 3)


class TestApskPattern:
    scheme = SchemeConfig(kind="APSK", M=32, V=8)

    def test_full_on_layer(self):
        ch = make_channel(32, seed=5)
        part = partition_blocks(32, self.scheme)
        pat = apsk_pattern(ch, part, self.scheme.layers, 0, self.scheme, B=3)
        assert np.all(pat.amplitude == 1)
        base = psk_pattern(ch, 0, self.scheme.V, 3)  # v=0 compensation
        assert np.array_equal(pat.phase_index, base.phase_index)

    def test_off_blocks(self):
        ch = make_channel(32, seed=6)
        part = partition_blocks(32, self.scheme)
        pat = apsk_pattern(ch, part, 1, 0, self.scheme, B=3)
        assert np.all(pat.amplitude[:8] == 1)
        assert np.all(pat.amplitude[8:] == 0)

    def test_rotation_is_exact_grid_shift(self):
        # V | 2^B makes the v-rotation commute with quantization.
        ch = make_channel(32, seed=7)
        part = partition_blocks(32, self.scheme)
        B = 3
        step = (1 << B) // self.scheme.V
        p0 = apsk_pattern(ch, part, 4, 0, self.scheme, B)
        for v in range(self.scheme.V):
            pv = apsk_pattern(ch, part, 4, v, self.scheme, B)
            on = p0.amplitude.astype(bool)
            assert np.array_equal(
                pv.phase_index[on], (p0.phase_index[on] + v * step) % (1 << B)
            )

    def test_single_grid_step_small_config(self):
        scheme = SchemeConfig(kind="APSK", M=16, V=4)
        ch = make_channel(16, seed=8)
        part = partition_blocks(16, scheme)
        p0 = apsk_pattern(ch, part, 1, 0, scheme, B=2)
        p1 = apsk_pattern(ch, part, 1, 1, scheme, B=2)
        on = p0.amplitude.astype(bool)
        assert np.all(~p1.amplitude[~on].astype(bool))
        assert np.array_equal(p1.phase_index[on], (p0.phase_index[on] + 1) % 4)


class TestQapskPattern:
    scheme = SchemeConfig(kind="QAPSK", M=64, V=4)

    def test_quadrature_branch_rotated_by_2pi_over_v(self):
        ch = make_channel(64, seed=9)
        part = partition_blocks(64, self.scheme)
        B = 3
        pat = qapsk_pattern(ch, part, 1, 1, 0, self.scheme, B)
        half = 32
        stop_q = part.blocks[self.scheme.branch_layers][1] - half
        g_q = ch.g[half : half + stop_q]
        # Q contribution = e^{j 2pi/V} (g_q . compensated phases of g_q)
        from rislink.channel import quantize_phase_index

        idx = quantize_phase_index(np.conj(g_q), B)
        base = np.sum(g_q * np.exp(1j * phase_grid(B)[idx]))
        on_q = pat.amplitude.astype(bool).copy()
        on_q[:half] = False
        contrib_q = np.sum(ch.g[on_q] * np.exp(1j * pat.phase[on_q]))
        expected = np.exp(1j * TWO_PI / self.scheme.V) * base
        assert abs(contrib_q - expected) <= 1e-12 * abs(expected)

    def test_branches_orthogonal_for_v4(self):
        ch = make_channel(64, seed=10)
        part = partition_blocks(64, self.scheme)
        const = received_signal_set(ch, self.scheme, part, 3)
        x_i, x_q = const.block_gains
        # Both branch gains are phase-compensated, so the raw Q contribution
        # e^{j pi/2} x_q is a quarter turn from the I contribution.
        assert np.all(np.abs(np.angle(x_i)) < np.pi / 8)
        assert np.all(np.abs(np.angle(x_q)) < np.pi / 8)

    def test_label_count(self):
        assert len(set(all_labels(self.scheme))) == self.scheme.M


class TestReceivedSignalSet:
    @pytest.mark.parametrize(
        "scheme,n",
        [
            (SchemeConfig(kind="PSK", M=16), 32),
            (SchemeConfig(kind="APSK", M=32, V=8), 32),
            (SchemeConfig(kind="QAPSK", M=64, V=4), 64),
        ],
    )
    def test_matches_pattern_construction(self, scheme, n):
        ch = make_channel(n, seed=11)
        part = partition_blocks(n, scheme)
        const = received_signal_set(ch, scheme, part, 3)
        for i in range(0, scheme.M, max(1, scheme.M // 7)):
            label = const.labels[i]
            if scheme.kind == "PSK":
                pat = psk_pattern(ch, label[0], scheme.M, 3)
            elif scheme.kind == "APSK":
                pat = apsk_pattern(ch, part, label[0], label[1], scheme, 3)
            else:
                pat = qapsk_pattern(ch, part, label[0], label[1], label[2], scheme, 3)
            ref = pat.received_point(ch.g)
            assert abs(const.points[i] - ref) <= 1e-12 * max(1.0, abs(ref))

    def test_apsk_prefix_sum_structure(self):
        scheme = SchemeConfig(kind="APSK", M=32, V=8)
        ch = make_channel(32, seed=12)
        const = received_signal_set(ch, scheme, partition_blocks(32, scheme), 3)
        pts = {lab: z for lab, z in zip(const.labels, const.points)}
        for l in range(2, scheme.layers + 1):
            expected = pts[(l - 1, 0)] + const.block_gains[l - 1]
            assert abs(pts[(l, 0)] - expected) <= 1e-12 * abs(expected)

    def test_rotational_symmetry(self):
        for scheme, n in [
            (SchemeConfig(kind="APSK", M=32, V=8), 32),
            (SchemeConfig(kind="QAPSK", M=64, V=4), 64),
        ]:
            ch = make_channel(n, seed=13)
            const = received_signal_set(ch, scheme, partition_blocks(n, scheme), 3)
            rot = np.exp(1j * TWO_PI / scheme.V)
            scale = np.abs(const.points).max()
            for i, lab in enumerate(const.labels):
                v = lab[-1]
                lab2 = lab[:-1] + ((v + 1) % scheme.V,)
                j = label_to_index(scheme, lab2)
                assert abs(const.points[j] - rot * const.points[i]) <= 1e-12 * scale

    def test_psk_rotational_symmetry_low_order(self):
        scheme = SchemeConfig(kind="PSK", M=8)
        ch = make_channel(32, seed=14)
        const = received_signal_set(ch, scheme, partition_blocks(32, scheme), 3)
        rot = np.exp(1j * TWO_PI / scheme.M)
        scale = np.abs(const.points).max()
        rolled = np.roll(const.points, -1)
        assert np.all(np.abs(rolled - rot * const.points) <= 1e-12 * scale)

    def test_block_gains_phase_compensated(self):
        # Every X_l argument stays within half a quantizer step of zero.
        for seed in range(5):
            scheme = SchemeConfig(kind="APSK", M=32, V=8)
            ch = make_channel(32, seed=100 + seed)
            const = received_signal_set(ch, scheme, partition_blocks(32, scheme), 3)
            assert np.all(np.abs(np.angle(const.block_gains)) <= np.pi / 8)

    def test_off_blocks_contribute_zero(self):
        scheme = SchemeConfig(kind="APSK", M=32, V=8)
        ch = make_channel(32, seed=15)
        part = partition_blocks(32, scheme)
        const = received_signal_set(ch, scheme, part, 3)
        # point(l=1, v=0) must equal the sum over block 1 only.
        pat = apsk_pattern(ch, part, 1, 0, scheme, 3)
        on = pat.amplitude.astype(bool)
        direct = np.sum(ch.g[on] * np.exp(1j * pat.phase[on]))
        i = label_to_index(scheme, (1, 0))
        assert const.points[i] == pytest.approx(direct, rel=1e-12)
        assert np.sum(pat.amplitude) == 8


class TestLabels:
    @settings(max_examples=200, deadline=None)
    @given(st.integers(min_value=0, max_value=127), st.sampled_from(["PSK", "APSK", "QAPSK"]))
    def test_roundtrip(self, index, kind):
        scheme = (
            SchemeConfig(kind="PSK", M=128)
            if kind == "PSK"
            else SchemeConfig(kind=kind, M=128, V=8)
        )
        assert label_to_index(scheme, index_to_label(scheme, index)) == index

    def test_v_major_order(self):
        scheme = SchemeConfig(kind="APSK", M=16, V=4)
        labels = all_labels(scheme)
        assert labels[0] == (1, 0)
        assert labels[scheme.layers] == (1, 1)  # next v starts after all layers


class TestStatisticalSet:
    def test_apsk_ring_structure(self):
        scheme = SchemeConfig(kind="APSK", M=128, V=8)
        const = statistical_signal_set(scheme, 7.0)
        radii = np.unique(np.round(np.abs(const.points), 9))
        assert len(radii) == 16
        assert np.allclose(radii, 7.0 * np.arange(1, 17))

    def test_psk_single_circle(self):
        const = statistical_signal_set(SchemeConfig(kind="PSK", M=16), 3.0)
        assert np.allclose(np.abs(const.points), 3.0)
