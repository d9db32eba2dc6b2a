import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scmn.channel import (
    ChannelFamily,
    DimensionDistribution,
    capacity,
    dimension_distribution,
    sample_noise,
    transfer_f,
    transfer_f_oracle,
    transfer_poly,
)
from scmn.gf2 import SubspaceBasis


def cd(m, eps):
    return dimension_distribution(ChannelFamily.concentrated(m, eps))


def bd(m, eps):
    return dimension_distribution(ChannelFamily.binomial(m, eps))


class TestDistributions:
    def test_cd_integral_mass(self):
        assert cd(2, 0.5).probs == (0.0, 1.0, 0.0)

    def test_cd_split_mass(self):
        p = cd(2, 0.3).probs
        assert p[0] == pytest.approx(0.4, abs=1e-15)
        assert p[1] == pytest.approx(0.6, abs=1e-15)
        assert p[2] == 0.0

    def test_cd_eps_one(self):
        assert cd(3, 1.0).probs == (0.0, 0.0, 0.0, 1.0)

    def test_bd_is_binomial(self):
        assert bd(2, 0.5).probs == (0.25, 0.5, 0.25)
        for d, p in enumerate(bd(4, 0.3).probs):
            assert p == pytest.approx(math.comb(4, d) * 0.3**d * 0.7 ** (4 - d))

    def test_w_point_mass(self):
        dist = dimension_distribution(ChannelFamily.fixed(3, 0))
        assert dist.probs == (1.0, 0.0, 0.0, 0.0)

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            ChannelFamily("cd", 2, 1.5)
        with pytest.raises(ValueError):
            ChannelFamily("w", 2, 3)
        with pytest.raises(ValueError):
            ChannelFamily("nope", 2, 0.5)

    def test_distribution_validation(self):
        with pytest.raises(ValueError):
            DimensionDistribution(2, (0.5, 0.2, 0.2))
        with pytest.raises(ValueError):
            DimensionDistribution(2, (1.2, -0.2, 0.0))


class TestCapacity:
    def test_cd_bd_identity(self):
        for m in range(1, 7):
            for e10 in range(1, 10):
                eps = e10 / 10
                assert abs(capacity(cd(m, eps)) - (1 - eps)) < 1e-12
                assert abs(capacity(bd(m, eps)) - (1 - eps)) < 1e-12

    def test_w_channel(self):
        assert capacity(dimension_distribution(ChannelFamily.fixed(4, 0))) == 1.0
        assert capacity(dimension_distribution(ChannelFamily.fixed(4, 3))) == pytest.approx(0.25)


class TestSampleNoise:
    def test_noiseless(self):
        rng = np.random.default_rng(0)
        dist = dimension_distribution(ChannelFamily.fixed(3, 0))
        for _ in range(20):
            v, z = sample_noise(dist, rng)
            assert v == SubspaceBasis.zero(3)
            assert z.bits == 0

    def test_cd_integral_dimension(self):
        rng = np.random.default_rng(1)
        dist = cd(2, 0.5)
        for _ in range(200):
            v, z = sample_noise(dist, rng)
            assert v.dim == 1
            assert v.contains(z)

    def test_full_space_uniform_noise(self):
        rng = np.random.default_rng(2)
        dist = dimension_distribution(ChannelFamily.fixed(2, 2))
        n = 80000
        counts = np.zeros(4)
        for _ in range(n):
            _, z = sample_noise(dist, rng)
            counts[z.bits] += 1
        sigma = (0.25 * 0.75 / n) ** 0.5
        assert np.all(np.abs(counts / n - 0.25) < 3 * sigma)


class TestTransfer:
    def test_m1_is_flat(self):
        dist = cd(1, 0.37)
        for z in (0.0, 0.25, 0.5, 1.0):
            assert transfer_f(dist, z) == 0.37

    def test_hand_value_at_zero(self):
        assert transfer_f(cd(2, 0.5), 0.0) == pytest.approx(1 / 3, abs=1e-15)

    def test_noiseless_gives_zero(self):
        dist = dimension_distribution(ChannelFamily.fixed(3, 0))
        for z in (0.0, 0.5, 1.0):
            assert transfer_f(dist, z) == 0.0

    def test_z_domain(self):
        with pytest.raises(ValueError):
            transfer_f(cd(2, 0.5), 1.1)
        with pytest.raises(ValueError):
            transfer_f_oracle(cd(2, 0.5), -0.1)

    def test_oracle_guard(self):
        with pytest.raises(ValueError):
            transfer_f_oracle(cd(5, 0.5), 0.5)

    def test_oracle_spot_checks(self):
        for kind_dist in (cd(2, 0.35), bd(3, 0.6), bd(2, 0.15)):
            for z in (0.0, 0.2, 0.55, 0.9, 1.0):
                assert transfer_f(kind_dist, z) == pytest.approx(
                    transfer_f_oracle(kind_dist, z), abs=1e-12
                )

    def test_monotone_in_z(self):
        zs = np.linspace(0, 1, 101)
        for dist in (cd(2, 0.4), cd(3, 0.7), bd(3, 0.5), bd(4, 0.25)):
            vals = [transfer_f(dist, z) for z in zs]
            assert all(b >= a - 1e-14 for a, b in zip(vals, vals[1:]))

    def test_monotone_under_dimension_shift(self):
        # same floor bracket: more noise mass on the higher dimension
        for z in np.linspace(0, 1, 21):
            assert transfer_f(cd(3, 0.45), z) >= transfer_f(cd(3, 0.40), z) - 1e-14

    @settings(max_examples=80)
    @given(
        st.integers(min_value=1, max_value=4),
        st.lists(st.floats(min_value=0, max_value=1), min_size=1, max_size=5),
        st.floats(min_value=0, max_value=1),
    )
    def test_range_and_endpoint_order(self, m, weights, z):
        raw = np.zeros(m + 1)
        raw[: len(weights[: m + 1])] = weights[: m + 1]
        if raw.sum() == 0:
            raw[0] = 1.0
        dist = DimensionDistribution(m, tuple(raw / raw.sum()))
        val = transfer_f(dist, z)
        assert 0.0 <= val <= 1.0
        assert transfer_f(dist, 0.0) <= transfer_f(dist, 1.0) + 1e-14

    def test_poly_degree(self):
        assert transfer_poly(cd(3, 0.4)).shape == (3,)
