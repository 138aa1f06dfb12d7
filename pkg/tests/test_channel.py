"""Channel generation, unit conversions, and serialization."""

import json

import numpy as np
import pytest

from secrelay.channel import (
    ChannelRealization,
    DegenerateChannelError,
    SystemConfig,
    channel_from_dict,
    channel_to_dict,
    config_from_dict,
    config_to_dict,
    dbw_to_watts,
    power_split_from_total,
    sample_channel,
    watts_to_dbw,
)


def make_cfg(**overrides) -> SystemConfig:
    base = dict(n_antennas=3, p1=25.0, p2=25.0, p_relay=50.0)
    base.update(overrides)
    return SystemConfig(**base)


class TestSampling:
    def test_same_seed_is_bitwise_identical(self):
        cfg = make_cfg()
        a = sample_channel(cfg, 1234)
        b = sample_channel(cfg, 1234)
        assert np.array_equal(a.f1, b.f1)
        assert np.array_equal(a.f2, b.f2)
        assert np.array_equal(a.fe, b.fe)
        assert a.g1 == b.g1 and a.g2 == b.g2

    def test_different_seeds_differ(self):
        cfg = make_cfg()
        a = sample_channel(cfg, 1)
        b = sample_channel(cfg, 2)
        assert not np.array_equal(a.f1, b.f1)

    def test_zero_variance_gives_exact_zero(self):
        cfg = make_cfg(var_g1=0.0)
        ch = sample_channel(cfg, 7)
        assert ch.g1 == 0j

    def test_sample_mean_power_matches_variance(self):
        # 10^4 draws of |f1_j|^2 with unit variance: sample mean within 5%.
        cfg = make_cfg()
        acc = 0.0
        count = 0
        for seed in range(10_000 // cfg.n_antennas + 1):
            ch = sample_channel(cfg, seed)
            acc += float(np.sum(np.abs(ch.f1) ** 2))
            count += cfg.n_antennas
        assert abs(acc / count - 1.0) < 0.05

    def test_scaled_variance_scales_draws(self):
        # Same seed, bigger variance: entries scale by sqrt of the ratio.
        a = sample_channel(make_cfg(), 99)
        b = sample_channel(make_cfg(var_f1=4.0), 99)
        np.testing.assert_allclose(b.f1, 2.0 * a.f1, rtol=1e-14)

    def test_zero_f1_variance_is_degenerate(self):
        with pytest.raises(DegenerateChannelError):
            sample_channel(make_cfg(var_f1=0.0), 3)


class TestConfigValidation:
    def test_n_antennas_floor(self):
        with pytest.raises(ValueError):
            make_cfg(n_antennas=1)

    def test_negative_power_rejected(self):
        with pytest.raises(ValueError):
            make_cfg(p1=-1.0)

    def test_zero_noise_rejected(self):
        with pytest.raises(ValueError):
            make_cfg(sigma2_eve1=0.0)

    def test_negative_channel_variance_rejected(self):
        with pytest.raises(ValueError):
            make_cfg(var_fe=-0.5)


class TestUnits:
    def test_dbw_to_watts_known_points(self):
        assert dbw_to_watts(20.0) == pytest.approx(100.0, rel=1e-14)
        assert dbw_to_watts(15.0) == pytest.approx(31.6227766016838, rel=1e-12)
        assert dbw_to_watts(0.0) == 1.0

    def test_roundtrip(self):
        for x in (0.01, 1.0, 31.62, 100.0, 12345.6):
            assert watts_to_dbw(dbw_to_watts(watts_to_dbw(x))) == pytest.approx(
                watts_to_dbw(x), abs=1e-12
            )

    def test_watts_to_dbw_rejects_zero(self):
        with pytest.raises(ValueError):
            watts_to_dbw(0.0)

    def test_power_split(self):
        assert power_split_from_total(20.0) == pytest.approx((25.0, 25.0, 50.0))
        p = power_split_from_total(watts_to_dbw(4.0))
        assert p == pytest.approx((1.0, 1.0, 2.0))
        assert power_split_from_total(0.0) == pytest.approx((0.25, 0.25, 0.5))


class TestSerialization:
    def test_config_roundtrip(self):
        cfg = make_cfg(var_fe=2.5, sigma2_eve2=0.7)
        blob = json.dumps(config_to_dict(cfg))
        assert config_from_dict(json.loads(blob)) == cfg

    def test_config_rejects_unknown_fields(self):
        with pytest.raises(ValueError):
            config_from_dict({"n_antennas": 3, "p1": 1, "p2": 1, "p_relay": 1, "bogus": 0})

    def test_channel_roundtrip(self):
        ch = sample_channel(make_cfg(), 5)
        blob = json.dumps(channel_to_dict(ch))
        back = channel_from_dict(json.loads(blob))
        assert isinstance(back, ChannelRealization)
        np.testing.assert_array_equal(back.f1, ch.f1)
        np.testing.assert_array_equal(back.fe, ch.fe)
        assert back.g1 == ch.g1 and back.g2 == ch.g2
