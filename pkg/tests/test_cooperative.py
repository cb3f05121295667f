import dataclasses
import math

import numpy as np
import pytest

from fdnoma.channel import ChannelSet, draw_scenario_channels, draw_topology_batch
from fdnoma.core import RngStream
from fdnoma.noma import PowerAllocation
from fdnoma.scenarios import cooperative
from fdnoma.scenarios.cooperative import CoopConfig, batch_sum_rate, eval_cooperative


def manual_channels(**gains):
    """Scalar channel set with |entry|^2 equal to the given link gains."""
    defaults = dict(bs_ue1=1.0, bs_relay=1.0, relay_ue1=1.0, relay_ue2=1.0,
                    loop=0.3, bs_ue2=1.0, ue1_ue2=1.0)
    defaults.update(gains)
    return ChannelSet({k: np.array([[math.sqrt(v)]], dtype=complex)
                       for k, v in defaults.items()}, trial_id=0)


class TestRelayWorkedExample:
    # the printed constants pair with explicit residual fractions of 0.01
    CFG = CoopConfig(rho_b=10.0, rho_r=5.0, alloc=PowerAllocation(0.05, 0.95),
                     k1=0.01, k2=0.01, variant="fd_relay")

    def test_relay_decode_sinr(self):
        out = eval_cooperative(self.CFG, manual_channels())
        assert out.breakdowns["weak"]["relay"].value == pytest.approx(9.5 / 1.515, rel=1e-12)
        assert out.breakdowns["weak"]["relay"].value == pytest.approx(6.2706, abs=1e-4)

    def test_destination_sinr(self):
        out = eval_cooperative(self.CFG, manual_channels())
        assert out.breakdowns["weak"]["ue2"].value == pytest.approx(5.0, rel=1e-12)

    def test_strong_user_cross_decode_sinr(self):
        out = eval_cooperative(self.CFG, manual_channels())
        assert out.breakdowns["weak"]["ue1"].value == pytest.approx(9.5 / 1.55, rel=1e-12)
        assert out.breakdowns["weak"]["ue1"].value == pytest.approx(6.1290, abs=1e-4)

    def test_rates_and_sum(self):
        out = eval_cooperative(self.CFG, manual_channels())
        assert out.rates["weak"] == pytest.approx(math.log2(6.0), rel=1e-12)
        assert out.rates["strong"] == pytest.approx(math.log2(1 + 0.5 / 1.05), rel=1e-12)
        assert out.sum_rate() == pytest.approx(3.1471, abs=1e-3)

    def test_hd_relay_same_channels(self):
        cfg = dataclasses.replace(self.CFG, variant="hd_relay")
        out = eval_cooperative(cfg, manual_channels())
        assert out.rates["weak"] == pytest.approx(0.5 * math.log2(6.0), rel=1e-12)
        assert out.rates["weak"] == pytest.approx(1.2925, abs=1e-4)


class TestDefaults:
    def test_forward_snr_defaults_to_half(self):
        assert CoopConfig(rho_b=20.0).forward_snr == 10.0
        assert CoopConfig(rho_b=20.0, rho_r=3.0).forward_snr == 3.0

    def test_k_bounds(self):
        with pytest.raises(ValueError):
            CoopConfig(k1=1.5)
        with pytest.raises(ValueError):
            CoopConfig(k2=-0.1)

    def test_unknown_variant(self):
        with pytest.raises(ValueError):
            CoopConfig(variant="tdma")


class TestUserAssisted:
    def test_destination_combines_direct_and_forwarded(self):
        cfg = CoopConfig(rho_b=10.0, rho_r=5.0, variant="fd_user", k2=0.01)
        ch = manual_channels(bs_ue2=1.0, ue1_ue2=1.0, loop=0.3)
        out = eval_cooperative(cfg, ch)
        direct = 9.5 / 1.5
        forwarded = 5.0
        assert out.breakdowns["weak"]["ue2"].value == pytest.approx(direct + forwarded, rel=1e-12)

    def test_forwarder_must_decode(self):
        cfg = CoopConfig(rho_b=10.0, rho_r=5.0, variant="fd_user",
                         k2=0.01, enforce_decodability=False)
        ch = manual_channels()
        out = eval_cooperative(cfg, ch)
        lim = min(out.breakdowns["weak"]["ue1"].value, out.breakdowns["weak"]["ue2"].value)
        assert out.rates["weak"] == pytest.approx(math.log2(1 + lim), rel=1e-12)

    def test_hd_user_halves_and_strips_loop(self):
        fd = CoopConfig(rho_b=10.0, variant="fd_user", k2=0.0)
        hd = dataclasses.replace(fd, variant="hd_user")
        ch = manual_channels()
        a = eval_cooperative(fd, ch)
        b = eval_cooperative(hd, ch)
        for key in a.rates:
            assert 0.5 * a.rates[key] == pytest.approx(b.rates[key], abs=1e-12)


class TestMonotonicity:
    @pytest.mark.parametrize("field,values", [
        ("k1", [0.0, 0.25, 0.5, 1.0]),
        ("k2", [0.0, 0.25, 0.5, 1.0]),
        ("loop_gain", [0.0, 0.1, 0.3, 0.9]),
    ])
    def test_sum_capacity_nonincreasing(self, field, values):
        # same stream: raising a residual knob only rescales that one term
        for variant in ("fd_relay", "fd_user"):
            for t in range(20):
                sums = []
                for v in values:
                    cfg = dataclasses.replace(
                        CoopConfig(rho_b=100.0, variant=variant), **{field: v})
                    ch = draw_scenario_channels(cooperative.topology(cfg), RngStream(41, t))
                    sums.append(eval_cooperative(cfg, ch).sum_rate())
                assert all(a >= b - 1e-12 for a, b in zip(sums, sums[1:])), (variant, field, sums)


class TestEngineEquivalence:
    def test_audited_equals_batched(self):
        base = CoopConfig()
        batch = draw_topology_batch(cooperative.topology(base), 43, 60)
        for variant in cooperative.MODES:
            cfg = dataclasses.replace(base, variant=variant)
            arr = batch_sum_rate(cfg, batch)
            for t in range(60):
                ch = ChannelSet({k: v[t] for k, v in batch.items()}, t)
                assert eval_cooperative(cfg, ch).sum_rate() == pytest.approx(arr[t], abs=1e-12)

    def test_fd_with_zeroed_residuals_halved_equals_hd(self):
        for fd_variant, hd_variant in (("fd_relay", "hd_relay"), ("fd_user", "hd_user")):
            cfg_fd = CoopConfig(rho_b=31.6, loop_gain=0.0, k1=0.0, k2=0.0,
                                variant=fd_variant)
            cfg_hd = dataclasses.replace(cfg_fd, variant=hd_variant)
            topo = cooperative.topology(cfg_fd)
            for t in range(200):
                ch = draw_scenario_channels(topo, RngStream(47, t))
                fd = eval_cooperative(cfg_fd, ch)
                hd = eval_cooperative(cfg_hd, ch)
                for key in fd.rates:
                    assert 0.5 * fd.rates[key] == pytest.approx(hd.rates[key], abs=1e-12)


class TestCrossover:
    def test_fd_beats_hd_low_snr_and_loses_high_snr(self):
        # smaller-trial preview of the acceptance criterion
        base = CoopConfig()
        batch = draw_topology_batch(cooperative.topology(base), 53, 30_000)
        def mean_sum(variant, rho_db):
            cfg = CoopConfig(rho_b=10 ** (rho_db / 10), variant=variant)
            return batch_sum_rate(cfg, batch).mean()
        assert mean_sum("fd_relay", 5.0) > mean_sum("hd_relay", 5.0)
        assert mean_sum("fd_relay", 40.0) < mean_sum("hd_relay", 40.0)
