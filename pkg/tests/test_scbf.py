import math

import numpy as np
import pytest

from fdnoma.scenarios.scbf import ScbfConfig, beam_from_angle, eval_scbf, scbf_channels
from fdnoma.sweep import InfeasibleTargetError, scbf_optimize, tdm_region


def brute_force_region_point(cfg, target, n=200):
    """Spec-sized brute force: n^3 grid over both beam angles and the power
    split, all three decode modes, full power. Independent of the optimizer's
    closed-form split and refinement logic."""
    h1, h2 = scbf_channels(cfg)
    b1 = h1 / np.linalg.norm(h1)
    h2p = h2 - b1 * (b1.conj() @ h2)
    nrm = np.linalg.norm(h2p)
    if nrm > 1e-12:
        b2 = h2p / nrm
    else:
        b2 = np.zeros_like(b1)
        b2[1] = 1.0
    th = np.linspace(0.0, math.pi, n, endpoint=False)
    beta = np.linspace(0.0, 1.0, n)
    g1 = np.abs((h1.conj() @ b1) * np.cos(th) + (h1.conj() @ b2) * np.sin(th)) ** 2
    g2 = np.abs((h2.conj() @ b1) * np.cos(th) + (h2.conj() @ b2) * np.sin(th)) ** 2
    p = cfg.p_total
    best = -np.inf
    p1 = beta[:, None] * p
    p2 = (1.0 - beta[:, None]) * p
    for i in range(n):  # w1 angle
        G11, G21 = g1[i], g2[i]
        s22 = p2 * g2[None, :] / (p1 * G21 + 1.0)
        s21 = p2 * g1[None, :] / (p1 * G11 + 1.0)
        r2 = np.log2(1.0 + np.minimum(s22, s21))
        r1 = np.log2(1.0 + p1 * G11) + 0.0 * r2
        best = max(best, np.where(r2 >= target - 1e-12, r1, -np.inf).max())
        r2 = np.log2(1.0 + s22)
        r1 = np.log2(1.0 + p1 * G11 / (p2 * g1[None, :] + 1.0))
        best = max(best, np.where(r2 >= target - 1e-12, r1, -np.inf).max())
        r2 = np.log2(1.0 + p2 * g2[None, :])
        s12 = p1 * G21 / (p2 * g2[None, :] + 1.0)
        s11 = p1 * G11 / (p2 * g1[None, :] + 1.0)
        r1 = np.log2(1.0 + np.minimum(s12, s11))
        best = max(best, np.where(r2 >= target - 1e-12, r1, -np.inf).max())
    return float(best)


class TestChannels:
    def test_orthogonal_at_zero_correlation(self):
        h1, h2 = scbf_channels(ScbfConfig(alpha=1.0, rho_corr=0.0))
        assert abs(h1.conj() @ h2) < 1e-15
        assert np.linalg.norm(h2) ** 2 == pytest.approx(1.0, rel=1e-12)

    def test_aligned_at_unit_correlation(self):
        h1, h2 = scbf_channels(ScbfConfig(alpha=0.25, rho_corr=1.0))
        assert np.allclose(h2, 0.5 * h1)

    def test_attenuation_is_power(self):
        h1, h2 = scbf_channels(ScbfConfig(alpha=0.25, rho_corr=0.4))
        assert np.linalg.norm(h2) ** 2 == pytest.approx(0.25 * np.linalg.norm(h1) ** 2,
                                                        rel=1e-12)

    def test_correlation_coefficient(self):
        cfg = ScbfConfig(alpha=0.5, rho_corr=0.7)
        h1, h2 = scbf_channels(cfg)
        coeff = abs(h1.conj() @ h2) / (np.linalg.norm(h1) * np.linalg.norm(h2))
        assert coeff == pytest.approx(0.7, rel=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError):
            ScbfConfig(alpha=0.0)
        with pytest.raises(ValueError):
            ScbfConfig(rho_corr=1.5)
        with pytest.raises(ValueError):
            ScbfConfig(m=1)


class TestEval:
    def test_orthogonal_decoupled(self):
        cfg = ScbfConfig(alpha=1.0, rho_corr=0.0, p_total=10.0)
        w1 = np.array([1.0, 0.0], dtype=complex)
        w2 = np.array([0.0, 1.0], dtype=complex)
        r1, r2 = eval_scbf(cfg, w1, w2, 5.0, 5.0)
        assert r1 == pytest.approx(math.log2(6.0), rel=1e-12)
        assert r2 == pytest.approx(math.log2(6.0), rel=1e-12)

    def test_no_weak_power_single_user(self):
        cfg = ScbfConfig(alpha=1.0, rho_corr=0.0, p_total=10.0)
        w1 = np.array([1.0, 0.0], dtype=complex)
        w2 = np.array([0.0, 1.0], dtype=complex)
        r1, r2 = eval_scbf(cfg, w1, w2, 10.0, 0.0)
        assert r2 == 0.0
        assert r1 == pytest.approx(math.log2(11.0), rel=1e-12)

    def test_aligned_sic_example(self):
        cfg = ScbfConfig(alpha=0.25, rho_corr=1.0, p_total=10.0)
        w = np.array([1.0, 0.0], dtype=complex)
        r1, r2 = eval_scbf(cfg, w, w, 1.0, 9.0)
        # weak SINRs: 1.8 at its own receiver, 4.5 at the strong user
        assert r2 == pytest.approx(math.log2(2.8), rel=1e-12)
        assert r1 == pytest.approx(1.0, rel=1e-12)
        assert r2 == pytest.approx(1.4854, abs=1e-4)

    def test_power_budget_enforced(self):
        cfg = ScbfConfig(p_total=10.0)
        w = np.array([1.0, 0.0], dtype=complex)
        with pytest.raises(ValueError):
            eval_scbf(cfg, w, w, 6.0, 5.0)

    def test_non_unit_beam_rejected(self):
        cfg = ScbfConfig()
        with pytest.raises(ValueError):
            eval_scbf(cfg, np.array([2.0, 0.0]), np.array([1.0, 0.0]), 1.0, 1.0)


class TestOptimize:
    def test_decoupled_matched_target(self):
        cfg = ScbfConfig(alpha=1.0, rho_corr=0.0, p_total=10.0)
        res = scbf_optimize(cfg, math.log2(6.0))
        assert res.r1 == pytest.approx(math.log2(6.0), abs=1e-9)

    def test_zero_target_single_user_corner(self):
        cfg = ScbfConfig(alpha=0.25, rho_corr=0.3, p_total=10.0)
        res = scbf_optimize(cfg, 0.0)
        assert res.r1 == pytest.approx(math.log2(11.0), rel=1e-12)
        assert res.p1 == pytest.approx(10.0)

    @pytest.mark.parametrize("alpha,rho", [(0.25, 0.0), (1.0, 0.0), (0.25, 0.7),
                                           (1.0, 0.7), (1.0, 1.0)])
    def test_never_below_brute_force(self, alpha, rho):
        cfg = ScbfConfig(alpha=alpha, rho_corr=rho, p_total=10.0)
        _, (_, r2_cap) = tdm_region(cfg)
        for target in np.linspace(0.0, 0.9 * r2_cap, 4):
            mine = scbf_optimize(cfg, float(target)).r1
            brute = brute_force_region_point(cfg, float(target), n=60)
            assert mine >= brute - 1e-3

    def test_beats_pure_mrt_and_zf_splits(self):
        # direct members of the search family can never exceed the optimizer
        cfg = ScbfConfig(alpha=0.5, rho_corr=0.5, p_total=10.0)
        h1, h2 = scbf_channels(cfg)
        w_mrt1 = h1 / np.linalg.norm(h1)
        w_mrt2 = h2 / np.linalg.norm(h2)
        w_zf2 = h2 - w_mrt1 * (w_mrt1.conj() @ h2)
        w_zf2 = w_zf2 / np.linalg.norm(w_zf2)
        for p2 in (2.0, 5.0, 8.0):
            for w2 in (w_mrt2, w_zf2):
                r1, r2 = eval_scbf(cfg, w_mrt1, w2, cfg.p_total - p2, p2)
                res = scbf_optimize(cfg, r2)
                assert res.r1 >= r1 - 1e-9

    def test_infeasible_target(self):
        cfg = ScbfConfig(alpha=0.25, rho_corr=0.0, p_total=10.0)
        with pytest.raises(InfeasibleTargetError):
            scbf_optimize(cfg, 10.0)

    def test_region_symmetry_orthogonal_equal_channels(self):
        cfg = ScbfConfig(alpha=1.0, rho_corr=0.0, p_total=10.0)
        for target in (0.5, 1.0, 2.0):
            r1 = scbf_optimize(cfg, target).r1
            back = scbf_optimize(cfg, r1).r1
            assert back == pytest.approx(target, abs=2e-3)


class TestTdm:
    def test_endpoints(self):
        (x1, y1), (x2, y2) = tdm_region(ScbfConfig(alpha=0.25, p_total=10.0))
        assert (x1, y1) == (pytest.approx(3.4594, abs=1e-4), 0.0)
        assert (x2, y2) == (0.0, pytest.approx(1.8074, abs=1e-4))

    def test_symmetric_when_equal_gains(self):
        (x1, _), (_, y2) = tdm_region(ScbfConfig(alpha=1.0, p_total=10.0))
        assert x1 == pytest.approx(y2, rel=1e-12)

    def test_region_contains_tdm_segment(self):
        cfg = ScbfConfig(alpha=0.25, rho_corr=0.0, p_total=10.0)
        (a, _), (_, b) = tdm_region(cfg)
        for t in np.linspace(0.0, b, 20):
            r1 = scbf_optimize(cfg, float(t)).r1
            assert r1 >= a * (1.0 - t / b) - 1e-9


class TestBeamFromAngle:
    def test_angles_span_matched_directions(self):
        cfg = ScbfConfig(alpha=0.5, rho_corr=0.6)
        h1, _ = scbf_channels(cfg)
        w = beam_from_angle(cfg, 0.0)
        assert abs(abs(h1.conj() @ w) ** 2 - np.linalg.norm(h1) ** 2) < 1e-12
