import cmath
import math

import numpy as np
import pytest

from capbound import gaussian_engine as ge
from capbound.errors import DomainError
from capbound.gaussian_engine import (
    GaussianParams,
    closed_form_bounds,
    covariance,
    eval_bounds_at_rho,
    gaussian_cond_entropy,
    max_over_rho,
)

REF = GaussianParams(100.0, 100.0, 10.0, 10.0, 10.0)


class TestParams:
    def test_rejects_negative_gain(self):
        with pytest.raises(DomainError):
            GaussianParams(-1.0, 1.0, 1.0, 1.0, 1.0)

    def test_gains_above_one_predicate(self):
        assert REF.gains_above_one
        assert not GaussianParams(100.0, 100.0, 1.0, 10.0, 10.0).gains_above_one


class TestCovariance:
    def test_output_power_independent_inputs(self):
        K = covariance(REF, 0.0).matrix
        y1 = ge.GAUSS_VARS.index("Y1")
        assert K[y1, y1].real == pytest.approx(1.0 + 100.0 + 10.0)

    def test_cross_term_y1_yf(self):
        # E[Y1 conj(Yf)] = sqrt(S1 C) + sqrt(I2 C) e^{j theta2} conj(rho)
        K = covariance(REF, 0.0).matrix
        y1, yf = ge.GAUSS_VARS.index("Y1"), ge.GAUSS_VARS.index("Yf")
        assert K[y1, yf] == pytest.approx(math.sqrt(100.0 * 10.0))
        rho = 0.3 * cmath.exp(1j * 0.7)
        theta2 = 0.4
        p = GaussianParams(100.0, 100.0, 10.0, 10.0, 10.0, 0.0, theta2)
        K = covariance(p, rho).matrix
        expected = math.sqrt(1000.0) + math.sqrt(100.0) * cmath.exp(1j * theta2) * rho.conjugate()
        assert K[y1, yf] == pytest.approx(expected)

    def test_coherent_combining_power(self):
        K = covariance(REF, 1.0).matrix
        y1 = ge.GAUSS_VARS.index("Y1")
        assert K[y1, y1].real == pytest.approx(1.0 + (10.0 + math.sqrt(10.0)) ** 2)

    def test_rho_magnitude_guard(self):
        with pytest.raises(DomainError):
            covariance(REF, 1.0 + 1e-6)


class TestCondEntropy:
    def test_unit_scalar(self):
        h = gaussian_cond_entropy(covariance(REF, 0.0), "Y2", ("X1", "X2"))
        assert h == pytest.approx(math.log2(math.pi * math.e), abs=1e-12)

    def test_scalar_mi_identity(self):
        cov = covariance(REF, 0.0)
        mi = gaussian_cond_entropy(cov, "Y2", "X1") - gaussian_cond_entropy(cov, "Y2", ("X1", "X2"))
        assert mi == pytest.approx(math.log2(101.0), abs=1e-9)
        assert mi == pytest.approx(6.658211, abs=1e-6)

    def test_overlap_rejected(self):
        with pytest.raises(DomainError):
            gaussian_cond_entropy(covariance(REF, 0.0), "Y1", ("Y1", "X1"))

    def test_singular_conditioning_is_finite(self):
        cov = covariance(REF, 1.0)
        h = gaussian_cond_entropy(cov, "Y1", ("X1", "X2"))
        assert h == pytest.approx(math.log2(math.pi * math.e), abs=1e-6)


class TestEvalAtRho:
    def test_cutset_r1_independent(self):
        bs = eval_bounds_at_rho(REF, 0.0)
        assert bs.value("cutset_r1") == pytest.approx(math.log2(111.0), abs=1e-9)

    def test_cutset_r1_coherent_matches_closed_form(self):
        bs = eval_bounds_at_rho(REF, 1.0)
        expected = math.log2(1.0 + (math.sqrt(100.0) + math.sqrt(10.0)) ** 2)
        assert bs.value("cutset_r1") == pytest.approx(expected, abs=1e-6)

    def test_cutset_r2_independent(self):
        bs = eval_bounds_at_rho(REF, 0.0)
        assert bs.value("cutset_r2") == pytest.approx(math.log2(101.0), abs=1e-9)

    def test_cutset_r1_coop_at_rho0_is_exact(self):
        bs = eval_bounds_at_rho(REF, 0.0)
        assert bs.value("cutset_r1_coop") == pytest.approx(math.log2(111.0), abs=1e-9)

    def test_feedback_bound_absent(self):
        entry = eval_bounds_at_rho(REF, 0.0)["fb_r1_plus_two_r2"]
        assert entry.value is None and entry.reason == "requires output feedback"

    def test_phase_invariance_at_rho0(self):
        base = eval_bounds_at_rho(REF, 0.0).value("cutset_r2")
        for t1, t2 in ((0.3, 1.1), (2.0, 5.5), (4.4, 0.2)):
            p = GaussianParams(100.0, 100.0, 10.0, 10.0, 10.0, t1, t2)
            assert eval_bounds_at_rho(p, 0.0).value("cutset_r2") == pytest.approx(base, abs=1e-9)

    def test_entropy_constant_cancels(self, monkeypatch):
        before = {
            bid: v for bid, v in eval_bounds_at_rho(REF, 0.37 + 0.2j).present.items()
        }
        monkeypatch.setattr(ge, "_LOG2_PI_E", ge._LOG2_PI_E + 1.0)
        after = eval_bounds_at_rho(REF, 0.37 + 0.2j).present
        for bid, v in before.items():
            assert after[bid] == pytest.approx(v, abs=1e-9)


class TestMaxOverRho:
    def test_cutset_r2_argmax_at_zero(self):
        entry = max_over_rho(REF, 21, 16)["cutset_r2"]
        assert abs(entry.rho) == pytest.approx(0.0, abs=1e-12)
        assert entry.value == pytest.approx(math.log2(101.0), abs=1e-9)

    def test_cutset_r1_argmax_coherent(self):
        entry = max_over_rho(REF, 21, 16)["cutset_r1"]
        assert abs(entry.rho) == pytest.approx(1.0, abs=1e-9)
        phase = cmath.phase(entry.rho) % (2.0 * math.pi)
        assert min(phase, 2.0 * math.pi - phase) == pytest.approx(0.0, abs=1e-4)
        closed = closed_form_bounds(REF).value("cutset_r1")
        assert entry.value == pytest.approx(closed, abs=1e-6)

    def test_degenerate_grid(self):
        bs = max_over_rho(REF, 2, 1)
        v0 = eval_bounds_at_rho(REF, 0.0)
        v1 = eval_bounds_at_rho(REF, 1.0)
        for bid in v0.present:
            assert bs.value(bid) == pytest.approx(
                max(v0.value(bid), v1.value(bid)), abs=1e-12
            )

    def test_grid_guard(self):
        with pytest.raises(DomainError):
            max_over_rho(REF, 1, 4)


class TestClosedForms:
    def test_reference_values(self):
        bs = closed_form_bounds(REF)
        # hand evaluation of the printed formulas
        s, i, c = 100.0, 10.0, 10.0
        lg = math.log2
        expected = {
            "cutset_r1_coop": lg(1 + c + s),
            "cutset_r1": lg(1 + (math.sqrt(s) + math.sqrt(i)) ** 2),
            "cutset_r2": lg(1 + s),
            "sum_tuni1": lg(1 + (s + c) / (1 + i)) + lg(1 + (math.sqrt(s) + math.sqrt(i)) ** 2),
            "sum_tuni2": lg(1 + s / (1 + i)) + lg(1 + (math.sqrt(s) + math.sqrt(i)) ** 2),
            "sum_pv": lg(1 + i + s / i) + lg(1 + i / c + s / i) + lg(1 + c) + 2.0,
            "two_r1_plus_r2": (
                lg(1 + (math.sqrt(s) + math.sqrt(i)) ** 2) + lg(1 + c) + 1.0
                + lg(1 + s / (1 + i + c)) + lg(1 + i / c + s / i)
            ),
            "r1_plus_two_r2": (
                lg(1 + (math.sqrt(s) + math.sqrt(i)) ** 2) + lg(1 + s / (1 + i))
                + lg(1 + i + (s + c + i * c + 2 * math.sqrt(s * i)) / (1 + i))
            ),
        }
        for bid, v in expected.items():
            assert bs.value(bid) == pytest.approx(v, abs=1e-12), bid

    def test_gating_below_unit_gains(self):
        bs = closed_form_bounds(GaussianParams(100.0, 100.0, 0.5, 10.0, 10.0))
        for bid in ("sum_pv", "two_r1_plus_r2", "r1_plus_two_r2"):
            entry = bs[bid]
            assert entry.value is None
            assert entry.reason == "requires all channel gains larger than one"
        assert bs["cutset_r1"].value is not None

    def test_no_cooperation_limit(self):
        p = GaussianParams(100.0, 100.0, 10.0, 10.0, 1e-12)
        bs = closed_form_bounds(p)
        assert bs.value("cutset_r1_coop") == pytest.approx(math.log2(101.0), abs=1e-9)


class TestDominance:
    def test_spot_random_params(self):
        rng = np.random.default_rng(99)
        mags = np.linspace(0.0, 1.0, 11)
        phases = np.linspace(0.0, 2.0 * math.pi, 8, endpoint=False)
        rhos = np.array([m * np.exp(1j * p) for m in mags for p in phases])
        for _ in range(8):
            gains = 10.0 ** rng.uniform(0.01, 4.0, size=5)
            thetas = rng.uniform(0.0, 2.0 * math.pi, size=2)
            params = GaussianParams(*gains, *thetas)
            closed = closed_form_bounds(params).present
            per_rho = ge._grid_bound_values(params, rhos)
            for bid, cf in closed.items():
                assert float(per_rho[bid].max()) <= cf + 1e-6, bid
