import math

import numpy as np
import pytest

from capbound import isd_channel as isd
from capbound.errors import DomainError, PreconditionError
from capbound.prob_core import ProbTable
from capbound.verification import oracle_bound_values, random_inputs, random_isd_spec


def xor_table():
    return {(a, b): a ^ b for a in (0, 1) for b in (0, 1)}


def noiseless_binary(mode="output_feedback"):
    """T1 = X1, T2 = X2, Yf = X1, Y1 = X1 xor X2, Y2 = X2 xor X1."""
    return isd.IsdChannelSpec(
        x1_alphabet=(0, 1), x2_alphabet=(0, 1), yf_alphabet=(0, 1),
        t1_alphabet=(0, 1), t2_alphabet=(0, 1),
        frontend1={x1: {(x1, x1): 1.0} for x1 in (0, 1)},
        frontend2={x2: {x2: 1.0} for x2 in (0, 1)},
        f1=xor_table(), f2=xor_table(), f3=xor_table(),
        feedback_mode=mode,
    )


def erased_coop_spec():
    """Yf erased with probability 1; T2 = X2 noiselessly; Y1 = X1 xor T2."""
    return isd.IsdChannelSpec(
        x1_alphabet=(0, 1), x2_alphabet=(0, 1), yf_alphabet=("e",),
        t1_alphabet=(0,), t2_alphabet=(0, 1),
        frontend1={x1: {("e", 0): 1.0} for x1 in (0, 1)},
        frontend2={x2: {x2: 1.0} for x2 in (0, 1)},
        f1=xor_table(),
        f2={(x2, 0): x2 for x2 in (0, 1)},
        f3={(x2, "e"): "e" for x2 in (0, 1)},
    )


class TestValidate:
    def test_xor_spec_ok(self):
        assert isd.validate(noiseless_binary()).ok

    def test_constant_f1_not_injective(self):
        spec = isd.IsdChannelSpec(
            x1_alphabet=(0, 1), x2_alphabet=(0, 1), yf_alphabet=(0, 1),
            t1_alphabet=(0, 1), t2_alphabet=(0, 1),
            frontend1={x1: {(x1, x1): 1.0} for x1 in (0, 1)},
            frontend2={x2: {x2: 1.0} for x2 in (0, 1)},
            f1={(a, b): a for a in (0, 1) for b in (0, 1)},  # ignores T2
            f2=xor_table(), f3=xor_table(),
        )
        report = isd.validate(spec)
        assert not report.ok
        first = report.first
        assert first.kind == "injectivity"
        assert first.witness == (0, 0, 1)

    def test_unnormalized_row_names_the_row(self):
        spec = isd.IsdChannelSpec(
            x1_alphabet=(0, 1), x2_alphabet=(0, 1), yf_alphabet=(0, 1),
            t1_alphabet=(0, 1), t2_alphabet=(0, 1),
            frontend1={x1: {(x1, x1): 1.0} for x1 in (0, 1)},
            frontend2={0: {0: 0.9}, 1: {1: 1.0}},
            f1=xor_table(), f2=xor_table(), f3=xor_table(),
        )
        report = isd.validate(spec)
        assert not report.ok
        assert report.first.kind == "normalization"
        assert "frontend2[0]" in report.first.location

    def test_output_feedback_requires_matching_outputs(self):
        spec = isd.IsdChannelSpec(
            x1_alphabet=(0, 1), x2_alphabet=(0, 1), yf_alphabet=(0, 1),
            t1_alphabet=(0, 1), t2_alphabet=(0, 1),
            frontend1={x1: {(x1, x1): 1.0} for x1 in (0, 1)},
            frontend2={x2: {x2: 1.0} for x2 in (0, 1)},
            f1=xor_table(), f2=xor_table(),
            f3={(a, b): b for a in (0, 1) for b in (0, 1)},  # f3 != f2
            feedback_mode="output_feedback",
        )
        report = isd.validate(spec)
        assert not report.ok
        assert report.first.kind == "output_feedback"


class TestJointDistribution:
    def test_noiseless_uniform_has_four_atoms(self):
        spec = noiseless_binary()
        joint = isd.joint_distribution(spec, isd.uniform_inputs(spec))
        atoms = joint.mass
        assert len(atoms) == 4
        assert all(p == pytest.approx(0.25) for p in atoms.values())

    def test_point_mass_single_atom(self):
        spec = noiseless_binary()
        joint = isd.joint_distribution(spec, isd.point_mass_inputs(spec, 0, 0))
        assert joint.mass == {(0, 0, 0, 0, 0, 0, 0): pytest.approx(1.0)}

    def test_noisy_frontend2_entropy(self):
        # T2 is X2 through a symmetric noisy map with crossover 1/4
        spec = isd.IsdChannelSpec(
            x1_alphabet=(0, 1), x2_alphabet=(0, 1), yf_alphabet=(0, 1),
            t1_alphabet=(0, 1), t2_alphabet=(0, 1),
            frontend1={x1: {(x1, x1): 1.0} for x1 in (0, 1)},
            frontend2={x2: {x2: 0.75, 1 - x2: 0.25} for x2 in (0, 1)},
            f1=xor_table(), f2=xor_table(), f3=xor_table(),
        )
        joint = isd.joint_distribution(spec, isd.uniform_inputs(spec))
        h = joint.conditional_entropy("T2", "X2")
        expected = -(0.25 * math.log2(0.25) + 0.75 * math.log2(0.75))
        assert h == pytest.approx(expected, abs=1e-12)

    def test_alphabet_mismatch_rejected(self):
        spec = noiseless_binary()
        bad = ProbTable.uniform(("X1", "X2"), ((0, 1, 2), (0, 1)))
        with pytest.raises(DomainError):
            isd.joint_distribution(spec, bad)


class TestEvalBounds:
    def test_noiseless_uniform_values(self):
        spec = noiseless_binary()
        bs = isd.eval_bounds(spec, isd.uniform_inputs(spec))
        expected = {
            "cutset_r1_coop": 1.0,
            "cutset_r1": 1.0,
            "cutset_r2": 1.0,
            "sum_tuni1": 1.0,
            "sum_tuni2": 1.0,
            "sum_pv": 2.0,
            "two_r1_plus_r2": 2.0,
            "r1_plus_two_r2": 2.0,
            "fb_r1_plus_two_r2": 2.0,
        }
        for bid, v in expected.items():
            assert bs.value(bid) == pytest.approx(v, abs=1e-12), bid

    def test_point_mass_inputs_zero_everything(self):
        spec = noiseless_binary()
        bs = isd.eval_bounds(spec, isd.point_mass_inputs(spec, 1, 0))
        assert all(v == pytest.approx(0.0, abs=1e-12) for v in bs.present.values())

    def test_fb_absent_without_output_feedback(self):
        spec = noiseless_binary(mode="generalized")
        bs = isd.eval_bounds(spec, isd.uniform_inputs(spec))
        entry = bs["fb_r1_plus_two_r2"]
        assert entry.value is None
        assert entry.reason == "requires output feedback"

    def test_matches_oracle_on_random_specs(self):
        rng = np.random.default_rng(5)
        for _ in range(6):
            spec = random_isd_spec(rng)
            for dist in random_inputs(rng, spec, 3):
                got = isd.eval_bounds(spec, dist).present
                want = oracle_bound_values(spec, dist)
                assert set(got) == set(want)
                for bid in want:
                    assert got[bid] == pytest.approx(want[bid], abs=1e-10), bid

    def test_constant_yf_reduces_cutset_to_direct_mi(self):
        spec = erased_coop_spec()
        dist = isd.uniform_inputs(spec)
        joint = isd.joint_distribution(spec, dist)
        direct = joint.mutual_information("X1", "Y1", "X2")
        bs = isd.eval_bounds(spec, dist)
        assert bs.value("cutset_r1_coop") == pytest.approx(direct, abs=1e-12)

    def test_bounds_capped_by_positive_term_log_alphabets(self):
        from capbound.boundset import ENTROPY_TERMS

        rng = np.random.default_rng(21)
        specs = [isd.ldc_instance(2, 1, 1)] + [random_isd_spec(rng) for _ in range(8)]
        for spec in specs:
            joint_alpha = {
                "X1": spec.x1_alphabet, "X2": spec.x2_alphabet, "Yf": spec.yf_alphabet,
                "T1": spec.t1_alphabet, "T2": spec.t2_alphabet,
                "Y1": spec.y1_alphabet(), "Y2": spec.y2_alphabet(),
            }
            for dist in random_inputs(rng, spec, 3):
                bs = isd.eval_bounds(spec, dist)
                for bid, value in bs.present.items():
                    cap = sum(
                        math.log2(len(joint_alpha[v]))
                        for sign, a, _ in ENTROPY_TERMS[bid]
                        if sign > 0
                        for v in a
                    )
                    assert 0.0 <= value <= cap + 1e-9


class TestFeedbackBound:
    def test_noiseless_value(self):
        spec = noiseless_binary()
        v = isd.eval_feedback_bound(spec, isd.uniform_inputs(spec))
        assert v == pytest.approx(2.0, abs=1e-12)

    def test_point_mass_zero(self):
        spec = noiseless_binary()
        assert isd.eval_feedback_bound(spec, isd.point_mass_inputs(spec, 0, 1)) == pytest.approx(
            0.0, abs=1e-12
        )

    def test_mode_guard(self):
        spec = noiseless_binary(mode="generalized")
        with pytest.raises(PreconditionError) as err:
            isd.eval_feedback_bound(spec, isd.uniform_inputs(spec))
        assert err.value.reason == "requires output feedback"


class TestMaximizeBound:
    def test_noiseless_cutset_r2(self):
        spec = noiseless_binary()
        _, v = isd.maximize_bound(spec, "cutset_r2", budget=200)
        assert v == pytest.approx(1.0, abs=1e-9)

    def test_useless_cooperation(self):
        spec = erased_coop_spec()
        _, v = isd.maximize_bound(spec, "cutset_r1_coop", budget=400)
        assert v == pytest.approx(1.0, abs=1e-9)

    def test_budget_one_is_the_uniform_start(self):
        spec = erased_coop_spec()
        dist, v = isd.maximize_bound(spec, "sum_pv", budget=1)
        uniform_value = oracle_bound_values(spec, isd.uniform_inputs(spec))["sum_pv"]
        assert v == pytest.approx(uniform_value, abs=1e-12)
        assert np.allclose(dist.probs, 0.25)

    def test_monotone_in_budget(self):
        rng = np.random.default_rng(3)
        spec = random_isd_spec(rng)
        values = [
            isd.maximize_bound(spec, "two_r1_plus_r2", budget=k, seed=42)[1]
            for k in (1, 10, 40, 150)
        ]
        for lo, hi in zip(values, values[1:]):
            assert hi >= lo - 1e-12

    def test_at_least_uniform(self):
        rng = np.random.default_rng(11)
        for _ in range(4):
            spec = random_isd_spec(rng)
            uniform_value = oracle_bound_values(spec, isd.uniform_inputs(spec))["cutset_r1"]
            _, v = isd.maximize_bound(spec, "cutset_r1", budget=60)
            assert v >= uniform_value - 1e-12


class TestLdcInstance:
    def test_point_to_point(self):
        spec = isd.ldc_instance(1, 0, 0)
        assert isd.validate(spec).ok
        _, v = isd.maximize_bound(spec, "cutset_r1_coop", budget=300)
        assert v == pytest.approx(1.0, abs=1e-9)

    def test_211_validates(self):
        assert isd.validate(isd.ldc_instance(2, 1, 1)).ok

    def test_210_matches_oracle(self):
        spec = isd.ldc_instance(2, 1, 0)
        dist = isd.uniform_inputs(spec)
        got = isd.eval_bounds(spec, dist).value("two_r1_plus_r2")
        want = oracle_bound_values(spec, dist)["two_r1_plus_r2"]
        assert got == pytest.approx(want, abs=1e-12)

    def test_level_guard(self):
        with pytest.raises(DomainError):
            isd.ldc_instance(4, 1, 1)


class TestSpecFiles:
    def test_round_trip(self, tmp_path):
        spec = noiseless_binary()
        doc = isd.spec_to_json_obj(spec)
        back = isd.spec_from_json_obj(doc)
        assert back.feedback_mode == spec.feedback_mode
        assert back.f1 == spec.f1
        bs = isd.eval_bounds(back, isd.uniform_inputs(back))
        assert bs.value("two_r1_plus_r2") == pytest.approx(2.0, abs=1e-12)

    def test_missing_field_is_named(self):
        with pytest.raises(DomainError) as err:
            isd.spec_from_json_obj({"alphabets": {}})
        assert "frontend1" in str(err.value)

    def test_bad_probability_string(self):
        doc = isd.spec_to_json_obj(noiseless_binary())
        doc["frontend2"][0][2] = "not-a-number"
        with pytest.raises(DomainError) as err:
            isd.spec_from_json_obj(doc)
        assert "frontend2" in str(err.value)
