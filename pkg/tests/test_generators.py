"""Generated theory families: shape, validity, determinism."""

import random

import pytest

from dedlog import Session, compute_extension, lit, load_theory, serialize_theory
from dedlog.generators import (FamilySpec, chain_ctd, conj_grid, generate,
                               random_theory, scenario_theory)


class TestChainCtd:
    def test_rule_count_and_shape(self):
        t = chain_ctd(10)
        assert len(t.rules) == 10
        assert t.warnings() == []
        # Contrary-to-duty linkage: each obligation rule is triggered by the
        # violation of the previous obligation's head.
        o2 = t.rules_by_label["o2"]
        assert {str(a) for a in o2.body} == {"~a1"}

    def test_extension_sane(self):
        t = chain_ctd(12)
        ext, trace = compute_extension(t)
        # The cascade keeps firing: every obligation in the chain is in force.
        assert lit("a1") in ext.obligation_pos
        assert lit("a6") in ext.obligation_pos
        assert trace.stage_count() > 5  # genuinely staged, not flat

    def test_parses_back(self):
        t = chain_ctd(30)
        assert load_theory(serialize_theory(t)).same_theory(t)


class TestConjGrid:
    def test_shape(self):
        t = conj_grid(5, 3)
        conj_rules = [r for r in t.rules if r.partition()[3]]
        assert len(conj_rules) == 5
        assert all(len(next(iter(r.partition()[3]))) == 3 for r in conj_rules)

    def test_all_conjunctions_proven(self):
        session = Session(conj_grid(3, 2, base_rules=6))
        ext = session.extension
        assert len(ext.conj_pos) == 3
        assert lit("z1") in ext.factual_pos


class TestRandomTheory:
    def test_deterministic_from_seed(self):
        spec = FamilySpec("random", n=5, r=8, m=1, seed=42)
        assert serialize_theory(generate(spec)) == serialize_theory(generate(spec))

    def test_different_seeds_differ(self):
        a = serialize_theory(generate(FamilySpec("random", n=5, r=8, seed=1)))
        b = serialize_theory(generate(FamilySpec("random", n=5, r=8, seed=2)))
        assert a != b

    def test_validates_and_round_trips(self):
        rng = random.Random(9)
        for _ in range(20):
            t = random_theory(rng, atoms=5, rules=7, conjunctions=2)
            assert load_theory(serialize_theory(t)).same_theory(t)

    def test_consistency_knob(self):
        rng = random.Random(5)
        for _ in range(30):
            t = random_theory(rng, atoms=4, rules=5, complement_free_facts=True)
            assert not any(f.complement() in t.facts for f in t.facts)
            assert not t._superiority_cyclic()


class TestScenarioSampler:
    def test_produces_targets_and_valid_theories(self):
        rng = random.Random(0)
        for _ in range(15):
            theory, targets = scenario_theory(rng, blocks=3)
            assert load_theory(serialize_theory(theory)).same_theory(theory)
            compute_extension(theory)  # must not raise


class TestFamilySpec:
    def test_rejects_unknown_family(self):
        with pytest.raises(ValueError):
            FamilySpec("nope")

    def test_rejects_bad_sizes(self):
        with pytest.raises(ValueError):
            FamilySpec("chain-ctd", n=0)
        with pytest.raises(ValueError):
            FamilySpec("conj-grid", m=2, k=1)
