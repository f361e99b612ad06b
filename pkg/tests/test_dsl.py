"""Parser, serializer and extension emission."""

import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from dedlog import (Arrow, Conjunction, Extension, Session, emit_extension,
                    extension_dict, lit, load_theory, parse_theory,
                    serialize_theory)
from dedlog.generators import random_theory


class TestParsing:
    def test_fact_and_chain_rule(self):
        t = load_theory("fact f1. r1: f1 =O> a * b.")
        assert t.facts == {lit("f1")}
        (r1,) = t.rules
        assert r1.arrow is Arrow.DEFEASIBLE_PRESCRIPTIVE
        assert [str(e) for e in r1.head] == ["a", "b"]
        assert t.superiority == frozenset()

    def test_superiority_and_deontic_bodies(self):
        t = load_theory("""
            r2: f2, g2 =O> b * c.
            r6: O[a], O[b] =O> ~c.
            r6 > r2.
        """)
        assert t.superiority == {("r6", "r2")}
        r6 = t.rules_by_label["r6"]
        assert r6.partition()[1] == {lit("a"), lit("b")}

    def test_forward_reference_in_superiority(self):
        t = load_theory("r6 > r2. r2: =O> b. r6: =O> ~b.")
        assert t.superiority == {("r6", "r2")}

    def test_empty_antecedent_and_negation(self):
        t = load_theory("r1: =O> a. r2: ~> ~a. r3: -O[a] => ~b.")
        assert t.rules_by_label["r1"].body == frozenset()
        assert t.rules_by_label["r2"].arrow is Arrow.DEFEATER_CONSTITUTIVE

    def test_comments_and_whitespace(self):
        t = load_theory("# leading comment\nfact a.  # trailing\n\n r1: a => b.\n")
        assert t.facts == {lit("a")}

    def test_empty_input(self):
        t = load_theory("")
        assert not t.facts and not t.rules


class TestParseErrors:
    def check_error(self, text, fragment):
        result = parse_theory(text)
        assert result.theory is None
        messages = " | ".join(d.message for d in result.errors())
        assert fragment in messages, messages

    def test_deontic_fact(self):
        self.check_error("fact O[a].", "deontic literal not allowed as fact")

    def test_unknown_superiority_label(self):
        self.check_error("r1: => a. r1 > zz.", "unknown rule label")

    def test_chain_on_defeater(self):
        self.check_error("r1: ~O> a * b.", "chain heads are only allowed")
        self.check_error("r1: => a * b.", "chain heads are only allowed")

    def test_lexical_error(self):
        self.check_error("fact a$b.", "unexpected character")

    def test_duplicate_label(self):
        self.check_error("r1: => a. r1: => b.", "duplicate rule label")

    def test_missing_dot(self):
        self.check_error("fact a", "expected '.'")

    def test_never_raises_on_noise(self):
        noise = "@@@ fact . => ~O[ r1 r2 > . O[a & ] fact ~O[x]."
        result = parse_theory(noise)
        assert result.theory is None and result.errors()

    def test_spans_point_into_input(self):
        text = "fact a.\nr1: => b * c."
        result = parse_theory(text)
        for d in result.diagnostics:
            assert 1 <= d.span.line <= text.count("\n") + 1
            assert 0 <= d.span.start <= len(text)


class TestParseWarnings:
    def test_complementary_facts_warn(self):
        result = parse_theory("fact a. fact ~a.")
        assert result.theory is not None
        assert any("complementary pair" in d.message for d in result.warnings())

    def test_cyclic_superiority_warns(self):
        result = parse_theory("r1: => a. r2: => ~a. r1 > r2. r2 > r1.")
        assert result.theory is not None
        assert any("cyclic" in d.message for d in result.warnings())

    def test_degenerate_conjunction_collapses(self):
        result = parse_theory("r1: O[a & a] => b.")
        assert result.theory is not None
        assert any("collapses" in d.message for d in result.warnings())
        (r1,) = result.theory.rules
        assert r1.partition()[1] == {lit("a")}  # became a plain obligation atom

    def test_complementary_conjunction_warns(self):
        result = parse_theory("r1: O[a & ~a] => b.")
        assert result.theory is not None
        assert any("complementary pair" in d.message for d in result.warnings())


class TestRoundTrip:
    def test_two_chain_theory(self, two_chain_theory):
        text = serialize_theory(two_chain_theory)
        again = load_theory(text)
        assert again.same_theory(two_chain_theory)
        assert serialize_theory(again) == text

    def test_empty_theory_serializes_to_header(self):
        assert serialize_theory(load_theory("")).startswith("#")

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10_000))
    def test_random_theories_round_trip(self, seed):
        theory = random_theory(random.Random(seed), atoms=5, rules=6,
                               conjunctions=1, complement_free_facts=False)
        again = load_theory(serialize_theory(theory))
        assert again.same_theory(theory)

    def test_conjunction_emitted_in_canonical_order(self):
        t = load_theory("r1: O[c & b & a] => z.")
        assert "O[a & b & c]" in serialize_theory(t)


class TestEmitExtension:
    def test_empty(self):
        out = json.loads(emit_extension(Extension()))
        assert list(out) == ["factual_pos", "factual_neg", "obligation_pos",
                             "obligation_neg", "conj_pos", "conj_neg"]
        assert all(v == [] for v in out.values())

    def test_conjunction_rendering_and_sorting(self, conjunction_cascade_theory):
        session = Session(conjunction_cascade_theory)
        ext = session.extension
        verdict = session.evaluate_conjunction(Conjunction.of(["c", "d"]))
        assert verdict.refuted
        augmented = Extension(ext.factual_pos, ext.factual_neg,
                              ext.obligation_pos, ext.obligation_neg,
                              ext.conj_pos,
                              ext.conj_neg | {Conjunction.of(["c", "d"])})
        data = json.loads(emit_extension(augmented))
        assert data["obligation_pos"] == ["a", "b", "d"]
        assert "c & d" in data["conj_neg"]
        assert data["conj_pos"] == ["a & b"]
        for key, values in data.items():
            assert values == sorted(values)

    def test_deterministic_bytes(self, two_chain_theory):
        ext, _ = __import__("dedlog").compute_extension(two_chain_theory)
        ext2, _ = __import__("dedlog").compute_extension(two_chain_theory)
        for fmt in ("json", "text"):
            assert emit_extension(ext, fmt) == emit_extension(ext2, fmt)

    def test_text_format(self):
        out = emit_extension(Extension(factual_pos=frozenset({lit("a")})), "text")
        assert out.splitlines()[0] == "factual_pos: a"

    def test_injective_on_fixed_universe(self):
        e1 = Extension(factual_pos=frozenset({lit("a")}))
        e2 = Extension(factual_neg=frozenset({lit("a")}))
        assert emit_extension(e1) != emit_extension(e2)
