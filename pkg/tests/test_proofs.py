"""Derivation checking and witness synthesis."""

import random

import pytest

from dedlog import (Conjunction, Session, check_derivation, check_step,
                    compute_extension, format_derivation, lit, load_theory,
                    nd, ndo, no_conflict, parse_derivation, pd, pdo,
                    witness_derivation, GoalNotProvenError,
                    DerivationSyntaxError)
from reference import search_derivation


class TestCheckStep:
    def test_fact_step(self, two_chain_theory):
        rep = check_step(two_chain_theory, [], pd("f1"))
        assert rep.justified and rep.clause == "+d (1)"

    def test_violated_step_names_clause(self, two_chain_theory):
        rep = check_step(two_chain_theory, [], pdo("b"))
        assert not rep.justified and rep.clause == "+dO (1)"

    def test_conjunction_order_sensitivity(self, scenario):
        t = scenario("pragmatic-unpragmatic")
        dirty = [pdo("a"), pd("~a"), pdo("b")]
        rep = check_step(t, dirty, pdo("a & b"))
        assert not rep.justified and rep.clause == "+dO& (2)"
        clean = [pdo("a"), pdo("b"), pd("~a")]
        rep = check_step(t, clean, pdo("a & b"))
        assert rep.justified

    def test_conjunct_missing(self, scenario):
        t = scenario("pragmatic-unpragmatic")
        rep = check_step(t, [pdo("a")], pdo("a & b"))
        assert not rep.justified and rep.clause == "+dO& (1)"

    def test_negative_conjunction_requires_actual_occurrence(self, scenario):
        # Clause (2) needs the conjunct's proof to occur with a violation
        # before it; an empty prefix must not refute anything.
        t = scenario("pragmatic-unpragmatic")
        assert not check_step(t, [], ndo("a & b")).justified
        prefix = [pd("~a"), pdo("a"), pdo("b")]
        rep = check_step(t, prefix, ndo("a & b"))
        assert rep.justified and rep.clause == "-dO& (2)"


class TestCheckDerivation:
    def test_two_chain_ten_steps(self, two_chain_theory):
        steps = [pd("f1"), pd("f2"), pd("g2"), pd("f3"), pd("f7"),
                 pd("d"), ndo("a"), pdo("b"), pd("~b"), pdo("c")]
        report = check_derivation(two_chain_theory, steps)
        assert report.accepted
        assert no_conflict(two_chain_theory, steps)

    def test_unpragmatic_orderings(self, scenario):
        t = scenario("pragmatic-unpragmatic")
        accepted = check_derivation(t, [pdo("a"), pdo("b"), pd("~a"),
                                        pdo("a & b")])
        assert accepted.accepted
        rejected = check_derivation(t, [pd("~a"), pdo("a"), pdo("b"),
                                        pdo("a & b")])
        assert not rejected.accepted
        assert rejected.steps[-1].clause == "+dO& (2)"

    def test_stops_at_first_violation(self, two_chain_theory):
        report = check_derivation(two_chain_theory, [pd("f1"), pdo("c"), pd("f2")])
        assert not report.accepted and len(report.steps) == 2

    def test_empty_derivation_accepted(self, two_chain_theory):
        assert check_derivation(two_chain_theory, []).accepted

    def test_prefix_monotonicity(self, two_chain_theory):
        steps = [pd("f1"), pd("f2"), pd("g2"), pd("f3"), pd("f7"),
                 pd("d"), ndo("a"), pdo("b"), pd("~b"), pdo("c")]
        for cut in range(len(steps) + 1):
            assert check_derivation(two_chain_theory, steps[:cut]).accepted

    def test_multiple_dependencies_paper_order(self, scenario):
        t = scenario("multiple-dependencies")
        steps = [pd("~a"), pdo("a"), pdo("b"), pdo("c"),
                 ndo("a & b & c"), pd("~b"), pdo("b & c"), ndo("a & c")]
        report = check_derivation(t, steps)
        assert report.accepted
        assert no_conflict(t, steps)


class TestNoConflict:
    def test_flags_contradictory_sequences(self, two_chain_theory):
        assert not no_conflict(two_chain_theory, [pdo("q"), ndo("q")])
        assert no_conflict(two_chain_theory, [pdo("q"), ndo("~q")])

    def test_accepted_random_closures_are_conflict_free(self):
        from dedlog.generators import random_theory
        from dedlog import DependencyCycleError, justify
        from dedlog.proofs import Prefix, TaggedExpression
        rng = random.Random(3)
        for _ in range(20):
            theory = random_theory(rng, atoms=4, rules=5)
            try:
                ext, trace = compute_extension(theory)
            except DependencyCycleError:
                continue
            # Greedily build an accepted derivation from the fixpoint in
            # stage order; the checker accepts each step, and no target may
            # ever appear with both signs.
            pool = []
            for (kind, sign, target), stage in sorted(
                    trace.stage_of().items(), key=lambda kv: (kv[1], str(kv[0]))):
                deontic = kind != "factual"
                pool.append(TaggedExpression(sign, deontic, target))
            prefix = Prefix()
            for expr in pool:
                if justify(theory, prefix, expr).ok:
                    prefix.append(expr)
            assert no_conflict(theory, prefix.steps)


class TestWitness:
    def roundtrip(self, theory, goal, session=None):
        session = session or Session(theory)
        steps = witness_derivation(theory, session.trace, goal, session=session)
        report = check_derivation(theory, steps)
        assert report.accepted, report.render()
        assert steps[-1] == goal
        return steps

    def test_fact_goal(self, two_chain_theory):
        assert self.roundtrip(two_chain_theory, pd("f1")) == [pd("f1")]

    def test_literal_goals(self, two_chain_theory):
        for goal in (pd("d"), pd("~b"), pdo("b"), pdo("c"), ndo("a")):
            self.roundtrip(two_chain_theory, goal)

    def test_conjunction_goal_orders_around_violation(self, scenario):
        t = scenario("pragmatic-unpragmatic")
        steps = self.roundtrip(t, pdo("a & b"))
        positions = {str(s): i for i, s in enumerate(steps)}
        if "+d ~a" in positions:
            assert positions["+d ~a"] > positions["+dO b"]

    def test_cascade_conjunctions(self, conjunction_cascade_theory):
        s = Session(conjunction_cascade_theory)
        for target in ("a & b", "a & d", "b & d", "a & b & d"):
            self.roundtrip(conjunction_cascade_theory, pdo(target), session=s)

    def test_iterated_nested_conjunction(self, scenario):
        t = scenario("iterated")
        s = Session(t)
        steps = self.roundtrip(t, pd("e"), session=s)
        assert pdo("c & d") in steps and pdo("a & b") in steps

    def test_multiple_dependencies_goals(self, scenario):
        t = scenario("multiple-dependencies")
        s = Session(t)
        got = self.roundtrip(t, pdo("b & c"), session=s)
        # b's and c's proofs precede any use of ~b.
        first_bc = min(i for i, x in enumerate(got) if x in (pdo("b"), pdo("c")))
        assert pd("~b") not in got[:first_bc]
        self.roundtrip(t, pdo("a & c"), session=s)

    def test_unprovable_goal_raises(self, two_chain_theory):
        with pytest.raises(GoalNotProvenError):
            witness_derivation(two_chain_theory, Session(two_chain_theory).trace,
                               pdo("a"))

    def test_matches_exhaustive_search_on_scenarios(self, scenario):
        for name, target, expected in (
                ("compensatory", "a & b", False),
                ("pragmatic-unpragmatic", "a & b", True),
                ("multiple-conjuncts", "a & b", True),
                ("multiple-conjuncts", "a & c", False)):
            t = scenario(name)
            assert search_derivation(t, pdo(target)) is expected, (name, target)


class TestDerivationFiles:
    def test_round_trip(self):
        steps = [pd("f1"), nd("~x"), pdo("a"), ndo("a & b")]
        text = format_derivation(steps)
        assert parse_derivation(text) == steps

    def test_parse_with_comments(self):
        text = "+d a  # a fact\n\n-dO b & c\n"
        steps = parse_derivation(text)
        assert steps == [pd("a"), ndo("b & c")]

    def test_malformed_lines(self):
        for bad in ("?d a", "+d", "+x a", "+d a &", "+d a & b"):
            with pytest.raises(DerivationSyntaxError):
                parse_derivation(bad)
