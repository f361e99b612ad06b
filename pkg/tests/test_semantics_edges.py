"""Corner theories where the fixpoint semantics and linear derivations part ways.

The engine's bottom-up fixpoint is the source of truth: a conjunction is
proven when every conjunct is provable and survives the removal of the other
conjuncts' violation support.  Linear derivations impose one extra, purely
sequential constraint (no violation may precede a conjunct's proof *in this
particular ordering*), and removal of a literal's support can flip other
conclusions when that literal's rules are entangled in conflicts.  Both
effects produce principled disagreements between "in the fixpoint" and
"derivable in some ordering".  These tests pin the engine's behaviour on the
smallest such theories, so any change to it is a deliberate decision rather
than an accident; the acceptance-level correspondence checks therefore
sample from composition of the standard scenario shapes, where the two views
provably agree.
"""

import pytest

from dedlog import (Conjunction, Session, WitnessSchedulingError,
                    check_derivation, independent, lit, load_theory, pd, pdo,
                    witness_derivation)
from reference import search_derivation


class TestSelfTriggeredConjuncts:
    """Each obligation fires off its own violation.  The two obligations are
    mutually independent (removing one's violation support leaves the other
    derivable), so the fixpoint proves the conjunction; but any single
    derivation must place one violation before the other conjunct's proof,
    so no ordering is accepted."""

    THEORY = """
        fact ~a. fact ~b.
        t1: ~a =O> a.
        t2: ~b =O> b.
    """

    def test_fixpoint_proves_the_conjunction(self):
        session = Session(load_theory(self.THEORY))
        assert session.query("obligation", True, lit("a"))
        assert session.query("obligation", True, lit("b"))
        assert session.evaluate_conjunction(Conjunction.of(["a", "b"])).proven

    def test_no_single_derivation_exists(self):
        theory = load_theory(self.THEORY)
        assert not search_derivation(theory, pdo("a & b"))

    def test_witness_synthesis_reports_the_gap(self):
        theory = load_theory(self.THEORY)
        session = Session(theory)
        with pytest.raises(WitnessSchedulingError):
            witness_derivation(theory, session.trace, pdo("a & b"),
                               session=session)

    def test_single_self_trigger_is_orderable(self):
        # With only one self-triggered conjunct the violation can be
        # scheduled after the other conjunct's proof.
        theory = load_theory("""
            fact ~a.
            t1: ~a =O> a.
            t2: =O> b.
        """)
        session = Session(theory)
        assert session.evaluate_conjunction(Conjunction.of(["a", "b"])).proven
        steps = witness_derivation(theory, session.trace, pdo("a & b"),
                                   session=session)
        assert check_derivation(theory, steps).accepted


class TestConflictEntangledRemoval:
    """Removing a literal's support can *strengthen* its complement: with the
    support gone, a previously deadlocked constitutive conflict resolves the
    other way, re-enabling an attacker.  The obligation is then not
    independent by the reduct test, although a derivation that never touches
    the removed literal exists."""

    THEORY = """
        s: => p.
        t: => ~p.
        u: ~p =O> ~q.
        v: =O> q.
        w: =O> ~p.
    """

    def test_baseline_conclusions(self):
        session = Session(load_theory(self.THEORY))
        ext = session.extension
        # The constitutive standoff refutes both sides of p, which discards
        # the attacker u and leaves both obligations derivable.
        assert lit("p") in ext.factual_neg and lit("~p") in ext.factual_neg
        assert lit("q") in ext.obligation_pos
        assert lit("~p") in ext.obligation_pos

    def test_reduct_independence_disagrees_with_derivability(self):
        theory = load_theory(self.THEORY)
        # Clean derivation: refute ~p from the standoff, discard u, prove q.
        assert search_derivation(theory, pdo("q"), forbid=frozenset({pd("p")}))
        # The reduct for {p} deletes s, the standoff resolves to ~p, and u
        # comes back to life: q is no longer provable there.
        assert not independent(theory, lit("q"), {lit("p")})

    def test_conjunction_verdict_follows_the_fixpoint(self):
        theory = load_theory(self.THEORY)
        session = Session(theory)
        verdict = session.evaluate_conjunction(Conjunction.of(["q", "~p"]))
        assert verdict.refuted and verdict.deciding == lit("q")
        # ... even though an ordering that proves it step by step exists.
        assert search_derivation(theory, pdo("q & ~p"))
