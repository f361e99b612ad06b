"""Reducts: removing the support of chosen literals from a theory.

The reduct of a theory based on a literal set L deletes the facts in L and
every defeasible constitutive rule whose head is in L.  Those are exactly
the ways an institutional statement can be established, so each l in L is
defeasibly refuted in the reduct.  Rules merely *mentioning* L-literals in
bodies or inside prescriptive heads stay put: they are discarded or blocked
by the ordinary applicability conditions, and removing them would change
conclusions unrelated to the derivability of L itself.

Reducts drive the independence test behind conjunctive obligations: an
obligation counts as independent of a violation set when it survives the
removal of that set's support.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .model import Conjunction, Literal, Theory


@dataclass(frozen=True)
class ConjunctRecord:
    """Why one conjunct did or did not support its conjunction."""

    conjunct: Literal
    clause: str  # refuted-obligation | dependent | unsettled | independent
    detail: str


@dataclass(frozen=True)
class EvaluationVerdict:
    """Outcome of evaluating a conjunctive obligation at a fixpoint.

    ``deciding`` names the first conjunct that settled a refutation.  An
    undecided verdict means some conjunct is neither provable nor refutable
    (only possible with support loops in the theory).
    """

    verdict: str  # "proven" | "refuted" | "undecided"
    records: tuple[ConjunctRecord, ...]
    deciding: Optional[Literal]

    @property
    def proven(self) -> bool:
        return self.verdict == "proven"

    @property
    def refuted(self) -> bool:
        return self.verdict == "refuted"


@dataclass(frozen=True)
class ReductKey:
    """Memo key for reduct extensions: base theory identity + removed set."""

    base: tuple
    removed: frozenset[Literal]

    @classmethod
    def of(cls, theory: Theory, removed: Iterable[Literal]) -> "ReductKey":
        return cls(theory.fingerprint, frozenset(removed))


def reduct(theory: Theory, removed: Iterable[Literal]) -> Theory:
    """The sub-theory with the support of ``removed`` deleted.

    ``removed`` must contain plain literals only (which is all the facts
    can hold anyway).  Superiority pairs touching deleted rules are dropped
    so the result validates on its own.
    """
    removed = frozenset(removed)
    if not removed:
        return theory
    facts = theory.facts - removed
    rules = tuple(
        r for r in theory.rules
        if not (r.defeasible and not r.prescriptive and r.head.at(1) in removed)
    )
    kept = {r.label for r in rules}
    superiority = frozenset(
        (a, b) for a, b in theory.superiority if a in kept and b in kept)
    return Theory(facts, rules, superiority)


def reduct_refutes(theory: Theory, removed: Iterable[Literal]) -> bool:
    """Sanity check: every removed literal is defeasibly refuted in the reduct.

    True by construction (a removed literal keeps no fact and no defeasible
    constitutive rule, and may drop out of the reduct's language entirely);
    kept as an executable assertion over the engine.
    """
    from . import engine

    removed = frozenset(removed)
    session = engine.Session(reduct(theory, removed))
    return all(session.query("factual", False, l) for l in removed)


def independent(theory: Theory, m: Literal, removed: Iterable[Literal],
                session: Optional["engine.Session"] = None) -> bool:
    """Is obligation ``m`` derivable both as-is and with ``removed`` unsupported?"""
    from . import engine

    session = session or engine.Session(theory)
    if m not in session.extension.obligation_pos:
        return False
    sub_ext = session.reduct_extension(frozenset(removed))
    return m in sub_ext.obligation_pos


def evaluate_conjunction(theory: Theory, extension, conjunction: Conjunction,
                         session: Optional["engine.Session"] = None):
    """Evaluate a conjunctive obligation against a computed fixpoint.

    Works for any conjunction over the theory's language, not just the ones
    occurring in rule bodies; see :meth:`engine.Session.evaluate_conjunction`.
    """
    from . import engine

    session = session or engine.Session(theory)
    return session.evaluate_conjunction(conjunction)
