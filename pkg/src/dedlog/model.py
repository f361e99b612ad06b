"""Core data model: literals, compensation chains, rules and theories.

A theory is a triple (facts, rules, superiority).  Rules come in four
flavours along two axes: defeasible vs. defeater, and constitutive
(concluding plain literals) vs. prescriptive (concluding obligations).
Prescriptive defeasible rules may carry a compensation chain
``c1 * c2 * ... * cn`` as head: each element becomes obligatory once the
previous one is obligatory and violated.

All values here are immutable after construction and safe to share.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Optional, Union


class TheoryError(ValueError):
    """Raised when a theory or one of its parts is structurally invalid."""


# ---------------------------------------------------------------------------
# Literals and body atoms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Literal:
    """A signed propositional atom."""

    atom: str
    positive: bool = True

    def complement(self) -> "Literal":
        return Literal(self.atom, not self.positive)

    def key(self) -> tuple:
        """Canonical sort key: atom name first, positive before negative."""
        return (self.atom, 0 if self.positive else 1)

    def __str__(self) -> str:
        return self.atom if self.positive else "~" + self.atom

    def __repr__(self) -> str:
        return f"Literal({str(self)!r})"


def lit(text: str) -> Literal:
    """Shorthand constructor: ``lit("~a")`` is the negation of atom ``a``."""
    text = text.strip()
    if text.startswith("~"):
        return Literal(text[1:].strip(), False)
    return Literal(text, True)


@dataclass(frozen=True)
class Conjunction:
    """A conjunction of two or more distinct literals, kept in canonical order.

    Construction canonicalises: conjuncts are deduplicated and sorted by
    (atom, sign), so two conjunctions over the same literal set compare equal.
    """

    conjuncts: tuple[Literal, ...]

    def __post_init__(self) -> None:
        canon = tuple(sorted(set(self.conjuncts), key=Literal.key))
        if len(canon) < 2:
            raise TheoryError(
                f"conjunction needs at least two distinct literals, got {self.conjuncts!r}"
            )
        object.__setattr__(self, "conjuncts", canon)

    @classmethod
    def of(cls, items: Iterable[Union[Literal, str]]) -> "Conjunction":
        return cls(tuple(x if isinstance(x, Literal) else lit(x) for x in items))

    def complements(self) -> frozenset[Literal]:
        """The set of violation literals: one complement per conjunct."""
        return frozenset(c.complement() for c in self.conjuncts)

    def has_complementary_pair(self) -> bool:
        seen = set(self.conjuncts)
        return any(c.complement() in seen for c in self.conjuncts)

    def __iter__(self) -> Iterator[Literal]:
        return iter(self.conjuncts)

    def __len__(self) -> int:
        return len(self.conjuncts)

    def __str__(self) -> str:
        return " & ".join(str(c) for c in self.conjuncts)

    def __repr__(self) -> str:
        return f"Conjunction({str(self)!r})"


class BodyKind(enum.Enum):
    PLAIN = "plain"
    OBL = "obl"
    NEG_OBL = "neg_obl"
    CONJ_OBL = "conj_obl"


@dataclass(frozen=True)
class BodyAtom:
    """One antecedent element: a plain literal, O[l], -O[l], or O[c1 & ... & cn]."""

    kind: BodyKind
    literal: Optional[Literal] = None
    conjunction: Optional[Conjunction] = None

    def __post_init__(self) -> None:
        if self.kind is BodyKind.CONJ_OBL:
            if self.conjunction is None or self.literal is not None:
                raise TheoryError("conjunctive body atom needs a conjunction payload")
        else:
            if self.literal is None or self.conjunction is not None:
                raise TheoryError(f"{self.kind.value} body atom needs a literal payload")

    @classmethod
    def plain(cls, l: Literal) -> "BodyAtom":
        return cls(BodyKind.PLAIN, literal=l)

    @classmethod
    def obl(cls, l: Literal) -> "BodyAtom":
        return cls(BodyKind.OBL, literal=l)

    @classmethod
    def neg_obl(cls, l: Literal) -> "BodyAtom":
        return cls(BodyKind.NEG_OBL, literal=l)

    @classmethod
    def conj_obl(cls, c: Conjunction) -> "BodyAtom":
        return cls(BodyKind.CONJ_OBL, conjunction=c)

    def key(self) -> tuple:
        if self.kind is BodyKind.CONJ_OBL:
            return (self.kind.value, tuple(l.key() for l in self.conjunction))
        return (self.kind.value, self.literal.key())

    def __str__(self) -> str:
        if self.kind is BodyKind.PLAIN:
            return str(self.literal)
        if self.kind is BodyKind.OBL:
            return f"O[{self.literal}]"
        if self.kind is BodyKind.NEG_OBL:
            return f"-O[{self.literal}]"
        return f"O[{self.conjunction}]"


# ---------------------------------------------------------------------------
# Chains and rules
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Chain:
    """A nonempty compensation chain; a single literal is a chain of length 1.

    Positions are 1-based throughout, matching the convention that the index
    of an element is the length of the prefix ending at it.  Duplicate
    literals are allowed and handled positionally by the applicability tests.
    """

    elements: tuple[Literal, ...]

    def __post_init__(self) -> None:
        if not self.elements:
            raise TheoryError("a chain must contain at least one literal")

    @classmethod
    def of(cls, items: Iterable[Union[Literal, str]]) -> "Chain":
        return cls(tuple(x if isinstance(x, Literal) else lit(x) for x in items))

    @classmethod
    def single(cls, l: Literal) -> "Chain":
        return cls((l,))

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[Literal]:
        return iter(self.elements)

    def at(self, index: int) -> Literal:
        """The element at 1-based position ``index``."""
        if not 1 <= index <= len(self.elements):
            raise IndexError(f"chain index {index} out of range 1..{len(self.elements)}")
        return self.elements[index - 1]

    def indexes_of(self, q: Literal) -> tuple[int, ...]:
        return tuple(i + 1 for i, e in enumerate(self.elements) if e == q)

    def __str__(self) -> str:
        return " * ".join(str(e) for e in self.elements)


class Arrow(enum.Enum):
    """Rule type: strength (defeasible / defeater) x mode (constitutive / prescriptive)."""

    DEFEASIBLE_CONSTITUTIVE = "=>"
    DEFEATER_CONSTITUTIVE = "~>"
    DEFEASIBLE_PRESCRIPTIVE = "=O>"
    DEFEATER_PRESCRIPTIVE = "~O>"

    @property
    def prescriptive(self) -> bool:
        return self in (Arrow.DEFEASIBLE_PRESCRIPTIVE, Arrow.DEFEATER_PRESCRIPTIVE)

    @property
    def defeasible(self) -> bool:
        return self in (Arrow.DEFEASIBLE_CONSTITUTIVE, Arrow.DEFEASIBLE_PRESCRIPTIVE)


@dataclass(frozen=True)
class Rule:
    """A labelled rule ``label: body arrow head``.

    Only prescriptive defeasible rules may carry a multi-element chain head;
    defeaters and constitutive rules conclude a single literal.
    """

    label: str
    body: frozenset[BodyAtom]
    arrow: Arrow
    head: Chain

    def __post_init__(self) -> None:
        if len(self.head) > 1 and self.arrow is not Arrow.DEFEASIBLE_PRESCRIPTIVE:
            raise TheoryError(
                f"rule {self.label}: chain heads are restricted to prescriptive "
                f"defeasible rules, not {self.arrow.value}"
            )

    @property
    def prescriptive(self) -> bool:
        return self.arrow.prescriptive

    @property
    def defeasible(self) -> bool:
        return self.arrow.defeasible

    def partition(self) -> tuple[frozenset[Literal], frozenset[Literal],
                                 frozenset[Literal], frozenset[Conjunction]]:
        """Split the antecedent into (plain, obligation, negated-obligation,
        conjunction) parts."""
        plain, obl, neg_obl, conj = set(), set(), set(), set()
        for a in self.body:
            if a.kind is BodyKind.PLAIN:
                plain.add(a.literal)
            elif a.kind is BodyKind.OBL:
                obl.add(a.literal)
            elif a.kind is BodyKind.NEG_OBL:
                neg_obl.add(a.literal)
            else:
                conj.add(a.conjunction)
        return frozenset(plain), frozenset(obl), frozenset(neg_obl), frozenset(conj)

    def body_key(self) -> tuple:
        return tuple(sorted(a.key() for a in self.body))

    def __str__(self) -> str:
        body = ", ".join(str(a) for a in sorted(self.body, key=BodyAtom.key))
        sep = " " if body else ""
        return f"{self.label}: {body}{sep}{self.arrow.value} {self.head}"


def antecedent_partition(rule: Rule):
    """Module-level alias for :meth:`Rule.partition`."""
    return rule.partition()


def complement(l: Literal) -> Literal:
    return l.complement()


# ---------------------------------------------------------------------------
# Theories and occurrence indexes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OccurrenceIndex:
    """Occurrence maps from literals/conjunctions to the rules mentioning them.

    Head maps carry (rule, 1-based position) pairs and are split by mode,
    since institutional and deontic conclusions never share proof clauses.
    Body maps are keyed by the embedded literal (or conjunction) and record
    which rules the membership change can affect.
    """

    heads_constitutive: dict[Literal, tuple[tuple[Rule, int], ...]]
    heads_prescriptive: dict[Literal, tuple[tuple[Rule, int], ...]]
    body_plain: dict[Literal, tuple[Rule, ...]]
    body_obl: dict[Literal, tuple[Rule, ...]]
    body_neg_obl: dict[Literal, tuple[Rule, ...]]
    body_conj: dict[Conjunction, tuple[Rule, ...]]
    chain_members: dict[Literal, tuple[tuple[Rule, int], ...]]

    @classmethod
    def build(cls, rules: Iterable[Rule]) -> "OccurrenceIndex":
        heads_c: dict[Literal, list] = {}
        heads_o: dict[Literal, list] = {}
        b_plain: dict[Literal, list] = {}
        b_obl: dict[Literal, list] = {}
        b_neg: dict[Literal, list] = {}
        b_conj: dict[Conjunction, list] = {}
        members: dict[Literal, list] = {}
        for r in rules:
            heads = heads_o if r.prescriptive else heads_c
            for i, e in enumerate(r.head, start=1):
                heads.setdefault(e, []).append((r, i))
                members.setdefault(e, []).append((r, i))
            for a in r.body:
                if a.kind is BodyKind.PLAIN:
                    b_plain.setdefault(a.literal, []).append(r)
                elif a.kind is BodyKind.OBL:
                    b_obl.setdefault(a.literal, []).append(r)
                elif a.kind is BodyKind.NEG_OBL:
                    b_neg.setdefault(a.literal, []).append(r)
                else:
                    b_conj.setdefault(a.conjunction, []).append(r)
        freeze = lambda d: {k: tuple(v) for k, v in d.items()}
        return cls(freeze(heads_c), freeze(heads_o), freeze(b_plain),
                   freeze(b_obl), freeze(b_neg), freeze(b_conj), freeze(members))


@dataclass(frozen=True)
class Theory:
    """An immutable defeasible theory: facts, rules and a superiority relation.

    Facts are plain literals only.  Rule labels are unique and the
    superiority relation is stored label-to-label.  Structural problems
    raise :class:`TheoryError` at construction; soft problems (complementary
    facts, cyclic superiority, degenerate conjunctions) are reported by
    :meth:`warnings`.
    """

    facts: frozenset[Literal]
    rules: tuple[Rule, ...]
    superiority: frozenset[tuple[str, str]] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        labels = [r.label for r in self.rules]
        if len(labels) != len(set(labels)):
            dupes = sorted({l for l in labels if labels.count(l) > 1})
            raise TheoryError(f"duplicate rule labels: {', '.join(dupes)}")
        known = set(labels)
        for a, b in self.superiority:
            if a not in known or b not in known:
                missing = a if a not in known else b
                raise TheoryError(f"superiority refers to unknown rule label {missing!r}")

    # -- indexed access ----------------------------------------------------

    @cached_property
    def index(self) -> OccurrenceIndex:
        return OccurrenceIndex.build(self.rules)

    @cached_property
    def rules_by_label(self) -> dict[str, Rule]:
        return {r.label: r for r in self.rules}

    @cached_property
    def _superiority_set(self) -> frozenset[tuple[str, str]]:
        return self.superiority

    def stronger(self, t: Rule, s: Rule) -> bool:
        """True when t > s is declared."""
        return (t.label, s.label) in self._superiority_set

    def head_occurrences(self, q: Literal, *, prescriptive: bool) -> tuple[tuple[Rule, int], ...]:
        table = (self.index.heads_prescriptive if prescriptive
                 else self.index.heads_constitutive)
        return table.get(q, ())

    def rules_for(self, q: Literal, n: Optional[int] = None,
                  mode: str = "any", strength: str = "any") -> set[Rule]:
        """Rules whose head contains ``q`` (at position ``n`` if given).

        ``mode`` is one of ``any``/``prescriptive``/``constitutive`` and
        ``strength`` one of ``any``/``defeasible``.
        """
        if mode not in ("any", "prescriptive", "constitutive"):
            raise ValueError(f"unknown mode filter {mode!r}")
        if strength not in ("any", "defeasible"):
            raise ValueError(f"unknown strength filter {strength!r}")
        pools = []
        if mode in ("any", "constitutive"):
            pools.append(self.index.heads_constitutive.get(q, ()))
        if mode in ("any", "prescriptive"):
            pools.append(self.index.heads_prescriptive.get(q, ()))
        out = set()
        for pool in pools:
            for rule, i in pool:
                if n is not None and i != n:
                    continue
                if strength == "defeasible" and not rule.defeasible:
                    continue
                out.add(rule)
        return out

    # -- validation --------------------------------------------------------

    def warnings(self) -> list[str]:
        out = []
        for f in sorted(self.facts, key=Literal.key):
            if not f.positive and f.complement() in self.facts:
                out.append(f"facts contain the complementary pair {f.complement()} / {f}")
        if self._superiority_cyclic():
            out.append("transitive closure of the superiority relation is cyclic")
        seen: set[Conjunction] = set()
        for r in self.rules:
            for c in r.partition()[3]:
                if c not in seen and c.has_complementary_pair():
                    seen.add(c)
                    out.append(f"conjunction {c} contains a complementary pair")
        return out

    def _superiority_cyclic(self) -> bool:
        graph: dict[str, set[str]] = {}
        for a, b in self.superiority:
            graph.setdefault(a, set()).add(b)
        state: dict[str, int] = {}

        def visit(node: str) -> bool:
            state[node] = 1
            for nxt in graph.get(node, ()):
                mark = state.get(nxt)
                if mark == 1:
                    return True
                if mark is None and visit(nxt):
                    return True
            state[node] = 2
            return False

        return any(state.get(n) is None and visit(n) for n in graph)

    # -- identity ----------------------------------------------------------

    @cached_property
    def fingerprint(self) -> tuple:
        """Canonical structural identity, independent of declaration order."""
        facts = tuple(sorted(l.key() for l in self.facts))
        rules = tuple(sorted(
            (r.label, r.arrow.value, r.body_key(), tuple(e.key() for e in r.head))
            for r in self.rules))
        sup = tuple(sorted(self.superiority))
        return (facts, rules, sup)

    def same_theory(self, other: "Theory") -> bool:
        return self.fingerprint == other.fingerprint

    def size(self) -> int:
        return len(self.facts) + len(self.rules)

    def __str__(self) -> str:
        parts = [f"fact {f}." for f in sorted(self.facts, key=Literal.key)]
        parts += [f"{r}." for r in self.rules]
        parts += [f"{a} > {b}." for a, b in sorted(self.superiority)]
        return "\n".join(parts)


def rules_for(theory: Theory, q: Literal, n: Optional[int] = None,
              mode: str = "any", strength: str = "any") -> set[Rule]:
    """Module-level alias for :meth:`Theory.rules_for`."""
    return theory.rules_for(q, n, mode, strength)
