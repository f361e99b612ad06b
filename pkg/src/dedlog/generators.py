"""Seeded theory generators: benchmark families and random test theories.

Everything here is deterministic in the seed; generating the same family
spec twice yields byte-identical files.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

from .model import (Arrow, BodyAtom, Chain, Conjunction, Literal, Rule,
                    Theory, lit)

FAMILIES = ("chain-ctd", "conj-grid", "random")


@dataclass(frozen=True)
class FamilySpec:
    family: str
    n: int = 10       # atoms (random) or rule count (chain-ctd)
    r: int = 0        # extra rule budget where relevant
    m: int = 0        # number of conjunctive obligations
    k: int = 2        # conjuncts per conjunction
    seed: int = 0

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {FAMILIES}")
        if self.n <= 0 or self.k < 2 or self.m < 0:
            raise ValueError("family sizes must be positive (and k >= 2)")


def generate(spec: FamilySpec) -> Theory:
    if spec.family == "chain-ctd":
        return chain_ctd(spec.n)
    if spec.family == "conj-grid":
        return conj_grid(spec.m or 5, spec.k, base_rules=spec.r)
    rng = random.Random(spec.seed)
    return random_theory(rng, atoms=spec.n, rules=spec.r or spec.n,
                         conjunctions=spec.m, conjunct_width=spec.k)


def chain_ctd(n_rules: int) -> Theory:
    """A violation cascade: each obligation's trigger is the violation of the
    previous obligation, and each violation is itself derived in a chain.

    Rules alternate between a constitutive step deriving the next violation
    and the contrary-to-duty obligation it triggers, so the fixpoint needs a
    number of stages proportional to the rule count.
    """
    rules: list[Rule] = [
        Rule("o1", frozenset(), Arrow.DEFEASIBLE_PRESCRIPTIVE, Chain.of(["a1"]))]
    i = 1
    while len(rules) < n_rules:
        prev = f"a{i}"
        i += 1
        viol_body = frozenset() if i == 2 else frozenset(
            {BodyAtom.plain(lit(f"~a{i - 2}"))})
        rules.append(Rule(f"v{i - 1}", viol_body, Arrow.DEFEASIBLE_CONSTITUTIVE,
                          Chain.of([f"~{prev}"])))
        if len(rules) >= n_rules:
            break
        rules.append(Rule(f"o{i}", frozenset({BodyAtom.plain(lit(f"~{prev}"))}),
                          Arrow.DEFEASIBLE_PRESCRIPTIVE, Chain.of([f"a{i}"])))
    return Theory(frozenset(), tuple(rules), frozenset())


def conj_grid(m: int, k: int, base_rules: int = 0) -> Theory:
    """m conjunctive obligations of width k in rule bodies, each conjunct
    backed by its own prescriptive rule and its own violation supplier;
    optionally stacked on a chain-ctd base to measure the conjunction
    overhead against a fixed workload."""
    base = chain_ctd(base_rules) if base_rules else Theory(frozenset(), (), frozenset())
    rules = list(base.rules)
    for j in range(1, m + 1):
        conjuncts = [f"g{j}_{i}" for i in range(1, k + 1)]
        for name in conjuncts:
            rules.append(Rule(f"s_{name}", frozenset(),
                              Arrow.DEFEASIBLE_PRESCRIPTIVE, Chain.of([name])))
            rules.append(Rule(f"v_{name}", frozenset(),
                              Arrow.DEFEASIBLE_CONSTITUTIVE, Chain.of([f"~{name}"])))
        conj = Conjunction.of(conjuncts)
        rules.append(Rule(f"g{j}", frozenset({BodyAtom.conj_obl(conj)}),
                          Arrow.DEFEASIBLE_CONSTITUTIVE, Chain.of([f"z{j}"])))
    return Theory(base.facts, tuple(rules), base.superiority)


def random_theory(rng: random.Random, *, atoms: int = 4, rules: int = 6,
                  conjunctions: int = 0, conjunct_width: int = 2,
                  chains: bool = True, deontic_bodies: bool = True,
                  defeaters: bool = True, constitutive_conflicts: bool = True,
                  complement_free_facts: bool = True,
                  superiority_density: float = 0.4,
                  fact_density: float = 0.5) -> Theory:
    """A small random theory exercising the full rule vocabulary.

    With ``complement_free_facts`` and the (always acyclic) generated
    superiority relation, the result satisfies the consistency preconditions;
    switch the flag off to also cover inconsistent fact sets.
    """
    names = [chr(ord("a") + i) if i < 26 else f"p{i}" for i in range(atoms)]

    def random_literal() -> Literal:
        return Literal(rng.choice(names), rng.random() < 0.6)

    facts: set[Literal] = set()
    for name in names:
        if rng.random() < fact_density:
            positive = rng.random() < 0.5
            facts.add(Literal(name, positive))
            if not complement_free_facts and rng.random() < 0.15:
                facts.add(Literal(name, not positive))

    conj_pool: list[Conjunction] = []
    for _ in range(conjunctions):
        width = min(conjunct_width, atoms)
        picks = rng.sample(names, width)
        conj_pool.append(Conjunction.of(
            Literal(p, rng.random() < 0.7) for p in picks))

    out: list[Rule] = []
    constitutive_sign: dict[str, bool] = {}
    for i in range(rules):
        prescriptive = rng.random() < 0.55
        defeater = defeaters and rng.random() < 0.2
        if prescriptive:
            arrow = Arrow.DEFEATER_PRESCRIPTIVE if defeater else Arrow.DEFEASIBLE_PRESCRIPTIVE
        else:
            arrow = Arrow.DEFEATER_CONSTITUTIVE if defeater else Arrow.DEFEASIBLE_CONSTITUTIVE
        if arrow is Arrow.DEFEASIBLE_PRESCRIPTIVE and chains and rng.random() < 0.3:
            head = Chain.of([random_literal() for _ in range(rng.randint(2, 3))])
        else:
            head_lit = random_literal()
            if not prescriptive and not constitutive_conflicts:
                sign = constitutive_sign.setdefault(head_lit.atom,
                                                    head_lit.positive)
                head_lit = Literal(head_lit.atom, sign)
            head = Chain.single(head_lit)
        body: set[BodyAtom] = set()
        for _ in range(rng.randint(0, 2)):
            roll = rng.random()
            if deontic_bodies and roll < 0.2:
                body.add(BodyAtom.obl(random_literal()))
            elif deontic_bodies and roll < 0.3:
                body.add(BodyAtom.neg_obl(random_literal()))
            elif conj_pool and roll < 0.45:
                body.add(BodyAtom.conj_obl(rng.choice(conj_pool)))
            else:
                body.add(BodyAtom.plain(random_literal()))
        out.append(Rule(f"r{i + 1}", frozenset(body), arrow, head))

    superiority: set[tuple[str, str]] = set()
    for i, a in enumerate(out):
        for b in out[i + 1:]:
            if a.prescriptive != b.prescriptive:
                continue
            heads_a = set(a.head.elements)
            heads_b = {e.complement() for e in b.head.elements}
            if heads_a & heads_b and rng.random() < superiority_density:
                # Earlier label wins; the index ordering keeps the closure acyclic.
                superiority.add((a.label, b.label))
    return Theory(frozenset(facts), tuple(out), frozenset(superiority))


# ---------------------------------------------------------------------------
# Scenario-shaped sampler
# ---------------------------------------------------------------------------

def scenario_theory(rng: random.Random, blocks: int = 3) -> tuple[Theory, list[Conjunction]]:
    """Compose a theory out of the standard contrary-to-duty building blocks
    (primary norms, CTD pairs, compensation chains, exceptions, intermediate
    concepts, negative support) over mostly disjoint atom groups.

    Returns the theory plus a list of conjunction targets worth querying:
    pairs of obligations drawn from the same or neighbouring blocks.
    """
    rules: list[Rule] = []
    facts: set[Literal] = set()
    superiority: set[tuple[str, str]] = set()
    obligations: list[Literal] = []
    counter = 0

    def fresh(prefix: str) -> str:
        nonlocal counter
        counter += 1
        return f"{prefix}{counter}"

    def add_rule(body, arrow, head) -> Rule:
        r = Rule(f"r{len(rules) + 1}", frozenset(body), arrow, Chain.of(head))
        rules.append(r)
        return r

    for _ in range(blocks):
        kind = rng.choice(("primary", "ctd", "chain", "exception",
                           "intermediate", "negative-support"))
        a, b, c = (lit(fresh("x")) for _ in range(3))
        if kind == "primary":
            add_rule([], Arrow.DEFEASIBLE_PRESCRIPTIVE, [a])
            obligations.append(a)
            if rng.random() < 0.6:
                facts.add(a.complement())
        elif kind == "ctd":
            add_rule([], Arrow.DEFEASIBLE_PRESCRIPTIVE, [a])
            add_rule([BodyAtom.plain(a.complement())],
                     Arrow.DEFEASIBLE_PRESCRIPTIVE, [b])
            obligations += [a, b]
            if rng.random() < 0.8:
                facts.add(a.complement())
        elif kind == "chain":
            add_rule([], Arrow.DEFEASIBLE_PRESCRIPTIVE, [a, b])
            obligations += [a, b]
            if rng.random() < 0.8:
                facts.add(a.complement())
        elif kind == "exception":
            r1 = add_rule([], Arrow.DEFEASIBLE_PRESCRIPTIVE, [a])
            trigger = lit(fresh("e"))
            arrow = (Arrow.DEFEATER_PRESCRIPTIVE if rng.random() < 0.5
                     else Arrow.DEFEASIBLE_PRESCRIPTIVE)
            r2 = add_rule([BodyAtom.plain(trigger)], arrow, [a.complement()])
            obligations.append(a)
            if rng.random() < 0.5:
                facts.add(trigger)
                superiority.add((r1.label, r2.label))
        elif kind == "intermediate":
            add_rule([], Arrow.DEFEASIBLE_PRESCRIPTIVE, [a])
            add_rule([BodyAtom.plain(a.complement())],
                     Arrow.DEFEASIBLE_CONSTITUTIVE, [b])
            add_rule([BodyAtom.plain(b)], Arrow.DEFEASIBLE_PRESCRIPTIVE, [c])
            obligations += [a, c]
            if rng.random() < 0.8:
                facts.add(a.complement())
        else:  # negative-support
            add_rule([], Arrow.DEFEASIBLE_PRESCRIPTIVE, [a])
            add_rule([], Arrow.DEFEASIBLE_PRESCRIPTIVE, [b])
            trigger = lit(fresh("e"))
            add_rule([BodyAtom.plain(trigger)], Arrow.DEFEASIBLE_PRESCRIPTIVE,
                     [b.complement()])
            add_rule([BodyAtom.plain(a.complement())],
                     Arrow.DEFEATER_CONSTITUTIVE, [trigger.complement()])
            add_rule([], Arrow.DEFEASIBLE_CONSTITUTIVE, [trigger])
            obligations += [a, b]
            if rng.random() < 0.8:
                facts.add(a.complement())

    targets: list[Conjunction] = []
    pool = [o for o in obligations]
    rng.shuffle(pool)
    for i in range(0, len(pool) - 1, 2):
        if pool[i].atom != pool[i + 1].atom:
            targets.append(Conjunction.of([pool[i], pool[i + 1]]))
    theory = Theory(frozenset(facts), tuple(rules), frozenset(superiority))
    return theory, targets
