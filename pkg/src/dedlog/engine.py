"""Bottom-up computation of theory extensions.

The extension of a theory is a six-set fixpoint: defeasibly provable and
refutable plain literals (institutional statements), provable and refutable
obligations, and provable and refutable conjunctive obligations.  It is
built in stages: stage 0 holds the facts, and each later stage adds every
conclusion whose support condition holds in the previous stage.  All
conditions are monotone in the six sets, so the construction climbs to a
unique least fixpoint; the engine tracks only the literals and rules a new
conclusion can affect, which keeps each stage proportional to the change.

Conjunctive obligations are the delicate part.  A conjunction c1 & ... & cm
is provable when every conjunct is provable as an obligation both in the
theory itself and in the reduct that drops the support of the *other*
conjuncts' violations; it is refutable when some conjunct is refuted as an
obligation or fails in its reduct.  Reduct extensions are full recursive
computations, memoized by structural theory identity.  When a reduct equals
the theory itself the recursion would never bottom out, so the engine
resolves those tests in place: the positive test collapses to current-stage
membership (sound by monotonicity), while the negative test ("the conjunct
is *not* provable") is deferred until every other source of conclusions has
stabilised.  A deferred verdict whose premise is later contradicted means
the conjunction feeds its own conjuncts through the rules; that situation
has no well-defined answer and raises :class:`DependencyCycleError`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Union

from .model import Conjunction, Literal, Rule, Theory
from .reduct import ConjunctRecord, EvaluationVerdict, reduct

Target = Union[Literal, Conjunction]
# Conclusion keys: (kind, sign, target) with kind in {"factual", "obligation", "conj"}.
Key = tuple[str, bool, Target]


class DependencyCycleError(RuntimeError):
    """A conjunction's verdict feeds back into its own conjuncts' provability."""

    def __init__(self, conjunction: Conjunction, conjunct: Literal):
        self.conjunction = conjunction
        self.conjunct = conjunct
        super().__init__(
            f"evaluating {conjunction} requires its own verdict: the refutation "
            f"premise for conjunct {conjunct} was invalidated by later conclusions")


class EngineInvariantError(RuntimeError):
    """Internal coherence violation; indicates an engine bug, not bad input."""


# ---------------------------------------------------------------------------
# Extensions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Extension:
    """The six conclusion sets of a theory (or of one construction stage)."""

    factual_pos: frozenset[Literal] = frozenset()
    factual_neg: frozenset[Literal] = frozenset()
    obligation_pos: frozenset[Literal] = frozenset()
    obligation_neg: frozenset[Literal] = frozenset()
    conj_pos: frozenset[Conjunction] = frozenset()
    conj_neg: frozenset[Conjunction] = frozenset()

    _FIELDS = ("factual_pos", "factual_neg", "obligation_pos",
               "obligation_neg", "conj_pos", "conj_neg")

    def contains(self, kind: str, sign: bool, target: Target) -> bool:
        return target in getattr(self, _set_name(kind, sign))

    def issubset(self, other: "Extension") -> bool:
        return all(getattr(self, f) <= getattr(other, f) for f in self._FIELDS)

    def coherent(self) -> bool:
        return (not (self.factual_pos & self.factual_neg)
                and not (self.obligation_pos & self.obligation_neg)
                and not (self.conj_pos & self.conj_neg))

    def consistent(self) -> bool:
        """No literal is provable together with its complement.

        Only the positive sets matter: complementary pairs are routinely
        *refuted* together (any atom without rules refutes both ways).
        """
        for name in ("factual_pos", "obligation_pos"):
            pool = getattr(self, name)
            if any(l.complement() in pool for l in pool):
                return False
        return True

    def size(self) -> int:
        return sum(len(getattr(self, f)) for f in self._FIELDS)


def _set_name(kind: str, sign: bool) -> str:
    if kind == "factual":
        return "factual_pos" if sign else "factual_neg"
    if kind == "obligation":
        return "obligation_pos" if sign else "obligation_neg"
    if kind == "conj":
        return "conj_pos" if sign else "conj_neg"
    raise ValueError(f"unknown conclusion kind {kind!r}")


def initial_extension(theory: Theory) -> Extension:
    """Stage 0: the facts, and nothing else."""
    return Extension(factual_pos=frozenset(theory.facts))


@dataclass(frozen=True)
class LiteralUniverse:
    """Candidate targets: all mentioned literals (complement-closed) and the
    conjunctions occurring in rule bodies."""

    literals: frozenset[Literal]
    conjunctions: frozenset[Conjunction]


def universe(theory: Theory) -> LiteralUniverse:
    lits: set[Literal] = set(theory.facts)
    conjs: set[Conjunction] = set()
    for r in theory.rules:
        plain, obl, neg_obl, cs = r.partition()
        lits |= plain | obl | neg_obl
        for c in cs:
            conjs.add(c)
            lits.update(c.conjuncts)
        lits.update(r.head.elements)
    lits |= {l.complement() for l in lits}
    return LiteralUniverse(frozenset(lits), frozenset(conjs))


# ---------------------------------------------------------------------------
# Applicability in an extension
# ---------------------------------------------------------------------------

def body_applicable(rule: Rule, ext) -> bool:
    """All antecedent atoms settled the way the rule needs them."""
    plain, obl, neg_obl, conj = rule.partition()
    return (plain <= ext.factual_pos and obl <= ext.obligation_pos
            and neg_obl <= ext.obligation_neg and conj <= ext.conj_pos)


def body_discarded(rule: Rule, ext) -> bool:
    """Some antecedent atom settled the opposite way."""
    plain, obl, neg_obl, conj = rule.partition()
    return bool(plain & ext.factual_neg or obl & ext.obligation_neg
                or neg_obl & ext.obligation_pos or conj & ext.conj_neg)


def applicable_at(rule: Rule, q: Literal, index: int, ext) -> bool:
    """Applicable for the head element ``q`` at 1-based ``index``.

    Besides body applicability, every earlier chain element must be a
    provable obligation whose violation (complement) is provable.
    """
    if rule.head.at(index) != q:
        raise ValueError(f"rule {rule.label} does not have {q} at index {index}")
    return _applicable_at(rule, index, ext)


def discarded_at(rule: Rule, q: Literal, index: int, ext) -> bool:
    """Discarded for ``q`` at ``index``: body discarded, or some earlier chain
    element is refuted as an obligation or already fulfilled."""
    if rule.head.at(index) != q:
        raise ValueError(f"rule {rule.label} does not have {q} at index {index}")
    return _discarded_at(rule, index, ext)


def _applicable_at(rule: Rule, index: int, ext) -> bool:
    if not body_applicable(rule, ext):
        return False
    for k in range(1, index):
        c_k = rule.head.at(k)
        if c_k not in ext.obligation_pos or c_k.complement() not in ext.factual_pos:
            return False
    return True


def _discarded_at(rule: Rule, index: int, ext) -> bool:
    if body_discarded(rule, ext):
        return True
    for k in range(1, index):
        c_k = rule.head.at(k)
        if c_k in ext.obligation_neg or c_k.complement() in ext.factual_neg:
            return True
    return False


# ---------------------------------------------------------------------------
# Stage trace
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StageRecord:
    stage: int
    added: tuple[tuple[str, bool, Target, str], ...]  # (kind, sign, target, note)


@dataclass(frozen=True)
class StageTrace:
    """The staged construction: which conclusion entered at which stage, and why."""

    theory: Theory
    records: tuple[StageRecord, ...]

    def stage_count(self) -> int:
        return len(self.records)

    def extension_at(self, stage: int) -> Extension:
        sets = {name: set() for name in Extension._FIELDS}
        for rec in self.records:
            if rec.stage > stage:
                break
            for kind, sign, target, _ in rec.added:
                sets[_set_name(kind, sign)].add(target)
        return Extension(**{k: frozenset(v) for k, v in sets.items()})

    @property
    def final(self) -> Extension:
        return self.extension_at(self.records[-1].stage if self.records else 0)

    def stage_of(self) -> dict[Key, int]:
        out: dict[Key, int] = {}
        for rec in self.records:
            for kind, sign, target, _ in rec.added:
                out.setdefault((kind, sign, target), rec.stage)
        return out

    def render(self) -> str:
        lines = []
        for rec in self.records:
            lines.append(f"stage {rec.stage}:")
            for kind, sign, target, note in rec.added:
                tag = {"factual": "d", "obligation": "dO", "conj": "dO"}[kind]
                mark = "+" if sign else "-"
                suffix = f"  [{note}]" if note else ""
                lines.append(f"  {mark}{tag} {target}{suffix}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# The fixpoint construction
# ---------------------------------------------------------------------------

class _State:
    """Mutable six-set state, attribute-compatible with Extension."""

    __slots__ = Extension._FIELDS

    def __init__(self, start: Extension):
        for name in Extension._FIELDS:
            setattr(self, name, set(getattr(start, name)))

    def freeze(self) -> Extension:
        return Extension(**{name: frozenset(getattr(self, name))
                            for name in Extension._FIELDS})


class _Fixpoint:
    def __init__(self, theory: Theory, cache: dict, start: Optional[Extension] = None):
        self.theory = theory
        self.cache = cache
        self.uni = universe(theory)
        self.state = _State(start if start is not None else initial_extension(theory))
        self.idx = theory.index
        self._partitions = {r.label: r.partition() for r in theory.rules}
        self._cones: dict[str, frozenset[str]] = {}
        self.conj_by_lit: dict[Literal, set[Conjunction]] = {}
        for c in self.uni.conjunctions:
            for l in c.conjuncts:
                self.conj_by_lit.setdefault(l, set()).add(c)
        # Per-conjunct reduct plan: None marks the self-referential case.
        self._conjunct_ext: dict[tuple[Conjunction, Literal], Optional[Extension]] = {}
        self._deferred: dict[Conjunction, tuple[Literal, ...]] = {}
        self._deferred_neg: list[tuple[Conjunction, Literal]] = []
        self.records: list[StageRecord] = [StageRecord(0, tuple(
            ("factual", True, f, "fact")
            for f in sorted(theory.facts, key=Literal.key)))]

    # -- conclusion container shortcuts --

    def _in(self, kind: str, sign: bool, target: Target) -> bool:
        return target in getattr(self.state, _set_name(kind, sign))

    def _partition(self, rule: Rule):
        return self._partitions[rule.label]

    # -- main loop --

    def run(self) -> tuple[Extension, StageTrace]:
        dirty_lits = sorted(self.uni.literals, key=Literal.key)
        dirty_conjs = sorted(self.uni.conjunctions, key=str)
        stage = 0
        while True:
            additions = self._evaluate(dirty_lits, dirty_conjs)
            if not additions:
                additions = self._resolve_deferred()
                if not additions:
                    break
            stage += 1
            self._apply(stage, additions)
            dirty_lits, dirty_conjs = self._dirty_from(additions)
        ext = self.state.freeze()
        if not ext.coherent():
            raise EngineInvariantError("fixpoint is incoherent")
        self.cache[self.theory.fingerprint] = ext
        return ext, StageTrace(self.theory, tuple(self.records))

    def step_once(self, at_fixpoint: bool = False) -> Extension:
        """One synchronous application of the stage operator.

        Deferred refutation tests for self-referential reducts only fire when
        ``at_fixpoint`` is set and no ordinary conclusion is available, which
        mirrors their place in the full construction.
        """
        dirty_lits = sorted(self.uni.literals, key=Literal.key)
        dirty_conjs = sorted(self.uni.conjunctions, key=str)
        additions = self._evaluate(dirty_lits, dirty_conjs)
        if not additions and at_fixpoint:
            additions = self._resolve_deferred()
        self._apply(1, additions)
        return self.state.freeze()

    # -- stage evaluation --

    def _evaluate(self, dirty_lits, dirty_conjs) -> list[tuple[str, bool, Target, str]]:
        adds: list[tuple[str, bool, Target, str]] = []
        st = self.state
        for q in dirty_lits:
            if q not in st.factual_pos:
                note = self._factual_pos(q)
                if note is not None:
                    adds.append(("factual", True, q, note))
            if q not in st.factual_neg:
                note = self._factual_neg(q)
                if note is not None:
                    adds.append(("factual", False, q, note))
            if q not in st.obligation_pos:
                note = self._obligation_pos(q)
                if note is not None:
                    adds.append(("obligation", True, q, note))
            if q not in st.obligation_neg:
                note = self._obligation_neg(q)
                if note is not None:
                    adds.append(("obligation", False, q, note))
        for c in dirty_conjs:
            if c in st.conj_pos or c in st.conj_neg:
                continue
            outcome = self._try_conjunction(c)
            if outcome is not None:
                sign, note = outcome
                adds.append(("conj", sign, c, note))
        return adds

    # Positive institutional statements: some applicable defeasible
    # constitutive rule, every constitutive attacker discarded or beaten.
    def _factual_pos(self, q: Literal) -> Optional[str]:
        if q.complement() in self.theory.facts:
            return None
        proponent = None
        for r, i in self.theory.head_occurrences(q, prescriptive=False):
            if r.defeasible and _applicable_at(r, i, self.state):
                proponent = r
                break
        if proponent is None:
            return None
        if not self._attackers_handled(q, prescriptive=False):
            return None
        return f"rule {proponent.label}"

    def _factual_neg(self, q: Literal) -> Optional[str]:
        if q in self.theory.facts:
            return None
        if q.complement() in self.theory.facts:
            return "complement is a fact"
        occs = self.theory.head_occurrences(q, prescriptive=False)
        if all(not r.defeasible or _discarded_at(r, i, self.state) for r, i in occs):
            return "no surviving constitutive rule"
        winner = self._winning_attacker(q, prescriptive=False)
        if winner is not None:
            return f"undefeated attacker {winner.label}"
        return None

    def _obligation_pos(self, q: Literal) -> Optional[str]:
        proponent = None
        for r, i in self.theory.head_occurrences(q, prescriptive=True):
            if r.defeasible and _applicable_at(r, i, self.state):
                proponent = r
                break
        if proponent is None:
            return None
        if not self._attackers_handled(q, prescriptive=True):
            return None
        return f"rule {proponent.label}"

    def _obligation_neg(self, q: Literal) -> Optional[str]:
        occs = self.theory.head_occurrences(q, prescriptive=True)
        if all(not r.defeasible or _discarded_at(r, i, self.state) for r, i in occs):
            return "no surviving prescriptive rule"
        winner = self._winning_attacker(q, prescriptive=True)
        if winner is not None:
            return f"undefeated attacker {winner.label}"
        return None

    def _attackers_handled(self, q: Literal, *, prescriptive: bool) -> bool:
        """Every attacker occurrence is discarded or beaten by an applicable
        same-side rule (team defeat)."""
        comp = q.complement()
        defenders = None
        for s, k in self.theory.head_occurrences(comp, prescriptive=prescriptive):
            if _discarded_at(s, k, self.state):
                continue
            if defenders is None:
                defenders = [t for t, m in self.theory.head_occurrences(q, prescriptive=prescriptive)
                             if _applicable_at(t, m, self.state)]
            if not any(self.theory.stronger(t, s) for t in defenders):
                return False
        return True

    def _winning_attacker(self, q: Literal, *, prescriptive: bool) -> Optional[Rule]:
        """An applicable attacker occurrence that no same-side rule beats."""
        comp = q.complement()
        occs = self.theory.head_occurrences(q, prescriptive=prescriptive)
        for s, k in self.theory.head_occurrences(comp, prescriptive=prescriptive):
            if not _applicable_at(s, k, self.state):
                continue
            beaten = any(
                not _discarded_at(t, m, self.state) and self.theory.stronger(t, s)
                for t, m in occs)
            if not beaten:
                return s
        return None

    # -- conjunctions --

    def _cone_atoms(self, atom: str) -> frozenset[str]:
        """Atoms whose conclusions can influence any conclusion about ``atom``.

        Backward closure over every dependency edge the membership clauses
        use: for each rule whose head mentions the atom (either sign, either
        mode), all body atoms (including those inside deontic and conjunctive
        body atoms) and all chain-mate atoms.  Removals whose atoms lie
        outside this cone provably cannot change the atom's conclusions.
        """
        cached = self._cones.get(atom)
        if cached is not None:
            return cached
        seen = {atom}
        work = [atom]
        while work:
            current = work.pop()
            for sign in (True, False):
                l = Literal(current, sign)
                for table in (self.idx.heads_constitutive, self.idx.heads_prescriptive):
                    for r, _i in table.get(l, ()):
                        fresh = {e.atom for e in r.head}
                        plain, obl, neg_obl, conjs = self._partition(r)
                        fresh |= {x.atom for x in plain | obl | neg_obl}
                        for conj in conjs:
                            fresh |= {x.atom for x in conj.conjuncts}
                        for a in fresh:
                            if a not in seen:
                                seen.add(a)
                                work.append(a)
        cone = frozenset(seen)
        self._cones[atom] = cone
        return cone

    def _conjunct_reduct(self, c: Conjunction, ci: Literal) -> Optional[Extension]:
        """Fixpoint of the reduct for one conjunct; None when the reduct's
        answer provably coincides with the theory's own fixpoint (identical
        reduct, or removals outside the conjunct's dependency cone).

        Removals outside the cone cannot change the conjunct's conclusions,
        so they are dropped before building the reduct; distinct removal sets
        with the same relevant part then share one memoized fixpoint.
        """
        key = (c, ci)
        if key not in self._conjunct_ext:
            cone = self._cone_atoms(ci.atom)
            removed = frozenset(l for l in c.complements() - {ci.complement()}
                                if l.atom in cone)
            if not removed:
                self._conjunct_ext[key] = None
            else:
                sub = reduct(self.theory, removed)
                if sub.same_theory(self.theory):
                    self._conjunct_ext[key] = None
                else:
                    self._conjunct_ext[key] = self._sub_extension(sub)
        return self._conjunct_ext[key]

    def _sub_extension(self, sub: Theory) -> Extension:
        fp = sub.fingerprint
        hit = self.cache.get(fp)
        if hit is None:
            if sub.size() >= self.theory.size():
                raise EngineInvariantError("reduct recursion failed to shrink")
            hit, _ = _Fixpoint(sub, self.cache).run()
        return hit

    def _try_conjunction(self, c: Conjunction) -> Optional[tuple[bool, str]]:
        st = self.state
        deferred: list[Literal] = []
        all_positive = True
        for ci in c.conjuncts:
            if ci in st.obligation_neg:
                return (False, f"conjunct {ci} refuted as obligation")
            sub_ext = self._conjunct_reduct(c, ci)
            if sub_ext is None:
                deferred.append(ci)
                if ci not in st.obligation_pos:
                    all_positive = False
            else:
                if ci not in sub_ext.obligation_pos:
                    return (False,
                            f"obligation {ci} depends on the other conjuncts' violations")
                if ci not in st.obligation_pos:
                    all_positive = False
        if all_positive:
            return (True, "all conjuncts provable and independent")
        if deferred:
            self._deferred[c] = tuple(deferred)
        return None

    def _resolve_deferred(self) -> list[tuple[str, bool, Target, str]]:
        """At stabilisation, settle 'not provable in an identical reduct' tests."""
        adds = []
        st = self.state
        for c in sorted(self._deferred, key=str):
            if c in st.conj_pos or c in st.conj_neg:
                continue
            for ci in self._deferred[c]:
                if ci not in st.obligation_pos:
                    self._deferred_neg.append((c, ci))
                    adds.append(("conj", False, c,
                                 f"conjunct {ci} not provable at the stabilised fixpoint"))
                    break
        return adds

    # -- application and change tracking --

    def _apply(self, stage: int, additions) -> None:
        recorded = []
        for kind, sign, target, note in additions:
            pool = getattr(self.state, _set_name(kind, sign))
            opposite = getattr(self.state, _set_name(kind, not sign))
            if target in pool:
                continue
            if target in opposite:
                raise EngineInvariantError(
                    f"coherence violated: both signs for {kind} {target}")
            pool.add(target)
            recorded.append((kind, sign, target, note))
        self.records.append(StageRecord(stage, tuple(recorded)))
        for c, ci in self._deferred_neg:
            if ci in self.state.obligation_pos:
                raise DependencyCycleError(c, ci)

    def _dirty_from(self, additions) -> tuple[list[Literal], list[Conjunction]]:
        lits: set[Literal] = set()
        conjs: set[Conjunction] = set()

        def mark(rule: Rule) -> None:
            for e in rule.head:
                lits.add(e)
                lits.add(e.complement())

        for kind, sign, target, _ in additions:
            if kind == "conj":
                for r in self.idx.body_conj.get(target, ()):
                    mark(r)
                continue
            l = target
            if kind == "factual":
                for r in self.idx.body_plain.get(l, ()):
                    mark(r)
                for r, _i in self.idx.chain_members.get(l.complement(), ()):
                    mark(r)
            else:
                for r in self.idx.body_obl.get(l, ()):
                    mark(r)
                for r in self.idx.body_neg_obl.get(l, ()):
                    mark(r)
                for r, _i in self.idx.chain_members.get(l, ()):
                    mark(r)
                conjs |= self.conj_by_lit.get(l, set())
        return sorted(lits, key=Literal.key), sorted(conjs, key=str)


# ---------------------------------------------------------------------------
# Public entry points
# ---------------------------------------------------------------------------

class Session:
    """Evaluation context for one theory: fixpoint, reduct cache, queries.

    Reduct extensions computed along the way are memoized by structural
    theory identity and shared with nested evaluations, so repeated queries
    and conjunction evaluations stay cheap.
    """

    def __init__(self, theory: Theory, cache: Optional[dict] = None):
        self.theory = theory
        self.cache: dict = cache if cache is not None else {}
        self._ext: Optional[Extension] = None
        self._trace: Optional[StageTrace] = None
        self._universe: Optional[LiteralUniverse] = None

    @property
    def extension(self) -> Extension:
        if self._ext is None:
            self._ext, self._trace = _Fixpoint(self.theory, self.cache).run()
        return self._ext

    @property
    def trace(self) -> StageTrace:
        self.extension
        return self._trace

    @property
    def universe(self) -> LiteralUniverse:
        if self._universe is None:
            self._universe = universe(self.theory)
        return self._universe

    def reduct_extension(self, removed: frozenset[Literal]) -> Extension:
        sub = reduct(self.theory, removed)
        if sub.same_theory(self.theory):
            return self.extension
        hit = self.cache.get(sub.fingerprint)
        if hit is None:
            hit, _ = _Fixpoint(sub, self.cache).run()
        return hit

    def evaluate_conjunction(self, c: Conjunction) -> EvaluationVerdict:
        """Verdict for any conjunction over the language, at the fixpoint.

        Works for ad-hoc conjunctions as well as the ones occurring in rule
        bodies; on the latter the verdict agrees with the computed sets.
        """
        ext = self.extension
        records = []
        deciding = None
        verdict = "proven"
        for ci in c.conjuncts:
            if ci in ext.obligation_neg:
                records.append(ConjunctRecord(ci, "refuted-obligation",
                                              f"{ci} is refuted as an obligation"))
                if deciding is None:
                    verdict, deciding = "refuted", ci
                continue
            sub_ext = self.reduct_extension(c.complements() - {ci.complement()})
            if ci not in sub_ext.obligation_pos:
                records.append(ConjunctRecord(
                    ci, "dependent",
                    f"{ci} is not provable once the other conjuncts' violations "
                    f"lose their support"))
                if deciding is None:
                    verdict, deciding = "refuted", ci
            elif ci not in ext.obligation_pos:
                records.append(ConjunctRecord(ci, "unsettled",
                                              f"{ci} is not provable as an obligation"))
                if verdict == "proven":
                    verdict = "undecided"
            else:
                records.append(ConjunctRecord(ci, "independent",
                                              f"{ci} provable and independent"))
        result = EvaluationVerdict(verdict, tuple(records), deciding)
        if c in ext.conj_pos and not result.proven:
            raise EngineInvariantError(f"verdict for {c} disagrees with conj_pos")
        if c in ext.conj_neg and not result.refuted:
            raise EngineInvariantError(f"verdict for {c} disagrees with conj_neg")
        return result

    def independent(self, m: Literal, removed: Iterable[Literal]) -> bool:
        if m not in self.extension.obligation_pos:
            return False
        return m in self.reduct_extension(frozenset(removed)).obligation_pos

    def query(self, kind: str, sign: bool, target: Target) -> bool:
        """Membership in the (on-demand extended) fixpoint."""
        if kind == "conj":
            verdict = self.evaluate_conjunction(target)
            return verdict.verdict == ("proven" if sign else "refuted")
        ext = self.extension
        if target not in self.universe.literals:
            # Unknown literal: no facts, no rules, hence vacuously refuted.
            return not sign
        return ext.contains(kind, sign, target)


def compute_extension(theory: Theory,
                      session: Optional[Session] = None) -> tuple[Extension, StageTrace]:
    """The least fixpoint of the stage construction, with its trace."""
    session = session or Session(theory)
    return session.extension, session.trace


def step(theory: Theory, ext: Extension, at_fixpoint: bool = False) -> Extension:
    """One application of the stage operator to ``ext``.

    ``ext`` must lie below the fixpoint (e.g. :func:`initial_extension` or any
    earlier stage).  With ``at_fixpoint`` set, deferred self-reduct refutation
    tests may fire when nothing else changes.
    """
    fp = _Fixpoint(theory, {}, start=ext)
    return fp.step_once(at_fixpoint=at_fixpoint)


def query(theory: Theory, kind: str, sign: bool, target: Target,
          session: Optional[Session] = None) -> bool:
    session = session or Session(theory)
    return session.query(kind, sign, target)
