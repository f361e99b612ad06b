"""Linear derivations: step checking and witness synthesis.

A derivation is a sequence of tagged expressions (``+d a``, ``-dO b``,
``+dO a & b``, ...).  Each step must be justified by the matching proof
condition against the *prefix* of steps before it.  Literal conditions only
test membership in the prefix; conjunction conditions are order-sensitive:
a conjunctive obligation may be appended only when every conjunct was
proved at a step not preceded by a violation of any other conjunct.  The
earliest occurrence of each conjunct's proof is the one that counts, and
refuting a conjunction through clause (2) requires an actual occurrence of
the conjunct's proof with a violation before it (the vacuous reading would
let an empty prefix refute anything, which also breaks the guarantee that
no derivation both proves and refutes one target).

The witness synthesizer turns fixpoint conclusions back into an accepted
derivation for a chosen goal.  It schedules steps stage by stage while
holding back the violation literals of every conjunction the goal needs,
releasing a violation only once the conjunct proofs it could poison are
already in place.  This succeeds precisely when at most one conjunct per
needed conjunction depends on its own violation; theories in which the
bottom-up semantics accepts a conjunction that no linear derivation can
order are reported via :class:`WitnessSchedulingError`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

from .engine import Session, StageTrace
from .model import (BodyAtom, BodyKind, Conjunction, Literal, Rule, Theory,
                    lit)

Target = Union[Literal, Conjunction]


class DerivationSyntaxError(ValueError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class GoalNotProvenError(ValueError):
    """The requested witness goal is not in the computed extension."""


class WitnessSchedulingError(RuntimeError):
    """No admissible ordering of the supporting steps exists."""


# ---------------------------------------------------------------------------
# Tagged expressions and derivations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TaggedExpression:
    """One derivation step: sign, mode, and a literal or conjunction target."""

    positive: bool
    deontic: bool
    target: Target

    def __post_init__(self) -> None:
        if isinstance(self.target, Conjunction) and not self.deontic:
            raise ValueError("conjunction targets always carry the obligation tag")

    @property
    def token(self) -> str:
        return ("+" if self.positive else "-") + ("dO" if self.deontic else "d")

    def __str__(self) -> str:
        return f"{self.token} {self.target}"

    def __repr__(self) -> str:
        return f"TaggedExpression({str(self)!r})"


def pd(l: Union[Literal, str]) -> TaggedExpression:
    return TaggedExpression(True, False, l if isinstance(l, Literal) else lit(l))


def nd(l: Union[Literal, str]) -> TaggedExpression:
    return TaggedExpression(False, False, l if isinstance(l, Literal) else lit(l))


def pdo(t: Union[Target, str]) -> TaggedExpression:
    return TaggedExpression(True, True, _target(t))


def ndo(t: Union[Target, str]) -> TaggedExpression:
    return TaggedExpression(False, True, _target(t))


def _target(t: Union[Target, str]) -> Target:
    if isinstance(t, (Literal, Conjunction)):
        return t
    if "&" in t:
        return Conjunction.of(part.strip() for part in t.split("&"))
    return lit(t)


_STEP_RE = re.compile(r"^([+-])(dO|d)\s+(.+)$")
_LIT_RE = re.compile(r"^~?\s*[A-Za-z_][A-Za-z0-9_]*$")


def parse_derivation(text: str) -> list[TaggedExpression]:
    """One step per line; ``#`` comments and blank lines are skipped."""
    steps = []
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _STEP_RE.match(line)
        if m is None:
            raise DerivationSyntaxError(no, f"cannot parse step {line!r}")
        sign, tag, rest = m.group(1) == "+", m.group(2), m.group(3).strip()
        parts = [p.strip() for p in rest.split("&")]
        if any(not _LIT_RE.match(p) for p in parts):
            raise DerivationSyntaxError(no, f"malformed target {rest!r}")
        if len(parts) > 1:
            if tag != "dO":
                raise DerivationSyntaxError(no, "conjunction steps use +dO/-dO")
            target: Target = Conjunction.of(parts)
        else:
            target = lit(parts[0])
        steps.append(TaggedExpression(sign, tag == "dO", target))
    return steps


def format_derivation(steps: Iterable[TaggedExpression]) -> str:
    return "".join(f"{s}\n" for s in steps)


class Prefix:
    """An ordered prefix of accepted steps, with first-occurrence positions."""

    def __init__(self, steps: Iterable[TaggedExpression] = ()):
        self.steps: list[TaggedExpression] = []
        self.first: dict[TaggedExpression, int] = {}
        for s in steps:
            self.append(s)

    def append(self, step: TaggedExpression) -> None:
        self.steps.append(step)
        self.first.setdefault(step, len(self.steps))

    def has(self, step: TaggedExpression, upto: Optional[int] = None) -> bool:
        pos = self.first.get(step)
        return pos is not None and (upto is None or pos <= upto)

    def first_pos(self, step: TaggedExpression) -> Optional[int]:
        return self.first.get(step)

    def __len__(self) -> int:
        return len(self.steps)

    def __contains__(self, step: TaggedExpression) -> bool:
        return step in self.first


# ---------------------------------------------------------------------------
# Step justification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Justification:
    ok: bool
    clause: str
    detail: str
    deps: tuple[TaggedExpression, ...] = ()


def _ok(clause: str, detail: str, deps: Sequence[TaggedExpression]) -> Justification:
    seen, uniq = set(), []
    for d in deps:
        if d not in seen:
            seen.add(d)
            uniq.append(d)
    return Justification(True, clause, detail, tuple(uniq))


def _bad(clause: str, detail: str) -> Justification:
    return Justification(False, clause, detail)


def _atom_expr(atom: BodyAtom, wanted: bool) -> TaggedExpression:
    """The prefix membership a body atom needs (wanted) or that kills it."""
    if atom.kind is BodyKind.PLAIN:
        return TaggedExpression(wanted, False, atom.literal)
    if atom.kind is BodyKind.OBL:
        return TaggedExpression(wanted, True, atom.literal)
    if atom.kind is BodyKind.NEG_OBL:
        return TaggedExpression(not wanted, True, atom.literal)
    return TaggedExpression(wanted, True, atom.conjunction)


def _applicable_deps(prefix: Prefix, rule: Rule, index: int) -> Optional[list[TaggedExpression]]:
    """Memberships making the rule applicable for its head element at
    ``index``; None when some condition is missing from the prefix."""
    deps = []
    for atom in sorted(rule.body, key=BodyAtom.key):
        e = _atom_expr(atom, True)
        if not prefix.has(e):
            return None
        deps.append(e)
    for k in range(1, index):
        c_k = rule.head.at(k)
        e1 = TaggedExpression(True, True, c_k)
        e2 = TaggedExpression(True, False, c_k.complement())
        if not (prefix.has(e1) and prefix.has(e2)):
            return None
        deps += [e1, e2]
    return deps


def _discard_deps(prefix: Prefix, rule: Rule, index: int) -> Optional[list[TaggedExpression]]:
    """A membership witnessing that the rule is discarded at ``index``."""
    for atom in sorted(rule.body, key=BodyAtom.key):
        e = _atom_expr(atom, False)
        if prefix.has(e):
            return [e]
    for k in range(1, index):
        c_k = rule.head.at(k)
        for e in (TaggedExpression(False, True, c_k),
                  TaggedExpression(False, False, c_k.complement())):
            if prefix.has(e):
                return [e]
    return None


def _discard_deps_all(prefix: Prefix, rule: Rule, index: int) -> list[TaggedExpression]:
    """Every membership in the prefix that discards the rule at ``index``."""
    out = []
    for atom in sorted(rule.body, key=BodyAtom.key):
        e = _atom_expr(atom, False)
        if prefix.has(e):
            out.append(e)
    for k in range(1, index):
        c_k = rule.head.at(k)
        for e in (TaggedExpression(False, True, c_k),
                  TaggedExpression(False, False, c_k.complement())):
            if prefix.has(e):
                out.append(e)
    return out


def _occurrences(theory: Theory, q: Literal, *, prescriptive: bool,
                 defeasible_only: bool = False):
    for r, i in theory.head_occurrences(q, prescriptive=prescriptive):
        if defeasible_only and not r.defeasible:
            continue
        yield r, i


def _justify_positive_literal(theory: Theory, prefix: Prefix, q: Literal,
                              deontic: bool) -> Justification:
    tag = "+dO" if deontic else "+d"
    if not deontic:
        if q in theory.facts:
            return _ok(f"{tag} (1)", f"{q} is a fact", ())
        if q.complement() in theory.facts:
            return _bad(f"{tag} (2.1)", f"the complement {q.complement()} is a fact")
    proponent = None
    deps: list[TaggedExpression] = []
    for r, i in _occurrences(theory, q, prescriptive=deontic, defeasible_only=True):
        got = _applicable_deps(prefix, r, i)
        if got is not None:
            proponent, deps = r, got
            break
    if proponent is None:
        sub = "(2.2)" if not deontic else "(1)"
        return _bad(f"{tag} {sub}",
                    f"no defeasible {'prescriptive' if deontic else 'constitutive'} "
                    f"rule is applicable for {q}")
    attack_sub = "(2.3)" if not deontic else "(2)"
    for s, k in _occurrences(theory, q.complement(), prescriptive=deontic):
        got = _discard_deps(prefix, s, k)
        if got is not None:
            deps += got
            continue
        defeated = None
        for t, m in _occurrences(theory, q, prescriptive=deontic):
            if theory.stronger(t, s):
                a = _applicable_deps(prefix, t, m)
                if a is not None:
                    defeated = a
                    break
        if defeated is None:
            return _bad(f"{tag} {attack_sub}",
                        f"attacker {s.label} is neither discarded nor defeated")
        deps += defeated
    return _ok(f"{tag} {attack_sub}", f"rule {proponent.label} applicable for {q}", deps)


def _justify_negative_literal(theory: Theory, prefix: Prefix, q: Literal,
                              deontic: bool) -> Justification:
    tag = "-dO" if deontic else "-d"
    if not deontic:
        if q in theory.facts:
            return _bad(f"{tag} (1)", f"{q} is a fact")
        if q.complement() in theory.facts:
            return _ok(f"{tag} (2.1)", f"the complement {q.complement()} is a fact", ())
    all_sub = "(2.2)" if not deontic else "(1)"
    deps: list[TaggedExpression] = []
    survivor = None
    for r, i in _occurrences(theory, q, prescriptive=deontic, defeasible_only=True):
        got = _discard_deps(prefix, r, i)
        if got is None:
            survivor = r
            break
        deps += got
    if survivor is None:
        return _ok(f"{tag} {all_sub}",
                   f"every defeasible rule for {q} is discarded", deps)
    att_sub = "(2.3)" if not deontic else "(2)"
    for s, k in _occurrences(theory, q.complement(), prescriptive=deontic):
        a = _applicable_deps(prefix, s, k)
        if a is None:
            continue
        deps_s = list(a)
        beaten = False
        for t, m in _occurrences(theory, q, prescriptive=deontic):
            if not theory.stronger(t, s):
                continue
            got = _discard_deps(prefix, t, m)
            if got is None:
                beaten = True
                break
            deps_s += got
        if not beaten:
            return _ok(f"{tag} {att_sub}",
                       f"applicable undefeated attacker {s.label}", deps_s)
    return _bad(f"{tag} (2)",
                f"rule {survivor.label} is not discarded and no applicable "
                f"attacker survives team defeat")


def _justify_positive_conjunction(prefix: Prefix, c: Conjunction) -> Justification:
    deps = []
    for ci in c.conjuncts:
        e = TaggedExpression(True, True, ci)
        k = prefix.first_pos(e)
        if k is None:
            return _bad("+dO& (1)", f"conjunct {ci} was not proved as an obligation")
        deps.append(e)
        for cj in c.conjuncts:
            if cj == ci:
                continue
            violation = TaggedExpression(True, False, cj.complement())
            if prefix.has(violation, upto=k):
                return _bad("+dO& (2)",
                            f"violation {cj.complement()} precedes the proof of {ci}")
    return _ok("+dO& (1,2)", "all conjuncts proved without prior violations", deps)


def _justify_negative_conjunction(prefix: Prefix, c: Conjunction) -> Justification:
    for ci in c.conjuncts:
        e = TaggedExpression(False, True, ci)
        if prefix.has(e):
            return _ok("-dO& (1)", f"conjunct {ci} refuted as an obligation", [e])
    for ci in c.conjuncts:
        proof = TaggedExpression(True, True, ci)
        k = prefix.first_pos(proof)
        if k is None:
            continue
        for cj in c.conjuncts:
            if cj == ci:
                continue
            violation = TaggedExpression(True, False, cj.complement())
            if prefix.has(violation, upto=k):
                return _ok("-dO& (2)",
                           f"violation {cj.complement()} precedes the proof of {ci}",
                           [proof, violation])
    return _bad("-dO& (1,2)",
                "no conjunct is refuted and no proved conjunct is preceded by a "
                "violation of another conjunct")


def justify(theory: Theory, prefix: Prefix, expr: TaggedExpression) -> Justification:
    """Validate one step against the proof condition for its tag."""
    if isinstance(expr.target, Conjunction):
        if expr.positive:
            return _justify_positive_conjunction(prefix, expr.target)
        return _justify_negative_conjunction(prefix, expr.target)
    if expr.positive:
        return _justify_positive_literal(theory, prefix, expr.target, expr.deontic)
    return _justify_negative_literal(theory, prefix, expr.target, expr.deontic)


# ---------------------------------------------------------------------------
# Derivation checking
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StepReport:
    index: int  # 1-based position in the derivation
    expression: TaggedExpression
    justified: bool
    clause: str
    detail: str

    def render(self) -> str:
        status = "justified" if self.justified else "violated"
        return f"step {self.index}: {self.expression}: {status} {self.clause}: {self.detail}"


@dataclass(frozen=True)
class CheckReport:
    steps: tuple[StepReport, ...]
    accepted: bool

    def render(self) -> str:
        lines = [s.render() for s in self.steps]
        lines.append("accepted" if self.accepted else "rejected")
        return "\n".join(lines) + "\n"


def check_step(theory: Theory, prefix_steps: Sequence[TaggedExpression],
               expr: TaggedExpression) -> StepReport:
    """Check one candidate step against an already-accepted prefix."""
    j = justify(theory, Prefix(prefix_steps), expr)
    return StepReport(len(prefix_steps) + 1, expr, j.ok, j.clause, j.detail)


def check_derivation(theory: Theory,
                     steps: Sequence[TaggedExpression]) -> CheckReport:
    """Check every step in order, stopping at the first violation."""
    prefix = Prefix()
    reports = []
    for i, expr in enumerate(steps, start=1):
        j = justify(theory, prefix, expr)
        reports.append(StepReport(i, expr, j.ok, j.clause, j.detail))
        if not j.ok:
            return CheckReport(tuple(reports), False)
        prefix.append(expr)
    return CheckReport(tuple(reports), True)


def no_conflict(theory: Theory, steps: Sequence[TaggedExpression]) -> bool:
    """No target occurs with both signs (expected to hold for any accepted
    derivation over a consistent theory)."""
    seen = {(s.deontic, s.target, s.positive) for s in steps}
    return not any((d, t, not p) in seen for d, t, p in seen)


# ---------------------------------------------------------------------------
# Witness synthesis
# ---------------------------------------------------------------------------

_KIND_TO_EXPR = {"factual": False, "obligation": True, "conj": True}


def _expr_of_key(kind: str, sign: bool, target: Target) -> TaggedExpression:
    return TaggedExpression(sign, _KIND_TO_EXPR[kind], target)


class _FixpointPrefix(Prefix):
    """Order-free membership view of a fixpoint, for dependency extraction.

    Usable only for literal-step justification; conjunction clauses need real
    positions and are handled separately by the synthesizer.
    """

    def __init__(self, exprs: Iterable[TaggedExpression]):
        super().__init__()
        for e in exprs:
            self.append(e)

    def has(self, step, upto=None):  # order-free: ignore position bounds
        return step in self.first


def _goal_holds(session: Session, goal: TaggedExpression) -> bool:
    if isinstance(goal.target, Conjunction):
        verdict = session.evaluate_conjunction(goal.target)
        return verdict.proven if goal.positive else verdict.refuted
    kind = "obligation" if goal.deontic else "factual"
    return session.query(kind, goal.positive, goal.target)


def witness_derivation(theory: Theory, trace: StageTrace, goal: TaggedExpression,
                       session: Optional[Session] = None) -> list[TaggedExpression]:
    """A checker-accepted derivation ending with ``goal``.

    Steps are drawn from the fixpoint conclusions recorded in ``trace`` (plus
    the goal itself for ad-hoc conjunctions), scheduled so that conjunction
    steps see no premature violations, then pruned to the justifications the
    goal actually needs.
    """
    session = session or Session(theory)
    if not _goal_holds(session, goal):
        raise GoalNotProvenError(f"goal {goal} is not in the extension")

    stage_map = trace.stage_of()
    pool: dict[TaggedExpression, int] = {}
    for (kind, sign, target), stage in stage_map.items():
        pool[_expr_of_key(kind, sign, target)] = stage
    last = max(pool.values(), default=0) + 1
    pool.setdefault(goal, last)

    order = sorted(pool, key=lambda e: (pool[e], not e.positive, e.deontic, str(e.target)))
    needed = _needed_set(theory, session, order, goal)
    emitted = _schedule(theory, order, needed, goal)
    pruned = _prune(theory, emitted, goal)
    report = check_derivation(theory, pruned)
    if not report.accepted:
        raise WitnessSchedulingError(
            f"synthesized derivation failed validation at: "
            f"{report.steps[-1].render()}")
    return pruned


def _route_union_deps(theory: Theory, view: Prefix,
                      expr: TaggedExpression) -> set[TaggedExpression]:
    """Union of the dependencies of every satisfiable justification route.

    The scheduler cannot know in advance which route will be orderable (a
    compensation-chain route needs the previous element's violation, a
    parallel rule for the same head does not), so the needed-step closure
    keeps all of them and the final backward prune drops the unused ones.
    """
    q = expr.target
    deontic = expr.deontic
    out: set[TaggedExpression] = set()
    if expr.positive:
        for r, i in _occurrences(theory, q, prescriptive=deontic,
                                 defeasible_only=True):
            got = _applicable_deps(view, r, i)
            if got is not None:
                out.update(got)
        for s, k in _occurrences(theory, q.complement(), prescriptive=deontic):
            out.update(_discard_deps_all(view, s, k))
            for t, m in _occurrences(theory, q, prescriptive=deontic):
                if theory.stronger(t, s):
                    a = _applicable_deps(view, t, m)
                    if a is not None:
                        out.update(a)
    else:
        for r, i in _occurrences(theory, q, prescriptive=deontic,
                                 defeasible_only=True):
            out.update(_discard_deps_all(view, r, i))
        for s, k in _occurrences(theory, q.complement(), prescriptive=deontic):
            a = _applicable_deps(view, s, k)
            if a is not None:
                out.update(a)
            for t, m in _occurrences(theory, q, prescriptive=deontic):
                out.update(_discard_deps_all(view, t, m))
    return out


def _needed_set(theory: Theory, session: Session, order: list[TaggedExpression],
                goal: TaggedExpression) -> set[TaggedExpression]:
    """Backward dependency closure from the goal over fixpoint justifications."""
    fix_view = _FixpointPrefix(order)
    deps_of: dict[TaggedExpression, tuple[TaggedExpression, ...]] = {}
    for e in order:
        if isinstance(e.target, Conjunction):
            deps_of[e] = _conjunction_deps(session, e)
        else:
            j = justify(theory, fix_view, e)
            if not j.ok:
                raise WitnessSchedulingError(
                    f"fixpoint conclusion {e} has no step-level justification: "
                    f"{j.detail}")
            deps_of[e] = tuple(_route_union_deps(theory, fix_view, e))
    needed: set[TaggedExpression] = set()
    stack = [goal]
    while stack:
        e = stack.pop()
        if e in needed:
            continue
        needed.add(e)
        stack.extend(deps_of.get(e, ()))
    return needed


def _conjunction_deps(session: Session,
                      e: TaggedExpression) -> tuple[TaggedExpression, ...]:
    c: Conjunction = e.target
    if e.positive:
        return tuple(TaggedExpression(True, True, ci) for ci in c.conjuncts)
    ext = session.extension
    for ci in c.conjuncts:
        if ci in ext.obligation_neg:
            return (TaggedExpression(False, True, ci),)
    # Refuted through dependence: need the conjunct's proof preceded by a
    # provable violation of some other conjunct.
    verdict = session.evaluate_conjunction(c)
    for rec in verdict.records:
        if rec.clause != "dependent":
            continue
        ci = rec.conjunct
        if ci not in ext.obligation_pos:
            continue
        violations = [TaggedExpression(True, False, cj.complement())
                      for cj in c.conjuncts
                      if cj != ci and cj.complement() in ext.factual_pos]
        if violations:
            return tuple([TaggedExpression(True, True, ci)] + violations)
    raise WitnessSchedulingError(
        f"refuted conjunction {c} admits no derivation-level refutation steps")


def _schedule(theory: Theory, order: list[TaggedExpression],
              needed: set[TaggedExpression],
              goal: TaggedExpression) -> list[TaggedExpression]:
    guarded: dict[Literal, list[Conjunction]] = {}
    for e in needed:
        if isinstance(e.target, Conjunction) and e.positive:
            for x in e.target.conjuncts:
                guarded.setdefault(x.complement(), []).append(e.target)
    released: set[Literal] = set()
    prefix = Prefix()
    remaining = [e for e in order if e in needed]
    while goal not in prefix:
        progressed = False
        for e in list(remaining):
            if (not e.deontic and e.positive and e.target in guarded
                    and e.target not in released):
                continue
            if justify(theory, prefix, e).ok:
                prefix.append(e)
                remaining.remove(e)
                progressed = True
        if goal in prefix:
            break
        if progressed:
            continue
        releasable = None
        for v in sorted(guarded, key=Literal.key):
            if v in released:
                continue
            blocked_by = [
                x for c in guarded[v] for x in c.conjuncts
                if x != v.complement()
                and TaggedExpression(True, True, x) not in prefix]
            if not blocked_by:
                releasable = v
                break
        if releasable is None:
            missing = ", ".join(str(e) for e in remaining[:4])
            raise WitnessSchedulingError(
                f"cannot order the supporting steps for {goal} (stuck on: {missing})")
        released.add(releasable)
    return prefix.steps


def _prune(theory: Theory, emitted: list[TaggedExpression],
           goal: TaggedExpression) -> list[TaggedExpression]:
    """Backward pass: keep only the steps the goal transitively depends on.

    Removing steps never invalidates the rest: every justification condition
    is positive in prefix membership except the conjunction no-prior-violation
    clause, which removal can only help.
    """
    prefix = Prefix()
    deps_map: dict[TaggedExpression, tuple[TaggedExpression, ...]] = {}
    for e in emitted:
        j = justify(theory, prefix, e)
        deps_map.setdefault(e, j.deps if j.ok else ())
        prefix.append(e)
    keep: set[TaggedExpression] = set()
    stack = [goal]
    while stack:
        e = stack.pop()
        if e in keep:
            continue
        keep.add(e)
        stack.extend(deps_map.get(e, ()))
    return [e for e in emitted if e in keep]
