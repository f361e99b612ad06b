"""dedlog: a defeasible deontic logic engine.

Computes six-set extensions of rule-based normative theories (provable and
refutable institutional statements, obligations, and conjunctive
obligations), screens conjunctive obligations through reduct-based
independence so that an obligation triggered by the violation of another
never aggregates with it, and checks linear derivations step by step.
"""

from .model import (Arrow, BodyAtom, BodyKind, Chain, Conjunction, Literal,
                    OccurrenceIndex, Rule, Theory, TheoryError,
                    antecedent_partition, complement, lit, rules_for)
from .dsl import (Diagnostic, ParseResult, SourceSpan, emit_extension,
                  extension_dict, load_theory, parse_theory, serialize_theory)
from .engine import (DependencyCycleError, EngineInvariantError, Extension,
                     LiteralUniverse, Session, StageRecord, StageTrace,
                     applicable_at, body_applicable, body_discarded,
                     compute_extension, discarded_at, initial_extension, query,
                     step, universe)
from .reduct import (ConjunctRecord, EvaluationVerdict, ReductKey,
                     evaluate_conjunction, independent, reduct, reduct_refutes)
from .proofs import (CheckReport, DerivationSyntaxError, GoalNotProvenError,
                     Justification, Prefix, StepReport, TaggedExpression,
                     WitnessSchedulingError, check_derivation, check_step,
                     format_derivation, justify, nd, ndo, no_conflict,
                     parse_derivation, pd, pdo, witness_derivation)

__version__ = "0.1.0"
