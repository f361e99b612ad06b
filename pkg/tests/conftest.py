"""Shared fixtures: the standard contrary-to-duty scenario theories.

Each scenario is written in the theory DSL so the parser is exercised on
every path into the engine.  Trigger conditions that the originals leave
open ("whenever the norm applies") become plain facts.
"""

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dedlog import load_theory

SCENARIOS = {
    # A compensation chain whose second element only fires after the first
    # is violated: a and b are both obligatory, their conjunction is not.
    "compensatory": """
        fact e1. fact ~a.
        r1: e1 =O> a * b.
    """,
    # Classic contrary-to-duty pair.
    "ctd": """
        fact e1. fact ~a.
        r1: e1 =O> a.
        r2: ~a =O> b.
    """,
    # The violation feeds the second obligation through a derived concept.
    "intermediate": """
        fact e1. fact ~a.
        r1: e1 =O> a.
        r2: ~a => b.
        r3: b =O> c.
    """,
    # The violation only matters negatively: it blocks the attacker of the
    # second obligation.
    "negative-support": """
        fact e1. fact e2. fact e4. fact ~a.
        r1: e1 =O> a.
        r2: e2 =O> b.
        r3: c =O> ~b.
        r4: e4 => c.
        r5: ~a ~> ~c.
    """,
    # Conjunctions in rule bodies; everything independent.
    "iterated": """
        fact e1. fact e2. fact e3.
        r1: e1 =O> a.
        r2: e2 =O> b.
        r3: O[a & b] =O> c.
        r4: e3 =O> d.
        r5: O[c & d] => e.
    """,
    # Same, but the second obligation now rides on d's violation.
    "iterated-dependent": """
        fact e1. fact e3. fact ~d.
        r1: e1 =O> a.
        r2: ~d =O> b.
        r3: O[a & b] =O> c.
        r4: e3 =O> d.
        r5: O[c & d] => e.
    """,
    # The third obligation needs both violations at once.
    "multiple-conjuncts": """
        fact e1. fact e2. fact ~a. fact ~b.
        r1: e1 =O> a.
        r2: e2 =O> b.
        r3: ~a, ~b =O> c.
    """,
    # The third obligation follows from either violation separately.
    "multiple-dependencies": """
        fact ~a. fact ~b.
        r1: =O> a.
        r2: =O> b.
        r3: ~a =O> c.
        r4: ~b =O> c.
    """,
    # A compensation chain plus an unrelated norm for the same content.
    "pragmatic-unpragmatic": """
        fact ~a.
        r1: =O> a * b.
        r2: =O> b.
    """,
    # Two chains violated in parallel; the compensations are independent.
    "mix-and-match": """
        r1: =O> a * b.
        r2: =O> c * d.
        r3: => ~a.
        r4: => ~c.
    """,
}


@pytest.fixture
def scenario():
    def build(name: str):
        return load_theory(SCENARIOS[name])
    return build


@pytest.fixture
def two_chain_theory():
    """The worked theory with two compensation chains, a defeater and one
    superiority pair (facts f1, f2, g2, f3, f7; r6 > r2)."""
    return load_theory("""
        fact f1. fact f2. fact g2. fact f3. fact f7.
        r1: f1 =O> a * b.
        r2: f2, g2 =O> b * c.
        r3: f3 => ~a.
        r4: d ~O> ~a.
        r5: -O[a] => ~b.
        r6: O[a], O[b] =O> ~c.
        r7: f7 => d.
        r6 > r2.
    """)


@pytest.fixture
def conjunction_cascade_theory():
    """Iterated scenario variant with the conjunction in a prescriptive body
    attacking a chain (facts f1..f7 minus f5)."""
    return load_theory("""
        fact f1. fact f2. fact f3. fact f4. fact f6. fact f7.
        r1: f1 =O> a * b.
        r2: f2 =O> a.
        r3: f3 =O> b.
        r4: f4 => ~a.
        r5: O[a & b] =O> ~c.
        r6: f6 =O> c * d.
        r7: f7 =O> d.
    """)
