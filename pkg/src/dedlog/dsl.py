"""Concrete textual syntax for theories, plus extension output formats.

Grammar (one statement per ``.``; ``#`` starts a comment to end of line)::

    statement   ::= fact | rule | superiority
    fact        ::= "fact" literal "."
    rule        ::= LABEL ":" [ body ] arrow head "."
    superiority ::= LABEL ">" LABEL "."
    body        ::= atom ( "," atom )*
    atom        ::= literal
                  | "O" "[" literal ( "&" literal )* "]"
                  | "-" "O" "[" literal "]"
    arrow       ::= "=>" | "~>" | "=O>" | "~O>"
    head        ::= literal ( "*" literal )*
    literal     ::= [ "~" ] IDENT
    IDENT       ::= [A-Za-z_][A-Za-z0-9_]*

``=>`` / ``~>`` introduce constitutive rules (defeasible / defeater),
``=O>`` / ``~O>`` the prescriptive ones.  Chain heads (``a * b``) are only
legal on ``=O>`` rules.  Statement order is irrelevant; superiority
statements may reference labels defined later in the file.

Parsing is total: malformed input yields error diagnostics with source
spans, never an exception.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

from .model import (Arrow, BodyAtom, Chain, Conjunction, Literal, Rule,
                    Theory, TheoryError)

ARROWS = {
    "=>": Arrow.DEFEASIBLE_CONSTITUTIVE,
    "~>": Arrow.DEFEATER_CONSTITUTIVE,
    "=O>": Arrow.DEFEASIBLE_PRESCRIPTIVE,
    "~O>": Arrow.DEFEATER_PRESCRIPTIVE,
}


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    start: int
    end: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    message: str
    span: SourceSpan

    def __str__(self) -> str:
        return f"{self.span}: {self.severity}: {self.message}"


@dataclass
class ParseResult:
    theory: Optional[Theory]
    diagnostics: list[Diagnostic]

    @property
    def ok(self) -> bool:
        return self.theory is not None

    def errors(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.severity == "error"]

    def warnings(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.severity == "warning"]


# ---------------------------------------------------------------------------
# Lexer
# ---------------------------------------------------------------------------

_PUNCT = (
    ("=O>", "ARROW"), ("~O>", "ARROW"), ("=>", "ARROW"), ("~>", "ARROW"),
    (":", ":"), (".", "."), (",", ","), ("*", "*"), ("&", "&"),
    ("[", "["), ("]", "]"), (">", ">"), ("~", "~"), ("-", "-"),
)


@dataclass(frozen=True)
class Token:
    kind: str  # "IDENT" | "ARROW" | punctuation | "EOF"
    text: str
    span: SourceSpan


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1
        self.errors: list[Diagnostic] = []

    def _span(self, start: int, start_line: int, start_col: int) -> SourceSpan:
        return SourceSpan(start_line, start_col, start, self.pos)

    def _advance(self, n: int) -> None:
        for _ in range(n):
            if self.pos < len(self.text) and self.text[self.pos] == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.pos += 1

    def tokens(self) -> list[Token]:
        out: list[Token] = []
        text = self.text
        while self.pos < len(text):
            ch = text[self.pos]
            if ch in " \t\r\n":
                self._advance(1)
                continue
            if ch == "#":
                while self.pos < len(text) and text[self.pos] != "\n":
                    self._advance(1)
                continue
            start, line, col = self.pos, self.line, self.col
            if ch.isalpha() or ch == "_":
                end = self.pos
                while end < len(text) and (text[end].isalnum() or text[end] == "_"):
                    end += 1
                self._advance(end - self.pos)
                out.append(Token("IDENT", text[start:end], self._span(start, line, col)))
                continue
            for sym, kind in _PUNCT:
                if text.startswith(sym, self.pos):
                    self._advance(len(sym))
                    out.append(Token(kind, sym, self._span(start, line, col)))
                    break
            else:
                self._advance(1)
                self.errors.append(Diagnostic(
                    "error", f"unexpected character {ch!r}",
                    self._span(start, line, col)))
        out.append(Token("EOF", "", SourceSpan(self.line, self.col, self.pos, self.pos)))
        return out


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

class _Parser:
    """Single-pass recursive-descent parser over the token list.

    Error recovery is per statement: on failure, tokens are skipped up to
    and including the next ``.`` and parsing resumes.
    """

    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0
        self.diagnostics: list[Diagnostic] = []
        self.facts: list[tuple[Literal, SourceSpan]] = []
        self.rules: list[Rule] = []
        self.superiority: list[tuple[str, str, SourceSpan]] = []

    # -- token plumbing --

    def peek(self, ahead: int = 0) -> Token:
        j = min(self.i + ahead, len(self.tokens) - 1)
        return self.tokens[j]

    def next(self) -> Token:
        t = self.tokens[self.i]
        if t.kind != "EOF":
            self.i += 1
        return t

    def error(self, message: str, span: SourceSpan) -> None:
        self.diagnostics.append(Diagnostic("error", message, span))

    def warn(self, message: str, span: SourceSpan) -> None:
        self.diagnostics.append(Diagnostic("warning", message, span))

    def _skip_statement(self) -> None:
        while self.peek().kind not in (".", "EOF"):
            self.next()
        if self.peek().kind == ".":
            self.next()

    def _expect(self, kind: str, what: str) -> Optional[Token]:
        t = self.peek()
        if t.kind != kind:
            self.error(f"expected {what}, found {t.text or 'end of input'!r}", t.span)
            return None
        return self.next()

    # -- grammar --

    def parse(self) -> None:
        while self.peek().kind != "EOF":
            t = self.peek()
            if t.kind == "IDENT" and t.text == "fact":
                self._parse_fact()
            elif t.kind == "IDENT":
                self._parse_labelled()
            else:
                self.error(f"expected a statement, found {t.text!r}", t.span)
                self._skip_statement()

    def _parse_literal(self) -> Optional[Literal]:
        t = self.peek()
        if t.kind == "~":
            self.next()
            name = self._expect("IDENT", "an atom after '~'")
            if name is None:
                return None
            if self.peek().kind == "[":
                self.error("use -O[...] for a negated deontic body atom", t.span)
                return None
            return Literal(name.text, False)
        if t.kind == "IDENT":
            self.next()
            return Literal(t.text, True)
        self.error(f"expected a literal, found {t.text or 'end of input'!r}", t.span)
        return None

    def _parse_fact(self) -> None:
        kw = self.next()  # 'fact'
        t = self.peek()
        if t.kind == "IDENT" and t.text == "O" and self.peek(1).kind == "[":
            self.error("deontic literal not allowed as fact", t.span)
            self._skip_statement()
            return
        l = self._parse_literal()
        if l is None:
            self._skip_statement()
            return
        if self._expect(".", "'.'") is None:
            self._skip_statement()
            return
        self.facts.append((l, kw.span))

    def _parse_labelled(self) -> None:
        label = self.next()
        sep = self.peek()
        if sep.kind == ">":
            self.next()
            other = self._expect("IDENT", "a rule label after '>'")
            if other is None or self._expect(".", "'.'") is None:
                self._skip_statement()
                return
            self.superiority.append((label.text, other.text, label.span))
            return
        if sep.kind != ":":
            self.error(f"expected ':' or '>' after {label.text!r}", sep.span)
            self._skip_statement()
            return
        self.next()
        self._parse_rule(label)

    def _parse_body_atom(self) -> Optional[BodyAtom]:
        t = self.peek()
        if t.kind == "-":
            self.next()
            if not (self.peek().kind == "IDENT" and self.peek().text == "O"
                    and self.peek(1).kind == "["):
                self.error("expected O[...] after '-'", t.span)
                return None
            self.next()  # O
            self.next()  # [
            l = self._parse_literal()
            if l is None:
                return None
            if self.peek().kind == "&":
                self.error("negated deontic atoms take a single literal", self.peek().span)
                return None
            if self._expect("]", "']'") is None:
                return None
            return BodyAtom.neg_obl(l)
        if t.kind == "IDENT" and t.text == "O" and self.peek(1).kind == "[":
            self.next()  # O
            self.next()  # [
            lits = []
            l = self._parse_literal()
            if l is None:
                return None
            lits.append(l)
            while self.peek().kind == "&":
                self.next()
                l = self._parse_literal()
                if l is None:
                    return None
                lits.append(l)
            if self._expect("]", "']'") is None:
                return None
            distinct = sorted(set(lits), key=Literal.key)
            if len(distinct) == 1:
                if len(lits) > 1:
                    self.warn(f"conjunction collapses to the single literal {distinct[0]}",
                              t.span)
                return BodyAtom.obl(distinct[0])
            conj = Conjunction(tuple(distinct))
            if conj.has_complementary_pair():
                self.warn(f"conjunction {conj} contains a complementary pair", t.span)
            return BodyAtom.conj_obl(conj)
        l = self._parse_literal()
        return None if l is None else BodyAtom.plain(l)

    def _parse_rule(self, label: Token) -> None:
        body: list[BodyAtom] = []
        if self.peek().kind != "ARROW":
            a = self._parse_body_atom()
            if a is None:
                self._skip_statement()
                return
            body.append(a)
            while self.peek().kind == ",":
                self.next()
                a = self._parse_body_atom()
                if a is None:
                    self._skip_statement()
                    return
                body.append(a)
        arrow_tok = self._expect("ARROW", "an arrow (=> ~> =O> ~O>)")
        if arrow_tok is None:
            self._skip_statement()
            return
        arrow = ARROWS[arrow_tok.text]
        head: list[Literal] = []
        l = self._parse_literal()
        if l is None:
            self._skip_statement()
            return
        head.append(l)
        while self.peek().kind == "*":
            star = self.next()
            if arrow is not Arrow.DEFEASIBLE_PRESCRIPTIVE:
                self.error(
                    f"chain heads are only allowed on =O> rules, not {arrow.value}",
                    star.span)
                self._skip_statement()
                return
            l = self._parse_literal()
            if l is None:
                self._skip_statement()
                return
            head.append(l)
        if self._expect(".", "'.'") is None:
            self._skip_statement()
            return
        try:
            rule = Rule(label.text, frozenset(body), arrow, Chain(tuple(head)))
        except TheoryError as exc:
            self.error(str(exc), label.span)
            return
        if any(r.label == rule.label for r in self.rules):
            self.error(f"duplicate rule label {rule.label!r}", label.span)
            return
        self.rules.append(rule)

    # -- assembly --

    def build(self) -> Optional[Theory]:
        known = {r.label for r in self.rules}
        pairs = set()
        for a, b, span in self.superiority:
            missing = next((x for x in (a, b) if x not in known), None)
            if missing is not None:
                self.error(f"superiority refers to unknown rule label {missing!r}", span)
                continue
            pairs.add((a, b))
        if any(d.severity == "error" for d in self.diagnostics):
            return None
        theory = Theory(frozenset(l for l, _ in self.facts), tuple(self.rules),
                        frozenset(pairs))
        whole = SourceSpan(1, 1, 0, 0)
        for msg in theory.warnings():
            self.warn(msg, whole)
        return theory


def parse_theory(text: str) -> ParseResult:
    """Parse a theory file.  Never raises; errors come back as diagnostics."""
    lexer = _Lexer(text)
    tokens = lexer.tokens()
    parser = _Parser(tokens)
    parser.diagnostics.extend(lexer.errors)
    parser.parse()
    theory = parser.build()
    return ParseResult(theory, parser.diagnostics)


def load_theory(text: str) -> Theory:
    """Parse and return the theory, raising on any error diagnostic."""
    result = parse_theory(text)
    if result.theory is None:
        msgs = "; ".join(str(d) for d in result.errors())
        raise TheoryError(f"theory does not parse: {msgs}")
    return result.theory


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def serialize_theory(theory: Theory) -> str:
    """Render a theory in the file syntax; parses back to an equal theory.

    Statements are emitted in a stable order: facts sorted, rules by label,
    superiority pairs sorted.
    """
    lines = ["# defeasible deontic theory"]
    for f in sorted(theory.facts, key=Literal.key):
        lines.append(f"fact {f}.")
    for r in sorted(theory.rules, key=lambda r: r.label):
        lines.append(f"{r}.")
    for a, b in sorted(theory.superiority):
        lines.append(f"{a} > {b}.")
    return "\n".join(lines) + "\n"


_EXTENSION_KEYS = ("factual_pos", "factual_neg", "obligation_pos",
                   "obligation_neg", "conj_pos", "conj_neg")


def extension_dict(ext) -> dict[str, list[str]]:
    """The six extension sets as sorted string arrays under fixed keys."""
    fields = (ext.factual_pos, ext.factual_neg, ext.obligation_pos,
              ext.obligation_neg, ext.conj_pos, ext.conj_neg)
    return {key: sorted(str(x) for x in vals)
            for key, vals in zip(_EXTENSION_KEYS, fields)}


def emit_extension(ext, fmt: str = "json") -> str:
    """Serialize an extension; output bytes are deterministic per extension."""
    data = extension_dict(ext)
    if fmt == "json":
        return json.dumps(data, indent=2) + "\n"
    if fmt == "text":
        lines = [f"{key}: {', '.join(vals)}" for key, vals in data.items()]
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown extension format {fmt!r}")
