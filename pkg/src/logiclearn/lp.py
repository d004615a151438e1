"""Normal logic programs: AST, parser and canonical printer.

The surface syntax is Prolog-like. Constants and predicates are lowercase
words, variables uppercase words, negation by failure is written ``-`` in
front of an atom, and every rule ends with a period::

    p(X) :- q(X) , -r(X).
    q(a).

Query lines pair a ground atom with its expected entailment bit::

    ? q(a). 1

Parsing and printing round-trip: ``parse_program(render(p)) == p``.
"""

from __future__ import annotations

from dataclasses import dataclass


class ParseError(ValueError):
    """Syntax error with 1-based line/column position."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


@dataclass(frozen=True, slots=True)
class Term:
    """A constant (lowercase name) or variable (uppercase name)."""

    name: str

    def __post_init__(self):
        if not self.name or not self.name.isalpha():
            raise ValueError(f"term name must be alphabetic, got {self.name!r}")
        if not (self.name.islower() or self.name.isupper()):
            raise ValueError(f"term name must not mix cases: {self.name!r}")

    @property
    def is_variable(self) -> bool:
        return self.name[0].isupper()

    @property
    def is_constant(self) -> bool:
        return not self.is_variable

    @property
    def kind(self) -> str:
        return "variable" if self.is_variable else "constant"

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Atom:
    """A predicate applied to one or more terms."""

    predicate: str
    args: tuple[Term, ...]

    def __post_init__(self):
        if not self.predicate or not self.predicate.islower() or not self.predicate.isalpha():
            raise ValueError(f"predicate must be lowercase alphabetic, got {self.predicate!r}")
        if not self.args:
            raise ValueError("zero-arity atoms are not supported")

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def is_ground(self) -> bool:
        return all(t.is_constant for t in self.args)

    def __str__(self) -> str:
        return f"{self.predicate}({','.join(t.name for t in self.args)})"


@dataclass(frozen=True, slots=True)
class Literal:
    """An atom or its negation-by-failure."""

    atom: Atom
    negated: bool = False

    def __str__(self) -> str:
        return ("-" if self.negated else "") + str(self.atom)


@dataclass(frozen=True, slots=True)
class Rule:
    """``head :- body.`` A rule with an empty body prints as a fact."""

    head: Atom
    body: tuple[Literal, ...] = ()

    def __str__(self) -> str:
        if not self.body:
            return f"{self.head}."
        return f"{self.head} :- {' , '.join(str(l) for l in self.body)}."


@dataclass(frozen=True, slots=True)
class Program:
    """An ordered sequence of rules. Order is preserved through parse/print."""

    rules: tuple[Rule, ...] = ()

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True, slots=True)
class QueryLine:
    """A ground query atom paired with its 0/1 target label."""

    query: Atom
    target: int

    def __post_init__(self):
        if not self.query.is_ground:
            raise ValueError(f"query must be ground, got {self.query}")
        if self.target not in (0, 1):
            raise ValueError(f"target must be 0 or 1, got {self.target!r}")

    def __str__(self) -> str:
        return f"? {self.query}. {self.target}"


# ---------- helpers for building terms ----------

def const(name: str) -> Term:
    t = Term(name)
    if t.is_variable:
        raise ValueError(f"constant name must be lowercase: {name!r}")
    return t


def var(name: str) -> Term:
    t = Term(name)
    if not t.is_variable:
        raise ValueError(f"variable name must be uppercase: {name!r}")
    return t


def atom(predicate: str, *names: str) -> Atom:
    """Build an atom from bare strings, inferring constant/variable by case."""
    return Atom(predicate, tuple(Term(n) for n in names))


# ---------- parser ----------

class _Scanner:
    """Single-pass cursor over one line of input."""

    def __init__(self, text: str, line_no: int):
        self.text = text
        self.pos = 0
        self.line_no = line_no

    def error(self, message: str) -> ParseError:
        return ParseError(message, self.line_no, self.pos + 1)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            raise self.error(f"expected {ch!r}, found {self.peek()!r}")
        self.pos += 1

    def word(self) -> str:
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isalpha():
            self.pos += 1
        if self.pos == start:
            raise self.error(f"expected a name, found {self.peek()!r}")
        name = self.text[start:self.pos]
        if not (name.islower() or name.isupper()):
            self.pos = start
            raise self.error(f"name must not mix cases: {name!r}")
        return name

    def at_end(self) -> bool:
        return self.pos >= len(self.text)


def _parse_atom(sc: _Scanner) -> Atom:
    pred = sc.word()
    if not pred.islower():
        raise sc.error(f"predicate must be lowercase: {pred!r}")
    sc.skip_ws()
    sc.expect("(")
    args = []
    while True:
        sc.skip_ws()
        if sc.peek() == ")":
            raise sc.error("empty or trailing argument")
        args.append(Term(sc.word()))
        sc.skip_ws()
        if sc.peek() == ",":
            sc.pos += 1
            continue
        if sc.peek() == ")":
            sc.pos += 1
            break
        raise sc.error("unbalanced parentheses in atom")
    return Atom(pred, tuple(args))


def _parse_literal(sc: _Scanner) -> Literal:
    sc.skip_ws()
    negated = False
    if sc.peek() == "-":
        negated = True
        sc.pos += 1
        sc.skip_ws()
    if sc.at_end() or not sc.peek().isalpha():
        raise sc.error("empty body item")
    return Literal(_parse_atom(sc), negated)


def _parse_rule(sc: _Scanner) -> Rule:
    sc.skip_ws()
    head = _parse_atom(sc)
    sc.skip_ws()
    body: list[Literal] = []
    if sc.peek() == ":":
        sc.pos += 1
        sc.expect("-")
        body.append(_parse_literal(sc))
        sc.skip_ws()
        while sc.peek() == ",":
            sc.pos += 1
            body.append(_parse_literal(sc))
            sc.skip_ws()
    if sc.peek() != ".":
        raise sc.error("unterminated rule (expected '.')")
    sc.pos += 1
    sc.skip_ws()
    if not sc.at_end():
        raise sc.error(f"trailing input after rule: {sc.text[sc.pos:]!r}")
    return Rule(head, tuple(body))


def parse_rule(text: str, line_no: int = 1) -> Rule:
    """Parse a single rule line such as ``p(X) :- q(X) , -r(X).``"""
    return _parse_rule(_Scanner(text, line_no))


def parse_program(text: str) -> Program:
    """Parse newline-separated rule lines into a Program.

    Blank lines are skipped. Whitespace around ``,`` and ``:-`` is not
    significant; both spaced and unspaced forms are accepted.
    """
    rules = []
    for i, line in enumerate(text.split("\n"), start=1):
        if not line.strip():
            continue
        rules.append(parse_rule(line, i))
    return Program(tuple(rules))


def parse_query_line(text: str, line_no: int = 1) -> QueryLine:
    """Parse a query line of the form ``? e(l). 1``."""
    sc = _Scanner(text, line_no)
    sc.skip_ws()
    sc.expect("?")
    sc.skip_ws()
    q = _parse_atom(sc)
    if not q.is_ground:
        raise sc.error(f"query must be ground, found variable in {q}")
    sc.skip_ws()
    sc.expect(".")
    sc.skip_ws()
    target_text = sc.text[sc.pos:].strip()
    if target_text not in ("0", "1"):
        raise sc.error(f"target must be 0 or 1, found {target_text!r}")
    return QueryLine(q, int(target_text))


# ---------- canonical printing ----------

def render_literal(lit: Literal) -> str:
    return str(lit)


def render_rule(rule: Rule) -> str:
    return str(rule)


def render(program: Program) -> str:
    """Canonical text: one rule per line, ``" :- "`` and ``" , "`` spacing."""
    return "\n".join(str(r) for r in program.rules)
