"""Definite-clause rule sets, symbol sets, goals, and their file formats.

Knowledge bases are UTF-8 JSON-lines files.  A rule entry looks like

    {"id": 3, "name": "BiggerABC",
     "clause": ["-[bigger,A,B]", "-[bigger,B,C]", "+[bigger,A,C]"]}

with exactly one "+" literal (the conclusion) per clause.  A symbol set
is a JSON-lines file of {"id": N, "symbol": S} entries and must contain
the reserved symbol "Vble".  Terms use one bracket grammar everywhere:
a token is a constant unless its first character is an uppercase letter
or an underscore, in which case it is a variable (Prolog convention).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .terms import Compound, Constant, Term, Variable, render_term

TOKEN_RE = re.compile(r"[A-Za-z0-9_]+\Z")
RESERVED_VAR_RE = re.compile(r"_V\d+\Z")

VBLE = "Vble"

CONSTANT = "constant"
VARIABLE = "variable"


class ParseError(ValueError):
    """Raised on malformed KB, symbol-set, goal, or schedule input."""

    def __init__(self, message: str, line: int | None = None) -> None:
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


def classify_token(token: str) -> str:
    """Classify a token as a constant or a variable.

    Variables start with an uppercase letter or an underscore; anything
    else (numerals, lowercase-initial tokens) is a constant.
    """
    if not token or not TOKEN_RE.match(token):
        raise ParseError(f"malformed token {token!r}")
    first = token[0]
    return VARIABLE if first == "_" or first.isupper() else CONSTANT


def _make_leaf(token: str, allow_reserved: bool) -> Term:
    kind = classify_token(token)
    if kind == VARIABLE:
        if not allow_reserved and RESERVED_VAR_RE.match(token):
            raise ParseError(f"variable name {token!r} is reserved")
        return Variable(token)
    return Constant(token)


class _TermParser:
    def __init__(self, text: str, allow_reserved: bool) -> None:
        self.text = text
        self.pos = 0
        self.allow_reserved = allow_reserved

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def token(self) -> str:
        start = self.pos
        while self.pos < len(self.text) and (
            self.text[self.pos].isalnum() or self.text[self.pos] == "_"
        ):
            self.pos += 1
        if self.pos == start:
            raise ParseError(f"expected a token at position {start} in {self.text!r}")
        return self.text[start : self.pos]

    def parse(self) -> Term:
        self.skip_ws()
        if self.peek() == "[":
            self.pos += 1
            elements: list[Term] = [self.parse()]
            self.skip_ws()
            while self.peek() == ",":
                self.pos += 1
                elements.append(self.parse())
                self.skip_ws()
            if self.peek() != "]":
                raise ParseError(f"unbalanced brackets in {self.text!r}")
            self.pos += 1
            if len(elements) == 1:
                return elements[0]
            head = elements[0]
            if not isinstance(head, Constant):
                raise ParseError(
                    f"functor must be a constant token, got {render_term(head)!r}"
                )
            return Compound(head.symbol, tuple(elements[1:]))
        return _make_leaf(self.token(), self.allow_reserved)

    def expect_end(self) -> None:
        self.skip_ws()
        if self.pos != len(self.text):
            raise ParseError(f"trailing input in {self.text!r}")


def parse_term(text: str, allow_reserved: bool = False) -> Term:
    """Parse bracket syntax such as "[know,haibara,[love,X,ran]]"."""
    parser = _TermParser(text, allow_reserved)
    term = parser.parse()
    parser.expect_end()
    return term


def parse_signed_literal(text: str, allow_reserved: bool = False) -> tuple[str, Term]:
    stripped = text.strip()
    if not stripped or stripped[0] not in "+-":
        raise ParseError(f"literal {text!r} must start with '+' or '-'")
    return stripped[0], parse_term(stripped[1:], allow_reserved)


@dataclass(frozen=True)
class Rule:
    """A definite clause with an id, a unique name, one conclusion, and
    zero or more premises kept in written order."""

    id: int
    name: str
    positive: Term
    negatives: tuple[Term, ...]

    def __post_init__(self) -> None:
        if self.id < 1:
            raise ValueError(f"rule id must be a positive integer, got {self.id}")

    @property
    def is_assertion(self) -> bool:
        return not self.negatives


@dataclass(frozen=True)
class RuleSet:
    rules: tuple[Rule, ...]
    _by_id: dict[int, Rule] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        by_id: dict[int, Rule] = {}
        names: set[str] = set()
        for rule in self.rules:
            if rule.id in by_id:
                raise ValueError(f"duplicate rule id {rule.id}")
            if rule.name in names:
                raise ValueError(f"duplicate rule name {rule.name!r}")
            by_id[rule.id] = rule
            names.add(rule.name)
        object.__setattr__(self, "_by_id", by_id)

    @property
    def max_rule_id(self) -> int:
        return max((r.id for r in self.rules), default=0)

    def by_id(self, rule_id: int) -> Rule | None:
        return self._by_id.get(rule_id)

    def sorted_ids(self) -> list[int]:
        return sorted(self._by_id)

    def __iter__(self) -> Iterator[Rule]:
        return iter(self.rules)

    def __len__(self) -> int:
        return len(self.rules)


@dataclass(frozen=True)
class SymbolSet:
    """Symbols with unique positive ids; must include the reserved
    variable marker "Vble"."""

    entries: tuple[tuple[int, str], ...]
    _by_symbol: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        by_symbol: dict[str, int] = {}
        ids: set[int] = set()
        for sid, symbol in self.entries:
            if sid < 1:
                raise ValueError(f"symbol id must be a positive integer, got {sid}")
            if sid in ids:
                raise ValueError(f"duplicate symbol id {sid}")
            if symbol in by_symbol:
                raise ValueError(f"duplicate symbol {symbol!r}")
            ids.add(sid)
            by_symbol[symbol] = sid
        if VBLE not in by_symbol:
            raise ValueError(f"symbol set must contain the reserved symbol {VBLE!r}")
        object.__setattr__(self, "_by_symbol", by_symbol)

    @property
    def max_symbol_id(self) -> int:
        return max(sid for sid, _ in self.entries)

    def id_of(self, symbol: str) -> int | None:
        return self._by_symbol.get(symbol)

    def __contains__(self, symbol: str) -> bool:
        return symbol in self._by_symbol

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class Goal:
    """An ordered list of negative literals; the empty goal is success."""

    literals: tuple[Term, ...] = ()

    @property
    def is_empty(self) -> bool:
        return not self.literals


def parse_goal(texts: Sequence[str], allow_reserved: bool = False) -> Goal:
    return Goal(tuple(parse_term(t, allow_reserved) for t in texts))


def render_goal(goal: Goal) -> list[str]:
    return [render_term(t) for t in goal.literals]


def _entries(text: str) -> Iterator[tuple[int, dict]]:
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON ({exc.msg})", lineno) from exc
        if not isinstance(obj, dict):
            raise ParseError("entry must be a JSON object", lineno)
        yield lineno, obj


def parse_rule_set(text: str) -> RuleSet:
    """Parse a JSON-lines rule file into a validated RuleSet."""
    rules: list[Rule] = []
    seen_ids: set[int] = set()
    seen_names: set[str] = set()
    for lineno, obj in _entries(text):
        if set(obj) != {"id", "name", "clause"}:
            raise ParseError(
                "rule entry must have exactly the keys id, name, clause", lineno
            )
        rule_id = obj["id"]
        if not isinstance(rule_id, int) or isinstance(rule_id, bool) or rule_id < 1:
            raise ParseError(f"rule id must be a positive integer, got {rule_id!r}", lineno)
        name = obj["name"]
        if not isinstance(name, str) or not TOKEN_RE.match(name):
            raise ParseError(f"rule name must be a token, got {name!r}", lineno)
        clause = obj["clause"]
        if not isinstance(clause, list) or not clause:
            raise ParseError("clause must be a nonempty list of literals", lineno)
        positives: list[Term] = []
        negatives: list[Term] = []
        for literal in clause:
            if not isinstance(literal, str):
                raise ParseError(f"literal must be a string, got {literal!r}", lineno)
            try:
                sign, term = parse_signed_literal(literal)
            except ParseError as exc:
                raise ParseError(str(exc), lineno) from exc
            (positives if sign == "+" else negatives).append(term)
        if len(positives) != 1:
            raise ParseError(
                f"clause must have exactly one positive literal, got {len(positives)}",
                lineno,
            )
        if rule_id in seen_ids:
            raise ParseError(f"duplicate rule id {rule_id}", lineno)
        if name in seen_names:
            raise ParseError(f"duplicate rule name {name!r}", lineno)
        seen_ids.add(rule_id)
        seen_names.add(name)
        rules.append(Rule(rule_id, name, positives[0], tuple(negatives)))
    return RuleSet(tuple(rules))


def render_rule_set(rule_set: RuleSet) -> str:
    lines = []
    for rule in rule_set:
        clause = ["-" + render_term(t) for t in rule.negatives]
        clause.append("+" + render_term(rule.positive))
        lines.append(
            json.dumps({"id": rule.id, "name": rule.name, "clause": clause})
        )
    return "\n".join(lines) + ("\n" if lines else "")


def parse_symbol_set(text: str) -> SymbolSet:
    """Parse a JSON-lines symbol file into a validated SymbolSet."""
    entries: list[tuple[int, str]] = []
    seen_ids: set[int] = set()
    seen_symbols: set[str] = set()
    for lineno, obj in _entries(text):
        if set(obj) != {"id", "symbol"}:
            raise ParseError("symbol entry must have exactly the keys id, symbol", lineno)
        sid = obj["id"]
        if not isinstance(sid, int) or isinstance(sid, bool) or sid < 1:
            raise ParseError(f"symbol id must be a positive integer, got {sid!r}", lineno)
        symbol = obj["symbol"]
        if not isinstance(symbol, str) or not TOKEN_RE.match(symbol):
            raise ParseError(f"symbol must be a token, got {symbol!r}", lineno)
        if sid in seen_ids:
            raise ParseError(f"duplicate symbol id {sid}", lineno)
        if symbol in seen_symbols:
            raise ParseError(f"duplicate symbol {symbol!r}", lineno)
        seen_ids.add(sid)
        seen_symbols.add(symbol)
        entries.append((sid, symbol))
    try:
        return SymbolSet(tuple(entries))
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def render_symbol_set(symbol_set: SymbolSet) -> str:
    lines = [
        json.dumps({"id": sid, "symbol": symbol}) for sid, symbol in symbol_set.entries
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def term_tokens(term: Term) -> Iterator[str]:
    """Constant and functor tokens of a term; variables are skipped."""
    if isinstance(term, Constant):
        yield term.symbol
    elif isinstance(term, Compound):
        yield term.functor
        for arg in term.args:
            yield from term_tokens(arg)


def validate_coverage(
    rule_set: RuleSet, symbol_set: SymbolSet, extra_terms: Iterable[Term] = ()
) -> list[str]:
    """Constant/functor tokens used by the rules (and any extra terms)
    that are missing from the symbol set.  Empty means encodable."""
    missing: set[str] = set()
    terms: list[Term] = []
    for rule in rule_set:
        terms.append(rule.positive)
        terms.extend(rule.negatives)
    terms.extend(extra_terms)
    for term in terms:
        for token in term_tokens(term):
            if token not in symbol_set:
                missing.add(token)
    return sorted(missing)


def symbol_set_covering(
    rule_set: RuleSet, extra_terms: Iterable[Term] = ()
) -> SymbolSet:
    """Build a symbol set containing Vble plus every constant/functor
    token of the rules and extra terms, ids assigned in sorted order."""
    tokens: set[str] = set()
    for rule in rule_set:
        tokens.update(term_tokens(rule.positive))
        for neg in rule.negatives:
            tokens.update(term_tokens(neg))
    for term in extra_terms:
        tokens.update(term_tokens(term))
    tokens.discard(VBLE)
    entries = [(1, VBLE)]
    entries.extend((i + 2, tok) for i, tok in enumerate(sorted(tokens)))
    return SymbolSet(tuple(entries))
