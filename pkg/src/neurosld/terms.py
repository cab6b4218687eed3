"""First-order terms, substitutions, and Robinson-style unification.

Terms are immutable trees: constants, variables, and compound
applications of a functor to one or more argument terms.  A zero-arity
application is represented as a plain constant, and functors are bare
tokens, never terms, so the language stays first order.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence


@dataclass(frozen=True)
class Constant:
    symbol: str

    def __str__(self) -> str:
        return self.symbol


@dataclass(frozen=True)
class Variable:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Compound:
    functor: str
    args: tuple["Term", ...]

    def __post_init__(self) -> None:
        if len(self.args) < 1:
            raise ValueError("compound term needs at least one argument")

    def __str__(self) -> str:
        return render_term(self)


Term = Constant | Variable | Compound

# Fresh variables produced by rename_apart live in a reserved namespace
# that the knowledge-base parser refuses in user input.
FRESH_PREFIX = "_V"


def render_term(term: Term) -> str:
    """Canonical bracket syntax: tokens print bare, applications as
    [functor,arg1,...,argN]."""
    if isinstance(term, Compound):
        inner = ",".join(render_term(a) for a in term.args)
        return f"[{term.functor},{inner}]"
    return term.symbol if isinstance(term, Constant) else term.name


def term_variables(term: Term) -> Iterator[str]:
    """Yield variable names in depth-first, left-to-right order (with repeats)."""
    if isinstance(term, Variable):
        yield term.name
    elif isinstance(term, Compound):
        for arg in term.args:
            yield from term_variables(arg)


def occurs_in(name: str, term: Term) -> bool:
    return any(v == name for v in term_variables(term))


class Substitution:
    """Finite map from variable names to terms.

    Identity entries (a variable bound to itself) are dropped at
    construction, so the representation is canonical and equality is
    plain mapping equality.  Substitutions produced by `unify` are
    idempotent: no bound variable occurs in any range term.
    """

    __slots__ = ("bindings",)

    def __init__(self, bindings: dict[str, Term] | None = None) -> None:
        clean: dict[str, Term] = {}
        for name, term in (bindings or {}).items():
            if isinstance(term, Variable) and term.name == name:
                continue
            clean[name] = term
        self.bindings = clean

    def apply(self, term: Term) -> Term:
        if isinstance(term, Variable):
            return self.bindings.get(term.name, term)
        if isinstance(term, Compound):
            return Compound(term.functor, tuple(self.apply(a) for a in term.args))
        return term

    def compose(self, other: "Substitution") -> "Substitution":
        """Substitution whose application equals applying self, then other."""
        merged = {name: other.apply(term) for name, term in self.bindings.items()}
        for name, term in other.bindings.items():
            if name not in self.bindings:
                merged[name] = term
        return Substitution(merged)

    def restrict(self, names: Iterable[str]) -> "Substitution":
        keep = set(names)
        return Substitution({n: t for n, t in self.bindings.items() if n in keep})

    def get(self, name: str) -> Term | None:
        return self.bindings.get(name)

    def items(self):
        return self.bindings.items()

    def __contains__(self, name: str) -> bool:
        return name in self.bindings

    def __len__(self) -> int:
        return len(self.bindings)

    def __bool__(self) -> bool:
        return bool(self.bindings)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Substitution):
            return NotImplemented
        return self.bindings == other.bindings

    def __repr__(self) -> str:
        inner = ", ".join(f"{n}/{render_term(t)}" for n, t in self.bindings.items())
        return "{" + inner + "}"


def apply_substitution(term: Term, subst: Substitution) -> Term:
    """Replace every bound variable in `term` by its binding, recursively."""
    return subst.apply(term)


def compose(first: Substitution, second: Substitution) -> Substitution:
    return first.compose(second)


def unify(a: Term, b: Term, occurs_check: bool = True) -> Substitution | None:
    """Most general unifier of two terms, or None when no unifier exists.

    The result is kept idempotent eagerly: every new binding is applied
    to the pending equations and to the bindings already made, so one
    application of the result suffices to reach the common instance.
    With occurs_check off the algorithm can bind a variable to a term
    containing it; the resulting substitution is then not idempotent.
    """
    work: deque[tuple[Term, Term]] = deque([(a, b)])
    out: dict[str, Term] = {}

    def bind(name: str, term: Term) -> bool:
        nonlocal work
        if occurs_check and occurs_in(name, term):
            return False
        step = Substitution({name: term})
        for key in list(out):
            out[key] = step.apply(out[key])
        work = deque((step.apply(x), step.apply(y)) for x, y in work)
        out[name] = term
        return True

    while work:
        s, t = work.popleft()
        if s == t:
            continue
        if isinstance(t, Variable):
            # Right-hand variables bind first so rule variables map onto
            # goal terms during resolution.
            if not bind(t.name, s):
                return None
        elif isinstance(s, Variable):
            if not bind(s.name, t):
                return None
        elif isinstance(s, Compound) and isinstance(t, Compound):
            if s.functor != t.functor or len(s.args) != len(t.args):
                return None
            work.extend(zip(s.args, t.args))
        else:
            return None
    return Substitution(out)


@dataclass
class FreshCounter:
    """Monotone source of fresh variable names in the reserved namespace."""

    n: int = 0

    def fresh(self) -> str:
        name = f"{FRESH_PREFIX}{self.n}"
        self.n += 1
        return name


def rename_apart(
    terms: Sequence[Term], counter: FreshCounter
) -> tuple[list[Term], FreshCounter]:
    """Consistently replace every variable in `terms` with a fresh one.

    Variables are renamed in first-encounter order (depth first, left to
    right, across the whole sequence); structure is otherwise unchanged.
    """
    mapping: dict[str, str] = {}

    def walk(term: Term) -> Term:
        if isinstance(term, Variable):
            if term.name not in mapping:
                mapping[term.name] = counter.fresh()
            return Variable(mapping[term.name])
        if isinstance(term, Compound):
            return Compound(term.functor, tuple(walk(a) for a in term.args))
        return term

    return [walk(t) for t in terms], counter
