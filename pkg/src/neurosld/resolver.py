"""Depth-limited SLD resolution with backtracking and pluggable rule order.

The solver always selects the leftmost goal literal, renames each rule
apart before unification, and walks the search tree depth first with an
explicit stack, so deep searches cannot exhaust the call stack.  Rule
trial order at every node comes from a policy: static order (ascending
rule id), exhaustive (static order, enumerating every solution), or
guided (a trained network ranks the rules for the selected literal).
A guided policy never drops rules from consideration; it only permutes
the order in which they are tried.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

from .encoding import EncodingConfig, decode_ranking, encode_literal
from .knowledge import Goal, Rule, RuleSet, parse_term, render_term
from .network import Network, forward
from .terms import (
    FRESH_PREFIX,
    Compound,
    FreshCounter,
    Substitution,
    Term,
    Variable,
    rename_apart,
    term_variables,
    unify,
)

PROVED = "proved"
EXHAUSTED = "exhausted"
DEPTH_LIMITED = "depth_limited"
BUDGET_EXHAUSTED = "budget_exhausted"

MODE_FIRST = "first"
MODE_ALL = "all"


class StaticOrder:
    """Try rules by ascending id."""

    name = "static"
    enumerate_all = False

    def rule_order(self, literal: Term, rule_set: RuleSet) -> list[int]:
        return rule_set.sorted_ids()


class Exhaustive(StaticOrder):
    """Static order, enumerating every solution within the depth limit."""

    name = "exhaustive"
    enumerate_all = True


class Guided:
    """Try rules in the ranking order predicted by a network.

    Ranked ids that do not exist in the rule set are skipped when rules
    are applied; the network output dimension must cover every rule id
    so that no rule is ever dropped.
    """

    name = "guided"
    enumerate_all = False

    def __init__(self, network: Network, config: EncodingConfig) -> None:
        if network.output_dim != config.output_dim:
            raise ValueError(
                f"network output dimension {network.output_dim} does not match "
                f"the encoding output dimension {config.output_dim}"
            )
        if network.input_dim != config.input_length:
            raise ValueError(
                f"network input dimension {network.input_dim} does not match "
                f"the encoding input length {config.input_length}"
            )
        self.network = network
        self.config = config

    def rule_order(self, literal: Term, rule_set: RuleSet) -> list[int]:
        ranking = rank_rules(literal, self.network, self.config)
        return [rule_id for rule_id in ranking if rule_set.by_id(rule_id) is not None]


Policy = StaticOrder | Guided


def rank_rules(literal: Term, network: Network, config: EncodingConfig) -> list[int]:
    """Ranking of rule ids 1..output_dim for a goal literal."""
    output, _ = forward(network, encode_literal(literal, config))
    return decode_ranking(output)


@dataclass(frozen=True)
class TraceRecord:
    """A selected literal (as it appeared at selection time, with the
    substitutions accumulated so far applied) and the id of the rule
    that was applied to it."""

    literal: Term
    rule_id: int


@dataclass
class SearchStats:
    nodes_expanded: int = 0
    backtracks: int = 0
    max_depth_reached: int = 0

    def snapshot(self) -> "SearchStats":
        return SearchStats(self.nodes_expanded, self.backtracks, self.max_depth_reached)


@dataclass
class ProofResult:
    status: str
    answer: Substitution | None
    trace: tuple[TraceRecord, ...]
    stats: SearchStats

    @property
    def proved(self) -> bool:
        return self.status == PROVED


def resolve_step(
    literals: tuple[Term, ...],
    index: int,
    rule: Rule,
    counter: FreshCounter,
    occurs_check: bool = True,
) -> tuple[tuple[Term, ...], Substitution] | None:
    """Apply one rule at the literal at `index`.

    The rule is renamed apart, its conclusion unified with the selected
    literal, and on success the literal is replaced in place by the
    rule's premises (in clause order) with the step MGU applied to every
    literal.  Assertions shrink the goal by one literal.  Returns None
    when the selected literal does not unify with the rule's conclusion.
    """
    if not 0 <= index < len(literals):
        raise IndexError(f"literal index {index} out of range")
    renamed, _ = rename_apart([rule.positive, *rule.negatives], counter)
    mgu = unify(literals[index], renamed[0], occurs_check=occurs_check)
    if mgu is None:
        return None
    new_literals = tuple(
        mgu.apply(t)
        for t in (*literals[:index], *renamed[1:], *literals[index + 1 :])
    )
    return new_literals, mgu


@dataclass
class _Frame:
    literals: tuple[Term, ...]
    subst: Substitution
    depth: int
    trace: tuple[TraceRecord, ...]
    candidates: object = None  # iterator over rule ids, created on first visit


def _canonical_answer(subst: Substitution, goal_vars: list[str]) -> Substitution:
    """Restrict to the goal's variables and renumber residual fresh
    variables (reserved _V names) canonically, so equal answers render
    identically regardless of search order."""
    restricted = subst.restrict(goal_vars)
    renaming: dict[str, str] = {}

    def walk(term: Term) -> Term:
        if isinstance(term, Variable) and term.name.startswith(FRESH_PREFIX):
            if term.name not in renaming:
                renaming[term.name] = f"{FRESH_PREFIX}{len(renaming)}"
            return Variable(renaming[term.name])
        if isinstance(term, Compound):
            return Compound(term.functor, tuple(walk(a) for a in term.args))
        return term

    ordered: dict[str, Term] = {}
    for name in goal_vars:
        bound = restricted.get(name)
        if bound is not None:
            ordered[name] = walk(bound)
    return Substitution(ordered)


def solve(
    goal: Goal,
    rule_set: RuleSet,
    policy: Policy,
    depth_limit: int,
    mode: str | None = None,
    node_budget: int | None = None,
    occurs_check: bool = True,
) -> list[ProofResult]:
    """Depth-first SLD resolution of `goal` against `rule_set`.

    The depth limit counts resolution steps along the current branch.
    An optional node budget caps the number of goal expansions, making
    "too hard" measurable without wall clocks.  Mode "first" stops at
    the first proof; "all" enumerates every proof in the search space.
    Unprovability is reported as a status, never as an error: the result
    list always contains at least one entry, and each proved entry holds
    the answer substitution restricted to the goal's original variables,
    the (literal, rule id) trace of its branch, and a stats snapshot.
    """
    if depth_limit < 0:
        raise ValueError("depth limit must be >= 0")
    if mode is None:
        mode = MODE_ALL if policy.enumerate_all else MODE_FIRST
    if policy.enumerate_all:
        mode = MODE_ALL
    if mode not in (MODE_FIRST, MODE_ALL):
        raise ValueError(f"unknown mode {mode!r}")
    if isinstance(policy, Guided) and policy.config.output_dim < rule_set.max_rule_id:
        raise ValueError(
            "guided policy would drop rules: network output dimension "
            f"{policy.config.output_dim} < max rule id {rule_set.max_rule_id}"
        )

    goal_vars: list[str] = []
    for literal in goal.literals:
        for name in term_variables(literal):
            if name not in goal_vars:
                goal_vars.append(name)

    counter = FreshCounter()
    stats = SearchStats()
    results: list[ProofResult] = []
    depth_cut = False
    budget_hit = False

    stack: list[_Frame] = [_Frame(goal.literals, Substitution(), 0, ())]
    while stack:
        frame = stack[-1]
        if frame.candidates is None:
            stats.max_depth_reached = max(stats.max_depth_reached, frame.depth)
            if not frame.literals:
                results.append(
                    ProofResult(
                        PROVED,
                        _canonical_answer(frame.subst, goal_vars),
                        frame.trace,
                        stats.snapshot(),
                    )
                )
                if mode == MODE_FIRST:
                    return results
                stack.pop()
                if stack:
                    stats.backtracks += 1
                continue
            if frame.depth >= depth_limit:
                depth_cut = True
                stack.pop()
                if stack:
                    stats.backtracks += 1
                continue
            if node_budget is not None and stats.nodes_expanded >= node_budget:
                budget_hit = True
                break
            stats.nodes_expanded += 1
            frame.candidates = iter(policy.rule_order(frame.literals[0], rule_set))

        child: _Frame | None = None
        selected = frame.literals[0]
        for rule_id in frame.candidates:  # type: ignore[union-attr]
            rule = rule_set.by_id(rule_id)
            if rule is None:
                continue
            step = resolve_step(frame.literals, 0, rule, counter, occurs_check)
            if step is None:
                continue
            new_literals, mgu = step
            child = _Frame(
                new_literals,
                frame.subst.compose(mgu),
                frame.depth + 1,
                frame.trace + (TraceRecord(selected, rule.id),),
            )
            break
        if child is not None:
            stack.append(child)
        else:
            stack.pop()
            if stack:
                stats.backtracks += 1

    if not results:
        if budget_hit:
            status = BUDGET_EXHAUSTED
        elif depth_cut:
            status = DEPTH_LIMITED
        else:
            status = EXHAUSTED
        results.append(ProofResult(status, None, (), stats.snapshot()))
    return results


def replay_trace(
    goal: Goal,
    rule_set: RuleSet,
    trace: tuple[TraceRecord, ...] | list[TraceRecord],
    occurs_check: bool = True,
) -> tuple[tuple[Term, ...], Substitution]:
    """Re-run a recorded proof with leftmost selection.

    Returns the final goal literals (empty for a complete proof) and the
    accumulated substitution.  Raises ValueError if a recorded rule is
    missing or fails to unify during replay.
    """
    counter = FreshCounter()
    literals = goal.literals
    acc = Substitution()
    for record in trace:
        rule = rule_set.by_id(record.rule_id)
        if rule is None:
            raise ValueError(f"trace references unknown rule id {record.rule_id}")
        if not literals:
            raise ValueError("trace continues past the empty goal")
        step = resolve_step(literals, 0, rule, counter, occurs_check)
        if step is None:
            raise ValueError(
                f"rule {record.rule_id} no longer applies to {render_term(literals[0])}"
            )
        literals, mgu = step
        acc = acc.compose(mgu)
    return literals, acc


def proof_to_dict(result: ProofResult) -> dict:
    entry: dict = {"status": result.status}
    if result.answer is not None:
        entry["answer"] = {
            name: render_term(term) for name, term in sorted(result.answer.items())
        }
    entry["trace"] = [
        {"literal": render_term(r.literal), "rule_id": r.rule_id} for r in result.trace
    ]
    entry["stats"] = {
        "nodes_expanded": result.stats.nodes_expanded,
        "backtracks": result.stats.backtracks,
        "max_depth_reached": result.stats.max_depth_reached,
    }
    return entry


def write_trace_file(
    path: str | os.PathLike, goal: Goal, results: list[ProofResult]
) -> None:
    """JSON-lines trace log: a goal/status header per result followed by
    one {"literal": ..., "rule_id": ...} line per record."""
    with open(path, "w", encoding="utf-8") as handle:
        for result in results:
            header = {
                "goal": [render_term(t) for t in goal.literals],
                "status": result.status,
            }
            handle.write(json.dumps(header) + "\n")
            for record in result.trace:
                line = {"literal": render_term(record.literal), "rule_id": record.rule_id}
                handle.write(json.dumps(line) + "\n")


def read_trace_file(
    path: str | os.PathLike,
) -> list[tuple[list[str], str, list[TraceRecord]]]:
    """Parse a trace log back into (goal literals, status, records) groups."""
    groups: list[tuple[list[str], str, list[TraceRecord]]] = []
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line:
                continue
            obj = json.loads(line)
            if "goal" in obj:
                groups.append((list(obj["goal"]), obj["status"], []))
            elif "literal" in obj:
                if not groups:
                    raise ValueError(f"line {lineno}: record before any goal header")
                groups[-1][2].append(
                    TraceRecord(
                        parse_term(obj["literal"], allow_reserved=True), obj["rule_id"]
                    )
                )
            else:
                raise ValueError(f"line {lineno}: unrecognized trace entry")
    return groups
