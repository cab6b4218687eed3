"""Bundled worked problems: the three-rule "bigger" base and a
transitive-chain benchmark for measuring search-space reduction.

The chain benchmark is built so that static (ascending-id) search gets
lost: twenty decoy facts over the same predicate sit at the lowest ids
and form a dead-end tree hanging off the start of the true chain, the
ten true chain facts bigger(i+1, i) occupy the middle ids, and the
transitivity rule has the highest id.  A goal spanning the whole chain
then forces static order to exhaust any reasonable node budget inside
the decoy subtrees, while a network educated on short-span chain goals
ranks the true facts first and proves the goal directly.
"""

from __future__ import annotations

from dataclasses import dataclass

from .curriculum import Stage
from .encoding import EncodingConfig
from .knowledge import Goal, Rule, RuleSet, SymbolSet, parse_term, symbol_set_covering
from .network import Network, TrainingParams, init_network


def bigger_rule_set() -> RuleSet:
    """Rules 1..3: two facts and transitivity over "bigger"."""
    return RuleSet(
        (
            Rule(1, "Bigger42", parse_term("[bigger,4,2]"), ()),
            Rule(2, "Bigger21", parse_term("[bigger,2,1]"), ()),
            Rule(
                3,
                "BiggerABC",
                parse_term("[bigger,A,C]"),
                (parse_term("[bigger,A,B]"), parse_term("[bigger,B,C]")),
            ),
        )
    )


def bigger_symbol_set() -> SymbolSet:
    return SymbolSet(((1, "Vble"), (2, "bigger"), (3, "1"), (4, "2"), (5, "4")))


def bigger_config(output_dim: int = 3) -> EncodingConfig:
    return EncodingConfig(depth=2, breadth=3, symbol_set=bigger_symbol_set(), output_dim=output_dim)


def bigger_goal() -> Goal:
    return Goal((parse_term("[bigger,X,Y]"),))


def bigger_network(seed: int = 5, hidden: int = 16, scale: float = 0.5) -> Network:
    config = bigger_config()
    return init_network(
        (
            ("hidden", config.input_length, hidden, "sigmoid", scale),
            ("output", hidden, config.output_dim, "softmax", scale),
        ),
        seed,
    )


@dataclass
class ChainBenchmark:
    rule_set: RuleSet
    symbol_set: SymbolSet
    config: EncodingConfig
    network: Network
    params: TrainingParams
    schedule: list[Stage]
    test_goal: Goal
    test_depth_limit: int
    test_node_budget: int


def _decoy_edges(root: int, count: int) -> list[tuple[str, str]]:
    """Binary dead-end tree of `count` edges rooted at `root`; decoy
    nodes are the constants 101, 102, ..."""
    edges: list[tuple[str, str]] = []
    frontier = [str(root)]
    next_node = 101
    while len(edges) < count:
        parent = frontier.pop(0)
        for _ in range(2):
            if len(edges) >= count:
                break
            child = str(next_node)
            next_node += 1
            edges.append((parent, child))
            frontier.append(child)
    return edges


def chain_benchmark(
    chain_length: int = 10,
    decoy_count: int = 20,
    spans: tuple[int, ...] = (1, 2, 3),
    seed: int = 6,
    hidden: int = 64,
    scale: float = 0.3,
    epochs: int = 30,
    learning_rate: float = 0.5,
    test_depth_limit: int = 25,
    test_node_budget: int = 2000,
) -> ChainBenchmark:
    """Chain facts bigger(i+1, i) for i = 1..chain_length at middle ids,
    decoy facts at ids 1..decoy_count, transitivity at the highest id.

    The schedule holds learn stages for every chain goal of each span in
    `spans` (simplest first) and one test stage spanning the full chain.
    """
    top = chain_length + 1
    rules: list[Rule] = []
    for rule_id, (parent, child) in enumerate(_decoy_edges(top, decoy_count), start=1):
        rules.append(
            Rule(rule_id, f"decoy{rule_id}", parse_term(f"[bigger,{parent},{child}]"), ())
        )
    for i in range(1, chain_length + 1):
        rules.append(
            Rule(
                decoy_count + i,
                f"chain{i + 1}_{i}",
                parse_term(f"[bigger,{i + 1},{i}]"),
                (),
            )
        )
    trans_id = decoy_count + chain_length + 1
    rules.append(
        Rule(
            trans_id,
            "trans",
            parse_term("[bigger,A,C]"),
            (parse_term("[bigger,A,B]"), parse_term("[bigger,B,C]")),
        )
    )
    rule_set = RuleSet(tuple(rules))
    symbol_set = symbol_set_covering(rule_set)
    config = EncodingConfig(
        depth=2, breadth=2, symbol_set=symbol_set, output_dim=rule_set.max_rule_id
    )
    network = init_network(
        (
            ("hidden", config.input_length, hidden, "sigmoid", scale),
            ("output", hidden, config.output_dim, "softmax", scale),
        ),
        seed,
    )
    schedule: list[Stage] = []
    for span in spans:
        for low in range(1, top - span + 1):
            goal = Goal((parse_term(f"[bigger,{low + span},{low}]"),))
            schedule.append(
                Stage(goal, "learn", depth_limit=2 * span - 1, node_budget=2000)
            )
    test_goal = Goal((parse_term(f"[bigger,{top},1]"),))
    schedule.append(
        Stage(test_goal, "test", depth_limit=test_depth_limit, node_budget=test_node_budget)
    )
    return ChainBenchmark(
        rule_set=rule_set,
        symbol_set=symbol_set,
        config=config,
        network=network,
        params=TrainingParams(epochs=epochs, learning_rate=learning_rate, seed=seed),
        schedule=schedule,
        test_goal=test_goal,
        test_depth_limit=test_depth_limit,
        test_node_budget=test_node_budget,
    )
