"""Independent reference implementations used as test oracles.

Everything here is deliberately written along different lines from the
package code (recursive where the package iterates, position-indexed
where the package walks levels) so that agreement between the two is
meaningful.
"""

from __future__ import annotations

import itertools
import random

import numpy as np

from neurosld import (
    Compound,
    Constant,
    Goal,
    Rule,
    RuleSet,
    Substitution,
    Variable,
    cross_entropy,
    forward,
)
from neurosld.network import Layer, Network
from neurosld.terms import FreshCounter, Term, rename_apart, unify

CONSTANTS = ("a", "b", "c")
VARIABLES = ("X", "Y")


def random_term(rng: random.Random, max_depth: int) -> Term:
    """Random term over constants a,b,c, variables X,Y, functors f/2 and g/1."""
    if max_depth <= 1 or rng.random() < 0.4:
        if rng.random() < 0.45:
            return Variable(rng.choice(VARIABLES))
        return Constant(rng.choice(CONSTANTS))
    if rng.random() < 0.5:
        return Compound("f", (random_term(rng, max_depth - 1), random_term(rng, max_depth - 1)))
    return Compound("g", (random_term(rng, max_depth - 1),))


def enumerate_substitutions(term_a: Term, term_b: Term) -> list[Substitution]:
    """Every substitution mapping each variable of the pair into the three
    constants or the other variable."""
    names = sorted({v for t in (term_a, term_b) for v in _vars(t)})
    option_sets = []
    for name in names:
        options: list[Term] = [Constant(c) for c in CONSTANTS]
        options.extend(Variable(other) for other in names if other != name)
        option_sets.append(options)
    subs = []
    for combo in itertools.product(*option_sets):
        subs.append(Substitution(dict(zip(names, combo))))
    return subs


def _vars(term: Term) -> set[str]:
    if isinstance(term, Variable):
        return {term.name}
    if isinstance(term, Compound):
        out: set[str] = set()
        for arg in term.args:
            out |= _vars(arg)
        return out
    return set()


def most_generality_counterexamples(
    term_a: Term, term_b: Term, phi: Substitution
) -> list[Substitution]:
    """Enumerated unifiers sigma whose instance fails to unify with the
    phi-instance.  Empty means phi is most general over the enumeration."""
    bad = []
    for sigma in enumerate_substitutions(term_a, term_b):
        if sigma.apply(term_a) != sigma.apply(term_b):
            continue
        if unify(phi.apply(term_a), sigma.apply(term_a)) is None:
            bad.append(sigma)
    return bad


def ref_complete_and_flatten(term: Term, depth: int, breadth: int) -> list[str]:
    """Position-indexed reference flattener.

    Positions follow heap numbering: the root is 0 and the children of
    position p are p*b + 1 .. p*b + b.  Breadth-first output is then just
    the positions in increasing order.
    """
    total = sum(breadth**i for i in range(depth))
    slots = {i: "Empty" for i in range(total)}

    def place(node: Term, pos: int) -> None:
        if pos >= total:
            return
        if isinstance(node, Compound):
            slots[pos] = node.functor
            for k, arg in enumerate(node.args[:breadth]):
                place(arg, pos * breadth + 1 + k)
        else:
            slots[pos] = node.symbol if isinstance(node, Constant) else node.name

    place(term, 0)
    return [slots[i] for i in range(total)]


def ref_encode(tokens: list[str], symbol_ids: dict[str, int], width: int) -> np.ndarray:
    vec = np.zeros(len(tokens) * width)
    for i, tok in enumerate(tokens):
        if tok == "Empty":
            continue
        vec[i * width + symbol_ids[tok] - 1] = 1.0
    return vec


def enumerate_proofs(
    goal: Goal, rule_set: RuleSet, depth_limit: int
) -> list[tuple[Substitution, list[int]]]:
    """Recursive all-proofs enumerator with leftmost selection.

    Returns (accumulated substitution, rule id sequence) for every proof
    within the depth limit, independent of the package's iterative
    search.
    """
    counter = FreshCounter(10_000)
    proofs: list[tuple[Substitution, list[int]]] = []

    def recurse(literals: tuple[Term, ...], acc: Substitution, depth: int, rules_used: list[int]):
        if not literals:
            proofs.append((acc, list(rules_used)))
            return
        if depth >= depth_limit:
            return
        selected = literals[0]
        for rule_id in rule_set.sorted_ids():
            rule = rule_set.by_id(rule_id)
            renamed, _ = rename_apart([rule.positive, *rule.negatives], counter)
            mgu = unify(selected, renamed[0])
            if mgu is None:
                continue
            new_literals = tuple(
                mgu.apply(t) for t in (*renamed[1:], *literals[1:])
            )
            recurse(new_literals, acc.compose(mgu), depth + 1, rules_used + [rule.id])

    recurse(goal.literals, Substitution(), 0, [])
    return proofs


def finite_difference_gradients(
    net: Network, x: np.ndarray, target: np.ndarray, h: float = 1e-5
) -> list[tuple[np.ndarray, np.ndarray]]:
    """Central-difference loss gradients for every weight and bias."""

    def loss_with(layers: list[Layer]) -> float:
        pred, _ = forward(Network(tuple(layers)), x)
        return cross_entropy(pred, target)

    grads = []
    for index, layer in enumerate(net.layers):
        dw = np.zeros_like(layer.weights)
        db = np.zeros_like(layer.biases)
        for (i, j), _ in np.ndenumerate(layer.weights):
            plus = [l for l in net.layers]
            w = layer.weights.copy()
            w[i, j] += h
            plus[index] = Layer(layer.name, w, layer.biases.copy(), layer.activation)
            up = loss_with(plus)
            w = layer.weights.copy()
            w[i, j] -= h
            plus[index] = Layer(layer.name, w, layer.biases.copy(), layer.activation)
            down = loss_with(plus)
            dw[i, j] = (up - down) / (2 * h)
        for i in range(layer.biases.size):
            b = layer.biases.copy()
            b[i] += h
            plus = [l for l in net.layers]
            plus[index] = Layer(layer.name, layer.weights.copy(), b, layer.activation)
            up = loss_with(plus)
            b = layer.biases.copy()
            b[i] -= h
            plus[index] = Layer(layer.name, layer.weights.copy(), b, layer.activation)
            down = loss_with(plus)
            db[i] = (up - down) / (2 * h)
        grads.append((dw, db))
    return grads


def max_relative_error(
    analytic: list[tuple[np.ndarray, np.ndarray]],
    numeric: list[tuple[np.ndarray, np.ndarray]],
) -> float:
    worst = 0.0
    for (adw, adb), (ndw, ndb) in zip(analytic, numeric):
        for a, n in ((adw, ndw), (adb, ndb)):
            denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), 1e-6)
            worst = max(worst, float((np.abs(a - n) / denom).max()))
    return worst


def random_flat_kb(rng: random.Random, max_rules: int = 10) -> tuple[RuleSet, Goal, int]:
    """Random knowledge base of flat literals plus a random goal and a
    depth limit, for policy-equivalence checks."""
    predicates = (("p", 1), ("q", 2), ("r", 2))
    constants = ("a", "b", "c")
    variables = ("X", "Y", "Z")

    def literal() -> Term:
        name, arity = rng.choice(predicates)
        args = tuple(
            Variable(rng.choice(variables))
            if rng.random() < 0.4
            else Constant(rng.choice(constants))
            for _ in range(arity)
        )
        return Compound(name, args)

    n_rules = rng.randint(2, max_rules)
    rules = []
    for rule_id in range(1, n_rules + 1):
        n_premises = rng.choice([0, 0, 0, 0, 1, 1, 1, 2, 2])
        rules.append(
            Rule(
                rule_id,
                f"r{rule_id}",
                literal(),
                tuple(literal() for _ in range(n_premises)),
            )
        )
    goal = Goal((literal(),))
    depth_limit = rng.randint(2, 6)
    return RuleSet(tuple(rules)), goal, depth_limit
