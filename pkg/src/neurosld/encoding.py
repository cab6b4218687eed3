"""Bridge between symbolic literals and numeric vectors.

A literal is vectorized in four steps: variables collapse to the
reserved marker "Vble", the term is completed into a fixed tree of
`depth` levels and `breadth` children per node (missing positions hold
"Empty", surplus positions are dropped), the completed tree is
flattened breadth first, and each token becomes a one-hot block of
width max_symbol_id indexed by its symbol id.  "Empty" encodes to a
zero block.  Rule targets are one-hot by rule id, and network outputs
decode to a ranking of rule ids by descending score.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .knowledge import VBLE, SymbolSet
from .terms import Compound, Constant, Term, Variable, render_term

EMPTY = "Empty"


class EncodingError(ValueError):
    pass


class TruncationWarning(UserWarning):
    """A literal exceeded the configured depth or breadth and was cut."""


@dataclass(frozen=True)
class EncodingConfig:
    depth: int
    breadth: int
    symbol_set: SymbolSet
    output_dim: int

    def __post_init__(self) -> None:
        if self.depth < 1 or self.breadth < 1 or self.output_dim < 1:
            raise ValueError("depth, breadth, and output_dim must be >= 1")

    @property
    def positions(self) -> int:
        """Number of nodes in the completed breadth-ary tree of `depth` levels."""
        return sum(self.breadth**i for i in range(self.depth))

    @property
    def input_length(self) -> int:
        return self.positions * self.symbol_set.max_symbol_id


def normalize_variables(term: Term) -> Term:
    """Replace every variable by the constant marker "Vble"."""
    if isinstance(term, Variable):
        return Constant(VBLE)
    if isinstance(term, Compound):
        return Compound(term.functor, tuple(normalize_variables(a) for a in term.args))
    return term


def complete_and_flatten(term: Term, depth: int, breadth: int) -> list[str]:
    """Tokens of the completed tree in level order, left to right.

    A compound node is labelled by its functor with the argument terms
    as children; a constant is its own label with all-Empty children.
    Arguments beyond `breadth` and levels beyond `depth` are dropped
    silently apart from a TruncationWarning.
    """
    truncated = False
    tokens: list[str] = []
    level: list[Term | None] = [term]
    for level_index in range(depth):
        next_level: list[Term | None] = []
        for node in level:
            if node is None:
                tokens.append(EMPTY)
                next_level.extend([None] * breadth)
                continue
            if isinstance(node, Variable):
                raise EncodingError(
                    f"literal must be variable-normalized before flattening, "
                    f"found variable {node.name!r}"
                )
            if isinstance(node, Constant):
                tokens.append(node.symbol)
                next_level.extend([None] * breadth)
                continue
            tokens.append(node.functor)
            if len(node.args) > breadth:
                truncated = True
            children: list[Term | None] = list(node.args[:breadth])
            children.extend([None] * (breadth - len(children)))
            if level_index == depth - 1:
                # The children would fall below the last level.
                if any(c is not None for c in children):
                    truncated = True
            next_level.extend(children)
        level = next_level
    if truncated:
        warnings.warn(
            f"term {render_term(term)} exceeds depth {depth} or breadth {breadth}; "
            "surplus positions were dropped",
            TruncationWarning,
            stacklevel=2,
        )
    return tokens


def encode_literal(literal: Term, config: EncodingConfig) -> np.ndarray:
    """One-hot vector of the literal under the configured tree layout."""
    normalized = normalize_variables(literal)
    tokens = complete_and_flatten(normalized, config.depth, config.breadth)
    width = config.symbol_set.max_symbol_id
    vector = np.zeros(len(tokens) * width, dtype=np.float64)
    for position, token in enumerate(tokens):
        if token == EMPTY:
            continue
        symbol_id = config.symbol_set.id_of(token)
        if symbol_id is None:
            raise EncodingError(f"unknown symbol {token!r} in {render_term(literal)}")
        vector[position * width + (symbol_id - 1)] = 1.0
    return vector


def encode_rule_target(rule_id: int, output_dim: int) -> np.ndarray:
    """One-hot target of length `output_dim` at position `rule_id`."""
    if not 1 <= rule_id <= output_dim:
        raise EncodingError(
            f"rule id {rule_id} out of range for output dimension {output_dim}"
        )
    vector = np.zeros(output_dim, dtype=np.float64)
    vector[rule_id - 1] = 1.0
    return vector


def decode_ranking(output: np.ndarray) -> list[int]:
    """Rule ids 1..len(output) sorted by score descending, ties by id."""
    scores = np.asarray(output, dtype=np.float64)
    if scores.ndim != 1 or scores.size == 0:
        raise EncodingError("output must be a nonempty vector")
    return sorted(range(1, scores.size + 1), key=lambda k: (-scores[k - 1], k))
