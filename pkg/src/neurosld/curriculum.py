"""The education loop: solve scheduled goals, learn from the successes.

A schedule runs goals from simplest to hardest.  Every goal is resolved
with the guided policy under its own depth limit and node budget; when
a learn stage succeeds, its (literal, rule id) records join the
accumulated corpus and the network is retrained on the whole corpus
before the next stage.  Test stages never contribute records and never
change the network.  Retraining on all accumulated records (rather
than only the newest goal's) avoids forgetting early stages at this
scale; failures are recorded in the report and education continues.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass

import numpy as np

from .encoding import EncodingConfig, EncodingError, encode_literal, encode_rule_target
from .knowledge import Goal, ParseError, RuleSet, SymbolSet, parse_term, validate_coverage
from .network import Network, TrainingParams, backprop_update
from .resolver import Guided, ProofResult, TraceRecord, proof_to_dict, solve
from .terms import render_term

LEARN = "learn"
TEST = "test"


class EducationError(ValueError):
    pass


@dataclass(frozen=True)
class Stage:
    goal: Goal
    purpose: str
    depth_limit: int
    node_budget: int

    def __post_init__(self) -> None:
        if self.purpose not in (LEARN, TEST):
            raise ValueError(f"stage purpose must be learn or test, got {self.purpose!r}")
        if self.depth_limit < 1:
            raise ValueError("stage depth_limit must be >= 1")
        if self.node_budget < 1:
            raise ValueError("stage node_budget must be >= 1")


def parse_schedule(text: str) -> list[Stage]:
    """Parse a JSON schedule: a nonempty array of stage objects with the
    keys goal (a literal string or list of them), purpose, depth_limit,
    and node_budget."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"schedule is not valid JSON: {exc.msg}") from exc
    if not isinstance(data, list) or not data:
        raise ParseError("schedule must be a nonempty JSON array of stages")
    stages: list[Stage] = []
    for index, entry in enumerate(data, start=1):
        if not isinstance(entry, dict):
            raise ParseError(f"stage {index}: must be a JSON object")
        missing = {"goal", "purpose", "depth_limit", "node_budget"} - set(entry)
        if missing:
            raise ParseError(f"stage {index}: missing keys {sorted(missing)}")
        raw_goal = entry["goal"]
        if isinstance(raw_goal, str):
            raw_goal = [raw_goal]
        if not isinstance(raw_goal, list) or not all(isinstance(g, str) for g in raw_goal):
            raise ParseError(f"stage {index}: goal must be a string or list of strings")
        try:
            goal = Goal(tuple(parse_term(g) for g in raw_goal))
            stage = Stage(goal, entry["purpose"], entry["depth_limit"], entry["node_budget"])
        except (ParseError, ValueError, TypeError) as exc:
            raise ParseError(f"stage {index}: {exc}") from exc
        stages.append(stage)
    return stages


def train_from_traces(
    records: list[TraceRecord],
    network: Network,
    config: EncodingConfig,
    params: TrainingParams,
) -> tuple[Network, list[float]]:
    """Train on (literal, rule id) records with per-record SGD.

    Runs `params.epochs` passes over the records in a seed-derived
    shuffled order (reshuffled every epoch) and returns the new network
    together with the per-epoch mean cross-entropy.  An empty record
    list is a no-op: the network is returned unchanged with no losses.
    """
    if not records:
        return network, []
    examples = []
    for index, record in enumerate(records):
        try:
            x = encode_literal(record.literal, config)
            t = encode_rule_target(record.rule_id, config.output_dim)
        except EncodingError as exc:
            raise EncodingError(
                f"record {index} ({render_term(record.literal)} -> rule {record.rule_id}): {exc}"
            ) from exc
        examples.append((x, t))
    rng = np.random.default_rng(params.seed)
    losses: list[float] = []
    for _ in range(params.epochs):
        order = rng.permutation(len(examples))
        total = 0.0
        for i in order:
            x, t = examples[i]
            network, loss = backprop_update(network, x, t, params.learning_rate)
            total += loss
        losses.append(total / len(examples))
    return network, losses


@dataclass
class StageReport:
    index: int
    goal_text: list[str]
    purpose: str
    result: ProofResult
    losses: list[float]
    records_total: int

    @property
    def status(self) -> str:
        return self.result.status


@dataclass
class EducationReport:
    stages: list[StageReport]
    network: Network
    records: list[TraceRecord]

    @property
    def all_tests_proved(self) -> bool:
        return all(s.result.proved for s in self.stages if s.purpose == TEST)


def educate(
    schedule: list[Stage],
    rule_set: RuleSet,
    symbol_set: SymbolSet,
    network: Network,
    config: EncodingConfig,
    params: TrainingParams,
    occurs_check: bool = True,
) -> EducationReport:
    """Run the schedule in order, training after each successful learn stage."""
    if not schedule:
        raise EducationError("schedule must contain at least one stage")
    goal_literals = [lit for stage in schedule for lit in stage.goal.literals]
    missing = validate_coverage(rule_set, symbol_set, goal_literals)
    if missing:
        raise EducationError(
            "symbol set does not cover the rules and goals; missing: "
            + ", ".join(missing)
        )
    if config.output_dim < rule_set.max_rule_id:
        raise EducationError(
            f"output dimension {config.output_dim} is smaller than the "
            f"maximum rule id {rule_set.max_rule_id}"
        )
    if network.input_dim != config.input_length or network.output_dim != config.output_dim:
        raise EducationError(
            f"network dimensions ({network.input_dim} -> {network.output_dim}) do not "
            f"match the encoding ({config.input_length} -> {config.output_dim})"
        )

    records: list[TraceRecord] = []
    stage_reports: list[StageReport] = []
    for index, stage in enumerate(schedule, start=1):
        policy = Guided(network, config)
        result = solve(
            stage.goal,
            rule_set,
            policy,
            stage.depth_limit,
            mode="first",
            node_budget=stage.node_budget,
            occurs_check=occurs_check,
        )[0]
        losses: list[float] = []
        if stage.purpose == LEARN and result.proved:
            records.extend(result.trace)
            network, losses = train_from_traces(records, network, config, params)
        stage_reports.append(
            StageReport(
                index=index,
                goal_text=[render_term(t) for t in stage.goal.literals],
                purpose=stage.purpose,
                result=result,
                losses=losses,
                records_total=len(records),
            )
        )
    return EducationReport(stage_reports, network, records)


def report_to_dict(report: EducationReport, params: TrainingParams, config: EncodingConfig) -> dict:
    return {
        "config": {
            "epochs": params.epochs,
            "learning_rate": params.learning_rate,
            "seed": params.seed,
            "breadth": config.breadth,
            "depth": config.depth,
            "output_dim": config.output_dim,
        },
        "stages": [
            {
                "stage": s.index,
                "goal": s.goal_text,
                "purpose": s.purpose,
                "records_total": s.records_total,
                "losses": s.losses,
                **proof_to_dict(s.result),
            }
            for s in report.stages
        ],
        "all_tests_proved": report.all_tests_proved,
    }


def write_report_json(
    path: str | os.PathLike,
    report: EducationReport,
    params: TrainingParams,
    config: EncodingConfig,
) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(report_to_dict(report, params, config), handle, indent=2)
        handle.write("\n")


def write_losses_csv(path: str | os.PathLike, report: EducationReport) -> None:
    """CSV of (stage, epoch, mean_loss) for every training round run."""
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["stage", "epoch", "mean_loss"])
        for stage in report.stages:
            for epoch, loss in enumerate(stage.losses, start=1):
                writer.writerow([stage.index, epoch, repr(loss)])
