"""Render report figures to files next to the delimited outputs."""

from __future__ import annotations

import os
from typing import Sequence


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_loss_curves(
    curves: Sequence[tuple[str, Sequence[float]]], path: str | os.PathLike
) -> None:
    """One line per training round: epoch against mean cross-entropy."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for label, losses in curves:
        if not losses:
            continue
        ax.plot(range(1, len(losses) + 1), losses, label=label, linewidth=1.2)
    ax.set_xlabel("epoch")
    ax.set_ylabel("mean cross-entropy")
    ax.set_title("training loss per education round")
    if any(losses for _, losses in curves):
        ax.legend(fontsize=7, ncol=2)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_compare_chart(
    rows: Sequence[dict], path: str | os.PathLike
) -> None:
    """Grouped bars of nodes expanded per goal for each policy.

    Rows are compare-CSV dictionaries with goal, policy, and
    nodes_expanded keys.
    """
    plt = _pyplot()
    goals: list[str] = []
    policies: list[str] = []
    counts: dict[tuple[str, str], int] = {}
    for row in rows:
        goal, policy = row["goal"], row["policy"]
        if goal not in goals:
            goals.append(goal)
        if policy not in policies:
            policies.append(policy)
        counts[(goal, policy)] = int(row["nodes_expanded"])
    fig, ax = plt.subplots(figsize=(7, 4.5))
    width = 0.8 / max(len(policies), 1)
    for offset, policy in enumerate(policies):
        xs = [i + offset * width for i in range(len(goals))]
        ys = [counts.get((g, policy), 0) for g in goals]
        ax.bar(xs, ys, width=width, label=policy)
    ax.set_xticks([i + width * (len(policies) - 1) / 2 for i in range(len(goals))])
    ax.set_xticklabels(goals, rotation=30, ha="right", fontsize=7)
    ax.set_ylabel("nodes expanded")
    ax.set_title("search effort by policy")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
