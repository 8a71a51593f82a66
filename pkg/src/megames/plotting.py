"""Figure rendering for simulation reports.

The CLI writes delimited data to stdout; these helpers render the same
report as a matplotlib figure saved next to it.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .epistemic import BeliefTrajectory


def render_trajectory(trajectory: BeliefTrajectory, path: str, title: str = "") -> None:
    """One line per tracked player type: belief probability against round."""
    rounds = [r for r, _ in trajectory.rounds]
    player_types = sorted({t for _, dist in trajectory.rounds for t in dist.support})
    fig, ax = plt.subplots(figsize=(6, 4))
    for ptype in player_types:
        values = [float(dist[ptype]) for _, dist in trajectory.rounds]
        ax.plot(rounds, values, marker="o", label=str(ptype))
    ax.set_xlabel("round")
    ax.set_ylabel("belief probability")
    ax.set_ylim(0.0, 1.0)
    ax.set_xticks(rounds)
    ax.grid(True, alpha=0.4)
    ax.legend(title=trajectory.jury_type)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def render_agreement_grid(
    grid: list[tuple[float, float, bool]], path: str, title: str = ""
) -> None:
    """Scatter of prior pairs, agreement in blue, persisting dispute in red."""
    fig, ax = plt.subplots(figsize=(5, 5))
    agreed = [(a, b) for a, b, ok in grid if ok]
    disputed = [(a, b) for a, b, ok in grid if not ok]
    if agreed:
        ax.scatter(*zip(*agreed), c="tab:blue", s=18, label="agreed")
    if disputed:
        ax.scatter(*zip(*disputed), c="tab:red", s=18, label="disagreed")
    ax.set_xlabel("player 0 prior")
    ax.set_ylabel("player 1 prior")
    ax.set_xlim(-0.05, 1.05)
    ax.set_ylim(-0.05, 1.05)
    ax.legend(loc="upper left")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
