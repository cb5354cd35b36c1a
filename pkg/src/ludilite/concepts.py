"""Playout batches and the concept values extracted from them.

Five concepts summarize gameplay: the share of turns with a real choice,
board coverage, timeout rate, and (for two or more players) win-rate
balance and completion. Two auxiliary features (normalized game length and
branching factor) extend the vector for concept-distance comparisons.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from itertools import combinations

from .engine import DEFAULT_MAX_TURNS, GameSpec, PlayoutTrace, random_playout


class EmptyStatsError(ValueError):
    """No completed playouts, so concept values cannot be computed."""


@dataclass(frozen=True)
class PlayoutStats:
    traces: tuple[PlayoutTrace, ...]
    wins_per_player: tuple[int, ...]  # index p-1 counts player p's wins
    draws: int
    timeouts: int
    elapsed: float
    requested: int
    budget_exceeded: bool

    @property
    def completed_playouts(self) -> int:
        return len(self.traces)


@dataclass(frozen=True)
class ConceptVector:
    decision_moves: float  # share of turns offering >= 2 moves
    coverage: float  # share of board sites ever occupied
    timeout_rate: float  # share of playouts ending by timeout
    balance: float | None  # 1 - mean pairwise win-rate gap; >= 2 players only
    completion: float | None  # share of playouts with a winner; >= 2 players only
    extended: tuple[float, float]  # (mean length / max_turns, mean branching / sites)

    def defined_items(self) -> list[tuple[str, float]]:
        items = [
            ("decision_moves", self.decision_moves),
            ("coverage", self.coverage),
            ("timeout_rate", self.timeout_rate),
        ]
        if self.balance is not None:
            items.append(("balance", self.balance))
        if self.completion is not None:
            items.append(("completion", self.completion))
        return items

    def as_vector(self) -> tuple[float, ...]:
        return tuple(v for _, v in self.defined_items()) + self.extended

    def to_dict(self) -> dict:
        return {
            "decision_moves": self.decision_moves,
            "coverage": self.coverage,
            "timeout_rate": self.timeout_rate,
            "balance": self.balance,
            "completion": self.completion,
            "extended": list(self.extended),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ConceptVector":
        return cls(
            decision_moves=data["decision_moves"],
            coverage=data["coverage"],
            timeout_rate=data["timeout_rate"],
            balance=data.get("balance"),
            completion=data.get("completion"),
            extended=tuple(data.get("extended", (0.0, 0.0))),
        )


def aligned_vectors(
    a: "ConceptVector", b: "ConceptVector"
) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """Flatten two concept vectors over their mutually defined components."""
    a_items = dict(a.defined_items())
    b_items = dict(b.defined_items())
    keys = [k for k, _ in a.defined_items() if k in b_items]
    va = tuple(a_items[k] for k in keys) + a.extended
    vb = tuple(b_items[k] for k in keys) + b.extended
    return va, vb


def run_playouts(
    spec: GameSpec,
    n: int,
    base_seed: int,
    max_turns: int = DEFAULT_MAX_TURNS,
    budget_secs: float = 180.0,
) -> PlayoutStats:
    """Run up to ``n`` playouts seeded ``base_seed .. base_seed+n-1``.

    The wall-clock budget covers the whole batch; once exceeded, remaining
    playouts are skipped and ``budget_exceeded`` is set.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    start = time.monotonic()
    traces: list[PlayoutTrace] = []
    wins = [0] * spec.num_players
    draws = 0
    timeouts = 0
    budget_exceeded = False
    for i in range(n):
        if budget_secs <= 0 or time.monotonic() - start > budget_secs:
            budget_exceeded = True
            break
        trace = random_playout(spec, base_seed + i, max_turns)
        traces.append(trace)
        if trace.outcome.kind == "win":
            wins[trace.outcome.winner - 1] += 1
        elif trace.outcome.kind == "draw":
            draws += 1
        else:
            timeouts += 1
    return PlayoutStats(
        traces=tuple(traces),
        wins_per_player=tuple(wins),
        draws=draws,
        timeouts=timeouts,
        elapsed=time.monotonic() - start,
        requested=n,
        budget_exceeded=budget_exceeded,
    )


def _per_trace_decision_share(trace: PlayoutTrace) -> float:
    if not trace.decision_points:
        return 0.0
    return sum(1 for d in trace.decision_points if d >= 2) / len(trace.decision_points)


def _per_trace_branching(trace: PlayoutTrace) -> float:
    if not trace.decision_points:
        return 0.0
    return sum(trace.decision_points) / len(trace.decision_points)


def extract_concepts(
    stats: PlayoutStats, spec: GameSpec, max_turns: int = DEFAULT_MAX_TURNS
) -> ConceptVector:
    """Concept values from a playout batch; raises on an empty batch."""
    completed = stats.completed_playouts
    if completed == 0:
        raise EmptyStatsError("no completed playouts")
    sites = spec.num_sites
    decision_moves = sum(_per_trace_decision_share(t) for t in stats.traces) / completed
    coverage = sum(t.final_touched / sites for t in stats.traces) / completed
    timeout_rate = stats.timeouts / completed
    balance = None
    completion = None
    if spec.num_players >= 2:
        rates = [w / completed for w in stats.wins_per_player]
        gaps = [abs(a - b) for a, b in combinations(rates, 2)]
        balance = 1.0 - sum(gaps) / len(gaps)
        completion = sum(stats.wins_per_player) / completed
    mean_length = sum(len(t.moves) for t in stats.traces) / completed
    mean_branching = sum(_per_trace_branching(t) for t in stats.traces) / completed
    return ConceptVector(
        decision_moves=decision_moves,
        coverage=coverage,
        timeout_rate=timeout_rate,
        balance=balance,
        completion=completion,
        extended=(mean_length / max_turns, mean_branching / sites),
    )
