"""Rewarding of candidate game descriptions against a reference.

A candidate earns a grammar reward (viable-prefix fraction) plus a concept
reward: one minus weighted Gaussian-kernel penalties between its playout
concepts and the reference's. Non-functional candidates get no concept
reward; functional ones whose concepts cannot be computed within the
playout budget keep a small floor reward. Group advantages normalize a
batch of rewards for an external policy-optimization loop.
"""

from __future__ import annotations

import hashlib
import logging
import math
from dataclasses import asdict, dataclass, replace
from enum import Enum
from typing import Sequence

from .concepts import ConceptVector, EmptyStatsError, extract_concepts, run_playouts
from .engine import CompileError, check_functionality, compile_game
from .grammar import Grammar, grammar_reward

logger = logging.getLogger(__name__)

_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class RewardConfig:
    sigma: float = 0.3
    weight_per_item: float = 0.18
    lambda_c: float = 1.0
    floor_reward: float = 0.1
    playouts_gt: int = 50
    playouts_pred: int = 10
    max_turns: int = 250
    budget_secs: float = 180.0
    probe_seeds: int = 10

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be > 0")
        if self.weight_per_item < 0:
            raise ValueError("weight_per_item must be >= 0")
        if self.lambda_c < 0:
            raise ValueError("lambda_c must be >= 0")
        for field in ("playouts_gt", "playouts_pred", "max_turns", "probe_seeds"):
            if getattr(self, field) < 1:
                raise ValueError(f"{field} must be >= 1")
        if self.budget_secs < 0:
            raise ValueError("budget_secs must be >= 0")

    def with_overrides(self, overrides: dict | None) -> "RewardConfig":
        if not overrides:
            return self
        unknown = set(overrides) - set(asdict(self))
        if unknown:
            raise ValueError(f"unknown config field(s): {', '.join(sorted(unknown))}")
        return replace(self, **overrides)

    def to_dict(self) -> dict:
        return asdict(self)


class CandidateFailure(Enum):
    NON_FUNCTIONAL = "non-functional"
    UNCOMPUTABLE = "uncomputable"


class GroundTruthError(Exception):
    """The reference description is unusable (does not compile, is not
    functional, or its concepts cannot be computed)."""


@dataclass(frozen=True)
class RewardBreakdown:
    r_g: float
    r_c: float
    r: float
    compilable: bool
    functional: bool
    concepts: ConceptVector | None
    failure_reason: str | None  # compile-error | non-functional | concept-timeout
    failure_detail: str | None = None

    def to_dict(self) -> dict:
        return {
            "r_g": self.r_g,
            "r_c": self.r_c,
            "r": self.r,
            "compilable": self.compilable,
            "functional": self.functional,
            "concepts": self.concepts.to_dict() if self.concepts else None,
            "failure_reason": self.failure_reason,
            "failure_detail": self.failure_detail,
        }


@dataclass(frozen=True)
class ScoreResult:
    breakdowns: tuple[RewardBreakdown, ...]
    advantages: tuple[float, ...]
    reference_concepts: ConceptVector


def text_seed(text: str, salt: int | None = None) -> int:
    """Stable 64-bit playout seed derived from the text's content hash.

    Content-derived seeds make rewards reproducible across calls and across
    processes without the caller managing seed state; an optional salt lets
    callers re-randomize every stochastic output at once.
    """
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    seed = int.from_bytes(digest[:8], "big")
    if salt is not None:
        seed ^= salt
    return seed & _SEED_MASK


def gaussian_penalty(c_hat: float, c: float, sigma: float) -> float:
    """1 - exp(-((c_hat - c) / sigma)^2 / 2): 0 at no deviation, toward 1."""
    if sigma <= 0:
        raise ValueError("sigma must be > 0")
    z = (c_hat - c) / sigma
    return 1.0 - math.exp(-0.5 * z * z)


def concept_reward_from_penalties(penalties: Sequence[float], weight: float) -> float:
    """1 minus the weighted penalty sum, clamped into [0, 1]."""
    value = 1.0 - math.fsum(weight * p for p in penalties)
    return min(1.0, max(0.0, value))


def concept_reward(
    pred: ConceptVector | CandidateFailure,
    gt: ConceptVector,
    cfg: RewardConfig = RewardConfig(),
) -> float:
    """Concept reward for a candidate's concepts against the reference's.

    Non-functional candidates score 0; functional candidates whose concepts
    could not be computed score the floor reward. Otherwise penalties are
    taken over the items defined for both player counts.
    """
    if pred is CandidateFailure.NON_FUNCTIONAL:
        return 0.0
    if pred is CandidateFailure.UNCOMPUTABLE:
        return cfg.floor_reward
    pred_items = dict(pred.defined_items())
    gt_items = dict(gt.defined_items())
    shared = [k for k in pred_items if k in gt_items]
    if len(pred_items) != len(gt_items):
        logger.warning(
            "player-count mismatch: comparing %d mutually defined concept items",
            len(shared),
        )
    penalties = [gaussian_penalty(pred_items[k], gt_items[k], cfg.sigma) for k in shared]
    return concept_reward_from_penalties(penalties, cfg.weight_per_item)


def combined_reward(r_g: float, r_c: float, lambda_c: float = 1.0) -> float:
    return r_g + lambda_c * r_c


def group_advantages(rewards: Sequence[float]) -> list[float]:
    """Center and scale a group of rewards by its population std.

    Degenerate groups (single element or zero variance) map to all zeros.
    """
    n = len(rewards)
    if n == 0:
        raise ValueError("rewards must be non-empty")
    if n == 1:
        return [0.0]
    mean = math.fsum(rewards) / n
    # second pass absorbs the mean's rounding residue, so identical rewards
    # yield exactly zero deviations and advantages always sum to ~0
    residue = math.fsum(r - mean for r in rewards) / n
    deviations = [r - mean - residue for r in rewards]
    variance = math.fsum(d * d for d in deviations) / n
    if variance == 0.0:
        return [0.0] * n
    std = math.sqrt(variance)
    return [d / std for d in deviations]


def reference_concepts(
    gt_text: str, cfg: RewardConfig = RewardConfig(), salt: int | None = None
) -> ConceptVector:
    """Compile, probe, and run the reference playout batch.

    Any failure here is a hard error: the special-case rewards apply to
    candidates, never to the reference.
    """
    try:
        spec = compile_game(gt_text)
    except CompileError as e:
        raise GroundTruthError(f"reference does not compile: {e}") from e
    base = text_seed(gt_text, salt)
    probes = [base + i for i in range(cfg.probe_seeds)]
    functional, reason = check_functionality(spec, probes, cfg.max_turns)
    if not functional:
        raise GroundTruthError(f"reference is not functional: {reason}")
    stats = run_playouts(spec, cfg.playouts_gt, base, cfg.max_turns, cfg.budget_secs)
    try:
        return extract_concepts(stats, spec, cfg.max_turns)
    except EmptyStatsError as e:
        raise GroundTruthError("reference concepts could not be computed") from e


def _score_one(
    candidate: str,
    gt_concepts: ConceptVector,
    grammar: Grammar,
    cfg: RewardConfig,
    salt: int | None,
) -> RewardBreakdown:
    r_g = grammar_reward(grammar, candidate)

    def breakdown(r_c, compilable, functional, concepts, reason, detail=None):
        return RewardBreakdown(
            r_g=r_g,
            r_c=r_c,
            r=combined_reward(r_g, r_c, cfg.lambda_c),
            compilable=compilable,
            functional=functional,
            concepts=concepts,
            failure_reason=reason,
            failure_detail=detail,
        )

    try:
        spec = compile_game(candidate)
    except CompileError as e:
        return breakdown(0.0, False, False, None, "compile-error", str(e))
    base = text_seed(candidate, salt)
    probes = [base + i for i in range(cfg.probe_seeds)]
    functional, reason = check_functionality(spec, probes, cfg.max_turns)
    if not functional:
        return breakdown(0.0, True, False, None, "non-functional", reason)
    stats = run_playouts(spec, cfg.playouts_pred, base, cfg.max_turns, cfg.budget_secs)
    if stats.completed_playouts == 0:
        return breakdown(cfg.floor_reward, True, True, None, "concept-timeout")
    concepts = extract_concepts(stats, spec, cfg.max_turns)
    r_c = concept_reward(concepts, gt_concepts, cfg)
    return breakdown(r_c, True, True, concepts, None)


def score_candidates(
    gt_text: str,
    candidates: Sequence[str],
    grammar: Grammar,
    cfg: RewardConfig = RewardConfig(),
    *,
    salt: int | None = None,
    gt_concepts: ConceptVector | None = None,
) -> ScoreResult:
    """Score a group of candidates against one reference description.

    Per candidate: grammar reward, compile, functionality probe, concept
    playouts, concept reward, combined reward. Candidate failures are
    encoded in the breakdown, never raised; reference failures raise
    :class:`GroundTruthError`. Playout seeds derive from content hashes
    (see :func:`text_seed`), so scoring is deterministic and order-free.
    """
    if gt_concepts is None:
        gt_concepts = reference_concepts(gt_text, cfg, salt)
    breakdowns = tuple(
        _score_one(candidate, gt_concepts, grammar, cfg, salt) for candidate in candidates
    )
    advantages = tuple(group_advantages([b.r for b in breakdowns]))
    return ScoreResult(breakdowns, advantages, gt_concepts)
