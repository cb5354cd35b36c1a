"""Corpus-level evaluation: compilability, functionality, ROUGE-L, and
normalized concept distance, aggregated as mean and standard error over
seed groups, with optional per-category breakdowns."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from .concepts import (
    ConceptVector,
    EmptyStatsError,
    aligned_vectors,
    extract_concepts,
    run_playouts,
)
from .dataset import Instance, Prediction
from .engine import CompileError, check_functionality, compile_game
from .grammar import Grammar, grammar_reward
from .rewards import CandidateFailure, GroundTruthError, RewardConfig, text_seed

_STRUCTURAL = re.compile(r"([(){}])")


def rouge_tokenize(text: str) -> list[str]:
    """Whitespace split with parentheses and braces as their own tokens."""
    return _STRUCTURAL.sub(r" \1 ", text).split()


def lcs_length(a: list, b: list) -> int:
    """Longest common subsequence length via the classic rolling-row DP."""
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, start=1):
            if x == y:
                cur.append(prev[j - 1] + 1)
            else:
                cur.append(max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def rouge_l_f1(candidate: list, reference: list) -> float:
    """ROUGE-L F1 between two token sequences; 0 when either is empty."""
    if not candidate or not reference:
        return 0.0
    lcs = lcs_length(candidate, reference)
    if lcs == 0:
        return 0.0
    precision = lcs / len(candidate)
    recall = lcs / len(reference)
    return 2 * precision * recall / (precision + recall)


def ncd(pred: ConceptVector | CandidateFailure | None, gt: ConceptVector) -> float:
    """Normalized concept distance: (1 - cos) / 2 over flattened vectors.

    Non-functional or uncomputable candidates are maximally distant (1.0),
    as is any zero-magnitude vector.
    """
    if pred is None or isinstance(pred, CandidateFailure):
        return 1.0
    va, vb = aligned_vectors(pred, gt)
    dot = math.fsum(x * y for x, y in zip(va, vb))
    norm_a = math.sqrt(math.fsum(x * x for x in va))
    norm_b = math.sqrt(math.fsum(y * y for y in vb))
    if norm_a == 0.0 or norm_b == 0.0:
        return 1.0
    cosine = dot / (norm_a * norm_b)
    cosine = max(-1.0, min(1.0, cosine))
    return (1.0 - cosine) / 2.0


def mean_stderr(groups: list[list[float]]) -> tuple[float, float]:
    """Mean of per-group means, with the standard error across groups.

    The standard error is the sample standard deviation of the group means
    divided by sqrt(#groups); a single group has standard error 0.
    """
    if not groups:
        raise ValueError("at least one group required")
    means = [math.fsum(g) / len(g) for g in groups]
    overall = math.fsum(means) / len(means)
    if len(means) == 1:
        return overall, 0.0
    var = math.fsum((m - overall) ** 2 for m in means) / (len(means) - 1)
    return overall, math.sqrt(var) / math.sqrt(len(means))


@dataclass(frozen=True)
class MetricSummary:
    mean: float
    stderr: float

    def to_dict(self) -> dict:
        return {"mean": self.mean, "stderr": self.stderr}


@dataclass(frozen=True)
class EvalRow:
    instance_id: str
    seed: str
    category: str | None
    compilable: bool
    functional: bool
    rouge_l: float  # 0-100
    ncd: float  # 0-1
    r_g: float
    failure_reason: str | None

    def to_dict(self) -> dict:
        return {
            "instance_id": self.instance_id,
            "seed": self.seed,
            "category": self.category,
            "compilable": self.compilable,
            "functional": self.functional,
            "rouge_l": self.rouge_l,
            "ncd": self.ncd,
            "r_g": self.r_g,
            "failure_reason": self.failure_reason,
        }


@dataclass(frozen=True)
class EvalReport:
    compilability: MetricSummary  # 0-100
    functionality: MetricSummary  # 0-100
    rouge_l: MetricSummary  # 0-100
    ncd: MetricSummary  # 0-1
    seeds: tuple[str, ...]
    rows: tuple[EvalRow, ...]
    categories: dict[str, "EvalReport"] = field(default_factory=dict)
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "compilability": self.compilability.to_dict(),
            "functionality": self.functionality.to_dict(),
            "rouge_l": self.rouge_l.to_dict(),
            "ncd": self.ncd.to_dict(),
            "seeds": list(self.seeds),
            "rows": [r.to_dict() for r in self.rows],
        }
        if self.categories:
            out["categories"] = {
                name: sub.to_dict() for name, sub in sorted(self.categories.items())
            }
        if self.config:
            out["config"] = self.config
        return out


def _instance_concepts(
    instance: Instance, cfg: RewardConfig, salt: int | None
) -> ConceptVector:
    try:
        spec = compile_game(instance.description)
    except CompileError as e:
        raise GroundTruthError(
            f"ground truth {instance.id!r} does not compile: {e}"
        ) from e
    base = text_seed(instance.description, salt)
    probes = [base + i for i in range(cfg.probe_seeds)]
    functional, reason = check_functionality(spec, probes, cfg.max_turns)
    if not functional:
        raise GroundTruthError(f"ground truth {instance.id!r} is not functional: {reason}")
    stats = run_playouts(spec, cfg.playouts_gt, base, cfg.max_turns, cfg.budget_secs)
    try:
        return extract_concepts(stats, spec, cfg.max_turns)
    except EmptyStatsError as e:
        raise GroundTruthError(
            f"ground truth {instance.id!r} concepts could not be computed"
        ) from e


def _evaluate_prediction(
    candidate: str, gt: ConceptVector, cfg: RewardConfig, salt: int | None
) -> tuple[bool, bool, float, str | None]:
    """(compilable, functional, ncd, failure_reason) for one candidate."""
    try:
        spec = compile_game(candidate)
    except CompileError:
        return False, False, 1.0, "compile-error"
    base = text_seed(candidate, salt)
    probes = [base + i for i in range(cfg.probe_seeds)]
    functional, reason = check_functionality(spec, probes, cfg.max_turns)
    if not functional:
        return True, False, 1.0, f"non-functional: {reason}"
    stats = run_playouts(spec, cfg.playouts_pred, base, cfg.max_turns, cfg.budget_secs)
    if stats.completed_playouts == 0:
        return True, True, 1.0, "concept-timeout"
    concepts = extract_concepts(stats, spec, cfg.max_turns)
    return True, True, ncd(concepts, gt), None


def _aggregate(rows: list[EvalRow], seeds: tuple[str, ...]) -> dict[str, MetricSummary]:
    by_seed: dict[str, list[EvalRow]] = {s: [] for s in seeds}
    for row in rows:
        by_seed[row.seed].append(row)
    groups = [by_seed[s] for s in seeds if by_seed[s]]

    def summarize(pick) -> MetricSummary:
        mean, stderr = mean_stderr([[pick(r) for r in g] for g in groups])
        return MetricSummary(mean, stderr)

    return {
        "compilability": summarize(lambda r: 100.0 * r.compilable),
        "functionality": summarize(lambda r: 100.0 * r.functional),
        "rouge_l": summarize(lambda r: r.rouge_l),
        "ncd": summarize(lambda r: r.ncd),
    }


def evaluate_corpus(
    instances: list[Instance],
    predictions: list[Prediction],
    grammar: Grammar,
    cfg: RewardConfig = RewardConfig(),
    *,
    salt: int | None = None,
) -> EvalReport:
    """Evaluate predictions against their ground-truth instances.

    Every (instance, seed) pair gets a row; a missing prediction counts as
    a failure rather than being skipped. Raises on predictions that
    reference unknown instance ids.
    """
    by_id = {inst.id: inst for inst in instances}
    for pred in predictions:
        if pred.id not in by_id:
            raise KeyError(f"prediction references unknown instance id {pred.id!r}")
    seeds = tuple(sorted({p.seed for p in predictions}))
    if not seeds:
        raise ValueError("no predictions to evaluate")
    by_key = {(p.id, p.seed): p for p in predictions}
    gt_concepts = {inst.id: _instance_concepts(inst, cfg, salt) for inst in by_id.values()}
    gt_tokens = {inst.id: rouge_tokenize(inst.description) for inst in by_id.values()}

    rows: list[EvalRow] = []
    for inst in sorted(instances, key=lambda i: i.id):
        for seed in seeds:
            pred = by_key.get((inst.id, seed))
            if pred is None:
                rows.append(
                    EvalRow(inst.id, seed, inst.category, False, False, 0.0, 1.0, 0.0,
                            "missing-prediction")
                )
                continue
            compilable, functional, distance, reason = _evaluate_prediction(
                pred.candidate, gt_concepts[inst.id], cfg, salt
            )
            rouge = 100.0 * rouge_l_f1(rouge_tokenize(pred.candidate), gt_tokens[inst.id])
            rows.append(
                EvalRow(
                    inst.id,
                    seed,
                    inst.category,
                    compilable,
                    functional,
                    rouge,
                    distance,
                    grammar_reward(grammar, pred.candidate),
                    reason,
                )
            )

    summaries = _aggregate(rows, seeds)
    categories: dict[str, EvalReport] = {}
    names = sorted({r.category for r in rows if r.category is not None})
    for name in names:
        cat_rows = [r for r in rows if r.category == name]
        cat_summaries = _aggregate(cat_rows, seeds)
        categories[name] = EvalReport(
            compilability=cat_summaries["compilability"],
            functionality=cat_summaries["functionality"],
            rouge_l=cat_summaries["rouge_l"],
            ncd=cat_summaries["ncd"],
            seeds=seeds,
            rows=tuple(cat_rows),
        )
    return EvalReport(
        compilability=summaries["compilability"],
        functionality=summaries["functionality"],
        rouge_l=summaries["rouge_l"],
        ncd=summaries["ncd"],
        seeds=seeds,
        rows=tuple(rows),
        categories=categories,
        config=cfg.to_dict(),
    )


def category_concept_distance(
    instances_a: list[Instance],
    instances_b: list[Instance],
    cfg: RewardConfig = RewardConfig(),
    *,
    salt: int | None = None,
) -> float:
    """Mean pairwise concept distance between two instance groups.

    Pairs sharing an instance id are skipped, so a category compared with
    itself averages over distinct pairs; no pairs at all yields 0.0.
    """
    cache: dict[str, ConceptVector] = {}

    def concepts_of(inst: Instance) -> ConceptVector:
        if inst.id not in cache:
            cache[inst.id] = _instance_concepts(inst, cfg, salt)
        return cache[inst.id]

    distances = [
        ncd(concepts_of(a), concepts_of(b))
        for a in instances_a
        for b in instances_b
        if a.id != b.id
    ]
    if not distances:
        return 0.0
    return math.fsum(distances) / len(distances)
