"""Instance and prediction corpora as line-delimited JSON files.

Instances carry ``id``, ``query`` (natural-language description and rules),
``description`` (the ground-truth game text), and an optional free-form
``category``. Predictions carry ``id``, ``seed`` (a run label), and
``candidate`` (the generated game text).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .lexing import tokenize_prefix


class DatasetError(ValueError):
    def __init__(self, message: str, path=None, line: int | None = None):
        where = ""
        if path is not None:
            where = f" [{path}" + (f":{line}" if line is not None else "") + "]"
        super().__init__(message + where)
        self.path = path
        self.line = line


@dataclass(frozen=True)
class Instance:
    id: str
    query: str
    description: str
    category: str | None = None

    def to_dict(self) -> dict:
        out = {"id": self.id, "query": self.query, "description": self.description}
        if self.category is not None:
            out["category"] = self.category
        return out


@dataclass(frozen=True)
class Prediction:
    id: str
    seed: str
    candidate: str

    def to_dict(self) -> dict:
        return {"id": self.id, "seed": self.seed, "candidate": self.candidate}


def _records(path: Path):
    with open(path, "r", encoding="utf-8") as f:
        for line_no, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise DatasetError(f"malformed record: {e.msg}", path, line_no) from e
            if not isinstance(record, dict):
                raise DatasetError("record is not an object", path, line_no)
            yield line_no, record


def _required(record: dict, key: str, path: Path, line_no: int) -> str:
    value = record.get(key)
    if not isinstance(value, str) or not value:
        raise DatasetError(f"missing or empty field {key!r}", path, line_no)
    return value


def load_instances(path) -> list[Instance]:
    """Load an instance corpus, preserving file order; ids must be unique."""
    path = Path(path)
    instances: list[Instance] = []
    seen: set[str] = set()
    for line_no, record in _records(path):
        inst_id = _required(record, "id", path, line_no)
        if inst_id in seen:
            raise DatasetError(f"duplicate id {inst_id!r}", path, line_no)
        seen.add(inst_id)
        category = record.get("category")
        if category is not None and not isinstance(category, str):
            raise DatasetError("category must be a string", path, line_no)
        instances.append(
            Instance(
                id=inst_id,
                query=record.get("query", "") if isinstance(record.get("query", ""), str) else "",
                description=_required(record, "description", path, line_no),
                category=category,
            )
        )
    return instances


def load_predictions(path) -> list[Prediction]:
    """Load predictions; (id, seed) pairs must be unique."""
    path = Path(path)
    predictions: list[Prediction] = []
    seen: set[tuple[str, str]] = set()
    for line_no, record in _records(path):
        pred_id = _required(record, "id", path, line_no)
        seed = record.get("seed")
        if seed is None:
            raise DatasetError("missing or empty field 'seed'", path, line_no)
        seed = str(seed)
        key = (pred_id, seed)
        if key in seen:
            raise DatasetError(f"duplicate (id, seed) pair {key!r}", path, line_no)
        seen.add(key)
        candidate = record.get("candidate")
        if not isinstance(candidate, str):
            raise DatasetError("missing field 'candidate'", path, line_no)
        predictions.append(Prediction(pred_id, seed, candidate))
    return predictions


def save_instances(instances: list[Instance], path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for inst in instances:
            f.write(json.dumps(inst.to_dict(), ensure_ascii=False) + "\n")


def save_predictions(predictions: list[Prediction], path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for pred in predictions:
            f.write(json.dumps(pred.to_dict(), ensure_ascii=False) + "\n")


def description_token_count(text: str) -> int:
    """Token count under the game-text lexer; tolerant of trailing garbage
    (only well-formed leading tokens are counted)."""
    tokens, _ = tokenize_prefix(text)
    return len(tokens)


def filter_by_length(instances: list[Instance], max_units: int = 500) -> list[Instance]:
    """Keep instances whose description has at most ``max_units`` tokens."""
    return [
        inst for inst in instances if description_token_count(inst.description) <= max_units
    ]


def default_corpus() -> list[Instance]:
    """The small hand-written game corpus shipped with the package."""
    with resources.as_file(resources.files("ludilite") / "data" / "corpus.jsonl") as path:
        return load_instances(path)
