"""Turn raw sentences into the candidate-distribution interchange JSONL.

The exported candidate set at every position is exactly

    model top-k  ∪  {source character}  ∪  neighbors(source)

where neighbors come from a confusion-set or similarity-matrix TSV. The
probabilities are the model's own values for those candidates, reported
without renormalization; a source character outside the model vocabulary is
kept with probability 0.0 and a warning.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Iterator

from .models import CandidateModel

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExportConfig:
    model: str
    top_k: int = 16
    neighbors_path: str | Path | None = None

    def __post_init__(self) -> None:
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")


def read_neighbors(path: str | Path) -> dict[str, set[str]]:
    """Symmetric neighbor map from a pair TSV (2 columns, or 3 with a score)."""
    out: dict[str, set[str]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) not in (2, 3):
                raise ValueError(
                    f"{Path(path).name}:{lineno}: expected 2 or 3 columns")
            a, b = cols[0], cols[1]
            out.setdefault(a, set()).add(b)
            out.setdefault(b, set()).add(a)
    return out


def sentence_record(model: CandidateModel, neighbors: dict[str, set[str]],
                    top_k: int, sent_id: str, text: str) -> dict:
    positions = []
    for i, source in enumerate(text):
        union: list[str] = []
        seen: set[str] = set()
        for ch in [*model.top_candidates(text, i, top_k), source,
                   *sorted(neighbors.get(source, ()))]:
            if ch not in seen:
                seen.add(ch)
                union.append(ch)
        probs = model.probabilities(text, i, union)
        if source not in probs:
            log.warning("sentence %s position %d: source %r outside the model "
                        "vocabulary, exported with probability 0", sent_id, i,
                        source)
        cands = [[ch, probs.get(ch, 0.0)] for ch in union]
        cands.sort(key=lambda c: (-c[1], ord(c[0])))
        positions.append({"i": i, "cands": cands})
    return {"id": sent_id, "text": text, "positions": positions}


def export(sentences: Iterable[str], model: CandidateModel,
           config: ExportConfig, out: IO[str]) -> int:
    """Write one interchange record per input sentence; returns the count."""
    neighbors = (read_neighbors(config.neighbors_path)
                 if config.neighbors_path else {})
    count = 0
    for k, raw in enumerate(sentences, 1):
        text = raw.rstrip("\n")
        if not text:
            continue
        record = sentence_record(model, neighbors, config.top_k, f"s{k}", text)
        out.write(json.dumps(record, ensure_ascii=False) + "\n")
        count += 1
    return count


def iter_sentences(path: str | Path) -> Iterator[str]:
    with open(path, encoding="utf-8") as fh:
        yield from fh
