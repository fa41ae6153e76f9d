"""Decoding intervention: rescore externally produced per-position candidate
distributions with character similarity and pick the best replacement.

Each candidate's score is

    model_prob - copy_penalty * [candidate == source] + alpha * similarity

and the highest score wins, with ties broken by higher model probability and
then lower codepoint. Correction is substitution-only, so output length
always equals input length.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, IO, Iterable, Iterator

from .errors import IngestError
from .fusion import SimilarityParams

SimFn = Callable[[str, str], float]

PROB_SUM_SLACK = 1e-6


@dataclass(frozen=True)
class CandidateDistribution:
    """Candidates with model probabilities for one sentence position."""

    position: int
    source_char: str
    candidates: tuple[tuple[str, float], ...]


@dataclass(frozen=True)
class SentenceDistributions:
    """Per-position distributions covering every character of a sentence."""

    id: str
    text: str
    positions: tuple[CandidateDistribution, ...]


@dataclass(frozen=True)
class ScoredCandidate:
    char: str
    model_prob: float
    similarity: float
    score: float


def _validate_position(sent_id: str, text: str, entry: dict) -> CandidateDistribution:
    if not isinstance(entry, dict) or "i" not in entry or "cands" not in entry:
        raise IngestError(f"sentence {sent_id!r}: position entries need 'i' and 'cands'")
    i = entry["i"]
    if not isinstance(i, int) or not 0 <= i < len(text):
        raise IngestError(f"sentence {sent_id!r}: position index {i!r} out of range")
    raw = entry["cands"]
    if not isinstance(raw, list) or not raw:
        raise IngestError(f"sentence {sent_id!r}: position {i}: empty candidate list")
    cands: list[tuple[str, float]] = []
    seen: set[str] = set()
    total = 0.0
    for item in raw:
        if (not isinstance(item, (list, tuple)) or len(item) != 2
                or not isinstance(item[0], str) or len(item[0]) != 1
                or not isinstance(item[1], (int, float))):
            raise IngestError(
                f"sentence {sent_id!r}: position {i}: candidates must be "
                f"[char, probability] pairs")
        ch, prob = item[0], float(item[1])
        if not 0.0 <= prob <= 1.0:
            raise IngestError(
                f"sentence {sent_id!r}: position {i}: probability {prob} for "
                f"{ch!r} outside [0, 1]")
        if ch in seen:
            raise IngestError(
                f"sentence {sent_id!r}: position {i}: duplicate candidate {ch!r}")
        seen.add(ch)
        total += prob
        cands.append((ch, prob))
    if total > 1.0 + PROB_SUM_SLACK:
        raise IngestError(
            f"sentence {sent_id!r}: position {i}: probabilities sum to {total:.6f}")
    source = text[i]
    if source not in seen:
        raise IngestError(
            f"sentence {sent_id!r}: position {i}: source character {source!r} "
            f"missing from candidates")
    return CandidateDistribution(position=i, source_char=source,
                                 candidates=tuple(cands))


def parse_sentence(record: dict) -> SentenceDistributions:
    """Validate one interchange record against the ingest contract."""
    if not isinstance(record, dict):
        raise IngestError("record must be a JSON object")
    sent_id = record.get("id")
    text = record.get("text")
    raw_positions = record.get("positions")
    if not isinstance(sent_id, str) or not isinstance(text, str) \
            or not isinstance(raw_positions, list):
        raise IngestError("record needs string 'id', string 'text', list 'positions'")
    positions = [_validate_position(sent_id, text, entry) for entry in raw_positions]
    covered = [p.position for p in positions]
    if sorted(covered) != list(range(len(text))):
        missing = sorted(set(range(len(text))) - set(covered))
        if missing:
            raise IngestError(
                f"sentence {sent_id!r}: positions missing index "
                f"{missing[0]} (text length {len(text)})")
        raise IngestError(f"sentence {sent_id!r}: duplicate position indexes")
    positions.sort(key=lambda p: p.position)
    return SentenceDistributions(id=sent_id, text=text, positions=tuple(positions))


def ingest_distributions(source: str | Path | IO[str] | Iterable[str],
                         ) -> Iterator[SentenceDistributions]:
    """Stream interchange JSONL into validated records, one sentence at a time."""
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            yield from ingest_distributions(fh)
        return
    for lineno, line in enumerate(source, 1):
        line = line.strip()
        if not line:
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise IngestError(f"line {lineno}: invalid JSON: {exc}") from None
        try:
            yield parse_sentence(record)
        except IngestError as exc:
            raise IngestError(f"line {lineno}: {exc}") from None


def intervene(dist: CandidateDistribution, params: SimilarityParams,
              simfn: SimFn) -> tuple[str, list[ScoredCandidate]]:
    """Score every candidate and pick the argmax.

    With alpha == 0 the similarity provider is never consulted (scores reduce
    to the model's probabilities) and recorded similarities are 0.0. The
    returned list preserves candidate order.
    """
    source = dist.source_char
    alpha = params.alpha
    penalty = params.copy_penalty
    scored: list[ScoredCandidate] = []
    found_source = False
    for ch, prob in dist.candidates:
        if ch == source:
            found_source = True
        similarity = simfn(source, ch) if alpha != 0.0 else 0.0
        score = prob - (penalty if ch == source else 0.0) + alpha * similarity
        scored.append(ScoredCandidate(ch, prob, similarity, score))
    if not found_source:
        raise IngestError(
            f"position {dist.position}: source character {source!r} missing "
            f"from candidates")
    chosen = max(scored, key=lambda c: (c.score, c.model_prob, -ord(c.char)))
    return chosen.char, scored


def correct_sentence(sd: SentenceDistributions, params: SimilarityParams,
                     simfn: SimFn) -> tuple[str, list[list[ScoredCandidate]]]:
    """Position-wise intervention over a whole sentence."""
    chars: list[str] = []
    traces: list[list[ScoredCandidate]] = []
    for dist in sd.positions:
        try:
            ch, scored = intervene(dist, params, simfn)
        except IngestError as exc:
            raise IngestError(f"sentence {sd.id!r}: {exc}") from None
        chars.append(ch)
        traces.append(scored)
    return "".join(chars), traces


def correction_record(sd: SentenceDistributions, hypothesis: str,
                      traces: list[list[ScoredCandidate]] | None = None) -> dict:
    """Output-side JSONL record; include ``traces`` for --trace runs."""
    record: dict = {"id": sd.id, "src": sd.text, "hyp": hypothesis}
    if traces is not None:
        record["trace"] = [
            {
                "i": dist.position,
                "chosen": hypothesis[dist.position],
                "cands": [[c.char, c.model_prob, c.similarity, c.score]
                          for c in scored],
            }
            for dist, scored in zip(sd.positions, traces)
        ]
    return record
