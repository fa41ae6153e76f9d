"""Sentence-level evaluation for substitution-only correction: detection and
correction precision/recall/F1, false positive rate, and the seen-edit-pair
statistic between a training and a test corpus.

Conventions (the widely used sentence-level ones): a detection hit requires
the predicted mismatch-position set to equal the gold set and be nonempty; a
correction hit requires the full hypothesis to equal the target on a sentence
that actually contains errors. Precision counts over sentences the system
changed, recall over sentences with gold errors.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .errors import CorpusError


@dataclass(frozen=True)
class SentencePair:
    id: str
    source: str
    target: str


@dataclass(frozen=True)
class EditPair:
    src_char: str
    tgt_char: str
    position: int


@dataclass(frozen=True)
class SubtaskScores:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class EvalCounts:
    sentences: int
    changed: int
    gold_errored: int
    det_hits: int
    cor_hits: int
    false_positives: int


@dataclass(frozen=True)
class EvalReport:
    detection: SubtaskScores
    correction: SubtaskScores
    fpr: float
    counts: EvalCounts


def extract_edits(source: str, other: str, sent_id: str | None = None,
                  ) -> list[EditPair]:
    """One EditPair per mismatching index, in ascending position order."""
    if len(source) != len(other):
        where = f" in sentence {sent_id!r}" if sent_id else ""
        raise CorpusError(
            f"length mismatch{where}: {len(source)} vs {len(other)} characters")
    return [EditPair(s, o, i)
            for i, (s, o) in enumerate(zip(source, other)) if s != o]


def _prf(hits: int, pred: int, gold: int) -> SubtaskScores:
    precision = hits / pred if pred else 0.0
    recall = hits / gold if gold else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return SubtaskScores(precision, recall, f1)


def evaluate(corpus: Iterable[tuple[str, str, str]]) -> EvalReport:
    """Score (source, hypothesis, target) triples at the sentence level."""
    sentences = changed = gold_errored = 0
    det_hits = cor_hits = false_positives = clean = 0
    for idx, (source, hypothesis, target) in enumerate(corpus):
        sid = f"#{idx}"
        pred = {e.position for e in extract_edits(source, hypothesis, sid)}
        gold = {e.position for e in extract_edits(source, target, sid)}
        sentences += 1
        if pred:
            changed += 1
        if gold:
            gold_errored += 1
        else:
            clean += 1
            if pred:
                false_positives += 1
        if pred and pred == gold:
            det_hits += 1
        if gold and hypothesis == target:
            cor_hits += 1
    return EvalReport(
        detection=_prf(det_hits, changed, gold_errored),
        correction=_prf(cor_hits, changed, gold_errored),
        fpr=false_positives / clean if clean else 0.0,
        counts=EvalCounts(sentences, changed, gold_errored,
                          det_hits, cor_hits, false_positives),
    )


def seen_pair_stats(train: Iterable[tuple[str, str]],
                    test: Iterable[tuple[str, str]],
                    ) -> tuple[int, int, float]:
    """How many test edit-pair tokens have a (src, tgt) type seen in training.

    Returns (total, seen, proportion); proportion is 0.0 on an empty test set.
    """
    train_types = set(train)
    total = seen = 0
    for pair in test:
        total += 1
        if pair in train_types:
            seen += 1
    return total, seen, seen / total if total else 0.0


def corpus_edit_pairs(pairs: Sequence[SentencePair]) -> list[tuple[str, str]]:
    """All (source char, target char) edit tokens of a parallel corpus."""
    out: list[tuple[str, str]] = []
    for sp in pairs:
        out.extend((e.src_char, e.tgt_char)
                   for e in extract_edits(sp.source, sp.target, sp.id))
    return out


# ---------------------------------------------------------------------------
# File formats


def read_corpus(path: str | Path) -> list[SentencePair]:
    """TSV corpus: id <TAB> source <TAB> target, equal lengths enforced."""
    path = Path(path)
    if not path.is_file():
        raise CorpusError(f"missing corpus file: {path}")
    out: list[SentencePair] = []
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 3:
                raise CorpusError(
                    f"{path.name}:{lineno}: expected id\\tsource\\ttarget")
            sp = SentencePair(*cols)
            extract_edits(sp.source, sp.target, sp.id)
            out.append(sp)
    return out


def read_hypotheses(path: str | Path) -> dict[str, str]:
    """Hypotheses as correction-output JSONL or id <TAB> hypothesis TSV."""
    path = Path(path)
    if not path.is_file():
        raise CorpusError(f"missing hypothesis file: {path}")
    out: dict[str, str] = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            if line.startswith("{"):
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise CorpusError(f"{path.name}:{lineno}: invalid JSON: {exc}")
                sid, hyp = record.get("id"), record.get("hyp")
                if not isinstance(sid, str) or not isinstance(hyp, str):
                    raise CorpusError(
                        f"{path.name}:{lineno}: records need string 'id' and 'hyp'")
            else:
                cols = line.split("\t")
                if len(cols) != 2:
                    raise CorpusError(
                        f"{path.name}:{lineno}: expected id\\thypothesis")
                sid, hyp = cols
            out[sid] = hyp
    return out


def align(corpus: Sequence[SentencePair], hypotheses: dict[str, str],
          ) -> list[tuple[str, str, str]]:
    """(source, hypothesis, target) triples joined on sentence id."""
    missing = [sp.id for sp in corpus if sp.id not in hypotheses]
    if missing:
        raise CorpusError(
            f"hypotheses missing for {len(missing)} sentence id(s), "
            f"first: {missing[0]!r}")
    triples = []
    for sp in corpus:
        hyp = hypotheses[sp.id]
        extract_edits(sp.source, hyp, sp.id)
        triples.append((sp.source, hyp, sp.target))
    return triples
