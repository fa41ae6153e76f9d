"""Candidate models the exporter can draw distributions from.

Two hermetic dummies ship with the bridge so the contract tests never load a
network model: a uniform model that spreads probability evenly over whatever
candidate set the exporter assembles, and an echo model that puts all its
mass on the source character. Real masked language models are wrapped behind
the same interface and loaded lazily.
"""

from __future__ import annotations

import logging
from typing import Protocol, Sequence

log = logging.getLogger(__name__)


class CandidateModel(Protocol):
    """Per-position candidate source for the exporter."""

    def top_candidates(self, text: str, position: int, k: int) -> list[str]:
        """The model's k most likely characters for this position."""
        ...

    def probabilities(self, text: str, position: int,
                      chars: Sequence[str]) -> dict[str, float]:
        """The model's probability for each requested character; characters
        outside the model vocabulary are absent from the result."""
        ...


class UniformModel:
    """Spreads probability uniformly over the exported candidate union.

    ``top_candidates`` returns a deterministic slice of a small built-in
    vocabulary so the union rule has a nontrivial model side to exercise.
    """

    name = "dummy:uniform"

    VOCAB = list("的一是不了人我在有他这为之大来以个中上们到说国和地也子"
                 "时道出而要于就下得可你年生自会那后能对着事其里所去行过")

    def top_candidates(self, text: str, position: int, k: int) -> list[str]:
        return self.VOCAB[:k]

    def probabilities(self, text: str, position: int,
                      chars: Sequence[str]) -> dict[str, float]:
        share = 1.0 / len(chars)
        return {ch: share for ch in chars}


class EchoModel:
    """Puts probability 1.0 on the source character, 0.0 elsewhere."""

    name = "dummy:echo"

    def top_candidates(self, text: str, position: int, k: int) -> list[str]:
        return [text[position]]

    def probabilities(self, text: str, position: int,
                      chars: Sequence[str]) -> dict[str, float]:
        source = text[position]
        return {ch: 1.0 if ch == source else 0.0 for ch in chars}


class MaskedLanguageModel:
    """Per-position distributions from a HuggingFace masked language model.

    Runs one unmasked forward pass per sentence and reads the softmax row at
    each character position, the way plain BERT is used for spelling
    correction without fine-tuning. Requires the ``real`` extra.
    """

    def __init__(self, model_id: str):
        try:
            import torch
            from transformers import AutoModelForMaskedLM, AutoTokenizer
        except ImportError as exc:
            raise RuntimeError(
                "loading a real model needs the 'real' extra "
                "(pip install hanzibridge[real])") from exc
        self.name = model_id
        self._torch = torch
        self.tokenizer = AutoTokenizer.from_pretrained(model_id)
        self.model = AutoModelForMaskedLM.from_pretrained(model_id)
        self.model.eval()
        self._rows: dict[str, "torch.Tensor"] = {}
        self._single_char_ids: list[tuple[int, str]] | None = None

    def _softmax_rows(self, text: str):
        cached = self._rows.get(text)
        if cached is not None:
            return cached
        torch = self._torch
        ids = [self.tokenizer.convert_tokens_to_ids(ch) for ch in text]
        unk = self.tokenizer.unk_token_id
        ids = [unk if i is None else i for i in ids]
        batch = torch.tensor([[self.tokenizer.cls_token_id, *ids,
                               self.tokenizer.sep_token_id]])
        with torch.no_grad():
            logits = self.model(batch).logits[0]
        rows = torch.softmax(logits[1:-1], dim=-1)
        self._rows.clear()  # one sentence at a time keeps memory flat
        self._rows[text] = rows
        return rows

    def _char_vocabulary(self) -> list[tuple[int, str]]:
        if self._single_char_ids is None:
            vocab = self.tokenizer.get_vocab()
            self._single_char_ids = [(idx, tok) for tok, idx in vocab.items()
                                     if len(tok) == 1]
        return self._single_char_ids

    def top_candidates(self, text: str, position: int, k: int) -> list[str]:
        rows = self._softmax_rows(text)
        pairs = self._char_vocabulary()
        idx = self._torch.tensor([i for i, _ in pairs])
        scores = rows[position][idx]
        top = self._torch.topk(scores, min(k, len(pairs))).indices.tolist()
        return [pairs[t][1] for t in top]

    def probabilities(self, text: str, position: int,
                      chars: Sequence[str]) -> dict[str, float]:
        rows = self._softmax_rows(text)
        unk = self.tokenizer.unk_token_id
        out: dict[str, float] = {}
        for ch in chars:
            token_id = self.tokenizer.convert_tokens_to_ids(ch)
            if token_id is None or token_id == unk:
                continue
            out[ch] = float(rows[position][token_id])
        return out


def load_model(spec: str) -> CandidateModel:
    """``dummy:uniform``, ``dummy:echo``, or a HuggingFace model id."""
    if spec == "dummy:uniform":
        return UniformModel()
    if spec == "dummy:echo":
        return EchoModel()
    if spec.startswith("dummy:"):
        raise ValueError(f"unknown dummy model {spec!r}")
    return MaskedLanguageModel(spec)
