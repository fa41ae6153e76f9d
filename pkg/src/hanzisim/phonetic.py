"""Phonetic similarity between characters via weighted edit distance over
toneless pinyin, maximized over polyphone reading combinations."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .chardata import CharTables


@dataclass(frozen=True)
class EditCosts:
    """Per-operation weights for the Levenshtein distance.

    Substitution may never cost more than a delete plus an insert, so the
    distance stays a metric and the derived similarities stay in [0, 1].
    """

    insert: int = 1
    delete: int = 1
    substitute: int = 2

    def __post_init__(self) -> None:
        if min(self.insert, self.delete, self.substitute) < 0:
            raise ValueError("edit costs must be non-negative")
        if self.substitute > self.insert + self.delete:
            raise ValueError("substitute cost must not exceed insert + delete")


DEFAULT_COSTS = EditCosts()


def weighted_levenshtein(a: Sequence, b: Sequence,
                         costs: EditCosts = DEFAULT_COSTS) -> int:
    """Minimal total edit cost turning ``a`` into ``b``.

    Two-row dynamic program; symmetric whenever insert == delete.
    """
    ins, dele, sub = costs.insert, costs.delete, costs.substitute
    prev = [j * ins for j in range(len(b) + 1)]
    for i in range(1, len(a) + 1):
        cur = [i * dele] + [0] * len(b)
        ai = a[i - 1]
        for j in range(1, len(b) + 1):
            keep = prev[j - 1] + (0 if ai == b[j - 1] else sub)
            cur[j] = min(prev[j] + dele, cur[j - 1] + ins, keep)
        prev = cur
    return prev[len(b)]


def edit_ratio_sim(dist: int, total_len: int) -> float:
    """1 - dist/total_len clamped to [0, 1]; the shared shape of every
    edit-distance-based similarity here."""
    return min(1.0, max(0.0, 1.0 - dist / total_len))


def pinyin_distance_sim(p1: str, p2: str) -> float:
    """1 - LD(p1, p2) / (len(p1) + len(p2)) with 1/1/2 costs, clamped to [0, 1]."""
    if not p1 or not p2:
        raise ValueError("pinyin sequences must be nonempty")
    return edit_ratio_sim(weighted_levenshtein(p1, p2), len(p1) + len(p2))


def phonetic_sim(tables: CharTables, c1: str, c2: str) -> float:
    """Highest reading-pair similarity between two characters.

    Falls back to 1.0 for an identical pair and 0.0 otherwise whenever either
    side is not a Han character or has no pinyin entry.
    """
    if c1 == c2:
        return 1.0
    r1 = tables.pinyin.get(c1)
    r2 = tables.pinyin.get(c2)
    if not r1 or not r2:
        return 0.0
    return max(pinyin_distance_sim(p1, p2) for p1 in r1 for p2 in r2)
