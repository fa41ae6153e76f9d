"""Glyph similarity from four complementary views: four-corner digit match,
structure-aware code edit distance, stroke edit distance, and stroke LCS."""

from __future__ import annotations

from typing import Sequence

from .chardata import CharTables
from .phonetic import edit_ratio_sim, weighted_levenshtein


def lcs_length(a: Sequence, b: Sequence) -> int:
    """Length of a longest common subsequence (classic DP, two rows)."""
    if len(a) < len(b):
        a, b = b, a
    prev = [0] * (len(b) + 1)
    for i in range(1, len(a) + 1):
        cur = [0] * (len(b) + 1)
        ai = a[i - 1]
        for j in range(1, len(b) + 1):
            if ai == b[j - 1]:
                cur[j] = prev[j - 1] + 1
            else:
                cur[j] = cur[j - 1] if cur[j - 1] >= prev[j] else prev[j]
        prev = cur
    return prev[len(b)]


def structure_aware_code(tables: CharTables, ch: str) -> str | None:
    """Four-corner code enriched with structure letters.

    Atomic characters keep their bare four-digit code. A compound becomes the
    concatenation of (structure letter + component code) over its components,
    one decomposition level deep. Compounds whose components lack four-corner
    entries fall back to the bare code; ``None`` when nothing is available.
    """
    decomp = tables.decomposition.get(ch)
    bare = tables.fourcorner.get(ch)
    if decomp is not None and not decomp.is_atomic:
        codes = [tables.fourcorner.get(comp) for comp in decomp.components]
        if all(code is not None for code in codes):
            return "".join(decomp.structure + code for code in codes)
    return bare


def _ratio_fallback(c1: str, c2: str) -> float:
    return 1.0 if c1 == c2 else 0.0


def glyph_sim1(tables: CharTables, c1: str, c2: str) -> float:
    """Digit-wise matching rate of the two four-corner codes."""
    if c1 == c2:
        return 1.0
    f1 = tables.fourcorner.get(c1)
    f2 = tables.fourcorner.get(c2)
    if f1 is None or f2 is None:
        return _ratio_fallback(c1, c2)
    return sum(d1 == d2 for d1, d2 in zip(f1, f2)) / 4.0


def glyph_sim2(tables: CharTables, c1: str, c2: str) -> float:
    """Weighted-edit-distance similarity of the structure-aware codes."""
    if c1 == c2:
        return 1.0
    s1 = structure_aware_code(tables, c1)
    s2 = structure_aware_code(tables, c2)
    if s1 is None or s2 is None:
        return _ratio_fallback(c1, c2)
    return edit_ratio_sim(weighted_levenshtein(s1, s2), len(s1) + len(s2))


def glyph_sim3(tables: CharTables, c1: str, c2: str) -> float:
    """Weighted-edit-distance similarity of the stroke sequences."""
    if c1 == c2:
        return 1.0
    s1 = tables.strokes.get(c1)
    s2 = tables.strokes.get(c2)
    if s1 is None or s2 is None:
        return _ratio_fallback(c1, c2)
    return edit_ratio_sim(weighted_levenshtein(s1, s2), len(s1) + len(s2))


def glyph_sim4(tables: CharTables, c1: str, c2: str) -> float:
    """Stroke LCS length over the longer stroke count."""
    if c1 == c2:
        return 1.0
    s1 = tables.strokes.get(c1)
    s2 = tables.strokes.get(c2)
    if s1 is None or s2 is None:
        return _ratio_fallback(c1, c2)
    return lcs_length(s1, s2) / max(len(s1), len(s2))


def glyph_sim(tables: CharTables, c1: str, c2: str) -> float:
    """Arithmetic mean of the four glyph components, in a fixed order."""
    return (glyph_sim1(tables, c1, c2) + glyph_sim2(tables, c1, c2)
            + glyph_sim3(tables, c1, c2) + glyph_sim4(tables, c1, c2)) / 4.0
