"""Fused character similarity, precomputed similarity neighborhoods, and
confusion-set export.

The fused score interpolates the phonetic and glyph similarities with a
weight ``beta``. Pairwise scores over a charset can be precomputed into a
:class:`SimilarityMatrix` so that decoding only indexes into it; the bulk
builder evaluates millions of pairs, so it trades the readable DP for a
bit-parallel LCS using the identity LD_1/1/2(a, b) = len(a) + len(b) -
2*LCS(a, b), which the test suite cross-checks against the plain DP.
"""

from __future__ import annotations

import logging
import multiprocessing
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Callable, Iterable, Mapping, Sequence

from .chardata import CharTables
from .errors import TableLoadError
from .glyph import glyph_sim, structure_aware_code
from .phonetic import edit_ratio_sim, phonetic_sim

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SimilarityParams:
    """Scoring knobs: similarity weight, phonetic/glyph mix, copy punishment,
    and the confusion-set cut."""

    alpha: float = 1.1
    beta: float = 0.7
    copy_penalty: float = 0.0
    confusion_threshold: float = 0.5

    def __post_init__(self) -> None:
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError("beta must lie in [0, 1]")
        if self.copy_penalty < 0:
            raise ValueError("copy_penalty must be >= 0")
        if not 0.0 <= self.confusion_threshold <= 1.0:
            raise ValueError("confusion_threshold must lie in [0, 1]")


def sim(tables: CharTables, c1: str, c2: str, beta: float = 0.7) -> float:
    """beta * phonetic + (1 - beta) * glyph.

    Identity is pinned to exactly 1.0 for any scalar, Han or not; distinct
    pairs without any table data score 0.0.
    """
    if not 0.0 <= beta <= 1.0:
        raise ValueError("beta must lie in [0, 1]")
    if c1 == c2:
        return 1.0
    return beta * phonetic_sim(tables, c1, c2) + (1.0 - beta) * glyph_sim(tables, c1, c2)


# ---------------------------------------------------------------------------
# Bulk pairwise evaluation


def _bit_lcs(m: int, masks: dict[str, int], b: str) -> int:
    """LCS length via the bit-vector recurrence; ``masks`` maps each symbol of
    the first string to the bitmask of its positions."""
    if m == 0 or not b:
        return 0
    full = (1 << m) - 1
    v = full
    for ch in b:
        u = v & masks.get(ch, 0)
        v = ((v + u) | (v - u)) & full
    return m - v.bit_count()


def _masks(s: str) -> dict[str, int]:
    out: dict[str, int] = {}
    for i, ch in enumerate(s):
        out[ch] = out.get(ch, 0) | (1 << i)
    return out


class _PairScorer:
    """Per-character features prepared once so that scoring a pair is a few
    dictionary hits and bit operations. Produces floats identical to sim()."""

    def __init__(self, tables: CharTables, charset: Sequence[str], beta: float):
        self.beta = beta
        self.readings = [tables.pinyin.get(c) or () for c in charset]
        self.fourcorner = [tables.fourcorner.get(c) for c in charset]
        sfc = [structure_aware_code(tables, c) for c in charset]
        strokes = [tables.strokes.get(c) for c in charset]
        self.sfc = sfc
        self.strokes = strokes
        self.sfc_masks = [(len(s), _masks(s)) if s is not None else None for s in sfc]
        self.stroke_masks = [(len(s), _masks(s)) if s is not None else None
                             for s in strokes]
        self._py_cache: dict[tuple[str, str], float] = {}

    def _pinyin_pair(self, p1: str, p2: str) -> float:
        key = (p1, p2) if p1 <= p2 else (p2, p1)
        cached = self._py_cache.get(key)
        if cached is None:
            total = len(p1) + len(p2)
            dist = total - 2 * _bit_lcs(len(p1), _masks(p1), p2)
            cached = edit_ratio_sim(dist, total)
            self._py_cache[key] = cached
        return cached

    def score(self, i: int, j: int) -> float:
        phonetic = 0.0
        for p1 in self.readings[i]:
            for p2 in self.readings[j]:
                s = self._pinyin_pair(p1, p2)
                if s > phonetic:
                    phonetic = s

        f1, f2 = self.fourcorner[i], self.fourcorner[j]
        g1 = sum(d1 == d2 for d1, d2 in zip(f1, f2)) / 4.0 if f1 and f2 else 0.0

        if self.sfc[i] is not None and self.sfc[j] is not None:
            m, masks = self.sfc_masks[i]
            total = m + len(self.sfc[j])
            g2 = edit_ratio_sim(total - 2 * _bit_lcs(m, masks, self.sfc[j]), total)
        else:
            g2 = 0.0

        if self.strokes[i] is not None and self.strokes[j] is not None:
            m, masks = self.stroke_masks[i]
            other = self.strokes[j]
            lcs = _bit_lcs(m, masks, other)
            total = m + len(other)
            g3 = edit_ratio_sim(total - 2 * lcs, total)
            g4 = lcs / max(m, len(other))
        else:
            g3 = g4 = 0.0

        glyph = (g1 + g2 + g3 + g4) / 4.0
        return self.beta * phonetic + (1.0 - self.beta) * glyph


_WORKER_SCORER: _PairScorer | None = None
_WORKER_FLOOR = 0.0


def _worker_init(scorer: _PairScorer, floor: float) -> None:
    global _WORKER_SCORER, _WORKER_FLOOR
    _WORKER_SCORER = scorer
    _WORKER_FLOOR = floor


def _worker_rows(rows: list[int]) -> list[tuple[int, int, float]]:
    scorer = _WORKER_SCORER
    out = []
    n = len(scorer.readings)
    for i in rows:
        for j in range(i + 1, n):
            s = scorer.score(i, j)
            if s >= _WORKER_FLOOR:
                out.append((i, j, s))
    return out


def pairwise_scores(tables: CharTables, charset: Sequence[str], beta: float,
                    floor: float, workers: int | None = None,
                    ) -> list[tuple[int, int, float]]:
    """All unordered index pairs (i < j) with score >= floor, sorted by (i, j).

    Evaluation may run on several processes; the sorted assembly makes the
    result independent of scheduling.
    """
    scorer = _PairScorer(tables, charset, beta)
    n = len(charset)
    rows = list(range(n - 1))
    if workers and workers > 1 and n > 200:
        # Strided row chunks even out the triangular workload.
        chunks = [rows[k::workers * 4] for k in range(workers * 4)]
        with multiprocessing.Pool(workers, _worker_init, (scorer, floor)) as pool:
            parts = pool.map(_worker_rows, chunks)
        pairs = [p for part in parts for p in part]
    else:
        _worker_init(scorer, floor)
        pairs = _worker_rows(rows)
    pairs.sort(key=lambda p: (p[0], p[1]))
    return pairs


# ---------------------------------------------------------------------------
# Similarity matrix


def _pair_key(c1: str, c2: str) -> tuple[str, str]:
    return (c1, c2) if ord(c1) <= ord(c2) else (c2, c1)


@dataclass(frozen=True)
class SimilarityMatrix:
    """Precomputed high-similarity neighborhoods over a charset.

    Neighbor lists hold pairs scoring at least ``store_floor``, sorted by
    descending score then codepoint, excluding the self-pair. ``score`` is
    exact for any pair: identity is 1.0, stored pairs are indexed, and
    anything else is recomputed from ``tables`` when available.
    """

    charset: tuple[str, ...]
    beta: float
    store_floor: float
    neighbors: Mapping[str, tuple[tuple[str, float], ...]]
    scores: Mapping[tuple[str, str], float]
    tables: CharTables | None = field(default=None, repr=False, compare=False)

    @property
    def pair_count(self) -> int:
        return len(self.scores)

    def neighbors_of(self, ch: str) -> tuple[tuple[str, float], ...]:
        return self.neighbors.get(ch, ())

    def score(self, c1: str, c2: str) -> float:
        if c1 == c2:
            return 1.0
        stored = self.scores.get(_pair_key(c1, c2))
        if stored is not None:
            return stored
        if self.tables is not None:
            return sim(self.tables, c1, c2, self.beta)
        return 0.0


def _dedupe(charset: Iterable[str]) -> tuple[str, ...]:
    seen: set[str] = set()
    out: list[str] = []
    for ch in charset:
        if ch not in seen:
            seen.add(ch)
            out.append(ch)
    return tuple(out)


def build_matrix(tables: CharTables, charset: Iterable[str], beta: float = 0.7,
                 store_floor: float = 0.4, workers: int | None = None,
                 ) -> SimilarityMatrix:
    """Evaluate all unordered pairs of ``charset`` and keep those scoring at
    least ``store_floor``, symmetrically."""
    if not 0.0 <= beta <= 1.0:
        raise ValueError("beta must lie in [0, 1]")
    chars = _dedupe(charset)
    if not chars:
        raise ValueError("charset must be nonempty")

    pairs = pairwise_scores(tables, chars, beta, store_floor, workers)
    scores: dict[tuple[str, str], float] = {}
    near: dict[str, list[tuple[str, float]]] = {c: [] for c in chars}
    for i, j, s in pairs:
        a, b = chars[i], chars[j]
        scores[_pair_key(a, b)] = s
        near[a].append((b, s))
        near[b].append((a, s))
    neighbors = {c: tuple(sorted(lst, key=lambda e: (-e[1], ord(e[0]))))
                 for c, lst in near.items()}
    return SimilarityMatrix(
        charset=chars, beta=beta, store_floor=store_floor,
        neighbors=MappingProxyType(neighbors), scores=MappingProxyType(scores),
        tables=tables,
    )


def save_matrix(matrix: SimilarityMatrix, path: str | Path) -> int:
    """Write the stored pairs as a sorted TSV cache; returns the pair count."""
    lines = [f"#beta={matrix.beta:g} floor={matrix.store_floor:g}"]
    for (c1, c2), s in sorted(matrix.scores.items(),
                              key=lambda kv: (ord(kv[0][0]), ord(kv[0][1]))):
        lines.append(f"{c1}\t{c2}\t{s:.6f}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return matrix.pair_count


def load_matrix(path: str | Path, tables: CharTables | None = None,
                ) -> SimilarityMatrix:
    """Read a matrix cache written by :func:`save_matrix`.

    The charset is reconstructed from the stored pairs; attach ``tables`` to
    restore exact scoring for uncached pairs. Serialized scores carry six
    decimals, so faithfulness to recomputation is 5e-7 here rather than the
    in-memory guarantee.
    """
    path = Path(path)
    if not path.is_file():
        raise TableLoadError(f"missing matrix cache: {path}")
    beta = floor = None
    scores: dict[tuple[str, str], float] = {}
    near: dict[str, list[tuple[str, float]]] = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if lineno == 1 and line.startswith("#"):
                for item in line.lstrip("#").split():
                    key, _, value = item.partition("=")
                    if key == "beta":
                        beta = float(value)
                    elif key == "floor":
                        floor = float(value)
                continue
            if not line or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 3:
                raise TableLoadError(f"{path.name}:{lineno}: expected 3 columns")
            c1, c2, s = cols[0], cols[1], float(cols[2])
            scores[_pair_key(c1, c2)] = s
            near.setdefault(c1, []).append((c2, s))
            near.setdefault(c2, []).append((c1, s))
    if beta is None or floor is None:
        raise TableLoadError(f"{path.name}: missing '#beta=... floor=...' header")
    neighbors = {c: tuple(sorted(lst, key=lambda e: (-e[1], ord(e[0]))))
                 for c, lst in near.items()}
    return SimilarityMatrix(
        charset=tuple(sorted(near, key=ord)), beta=beta, store_floor=floor,
        neighbors=MappingProxyType(neighbors), scores=MappingProxyType(scores),
        tables=tables,
    )


# ---------------------------------------------------------------------------
# Confusion sets


def confusion_set(source: SimilarityMatrix | CharTables, threshold: float,
                  charset: Iterable[str] | None = None, beta: float = 0.7,
                  workers: int | None = None) -> list[tuple[str, str]]:
    """All unordered pairs whose similarity strictly exceeds ``threshold``.

    ``source`` is either a prebuilt matrix (its own beta applies) or tables
    plus an explicit charset. Pairs come back codepoint-sorted, smaller
    first, self-pairs excluded.
    """
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must lie in [0, 1]")
    if isinstance(source, SimilarityMatrix):
        if threshold < source.store_floor:
            if source.tables is None:
                raise ValueError(
                    "threshold below the matrix floor needs tables to rescan")
            return confusion_set(source.tables, threshold, source.charset,
                                 source.beta, workers)
        pairs = [key for key, s in source.scores.items() if s > threshold]
        return sorted(pairs, key=lambda p: (ord(p[0]), ord(p[1])))
    if charset is None:
        raise ValueError("confusion_set from tables needs a charset")
    chars = _dedupe(charset)
    found = pairwise_scores(source, chars, beta, threshold, workers)
    pairs = [_pair_key(chars[i], chars[j]) for i, j, s in found if s > threshold]
    return sorted(pairs, key=lambda p: (ord(p[0]), ord(p[1])))


def save_confusion_set(pairs: Sequence[tuple[str, str]], path: str | Path,
                       threshold: float, beta: float) -> None:
    lines = [f"#beta={beta:g} threshold={threshold:g}"]
    lines += [f"{c1}\t{c2}" for c1, c2 in pairs]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_pair_file(path: str | Path) -> dict[str, set[str]]:
    """Neighbor map from a confusion-set or matrix-cache TSV (2 or 3 columns)."""
    path = Path(path)
    if not path.is_file():
        raise TableLoadError(f"missing pair file: {path}")
    out: dict[str, set[str]] = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) not in (2, 3):
                raise TableLoadError(f"{path.name}:{lineno}: expected 2 or 3 columns")
            c1, c2 = cols[0], cols[1]
            out.setdefault(c1, set()).add(c2)
            out.setdefault(c2, set()).add(c1)
    return out


# ---------------------------------------------------------------------------
# Similarity providers for decoding


def similarity_provider(tables: CharTables | None = None, beta: float = 0.7,
                        matrix: SimilarityMatrix | None = None,
                        ) -> Callable[[str, str], float]:
    """A pure (source, candidate) -> similarity callable for the decoder.

    Backed by the matrix when given, otherwise by a memoized scalar
    computation over the tables. The matrix path indexes one neighbor row
    per source character, so scoring a candidate costs a dictionary hit;
    pairs outside the stored neighborhood recompute exactly through the
    matrix's tables when attached, else score 0.0.
    """
    if matrix is not None:
        neighbors = matrix.neighbors
        mat_tables = matrix.tables
        mat_beta = matrix.beta
        rows: dict[str, dict[str, float]] = {}

        def matrix_provider(c1: str, c2: str) -> float:
            if c1 == c2:
                return 1.0
            row = rows.get(c1)
            if row is None:
                row = dict(neighbors.get(c1, ()))
                rows[c1] = row
            value = row.get(c2)
            if value is None:
                value = (sim(mat_tables, c1, c2, mat_beta)
                         if mat_tables is not None else 0.0)
                row[c2] = value
            return value

        return matrix_provider

    if tables is None:
        raise ValueError("similarity_provider needs tables or a matrix")
    if not 0.0 <= beta <= 1.0:
        raise ValueError("beta must lie in [0, 1]")
    cache: dict[tuple[str, str], float] = {}

    def provider(c1: str, c2: str) -> float:
        if c1 == c2:
            return 1.0
        key = _pair_key(c1, c2)
        value = cache.get(key)
        if value is None:
            value = sim(tables, c1, c2, beta)
            cache[key] = value
        return value

    return provider
