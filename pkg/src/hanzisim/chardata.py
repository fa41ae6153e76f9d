"""Character knowledge tables: pinyin readings, four-corner codes,
structural decomposition, and stroke sequences.

Tables are loaded once from TSV files and are immutable afterwards; every
similarity computation in the toolkit only reads from them. Lookups are
total: absent keys yield ``None`` instead of raising, so incomplete
dictionaries degrade softly downstream.
"""

from __future__ import annotations

import logging
import unicodedata
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping

from .errors import TableLoadError

log = logging.getLogger(__name__)

# CJK Unified Ideographs, base block plus extensions A-G.
CJK_RANGES = (
    (0x4E00, 0x9FFF),
    (0x3400, 0x4DBF),
    (0x20000, 0x2A6DF),
    (0x2A700, 0x2B73F),
    (0x2B740, 0x2B81F),
    (0x2B820, 0x2CEAF),
    (0x2CEB0, 0x2EBEF),
    (0x30000, 0x3134F),
)

ATOMIC = "A"

TABLE_FILES = ("pinyin.tsv", "fourcorner.tsv", "decomp.tsv", "strokes.tsv")


def is_han(ch: str) -> bool:
    """True iff ``ch`` is a single scalar inside the CJK Unified blocks."""
    if len(ch) != 1:
        return False
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in CJK_RANGES)


@dataclass(frozen=True)
class Decomposition:
    """One-level structural split of a character.

    ``structure`` is a single uppercase letter; ``A`` marks an atomic
    character and is the only letter allowed with no components.
    """

    structure: str
    components: tuple[str, ...]

    @property
    def is_atomic(self) -> bool:
        return self.structure == ATOMIC


@dataclass(frozen=True)
class CharTables:
    """Immutable bundle of the four per-character tables."""

    pinyin: Mapping[str, tuple[str, ...]]
    fourcorner: Mapping[str, str]
    decomposition: Mapping[str, Decomposition]
    strokes: Mapping[str, str]
    stroke_alphabet: tuple[str, ...]
    structure_names: Mapping[str, str]

    def chars(self) -> set[str]:
        """Every character present in at least one table."""
        return (set(self.pinyin) | set(self.fourcorner)
                | set(self.decomposition) | set(self.strokes))


def normalize_syllable(raw: str) -> str:
    """Toneless ASCII pinyin: lowercase, u-umlaut as 'v', digits and
    diacritics stripped."""
    s = raw.strip().lower().replace("ü", "v")
    s = "".join(c for c in unicodedata.normalize("NFD", s)
                if not unicodedata.combining(c))
    return "".join(c for c in s if "a" <= c <= "z")


def default_data_dir() -> Path:
    """Directory of the table bundle shipped inside the package."""
    return Path(str(resources.files("hanzisim").joinpath("data")))


def _rows(path: Path) -> Iterable[tuple[int, list[str]]]:
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            yield lineno, line.split("\t")


def _header(path: Path, prefix: str) -> str | None:
    with path.open(encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith(prefix):
                return line[len(prefix):].strip()
            if line and not line.startswith("#"):
                break
    return None


def _key(path: Path, lineno: int, field: str) -> str:
    if not is_han(field):
        raise TableLoadError(
            f"{path.name}:{lineno}: key {field!r} is not a single Han character")
    return field


def _warn_dup(path: Path, lineno: int, ch: str) -> None:
    log.warning("%s:%s: duplicate entry for %r, keeping the later row",
                path.name, lineno, ch)


def _load_pinyin(path: Path) -> dict[str, tuple[str, ...]]:
    table: dict[str, tuple[str, ...]] = {}
    for lineno, cols in _rows(path):
        if len(cols) != 2 or not cols[1]:
            raise TableLoadError(f"{path.name}:{lineno}: expected <char>\\t<readings>")
        ch = _key(path, lineno, cols[0])
        readings: list[str] = []
        for raw in cols[1].split(","):
            norm = normalize_syllable(raw)
            if not norm:
                raise TableLoadError(
                    f"{path.name}:{lineno}: empty reading after normalization")
            if norm not in readings:
                readings.append(norm)
        if ch in table:
            _warn_dup(path, lineno, ch)
        table[ch] = tuple(readings)
    return table


def _load_fourcorner(path: Path) -> dict[str, str]:
    table: dict[str, str] = {}
    for lineno, cols in _rows(path):
        if len(cols) != 2:
            raise TableLoadError(f"{path.name}:{lineno}: expected <char>\\t<code>")
        ch = _key(path, lineno, cols[0])
        code = cols[1]
        if len(code) != 4 or not code.isascii() or not code.isdigit():
            raise TableLoadError(
                f"{path.name}:{lineno}: four-corner code must be exactly 4 digits, "
                f"got {code!r}")
        if ch in table:
            _warn_dup(path, lineno, ch)
        table[ch] = code
    return table


def _load_decomp(path: Path) -> tuple[dict[str, Decomposition], dict[str, str]]:
    header = _header(path, "#alphabet:")
    if header is None:
        raise TableLoadError(f"{path.name}: missing '#alphabet:' header line")
    names: dict[str, str] = {}
    for item in header.split(","):
        letter, _, name = item.strip().partition("=")
        if len(letter) != 1 or not letter.isupper() or not name:
            raise TableLoadError(f"{path.name}: bad alphabet item {item!r}")
        if letter == ATOMIC or letter in names:
            raise TableLoadError(f"{path.name}: alphabet letter {letter!r} reused")
        names[letter] = name
    if len(set(names.values())) != len(names):
        raise TableLoadError(f"{path.name}: structure names must be distinct")

    table: dict[str, Decomposition] = {}
    for lineno, cols in _rows(path):
        if len(cols) != 3:
            raise TableLoadError(
                f"{path.name}:{lineno}: expected <char>\\t<letter>\\t<components>")
        ch = _key(path, lineno, cols[0])
        letter, comps = cols[1], cols[2]
        if letter == ATOMIC:
            if comps:
                raise TableLoadError(
                    f"{path.name}:{lineno}: atomic row must have no components")
            decomp = Decomposition(ATOMIC, ())
        else:
            if letter not in names:
                raise TableLoadError(
                    f"{path.name}:{lineno}: unknown structure letter {letter!r}")
            parts = tuple(comps)
            if len(parts) < 2 or not all(is_han(p) for p in parts):
                raise TableLoadError(
                    f"{path.name}:{lineno}: compound needs >=2 Han components")
            decomp = Decomposition(letter, parts)
        if ch in table:
            _warn_dup(path, lineno, ch)
        table[ch] = decomp
    return table, names


def _load_strokes(path: Path) -> tuple[dict[str, str], tuple[str, ...]]:
    header = _header(path, "#strokes:")
    if header is None:
        raise TableLoadError(f"{path.name}: missing '#strokes:' header line")
    alphabet = tuple(header.strip())
    if not alphabet or len(set(alphabet)) != len(alphabet):
        raise TableLoadError(f"{path.name}: stroke alphabet empty or repeated")
    allowed = set(alphabet)
    table: dict[str, str] = {}
    for lineno, cols in _rows(path):
        if len(cols) != 2 or not cols[1]:
            raise TableLoadError(f"{path.name}:{lineno}: expected <char>\\t<strokes>")
        ch = _key(path, lineno, cols[0])
        bad = set(cols[1]) - allowed
        if bad:
            raise TableLoadError(
                f"{path.name}:{lineno}: stroke symbols {sorted(bad)!r} not in the "
                f"declared alphabet")
        if ch in table:
            _warn_dup(path, lineno, ch)
        table[ch] = cols[1]
    return table, alphabet


def load_tables(data_dir: str | Path | None = None) -> CharTables:
    """Load and validate the four tables from ``data_dir``.

    Defaults to the bundled data. Duplicate keys resolve last-wins with a
    warning; compound components without a four-corner entry produce a
    referential-integrity warning but do not fail the load.
    """
    base = Path(data_dir) if data_dir is not None else default_data_dir()
    for name in TABLE_FILES:
        if not (base / name).is_file():
            raise TableLoadError(f"missing table file: {base / name}")

    pinyin = _load_pinyin(base / "pinyin.tsv")
    fourcorner = _load_fourcorner(base / "fourcorner.tsv")
    decomposition, names = _load_decomp(base / "decomp.tsv")
    strokes, alphabet = _load_strokes(base / "strokes.tsv")

    gaps = sorted({comp
                   for decomp in decomposition.values()
                   for comp in decomp.components
                   if comp not in fourcorner})
    if gaps:
        log.warning("decomp.tsv references %d component(s) without a four-corner "
                    "entry: %s", len(gaps), "".join(gaps))

    return CharTables(
        pinyin=MappingProxyType(pinyin),
        fourcorner=MappingProxyType(fourcorner),
        decomposition=MappingProxyType(decomposition),
        strokes=MappingProxyType(strokes),
        stroke_alphabet=alphabet,
        structure_names=MappingProxyType(names),
    )


def lookup(tables: CharTables, ch: str, which: str):
    """Fetch one entry; returns ``None`` when absent (never raises for
    missing keys). ``which`` is one of pinyin/fourcorner/decomposition/strokes.
    """
    try:
        table = {
            "pinyin": tables.pinyin,
            "fourcorner": tables.fourcorner,
            "decomposition": tables.decomposition,
            "strokes": tables.strokes,
        }[which]
    except KeyError:
        raise ValueError(f"unknown table selector {which!r}") from None
    if not is_han(ch):
        return None
    return table.get(ch)


def load_charset(path: str | Path) -> list[str]:
    """Read a one-character-per-line charset file, deduplicated in order."""
    out: list[str] = []
    seen: set[str] = set()
    for lineno, cols in _rows(Path(path)):
        ch = cols[0].strip()
        if len(ch) != 1:
            raise TableLoadError(
                f"{Path(path).name}:{lineno}: expected one character per line")
        if ch not in seen:
            seen.add(ch)
            out.append(ch)
    return out
