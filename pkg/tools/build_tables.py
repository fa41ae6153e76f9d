#!/usr/bin/env python3
"""Regenerate the bundled character tables under src/hanzisim/data/.

Sources (build-time only, never runtime dependencies):
  * pypinyin          - pinyin readings incl. heteronyms (pip install pypinyin)
  * char-similar      - four-corner codes, stroke-order digits, structure codes,
                        chaizi-style component decomposition (Apache-2.0).
                        Point --char-similar-data at its extracted data/ directory
                        (the files char_fourangle.dict, char_order.dict,
                        char_struct.dict, char_stroke.dict).
  * Jun Da frequency  - modern Chinese character frequency list; the copy inside
                        the cjkradlib wheel works (--junda data/zh/junda.tsv).

The bundle covers the most frequent characters plus everything the test suite
touches, and is deterministic: rows are sorted by codepoint, so reruns against
the same sources are byte-identical.

Usage:
    python tools/build_tables.py \
        --char-similar-data /path/to/char_similar/data \
        --junda /path/to/junda.tsv \
        --out src/hanzisim/data \
        --target-size 3200
"""

from __future__ import annotations

import argparse
import json
import sys
import unicodedata
from pathlib import Path

# Structure-code conventions of the char-similar dataset. 0 is the
# single-body (atomic) class; everything else is a compound layout.
STRUCT_LETTER = {
    "1": ("B", "LeftRight"),
    "2": ("C", "UpDown"),
    "3": ("D", "LeftMiddleRight"),
    "4": ("E", "UpMiddleDown"),
    "5": ("F", "EncloseUpperRight"),
    "6": ("G", "EncloseUpperLeft"),
    "7": ("H", "EncloseLowerLeft"),
    "8": ("J", "EncloseTop"),
    "9": ("K", "EncloseBottom"),
    "10": ("L", "EncloseLeft"),
    "11": ("M", "Enclosure"),
    "12": ("N", "Interlocked"),
    "13": ("P", "Triplet"),
}

STROKE_SYMBOL = {"1": "一", "2": "丨", "3": "ノ", "4": "、", "5": "𠃌"}

# Characters the shipped examples, fixtures and acceptance checks rely on.
# The frequency cut usually covers them all; listing them keeps the bundle
# stable if the cut ever changes.
REQUIRED = (
    "忠仲木本中心人入读度少行记得戴眼睛镜"
    "今天汽气很好我们去公圆园玩他在看书大家都来了运动过导致的"
    "肌肉酸痛是空日说话语言文字错误正确"
)

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


def is_han(ch: str) -> bool:
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in CJK_RANGES)


def normalize_syllable(s: str) -> str:
    """Toneless ASCII pinyin: u-umlaut becomes 'v', diacritics dropped."""
    s = s.strip().lower().replace("ü", "v")
    s = "".join(c for c in unicodedata.normalize("NFD", s)
                if not unicodedata.combining(c))
    s = "".join(c for c in s if c.isascii() and c.isalpha())
    return s


def pinyin_readings(ch: str) -> list[str]:
    from pypinyin import Style, pinyin

    raw = pinyin(ch, style=Style.NORMAL, heteronym=True, errors=lambda x: [])
    if not raw:
        return []
    seen: list[str] = []
    for syll in raw[0]:
        norm = normalize_syllable(syll)
        if norm and norm not in seen:
            seen.append(norm)
    return seen


def load_json(path: Path) -> dict:
    with path.open(encoding="utf-8") as fh:
        return json.load(fh)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--char-similar-data", type=Path, required=True)
    ap.add_argument("--junda", type=Path, required=True)
    ap.add_argument("--out", type=Path, required=True)
    ap.add_argument("--target-size", type=int, default=3200)
    args = ap.parse_args()

    src = args.char_similar_data
    fourangle = load_json(src / "char_fourangle.dict")
    order = load_json(src / "char_order.dict")
    struct = load_json(src / "char_struct.dict")
    parts = load_json(src / "char_stroke.dict")  # chaizi components, despite the name

    # Frequency-ranked candidates, most frequent first.
    ranked: list[str] = []
    for line in args.junda.read_text(encoding="utf-8", errors="replace").splitlines():
        cols = line.split("\t")
        if len(cols) >= 2 and len(cols[1]) == 1 and is_han(cols[1]):
            ranked.append(cols[1])

    def covered(ch: str) -> bool:
        return ch in fourangle and ch in order and ch in struct

    charset: list[str] = []
    for ch in ranked:
        if len(charset) >= args.target_size:
            break
        if covered(ch) and ch not in charset:
            charset.append(ch)
    for ch in REQUIRED:
        if is_han(ch) and ch not in charset:
            charset.append(ch)

    def decomposition(ch: str) -> tuple[str, str]:
        """(structure letter, components) or ('A', '') for atomic."""
        code = str(struct.get(ch, "0"))
        if code == "0" or code not in STRUCT_LETTER:
            return "A", ""
        comps = parts.get(ch) or []
        comps = [c for c in comps if len(c) == 1 and is_han(c)]
        if len(comps) < 2:
            return "A", ""
        return STRUCT_LETTER[code][0], "".join(comps)

    rows_pinyin: dict[str, str] = {}
    rows_fc: dict[str, str] = {}
    rows_decomp: dict[str, tuple[str, str]] = {}
    rows_strokes: dict[str, str] = {}
    component_refs: set[str] = set()

    for ch in charset:
        readings = pinyin_readings(ch)
        if readings:
            rows_pinyin[ch] = ",".join(readings)
        code = str(fourangle.get(ch, ""))
        if len(code) >= 4 and code[:4].isdigit():
            rows_fc[ch] = code[:4]
        letter, comps = decomposition(ch)
        rows_decomp[ch] = (letter, comps)
        component_refs.update(comps)
        digits = str(order.get(ch, ""))
        if digits and all(d in STROKE_SYMBOL for d in digits):
            rows_strokes[ch] = "".join(STROKE_SYMBOL[d] for d in digits)

    # Referenced components need four-corner entries for the structure-aware
    # code; pull in full rows where the sources have them.
    for ch in sorted(component_refs):
        if ch in rows_fc:
            continue
        code = str(fourangle.get(ch, ""))
        if len(code) >= 4 and code[:4].isdigit():
            rows_fc[ch] = code[:4]
        readings = pinyin_readings(ch)
        if readings:
            rows_pinyin.setdefault(ch, ",".join(readings))
        digits = str(order.get(ch, ""))
        if digits and all(d in STROKE_SYMBOL for d in digits):
            rows_strokes.setdefault(ch, "".join(STROKE_SYMBOL[d] for d in digits))
        rows_decomp.setdefault(ch, ("A", ""))

    every = sorted(set(rows_pinyin) | set(rows_fc) | set(rows_decomp) | set(rows_strokes))
    missing: list[str] = []
    for ch in every:
        gaps = [name for name, table in (
            ("pinyin", rows_pinyin), ("fourcorner", rows_fc),
            ("decomp", rows_decomp), ("strokes", rows_strokes)) if ch not in table]
        if gaps:
            missing.append(f"{ch}\t{','.join(gaps)}")

    required_missing = [ch for ch in REQUIRED if is_han(ch) and (
        ch not in rows_pinyin or ch not in rows_fc
        or ch not in rows_decomp or ch not in rows_strokes)]
    if required_missing:
        print(f"required characters incomplete: {required_missing}", file=sys.stderr)
        return 1

    out = args.out
    out.mkdir(parents=True, exist_ok=True)

    def dump(name: str, header: str | None, lines: list[str]) -> None:
        body = ([header] if header else []) + lines
        (out / name).write_text("\n".join(body) + "\n", encoding="utf-8")

    dump("pinyin.tsv", "# char <TAB> comma-separated toneless readings",
         [f"{ch}\t{rows_pinyin[ch]}" for ch in sorted(rows_pinyin)])
    dump("fourcorner.tsv", "# char <TAB> four-corner code (first four digits)",
         [f"{ch}\t{rows_fc[ch]}" for ch in sorted(rows_fc)])
    alphabet = ",".join(f"{v[0]}={v[1]}" for v in STRUCT_LETTER.values())
    dump("decomp.tsv", f"#alphabet: {alphabet}",
         [f"{ch}\t{rows_decomp[ch][0]}\t{rows_decomp[ch][1]}" for ch in sorted(rows_decomp)])
    dump("strokes.tsv", "#strokes: " + "".join(STROKE_SYMBOL[d] for d in "12345"),
         [f"{ch}\t{rows_strokes[ch]}" for ch in sorted(rows_strokes)])
    dump("charset.txt", None, sorted(charset))
    dump("missing.txt", "# char <TAB> tables without an entry", missing)

    print(f"charset: {len(charset)} characters "
          f"(pinyin {len(rows_pinyin)}, fourcorner {len(rows_fc)}, "
          f"decomp {len(rows_decomp)}, strokes {len(rows_strokes)}, "
          f"incomplete {len(missing)})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
