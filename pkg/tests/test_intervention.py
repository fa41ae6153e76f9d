import json
from pathlib import Path

import pytest

from hanzisim import fusion
from hanzisim.errors import IngestError
from hanzisim.fusion import SimilarityParams
from hanzisim.intervention import (
    CandidateDistribution,
    correct_sentence,
    correction_record,
    ingest_distributions,
    intervene,
    parse_sentence,
)

from oracles import oracle_choose

FIXTURES = Path(__file__).parent / "fixtures"

# Stub similarity used by the arithmetic examples: source 读 against others.
STUB_SIMS = {("读", "读"): 1.0, ("读", "度"): 0.8, ("读", "少"): 0.05}


def stub_sim(c1, c2):
    if c1 == c2:
        return 1.0
    return STUB_SIMS.get((c1, c2), STUB_SIMS.get((c2, c1), 0.0))


def dist(source, cands, position=0):
    return CandidateDistribution(position=position, source_char=source,
                                 candidates=tuple(cands))


class TestIntervene:
    def test_alpha_zero_is_model_argmax(self):
        d = dist("读", [("少", 0.40), ("度", 0.35), ("读", 0.05)])
        chosen, scored = intervene(d, SimilarityParams(alpha=0.0), stub_sim)
        assert chosen == "少"
        assert [c.score for c in scored] == [0.40, 0.35, 0.05]
        assert all(c.similarity == 0.0 for c in scored)

    def test_stub_arithmetic(self):
        d = dist("读", [("少", 0.40), ("度", 0.35), ("读", 0.05)])
        chosen, scored = intervene(d, SimilarityParams(alpha=1.1), stub_sim)
        by_char = {c.char: c for c in scored}
        assert by_char["读"].score == pytest.approx(1.15, abs=1e-12)
        assert by_char["度"].score == pytest.approx(1.23, abs=1e-12)
        assert by_char["少"].score == pytest.approx(0.455, abs=1e-12)
        assert chosen == "度"

    def test_penalty_shifts_but_does_not_always_flip(self):
        cands = [("少", 0.40), ("度", 0.30), ("读", 0.20)]
        chosen, _ = intervene(dist("读", cands), SimilarityParams(alpha=1.1),
                              stub_sim)
        assert chosen == "读"  # 1.30 vs 1.18
        chosen, _ = intervene(dist("读", cands),
                              SimilarityParams(alpha=1.1, copy_penalty=0.1),
                              stub_sim)
        assert chosen == "读"  # 1.20 still beats 1.18

    def test_penalty_touches_only_the_source_score(self):
        cands = [("少", 0.40), ("度", 0.35), ("读", 0.05)]
        _, plain = intervene(dist("读", cands), SimilarityParams(alpha=1.1),
                             stub_sim)
        _, penalized = intervene(dist("读", cands),
                                 SimilarityParams(alpha=1.1, copy_penalty=0.1),
                                 stub_sim)
        for a, b in zip(plain, penalized):
            assert a.char == b.char
            if a.char == "读":
                assert b.score == pytest.approx(a.score - 0.1, abs=1e-15)
            else:
                assert a == b  # bit-identical dataclasses

    def test_source_missing_raises_with_position(self):
        d = dist("读", [("少", 0.4)], position=7)
        with pytest.raises(IngestError, match="position 7"):
            intervene(d, SimilarityParams(), stub_sim)

    def test_tie_break_higher_prob_then_lower_codepoint(self):
        params = SimilarityParams(alpha=0.0)
        d = dist("a", [("a", 0.3), ("b", 0.4), ("c", 0.4)])
        chosen, _ = intervene(d, params, stub_sim)
        assert chosen == "b"  # same score, same prob as c, lower codepoint
        d = dist("a", [("a", 0.5), ("b", 0.5)])
        chosen, _ = intervene(d, params, stub_sim)
        assert chosen == "a"

    def test_alpha_monotone_copy_preference(self):
        d = dist("读", [("少", 0.40), ("度", 0.35), ("读", 0.05)])
        margins = []
        for alpha in [0.0, 0.5, 1.0, 2.0, 5.0]:
            _, scored = intervene(d, SimilarityParams(alpha=alpha), stub_sim)
            by_char = {c.char: c for c in scored}
            margins.append([by_char["读"].score - by_char[y].score
                            for y in ("少", "度")])
        for later, earlier in zip(margins[1:], margins):
            assert all(lo >= hi - 1e-12 for lo, hi in zip(later, earlier))

    def test_matches_bruteforce_oracle_random(self, rng):
        chars = "读度少书输术数熟速"
        for _ in range(300):
            pool = rng.sample(chars, rng.randint(2, 6))
            source = rng.choice(pool)
            cands = [(ch, round(rng.random() * 0.5, 6)) for ch in pool]
            d = dist(source, cands)
            alpha = rng.choice([0.0, 0.7, 1.1, 3.0])
            penalty = rng.choice([0.0, 0.1, 0.25])
            params = SimilarityParams(alpha=alpha, copy_penalty=penalty)
            sims = {(a, b): rng.random() for a in chars for b in chars}
            sims.update({(a, a): 1.0 for a in chars})
            fn = lambda a, b: sims[(a, b)]
            chosen, _ = intervene(d, params, fn)
            assert chosen == oracle_choose(cands, source, alpha, penalty, fn)


class TestCorrectSentence:
    def test_copy_fixed_point(self, tables):
        simfn = fusion.similarity_provider(tables)
        sd = parse_sentence(json.loads(
            (FIXTURES / "dists_small.jsonl").read_text(encoding="utf-8")
            .splitlines()[1]))
        hyp, traces = correct_sentence(sd, SimilarityParams(), simfn)
        assert hyp == sd.text
        assert len(traces) == len(sd.text)

    def test_single_substitution(self, tables):
        simfn = fusion.similarity_provider(tables)
        sd = next(ingest_distributions(FIXTURES / "dists_small.jsonl"))
        hyp, _ = correct_sentence(sd, SimilarityParams(), simfn)
        assert hyp == "运动过度"
        assert sum(a != b for a, b in zip(hyp, sd.text)) == 1

    def test_huge_alpha_keeps_input(self, tables):
        simfn = fusion.similarity_provider(tables)
        params = SimilarityParams(alpha=1e6)
        for sd in ingest_distributions(FIXTURES / "dists_small.jsonl"):
            hyp, _ = correct_sentence(sd, params, simfn)
            assert hyp == sd.text

    def test_length_preserved_and_deterministic(self, tables, rng):
        simfn = fusion.similarity_provider(tables)
        pool = [c for c in tables.fourcorner][:300]
        params = SimilarityParams()
        for _ in range(30):
            text = "".join(rng.choice(pool) for _ in range(rng.randint(1, 12)))
            positions = []
            for i, ch in enumerate(text):
                others = rng.sample(pool, 3)
                cands = [[ch, round(rng.random() * 0.6, 4)]] + [
                    [o, round(rng.random() * 0.1, 4)] for o in others if o != ch]
                positions.append({"i": i, "cands": cands})
            sd = parse_sentence({"id": "x", "text": text, "positions": positions})
            hyp1, _ = correct_sentence(sd, params, simfn)
            hyp2, _ = correct_sentence(sd, params, simfn)
            assert hyp1 == hyp2
            assert len(hyp1) == len(text)


class TestIngest:
    def test_well_formed(self):
        records = list(ingest_distributions(FIXTURES / "dists_small.jsonl"))
        assert [r.id for r in records] == ["d1", "d2"]
        assert records[0].positions[3].source_char == "读"

    def test_position_gap_named(self):
        with pytest.raises(IngestError, match="missing index 1"):
            list(ingest_distributions(FIXTURES / "dists_gap.jsonl"))

    def test_source_must_be_candidate(self):
        with pytest.raises(IngestError, match="source character"):
            list(ingest_distributions(FIXTURES / "dists_nosource.jsonl"))

    def test_malformed_json_reports_line(self):
        lines = ['{"id": "a", "text": "书", "positions": '
                 '[{"i": 0, "cands": [["书", 1.0]]}]}', "{broken"]
        with pytest.raises(IngestError, match="line 2"):
            list(ingest_distributions(lines))

    def test_duplicate_candidate_rejected(self):
        record = {"id": "a", "text": "书",
                  "positions": [{"i": 0, "cands": [["书", 0.5], ["书", 0.1]]}]}
        with pytest.raises(IngestError, match="duplicate"):
            parse_sentence(record)

    def test_probability_range(self):
        record = {"id": "a", "text": "书",
                  "positions": [{"i": 0, "cands": [["书", 1.5]]}]}
        with pytest.raises(IngestError, match="outside"):
            parse_sentence(record)

    def test_probability_sum_cap(self):
        record = {"id": "a", "text": "书",
                  "positions": [{"i": 0, "cands": [["书", 0.9], ["输", 0.2]]}]}
        with pytest.raises(IngestError, match="sum"):
            parse_sentence(record)

    def test_duplicate_position_rejected(self):
        record = {"id": "a", "text": "看书", "positions": [
            {"i": 0, "cands": [["看", 0.9]]},
            {"i": 0, "cands": [["看", 0.9]]}]}
        with pytest.raises(IngestError):
            parse_sentence(record)

    def test_large_stream_round_trip(self, tmp_path, rng):
        path = tmp_path / "big.jsonl"
        with path.open("w", encoding="utf-8") as fh:
            for k in range(10_000):
                record = {"id": f"s{k}", "text": "书",
                          "positions": [{"i": 0, "cands": [["书", 0.9]]}]}
                fh.write(json.dumps(record, ensure_ascii=False) + "\n")
        ids = [sd.id for sd in ingest_distributions(path)]
        assert len(ids) == 10_000
        assert ids == [f"s{k}" for k in range(10_000)]


class TestRecords:
    def test_plain_record(self):
        sd = next(ingest_distributions(FIXTURES / "dists_small.jsonl"))
        record = correction_record(sd, "运动过度")
        assert record == {"id": "d1", "src": "运动过读", "hyp": "运动过度"}

    def test_trace_record(self, tables):
        simfn = fusion.similarity_provider(tables)
        sd = next(ingest_distributions(FIXTURES / "dists_small.jsonl"))
        hyp, traces = correct_sentence(sd, SimilarityParams(), simfn)
        record = correction_record(sd, hyp, traces)
        assert [t["i"] for t in record["trace"]] == [0, 1, 2, 3]
        last = record["trace"][3]
        assert last["chosen"] == "度"
        for char, prob, similarity, score in last["cands"]:
            assert score == pytest.approx(
                prob - 0.0 + 1.1 * similarity, abs=1e-12)
