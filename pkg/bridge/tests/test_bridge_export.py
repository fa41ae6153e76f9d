import io
import json
import logging
import subprocess
import sys

import pytest

from hanzibridge.export import ExportConfig, export, iter_sentences, read_neighbors
from hanzibridge.models import EchoModel, UniformModel, load_model


def run_export(sentences_file, neighbors_file, model, top_k=8):
    config = ExportConfig(model=model.name, top_k=top_k,
                          neighbors_path=neighbors_file)
    buffer = io.StringIO()
    count = export(iter_sentences(sentences_file), model, config, buffer)
    records = [json.loads(line) for line in buffer.getvalue().splitlines()]
    assert count == len(records)
    return records


def correct_with_core(jsonl_path, out_path, alpha):
    """Drive the toolkit through its CLI, the bridge's only contract."""
    return subprocess.run(
        [sys.executable, "-m", "hanzisim.cli", "correct",
         "--in", str(jsonl_path), "--out", str(out_path),
         "--alpha", str(alpha)],
        capture_output=True, text=True)


class TestUnionRule:
    @pytest.mark.parametrize("model", [UniformModel(), EchoModel()])
    def test_candidates_are_exactly_the_union(self, sentences_file,
                                              neighbors_file, model):
        neighbors = read_neighbors(neighbors_file)
        records = run_export(sentences_file, neighbors_file, model, top_k=8)
        for record in records:
            text = record["text"]
            assert [p["i"] for p in record["positions"]] == list(range(len(text)))
            for entry in record["positions"]:
                source = text[entry["i"]]
                expected = (set(model.top_candidates(text, entry["i"], 8))
                            | {source} | neighbors.get(source, set()))
                assert {c for c, _ in entry["cands"]} == expected

    def test_neighbor_reaches_the_error_position(self, sentences_file,
                                                 neighbors_file):
        records = run_export(sentences_file, neighbors_file, UniformModel())
        glasses = records[0]  # 记得戴眼睛: neighborhood adds 镜 at position 4
        chars = {c for c, _ in glasses["positions"][4]["cands"]}
        assert "镜" in chars

    def test_no_neighbors_file(self, sentences_file):
        model = UniformModel()
        config = ExportConfig(model=model.name, top_k=4, neighbors_path=None)
        buffer = io.StringIO()
        export(iter_sentences(sentences_file), model, config, buffer)
        record = json.loads(buffer.getvalue().splitlines()[0])
        for entry in record["positions"]:
            source = record["text"][entry["i"]]
            expected = set(model.top_candidates(record["text"], entry["i"], 4))
            expected.add(source)
            assert {c for c, _ in entry["cands"]} == expected


class TestDummyProbabilities:
    def test_uniform_is_one_over_union(self, sentences_file, neighbors_file):
        records = run_export(sentences_file, neighbors_file, UniformModel())
        for record in records:
            for entry in record["positions"]:
                share = 1.0 / len(entry["cands"])
                assert all(p == pytest.approx(share, abs=1e-15)
                           for _, p in entry["cands"])

    def test_echo_puts_everything_on_the_source(self, sentences_file,
                                                neighbors_file):
        records = run_export(sentences_file, neighbors_file, EchoModel())
        for record in records:
            for entry in record["positions"]:
                source = record["text"][entry["i"]]
                for ch, prob in entry["cands"]:
                    assert prob == (1.0 if ch == source else 0.0)


class TestCoreContract:
    @pytest.mark.parametrize("model_spec", ["dummy:uniform", "dummy:echo"])
    def test_core_ingest_accepts_exports(self, tmp_path, sentences_file,
                                         neighbors_file, model_spec):
        jsonl = tmp_path / "dists.jsonl"
        config = ExportConfig(model=model_spec, top_k=8,
                              neighbors_path=neighbors_file)
        with jsonl.open("w", encoding="utf-8") as out:
            export(iter_sentences(sentences_file), load_model(model_spec),
                   config, out)
        proc = correct_with_core(jsonl, tmp_path / "hyp.jsonl", alpha=1.1)
        assert proc.returncode == 0, proc.stderr

    @pytest.mark.parametrize("alpha", [0.0, 1.1, 5.0])
    def test_echo_export_is_a_fixed_point(self, tmp_path, sentences_file,
                                          neighbors_file, alpha):
        jsonl = tmp_path / "dists.jsonl"
        config = ExportConfig(model="dummy:echo", top_k=8,
                              neighbors_path=neighbors_file)
        with jsonl.open("w", encoding="utf-8") as out:
            export(iter_sentences(sentences_file), EchoModel(), config, out)
        hyp = tmp_path / "hyp.jsonl"
        proc = correct_with_core(jsonl, hyp, alpha)
        assert proc.returncode == 0, proc.stderr
        for line in hyp.read_text(encoding="utf-8").splitlines():
            record = json.loads(line)
            assert record["hyp"] == record["src"]


class TestOutOfVocabulary:
    class TinyModel:
        name = "tiny"
        VOCAB = ["的", "一"]

        def top_candidates(self, text, position, k):
            return self.VOCAB[:k]

        def probabilities(self, text, position, chars):
            return {ch: 1.0 / len(self.VOCAB)
                    for ch in chars if ch in self.VOCAB}

    def test_oov_source_kept_with_zero_probability(self, tmp_path, caplog):
        sentences = tmp_path / "s.txt"
        sentences.write_text("书\n", encoding="utf-8")
        config = ExportConfig(model="tiny", top_k=2)
        buffer = io.StringIO()
        with caplog.at_level(logging.WARNING):
            export(iter_sentences(sentences), self.TinyModel(), config, buffer)
        record = json.loads(buffer.getvalue())
        cands = dict((c, p) for c, p in record["positions"][0]["cands"])
        assert cands["书"] == 0.0
        assert any("outside the model vocabulary" in r.message
                   for r in caplog.records)


class TestConfigAndFormats:
    def test_top_k_validated(self):
        with pytest.raises(ValueError):
            ExportConfig(model="dummy:uniform", top_k=0)

    def test_unknown_dummy_rejected(self):
        with pytest.raises(ValueError):
            load_model("dummy:nope")

    def test_neighbors_accepts_matrix_cache_columns(self, tmp_path):
        path = tmp_path / "cache.tsv"
        path.write_text("#beta=0.7 floor=0.4\n仲\t忠\t0.817857\n",
                        encoding="utf-8")
        neighbors = read_neighbors(path)
        assert neighbors["忠"] == {"仲"} and neighbors["仲"] == {"忠"}

    def test_bad_neighbor_row_reports_line(self, tmp_path):
        path = tmp_path / "cache.tsv"
        path.write_text("仲\n", encoding="utf-8")
        with pytest.raises(ValueError, match="cache.tsv:1"):
            read_neighbors(path)

    def test_blank_sentence_lines_skipped(self, tmp_path):
        sentences = tmp_path / "s.txt"
        sentences.write_text("书\n\n读\n", encoding="utf-8")
        buffer = io.StringIO()
        count = export(iter_sentences(sentences), UniformModel(),
                       ExportConfig(model="dummy:uniform", top_k=2), buffer)
        assert count == 2
        ids = [json.loads(line)["id"] for line in buffer.getvalue().splitlines()]
        assert ids == ["s1", "s3"]

    def test_deterministic_output(self, tmp_path, sentences_file, neighbors_file):
        outputs = []
        for _ in range(2):
            buffer = io.StringIO()
            export(iter_sentences(sentences_file), UniformModel(),
                   ExportConfig(model="dummy:uniform", top_k=8,
                                neighbors_path=neighbors_file), buffer)
            outputs.append(buffer.getvalue())
        assert outputs[0] == outputs[1]
