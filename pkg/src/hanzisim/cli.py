"""Command-line entry points: pair similarity, matrix/confusion export,
batch correction, and evaluation.

Exit codes: 0 success, 1 data or validation failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import chardata, evalkit, fusion, glyph, intervention, phonetic
from .errors import HanzisimError

DEFAULTS = fusion.SimilarityParams()


def _add_data_dir(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--data-dir", default=None,
                        help="character table directory (default: bundled data)")


def _unit_interval(name: str):
    def parse(value: str) -> float:
        x = float(value)
        if not 0.0 <= x <= 1.0:
            raise argparse.ArgumentTypeError(f"{name} must lie in [0, 1]")
        return x
    return parse


def _non_negative(name: str):
    def parse(value: str) -> float:
        x = float(value)
        if x < 0:
            raise argparse.ArgumentTypeError(f"{name} must be >= 0")
        return x
    return parse


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hanzisim",
        description="Chinese character similarity, decoding intervention, "
                    "and correction evaluation",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    p_sim = sub.add_parser("sim", formatter_class=fmt,
                           help="print similarity components for two characters")
    p_sim.add_argument("char1")
    p_sim.add_argument("char2")
    _add_data_dir(p_sim)
    p_sim.add_argument("--beta", type=_unit_interval("beta"), default=DEFAULTS.beta,
                       help="phonetic weight in the fused score")
    p_sim.add_argument("--json", action="store_true", help="machine-readable output")
    p_sim.set_defaults(run=cmd_sim)

    p_matrix = sub.add_parser("matrix", formatter_class=fmt,
                              help="precompute a similarity matrix cache")
    p_matrix.add_argument("--charset", required=True,
                          help="file with one character per line")
    p_matrix.add_argument("--out", required=True, help="output TSV cache")
    _add_data_dir(p_matrix)
    p_matrix.add_argument("--beta", type=_unit_interval("beta"),
                          default=DEFAULTS.beta, help="phonetic weight")
    p_matrix.add_argument("--floor", type=_unit_interval("floor"), default=0.4,
                          help="smallest score kept in the cache")
    p_matrix.add_argument("--workers", type=int, default=None,
                          help="parallel processes for the pair scan")
    p_matrix.set_defaults(run=cmd_matrix)

    p_conf = sub.add_parser("confuse", formatter_class=fmt,
                            help="export the confusion set of a charset")
    p_conf.add_argument("--charset", required=True)
    p_conf.add_argument("--out", required=True)
    _add_data_dir(p_conf)
    p_conf.add_argument("--beta", type=_unit_interval("beta"),
                        default=DEFAULTS.beta, help="phonetic weight")
    p_conf.add_argument("--threshold", type=_unit_interval("threshold"),
                        default=DEFAULTS.confusion_threshold,
                        help="pairs scoring strictly above are kept")
    p_conf.add_argument("--workers", type=int, default=None,
                        help="parallel processes for the pair scan")
    p_conf.set_defaults(run=cmd_confuse)

    p_cor = sub.add_parser("correct", formatter_class=fmt,
                           help="apply decoding intervention to distributions")
    p_cor.add_argument("--in", dest="infile", required=True,
                       help="interchange JSONL with per-position candidates")
    p_cor.add_argument("--out", required=True, help="corrected JSONL")
    _add_data_dir(p_cor)
    p_cor.add_argument("--alpha", type=_non_negative("alpha"),
                       default=DEFAULTS.alpha, help="similarity weight")
    p_cor.add_argument("--beta", type=_unit_interval("beta"),
                       default=DEFAULTS.beta, help="phonetic weight")
    p_cor.add_argument("--copy-penalty", type=_non_negative("copy-penalty"),
                       default=DEFAULTS.copy_penalty,
                       help="probability deduction for keeping the source")
    p_cor.add_argument("--matrix", default=None,
                       help="similarity matrix cache to index instead of "
                            "computing pairs on the fly")
    p_cor.add_argument("--trace", action="store_true",
                       help="emit scored candidate lists per position")
    p_cor.set_defaults(run=cmd_correct)

    p_eval = sub.add_parser("eval", formatter_class=fmt,
                            help="sentence-level detection/correction metrics")
    p_eval.add_argument("--corpus", required=True,
                        help="TSV: id, source, target")
    p_eval.add_argument("--hyp", required=True,
                        help="correction JSONL or TSV: id, hypothesis")
    p_eval.add_argument("--json", action="store_true")
    p_eval.set_defaults(run=cmd_eval)

    p_stats = sub.add_parser("stats", formatter_class=fmt,
                             help="seen edit-pair proportion between corpora")
    p_stats.add_argument("--train", required=True, help="training corpus TSV")
    p_stats.add_argument("--test", required=True, help="test corpus TSV")
    p_stats.add_argument("--json", action="store_true")
    p_stats.set_defaults(run=cmd_stats)

    return parser


def _tables(args: argparse.Namespace) -> chardata.CharTables:
    return chardata.load_tables(args.data_dir)


def cmd_sim(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    if len(args.char1) != 1 or len(args.char2) != 1:
        parser.error("sim expects two single characters")
    tables = _tables(args)
    c1, c2 = args.char1, args.char2
    identity = c1 == c2
    parts = {
        "phonetic": phonetic.phonetic_sim(tables, c1, c2),
        "fourcorner": glyph.glyph_sim1(tables, c1, c2),
        "structure": glyph.glyph_sim2(tables, c1, c2),
        "stroke_edit": glyph.glyph_sim3(tables, c1, c2),
        "stroke_lcs": glyph.glyph_sim4(tables, c1, c2),
    }
    parts["glyph"] = 1.0 if identity else glyph.glyph_sim(tables, c1, c2)
    parts["fused"] = fusion.sim(tables, c1, c2, args.beta)
    if args.json:
        print(json.dumps(parts, ensure_ascii=False))
    else:
        for name, value in parts.items():
            print(f"{name:<12}{value:.4f}")
    return 0


def cmd_matrix(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    tables = _tables(args)
    charset = chardata.load_charset(args.charset)
    matrix = fusion.build_matrix(tables, charset, beta=args.beta,
                                 store_floor=args.floor, workers=args.workers)
    count = fusion.save_matrix(matrix, args.out)
    print(f"{len(matrix.charset)} characters, {count} stored pairs -> {args.out}")
    return 0


def cmd_confuse(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    tables = _tables(args)
    charset = chardata.load_charset(args.charset)
    pairs = fusion.confusion_set(tables, args.threshold, charset,
                                 beta=args.beta, workers=args.workers)
    fusion.save_confusion_set(pairs, args.out, args.threshold, args.beta)
    print(f"{len(charset)} characters, {len(pairs)} confusable pairs -> {args.out}")
    return 0


def cmd_correct(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    tables = _tables(args)
    params = fusion.SimilarityParams(alpha=args.alpha, beta=args.beta,
                                     copy_penalty=args.copy_penalty)
    matrix = None
    if args.matrix:
        matrix = fusion.load_matrix(args.matrix, tables=tables)
    simfn = fusion.similarity_provider(tables, beta=args.beta, matrix=matrix)
    written = 0
    with open(args.out, "w", encoding="utf-8") as out:
        for sd in intervention.ingest_distributions(args.infile):
            hyp, traces = intervention.correct_sentence(sd, params, simfn)
            record = intervention.correction_record(
                sd, hyp, traces if args.trace else None)
            out.write(json.dumps(record, ensure_ascii=False) + "\n")
            written += 1
    print(f"{written} sentences -> {args.out}")
    return 0


def _report_dict(report: evalkit.EvalReport) -> dict:
    return {
        "detection": vars(report.detection),
        "correction": vars(report.correction),
        "fpr": report.fpr,
        "counts": vars(report.counts),
    }


def cmd_eval(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    corpus = evalkit.read_corpus(args.corpus)
    hyps = evalkit.read_hypotheses(args.hyp)
    report = evalkit.evaluate(evalkit.align(corpus, hyps))
    if args.json:
        print(json.dumps(_report_dict(report), ensure_ascii=False))
        return 0
    print(f"{'':<12}{'P':>8}{'R':>8}{'F1':>8}")
    for name, scores in (("detection", report.detection),
                         ("correction", report.correction)):
        print(f"{name:<12}{scores.precision:>8.4f}{scores.recall:>8.4f}"
              f"{scores.f1:>8.4f}")
    print(f"{'fpr':<12}{report.fpr:>8.4f}")
    c = report.counts
    print(f"sentences={c.sentences} changed={c.changed} "
          f"gold_errored={c.gold_errored} det_hits={c.det_hits} "
          f"cor_hits={c.cor_hits} false_positives={c.false_positives}")
    return 0


def cmd_stats(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    train = evalkit.corpus_edit_pairs(evalkit.read_corpus(args.train))
    test = evalkit.corpus_edit_pairs(evalkit.read_corpus(args.test))
    total, seen, proportion = evalkit.seen_pair_stats(set(train), test)
    if args.json:
        print(json.dumps({"total": total, "seen": seen,
                          "proportion": proportion}))
        return 0
    print(f"{'total':<12}{total:>8}")
    print(f"{'seen':<12}{seen:>8}")
    print(f"{'proportion':<12}{proportion:>8.4f}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.run(args, parser)
    except HanzisimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
