"""Phonetic/glyph similarity between Chinese characters, decoding
intervention for spelling correction, confusion sets, and evaluation."""

from .chardata import (
    CharTables,
    Decomposition,
    default_data_dir,
    is_han,
    load_charset,
    load_tables,
    lookup,
)
from .errors import CorpusError, HanzisimError, IngestError, TableLoadError
from .evalkit import (
    EditPair,
    EvalReport,
    SentencePair,
    evaluate,
    extract_edits,
    seen_pair_stats,
)
from .fusion import (
    SimilarityMatrix,
    SimilarityParams,
    build_matrix,
    confusion_set,
    load_matrix,
    save_confusion_set,
    save_matrix,
    sim,
    similarity_provider,
)
from .glyph import (
    glyph_sim,
    glyph_sim1,
    glyph_sim2,
    glyph_sim3,
    glyph_sim4,
    lcs_length,
    structure_aware_code,
)
from .intervention import (
    CandidateDistribution,
    ScoredCandidate,
    SentenceDistributions,
    correct_sentence,
    ingest_distributions,
    intervene,
)
from .phonetic import (
    EditCosts,
    phonetic_sim,
    pinyin_distance_sim,
    weighted_levenshtein,
)

__version__ = "0.1.0"
