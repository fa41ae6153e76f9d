"""Model-to-toolkit bridge: exports per-position candidate distributions
into the correction interchange JSONL."""

from .export import ExportConfig, export, iter_sentences, read_neighbors, sentence_record
from .models import EchoModel, MaskedLanguageModel, UniformModel, load_model

__version__ = "0.1.0"
