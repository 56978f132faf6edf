"""Unsupervised keyphrase extraction toolkit.

Candidates are noun phrases read off a dependency parse, scored by the
product of candidate-sentence and sentence-document cosine similarity,
and evaluated against gold keyphrases with ranked precision/recall/F1.
"""

from phraserank.chunker import CandidateSpan, candidate_oracle, extract_candidates
from phraserank.corpus import (
    Document,
    Sentence,
    Token,
    load_dataset,
    normalize_phrase,
    parse_conllu,
    serialize_sentences,
)
from phraserank.embeddings import (
    EmbeddingBackend,
    HashEmbeddingBackend,
    HttpEmbeddingBackend,
    cosine,
    embed_texts,
    hash_embed,
)
from phraserank.errors import (
    BackendError,
    ConfigError,
    ConlluParseError,
    ContractViolationError,
    DatasetError,
    PhraseRankError,
    TransportError,
)
from phraserank.evaluation import DocScore, EvalReport, evaluate, score_doc
from phraserank.ranker import RankedKeyphrases, ScoredCandidate, score_document

__version__ = "0.1.0"

__all__ = [
    "BackendError",
    "CandidateSpan",
    "ConfigError",
    "ConlluParseError",
    "ContractViolationError",
    "DatasetError",
    "DocScore",
    "Document",
    "EmbeddingBackend",
    "EvalReport",
    "HashEmbeddingBackend",
    "HttpEmbeddingBackend",
    "PhraseRankError",
    "RankedKeyphrases",
    "ScoredCandidate",
    "Sentence",
    "Token",
    "TransportError",
    "candidate_oracle",
    "cosine",
    "embed_texts",
    "evaluate",
    "extract_candidates",
    "hash_embed",
    "load_dataset",
    "normalize_phrase",
    "parse_conllu",
    "score_doc",
    "score_document",
    "serialize_sentences",
]
