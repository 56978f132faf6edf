"""Candidate scoring and ranking.

A candidate occurrence in sentence j of document i scores

    score = cos(v_candidate, v_sentence_j) * cos(v_sentence_j, v_document_i)

so a phrase is rewarded both for agreeing with its sentence and for that
sentence agreeing with the document. Occurrences sharing a normalized
form are merged; the merged phrase keeps its best occurrence score.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, TextIO

from phraserank.chunker import CandidateSpan, extract_candidates
from phraserank.corpus import Document
from phraserank.embeddings import EmbeddingBackend, cosine
from phraserank.errors import DatasetError


@dataclass(frozen=True)
class ScoredCandidate:
    """One ranked keyphrase for a document."""

    normalized: str
    surface: str
    score: float
    best_sentence: int


@dataclass(frozen=True)
class RankedKeyphrases:
    """All scored keyphrases of one document, best first."""

    doc_id: str
    entries: tuple[ScoredCandidate, ...]

    def top(self, n: int) -> tuple[ScoredCandidate, ...]:
        if n < 0:
            raise ValueError(f"n must be >= 0, got {n}")
        return self.entries[:n]


def score_document(
    document: Document,
    backend: EmbeddingBackend,
    stem: bool = False,
    candidates: Iterable[CandidateSpan] | None = None,
) -> RankedKeyphrases:
    """Extract (or accept) candidates and rank them for one document.

    Ties are broken by earliest best sentence, then normalized form, so
    the ordering is total and reproducible.
    """
    if candidates is None:
        spans: list[CandidateSpan] = []
        for sentence in document.sentences:
            spans.extend(extract_candidates(sentence, stem=stem))
    else:
        spans = list(candidates)
    if not spans:
        return RankedKeyphrases(doc_id=document.id, entries=())

    sentence_texts = [s.text for s in document.sentences]
    surfaces: list[str] = []
    seen_surfaces: set[str] = set()
    for span in spans:
        if span.surface not in seen_surfaces:
            seen_surfaces.add(span.surface)
            surfaces.append(span.surface)

    texts = [document.text] + sentence_texts + surfaces
    vectors = backend.embed(texts)
    doc_vector = vectors[0]
    sentence_vectors = vectors[1 : 1 + len(sentence_texts)]
    surface_vectors = dict(zip(surfaces, vectors[1 + len(sentence_texts) :]))

    sentence_doc_sim = [cosine(v, doc_vector) for v in sentence_vectors]

    # merged[normalized] = (score, best_sentence, first_position, surface)
    merged: dict[str, tuple[float, int, tuple[int, int], str]] = {}
    for span in spans:
        sim_sd = sentence_doc_sim[span.sentence_ordinal]
        score = cosine(surface_vectors[span.surface], sentence_vectors[span.sentence_ordinal]) * sim_sd
        position = (span.sentence_ordinal, span.start)
        previous = merged.get(span.normalized)
        if previous is None:
            merged[span.normalized] = (score, span.sentence_ordinal, position, span.surface)
            continue
        best_score, best_sentence, first_position, first_surface = previous
        if position < first_position:
            first_position, first_surface = position, span.surface
        if score > best_score or (score == best_score and span.sentence_ordinal < best_sentence):
            best_score, best_sentence = score, span.sentence_ordinal
        merged[span.normalized] = (best_score, best_sentence, first_position, first_surface)

    entries = [
        ScoredCandidate(normalized=normalized, surface=surface, score=score, best_sentence=best_sentence)
        for normalized, (score, best_sentence, _, surface) in merged.items()
    ]
    entries.sort(key=lambda e: (-e.score, e.best_sentence, e.normalized))
    return RankedKeyphrases(doc_id=document.id, entries=tuple(entries))


def write_predictions(ranked: Iterable[RankedKeyphrases], stream: TextIO, top_n: int | None = None) -> None:
    """Write one JSON line per document: doc_id plus its ranked keyphrases."""
    for doc in ranked:
        entries = doc.entries if top_n is None else doc.top(top_n)
        record = {
            "doc_id": doc.doc_id,
            "keyphrases": [
                {"surface": e.surface, "normalized": e.normalized, "score": e.score}
                for e in entries
            ],
        }
        stream.write(json.dumps(record, ensure_ascii=False) + "\n")


def read_predictions(stream: Iterable[str]) -> list[RankedKeyphrases]:
    """Parse a predictions file; raises DatasetError on malformed records."""
    out: list[RankedKeyphrases] = []
    seen_ids: set[str] = set()
    for line_no, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DatasetError(f"line {line_no}: invalid JSON: {exc}") from None
        if not isinstance(record, dict):
            raise DatasetError(f"line {line_no}: expected a JSON object")
        doc_id = record.get("doc_id")
        if not isinstance(doc_id, str) or not doc_id:
            raise DatasetError(f"line {line_no}: missing or invalid doc_id")
        if doc_id in seen_ids:
            raise DatasetError(f"line {line_no}: duplicate doc_id {doc_id!r}")
        seen_ids.add(doc_id)
        raw_phrases = record.get("keyphrases")
        if not isinstance(raw_phrases, list):
            raise DatasetError(f"line {line_no}: keyphrases must be a list")
        entries: list[ScoredCandidate] = []
        for k, raw in enumerate(raw_phrases):
            if not isinstance(raw, dict):
                raise DatasetError(f"line {line_no}: keyphrase {k} is not an object")
            surface = raw.get("surface")
            normalized = raw.get("normalized")
            score = raw.get("score")
            if not isinstance(surface, str) or not isinstance(normalized, str):
                raise DatasetError(f"line {line_no}: keyphrase {k} needs string surface and normalized")
            if not isinstance(score, (int, float)) or isinstance(score, bool):
                raise DatasetError(f"line {line_no}: keyphrase {k} needs a numeric score")
            entries.append(
                ScoredCandidate(
                    normalized=normalized, surface=surface, score=float(score), best_sentence=-1
                )
            )
        out.append(RankedKeyphrases(doc_id=doc_id, entries=tuple(entries)))
    return out
