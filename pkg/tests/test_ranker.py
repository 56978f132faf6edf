"""Scoring, merging, ordering, and prediction file round trips."""

import io
import json

import pytest

from phraserank.chunker import CandidateSpan, extract_candidates
from phraserank.corpus import Document, load_dataset
from phraserank.embeddings import HashEmbeddingBackend, cosine, hash_embed
from phraserank.errors import DatasetError
from phraserank.ranker import (
    RankedKeyphrases,
    ScoredCandidate,
    read_predictions,
    score_document,
    write_predictions,
)
from tests.test_chunker import make_sentence


def make_document(doc_id, sentences, text=None, gold=None):
    joined = " ".join(s.text for s in sentences) if text is None else text
    return Document(id=doc_id, text=joined, sentences=tuple(sentences), gold=gold)


SIMPLE_DOC = make_document(
    "d1",
    [
        make_sentence(
            [
                ("Deep", "ADJ", 3),
                ("learning", "NOUN", 3),
                ("models", "NOUN", 4),
                ("improve", "VERB", 0),
                ("accuracy", "NOUN", 4),
            ],
            ordinal=0,
        ),
        make_sentence(
            [
                ("Deep", "ADJ", 3),
                ("learning", "NOUN", 3),
                ("models", "NOUN", 0),
            ],
            ordinal=1,
        ),
    ],
)


class TestScoreDocument:
    def test_scores_are_cosine_products(self):
        backend = HashEmbeddingBackend(dim=32, seed=9)
        ranked = score_document(SIMPLE_DOC, backend)
        doc_vec = hash_embed(SIMPLE_DOC.text, 32, 9)
        by_normalized = {e.normalized: e for e in ranked.entries}
        assert set(by_normalized) == {"deep learning models", "accuracy"}
        for entry in ranked.entries:
            best = max(
                cosine(hash_embed(entry.surface, 32, 9), hash_embed(s.text, 32, 9))
                * cosine(hash_embed(s.text, 32, 9), doc_vec)
                for s in SIMPLE_DOC.sentences
                if entry.normalized in {c.normalized for c in extract_candidates(s)}
            )
            assert entry.score == pytest.approx(best, abs=1e-12)

    def test_repeated_phrase_merged_with_max_score(self):
        backend = HashEmbeddingBackend(dim=16, seed=3)
        ranked = score_document(SIMPLE_DOC, backend)
        assert len(ranked.entries) == 2
        merged = next(e for e in ranked.entries if e.normalized == "deep learning models")
        doc_vec = hash_embed(SIMPLE_DOC.text, 16, 3)
        occurrence_scores = []
        for sentence in SIMPLE_DOC.sentences:
            sent_vec = hash_embed(sentence.text, 16, 3)
            occurrence_scores.append(
                cosine(hash_embed("Deep learning models", 16, 3), sent_vec)
                * cosine(sent_vec, doc_vec)
            )
        assert merged.score == max(occurrence_scores)
        assert merged.best_sentence == occurrence_scores.index(max(occurrence_scores))

    def test_entries_sorted_by_score_then_sentence_then_phrase(self):
        backend = HashEmbeddingBackend(dim=64, seed=42)
        ranked = score_document(SIMPLE_DOC, backend)
        keys = [(-e.score, e.best_sentence, e.normalized) for e in ranked.entries]
        assert keys == sorted(keys)

    def test_empty_document(self):
        doc = make_document("empty", [make_sentence([("runs", "VERB", 0)])])
        backend = HashEmbeddingBackend(dim=8, seed=1)
        ranked = score_document(doc, backend)
        assert ranked.doc_id == "empty"
        assert ranked.entries == ()

    def test_provided_candidates_used_verbatim(self):
        doc = make_document("d2", [make_sentence([("word", "NOUN", 0)])])
        span = CandidateSpan(
            sentence_ordinal=0, start=1, end=1, surface="word", normalized="word"
        )
        backend = HashEmbeddingBackend(dim=8, seed=1)
        ranked = score_document(doc, backend, candidates=[span])
        assert [e.surface for e in ranked.entries] == ["word"]

    def test_stem_merges_singular_plural(self):
        doc = make_document(
            "d3",
            [
                make_sentence([("neural", "ADJ", 2), ("network", "NOUN", 0)], ordinal=0),
                make_sentence([("neural", "ADJ", 2), ("networks", "NOUN", 0)], ordinal=1),
            ],
        )
        backend = HashEmbeddingBackend(dim=16, seed=5)
        unstemmed = score_document(doc, backend)
        stemmed = score_document(doc, backend, stem=True)
        assert len(unstemmed.entries) == 2
        assert len(stemmed.entries) == 1
        assert stemmed.entries[0].normalized == "neural network"
        # merged surface comes from the earliest occurrence
        assert stemmed.entries[0].surface == "neural network"

    def test_top_helper(self):
        entries = tuple(
            ScoredCandidate(normalized=f"p{i}", surface=f"p{i}", score=1.0 - i / 10, best_sentence=0)
            for i in range(5)
        )
        ranked = RankedKeyphrases(doc_id="d", entries=entries)
        assert len(ranked.top(3)) == 3
        assert ranked.top(99) == entries
        with pytest.raises(ValueError):
            ranked.top(-1)


class TestPredictionsIO:
    def _round_trip(self, ranked_docs, top_n=None):
        buffer = io.StringIO()
        write_predictions(ranked_docs, buffer, top_n=top_n)
        buffer.seek(0)
        return read_predictions(buffer), buffer.getvalue()

    def test_round_trip(self):
        backend = HashEmbeddingBackend(dim=16, seed=2)
        ranked = score_document(SIMPLE_DOC, backend)
        loaded, raw = self._round_trip([ranked])
        assert loaded[0].doc_id == "d1"
        assert [e.normalized for e in loaded[0].entries] == [
            e.normalized for e in ranked.entries
        ]
        assert [e.score for e in loaded[0].entries] == [e.score for e in ranked.entries]
        record = json.loads(raw.splitlines()[0])
        assert set(record) == {"doc_id", "keyphrases"}

    def test_top_n_truncates(self):
        backend = HashEmbeddingBackend(dim=16, seed=2)
        ranked = score_document(SIMPLE_DOC, backend)
        loaded, _ = self._round_trip([ranked], top_n=1)
        assert len(loaded[0].entries) == 1

    @pytest.mark.parametrize(
        "line",
        [
            "not json",
            '{"keyphrases": []}',
            '{"doc_id": "d", "keyphrases": "x"}',
            '{"doc_id": "d", "keyphrases": [{"surface": "s"}]}',
            '{"doc_id": "d", "keyphrases": [{"surface": "s", "normalized": "s", "score": "high"}]}',
        ],
    )
    def test_malformed_lines_raise(self, line):
        with pytest.raises(DatasetError):
            read_predictions(io.StringIO(line + "\n"))

    def test_duplicate_doc_ids_raise(self):
        line = '{"doc_id": "d", "keyphrases": []}'
        with pytest.raises(DatasetError):
            read_predictions(io.StringIO(line + "\n" + line + "\n"))

    def test_blank_lines_skipped(self):
        line = '{"doc_id": "d", "keyphrases": []}'
        loaded = read_predictions(io.StringIO("\n" + line + "\n\n"))
        assert len(loaded) == 1
