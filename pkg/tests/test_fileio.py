"""Atomic writes and candidate file round trips."""

import os

import pytest

from phraserank.chunker import CandidateSpan
from phraserank.errors import DatasetError
from phraserank.fileio import atomic_writer, read_candidate_file, write_candidate_file


def span(ordinal, start, end, surface):
    return CandidateSpan(
        sentence_ordinal=ordinal,
        start=start,
        end=end,
        surface=surface,
        normalized=surface.lower(),
    )


class TestAtomicWriter:
    def test_writes_content(self, tmp_path):
        target = tmp_path / "out.txt"
        with atomic_writer(target) as stream:
            stream.write("hello\n")
        assert target.read_text(encoding="utf-8") == "hello\n"

    def test_creates_parent_directories(self, tmp_path):
        target = tmp_path / "deep" / "nested" / "out.txt"
        with atomic_writer(target) as stream:
            stream.write("x")
        assert target.exists()

    def test_failure_leaves_no_file(self, tmp_path):
        target = tmp_path / "out.txt"
        with pytest.raises(RuntimeError):
            with atomic_writer(target) as stream:
                stream.write("partial")
                raise RuntimeError("boom")
        assert not target.exists()
        assert list(tmp_path.iterdir()) == []

    def test_replaces_existing_file(self, tmp_path):
        target = tmp_path / "out.txt"
        target.write_text("old", encoding="utf-8")
        with atomic_writer(target) as stream:
            stream.write("new")
        assert target.read_text(encoding="utf-8") == "new"


class TestCandidateFile:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "candidates.jsonl"
        by_doc = {
            "d1": [span(0, 1, 3, "Deep learning models"), span(0, 5, 6, "speech recognition")],
            "d2": [],
        }
        write_candidate_file(path, by_doc, ["d1", "d2"], stem=True)
        loaded, stem = read_candidate_file(path)
        assert stem is True
        assert loaded["d1"] == by_doc["d1"]
        assert loaded["d2"] == []

    def test_header_first_line(self, tmp_path):
        path = tmp_path / "candidates.jsonl"
        write_candidate_file(path, {"d1": []}, ["d1"], stem=False)
        first_line = path.read_text(encoding="utf-8").splitlines()[0]
        assert '"format"' in first_line
        assert '"stem": false' in first_line

    def test_doc_order_preserved(self, tmp_path):
        path = tmp_path / "candidates.jsonl"
        by_doc = {"b": [], "a": []}
        write_candidate_file(path, by_doc, ["b", "a"], stem=False)
        loaded, _ = read_candidate_file(path)
        assert list(loaded) == ["b", "a"]

    @pytest.mark.parametrize(
        "content",
        [
            "",
            '{"format": "something-else", "version": 1, "stem": false}\n',
            '{"format": "phraserank-candidates", "version": 99, "stem": false}\n',
            '{"format": "phraserank-candidates", "version": 1, "stem": "no"}\n',
        ],
    )
    def test_bad_headers_rejected(self, tmp_path, content):
        path = tmp_path / "candidates.jsonl"
        path.write_text(content, encoding="utf-8")
        with pytest.raises(DatasetError):
            read_candidate_file(path)

    def test_bad_record_rejected_with_line(self, tmp_path):
        path = tmp_path / "candidates.jsonl"
        path.write_text(
            '{"format": "phraserank-candidates", "version": 1, "stem": false}\n'
            '{"doc_id": "d1", "candidates": [{"start": 1}]}\n',
            encoding="utf-8",
        )
        with pytest.raises(DatasetError) as exc_info:
            read_candidate_file(path)
        assert "line 2" in str(exc_info.value)

    def test_duplicate_doc_rejected(self, tmp_path):
        path = tmp_path / "candidates.jsonl"
        path.write_text(
            '{"format": "phraserank-candidates", "version": 1, "stem": false}\n'
            '{"doc_id": "d1", "candidates": []}\n'
            '{"doc_id": "d1", "candidates": []}\n',
            encoding="utf-8",
        )
        with pytest.raises(DatasetError):
            read_candidate_file(path)
