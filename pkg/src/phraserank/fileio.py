"""Atomic file writes and candidate-file serialization.

All outputs are UTF-8 with LF line endings, written to a temporary file
in the destination directory and moved into place with os.replace, so a
crash never leaves a partial file behind.
"""

from __future__ import annotations

import json
import os
import tempfile
from contextlib import contextmanager
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence, TextIO

from phraserank.chunker import CandidateSpan
from phraserank.errors import DatasetError

CANDIDATE_FORMAT = "phraserank-candidates"
CANDIDATE_FORMAT_VERSION = 1


@contextmanager
def atomic_writer(path: str | Path) -> Iterator[TextIO]:
    """Open a temp file beside path, rename over path on clean exit."""
    destination = Path(path)
    destination.parent.mkdir(parents=True, exist_ok=True)
    fd, temp_name = tempfile.mkstemp(
        dir=destination.parent, prefix=f".{destination.name}.", suffix=".tmp"
    )
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as stream:
            yield stream
        os.replace(temp_name, destination)
    except BaseException:
        try:
            os.unlink(temp_name)
        except OSError:
            pass
        raise


def write_candidate_file(
    path: str | Path,
    candidates_by_doc: Mapping[str, Sequence[CandidateSpan]],
    doc_order: Sequence[str],
    stem: bool,
) -> None:
    """Write candidates as JSONL: a header line, then one line per document."""
    with atomic_writer(path) as stream:
        header = {
            "format": CANDIDATE_FORMAT,
            "version": CANDIDATE_FORMAT_VERSION,
            "stem": stem,
        }
        stream.write(json.dumps(header, ensure_ascii=False) + "\n")
        for doc_id in doc_order:
            record = {
                "doc_id": doc_id,
                "candidates": [
                    {
                        "sentence": span.sentence_ordinal,
                        "start": span.start,
                        "end": span.end,
                        "surface": span.surface,
                        "normalized": span.normalized,
                    }
                    for span in candidates_by_doc[doc_id]
                ],
            }
            stream.write(json.dumps(record, ensure_ascii=False) + "\n")


def read_candidate_file(path: str | Path) -> tuple[dict[str, list[CandidateSpan]], bool]:
    """Read a candidate file; returns (candidates by doc_id, stem flag)."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise DatasetError(f"{path}: empty candidate file")
    header = _parse_json_line(path, 1, lines[0])
    if header.get("format") != CANDIDATE_FORMAT:
        raise DatasetError(f"{path}: not a candidate file (format {header.get('format')!r})")
    if header.get("version") != CANDIDATE_FORMAT_VERSION:
        raise DatasetError(f"{path}: unsupported candidate format version {header.get('version')!r}")
    stem = header.get("stem")
    if not isinstance(stem, bool):
        raise DatasetError(f"{path}: header stem flag must be a boolean")

    by_doc: dict[str, list[CandidateSpan]] = {}
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        record = _parse_json_line(path, line_no, line)
        doc_id = record.get("doc_id")
        if not isinstance(doc_id, str) or not doc_id:
            raise DatasetError(f"{path} line {line_no}: missing or invalid doc_id")
        if doc_id in by_doc:
            raise DatasetError(f"{path} line {line_no}: duplicate doc_id {doc_id!r}")
        raw_candidates = record.get("candidates")
        if not isinstance(raw_candidates, list):
            raise DatasetError(f"{path} line {line_no}: candidates must be a list")
        spans: list[CandidateSpan] = []
        for k, raw in enumerate(raw_candidates):
            if not isinstance(raw, dict):
                raise DatasetError(f"{path} line {line_no}: candidate {k} is not an object")
            try:
                span = CandidateSpan(
                    sentence_ordinal=int(raw["sentence"]),
                    start=int(raw["start"]),
                    end=int(raw["end"]),
                    surface=str(raw["surface"]),
                    normalized=str(raw["normalized"]),
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise DatasetError(f"{path} line {line_no}: candidate {k} malformed: {exc}") from None
            spans.append(span)
        by_doc[doc_id] = spans
    return by_doc, stem


def _parse_json_line(path: str | Path, line_no: int, line: str) -> dict:
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        raise DatasetError(f"{path} line {line_no}: invalid JSON: {exc}") from None
    if not isinstance(record, dict):
        raise DatasetError(f"{path} line {line_no}: expected a JSON object")
    return record


def read_jsonl(path: str | Path) -> Iterable[tuple[int, dict]]:
    """Yield (line_number, record) for each non-blank line of a JSONL file."""
    for line_no, line in enumerate(
        Path(path).read_text(encoding="utf-8").splitlines(), start=1
    ):
        if not line.strip():
            continue
        yield line_no, _parse_json_line(path, line_no, line)
