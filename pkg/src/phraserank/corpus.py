"""Corpus model: CoNLL-U parsing, dataset loading and phrase normalization.

The toolkit consumes pre-parsed dependency annotations; any CoNLL-U
producer can feed it. Only the ID, FORM, UPOS, HEAD and DEPREL columns
are retained. Datasets are JSON Lines files, one document per line::

    {"id": "...", "text": "...", "conllu": "...", "gold_keyphrases": ["..."]}

``gold_keyphrases`` is optional; ``text`` defaults to the joined sentence
texts when absent.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Iterable

from phraserank.errors import ConlluParseError, DatasetError
from phraserank.porter import stem_word

_RANGE_ID = re.compile(r"\d+-\d+")
_EMPTY_NODE_ID = re.compile(r"\d+\.\d+")
_CONLLU_COLUMNS = 10

# Fixpoint cap for stemming; the Porter rules converge in 2-3 passes and
# have no known cycles, the bound is a pure safety net.
_MAX_STEM_PASSES = 10


@dataclass(frozen=True)
class Token:
    """One syntactic word: 1-based index, surface form, UPOS tag, head index."""

    index: int
    form: str
    upos: str
    head: int
    deprel: str = "_"


@dataclass(frozen=True)
class Sentence:
    ordinal: int
    tokens: tuple[Token, ...]
    text: str

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class Document:
    id: str
    text: str
    sentences: tuple[Sentence, ...]
    gold: frozenset[str] | None = field(default=None)


def normalize_phrase(phrase: str, stem: bool = False) -> str:
    """Canonical matching form: lowercased, whitespace collapsed, optionally stemmed.

    Stemming runs each whitespace token through the Porter stemmer to a
    fixpoint, so the function is idempotent under both settings (a single
    Porter pass is not: e.g. "ated" -> "ate" -> "at").
    """
    tokens = phrase.lower().split()
    if stem:
        tokens = [_stem_to_fixpoint(tok) for tok in tokens]
    return " ".join(tokens)


def _stem_to_fixpoint(token: str) -> str:
    seen = [token]
    for _ in range(_MAX_STEM_PASSES):
        nxt = stem_word(seen[-1])
        if not nxt or nxt == seen[-1]:
            return seen[-1]
        if nxt in seen:
            # cycle: pick a deterministic representative
            cycle = seen[seen.index(nxt):]
            return min(cycle, key=lambda s: (len(s), s))
        seen.append(nxt)
    return seen[-1]


def parse_conllu(source: str | Iterable[str]) -> list[Sentence]:
    """Parse CoNLL-U text into sentences.

    Accepts a string or an iterable of lines. Multiword-token range lines
    ("3-4") and empty-node lines ("5.1") are dropped; the remaining token
    ids must be exactly 1..n. Raises ConlluParseError with the offending
    line number on malformed input.
    """
    if isinstance(source, str):
        lines = source.splitlines()
    else:
        lines = [line.rstrip("\n").rstrip("\r") for line in source]

    sentences: list[Sentence] = []
    block: list[tuple[int, str]] = []  # (line number, token line)
    text_meta: str | None = None

    def flush() -> None:
        nonlocal block, text_meta
        if block:
            sentences.append(_build_sentence(len(sentences), block, text_meta))
        block = []
        text_meta = None

    for line_no, raw in enumerate(lines, start=1):
        if raw.strip() == "":
            flush()
            continue
        if raw.startswith("#"):
            body = raw[1:].strip()
            if body.startswith("text") and "=" in body:
                key, value = body.split("=", 1)
                if key.strip() == "text":
                    text_meta = value.strip()
            continue
        block.append((line_no, raw))
    flush()
    return sentences


def _build_sentence(ordinal: int, block: list[tuple[int, str]], text_meta: str | None) -> Sentence:
    tokens: list[Token] = []
    token_lines: list[int] = []
    for line_no, raw in block:
        cols = raw.split("\t")
        if len(cols) != _CONLLU_COLUMNS:
            raise ConlluParseError(
                f"expected {_CONLLU_COLUMNS} tab-separated columns, got {len(cols)}",
                line_no,
            )
        token_id = cols[0]
        if _RANGE_ID.fullmatch(token_id) or _EMPTY_NODE_ID.fullmatch(token_id):
            continue
        try:
            index = int(token_id)
        except ValueError:
            raise ConlluParseError(f"bad token id {token_id!r}", line_no) from None
        if index < 1:
            raise ConlluParseError(f"token id must be >= 1, got {index}", line_no)
        form = cols[1]
        if form == "":
            raise ConlluParseError("empty FORM", line_no)
        upos = cols[3]
        if upos == "":
            raise ConlluParseError("empty UPOS", line_no)
        try:
            head = int(cols[6])
        except ValueError:
            raise ConlluParseError(f"bad HEAD {cols[6]!r}", line_no) from None
        if head < 0:
            raise ConlluParseError(f"HEAD must be >= 0, got {head}", line_no)
        tokens.append(Token(index=index, form=form, upos=upos, head=head, deprel=cols[7]))
        token_lines.append(line_no)

    for position, (token, line_no) in enumerate(zip(tokens, token_lines), start=1):
        if token.index != position:
            raise ConlluParseError(
                f"non-contiguous token ids: expected {position}, got {token.index}",
                line_no,
            )
    n = len(tokens)
    for token, line_no in zip(tokens, token_lines):
        if token.head > n:
            raise ConlluParseError(
                f"HEAD {token.head} references a nonexistent token (sentence has {n})",
                line_no,
            )
        if token.head == token.index:
            raise ConlluParseError(f"token {token.index} is its own head", line_no)

    text = text_meta if text_meta is not None else " ".join(t.form for t in tokens)
    return Sentence(ordinal=ordinal, tokens=tuple(tokens), text=text)


def serialize_sentences(sentences: Iterable[Sentence]) -> str:
    """Render sentences back to CoNLL-U; inverse of parse_conllu for the retained fields."""
    out: list[str] = []
    for sentence in sentences:
        out.append(f"# text = {sentence.text}")
        for token in sentence.tokens:
            out.append(
                "\t".join(
                    (
                        str(token.index),
                        token.form,
                        "_",
                        token.upos,
                        "_",
                        "_",
                        str(token.head),
                        token.deprel,
                        "_",
                        "_",
                    )
                )
            )
        out.append("")
    return "\n".join(out)


def load_dataset(path) -> list[Document]:
    """Load a JSON Lines dataset file into Documents.

    Gold keyphrases are normalized (lowercase, collapsed whitespace; no
    stemming at load time) and deduplicated. Raises DatasetError on
    duplicate or missing ids, missing conllu, or malformed records, and
    ConlluParseError on bad embedded annotations.
    """
    with open(path, encoding="utf-8") as handle:
        raw_lines = handle.read().splitlines()

    documents: list[Document] = []
    seen_ids: set[str] = set()
    for line_no, raw in enumerate(raw_lines, start=1):
        if raw.strip() == "":
            continue
        try:
            record = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise DatasetError(f"line {line_no}: invalid JSON record: {exc}") from None
        if not isinstance(record, dict):
            raise DatasetError(f"line {line_no}: record is not an object")
        doc_id = record.get("id")
        if not isinstance(doc_id, str) or doc_id == "":
            raise DatasetError(f"line {line_no}: record missing id")
        if doc_id in seen_ids:
            raise DatasetError(f"line {line_no}: duplicate document id {doc_id!r}")
        conllu = record.get("conllu")
        if not isinstance(conllu, str):
            raise DatasetError(f"line {line_no}: record {doc_id!r} missing conllu")
        try:
            sentences = parse_conllu(conllu)
        except ConlluParseError as exc:
            raise ConlluParseError(f"document {doc_id!r}: {exc}") from None

        text = record.get("text")
        if text is None:
            text = " ".join(s.text for s in sentences)
        elif not isinstance(text, str):
            raise DatasetError(f"line {line_no}: record {doc_id!r} has non-string text")

        gold: frozenset[str] | None = None
        if "gold_keyphrases" in record and record["gold_keyphrases"] is not None:
            raw_gold = record["gold_keyphrases"]
            if not isinstance(raw_gold, list) or any(not isinstance(g, str) for g in raw_gold):
                raise DatasetError(
                    f"line {line_no}: record {doc_id!r} gold_keyphrases must be a list of strings"
                )
            normalized = {normalize_phrase(g) for g in raw_gold}
            normalized.discard("")
            gold = frozenset(normalized)

        seen_ids.add(doc_id)
        documents.append(
            Document(id=doc_id, text=text, sentences=tuple(sentences), gold=gold)
        )
    return documents
