"""Ranked keyphrase evaluation: precision, recall, F1 at fixed cutoffs.

Matching is exact string equality after both sides pass through the same
normalization (lowercasing, whitespace collapse, optional stemming).
Per-document scores are averaged unweighted over documents that have at
least one gold keyphrase; documents without gold are excluded and
counted.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, TextIO

from phraserank.corpus import normalize_phrase
from phraserank.errors import DatasetError
from phraserank.ranker import RankedKeyphrases


@dataclass(frozen=True)
class DocScore:
    """Scores for one document at one cutoff."""

    doc_id: str
    cutoff: int
    matched: int
    retrieved: int
    gold_size: int
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class EvalReport:
    """Macro-averaged scores per cutoff, plus the per-document detail."""

    cutoffs: tuple[int, ...]
    num_documents: int
    num_scored: int
    num_without_gold: int
    macro: Mapping[int, Mapping[str, float]]
    per_document: tuple[DocScore, ...]


def score_doc(
    doc_id: str,
    predicted: Sequence[str],
    gold: frozenset[str] | set[str],
    cutoff: int,
) -> DocScore:
    """Score one document at one cutoff.

    predicted is the ranked list of normalized phrases (best first,
    duplicates already merged); gold is the set of normalized gold
    phrases. Retrieved is capped at what was actually predicted.
    """
    if cutoff < 1:
        raise ValueError(f"cutoff must be >= 1, got {cutoff}")
    top = predicted[:cutoff]
    retrieved = len(top)
    matched = sum(1 for phrase in top if phrase in gold)
    precision = matched / retrieved if retrieved else 0.0
    recall = matched / len(gold) if gold else 0.0
    denominator = precision + recall
    f1 = 2.0 * precision * recall / denominator if denominator else 0.0
    return DocScore(
        doc_id=doc_id,
        cutoff=cutoff,
        matched=matched,
        retrieved=retrieved,
        gold_size=len(gold),
        precision=precision,
        recall=recall,
        f1=f1,
    )


def evaluate(
    predictions: Iterable[RankedKeyphrases],
    gold_by_doc: Mapping[str, Iterable[str]],
    cutoffs: Sequence[int] = (5, 10, 15),
    stem: bool = False,
) -> EvalReport:
    """Evaluate ranked predictions against gold keyphrases.

    Both sides are re-normalized with the given stem flag so a stemmed
    run and an unstemmed gold file still compare on equal footing.
    Predictions for unknown doc_ids raise DatasetError.
    """
    if not cutoffs:
        raise ValueError("at least one cutoff is required")
    ordered_cutoffs = tuple(sorted(set(int(c) for c in cutoffs)))
    for c in ordered_cutoffs:
        if c < 1:
            raise ValueError(f"cutoffs must be >= 1, got {c}")

    normalized_gold: dict[str, frozenset[str]] = {}
    for doc_id, phrases in gold_by_doc.items():
        cleaned = {normalize_phrase(p, stem=stem) for p in phrases}
        cleaned.discard("")
        normalized_gold[doc_id] = frozenset(cleaned)

    per_document: list[DocScore] = []
    num_documents = 0
    num_without_gold = 0
    for doc in predictions:
        if doc.doc_id not in normalized_gold:
            raise DatasetError(f"predictions contain unknown doc_id {doc.doc_id!r}")
        num_documents += 1
        gold = normalized_gold[doc.doc_id]
        if not gold:
            num_without_gold += 1
            continue
        ranked: list[str] = []
        seen: set[str] = set()
        for entry in doc.entries:
            phrase = normalize_phrase(entry.normalized, stem=stem)
            if phrase and phrase not in seen:
                seen.add(phrase)
                ranked.append(phrase)
        for cutoff in ordered_cutoffs:
            per_document.append(score_doc(doc.doc_id, ranked, gold, cutoff))

    num_scored = num_documents - num_without_gold
    macro: dict[int, dict[str, float]] = {}
    for cutoff in ordered_cutoffs:
        rows = [d for d in per_document if d.cutoff == cutoff]
        if num_scored:
            macro[cutoff] = {
                "precision": math.fsum(d.precision for d in rows) / num_scored,
                "recall": math.fsum(d.recall for d in rows) / num_scored,
                "f1": math.fsum(d.f1 for d in rows) / num_scored,
            }
        else:
            macro[cutoff] = {"precision": 0.0, "recall": 0.0, "f1": 0.0}

    return EvalReport(
        cutoffs=ordered_cutoffs,
        num_documents=num_documents,
        num_scored=num_scored,
        num_without_gold=num_without_gold,
        macro=macro,
        per_document=tuple(per_document),
    )


def format_report_table(report: EvalReport) -> str:
    """Human-readable summary table of the macro scores."""
    lines = [
        f"documents: {report.num_documents} "
        f"(scored: {report.num_scored}, without gold: {report.num_without_gold})",
        f"{'cutoff':>6}  {'precision':>9}  {'recall':>9}  {'f1':>9}",
    ]
    for cutoff in report.cutoffs:
        row = report.macro[cutoff]
        lines.append(
            f"{cutoff:>6}  {row['precision']:>9.4f}  {row['recall']:>9.4f}  {row['f1']:>9.4f}"
        )
    return "\n".join(lines)


def write_report(report: EvalReport, stream: TextIO) -> None:
    """Serialize the full report as a single stable JSON document."""
    payload = {
        "cutoffs": list(report.cutoffs),
        "num_documents": report.num_documents,
        "num_scored": report.num_scored,
        "num_without_gold": report.num_without_gold,
        "macro": {
            str(cutoff): {
                "precision": report.macro[cutoff]["precision"],
                "recall": report.macro[cutoff]["recall"],
                "f1": report.macro[cutoff]["f1"],
            }
            for cutoff in report.cutoffs
        },
        "per_document": [
            {
                "doc_id": d.doc_id,
                "cutoff": d.cutoff,
                "matched": d.matched,
                "retrieved": d.retrieved,
                "gold_size": d.gold_size,
                "precision": d.precision,
                "recall": d.recall,
                "f1": d.f1,
            }
            for d in report.per_document
        ],
    }
    json.dump(payload, stream, ensure_ascii=False, indent=2, sort_keys=True)
    stream.write("\n")
