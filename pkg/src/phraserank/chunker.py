"""Noun-phrase candidate extraction over dependency-annotated sentences.

A candidate span is a contiguous run of NOUN/PROPN/ADJ tokens whose last
token is a NOUN or PROPN and whose every other token has that last token
as its dependency head. Only spans not strictly contained in another
valid span are returned, so each candidate is a complete phrase on its
own; overlapping (non-nested) candidates are legitimate.
"""

from __future__ import annotations

from dataclasses import dataclass

from phraserank.corpus import Sentence, Token, normalize_phrase

QUALIFYING_TAGS = frozenset({"NOUN", "PROPN", "ADJ"})
TERMINAL_TAGS = frozenset({"NOUN", "PROPN"})


@dataclass(frozen=True)
class CandidateSpan:
    """A candidate phrase: inclusive 1-based token span within one sentence."""

    sentence_ordinal: int
    start: int
    end: int
    surface: str
    normalized: str


def _make_span(sentence: Sentence, start: int, end: int, stem: bool) -> CandidateSpan:
    surface = " ".join(t.form for t in sentence.tokens[start - 1 : end])
    return CandidateSpan(
        sentence_ordinal=sentence.ordinal,
        start=start,
        end=end,
        surface=surface,
        normalized=normalize_phrase(surface, stem=stem),
    )


def extract_candidates(sentence: Sentence, stem: bool = False) -> list[CandidateSpan]:
    """Extract the maximal candidate spans of a sentence, left to right.

    For each NOUN/PROPN token, the longest span ending there is found by
    scanning left while tokens qualify and are headed by that token; spans
    contained in a longer valid span are then discarded.
    """
    tokens = sentence.tokens
    spans: list[tuple[int, int]] = []
    for pos, token in enumerate(tokens):
        if token.upos not in TERMINAL_TAGS:
            continue
        end = token.index
        start = end
        j = pos - 1
        while j >= 0 and tokens[j].upos in QUALIFYING_TAGS and tokens[j].head == end:
            start = tokens[j].index
            j -= 1
        spans.append((start, end))

    kept = [
        (s, e)
        for s, e in spans
        if not any((S <= s and e <= E and (S, E) != (s, e)) for S, E in spans)
    ]
    kept.sort()
    return [_make_span(sentence, s, e, stem) for s, e in kept]


def span_satisfies_rule(tokens: tuple[Token, ...], start: int, end: int) -> bool:
    """Check the candidate invariants directly for an inclusive 1-based span."""
    if not (1 <= start <= end <= len(tokens)):
        return False
    if any(tokens[j - 1].upos not in QUALIFYING_TAGS for j in range(start, end + 1)):
        return False
    if tokens[end - 1].upos not in TERMINAL_TAGS:
        return False
    return all(tokens[j - 1].head == end for j in range(start, end))


def candidate_oracle(sentence: Sentence, stem: bool = False) -> list[CandidateSpan]:
    """Brute-force reference: enumerate every span, keep the valid ones,
    drop any span strictly contained in another valid span."""
    tokens = sentence.tokens
    n = len(tokens)
    valid = [
        (s, e)
        for s in range(1, n + 1)
        for e in range(s, n + 1)
        if span_satisfies_rule(tokens, s, e)
    ]
    kept = [
        (s, e)
        for s, e in valid
        if not any((S <= s and e <= E and (S, E) != (s, e)) for S, E in valid)
    ]
    kept.sort()
    return [_make_span(sentence, s, e, stem) for s, e in kept]
