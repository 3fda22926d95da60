"""Word-level Levenshtein alignment and error span extraction.

Unit costs for substitution, deletion, and insertion.  Ties in the backtrace
are broken by preferring the diagonal move (correct or substitution) over
deletion over insertion, scanning from the end of the matrix; the policy is
arbitrary but fixed, so output is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class AlignLabel(Enum):
    COR = "C"
    SUB = "S"
    DEL = "D"
    INS = "I"
    SUBSPAN = "SS"


@dataclass(frozen=True, slots=True)
class AlignPair:
    """One step of a word alignment; indices refer to the original sequences."""

    ref_index: int | None
    hyp_index: int | None
    label: AlignLabel


@dataclass(frozen=True)
class WordAlignment:
    pairs: tuple[AlignPair, ...]
    ref_len: int
    hyp_len: int

    def distance(self) -> int:
        return sum(1 for p in self.pairs if p.label is not AlignLabel.COR)

    def labels(self) -> list[AlignLabel]:
        return [p.label for p in self.pairs]


@dataclass(frozen=True)
class ErrorSpan:
    """A maximal run of adjacent non-correct pairs containing a substitution.

    These are the units that get re-aligned phonetically; runs made up purely
    of deletions or insertions are not spans and keep their original labels.
    """

    ref_start: int
    ref_end: int
    hyp_start: int
    hyp_end: int
    pair_start: int
    pair_end: int

    def ref_size(self) -> int:
        return self.ref_end - self.ref_start

    def hyp_size(self) -> int:
        return self.hyp_end - self.hyp_start


def align_words(ref: list[str], hyp: list[str]) -> WordAlignment:
    """Minimal-cost word alignment between two normalized token sequences."""
    n, m = len(ref), len(hyp)
    dist = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        dist[i][0] = i
    for j in range(1, m + 1):
        dist[0][j] = j
    for i in range(1, n + 1):
        ref_word = ref[i - 1]
        row = dist[i]
        prev = dist[i - 1]
        for j in range(1, m + 1):
            cost = 0 if ref_word == hyp[j - 1] else 1
            row[j] = min(prev[j - 1] + cost, prev[j] + 1, row[j - 1] + 1)

    pairs: list[AlignPair] = []
    i, j = n, m
    while i > 0 or j > 0:
        if i > 0 and j > 0 and dist[i][j] == dist[i - 1][j - 1] + (0 if ref[i - 1] == hyp[j - 1] else 1):
            label = AlignLabel.COR if ref[i - 1] == hyp[j - 1] else AlignLabel.SUB
            pairs.append(AlignPair(i - 1, j - 1, label))
            i, j = i - 1, j - 1
        elif i > 0 and dist[i][j] == dist[i - 1][j] + 1:
            pairs.append(AlignPair(i - 1, None, AlignLabel.DEL))
            i -= 1
        else:
            pairs.append(AlignPair(None, j - 1, AlignLabel.INS))
            j -= 1
    pairs.reverse()
    return WordAlignment(tuple(pairs), n, m)


def extract_error_spans(alignment: WordAlignment) -> list[ErrorSpan]:
    """Maximal runs of non-correct pairs that contain at least one substitution."""
    spans: list[ErrorSpan] = []
    pairs = alignment.pairs
    start = None
    for idx in range(len(pairs) + 1):
        at_end = idx == len(pairs)
        if not at_end and pairs[idx].label is not AlignLabel.COR:
            if start is None:
                start = idx
            continue
        if start is not None:
            run = pairs[start:idx]
            if any(p.label is AlignLabel.SUB for p in run):
                # A run with a substitution covers at least one word per side.
                ref_ids = [p.ref_index for p in run if p.ref_index is not None]
                hyp_ids = [p.hyp_index for p in run if p.hyp_index is not None]
                spans.append(
                    ErrorSpan(
                        ref_start=ref_ids[0],
                        ref_end=ref_ids[-1] + 1,
                        hyp_start=hyp_ids[0],
                        hyp_end=hyp_ids[-1] + 1,
                        pair_start=start,
                        pair_end=idx,
                    )
                )
            start = None
    return spans
