"""WER and POWER scoring plus corpus-level aggregation.

POWER = (S + D + I + SS) / L, where SS sums max(|span_ref|, |span_hyp|) over
substitution spans and L is the reference length in words.  With no spans the
two metrics coincide exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from statistics import mean, stdev

from .phone_align import RecombinedAlignment
from .word_align import AlignLabel, WordAlignment

WER_KEYS = ("S", "D", "I")
POWER_KEYS = ("S", "D", "I", "SS")


@dataclass(frozen=True)
class ErrorCounts:
    S: int = 0
    D: int = 0
    I: int = 0
    SS: int = 0
    L: int = 0

    def numerator(self) -> int:
        return self.S + self.D + self.I + self.SS

    def rate(self) -> float:
        if self.L > 0:
            return self.numerator() / self.L
        # Empty reference: infinite-score sentinel unless nothing was
        # hypothesized either.
        return 0.0 if self.numerator() == 0 else math.inf

    def by_key(self) -> dict[str, int]:
        return {"S": self.S, "D": self.D, "I": self.I, "SS": self.SS}


@dataclass(frozen=True)
class UtteranceScore:
    utt_id: str
    sys_id: str
    counts_wer: ErrorCounts
    counts_power: ErrorCounts
    wer: float
    power: float
    span_shapes: tuple[tuple[int, int], ...] = ()
    hyp_len: int = 0


def score_wer(alignment: WordAlignment) -> tuple[ErrorCounts, float]:
    """Tally substitution/deletion/insertion labels and the WER ratio."""
    s = sum(1 for p in alignment.pairs if p.label is AlignLabel.SUB)
    d = sum(1 for p in alignment.pairs if p.label is AlignLabel.DEL)
    i = sum(1 for p in alignment.pairs if p.label is AlignLabel.INS)
    counts = ErrorCounts(S=s, D=d, I=i, SS=0, L=alignment.ref_len)
    return counts, counts.rate()


def score_power(recombined: RecombinedAlignment) -> tuple[ErrorCounts, float]:
    """Score a recombined alignment; substitution spans weigh max(side sizes)."""
    s = d = i = ss = 0
    for unit in recombined.units:
        if unit.label is AlignLabel.SUB:
            s += 1
        elif unit.label is AlignLabel.DEL:
            d += unit.ref_size()
        elif unit.label is AlignLabel.INS:
            i += unit.hyp_size()
        elif unit.label is AlignLabel.SUBSPAN:
            ss += max(unit.ref_size(), unit.hyp_size())
    counts = ErrorCounts(S=s, D=d, I=i, SS=ss, L=recombined.ref_len)
    return counts, counts.rate()


@dataclass(frozen=True)
class SystemSummary:
    sys_id: str
    utterances: int
    ref_tokens: int
    hyp_tokens: int
    counts_wer: ErrorCounts
    counts_power: ErrorCounts
    wer: float
    power: float
    wer_proportions: dict[str, float]
    power_proportions: dict[str, float]
    span_ref_frac: float
    span_hyp_frac: float
    span_multi_ref: float
    span_multi_hyp: float
    span_multi_both: float
    skipped_empty_ref: int


@dataclass(frozen=True)
class CorpusSummary:
    systems: tuple[SystemSummary, ...]
    wer_proportion_stats: dict[str, tuple[float, float]]
    power_proportion_stats: dict[str, tuple[float, float]]

    def system(self, sys_id: str) -> SystemSummary:
        for s in self.systems:
            if s.sys_id == sys_id:
                return s
        raise KeyError(sys_id)


def _sum_counts(items: list[ErrorCounts]) -> ErrorCounts:
    return ErrorCounts(
        S=sum(c.S for c in items),
        D=sum(c.D for c in items),
        I=sum(c.I for c in items),
        SS=sum(c.SS for c in items),
        L=sum(c.L for c in items),
    )


def _proportions(counts: ErrorCounts, keys) -> dict[str, float]:
    total = counts.numerator()
    by_key = counts.by_key()
    if total == 0:
        return {k: 0.0 for k in keys}
    return {k: by_key[k] / total for k in keys}


def _mean_se(values: list[float]) -> tuple[float, float]:
    if len(values) == 1:
        return values[0], 0.0
    return mean(values), stdev(values) / math.sqrt(len(values))


def aggregate(scores: list[UtteranceScore]) -> CorpusSummary:
    """Corpus summary: per-system totals, error-type shares, span statistics.

    Utterances with an empty reference and a non-empty hypothesis carry an
    infinite score and are excluded from the totals (counted per system).
    The mean/standard-error rows are taken across systems.
    """
    if not scores:
        raise ValueError("cannot aggregate an empty score list")
    by_system: dict[str, list[UtteranceScore]] = {}
    for sc in scores:
        by_system.setdefault(sc.sys_id, []).append(sc)

    systems = []
    for sys_id in sorted(by_system):
        items = by_system[sys_id]
        kept = [sc for sc in items if not math.isinf(sc.power)]
        skipped = len(items) - len(kept)
        wer_counts = _sum_counts([sc.counts_wer for sc in kept])
        power_counts = _sum_counts([sc.counts_power for sc in kept])
        shapes = [shape for sc in kept for shape in sc.span_shapes]
        ref_tokens = sum(sc.counts_wer.L for sc in kept)
        hyp_tokens = sum(sc.hyp_len for sc in kept)
        n_spans = len(shapes)
        systems.append(
            SystemSummary(
                sys_id=sys_id,
                utterances=len(kept),
                ref_tokens=ref_tokens,
                hyp_tokens=hyp_tokens,
                counts_wer=wer_counts,
                counts_power=power_counts,
                wer=wer_counts.rate(),
                power=power_counts.rate(),
                wer_proportions=_proportions(wer_counts, WER_KEYS),
                power_proportions=_proportions(power_counts, POWER_KEYS),
                span_ref_frac=sum(r for r, _ in shapes) / ref_tokens if ref_tokens else 0.0,
                span_hyp_frac=sum(h for _, h in shapes) / hyp_tokens if hyp_tokens else 0.0,
                span_multi_ref=sum(1 for r, _ in shapes if r > 1) / n_spans if n_spans else 0.0,
                span_multi_hyp=sum(1 for _, h in shapes if h > 1) / n_spans if n_spans else 0.0,
                span_multi_both=sum(1 for r, h in shapes if r > 1 and h > 1) / n_spans
                if n_spans
                else 0.0,
                skipped_empty_ref=skipped,
            )
        )

    wer_stats = {
        k: _mean_se([s.wer_proportions[k] for s in systems]) for k in WER_KEYS
    }
    power_stats = {
        k: _mean_se([s.power_proportions[k] for s in systems]) for k in POWER_KEYS
    }
    return CorpusSummary(tuple(systems), wer_stats, power_stats)
