"""Corpus ingestion, the scoring pipeline, reports, and feature export.

Input files are plain text, one `UTTID<TAB>text` line per utterance: one
reference file plus one hypothesis file per system (system id defaults to the
file stem).  The per-utterance feature CSV normalizes every error count by
the reference length so the basic columns decompose the error rate exactly.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .annotate import TYPED_KEYS, ConfusionPair, confusion_pairs, type_errors
from .errors import CorpusError
from .lexicon import Lexicon
from .normalize import NormRules, normalize_tokens, oracle_normalize
from .phone_align import (
    RecombinedAlignment,
    align_phones,
    build_phone_sequence,
    recombine,
    recombine_utterance,
)
from .scoring import (
    CorpusSummary,
    ErrorCounts,
    UtteranceScore,
    aggregate,
    score_power,
    score_wer,
)
from .word_align import AlignLabel, WordAlignment, align_words, extract_error_spans

BASIC_COLUMNS = ("WER.S", "WER.D", "WER.I", "WER.SS")

FEATURE_HEADER = (
    ["utt_id", "sys_id", "ref_len", "wer", "power"]
    + list(BASIC_COLUMNS)
    + list(TYPED_KEYS)
)


@dataclass(frozen=True)
class Utterance:
    utt_id: str
    sys_id: str
    ref_text: str
    hyp_text: str


def _read_trn(path) -> tuple[dict[str, str], list[str]]:
    """Read `UTTID<TAB>text` lines; returns (id -> text, recoverable problems)."""
    lines: dict[str, str] = {}
    problems: list[str] = []
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.rstrip("\n")
                if not line.strip():
                    continue
                if "\t" not in line:
                    problems.append(f"{path}:{lineno}: missing TAB separator, line skipped")
                    continue
                utt_id, text = line.split("\t", 1)
                utt_id = utt_id.strip()
                if utt_id in lines:
                    raise CorpusError(f"{path}:{lineno}: duplicate utterance id {utt_id!r}")
                lines[utt_id] = text.strip()
    except OSError as exc:
        raise CorpusError(f"cannot read {path}: {exc}") from exc
    return lines, problems


def load_corpus(
    ref_path,
    hyp_paths,
    sys_ids: list[str] | None = None,
) -> tuple[list[Utterance], list[str]]:
    """Join hypothesis files to the reference file on utterance id.

    Hypothesis lines with unknown ids are reported and skipped; reference
    utterances missing from a hypothesis file are skipped with a warning.
    Duplicate ids within a file are fatal, as are duplicate system ids.
    """
    refs, problems = _read_trn(ref_path)
    if sys_ids is None:
        sys_ids = [Path(p).stem for p in hyp_paths]
    if len(sys_ids) != len(hyp_paths):
        raise CorpusError(
            f"{len(hyp_paths)} hypothesis files but {len(sys_ids)} system ids"
        )
    if len(set(sys_ids)) != len(sys_ids):
        raise CorpusError(f"duplicate system ids: {sys_ids}")

    utterances: list[Utterance] = []
    for sys_id, hyp_path in zip(sys_ids, hyp_paths):
        hyps, hyp_problems = _read_trn(hyp_path)
        problems.extend(hyp_problems)
        for utt_id in hyps:
            if utt_id not in refs:
                problems.append(
                    f"{hyp_path}: hypothesis utterance {utt_id!r} has no reference, skipped"
                )
        for utt_id in refs:
            if utt_id not in hyps:
                problems.append(
                    f"{hyp_path}: reference utterance {utt_id!r} missing from system "
                    f"{sys_id!r}, skipped"
                )
                continue
            utterances.append(Utterance(utt_id, sys_id, refs[utt_id], hyps[utt_id]))
    return utterances, problems


@dataclass(frozen=True)
class ScoringContext:
    """Everything needed to score one utterance; immutable and picklable."""

    lexicon: Lexicon
    rules: NormRules
    closed_class: frozenset[str]
    lemma_map: dict[str, str] | None = None
    phonetic: bool = True
    oracle_norm: bool = False


@dataclass(frozen=True)
class ScoredUtterance:
    utt_id: str
    sys_id: str
    ref_words: tuple[str, ...]
    hyp_words: tuple[str, ...]
    recombined: RecombinedAlignment
    score: UtteranceScore
    typed: dict[str, int]
    normalized_hyp: tuple[str, ...] | None = None
    notes: tuple[str, ...] = ()


@dataclass
class RunResult:
    utterances: list[ScoredUtterance]
    summary: CorpusSummary
    confusions: list[ConfusionPair]
    problems: list[str] = field(default_factory=list)


def _align_and_recombine(
    ref_words: list[str], hyp_words: list[str], ctx: ScoringContext
) -> tuple[WordAlignment, RecombinedAlignment]:
    alignment = align_words(ref_words, hyp_words)
    if not ctx.phonetic:
        return alignment, recombine_utterance(alignment, [], [])
    spans = extract_error_spans(alignment)
    results = []
    for span in spans:
        span_ref = ref_words[span.ref_start : span.ref_end]
        span_hyp = hyp_words[span.hyp_start : span.hyp_end]
        phones = align_phones(
            build_phone_sequence(span_ref, ctx.lexicon),
            build_phone_sequence(span_hyp, ctx.lexicon),
        )
        results.append(recombine(phones, span_ref, span_hyp))
    return alignment, recombine_utterance(alignment, spans, results)


def score_utterance(utt: Utterance, ctx: ScoringContext) -> ScoredUtterance:
    """Run the full pipeline on one utterance."""
    ref_words = normalize_tokens(utt.ref_text, ctx.rules, apply_variants=False)
    hyp_words = normalize_tokens(utt.hyp_text, ctx.rules, apply_variants=True)

    alignment, recombined = _align_and_recombine(ref_words, hyp_words, ctx)
    normalized_hyp = None
    if ctx.oracle_norm:
        rewritten = oracle_normalize(ref_words, hyp_words, recombined, ctx.lexicon)
        if rewritten != hyp_words:
            hyp_words = rewritten
            alignment, recombined = _align_and_recombine(ref_words, hyp_words, ctx)
        normalized_hyp = tuple(hyp_words)

    counts_wer, wer = score_wer(alignment)
    counts_power, power = score_power(recombined)
    span_shapes = tuple(
        (u.ref_size(), u.hyp_size())
        for u in recombined.units
        if u.label is AlignLabel.SUBSPAN
    )
    notes = []
    if counts_power.L == 0 and counts_power.numerator() > 0:
        notes.append("empty reference with non-empty hypothesis; excluded from aggregation")
    if counts_power.numerator() != counts_wer.numerator():
        notes.append(
            f"error totals diverge: {counts_wer.numerator()} word-level vs "
            f"{counts_power.numerator()} recombined"
        )
    typed = type_errors(recombined, ref_words, hyp_words, ctx.closed_class, ctx.lemma_map)
    return ScoredUtterance(
        utt_id=utt.utt_id,
        sys_id=utt.sys_id,
        ref_words=tuple(ref_words),
        hyp_words=tuple(hyp_words),
        recombined=recombined,
        score=UtteranceScore(
            utt_id=utt.utt_id,
            sys_id=utt.sys_id,
            counts_wer=counts_wer,
            counts_power=counts_power,
            wer=wer,
            power=power,
            span_shapes=span_shapes,
            hyp_len=len(hyp_words),
        ),
        typed=typed,
        normalized_hyp=normalized_hyp,
        notes=tuple(notes),
    )


def _score_batch(args) -> list[ScoredUtterance]:
    batch, ctx = args
    return [score_utterance(u, ctx) for u in batch]


def run_score(
    utterances: list[Utterance],
    ctx: ScoringContext,
    workers: int = 1,
    problems: list[str] | None = None,
) -> RunResult:
    """Score a corpus, optionally across a process pool.

    Results are sorted by (utt_id, sys_id) before any aggregation, so output
    does not depend on the worker count.
    """
    if not utterances:
        raise CorpusError("no utterances to score")
    if workers <= 1 or len(utterances) < 2 * workers:
        scored = [score_utterance(u, ctx) for u in utterances]
    else:
        batches = [(utterances[i::workers], ctx) for i in range(workers)]
        scored = []
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_score_batch, batches):
                scored.extend(part)
    scored.sort(key=lambda s: (s.utt_id, s.sys_id))
    summary = aggregate([s.score for s in scored])
    confusions = confusion_pairs(
        (s.recombined, list(s.ref_words), list(s.hyp_words))
        for s in scored
        if not math.isinf(s.score.power)
    )
    all_problems = list(problems or [])
    for s in scored:
        for note in s.notes:
            all_problems.append(f"{s.utt_id}/{s.sys_id}: {note}")
    return RunResult(scored, summary, confusions, all_problems)


def feature_values(scored: ScoredUtterance) -> dict[str, float] | None:
    """Exact feature values for one utterance (before any rendering).

    The basic columns and the 16 typed columns are error counts divided by
    the reference length, so each set sums to the error rate exactly.
    Utterances without a usable denominator yield None.
    """
    counts = scored.score.counts_power
    if counts.L == 0:
        return None
    length = counts.L
    values = {
        "wer": scored.score.wer,
        "power": scored.score.power,
        "WER.S": counts.S / length,
        "WER.D": counts.D / length,
        "WER.I": counts.I / length,
        "WER.SS": counts.SS / length,
    }
    for key in TYPED_KEYS:
        values[key] = scored.typed[key] / length
    return values


def feature_row(scored: ScoredUtterance) -> list[str] | None:
    """One CSV row (values rendered at 6 decimal places), or None."""
    values = feature_values(scored)
    if values is None:
        return None
    row = [scored.utt_id, scored.sys_id, str(scored.score.counts_power.L)]
    row.extend(f"{values[key]:.6f}" for key in FEATURE_HEADER[3:])
    return row


def render_features_csv(scored: list[ScoredUtterance]) -> str:
    rows = [",".join(FEATURE_HEADER)]
    for s in sorted(scored, key=lambda s: (s.utt_id, s.sys_id)):
        row = feature_row(s)
        if row is not None:
            rows.append(",".join(row))
    return "\n".join(rows) + "\n"


def export_features(scored: list[ScoredUtterance], out_path) -> None:
    """Write the per-utterance feature CSV (byte-stable across runs)."""
    text = render_features_csv(scored)
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _fmt_rate(x: float) -> str:
    return "inf" if math.isinf(x) else f"{100 * x:.2f}"


def _table(header: list[str], rows: list[list[str]]) -> str:
    widths = [len(h) for h in header]
    for row in rows:
        for k, cell in enumerate(row):
            widths[k] = max(widths[k], len(cell))
    lines = [
        "  ".join(h.ljust(widths[k]) for k, h in enumerate(header)).rstrip(),
        "  ".join("-" * widths[k] for k in range(len(header))),
    ]
    for row in rows:
        lines.append("  ".join(cell.ljust(widths[k]) for k, cell in enumerate(row)).rstrip())
    return "\n".join(lines)


def render_summary_text(summary: CorpusSummary, typed_totals: dict[str, dict[str, int]] | None = None) -> str:
    """Aligned plain-text corpus report."""
    sections = []
    header = ["system", "utts", "ref_tok", "WER%", "POWER%", "S", "D", "I", "SS"]
    rows = []
    for s in summary.systems:
        c = s.counts_power
        rows.append(
            [
                s.sys_id,
                str(s.utterances),
                str(s.ref_tokens),
                _fmt_rate(s.wer),
                _fmt_rate(s.power),
                str(c.S),
                str(c.D),
                str(c.I),
                str(c.SS),
            ]
        )
    sections.append("Scores by system\n" + _table(header, rows))

    header = ["system", "SS.ref", "SS.hyp", "SS:ref>1", "SS:hyp>1", "SS:both>1"]
    rows = [
        [
            s.sys_id,
            f"{s.span_ref_frac:.3f}",
            f"{s.span_hyp_frac:.3f}",
            f"{s.span_multi_ref:.3f}",
            f"{s.span_multi_hyp:.3f}",
            f"{s.span_multi_both:.3f}",
        ]
        for s in summary.systems
    ]
    sections.append("Substitution-span statistics\n" + _table(header, rows))

    header = ["error type", "mean", "se"]
    rows = [
        [key, f"{m:.4f}", f"{se:.4f}"]
        for key, (m, se) in summary.power_proportion_stats.items()
    ]
    sections.append(
        "Error-type proportions across systems (recombined labels)\n" + _table(header, rows)
    )

    if typed_totals:
        header = ["error type"] + [s.sys_id for s in summary.systems]
        rows = []
        for key in TYPED_KEYS:
            rows.append([key] + [str(typed_totals[s.sys_id].get(key, 0)) for s in summary.systems])
        sections.append("Typed error counts by system\n" + _table(header, rows))

    skipped = sum(s.skipped_empty_ref for s in summary.systems)
    if skipped:
        sections.append(f"Skipped {skipped} utterance(s) with empty reference.")
    return "\n\n".join(sections) + "\n"


def render_summary_csv(summary: CorpusSummary) -> str:
    lines = [
        "sys_id,utterances,ref_tokens,wer,power,S,D,I,SS,"
        "span_ref_frac,span_hyp_frac,span_multi_ref,span_multi_hyp,span_multi_both"
    ]
    for s in summary.systems:
        c = s.counts_power
        wer = "inf" if math.isinf(s.wer) else f"{s.wer:.6f}"
        power = "inf" if math.isinf(s.power) else f"{s.power:.6f}"
        lines.append(
            f"{s.sys_id},{s.utterances},{s.ref_tokens},{wer},{power},"
            f"{c.S},{c.D},{c.I},{c.SS},"
            f"{s.span_ref_frac:.6f},{s.span_hyp_frac:.6f},{s.span_multi_ref:.6f},"
            f"{s.span_multi_hyp:.6f},{s.span_multi_both:.6f}"
        )
    return "\n".join(lines) + "\n"


def render_confusions_text(pairs: list[ConfusionPair], limit: int | None = None) -> str:
    shown = pairs if limit is None else pairs[:limit]
    header = ["count", "reference", "hypothesis"]
    rows = [[str(p.count), p.ref_side, p.hyp_side] for p in shown]
    return _table(header, rows) + "\n"


def render_confusions_csv(pairs: list[ConfusionPair], limit: int | None = None) -> str:
    shown = pairs if limit is None else pairs[:limit]
    lines = ["count,reference,hypothesis"]
    for p in shown:
        ref = p.ref_side.replace('"', '""')
        hyp = p.hyp_side.replace('"', '""')
        lines.append(f'{p.count},"{ref}","{hyp}"')
    return "\n".join(lines) + "\n"


def render_alignments_tsv(scored: list[ScoredUtterance]) -> str:
    """Per-unit labeled alignment dump: one line per alignment unit."""
    lines = ["utt_id\tsys_id\tlabel\treference\thypothesis"]
    for s in sorted(scored, key=lambda s: (s.utt_id, s.sys_id)):
        for unit in s.recombined.units:
            ref = " ".join(s.ref_words[unit.ref_range[0] : unit.ref_range[1]])
            hyp = " ".join(s.hyp_words[unit.hyp_range[0] : unit.hyp_range[1]])
            lines.append(f"{s.utt_id}\t{s.sys_id}\t{unit.label.value}\t{ref}\t{hyp}")
    return "\n".join(lines) + "\n"


def render_normalized_hyps(scored: list[ScoredUtterance], sys_id: str) -> str:
    lines = []
    for s in sorted(scored, key=lambda s: s.utt_id):
        if s.sys_id != sys_id:
            continue
        words = s.normalized_hyp if s.normalized_hyp is not None else s.hyp_words
        lines.append(f"{s.utt_id}\t{' '.join(words)}")
    return "\n".join(lines) + "\n"


def typed_totals_by_system(scored: list[ScoredUtterance]) -> dict[str, dict[str, int]]:
    totals: dict[str, dict[str, int]] = {}
    for s in scored:
        if math.isinf(s.score.power):
            continue
        bucket = totals.setdefault(s.sys_id, {k: 0 for k in TYPED_KEYS})
        for key, value in s.typed.items():
            bucket[key] += value
    return totals
