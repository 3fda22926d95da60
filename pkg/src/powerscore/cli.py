"""Command line interface.

Verbs: `score` (summary report), `features` (per-utterance CSV for
regression), `confusions` (ranked confusion pairs), `normalize` (write
oracle-normalized hypotheses).  Exit codes: 0 success, 1 fatal input problem,
2 internal invariant violation.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import corpus_io
from .annotate import load_closed_class, load_lemma_map
from .errors import CorpusError, DictionaryError, InternalInvariantError
from .lexicon import load_dictionary
from .normalize import NormRules, load_variant_map


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="powerscore",
        description="Score ASR hypotheses with WER and phonetically-oriented WER (POWER).",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("score", "score a corpus and print summary tables"),
        ("features", "export the per-utterance feature CSV"),
        ("confusions", "print ranked confusion pairs"),
        ("normalize", "write oracle-normalized hypothesis files"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("ref", help="reference file (UTTID<TAB>text)")
        p.add_argument("hyps", nargs="+", help="hypothesis files, one per system")
        p.add_argument("--dict", required=True, dest="dict_path", help="pronunciation dictionary")
        p.add_argument("--variants", help="dialect variant map (variant<TAB>canonical)")
        p.add_argument("--closed-class", dest="closed_class", help="closed-class word list")
        p.add_argument("--lemmas", help="lemma map TSV overriding the suffix rules")
        p.add_argument("--sys-id", action="append", dest="sys_ids", help="system id per hypothesis file")
        p.add_argument("--no-phonetic", action="store_true", help="plain WER labels only")
        p.add_argument("--oracle-normalize", action="store_true", dest="oracle_normalize",
                       help="rewrite hypothesis spans whose pronunciation matches the reference")
        p.add_argument("--workers", type=int, default=1, help="parallel worker processes")
        p.add_argument("--out", help="directory for output files")
        p.add_argument("--format", choices=("text", "csv"), default="text")
        p.add_argument("--dump-alignments", action="store_true", dest="dump_alignments",
                       help="also write per-utterance labeled alignments (needs --out)")
        p.add_argument("--top", type=int, help="limit confusion pairs shown")
    return parser


def _run(args) -> int:
    lexicon = load_dictionary(args.dict_path)
    variant_map = load_variant_map(args.variants) if args.variants else {}
    rules = NormRules(variant_map=variant_map)
    closed = load_closed_class(args.closed_class)
    lemma_map = load_lemma_map(args.lemmas) if args.lemmas else None
    ctx = corpus_io.ScoringContext(
        lexicon=lexicon,
        rules=rules,
        closed_class=closed,
        lemma_map=lemma_map,
        phonetic=not args.no_phonetic,
        oracle_norm=args.oracle_normalize or args.command == "normalize",
    )
    utterances, problems = corpus_io.load_corpus(args.ref, args.hyps, args.sys_ids)
    result = corpus_io.run_score(utterances, ctx, workers=args.workers, problems=problems)

    out_dir = Path(args.out) if args.out else None
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)

    if args.command == "score":
        if args.format == "text":
            report = corpus_io.render_summary_text(
                result.summary, corpus_io.typed_totals_by_system(result.utterances)
            )
        else:
            report = corpus_io.render_summary_csv(result.summary)
        _emit(report, out_dir, f"summary.{'txt' if args.format == 'text' else 'csv'}")
        if args.dump_alignments and out_dir is not None:
            (out_dir / "alignments.tsv").write_text(
                corpus_io.render_alignments_tsv(result.utterances), encoding="utf-8"
            )
    elif args.command == "features":
        text = corpus_io.render_features_csv(result.utterances)
        _emit(text, out_dir, "features.csv")
    elif args.command == "confusions":
        if args.format == "text":
            text = corpus_io.render_confusions_text(result.confusions, args.top)
        else:
            text = corpus_io.render_confusions_csv(result.confusions, args.top)
        _emit(text, out_dir, f"confusions.{'txt' if args.format == 'text' else 'csv'}")
    else:  # normalize
        if out_dir is None:
            print("normalize requires --out DIR", file=sys.stderr)
            return 1
        for sys_id in sorted({u.sys_id for u in result.utterances}):
            path = out_dir / f"{sys_id}.normalized.tsv"
            path.write_text(
                corpus_io.render_normalized_hyps(result.utterances, sys_id), encoding="utf-8"
            )
        report = corpus_io.render_summary_text(result.summary)
        _emit(report, out_dir, "summary.txt")

    for problem in result.problems:
        print(f"warning: {problem}", file=sys.stderr)
    return 0


def _emit(text: str, out_dir: Path | None, filename: str) -> None:
    if out_dir is None:
        sys.stdout.write(text)
    else:
        (out_dir / filename).write_text(text, encoding="utf-8")


def main(argv: list[str] | None = None) -> int:
    # argparse exits with its own code 2 on usage errors; remap to 1 so exit
    # code 2 keeps meaning "internal invariant violation"
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        return 0 if not exc.code else 1
    try:
        return _run(args)
    except (CorpusError, DictionaryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except InternalInvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
