import random

import pytest

from oracles import (
    alignment_moves,
    constrained_min_cost,
    min_gaps_among_min_paths,
    path_interior_gaps,
)
from synth import random_phone_side
from powerscore.errors import InternalInvariantError
from powerscore.lexicon import (
    Boundary,
    BoundaryKind,
    Phoneme,
    SYLLABLE_BOUNDARY,
    WORD_BOUNDARY,
)
from powerscore.phone_align import (
    PhoneToken,
    align_phones,
    build_phone_sequence,
    recombine,
    recombine_utterance,
)
from powerscore.word_align import AlignLabel, align_words, extract_error_spans

C, S, D, I, SS = (
    AlignLabel.COR,
    AlignLabel.SUB,
    AlignLabel.DEL,
    AlignLabel.INS,
    AlignLabel.SUBSPAN,
)


def tok_string(tokens):
    return " ".join(str(t.payload) for t in tokens)


def assert_constraints(alignment):
    for st in alignment.steps:
        if st.label is S:
            assert isinstance(st.ref.payload, Phoneme)
            assert isinstance(st.hyp.payload, Phoneme)
            from powerscore.inventory import VOWELS

            assert (st.ref.payload.symbol in VOWELS) == (st.hyp.payload.symbol in VOWELS)
        if st.label is C and st.ref is not None:
            assert st.ref.payload == st.hyp.payload


def assert_coverage(alignment, ref_tokens, hyp_tokens):
    refs = [st.ref for st in alignment.steps if st.ref is not None]
    hyps = [st.hyp for st in alignment.steps if st.hyp is not None]
    assert refs == list(ref_tokens)
    assert hyps == list(hyp_tokens)


def test_build_phone_sequence_shares_word_boundaries(lexicon):
    tokens = build_phone_sequence(["and", "that", "to", "me"], lexicon)
    assert tok_string(tokens) == "| # AE N D | # DH AE T | # T AH | # M IY |"
    word_bounds = [t for t in tokens if t.payload == WORD_BOUNDARY]
    assert len(word_bounds) == 5


def test_build_phone_sequence_word_indices_and_first_syllable(lexicon):
    tokens = build_phone_sequence(["anatomy", "me"], lexicon)
    indices = [t.word_index for t in tokens]
    assert indices == sorted(indices)
    anatomy = [t for t in tokens if t.word_index == 0 and not isinstance(t.payload, Boundary)]
    firsts = [t.payload.symbol for t in anatomy if t.is_first_syllable]
    assert firsts == ["AH", "N"]


def test_build_phone_sequence_single_and_empty(lexicon):
    assert tok_string(build_phone_sequence(["me"], lexicon)) == "| # M IY |"
    assert build_phone_sequence([], lexicon) == []


def test_align_identical_sequences_all_correct(lexicon):
    tokens = build_phone_sequence(["me"], lexicon)
    alignment = align_phones(tokens, tokens)
    assert alignment.cost() == 0
    assert all(st.label is C for st in alignment.steps)


def test_vowel_consonant_substitution_forbidden(lexicon):
    ref = build_phone_sequence(["a"], lexicon)  # | # AH |
    hyp = [
        PhoneToken(WORD_BOUNDARY, 0, False),
        PhoneToken(SYLLABLE_BOUNDARY, 0, True),
        PhoneToken(Phoneme("T"), 0, True),
        PhoneToken(WORD_BOUNDARY, 0, False),
    ]
    alignment = align_phones(ref, hyp)
    assert alignment.cost() == 2
    labels = [st.label for st in alignment.steps if st.label is not C]
    assert sorted(l.value for l in labels) == ["D", "I"]
    assert_constraints(alignment)


def test_boundary_kinds_never_pair(lexicon):
    # a lone word boundary against a syllable boundary must resolve as D+I
    ref = [PhoneToken(WORD_BOUNDARY, 0, False)]
    hyp = [PhoneToken(SYLLABLE_BOUNDARY, 0, True)]
    alignment = align_phones(ref, hyp)
    assert alignment.cost() == 2


def test_empty_sides():
    assert align_phones([], []).steps == ()
    ref = [PhoneToken(WORD_BOUNDARY, 0, False)]
    assert [s.label for s in align_phones(ref, []).steps] == [D]
    assert [s.label for s in align_phones([], ref).steps] == [I]


def test_span_realignment_groups_whole_span(lexicon):
    ref = build_phone_sequence(["anatomy"], lexicon)
    hyp = build_phone_sequence(["and", "that", "to", "me"], lexicon)
    alignment = align_phones(ref, hyp)
    assert alignment.cost() == 9
    assert alignment.cost() == constrained_min_cost(ref, hyp)
    assert_constraints(alignment)
    assert_coverage(alignment, ref, hyp)
    result = recombine(alignment, ["anatomy"], ["and", "that", "to", "me"])
    assert [(e.ref_range, e.hyp_range, e.label) for e in result.entries] == [
        ((0, 1), (0, 4), SS)
    ]


def test_gap_minimization_isolates_unmatched_trailing_word(lexicon):
    ref = build_phone_sequence(["all", "at"], lexicon)
    hyp = build_phone_sequence(["or"], lexicon)
    alignment = align_phones(ref, hyp)
    assert alignment.cost() == constrained_min_cost(ref, hyp) == 5
    impl_gaps = path_interior_gaps(alignment_moves(alignment), ref, hyp)
    assert impl_gaps == min_gaps_among_min_paths(ref, hyp) == 0
    result = recombine(alignment, ["all", "at"], ["or"])
    assert [(e.ref_range, e.hyp_range, e.label) for e in result.entries] == [
        ((0, 1), (0, 1), S),
        ((1, 2), (1, 1), D),
    ]


def test_residual_tie_prefers_diagonal():
    # two same-class consonants swapped: [S, S] beats the del/ins orderings
    def toks(symbols):
        return [PhoneToken(Phoneme(s), 0, True) for s in symbols]

    alignment = align_phones(toks(["T", "K"]), toks(["K", "T"]))
    assert [st.label for st in alignment.steps] == [S, S]


def test_residual_tie_prefers_deletion_over_insertion(lexicon):
    ref = build_phone_sequence(["a"], lexicon)
    hyp = [
        PhoneToken(WORD_BOUNDARY, 0, False),
        PhoneToken(SYLLABLE_BOUNDARY, 0, True),
        PhoneToken(Phoneme("T"), 0, True),
        PhoneToken(WORD_BOUNDARY, 0, False),
    ]
    alignment = align_phones(ref, hyp)
    # equal-cost, equal-gap D+I pair: deletion is emitted first
    labels = [st.label for st in alignment.steps]
    assert labels.index(D) < labels.index(I)


def test_oracle_equivalence_random_instances():
    rng = random.Random(101)
    for _ in range(120):
        ref = random_phone_side(rng, max_tokens=12)
        hyp = random_phone_side(rng, max_tokens=12)
        alignment = align_phones(ref, hyp)
        assert alignment.cost() == constrained_min_cost(ref, hyp)
        impl_gaps = path_interior_gaps(alignment_moves(alignment), ref, hyp)
        assert impl_gaps == min_gaps_among_min_paths(ref, hyp)
        assert_constraints(alignment)
        assert_coverage(alignment, ref, hyp)


def test_oracle_equivalence_uniform_class_adversarial():
    rng = random.Random(7)
    vowels = ["AA", "AE", "IY"]
    for _ in range(10):
        ref = [PhoneToken(Phoneme(rng.choice(vowels)), 0, True) for _ in range(rng.randint(3, 7))]
        hyp = [PhoneToken(Phoneme(rng.choice(vowels)), 0, True) for _ in range(rng.randint(3, 7))]
        alignment = align_phones(ref, hyp)
        assert alignment.cost() == constrained_min_cost(ref, hyp)
        impl_gaps = path_interior_gaps(alignment_moves(alignment), ref, hyp)
        assert impl_gaps == min_gaps_among_min_paths(ref, hyp)


def test_recombine_word_coverage_random():
    rng = random.Random(55)
    for _ in range(150):
        n_ref = rng.randint(1, 3)
        n_hyp = rng.randint(0, 3)
        ref = random_phone_side(rng, max_words=n_ref)
        hyp = random_phone_side(rng, max_words=n_hyp) if n_hyp else []
        ref_words = [f"r{k}" for k in range(max(t.word_index for t in ref) + 1)]
        hyp_words = [f"h{k}" for k in range(max(t.word_index for t in hyp) + 1)] if hyp else []
        alignment = align_phones(ref, hyp)
        result = recombine(alignment, ref_words, hyp_words)
        ref_covered = []
        hyp_covered = []
        for e in result.entries:
            ref_covered.extend(range(*e.ref_range))
            hyp_covered.extend(range(*e.hyp_range))
        assert ref_covered == list(range(len(ref_words)))
        assert hyp_covered == list(range(len(hyp_words)))


def test_recombine_empty_side_degrades_to_deletions(lexicon):
    ref = build_phone_sequence(["all", "at"], lexicon)
    alignment = align_phones(ref, [])
    result = recombine(alignment, ["all", "at"], [])
    assert [e.label for e in result.entries] == [D, D]


def test_recombine_identical_pair_relabels_correct(lexicon):
    # the word-level tie policy can waste a match inside a span; the phone
    # stage recovers it as a correct pair
    ref_words = "i student time".split()
    hyp_words = "student her model".split()
    ref = build_phone_sequence(ref_words, lexicon)
    hyp = build_phone_sequence(hyp_words, lexicon)
    result = recombine(align_phones(ref, hyp), ref_words, hyp_words)
    assert ((1, 2), (0, 1), C) in [(e.ref_range, e.hyp_range, e.label) for e in result.entries]


def test_syllable_heuristic_splits_unmatched_function_word(lexicon, ctx):
    from powerscore.corpus_io import Utterance, score_utterance

    scored = score_utterance(Utterance("u", "s", "cat dog", "cap a dock"), ctx)
    units = [
        (u.label, scored.ref_words[u.ref_range[0] : u.ref_range[1]],
         scored.hyp_words[u.hyp_range[0] : u.hyp_range[1]])
        for u in scored.recombined.units
    ]
    assert units == [
        (S, ("cat",), ("cap",)),
        (I, (), ("a",)),
        (S, ("dog",), ("dock",)),
    ]
    assert scored.score.counts_power.numerator() == scored.score.counts_wer.numerator() == 3


def test_syllable_heuristic_respects_aligned_words(lexicon):
    # "the" shares its DH with "seethe": aligned phones block the split
    ref_words = ["see", "the"]
    hyp_words = ["seethe"]
    ref = build_phone_sequence(ref_words, lexicon)
    hyp = build_phone_sequence(hyp_words, lexicon)
    result = recombine(align_phones(ref, hyp), ref_words, hyp_words)
    assert [(e.ref_range, e.hyp_range, e.label) for e in result.entries] == [
        ((0, 2), (0, 1), SS)
    ]


def test_recombine_utterance_splices_span_results(lexicon):
    ref = "the cat sat on anatomy".split()
    hyp = "a cat sat in and that to me".split()
    wa = align_words(ref, hyp)
    spans = extract_error_spans(wa)
    results = []
    for span in spans:
        span_ref = ref[span.ref_start : span.ref_end]
        span_hyp = hyp[span.hyp_start : span.hyp_end]
        pa = align_phones(
            build_phone_sequence(span_ref, lexicon),
            build_phone_sequence(span_hyp, lexicon),
        )
        results.append(recombine(pa, span_ref, span_hyp))
    rec = recombine_utterance(wa, spans, results)
    labels = [(u.label, u.ref_range, u.hyp_range) for u in rec.units]
    assert (SS, (4, 5), (4, 8)) in labels  # anatomy -> and that to me
    assert rec.ref_len == 5 and rec.hyp_len == 8
    ref_cover = [i for u in rec.units for i in range(*u.ref_range)]
    hyp_cover = [i for u in rec.units for i in range(*u.hyp_range)]
    assert ref_cover == list(range(5))
    assert hyp_cover == list(range(8))


def test_determinism_across_runs(lexicon):
    ref = build_phone_sequence(["anatomy"], lexicon)
    hyp = build_phone_sequence(["and", "that", "to", "me"], lexicon)
    a = align_phones(ref, hyp)
    b = align_phones(list(ref), list(hyp))
    assert a == b
