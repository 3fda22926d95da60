"""WER and phonetically-oriented WER (POWER) scoring for ASR evaluation."""

from .annotate import (
    ConfusionPair,
    WordClass,
    classify_word,
    confusion_pairs,
    lemmatize,
    load_closed_class,
    load_lemma_map,
    type_errors,
)
from .corpus_io import (
    ScoringContext,
    Utterance,
    export_features,
    load_corpus,
    run_score,
    score_utterance,
)
from .errors import (
    CorpusError,
    DictionaryError,
    InternalInvariantError,
    PhonemeError,
    PowerscoreError,
)
from .inventory import PhonemeClass, classify_phoneme
from .lexicon import Lexicon, Pronunciation, load_dictionary, syllabify
from .normalize import NormRules, load_variant_map, normalize_tokens, oracle_normalize
from .phone_align import (
    PhoneAlignment,
    PhoneToken,
    SpanResult,
    align_phones,
    build_phone_sequence,
    recombine,
    recombine_utterance,
)
from .scoring import CorpusSummary, ErrorCounts, UtteranceScore, aggregate, score_power, score_wer
from .word_align import AlignLabel, ErrorSpan, WordAlignment, align_words, extract_error_spans

__version__ = "0.1.0"
