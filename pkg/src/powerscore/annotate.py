"""Word-class and morphology annotation of errors, and confusion pairs.

Word class is a lexical lookup against a shipped function-word list rather
than a tagger: a word in the list is closed class, anything else open class.
Lemmatization uses an optional word-to-lemma map file when given, otherwise
deterministic English suffix rules with consonant undoubling and final-e
restoration.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from typing import Iterable

from .phone_align import RecombinedAlignment
from .word_align import AlignLabel


class WordClass(Enum):
    OPEN = "open"
    CLOSED = "closed"


# The typed error partition: 11 plain-alignment keys plus 5 substitution-span
# keys.  A morphological cross-class closed->open cell is not part of the
# partition; such pairs fold into the nomorph cell.
TYPED_KEYS = (
    "D.closed",
    "D.open",
    "I.closed",
    "I.open",
    "S.closed_closed.morph",
    "S.closed_closed.nomorph",
    "S.closed_open.nomorph",
    "S.open_closed.morph",
    "S.open_closed.nomorph",
    "S.open_open.morph",
    "S.open_open.nomorph",
    "SS.closed_span",
    "SS.open_span",
    "SS.span_closed",
    "SS.span_open",
    "SS.span_span",
)

_MORPH_CELLS = {"closed_closed", "open_closed", "open_open"}

_VOWELS = set("aeiou")


def load_closed_class(path=None) -> frozenset[str]:
    """Closed-class word list; the shipped list is used when no path is given."""
    if path is None:
        text = resources.files("powerscore.data").joinpath("closed_class.txt").read_text()
    else:
        text = open(path, encoding="utf-8").read()
    words = set()
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip().lower()
        if line:
            words.add(line)
    return frozenset(words)


def classify_word(word: str, closed_class: frozenset[str]) -> WordClass:
    return WordClass.CLOSED if word.lower() in closed_class else WordClass.OPEN


def load_lemma_map(path) -> dict[str, str]:
    """TSV word<TAB>lemma overrides for lemmatization."""
    lemmas = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t") if "\t" in line else line.split()
            if len(parts) >= 2:
                lemmas[parts[0].lower()] = parts[1].lower()
    return lemmas


def _undouble(stem: str) -> str:
    if len(stem) >= 2 and stem[-1] == stem[-2] and stem[-1] not in "ls":
        return stem[:-1]
    return stem


def _cvc(stem: str) -> bool:
    # consonant-vowel-consonant tail suggests a dropped silent e
    if len(stem) < 3:
        return False
    a, b, c = stem[-3], stem[-2], stem[-1]
    return a not in _VOWELS and b in _VOWELS and c not in _VOWELS and c not in "wxy"


def _strip_ending(word: str, ending: str) -> str:
    stem = word[: -len(ending)]
    undoubled = _undouble(stem)
    if undoubled != stem:
        return undoubled
    if _cvc(stem):
        return stem + "e"
    return stem


def lemmatize(word: str, lemma_map: dict[str, str] | None = None) -> str:
    """Strip one inflectional suffix; map file entries win over the rules."""
    word = word.lower()
    if lemma_map and word in lemma_map:
        return lemma_map[word]
    if len(word) <= 3:
        return word
    if word.endswith("ies") and len(word) >= 5:
        return word[:-3] + "y"
    for ending in ("sses", "xes", "zes", "ches", "shes"):
        if word.endswith(ending):
            return word[:-2]
    if word.endswith("ss"):
        return word
    if word.endswith("s") and not word.endswith("us") and not word.endswith("is"):
        return word[:-1]
    if word.endswith("ied") and len(word) >= 5:
        return word[:-3] + "y"
    if word.endswith("ed") and len(word) >= 5:
        return _strip_ending(word, "ed")
    if word.endswith("ing") and len(word) >= 6:
        return _strip_ending(word, "ing")
    if word.endswith("iest") and len(word) >= 6:
        return word[:-4] + "y"
    if word.endswith("ier") and len(word) >= 5:
        return word[:-3] + "y"
    if word.endswith("est") and len(word) >= 6:
        return _strip_ending(word, "est")
    if word.endswith("er") and len(word) >= 5:
        return _strip_ending(word, "er")
    return word


def is_morphological(ref_word: str, hyp_word: str, lemma_map: dict[str, str] | None = None) -> bool:
    """Same lemma, different surface form."""
    return ref_word != hyp_word and lemmatize(ref_word, lemma_map) == lemmatize(hyp_word, lemma_map)


def typed_key(
    unit,
    ref_words: list[str],
    hyp_words: list[str],
    closed_class: frozenset[str],
    lemma_map: dict[str, str] | None = None,
) -> str | None:
    """Map one labeled unit to its place in the typed partition."""
    label = unit.label
    if label is AlignLabel.COR:
        return None
    if label is AlignLabel.DEL:
        word = ref_words[unit.ref_range[0]]
        return f"D.{classify_word(word, closed_class).value}"
    if label is AlignLabel.INS:
        word = hyp_words[unit.hyp_range[0]]
        return f"I.{classify_word(word, closed_class).value}"
    if label is AlignLabel.SUB:
        ref_word = ref_words[unit.ref_range[0]]
        hyp_word = hyp_words[unit.hyp_range[0]]
        cell = (
            f"{classify_word(ref_word, closed_class).value}"
            f"_{classify_word(hyp_word, closed_class).value}"
        )
        morph = is_morphological(ref_word, hyp_word, lemma_map) and cell in _MORPH_CELLS
        return f"S.{cell}.{'morph' if morph else 'nomorph'}"
    ref_side = (
        "span"
        if unit.ref_size() > 1
        else classify_word(ref_words[unit.ref_range[0]], closed_class).value
    )
    hyp_side = (
        "span"
        if unit.hyp_size() > 1
        else classify_word(hyp_words[unit.hyp_range[0]], closed_class).value
    )
    return f"SS.{ref_side}_{hyp_side}"


def type_errors(
    recombined: RecombinedAlignment,
    ref_words: list[str],
    hyp_words: list[str],
    closed_class: frozenset[str],
    lemma_map: dict[str, str] | None = None,
) -> dict[str, int]:
    """Count every error unit under exactly one typed key.

    Deletion and insertion units count one per word covered so the typed
    totals match the untyped POWER numerator.
    """
    counts = {k: 0 for k in TYPED_KEYS}
    for unit in recombined.units:
        key = typed_key(unit, ref_words, hyp_words, closed_class, lemma_map)
        if key is None:
            continue
        if unit.label is AlignLabel.DEL:
            counts[key] += unit.ref_size()
        elif unit.label is AlignLabel.INS:
            counts[key] += unit.hyp_size()
        elif unit.label is AlignLabel.SUB:
            counts[key] += 1
        else:
            counts[key] += max(unit.ref_size(), unit.hyp_size())
    return counts


@dataclass(frozen=True, slots=True)
class ConfusionPair:
    ref_side: str
    hyp_side: str
    count: int


def confusion_pairs(
    items: Iterable[tuple[RecombinedAlignment, list[str], list[str]]],
) -> list[ConfusionPair]:
    """Collect substitution and substitution-span pairs across a corpus.

    Sides are space-joined word ranges; pairs are ranked by descending count,
    then lexicographically.
    """
    counter: Counter[tuple[str, str]] = Counter()
    for recombined, ref_words, hyp_words in items:
        for unit in recombined.units:
            if unit.label in (AlignLabel.SUB, AlignLabel.SUBSPAN):
                ref_side = " ".join(ref_words[unit.ref_range[0] : unit.ref_range[1]])
                hyp_side = " ".join(hyp_words[unit.hyp_range[0] : unit.hyp_range[1]])
                counter[(ref_side, hyp_side)] += 1
    ranked = sorted(counter.items(), key=lambda kv: (-kv[1], kv[0]))
    return [ConfusionPair(r, h, c) for (r, h), c in ranked]
