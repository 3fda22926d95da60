"""Pronunciation dictionary, syllabification, and out-of-vocabulary fallback.

The dictionary file format is the published CMU pronouncing dictionary
format: `;;;` comment lines, `WORD  PH1 PH2 ...` entries with optional stress
digits, and alternate pronunciations marked `WORD(2)`, `WORD(3)`, and so on.
Lookup is case-insensitive and the first entry for a word is its primary
pronunciation.

Words missing from the dictionary go through a deterministic fallback chain:
integer strings are expanded to number words, hyphenated and apostrophized
words are split and pronounced piecewise, and anything left is read out
letter by letter from a fixed letter-name table (flagged `oov`).
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources

from .errors import DictionaryError
from .inventory import INVENTORY, VOWELS, strip_stress

log = logging.getLogger(__name__)

_ALT_RE = re.compile(r"^(.+)\((\d+)\)$")
_ORDINAL_RE = re.compile(r"^(\d+)(st|nd|rd|th)$")


class BoundaryKind(Enum):
    WORD = "|"
    SYLLABLE = "#"


@dataclass(frozen=True, slots=True)
class Boundary:
    kind: BoundaryKind

    def __str__(self) -> str:
        return self.kind.value


@dataclass(frozen=True, slots=True)
class Phoneme:
    symbol: str

    def __str__(self) -> str:
        return self.symbol


WORD_BOUNDARY = Boundary(BoundaryKind.WORD)
SYLLABLE_BOUNDARY = Boundary(BoundaryKind.SYLLABLE)

Token = Phoneme | Boundary


def is_boundary(token: Token) -> bool:
    return isinstance(token, Boundary)


@dataclass(frozen=True)
class Pronunciation:
    """Phoneme tokens interleaved with word and syllable boundary markers.

    Starts and ends with a word boundary; every syllable is introduced by a
    syllable boundary marker.
    """

    tokens: tuple[Token, ...]
    source_word: str = ""
    oov: bool = False

    def phones(self) -> list[str]:
        """Phone symbols with all boundary markers stripped."""
        return [t.symbol for t in self.tokens if isinstance(t, Phoneme)]

    def syllable_count(self) -> int:
        return sum(
            1
            for t in self.tokens
            if isinstance(t, Boundary) and t.kind is BoundaryKind.SYLLABLE
        )

    def __str__(self) -> str:
        return " ".join(str(t) for t in self.tokens)


def _load_onset_table(path=None) -> frozenset[tuple[str, ...]]:
    if path is None:
        text = resources.files("powerscore.data").joinpath("onsets.txt").read_text()
    else:
        text = open(path, encoding="utf-8").read()
    onsets = set()
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            onsets.add(tuple(line.split()))
    return frozenset(onsets)


def _load_letter_table(path=None) -> dict[str, list[str]]:
    if path is None:
        text = resources.files("powerscore.data").joinpath("letter_sounds.txt").read_text()
    else:
        text = open(path, encoding="utf-8").read()
    table = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        table[parts[0].lower()] = parts[1:]
    return table


def syllabify(
    phones: list[str],
    onsets: frozenset[tuple[str, ...]],
    source_word: str = "",
    oov: bool = False,
) -> Pronunciation:
    """Assign syllable structure to a phone string by maximal onset.

    One syllable per vowel nucleus; the consonants between two nuclei are
    split so that the new syllable receives the longest legal onset from the
    table, the rest closing the previous syllable.  Word-initial consonants
    always open the first syllable and trailing consonants always close the
    last one.  A vowel-less input forms a single syllable.
    """
    if not phones:
        raise ValueError("cannot syllabify an empty phone string")
    syllables: list[list[str]] = []
    internuclei: list[str] = []
    for ph in phones:
        if ph in VOWELS:
            if not syllables:
                onset = internuclei
            else:
                onset = []
                for split in range(len(internuclei) + 1):
                    candidate = internuclei[split:]
                    if not candidate or tuple(candidate) in onsets:
                        syllables[-1].extend(internuclei[:split])
                        onset = candidate
                        break
            syllables.append(list(onset) + [ph])
            internuclei = []
        else:
            internuclei.append(ph)
    if internuclei:
        if syllables:
            syllables[-1].extend(internuclei)
        else:
            syllables.append(internuclei)
    tokens: list[Token] = [WORD_BOUNDARY]
    for syl in syllables:
        tokens.append(SYLLABLE_BOUNDARY)
        tokens.extend(Phoneme(p) for p in syl)
    tokens.append(WORD_BOUNDARY)
    return Pronunciation(tuple(tokens), source_word=source_word, oov=oov)


_ONES = (
    "zero one two three four five six seven eight nine ten eleven twelve "
    "thirteen fourteen fifteen sixteen seventeen eighteen nineteen"
).split()
_TENS = (None, None, "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety")
_ORDINAL_WORDS = {
    "one": "first",
    "two": "second",
    "three": "third",
    "five": "fifth",
    "eight": "eighth",
    "nine": "ninth",
    "twelve": "twelfth",
}


def number_to_words(n: int) -> list[str]:
    """Spell out an integer in the range 0..999,999."""
    if not 0 <= n < 1_000_000:
        raise ValueError(f"number out of expansion range: {n}")
    if n < 20:
        return [_ONES[n]]
    if n < 100:
        tens, rest = divmod(n, 10)
        return [_TENS[tens]] + ([_ONES[rest]] if rest else [])
    if n < 1000:
        hundreds, rest = divmod(n, 100)
        return [_ONES[hundreds], "hundred"] + (number_to_words(rest) if rest else [])
    thousands, rest = divmod(n, 1000)
    return number_to_words(thousands) + ["thousand"] + (number_to_words(rest) if rest else [])


def ordinal_words(n: int) -> list[str]:
    """Spell out an ordinal: the final word of the cardinal takes ordinal form."""
    words = number_to_words(n)
    last = words[-1]
    if last in _ORDINAL_WORDS:
        words[-1] = _ORDINAL_WORDS[last]
    elif last.endswith("y"):
        words[-1] = last[:-1] + "ieth"
    else:
        words[-1] = last + "th"
    return words


class Lexicon:
    """Immutable pronunciation lexicon with syllabification and OOV fallback.

    Safe to share across concurrent workers: entries and tables never change
    after construction and pronounce() is a pure function of its inputs.
    """

    def __init__(
        self,
        entries: dict[str, list[list[str]]],
        onsets: frozenset[tuple[str, ...]] | None = None,
        letter_sounds: dict[str, list[str]] | None = None,
    ):
        self.entries = entries
        self.onsets = onsets if onsets is not None else _load_onset_table()
        self.letter_sounds = (
            letter_sounds if letter_sounds is not None else _load_letter_table()
        )
        self._cache: dict[str, Pronunciation] = {}

    def __len__(self) -> int:
        return len(self.entries)

    def lookup(self, word: str) -> list[list[str]] | None:
        """All pronunciations for a word (first one is primary), or None."""
        return self.entries.get(word.lower())

    def syllabify(self, phones: list[str], source_word: str = "", oov: bool = False) -> Pronunciation:
        return syllabify(phones, self.onsets, source_word=source_word, oov=oov)

    def pronounce(self, word: str) -> Pronunciation:
        """Pronounce a normalized word, falling back deterministically for OOVs."""
        if not word:
            raise ValueError("cannot pronounce an empty word")
        key = word.lower()
        cached = self._cache.get(key)
        if cached is None:
            cached = self._pronounce_uncached(key)
            self._cache[key] = cached
        return cached

    def _pronounce_uncached(self, word: str) -> Pronunciation:
        prons = self.entries.get(word)
        if prons:
            return self.syllabify(prons[0], source_word=word)
        if word.isdigit() and (word == "0" or not word.startswith("0")):
            n = int(word)
            if n < 1_000_000:
                return self._pronounce_phrase(word, number_to_words(n))
        m = _ORDINAL_RE.match(word)
        if m and (m.group(1) == "0" or not m.group(1).startswith("0")):
            n = int(m.group(1))
            if n < 1_000_000:
                return self._pronounce_phrase(word, ordinal_words(n))
        if "-" in word or "'" in word:
            parts = [p for p in re.split(r"[-']", word) if p]
            if len(parts) > 1:
                return self._pronounce_phrase(word, parts)
        return self._pronounce_letters(word)

    def _pronounce_phrase(self, word: str, parts: list[str]) -> Pronunciation:
        # Parts keep their own syllable structure; only the internal word
        # boundaries are collapsed so the result reads as a single word.
        tokens: list[Token] = [WORD_BOUNDARY]
        oov = False
        for part in parts:
            pron = self.pronounce(part)
            tokens.extend(pron.tokens[1:-1])
            oov = oov or pron.oov
        tokens.append(WORD_BOUNDARY)
        return Pronunciation(tuple(tokens), source_word=word, oov=oov)

    def _pronounce_letters(self, word: str) -> Pronunciation:
        phones: list[str] = []
        for ch in word:
            phones.extend(self.letter_sounds.get(ch, []))
        if not phones:
            raise ValueError(f"no pronounceable characters in {word!r}")
        return self.syllabify(phones, source_word=word, oov=True)


def load_dictionary(
    path,
    onsets: frozenset[tuple[str, ...]] | None = None,
    letter_sounds: dict[str, list[str]] | None = None,
) -> Lexicon:
    """Load a CMU-format pronunciation dictionary.

    Comment lines (`;;;`) are skipped, alternate pronunciations are grouped
    under the base headword in file order, and stress digits are stripped.
    Malformed lines are skipped with a logged warning naming the line number;
    an unreadable file raises DictionaryError.
    """
    entries: dict[str, list[list[str]]] = {}
    try:
        with open(path, encoding="latin-1") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.strip()
                if not line or line.startswith(";;;"):
                    continue
                parts = line.split()
                if len(parts) < 2:
                    log.warning("%s:%d: malformed dictionary line, skipped", path, lineno)
                    continue
                head, phones_raw = parts[0], parts[1:]
                m = _ALT_RE.match(head)
                if m:
                    head = m.group(1)
                phones = [strip_stress(p.upper()) for p in phones_raw]
                bad = [p for p in phones if p not in INVENTORY]
                if bad:
                    log.warning(
                        "%s:%d: unknown phone(s) %s, line skipped", path, lineno, ",".join(bad)
                    )
                    continue
                entries.setdefault(head.lower(), []).append(phones)
    except OSError as exc:
        raise DictionaryError(f"cannot read dictionary {path}: {exc}") from exc
    return Lexicon(entries, onsets=onsets, letter_sounds=letter_sounds)
