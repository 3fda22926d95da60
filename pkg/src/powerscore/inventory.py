"""Fixed ARPAbet phoneme inventory and vowel/consonant classification.

The inventory is the 39-symbol stress-less ARPAbet set used by the published
CMU pronouncing dictionary. Classification is a finite table: the 15 vowel
symbols (r-colored ER included) are vowels, everything else (semivowels W and
Y included) is a consonant.
"""

from __future__ import annotations

from enum import Enum

from .errors import PhonemeError


class PhonemeClass(Enum):
    VOWEL = "vowel"
    CONSONANT = "consonant"


VOWELS = frozenset(
    "AA AE AH AO AW AY EH ER EY IH IY OW OY UH UW".split()
)

CONSONANTS = frozenset(
    "B CH D DH F G HH JH K L M N NG P R S SH T TH V W Y Z ZH".split()
)

INVENTORY = VOWELS | CONSONANTS


def strip_stress(symbol: str) -> str:
    """Drop trailing stress digits from a raw dictionary phone label."""
    return symbol.rstrip("0123456789")


def classify_phoneme(symbol: str) -> PhonemeClass:
    """Classify an inventory symbol as vowel or consonant.

    Raises PhonemeError for symbols outside the fixed inventory.
    """
    if symbol in VOWELS:
        return PhonemeClass.VOWEL
    if symbol in CONSONANTS:
        return PhonemeClass.CONSONANT
    raise PhonemeError(f"unknown phoneme symbol: {symbol!r}")


def is_vowel(symbol: str) -> bool:
    return classify_phoneme(symbol) is PhonemeClass.VOWEL
