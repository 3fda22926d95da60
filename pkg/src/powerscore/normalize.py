"""Pre-scoring text normalization and reference-guided oracle normalization.

Token cleanup lowercases and strips punctuation from token edges while
keeping internal hyphens and apostrophes, so forms like `face-to-face`
survive for the lexicon to split.  The dialect variant map rewrites single
hypothesis tokens (e.g. British to American spellings).

Oracle normalization rewrites a hypothesis span to the reference surface
form only when the two sides' boundary-stripped phone sequences are
identical, so the rewrite never changes what was plausibly said.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources

from .errors import DictionaryError
from .lexicon import Lexicon
from .phone_align import RecombinedAlignment
from .word_align import AlignLabel

_EDGE_PUNCT = "".join(
    chr(c) for c in range(0x21, 0x7F) if not chr(c).isalnum()
) + "‘’“”–—…¿¡«»"


@dataclass(frozen=True)
class NormRules:
    variant_map: dict[str, str] = field(default_factory=dict)
    fold_case: bool = True
    strip_edge_punct: bool = True


def load_variant_map(path=None) -> dict[str, str]:
    """Load a `variant<TAB>canonical` table; shipped sample when path is None.

    The map must be acyclic: applying it twice equals applying it once.
    """
    if path is None:
        text = resources.files("powerscore.data").joinpath("variants_en.txt").read_text()
    else:
        text = open(path, encoding="utf-8").read()
    table: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split("\t") if "\t" in line else line.split()
        if len(parts) < 2:
            raise DictionaryError(f"variant map line {lineno}: expected `variant<TAB>canonical`")
        table[parts[0].lower()] = parts[1].lower()
    for variant, canonical in table.items():
        if canonical in table and table[canonical] != canonical:
            raise DictionaryError(
                f"variant map is not idempotent: {variant} -> {canonical} -> {table[canonical]}"
            )
    return table


def normalize_tokens(text: str, rules: NormRules, apply_variants: bool = True) -> list[str]:
    """Split a transcript line into normalized scoring tokens."""
    tokens = []
    for raw in text.split():
        tok = raw.lower() if rules.fold_case else raw
        if rules.strip_edge_punct:
            tok = tok.strip(_EDGE_PUNCT)
        if not tok:
            continue
        if apply_variants:
            tok = rules.variant_map.get(tok, tok)
        tokens.append(tok)
    return tokens


def span_phones(words: list[str], lexicon: Lexicon) -> list[str]:
    """Boundary-stripped phone sequence of a word range."""
    phones: list[str] = []
    for word in words:
        phones.extend(lexicon.pronounce(word).phones())
    return phones


def oracle_normalize(
    ref_words: list[str],
    hyp_words: list[str],
    recombined: RecombinedAlignment,
    lexicon: Lexicon,
) -> list[str]:
    """Rewrite hypothesis spans whose pronunciation exactly matches the reference.

    Only substitution and substitution-span units are candidates; the
    reference is never modified.  Idempotent: rewritten spans re-align as
    correct words and are no longer candidates.
    """
    replacements: list[tuple[int, int, list[str]]] = []
    for unit in recombined.units:
        if unit.label not in (AlignLabel.SUB, AlignLabel.SUBSPAN):
            continue
        ref_slice = ref_words[unit.ref_range[0] : unit.ref_range[1]]
        hyp_slice = hyp_words[unit.hyp_range[0] : unit.hyp_range[1]]
        if span_phones(ref_slice, lexicon) == span_phones(hyp_slice, lexicon):
            replacements.append((unit.hyp_range[0], unit.hyp_range[1], ref_slice))
    result = list(hyp_words)
    for start, end, words in reversed(replacements):
        result[start:end] = words
    return result
