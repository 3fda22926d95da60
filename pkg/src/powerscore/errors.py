"""Exception types shared across the package."""


class PowerscoreError(Exception):
    """Base class for errors raised by this package."""


class DictionaryError(PowerscoreError):
    """Fatal problem loading a pronunciation dictionary or data table."""


class PhonemeError(PowerscoreError):
    """A phone symbol is not part of the fixed inventory."""


class CorpusError(PowerscoreError):
    """Fatal problem in reference/hypothesis corpus input."""


class InternalInvariantError(PowerscoreError):
    """An internal consistency check failed; indicates a bug, not bad input."""
