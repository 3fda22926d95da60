import pathlib
import sys

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).parent))

from powerscore.annotate import load_closed_class
from powerscore.corpus_io import ScoringContext
from powerscore.lexicon import load_dictionary
from powerscore.normalize import NormRules

DATA = pathlib.Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def dict_path():
    return DATA / "mini_dict.txt"


@pytest.fixture(scope="session")
def lexicon(dict_path):
    return load_dictionary(dict_path)


@pytest.fixture(scope="session")
def closed_class():
    return load_closed_class()


@pytest.fixture(scope="session")
def ctx(lexicon, closed_class):
    return ScoringContext(lexicon=lexicon, rules=NormRules(), closed_class=closed_class)
