import random

import pytest

from hanzisim import chardata


@pytest.fixture(scope="session")
def tables():
    return chardata.load_tables()


@pytest.fixture(scope="session")
def charset(tables):
    return chardata.load_charset(chardata.default_data_dir() / "charset.txt")


@pytest.fixture(scope="session")
def full_chars(tables):
    """Characters present in all four tables, for identity-style properties."""
    return sorted(set(tables.pinyin) & set(tables.fourcorner)
                  & set(tables.decomposition) & set(tables.strokes))


@pytest.fixture()
def rng():
    return random.Random(20240117)
