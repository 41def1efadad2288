from pathlib import Path

import pytest

from ecrkit import load_corpus, load_lexicons, resolve_nested_links

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture
def data_dir():
    return DATA_DIR


@pytest.fixture
def acq_corpus():
    corpus = load_corpus(DATA_DIR / "acquisition_corpus.jsonl")
    resolve_nested_links(corpus)
    return corpus


@pytest.fixture
def lexicons():
    return load_lexicons(DATA_DIR / "vn_map.tsv", DATA_DIR / "alias_map.tsv")
