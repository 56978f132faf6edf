import json
from pathlib import Path

import pytest

from phraserank.corpus import load_dataset

TOY_DIR = Path(__file__).parent / "data" / "toy"


@pytest.fixture(scope="session")
def toy_corpus_path() -> Path:
    return TOY_DIR / "corpus.jsonl"


@pytest.fixture(scope="session")
def toy_manifest() -> dict:
    return json.loads((TOY_DIR / "manifest.json").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def toy_documents(toy_corpus_path):
    return load_dataset(toy_corpus_path)
