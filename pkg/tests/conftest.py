from __future__ import annotations

import sys
from pathlib import Path

import pytest
from hypothesis import settings

HERE = Path(__file__).resolve().parent
FIXTURES = HERE / "fixtures"
sys.path.insert(0, str(HERE))

settings.register_profile("repo", deadline=None, max_examples=60)
settings.load_profile("repo")


@pytest.fixture
def fixtures() -> Path:
    return FIXTURES


def read_fixture(*parts) -> str:
    return FIXTURES.joinpath(*parts).read_text(encoding="utf-8")
