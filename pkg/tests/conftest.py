from __future__ import annotations

from pathlib import Path

import pytest

from erdmc.model import ERModel
from erdmc.parser import parse_model

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def teaching_source() -> str:
    return (FIXTURES / "teaching.erdm").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def teaching_model(teaching_source: str) -> ERModel:
    return parse_model(teaching_source)


@pytest.fixture(scope="session")
def golden_scheme_text() -> str:
    return (FIXTURES / "teaching_scheme.txt").read_text(encoding="utf-8")
