from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

FIXTURES = Path(__file__).resolve().parent.parent / "src" / "typedgraph" / "fixtures"


@pytest.fixture
def fixtures() -> Path:
    return FIXTURES


def read(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")
