import pytest

from mcgk.fic.kb import load_kb


@pytest.fixture(autouse=True)
def _no_kb_override(monkeypatch):
    monkeypatch.delenv("MCGK_KB", raising=False)


@pytest.fixture(scope="session")
def kb():
    return load_kb()
