from pathlib import Path

import pytest

from hodef.core import load_program

CORPUS = Path(__file__).resolve().parents[1] / "src" / "hodef" / "corpus"


def corpus(name: str):
    return load_program((CORPUS / f"{name}.hodef").read_text())


@pytest.fixture
def ex1():
    return corpus("ex1")


@pytest.fixture
def ex3():
    return corpus("ex3")


def atom(p, text):
    """Typed ground atom parsed in the context of program ``p``."""
    q = load_program(p.source() + f"{text}.\n")
    return q.clauses[-1].head
