import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from parcohom.corpus import example  # noqa: E402

# (example name, field) pairs: every module the suites sweep over
CORPUS = [
    ("z2-zero", "QQ"),
    ("z2-zero", "GF(2)"),
    ("z2-zero", "GF(3)"),
    ("z2-trivial", "GF(2)"),
    ("z2-trivial", "QQ"),
    ("z2-swap", "QQ"),
    ("z2-swap", "GF(3)"),
    ("z2-regular-1", "GF(2)"),
    ("z3-regular-1", "GF(2)"),
    ("z3-regular-2", "GF(2)"),
    ("z3-regular-2", "QQ"),
    ("z3-character", "GF(7)"),
    ("z4-regular-2", "GF(3)"),
    ("v4-regular-2", "GF(2)"),
    ("s3-cosets-2", "GF(3)"),
    ("s3-cosets-2", "GF(2)"),
    ("two-orbit", "QQ"),
    ("two-orbit", "GF(3)"),
]

TRANSITIVE = [c for c in CORPUS if c[0] != "two-orbit"]

ACCEPTANCE_LINES: list[str] = []


def corpus_id(case):
    return f"{case[0]}@{case[1]}"


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def build(case):
    return example(case[0], case[1])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
