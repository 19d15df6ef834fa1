import numpy as np
import pytest
from hypothesis import strategies as st

from nc_hardy.sampling import random_algebra


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@st.composite
def algebras(draw, max_n=8):
    """Random algebras drawn through the package sampler from a hypothesis seed."""
    n = draw(st.integers(1, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    weights = draw(st.sampled_from(["uniform", "random"]))
    blocks = draw(st.sampled_from(["singletons", "random", "fixed:2"]))
    return random_algebra(n, np.random.default_rng(seed), blocks, weights), seed


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line for an acceptance criterion.

    Call ``criterion(label, ok, detail)``; the line is printed in the terminal
    summary and the test fails when ``ok`` is false.
    """

    def record(label, ok, detail=""):
        ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {label}  {detail}".rstrip())
        assert ok, f"{label}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
