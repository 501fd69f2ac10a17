import sys
from functools import lru_cache

import pytest

from otw.algebra import OddGraphAlgebra
from otw.decomposition import verify_decomposition


@lru_cache(maxsize=None)
def algebra(m: int) -> OddGraphAlgebra:
    return OddGraphAlgebra(m)


@lru_cache(maxsize=None)
def decomposition(m: int):
    """Decomposition with representation blocks filled, plus its report."""
    return verify_decomposition(algebra(m), strict=False)


@pytest.fixture(scope="session")
def alg3():
    return algebra(3)


@pytest.fixture(scope="session")
def alg4():
    return algebra(4)


@pytest.fixture(scope="session")
def dec3():
    return decomposition(3)[0]


@pytest.fixture(scope="session")
def dec4():
    return decomposition(4)[0]


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, text = results[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {text}")
