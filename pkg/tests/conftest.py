import warnings

import numpy as np
import pytest

from srb.tables import default_tables


@pytest.fixture(scope="session")
def tables():
    return default_tables()


@pytest.fixture(scope="session")
def group(tables):
    return tables.group


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def quiet():
    """Silence the fit warnings that shallow synthetic decays trigger."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        yield


_CRITERIA: list[str] = []


@pytest.fixture
def verdict():
    """Record and print one ``criterion N: PASS|FAIL ...`` line."""
    def emit(number: int, ok: bool, detail: str) -> bool:
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} {detail}"
        print(line)
        _CRITERIA.append(line)
        return ok
    return emit


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_CRITERIA, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
