import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from wpcount.local import global_analysis  # noqa: E402
from wpcount.morphism import load_fixture  # noqa: E402

FIXTURES = ["x1_2", "x1_3", "identity_p11", "identity_p24"]


@pytest.fixture(scope="session")
def specs():
    return {n: load_fixture(n) for n in FIXTURES}


@pytest.fixture(scope="session")
def analyses(specs):
    return {n: global_analysis(s) for n, s in specs.items()}


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
