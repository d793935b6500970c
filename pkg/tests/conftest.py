import json
from pathlib import Path

import pytest

from dirac_levinson.model import ModelParams, PotentialSpec

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def params():
    return ModelParams()


@pytest.fixture(scope="session")
def golden():
    cases = json.loads((FIXTURES / "golden.json").read_text())
    return {c["case"]: c for c in cases}


def square(v0, a=1.0, lam=1.0):
    return PotentialSpec.square(v0, a=a, lam=lam)


def pytest_terminal_summary(terminalreporter):
    try:
        import test_acceptance
    except ImportError:
        return
    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(line)
