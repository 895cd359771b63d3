import numpy as np
import pytest

from acp.ensembles import random_generalized_reflection
from acp.reflections import Reflection


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def reflection_cases(n=6, seed=5):
    """Transpose, dual and one generalized reflection of each sign, all on M_n."""
    r = np.random.default_rng(seed)
    return [
        ("transpose", Reflection.transpose()),
        ("dual", Reflection.dual()),
        ("gen+", random_generalized_reflection(r, n, +1)),
        ("gen-", random_generalized_reflection(r, n, -1)),
    ]


def cplx(rng, n):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


# one line per acceptance criterion, shown in the terminal summary
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
