import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mubkit import galois  # noqa: E402

# filled by test_acceptance, printed at the end of the session
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


FIELDS = [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2)]


@pytest.fixture(scope="session")
def gf4():
    return galois.galois_field(2, 2)


@pytest.fixture(scope="session")
def z4():
    return galois.ring_mod_n(4)


def structures(kinds=("mod-n", "galois"), max_n=9):
    """Parametrisation helper: (id, structure) for small dimensions."""
    out = []
    if "mod-n" in kinds:
        out += [galois.ring_mod_n(N) for N in range(2, max_n + 1)]
    if "galois" in kinds:
        out += [galois.galois_field(p, m) for p, m in FIELDS if p**m <= max_n]
    return out
