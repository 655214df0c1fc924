import numpy as np
import pytest
from hypothesis import settings

from srstair.srsc import SrscConfig, make_codes

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


# small configurations used across modules
ASYM = SrscConfig(4, 4, 1, 1, 4, 9, 2, 3, w=2, L=6)
TOY_W2 = SrscConfig.symmetric(5, 2, 14, q=2, w=2, L=12)
PLAIN = SrscConfig.symmetric(5, 2, 12, q=1, w=2, L=8)
WIDE_W3 = SrscConfig.symmetric(7, 3, 36, q=2, w=3, L=10)
WIDE_W5 = SrscConfig.symmetric(7, 3, 36, q=2, w=5, L=10)
WAVE = SrscConfig.symmetric(8, 2, 126, q=2, w=2, L=20)


@pytest.fixture(scope="session")
def toy_codes():
    return make_codes(TOY_W2)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


class Gate:
    """Collects one pass/fail line per acceptance criterion."""

    def __init__(self):
        self.lines: dict[int, str] = {}

    def record(self, number: int, ok: bool, title: str, detail: str = "") -> bool:
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title}"
        if detail:
            line += f" -- {detail}"
        self.lines[number] = line
        print(line)
        return ok


GATE = Gate()


@pytest.fixture(scope="session")
def gate():
    return GATE


def pytest_terminal_summary(terminalreporter):
    if GATE.lines:
        terminalreporter.section("acceptance criteria")
        for n in sorted(GATE.lines):
            terminalreporter.write_line(GATE.lines[n])
