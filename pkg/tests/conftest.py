import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import golden  # noqa: E402
from ik6rp.io import parse_chain  # noqa: E402


@pytest.fixture(scope="session")
def chain_2rp3r():
    return parse_chain(golden.CHAIN_2RP3R)


@pytest.fixture(scope="session")
def chain_2r2p2r():
    return parse_chain(golden.CHAIN_2R2P2R)


ACCEPTANCE_LINES = []


def record(criterion: str, ok: bool, detail: str):
    line = f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
