import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from arbcone.market import parse_market  # noqa: E402


def market_doc(payoffs, prices=("1",), rate="0", probs=("1/2", "1/2")):
    return {
        "interest_rate": rate,
        "prices": list(prices),
        "scenarios": [
            {"probability": p, "payoffs": [row[w] for row in payoffs]} for w, p in enumerate(probs)
        ],
    }


@pytest.fixture
def fair_market():
    return parse_market(market_doc([["2", "1/2"]]))


@pytest.fixture
def arbitrage_market():
    return parse_market(market_doc([["2", "3/2"]]))


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_line():
    def record(label: str, ok: bool, detail: str = "") -> None:
        line = f"[{'PASS' if ok else 'FAIL'}] {label}" + (f" -- {detail}" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
