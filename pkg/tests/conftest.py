import numpy as np
import pytest

from sykbarvinok.majorana import SparseOperator


def random_operator(rng, n, terms, even=True):
    """Random sparse operator with ``terms`` strings (even weight when ``even``)."""
    masks = []
    while len(masks) < terms:
        m = int(rng.integers(0, 1 << n))
        if even and bin(m).count("1") % 2:
            continue
        masks.append(m)
    coeffs = rng.normal(size=terms) + 1j * rng.normal(size=terms)
    return SparseOperator(n, np.array(masks, dtype=np.uint64), coeffs)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def accept():
    """Record and print one pass/fail line for an acceptance criterion, then assert it."""

    def record(number: int, title: str, ok: bool, detail: str, *, advisory: str = ""):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d} {title}: {detail}"
        if advisory:
            line += f" | advisory: {advisory}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
