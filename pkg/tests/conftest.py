import pytest

from qdomain import TNorm

SPECS = {
    "godel": TNorm.godel(),
    "lukasiewicz": TNorm.lukasiewicz(),
    "product": TNorm.product(),
    "luk_low_half": TNorm.ordinal_sum((0.0, 0.5, "lukasiewicz")),
    "luk_interior": TNorm.ordinal_sum((0.25, 0.5, "lukasiewicz")),
}
S_SPECS = ("godel", "lukasiewicz", "product", "luk_low_half")


@pytest.fixture(params=sorted(SPECS))
def any_tnorm(request):
    return SPECS[request.param]


@pytest.fixture
def godel():
    return SPECS["godel"]


@pytest.fixture
def luk():
    return SPECS["lukasiewicz"]


@pytest.fixture
def prod():
    return SPECS["product"]


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion(request):
    """Record one pass/fail line per acceptance criterion."""
    def record(number, ok, detail):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
