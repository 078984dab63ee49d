import pytest

from klab import kernels

BACKENDS = sorted(kernels.available_backends())


@pytest.fixture(params=BACKENDS)
def backend(request):
    return kernels.backend(request.param)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one pass/fail line for an acceptance criterion, then assert it."""

    def record(number, ok: bool, detail: str, gating: bool = True):
        status = ("PASS" if ok else "FAIL") if gating else "RECORDED"
        line = f"criterion {number:>2}: {status} - {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        if gating:
            assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split(":")[0].split()[1])):
            terminalreporter.write_line(line)
