import numpy as np
import pytest

from pcone.sampling import rng_for


@pytest.fixture
def rng(request):
    # one stream per test, stable across runs and test ordering
    key = sum(ord(c) * (i + 1) for i, c in enumerate(request.node.name))
    return rng_for(2024, key)


def offdiag(M):
    return M - np.diag(np.diag(M))


_VERDICTS = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_VERDICTS] = []


@pytest.fixture
def verdict(request):
    """Record one acceptance line and fail the test if any sub-check failed."""
    lines = request.config.stash[_VERDICTS]

    def record(number: int, title: str, failures: list, detail: str = ""):
        status = "PASS" if not failures else "FAIL"
        lines.append((number, f"criterion {number:2d} {status}  {title}  ({detail})"))
        shown = failures[:5] + ([f"... {len(failures) - 5} more"] if len(failures) > 5 else [])
        assert not failures, "; ".join(shown)

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_VERDICTS, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
