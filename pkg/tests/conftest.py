import pytest


def pytest_terminal_summary(terminalreporter):
    """Print one line per acceptance criterion after the run."""
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        status, detail = RESULTS[number]
        terminalreporter.write_line(f"criterion {number:>2}: {status}  {detail}")


@pytest.fixture
def rng():
    import numpy as np
    return np.random.default_rng(1234)
