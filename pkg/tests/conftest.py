import pytest

_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    failed = report.failed
    if report.when == "call" or failed:
        name = report.nodeid.split("::")[-1]
        prev = _ACCEPTANCE.get(name, True)
        _ACCEPTANCE[name] = prev and not failed


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE, key=lambda n: int(n.split("_")[2])):
        verdict = "PASS" if _ACCEPTANCE[name] else "FAIL"
        terminalreporter.write_line(f"{verdict}  {name}")


@pytest.fixture
def timed():
    """Context manager asserting a wall-clock budget in seconds."""
    import time
    from contextlib import contextmanager

    @contextmanager
    def budget(seconds):
        t0 = time.perf_counter()
        yield
        elapsed = time.perf_counter() - t0
        assert elapsed < seconds, f"took {elapsed:.2f} s, budget {seconds} s"

    return budget
