import time

ACCEPTANCE_LINES: list[str] = []
SUITE_LIMIT = 120.0
_start = {}


def pytest_sessionstart(session):
    _start["t"] = time.perf_counter()


def pytest_sessionfinish(session, exitstatus):
    elapsed = time.perf_counter() - _start.get("t", time.perf_counter())
    _start["elapsed"] = elapsed
    if elapsed > SUITE_LIMIT and exitstatus == 0:
        session.exitstatus = 1


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
        elapsed = _start.get("elapsed", 0.0)
        status = "PASS" if elapsed <= SUITE_LIMIT else "FAIL"
        terminalreporter.write_line(f"suite time {elapsed:.1f}s (limit {SUITE_LIMIT:.0f}s): {status}")
