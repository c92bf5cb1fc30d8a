import time

import pytest

_RESULTS = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Record one acceptance verdict, print it, then assert it."""
    store = request.config.stash.setdefault(_RESULTS, [])

    def record(label: str, ok: bool, detail: str, elapsed: float | None = None,
               budget: float | None = None):
        within = elapsed is None or budget is None or elapsed <= budget
        if elapsed is not None:
            detail = f"{detail} [{elapsed:.2f} s, budget {budget:g} s]"
        verdict = "PASS" if ok and within else "FAIL"
        store.append((label, verdict, detail))
        print(f"{verdict} criterion {label}: {detail}")
        assert ok, detail
        assert within, f"runtime {elapsed:.2f} s exceeds {budget:g} s"

    return record


@pytest.fixture
def stopwatch():
    class Watch:
        def __init__(self):
            self.t0 = time.perf_counter()

        @property
        def elapsed(self) -> float:
            return time.perf_counter() - self.t0

    return Watch


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    rows = config.stash.get(_RESULTS, [])
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for label, verdict, detail in rows:
        terminalreporter.write_line(f"{verdict} {label}: {detail}")
