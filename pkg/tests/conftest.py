"""Shared pytest plumbing for the acceptance suite's criterion report."""

CRITERION_RESULTS = {}


def record_criterion(number: int, title: str, passed: bool, detail: str) -> bool:
    """Stash one criterion verdict for the end-of-run report."""
    CRITERION_RESULTS[number] = (title, passed, detail)
    return passed


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not CRITERION_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERION_RESULTS):
        title, passed, detail = CRITERION_RESULTS[number]
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(
            f"criterion {number:2d} [{verdict}] {title}: {detail}"
        )
