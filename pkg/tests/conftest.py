import pytest


def pytest_configure(config):
    config.addinivalue_line(
        "markers",
        "criterion(num, label): ties a test to one acceptance criterion "
        "so the terminal summary can print a per-criterion verdict",
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is not None and rep.when == "call":
        rep._criterion = (mark.args[0], mark.args[1])


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    seen = {}
    for bucket, verdict in (("passed", "PASS"), ("failed", "FAIL"), ("skipped", "SKIP")):
        for rep in terminalreporter.stats.get(bucket, []):
            crit = getattr(rep, "_criterion", None)
            if crit is None:
                continue
            num, label = crit
            entry = seen.setdefault(num, (label, set()))
            entry[1].add(verdict)
    if not seen:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(seen):
        label, outcomes = seen[num]
        # a criterion spread over several tests fails if any piece fails
        if "FAIL" in outcomes:
            verdict = "FAIL"
        elif "SKIP" in outcomes:
            verdict = "SKIP"
        else:
            verdict = "PASS"
        terminalreporter.write_line(f"criterion {num:2d}: {verdict} - {label}")
