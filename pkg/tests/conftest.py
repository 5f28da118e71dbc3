import pytest

# criterion id -> list of (test nodeid, passed)
_CRITERIA: dict[int, list[tuple[str, bool]]] = {}

CRITERION_TITLES = {
    1: "sublinear pi equals segmented sieve",
    2: "T1_H rows 10^4..10^10 within 1e-6",
    3: "T2_K rows 10^4..10^10 within 1e-6",
    4: "T3_L and T4_F (n = 5) rows 10^4..10^10 within 1e-6",
    5: "T5_N3N4 and T7_H2H3 rows 10^4..10^10 within 1e-6",
    6: "sign and monotonicity over the decade grid",
    7: "psi and residual order bounds for 10^3..10^9",
    8: "main-term convergence and O(.) scale",
    9: "DSL equals native evaluators; parser fuzz",
    10: "ExtFloat against arbitrary precision",
    11: "scan and table output independent of thread count",
}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion the test belongs to")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _CRITERIA.setdefault(marker.args[0], []).append((item.nodeid, report.passed))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for cid in sorted(_CRITERIA):
        results = _CRITERIA[cid]
        ok = all(passed for _, passed in results)
        line = f"criterion {cid:>2}: {'PASS' if ok else 'FAIL'}  {CRITERION_TITLES.get(cid, '')}"
        failed = [nodeid.split("::")[-1] for nodeid, passed in results if not passed]
        if failed:
            line += f"  [failing: {', '.join(failed)}]"
        tr.write_line(line)
