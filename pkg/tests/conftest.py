"""Shared fixtures and the per-criterion acceptance summary."""
import pytest

CRITERIA = {
    1: "d_alpha quadrature vs closed form (rel 1e-8)",
    2: "operator representations agree",
    3: "Stein residual below 1e-4 on the lattice",
    4: "|phi'| <= alpha and |phi''| <= 1.01 eta",
    5: "Hoelder certificate on 1000 random cases",
    6: "sampler: characteristic-function bands and Kolmogorov test",
    7: "Pareto example: slope -1/3 +- 0.15",
    8: "two-power example: slope -0.2 +- 0.15",
    9: "slowly varying example: d_W log n varies < 50%",
    10: "bound dominance, examples 1-4",
    11: "byte-identical bench reports for 1, 4, 16 workers",
}

_outcomes: dict[int, list[str]] = {}
_details: dict[int, list[str]] = {}


@pytest.fixture
def note():
    """note(k, text): attach a measured value to criterion k's summary line."""
    def add(k, text):
        _details.setdefault(int(k), []).append(str(text))
    return add


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(k): test belongs to acceptance criterion k")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    k = int(marker.args[0])
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _outcomes.setdefault(k, []).append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for k, text in CRITERIA.items():
        got = _outcomes.get(k)
        if not got:
            status = "NOT RUN"
        elif all(o == "passed" for o in got):
            status = "PASS"
        elif all(o in ("passed", "skipped") for o in got):
            status = "SKIPPED"
        else:
            status = "FAIL"
        line = f"criterion {k:2d}: {status:7s} {text}"
        if _details.get(k):
            line += "  [" + "; ".join(_details[k]) + "]"
        terminalreporter.write_line(line)
