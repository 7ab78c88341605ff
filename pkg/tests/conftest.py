"""Collects the acceptance verdicts and prints one line per criterion."""
import pytest

_VERDICTS = {}


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _VERDICTS[props["criterion"]] = (report.outcome, props.get("summary", ""), report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_VERDICTS, key=lambda c: int(c.split()[0])):
        outcome, summary, duration = _VERDICTS[key]
        tag = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{tag}] criterion {key} ({duration:.2f} s) {summary}")


@pytest.fixture
def criterion(record_property):
    """``criterion(label)`` tags the test; ``criterion.summary(text)`` adds evidence."""

    class Tag:
        def __call__(self, label):
            record_property("criterion", label)

        def summary(self, text):
            record_property("summary", text)
            print(text)

    return Tag()
