import sys
from pathlib import Path


sys.path.insert(0, str(Path(__file__).resolve().parent))

_results = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(label): acceptance suite entry")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if call.when == "call" or (call.when == "setup" and call.excinfo is not None):
        _results.append((marker.args[0], call.excinfo is None, call.duration))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance suite")
    for label, ok, duration in _results:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}  ({duration:.2f}s)")
