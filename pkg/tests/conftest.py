import sys


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(lines):
        terminalreporter.write_line(lines[n])
    missing = [n for n in range(1, 10) if n not in lines]
    if missing and len(lines) < 9:
        terminalreporter.write_line(f"not run: criteria {', '.join(map(str, missing))}")
