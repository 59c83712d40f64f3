import sys


def pytest_terminal_summary(terminalreporter):
    """Echo the acceptance-criterion pass/fail lines, one per criterion."""
    lines = []
    for name, mod in sys.modules.items():
        if name.rpartition(".")[2] == "test_acceptance":
            lines = getattr(mod, "CRITERION_LINES", [])
            break
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in lines:
        terminalreporter.write_line(line)
