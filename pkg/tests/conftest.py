def pytest_terminal_summary(terminalreporter, exitstatus, config):
    # surface the acceptance-criteria lines past output capture
    try:
        from test_acceptance import REPORTED
    except ImportError:
        return
    if REPORTED:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(REPORTED):
            terminalreporter.line(line)
