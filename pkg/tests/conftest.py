def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one pass/fail line per acceptance check at the end of the run."""
    lines = {}
    for outcome, label in (("passed", "PASS"), ("failed", "FAIL"), ("error", "FAIL")):
        for report in terminalreporter.stats.get(outcome, []):
            if "test_acceptance" not in report.nodeid:
                continue
            # setup/teardown reports for a passing test would overwrite the
            # call verdict, so only failures may come from those phases
            if getattr(report, "when", "call") != "call" and label == "PASS":
                continue
            name = report.nodeid.split("::")[-1]
            if lines.get(name) != "FAIL":
                lines[name] = label
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(lines):
        terminalreporter.write_line(f"{lines[name]}  {name}")
