"""The library's own invariant suite must pass and report one line each."""

import io

from vorspec import CheckResult, run_checks
from vorspec.checks import ALL_CHECKS


def test_all_invariant_checks_pass():
    buf = io.StringIO()
    assert run_checks(stream=buf) is True
    lines = [line for line in buf.getvalue().strip().split("\n") if line]
    assert len(lines) == len(ALL_CHECKS)
    assert all(line.startswith("PASS ") for line in lines)


def test_check_result_line_format():
    ok = CheckResult(name="parseval", passed=True, measured=1e-15, bound=1e-13)
    assert ok.line().startswith("PASS")
    assert "parseval" in ok.line()
    bad = CheckResult(name="parseval", passed=False, measured=1.0, bound=1e-13)
    assert bad.line().startswith("FAIL")
    assert "1.000e-13" in bad.line()
