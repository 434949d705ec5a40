"""Acceptance suite: every criterion runs at its stated tolerance.

Each test prints one pass/fail line (visible with ``pytest -s`` or on
failure) and asserts the check's verdict.  The checks themselves live in
``volgron.selftest`` and are shared with the ``selftest`` subcommand.
"""

import pytest

from volgron.selftest import ALL_CHECKS


@pytest.mark.parametrize("check", ALL_CHECKS, ids=lambda c: c.__name__)
def test_acceptance(check):
    result = check()
    status = "PASS" if result.passed else "FAIL"
    print(f"[{status}] {result.name}: {result.detail} "
          f"({result.seconds:.2f}s)")
    assert result.passed, f"{result.name}: {result.detail}"
