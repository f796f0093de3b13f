"""Runs every built-in regression check as its own test case.

The same checks back the ``liebau verify`` subcommand; each prints its
measured values in the failure message, so a red test shows the offending
number directly.
"""

import pytest

from liebau.acceptance import CHECKS


@pytest.mark.parametrize("check_id,description,fn", CHECKS, ids=[c[0] for c in CHECKS])
def test_acceptance(check_id, description, fn):
    result = fn()
    assert result.passed, f"{check_id} ({description}): {result.detail}"
