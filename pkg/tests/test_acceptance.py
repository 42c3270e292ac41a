"""The twelve acceptance criteria, one test each, with a PASS/FAIL line per criterion."""

import pytest

from exactwkb.acceptance import ALL

from conftest import LINES


@pytest.mark.parametrize("check", ALL, ids=["c%02d_%s" % (c.number, c.__name__) for c in ALL])
def test_criterion(check):
    r = check()
    LINES.append(r.line())
    print(r.line())
    assert r.passed, r.details
