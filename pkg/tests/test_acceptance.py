"""Full-scale acceptance battery: one PASS/FAIL line per criterion."""
import pytest

from pg3par import suite


@pytest.mark.slow
@pytest.mark.parametrize("number", [c[0] for c in suite.CRITERIA], ids=[c[1] for c in suite.CRITERIA])
def test_criterion(number, capsys):
    res = suite.run_criterion(number, seed=0, scale=1.0)
    with capsys.disabled():
        print("\n" + res.line())
    assert res.ok, res.details
