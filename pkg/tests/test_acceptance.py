"""The ten acceptance criteria, each at its stated tolerance and runtime budget."""

import pytest

from satotate_lab import acceptance


@pytest.mark.parametrize("number", [n for n, *_ in acceptance.CRITERIA], ids=lambda n: f"criterion{n}")
def test_criterion(number, capsys):
    result = acceptance.run_criterion(number)
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.line()
