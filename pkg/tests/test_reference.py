import pytest

from reactpatch.errors import ConfigError
from reactpatch.reference import (
    all_pass,
    last_digit_tolerance,
    printed_tolerance,
    reproduce,
    reproduce_sn_two_patch,
)


def test_printed_tolerance():
    # four significant digits dominate when more digits are printed
    assert printed_tolerance(1.1578) == pytest.approx(0.5e-3)
    assert printed_tolerance(10.602) == pytest.approx(0.5e-2)
    assert printed_tolerance(0.0587) == pytest.approx(0.5e-4)
    assert printed_tolerance(0.5) == pytest.approx(0.05)


def test_last_digit_tolerance():
    assert last_digit_tolerance(4.146) == pytest.approx(1e-3)
    assert last_digit_tolerance(0.5561) == pytest.approx(1e-4)


def test_unknown_table():
    with pytest.raises(ConfigError):
        reproduce("table9")


def test_sn_two_patch_records_complete():
    recs = reproduce_sn_two_patch(n_max=2000)
    assert len(recs) == 10
    assert all_pass(recs)
    for r in recs:
        assert r["rel_error"] == pytest.approx(r["error"] / abs(r["published"]))
