import math

import numpy as np
import pytest

from khashbound.bounds import (
    BoundReport,
    fk_bound,
    format_table,
    rate_bound_from_Mk,
    round_up,
    table_report,
)

M5 = 15 * (48 + math.sqrt(5)) / 1936


@pytest.mark.parametrize("k, shown", [(5, 0.192), (6, 0.092593), (7, 0.04284), (8, 0.019227)])
def test_fk_bound_rounded(k, shown):
    assert float(round_up(fk_bound(k))) == shown
    assert fk_bound(k) == pytest.approx(math.factorial(k) / k ** (k - 1), abs=1e-12)


def test_fk_bound_integrality():
    for k in range(2, 12):
        scaled = fk_bound(k) * k ** (k - 1)
        assert scaled == pytest.approx(math.factorial(k), rel=1e-6)
    with pytest.raises(ValueError):
        fk_bound(1)


def test_rate_bound_values():
    assert rate_bound_from_Mk(5, M5) == pytest.approx(0.169639, abs=1e-6)
    assert rate_bound_from_Mk(5, 0.3892257) <= 0.1697
    assert rate_bound_from_Mk(6, 24 / 125) == pytest.approx(0.087591, abs=1e-6)
    assert rate_bound_from_Mk(6, 1e15) == pytest.approx(1.0, abs=1e-12)


def test_rate_bound_errors():
    with pytest.raises(ValueError):
        rate_bound_from_Mk(3, 0.5)
    with pytest.raises(ValueError):
        rate_bound_from_Mk(5, 0.0)


def test_rate_bound_increasing_in_mk():
    mks = np.sort(np.random.default_rng(0).uniform(0.01, 2, 500))
    vals = [rate_bound_from_Mk(5, m) for m in mks]
    assert all(a < b for a, b in zip(vals, vals[1:]))


def test_round_up():
    assert round_up(0.192) == "0.19200"
    assert round_up(0.1696388) == "0.16964"
    assert round_up(0.0875912, 3) == "0.0876"
    assert round_up(0.192000001) == "0.19201"


def test_table_rows():
    (r5,) = table_report(5, 5)
    assert r5.fk_bound == pytest.approx(0.192, abs=1e-15)
    assert r5.new_bound == pytest.approx(0.169639, abs=1e-6)
    rows = table_report(5, 6)
    assert [r.k for r in rows] == [5, 6]
    assert all(r.new_bound < r.fk_bound and r.certified for r in rows)
    assert rows[1].fk_bound == pytest.approx(0.092593, abs=1e-6)
    assert rows[1].new_bound == pytest.approx(0.087591, abs=1e-6)


def test_report_formula_invariant():
    for r in table_report(5, 7):
        expected = 1 / (2 / r.M_k + 1 / math.log2(r.k / (r.k - 3)))
        assert r.new_bound == pytest.approx(expected, abs=1e-12)
        assert r.certified == (r.k in (5, 6))


def test_table_range_errors():
    with pytest.raises(ValueError):
        table_report(4, 6)
    with pytest.raises(ValueError):
        table_report(6, 5)
    with pytest.raises(ValueError):
        table_report(5, 10)


def test_stated_mismatch_flags_k6_only():
    r5, r6 = table_report(5, 6)
    assert not r5.stated_mismatch
    assert r6.stated_mismatch


def test_format_table_alignment_and_literature():
    rows = table_report(5, 6)
    text = format_table(rows, literature=True)
    lines = text.splitlines()
    assert len({len(line) for line in lines[:3]}) == 1
    assert "not computed" in lines[0]
    assert "0.19079" in lines[1]
    assert any(line.startswith("note: k=6") for line in lines)


def test_report_serialization_keys():
    r = BoundReport(5, 0.192, 0.38, 0.17, True)
    assert list(r.to_dict()) == ["k", "fk_bound", "M_k", "new_bound", "certified"]
