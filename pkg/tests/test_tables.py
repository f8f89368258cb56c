import time

import pytest

from egue_strength.errors import UnknownTable
from egue_strength.tables import check_table, load_reference, printed_digits


def test_row_counts():
    # the printed first table repeats one parameter row, giving 25 lines
    assert [len(load_reference(w)) for w in (1, 2, 3, 4)] == [25, 15, 14, 15]


@pytest.mark.parametrize("which", [2, 3, 4])
def test_tables_within_tolerance(which):
    rows = check_table(which)
    bad = [(r.key, m) for r in rows for m in r.mismatches + r.rounding_notes]
    assert not bad


def test_first_table_reproduces_printed_digits():
    for row in check_table(1):
        assert row.ok, row.mismatches
        for c in ("xi", "k40", "k31", "k22"):
            assert printed_digits(row.exact[c], 1) == row.reference[c], (row.key, c)
            assert printed_digits(row.asymptotic[c], 1) == row.reference[c + "_asy"], (row.key, c)


def test_double_rounded_cell_is_an_exact_rational():
    # the asymptotic k40 at m=20, k=2 is binom(18,2)/binom(20,2) - 1 = -37/190;
    # the table prints -0.2, i.e. -0.195 rounded again
    from fractions import Fraction
    from egue_strength.spinless import SpinlessParams, cumulants_asymptotic
    c = cumulants_asymptotic(SpinlessParams(40, 20, 2, 1))
    assert c.k40 == pytest.approx(float(Fraction(-37, 190)), abs=1e-15)
    assert printed_digits(c.k40, 1) == -0.2


def test_printed_digits():
    assert printed_digits(-0.2946, 1) == -0.3   # -0.295 then -0.30
    assert printed_digits(-0.2946, 2) == -0.29
    assert printed_digits(0.125, 2) == 0.13


def test_row_filter_and_errors():
    assert [r.key for r in check_table(4, [1, 3])] == [load_reference(4)[0][0], load_reference(4)[2][0]]
    with pytest.raises(UnknownTable):
        check_table(5)
    with pytest.raises(UnknownTable):
        check_table(2, [99])


def test_speed():
    t = time.perf_counter()
    for w in (1, 2, 3, 4):
        check_table(w)
    assert time.perf_counter() - t < 5
