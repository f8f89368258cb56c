from fractions import Fraction
from math import comb

import pytest

from egue_strength import spinless
from egue_strength.errors import ArgumentOutOfRange
from egue_strength.moments import HYBRID_M22
from egue_strength.spinless import SpinlessParams, cumulants_asymptotic, cumulants_exact


def test_second_moment():
    assert spinless.h2(SpinlessParams(6, 3, 2, 1)) == 30
    assert spinless.h2(SpinlessParams(20, 10, 2, 1)) == 2970
    assert spinless.h2(SpinlessParams(20, 10, 10, 1)) == comb(20, 10)
    assert spinless.h2(SpinlessParams(6, 3, 2, 1, v2_h=Fraction(1, 2))) == 15


def test_transition_operator_of_rank_zero_gives_full_correlation():
    assert spinless.xi(SpinlessParams(20, 10, 2, 0)) == 1


@pytest.mark.parametrize("key,want", [
    ((20, 10, 2, 1), dict(xi=0.68, k40=-0.54, k31=-0.36, k22=-0.09)),
    ((80, 10, 2, 1), dict(xi=0.78, k40=-0.41, k31=-0.32, k22=-0.23)),
    ((40, 12, 1, 1), dict(k22=-0.02)),
])
def test_exact_cumulants(key, want):
    got = cumulants_exact(SpinlessParams(*key)).values()
    for name, v in want.items():
        tol = 0.01 if name == "k22" else 0.005
        assert got[name] == pytest.approx(v, abs=tol), name


def test_asymptotic_cumulants():
    c = cumulants_asymptotic(SpinlessParams(20, 10, 2, 1))
    # mu40 -> 2 + binom(8,2)/binom(10,2)
    assert c.k40 == pytest.approx(2 + 28 / 45 - 3, abs=1e-12)
    assert c.xi == pytest.approx(0.8, abs=1e-12)
    mu22 = 1 + (36 / 45) ** 2 + comb(7, 2) * 36 / 45 ** 2
    assert c.k22 == pytest.approx(mu22 - 2 * 0.8 ** 2 - 1, abs=1e-12)
    assert round(c.k22, 2) == -0.27
    assert round(c.k31, 2) == -0.3


def test_asymptotic_does_not_depend_on_n():
    a = cumulants_asymptotic(SpinlessParams(20, 10, 2, 1)).values()
    b = cumulants_asymptotic(SpinlessParams(500, 10, 2, 1)).values()
    assert a == pytest.approx(b)


def test_symmetric_marginals():
    ms = spinless.moments(SpinlessParams(30, 10, 2, 1))
    assert ms.m20 == ms.m02 and ms.m40 == ms.m04 and ms.m31 == ms.m13
    assert ms.get(2, 1) == 0


def test_provenance_marker():
    c = cumulants_exact(SpinlessParams(20, 10, 2, 1))
    d = c.as_dict()
    assert d["provenance"] == "exact"
    assert d["m22_mode"] == HYBRID_M22


def test_dilute_limit_k40():
    for k in (2, 3):
        c = cumulants_asymptotic(SpinlessParams(10 ** 6, 1000, k, 1))
        assert c.k40 == pytest.approx(-k * k / 1000, rel=0.01)


def test_boson():
    p = SpinlessParams(5, 4, 2, 1, statistics="boson")
    x = spinless.xi(p)
    assert isinstance(x, Fraction) and 0 < x <= 1
    assert cumulants_exact(p).xi == pytest.approx(float(x))
    # more bosons than orbitals is allowed
    assert 0 < spinless.xi(SpinlessParams(3, 7, 2, 1, statistics="boson")) <= 1
    with pytest.raises(ArgumentOutOfRange):
        SpinlessParams(3, 7, 2, 1)


def test_boson_single_orbital():
    # one orbital: H is a multiple of the identity, so strengths are fully correlated
    c = cumulants_exact(SpinlessParams(1, 5, 2, 1, statistics="boson"))
    assert c.xi == pytest.approx(1.0)


@pytest.mark.parametrize("args", [(6, 1, 2, 1), (6, 3, 2, 7)])
def test_degenerate_case_warns(args):
    ms = spinless.moments(SpinlessParams(*args))
    assert ms.degenerate and ms.warnings
    assert ms.m00 == ms.m20 == ms.m40 == ms.m22 == 0


@pytest.mark.parametrize("args", [(6, 7, 2, 1), (6, 3, -1, 1), (0, 0, 0, 0), (6, 3, 0, 1)])
def test_invalid_parameters(args):
    with pytest.raises(ArgumentOutOfRange):
        SpinlessParams(*args)


def test_variance_scaling():
    a = spinless.moments(SpinlessParams(12, 5, 2, 1))
    b = spinless.moments(SpinlessParams(12, 5, 2, 1, v2_h=Fraction(3), v2_o=Fraction(5)))
    for P, Q in [(0, 0), (2, 0), (1, 1), (4, 0), (3, 1), (2, 2)]:
        assert b.get(P, Q) == 5 * 3 ** ((P + Q) // 2) * a.get(P, Q), (P, Q)
