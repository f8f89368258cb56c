from fractions import Fraction
from itertools import product

import pytest

from egue_strength import two_species as ts
from egue_strength.combinatorics import lambda_f
from egue_strength.errors import ArgumentOutOfRange
from egue_strength.two_species import TwoSpeciesParams, cumulants_two


def test_operator_norms():
    assert ts.o_norms(TwoSpeciesParams(20, 6, 16, 8, 2, 2))[0] == 91 * 28
    assert ts.o_norms(TwoSpeciesParams(20, 6, 16, 8, 2, 0)) == (1, 1)
    assert ts.o_norms(TwoSpeciesParams(20, 6, 16, 8, 2, 2, v2_o=3))[0] == 3 * 91 * 28


def test_second_moment_of_h():
    p = TwoSpeciesParams(6, 3, 6, 3, 2, 1)
    assert ts.h2_two(p) == 30 + 12 * 12 + 30 == 204
    assert ts.h2_two(TwoSpeciesParams(6, 3, 6, 3, 0, 1, v2_h={(0, 0): 5})) == 5
    w = TwoSpeciesParams(6, 3, 6, 3, 2, 1, v2_h={(2, 0): 2, (1, 1): Fraction(1, 3)})
    assert ts.h2_two(w) == 2 * 30 + Fraction(1, 3) * 144 + 30
    # final space (m1 + k0, m2 - k0)
    assert ts.h2_two(p, at=p.final) == lambda_f(6, 4, 2) + lambda_f(6, 4, 1) * lambda_f(6, 2, 1) + lambda_f(6, 2, 2)


def test_invalid_parameters():
    with pytest.raises(ArgumentOutOfRange):
        TwoSpeciesParams(6, 3, 6, 0, 2, 1)  # k0 > m2
    with pytest.raises(ArgumentOutOfRange):
        TwoSpeciesParams(6, 6, 6, 3, 2, 1)  # no room in species 1
    with pytest.raises(ArgumentOutOfRange):
        TwoSpeciesParams(6, 3, 6, 3, 2, 1, v2_h={(3, 0): 1})


@pytest.mark.parametrize("key,k0,exact,asy", [
    ((20, 8, 20, 8), 2, dict(xi=0.66, k40=-0.34, k31=-0.22, k13=-0.23, k22=-0.01),
     dict(xi=0.76, k31=-0.18, k22=-0.18)),
    ((32, 16, 32, 16), 2, dict(xi=0.78, k40=-0.21, k22=0.06), dict(xi=0.88, k40=-0.12, k22=-0.11)),
    ((44, 10, 58, 20), 2, dict(k22=-0.03), {}),
    ((20, 8, 30, 8), 1, dict(xi=0.83), {}),
    ((36, 8, 36, 8), 1, dict(k31=-0.24, k13=-0.25), {}),
    ((44, 20, 44, 20), 1, dict(xi=0.91), dict(xi=0.95)),
])
def test_published_values(key, k0, exact, asy):
    p = TwoSpeciesParams(*key, k=2, k0=k0)
    for mode, want in (("exact", exact), ("asymptotic", asy)):
        got = cumulants_two(p, mode).values()
        for name, v in want.items():
            tol = 0.01 if name == "k22" and mode == "exact" else 0.005
            assert got[name] == pytest.approx(v, abs=tol), (mode, name)


def test_marginal_factorization():
    for key in [(6, 2, 5, 3, 2, 1), (8, 3, 7, 4, 2, 2), (10, 4, 9, 5, 3, 2)]:
        p = TwoSpeciesParams(*key, v2_h={(0, key[4]): 3})
        ms = ts.moments_two(p)
        norm = ts.o_norms(p)[0]
        assert ms.m00 == norm
        assert ms.m20 == norm * ts.h2_two(p)
        assert ms.m02 == norm * ts.h2_two(p, at=p.final)
        assert ms.m40 == norm * ts.h4_two(p)
        assert ms.m04 == norm * ts.h4_two(p, at=p.final)


def test_species_swap_symmetry():
    for N, m, k in product((5, 7), (2, 3), (1, 2, 3)):
        w = {(i, k - i): Fraction(1 + min(i, k - i)) for i in range(k + 1)}
        a = TwoSpeciesParams(N, m, N + 2, m, k, 1, v2_h=w)
        b = TwoSpeciesParams(N + 2, m, N, m, k, 1, v2_h={(j, i): v for (i, j), v in w.items()})
        assert ts.h2_two(a) == ts.h2_two(b)
        assert ts.h4_two(a) == ts.h4_two(b)


def test_zero_transfer_rank():
    p = TwoSpeciesParams(10, 4, 9, 3, 2, 0)
    ms = ts.moments_two(p)
    assert ms.m20 == ms.m02 and ms.m40 == ms.m04 and ms.m31 == ms.m13
    c = cumulants_two(p, "exact")
    assert c.xi == pytest.approx(1.0, abs=1e-12)
    assert c.k31 == pytest.approx(c.k40, abs=1e-12)


def test_v2_scale_invariance():
    a = cumulants_two(TwoSpeciesParams(12, 4, 12, 5, 2, 1), "exact").values()
    b = cumulants_two(TwoSpeciesParams(12, 4, 12, 5, 2, 1, v2_h={(0, 2): 7, (1, 1): 7, (2, 0): 7},
                                       v2_o=Fraction(2, 3)), "exact").values()
    assert a == pytest.approx(b, abs=1e-12)


def test_dilute_limit_oracle():
    # dilute k40 for N1 = N2 as a rational function of a = m1, b = m2,
    # derived independently from the T/F forms with N -> infinity
    def k40(a, b):
        num = 2 * a ** 3 + 16 * a ** 2 * b - 5 * a ** 2 + 16 * a * b ** 2 - 24 * a * b + 3 * a \
            + 2 * b ** 3 - 5 * b ** 2 + 3 * b
        return -2 * Fraction(num, (a * a + 4 * a * b - a + b * b - b) ** 2)

    for a, b in [(500, 50), (100, 7), (40, 40)]:
        c = cumulants_two(TwoSpeciesParams(10 ** 9, a, 10 ** 9, b, 2, 2), "asymptotic")
        assert c.k40 == pytest.approx(float(k40(a, b)), rel=1e-6)


def test_leading_dilute_law_when_second_species_is_small():
    # -4/m1 is the leading term; with m2 << m1 it is reached closely
    c = cumulants_two(TwoSpeciesParams(10 ** 9, 2000, 10 ** 9, 10, 2, 2), "asymptotic").values()
    for name in ("k40", "k04", "k31", "k13", "k22"):
        assert c[name] == pytest.approx(-4 / 2000, rel=0.02), name
