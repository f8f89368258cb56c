"""Exact binomial building blocks for EGUE moment formulas.

Everything here returns Python ``int`` or ``fractions.Fraction`` so that moment
sums are carried out without rounding.  Floating conversion is left to the
callers that form cumulants.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, isqrt

from .errors import ArgumentOutOfRange, NegativeUpperIndex

__all__ = [
    "LambdaArgs",
    "binom",
    "lambda_f",
    "d_nu",
    "lambda_b",
    "d_nu_b",
    "racah_u2",
    "racah_u2_boson",
    "racah_u_abs",
    "exact_sqrt",
]


def binom(n: int, r: int) -> int:
    """Binomial coefficient with ``binom(n, r) = 0`` outside ``0 <= r <= n``.

    A negative upper index is rejected: boson formulas are written with
    positive binomials instead of relying on ``n < 0`` extensions.
    """
    if n < 0:
        raise NegativeUpperIndex(f"binom: upper index {n} is negative")
    if r < 0 or r > n:
        return 0
    return comb(n, r)


def _b(n: int, r: int) -> int:
    # zero for any out-of-range argument, including n < 0
    if n < 0 or r < 0 or r > n:
        return 0
    return comb(n, r)


@dataclass(frozen=True)
class LambdaArgs:
    N_prime: int
    m_prime: int
    r: int
    mu: int


def lambda_f(N: int | LambdaArgs, m: int | None = None, r: int | None = None,
             mu: int = 0) -> int:
    """Fermion Lambda^mu(N', m', r) = binom(m'-mu, r) * binom(N'-m'+r-mu, r).

    Accepts either four integers or a :class:`LambdaArgs`.  Out-of-range
    combinations give 0.
    """
    if isinstance(N, LambdaArgs):
        N, m, r, mu = N.N_prime, N.m_prime, N.r, N.mu
    assert m is not None and r is not None
    if m - mu < 0 or N - m + r - mu < 0:
        return 0
    return _b(m - mu, r) * _b(N - m + r - mu, r)


def d_nu(N: int, nu: int) -> int:
    """Dimension of the U(N) irrep {2^nu 1^(N-2nu)}."""
    return _b(N, nu) ** 2 - _b(N, nu - 1) ** 2


def lambda_b(N: int, m: int, r: int, nu: int = 0) -> int:
    """Boson Lambda_B^nu(N, m, r) = binom(m-nu, r) * binom(N+m+nu-1, r)."""
    if m - nu < 0:
        return 0
    return _b(m - nu, r) * _b(N + m + nu - 1, r)


def d_nu_b(N: int, nu: int) -> int:
    """Boson counterpart of :func:`d_nu` (irrep {2nu, nu^...} of U(N))."""
    if nu < 0:
        return 0
    return _b(N + nu - 1, nu) ** 2 - _b(N + nu - 2, nu - 1) ** 2


def _check_u2(N: int, m: int, p: int, nu: int, boson: bool) -> None:
    if N < 1 or m < 0 or p < 0 or p > m or nu < 0:
        raise ArgumentOutOfRange(f"racah_u2: invalid arguments N={N}, m={m}, p={p}, nu={nu}")
    if not boson and m > N:
        raise ArgumentOutOfRange(f"racah_u2: m={m} exceeds N={N}")


def racah_u2(N: int, m: int, p: int, nu: int) -> Fraction:
    """Square of the U(N) Racah coefficient for fermions.

    Returns 0 for ``nu > p``.  For fixed (N, m, p) the values sum to 1 over nu.
    """
    _check_u2(N, m, p, nu, boson=False)
    num = (_b(N + 1, nu) ** 2 * _b(m - nu, p - nu) * _b(N - nu - p, m - p)
           * (N - 2 * nu + 1))
    den = _b(N - m + p, p) ** 2 * _b(N, m - p) * (N + 1)
    return Fraction(num, den)


def racah_u2_boson(N: int, m: int, p: int, nu: int) -> Fraction:
    """Boson counterpart of :func:`racah_u2`; ``m`` may exceed ``N``.

    For N = 1 only the symmetric irrep exists, so the nu = 0 term carries
    all the weight (the general formula has a vanishing N - 1 denominator).
    """
    _check_u2(N, m, p, nu, boson=True)
    if N == 1:
        return Fraction(1 if nu == 0 else 0)
    num = (_b(N + nu - 2, nu) ** 2 * _b(m - nu, p - nu) * _b(N + m + nu - 1, m - p)
           * (N + 2 * nu - 1))
    den = _b(N + m - 1, p) ** 2 * _b(N + m - p - 1, m - p) * (N - 1)
    return Fraction(num, den)


def exact_sqrt(x: Fraction | int) -> Fraction:
    """Square root of a non-negative rational that is a perfect square.

    Raises ``ValueError`` otherwise; callers use it where the closed forms
    guarantee a rational root.
    """
    x = Fraction(x)
    if x < 0:
        raise ValueError(f"exact_sqrt of negative value {x}")
    a, b = isqrt(x.numerator), isqrt(x.denominator)
    if a * a != x.numerator or b * b != x.denominator:
        raise ValueError(f"{x} is not the square of a rational")
    return Fraction(a, b)


def racah_u_abs(N: int, m: int, p: int, nu: int) -> float:
    """Magnitude |U| of the fermion Racah coefficient (no phase is tracked)."""
    u2 = racah_u2(N, m, p, nu)
    try:
        return float(exact_sqrt(u2))
    except ValueError:
        return float(u2) ** 0.5
