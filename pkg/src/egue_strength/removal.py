"""Scenario (iii): O removes k0 particles from an m-fermion system.

O = sum_a V_a A_a(k0) maps the m-particle space into the (m - k0)-particle
space.  Particle addition is the same computation read backwards, see
:func:`cumulants_addition`.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import sqrt

from ._exact import sqrt_fraction
from .combinatorics import _b, d_nu, lambda_f, racah_u2
from .errors import ArgumentOutOfRange
from .moments import CumulantSet, MomentSet, cumulants_from_moments

__all__ = [
    "RemovalParams",
    "o_norms_removal",
    "marginal_moments_removal",
    "m11_removal",
    "m31_removal",
    "m13_removal",
    "m22_removal_hybrid",
    "moments_removal",
    "cumulants_removal",
    "cumulants_addition",
]


@dataclass(frozen=True)
class RemovalParams:
    N: int
    m: int
    k: int
    k0: int
    v2_h: Fraction = Fraction(1)
    v2_o: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "v2_h", Fraction(self.v2_h))
        object.__setattr__(self, "v2_o", Fraction(self.v2_o))
        if self.N < 1 or self.k < 1 or self.k0 < 0:
            raise ArgumentOutOfRange(f"need N >= 1, k >= 1, k0 >= 0; got {self}")
        if not (self.k0 <= self.m <= self.N):
            raise ArgumentOutOfRange(f"need k0 <= m <= N; got {self}")
        if self.k > self.m:
            raise ArgumentOutOfRange(f"need k <= m; got {self}")
        if self.v2_h <= 0 or self.v2_o <= 0:
            raise ArgumentOutOfRange("variances v2_h and v2_o must be positive")


def _h2(N: int, m: int, k: int) -> int:
    return lambda_f(N, m, k, 0)


def _h4(N: int, m: int, k: int) -> Fraction:
    hh = _h2(N, m, k)
    s = sum(lambda_f(N, m, k, nu) * lambda_f(N, m, m - k, nu) * d_nu(N, nu)
            for nu in range(m + 1))
    return 2 * hh * hh + Fraction(s, _b(N, m))


def _z(p: RemovalParams, nu: int) -> Fraction:
    N, m, k, k0 = p.N, p.m, p.k, p.k0
    sq = (_b(N, k0) * d_nu(N, nu) * lambda_f(N, m, m - k, nu)
          * lambda_f(N, m - k0, m - k0 - k, nu))
    if sq <= 0:
        return Fraction(0)
    return sqrt_fraction(sq * racah_u2(N, m, m - k0, nu))


def _prefactor(p: RemovalParams) -> Fraction:
    return Fraction(_b(p.N - p.k0, p.m - p.k0), _b(p.N, p.m))


def o_norms_removal(p: RemovalParams) -> tuple[Fraction, Fraction]:
    """(<O^dag O>^m, <O O^dag>^m) = V_O^2 (binom(m, k0), binom(N-m, k0))."""
    return p.v2_o * _b(p.m, p.k0), p.v2_o * _b(p.N - p.m, p.k0)


def marginal_moments_removal(p: RemovalParams) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    """(M20, M40, M02, M04): marginals factorize into <O^dag O> times <H^P>."""
    m00 = o_norms_removal(p)[0]
    v = p.v2_h
    mf = p.m - p.k0
    return (m00 * v * _h2(p.N, p.m, p.k), m00 * v * v * _h4(p.N, p.m, p.k),
            m00 * v * _h2(p.N, mf, p.k), m00 * v * v * _h4(p.N, mf, p.k))


def _zsum(p: RemovalParams, weight=lambda nu: 1) -> Fraction:
    return sum((weight(nu) * _z(p, nu) for nu in range(p.k + 1)), Fraction(0))


def m11_removal(p: RemovalParams) -> Fraction:
    return p.v2_o * p.v2_h * _prefactor(p) * _zsum(p)


def _m31(p: RemovalParams, at: int) -> Fraction:
    N, k = p.N, p.k
    lead = 2 * _h2(N, at, k) * _prefactor(p) * _zsum(p)
    return p.v2_o * p.v2_h ** 2 * (
        lead + _prefactor(p) * _zsum(p, lambda nu: lambda_f(N, at, k, nu)))


def m31_removal(p: RemovalParams) -> Fraction:
    return _m31(p, p.m)


def m13_removal(p: RemovalParams) -> Fraction:
    return _m31(p, p.m - p.k0)


def _third_term_ratio(p: RemovalParams) -> Fraction:
    m, k, k0 = p.m, p.k, p.k0
    den = _b(m, k0) * _b(m - k0, k)
    if not den:
        return Fraction(0)
    return Fraction(_b(m - 2 * k, k0) * _b(m - k, k), den)


def m22_removal_hybrid(p: RemovalParams) -> Fraction:
    """M22 whose Racah-coefficient term takes its dilute-limit value.

    The exact part is the squared Z-sum term.  The substituted third term is
    <O^dag O><H^2>_m<H^2>_(m-k0) binom(m-2k, k0) binom(m-k, k) /
    (binom(m, k0) binom(m-k0, k)).
    """
    N, m, k, k0 = p.N, p.m, p.k, p.k0
    lead = _b(m, k0) * _h2(N, m, k) * _h2(N, m - k0, k)
    zs = _zsum(p)
    exact2 = _prefactor(p) / _b(N, k0) * zs * zs
    return p.v2_o * p.v2_h ** 2 * (lead * (1 + _third_term_ratio(p)) + exact2)


def moments_removal(p: RemovalParams) -> MomentSet:
    m00 = o_norms_removal(p)[0]
    m20, m40, m02, m04 = marginal_moments_removal(p)
    warn = ()
    if m02 == 0:
        warn = ("k exceeds m - k0: final-space moments vanish",)
    return MomentSet(m00=m00, m20=m20, m02=m02, m11=m11_removal(p), m40=m40, m04=m04,
                     m31=m31_removal(p), m13=m13_removal(p), m22=m22_removal_hybrid(p),
                     warnings=warn)


def _asymptotic(p: RemovalParams) -> dict[str, float]:
    m, k, k0 = p.m, p.k, p.k0
    b = _b
    x = b(m - k, k0) * sqrt(Fraction(b(m, k), b(m - k0, k))) / b(m, k0)
    k40 = float(Fraction(b(m - k, k), b(m, k)) - 1)
    k04 = float(Fraction(b(m - k0 - k, k), b(m - k0, k)) - 1)
    k22 = (float(Fraction(b(m, k) * b(m - k, k0) ** 2, b(m - k0, k) * b(m, k0) ** 2))
           + float(_third_term_ratio(p)) - 2 * x * x)
    return {"xi": x, "k40": k40, "k04": k04, "k31": x * k40, "k13": x * k04, "k22": k22}


def _meta(p: RemovalParams, mode: str, scenario: str = "removal") -> dict:
    return {"scenario": scenario, "mode": mode, "n": p.N, "m": p.m, "k": p.k, "k0": p.k0}


def cumulants_removal(p: RemovalParams, mode: str = "exact") -> CumulantSet:
    if mode == "exact":
        return cumulants_from_moments(moments_removal(p), "exact", _meta(p, mode))
    if mode == "asymptotic":
        if p.m - p.k0 < p.k:
            return cumulants_from_moments(moments_removal(p))  # raises DegenerateScenario
        return CumulantSet(**_asymptotic(p), provenance="asymptotic", meta=_meta(p, mode))
    raise ArgumentOutOfRange(f"mode must be 'exact' or 'asymptotic', got {mode!r}")


def cumulants_addition(N: int, m: int, k: int, k0: int, mode: str = "exact") -> CumulantSet:
    """Cumulants for adding k0 particles to an m-particle system.

    The addition operator from m is the adjoint of removal from m + k0, so
    the same moments apply with initial and final roles exchanged.
    """
    c = cumulants_removal(RemovalParams(N, m + k0, k, k0), mode)
    meta = {**_meta(RemovalParams(N, m + k0, k, k0), mode, "addition"), "m": m}
    return CumulantSet(xi=c.xi, k40=c.k04, k04=c.k40, k31=c.k13, k13=c.k31, k22=c.k22,
                       provenance=c.provenance, m22_mode=c.m22_mode, meta=meta)
