"""Scenario (i): H ~ EGUE(k) and an independent Hermitian O ~ EGUE(t).

Both operators act in the same m-particle space of N single-particle states.
A boson variant is obtained through the N -> -N rules of the combinatorics
module.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .combinatorics import _b, binom, d_nu, d_nu_b, lambda_b, lambda_f
from .errors import ArgumentOutOfRange
from .moments import CumulantSet, MomentSet, cumulants_from_moments

__all__ = [
    "SpinlessParams",
    "h2",
    "h4",
    "m11",
    "xi",
    "m31",
    "m22_hybrid",
    "moments",
    "cumulants_exact",
    "cumulants_asymptotic",
]


@dataclass(frozen=True)
class SpinlessParams:
    N: int
    m: int
    k: int
    t: int
    v2_h: Fraction = Fraction(1)
    v2_o: Fraction = Fraction(1)
    statistics: str = "fermion"

    def __post_init__(self):
        object.__setattr__(self, "v2_h", Fraction(self.v2_h))
        object.__setattr__(self, "v2_o", Fraction(self.v2_o))
        if self.statistics not in ("fermion", "boson"):
            raise ArgumentOutOfRange(f"statistics must be 'fermion' or 'boson', got {self.statistics!r}")
        if self.N < 1 or self.m < 0 or self.k < 1 or self.t < 0:
            raise ArgumentOutOfRange(f"need N >= 1, m >= 0, k >= 1, t >= 0; got {self}")
        if self.statistics == "fermion" and self.m > self.N:
            raise ArgumentOutOfRange(f"fermion scenario needs m <= N, got m={self.m}, N={self.N}")
        if self.v2_h <= 0 or self.v2_o <= 0:
            raise ArgumentOutOfRange("variances v2_h and v2_o must be positive")

    @property
    def degenerate(self) -> bool:
        return self.k > self.m or self.t > self.m

    @property
    def boson(self) -> bool:
        return self.statistics == "boson"


class _Space:
    """Lambda, d and dimension for one (N, m) space and statistics."""

    def __init__(self, p: SpinlessParams):
        self.N, self.m = p.N, p.m
        if p.boson:
            self.lam, self.d = lambda_b, d_nu_b
            self.dim = binom(p.N + p.m - 1, p.m)
        else:
            self.lam, self.d = lambda_f, d_nu
            self.dim = binom(p.N, p.m)

    def L(self, r: int, nu: int = 0) -> int:
        return self.lam(self.N, self.m, r, nu)

    def nu_sum(self, *ranks: int) -> Fraction:
        """sum_nu d(nu) prod_r Lambda^nu(r) / dim."""
        total = 0
        for nu in range(self.m + 1):
            term = self.d(self.N, nu)
            for r in ranks:
                term *= self.L(r, nu)
                if not term:
                    break
            total += term
        return Fraction(total, self.dim)


def _plain_h2(p: SpinlessParams) -> int:
    return _Space(p).L(p.k)


def _plain_oo(p: SpinlessParams) -> int:
    return _Space(p).L(p.t)


def h2(p: SpinlessParams) -> Fraction:
    """<H^2>^m = V_H^2 Lambda^0(N, m, k)."""
    return p.v2_h * _plain_h2(p)


def h4(p: SpinlessParams) -> Fraction:
    """<H^4>^m = V_H^4 [2 Lambda^0(k)^2 + sum_nu Lambda^nu(k) Lambda^nu(m-k) d(nu) / dim]."""
    sp = _Space(p)
    hh = sp.L(p.k)
    return p.v2_h ** 2 * (2 * hh * hh + sp.nu_sum(p.k, p.m - p.k))


def m11(p: SpinlessParams) -> Fraction:
    sp = _Space(p)
    return p.v2_o * p.v2_h * sp.nu_sum(p.t, p.m - p.k)


def xi(p: SpinlessParams) -> Fraction:
    """Correlation coefficient; exact rational because M20 = M02 here."""
    den = _plain_oo(p) * _plain_h2(p)
    if den == 0:
        return Fraction(0)
    return (m11(p) / (p.v2_o * p.v2_h)) / den


def m31(p: SpinlessParams) -> Fraction:
    sp = _Space(p)
    core = 2 * sp.L(p.k) * sp.nu_sum(p.t, p.m - p.k) + sp.nu_sum(p.t, p.k, p.m - p.k)
    return p.v2_o * p.v2_h ** 2 * core


def _third_term_ratio(p: SpinlessParams) -> Fraction:
    # asymptotic value of the Racah-coefficient term, normalized by <OO><H^2>^2
    m, k, t = p.m, p.k, p.t
    return Fraction(_b(m - t - k, k) * _b(m - t, k), _b(m, k) ** 2)


def m22_hybrid(p: SpinlessParams) -> Fraction:
    """M22 with the Racah-coefficient term replaced by its dilute-limit value.

    The first two terms are exact.  The third is written as
    <OO><H^2>^2 binom(m-t-k, k) binom(m-t, k) / binom(m, k)^2.
    """
    sp = _Space(p)
    oo, hh = sp.L(p.t), sp.L(p.k)
    lead = oo * hh * hh
    core = lead + sp.nu_sum(p.m - p.t, p.k, p.k) + lead * _third_term_ratio(p)
    return p.v2_o * p.v2_h ** 2 * core


def moments(p: SpinlessParams) -> MomentSet:
    """All stored moments; O is Hermitian so the set is symmetric in P <-> Q."""
    if p.degenerate:
        z = Fraction(0)
        return MomentSet(z, z, z, z, z, z, z, z, z, degenerate=True,
                         warnings=("k or t exceeds m: every moment vanishes",))
    oo = p.v2_o * _plain_oo(p)
    a2, a4 = oo * h2(p), oo * h4(p)
    c11, c31 = m11(p), m31(p)
    return MomentSet(m00=oo, m20=a2, m02=a2, m11=c11, m40=a4, m04=a4,
                     m31=c31, m13=c31, m22=m22_hybrid(p))


def _meta(p: SpinlessParams, mode: str) -> dict:
    return {"scenario": "spinless", "statistics": p.statistics, "mode": mode,
            "n": p.N, "m": p.m, "k": p.k, "t": p.t}


def cumulants_exact(p: SpinlessParams) -> CumulantSet:
    return cumulants_from_moments(moments(p), "exact", _meta(p, "exact"))


def cumulants_asymptotic(p: SpinlessParams) -> CumulantSet:
    """Dilute-limit cumulants; they depend on (m, k, t) only.

    The same expressions are returned for bosons, since they carry no N.
    """
    m, k, t = p.m, p.k, p.t
    if p.degenerate:
        return cumulants_from_moments(moments(p))  # raises DegenerateScenario
    bmk = binom(m, k)
    x = Fraction(binom(m - t, k), bmk)
    k40 = Fraction(binom(m - k, k), bmk) - 1
    if x:
        k22 = x * x * (Fraction(_b(m - k - t, k), _b(m - t, k)) - 1)
    else:
        k22 = Fraction(0)
    k31 = x * k40
    return CumulantSet(xi=float(x), k40=float(k40), k04=float(k40), k31=float(k31),
                       k13=float(k31), k22=float(k22), provenance="asymptotic",
                       meta=_meta(p, "asymptotic"))
