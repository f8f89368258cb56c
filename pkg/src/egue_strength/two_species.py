"""Scenario (ii): two species with a transfer operator of beta-decay type.

H conserves (m1, m2) and is a sum over partitions i + j = k of independent
GUEs V(i, j) acting i-body on species 1 and j-body on species 2.  O(k0) moves
k0 particles from species 2 into species 1, so the final space is
(m1 + k0, m2 - k0).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import sqrt

from .combinatorics import _b, d_nu, lambda_f, racah_u2
from .errors import ArgumentOutOfRange
from .moments import CumulantSet, MomentSet, cumulants_from_moments
from ._exact import sqrt_fraction

__all__ = [
    "TwoSpeciesParams",
    "o_norms",
    "h2_two",
    "h4_two",
    "m11_two",
    "m31_two",
    "m13_two",
    "m22_two_hybrid",
    "moments_two",
    "cumulants_two",
]

Partition = tuple[int, int]


@dataclass(frozen=True)
class TwoSpeciesParams:
    N1: int
    m1: int
    N2: int
    m2: int
    k: int
    k0: int
    v2_h: dict[Partition, Fraction] | None = field(default=None, hash=False)
    v2_o: Fraction = Fraction(1)

    def __post_init__(self):
        N1, m1, N2, m2, k, k0 = self.N1, self.m1, self.N2, self.m2, self.k, self.k0
        if min(N1, N2) < 1 or min(m1, m2, k, k0) < 0:
            raise ArgumentOutOfRange(f"negative or empty argument in {self.label()}")
        if m1 > N1 or m2 > N2:
            raise ArgumentOutOfRange(f"need m1 <= N1 and m2 <= N2 in {self.label()}")
        if k0 > m2 or m1 + k0 > N1:
            raise ArgumentOutOfRange(f"need k0 <= m2 and m1 + k0 <= N1 in {self.label()}")
        weights = {(i, k - i): Fraction(1) for i in range(k + 1)}
        if self.v2_h is not None:
            extra = set(self.v2_h) - set(weights)
            if extra:
                raise ArgumentOutOfRange(f"v2_h keys {sorted(extra)} are not partitions of k={k}")
            weights.update({key: Fraction(v) for key, v in self.v2_h.items()})
        if any(v <= 0 for v in weights.values()):
            raise ArgumentOutOfRange("v2_h entries must be positive")
        object.__setattr__(self, "v2_h", weights)
        object.__setattr__(self, "v2_o", Fraction(self.v2_o))
        if self.v2_o <= 0:
            raise ArgumentOutOfRange("v2_o must be positive")

    def label(self) -> str:
        return (f"(N1={self.N1}, m1={self.m1}, N2={self.N2}, m2={self.m2}, "
                f"k={self.k}, k0={self.k0})")

    @property
    def partitions(self) -> list[Partition]:
        return [(i, self.k - i) for i in range(self.k + 1)]

    @property
    def final(self) -> tuple[int, int]:
        return self.m1 + self.k0, self.m2 - self.k0


def _lam_sum(N: int, m: int, r1: int, r2: int) -> Fraction:
    """sum_nu Lambda^nu(N, m, m - r1) Lambda^nu(N, m, r2) d(N, nu) / binom(N, m)."""
    total = 0
    for nu in range(min(r1, m) + 1):
        total += lambda_f(N, m, m - r1, nu) * lambda_f(N, m, r2, nu) * d_nu(N, nu)
    return Fraction(total, _b(N, m))


def _x11(N: int, m: int, k0: int, i: int, nu: int) -> Fraction:
    # reduced element linking the m and m + k0 spaces of one species
    sq = (_b(N, k0) * d_nu(N, nu) * lambda_f(N, m, m - i, nu)
          * lambda_f(N, m + k0, m + k0 - i, nu))
    if sq <= 0:
        return Fraction(0)
    return sqrt_fraction(sq * racah_u2(N, m + k0, m, nu))


class _Sums:
    """Cached reduced sums for one parameter set."""

    def __init__(self, p: TwoSpeciesParams):
        self.p = p

    @cached_property
    def x(self) -> dict[tuple[int, int], Fraction]:
        p = self.p
        return {(i, nu): _x11(p.N1, p.m1, p.k0, i, nu)
                for i in range(p.k + 1) for nu in range(i + 1)}

    @cached_property
    def y(self) -> dict[tuple[int, int], Fraction]:
        p = self.p
        return {(j, nu): _x11(p.N2, p.m2 - p.k0, p.k0, j, nu)
                for j in range(p.k + 1) for nu in range(j + 1)}

    def sx(self, i: int) -> Fraction:
        return sum((self.x[i, nu] for nu in range(i + 1)), Fraction(0))

    def sy(self, j: int) -> Fraction:
        return sum((self.y[j, nu] for nu in range(j + 1)), Fraction(0))

    @cached_property
    def scale(self) -> Fraction:
        # binom(N1-k0, m1) binom(N2-k0, m2-k0) / (binom(N1, m1) binom(N2, m2))
        p = self.p
        return Fraction(_b(p.N1 - p.k0, p.m1) * _b(p.N2 - p.k0, p.m2 - p.k0),
                        _b(p.N1, p.m1) * _b(p.N2, p.m2))


def o_norms(p: TwoSpeciesParams) -> tuple[Fraction, Fraction]:
    """(<O^dag O> in the initial space, <O O^dag> in the final space)."""
    mf1, mf2 = p.final
    return (p.v2_o * _b(p.N1 - p.m1, p.k0) * _b(p.m2, p.k0),
            p.v2_o * _b(mf1, p.k0) * _b(p.N2 - mf2, p.k0))


def h2_two(p: TwoSpeciesParams, at: tuple[int, int] | None = None) -> Fraction:
    a, c = at if at is not None else (p.m1, p.m2)
    return sum((v * lambda_f(p.N1, a, i, 0) * lambda_f(p.N2, c, j, 0)
                for (i, j), v in p.v2_h.items()), Fraction(0))


def h4_two(p: TwoSpeciesParams, at: tuple[int, int] | None = None) -> Fraction:
    a, c = at if at is not None else (p.m1, p.m2)
    hh = h2_two(p, (a, c))
    total = 2 * hh * hh
    for (i, j), v in p.v2_h.items():
        for (i2, j2), w in p.v2_h.items():
            total += v * w * _lam_sum(p.N1, a, i, i2) * _lam_sum(p.N2, c, j, j2)
    return total


def _m11_core(p: TwoSpeciesParams, s: _Sums) -> Fraction:
    return s.scale * sum((v * s.sx(i) * s.sy(j) for (i, j), v in p.v2_h.items()),
                         Fraction(0))


def m11_two(p: TwoSpeciesParams) -> Fraction:
    return p.v2_o * _m11_core(p, _Sums(p))


def _m31_core(p: TwoSpeciesParams, s: _Sums, final: bool) -> Fraction:
    N1, N2, k0 = p.N1, p.N2, p.k0
    a, c = p.final if final else (p.m1, p.m2)
    lead = 2 * h2_two(p, (a, c)) * _m11_core(p, s)
    acc = Fraction(0)
    for (i1, j1), v in p.v2_h.items():
        for (i2, j2), w in p.v2_h.items():
            f1 = sum((lambda_f(N1, a, i2, nu) * s.x[i1, nu] for nu in range(i1 + 1)), Fraction(0))
            if not f1:
                continue
            f2 = sum((lambda_f(N2, c, j2, nu) * s.y[j1, nu] for nu in range(j1 + 1)), Fraction(0))
            acc += v * w * f1 * f2
    return lead + s.scale * acc


def m31_two(p: TwoSpeciesParams) -> Fraction:
    return p.v2_o * _m31_core(p, _Sums(p), final=False)


def m13_two(p: TwoSpeciesParams) -> Fraction:
    return p.v2_o * _m31_core(p, _Sums(p), final=True)


def _t(N: int, m: int, i: int) -> int:
    return _b(m, i) * _b(N, i)


def _f(N: int, m: int, i: int, j: int) -> int:
    return _b(m, i) * _b(m - i, j) * _b(N, i) * _b(N, j)


def _third_term_ratio(p: TwoSpeciesParams) -> Fraction:
    """Dilute-limit Racah-coefficient term of M22 relative to <O^dag O><H^2>_i<H^2>_f."""
    mf1, mf2 = p.final
    n_a = sum((v * _t(p.N1, p.m1, i) * _t(p.N2, p.m2, j) for (i, j), v in p.v2_h.items()),
              Fraction(0))
    n_b = sum((v * _t(p.N1, mf1, i) * _t(p.N2, mf2, j) for (i, j), v in p.v2_h.items()),
              Fraction(0))
    acc = Fraction(0)
    for (i1, j1), v in p.v2_h.items():
        for (i2, j2), w in p.v2_h.items():
            acc += (v * w * _b(p.m2 - j1 - j2, p.k0) * _f(p.N1, p.m1, i1, i2)
                    * _f(p.N2, p.m2, j1, j2))
    if not n_a or not n_b:
        return Fraction(0)
    return acc / (_b(p.m2, p.k0) * n_a * n_b)


def m22_two_hybrid(p: TwoSpeciesParams) -> Fraction:
    """M22 with its Racah-coefficient term replaced by the dilute-limit form.

    Term 1 is <O^dag O><H^2>_i<H^2>_f, term 2 the exact product of X and Y
    sums, term 3 term 1 times :func:`_third_term_ratio`.
    """
    s = _Sums(p)
    oo = _b(p.N1 - p.m1, p.k0) * _b(p.m2, p.k0)
    lead = oo * h2_two(p) * h2_two(p, p.final)
    cross = Fraction(0)
    for (i1, j1), v in p.v2_h.items():
        for (i2, j2), w in p.v2_h.items():
            cross += v * w * s.sx(i1) * s.sx(i2) * s.sy(j1) * s.sy(j2)
    cross *= s.scale / (_b(p.N1, p.k0) * _b(p.N2, p.k0))
    return p.v2_o * (lead * (1 + _third_term_ratio(p)) + cross)


def moments_two(p: TwoSpeciesParams) -> MomentSet:
    s = _Sums(p)
    m00 = o_norms(p)[0]
    if m00 == 0:
        z = Fraction(0)
        return MomentSet(z, z, z, z, z, z, z, z, z, degenerate=True,
                         warnings=("transfer operator annihilates the initial space",))
    return MomentSet(
        m00=m00,
        m20=m00 * h2_two(p),
        m02=m00 * h2_two(p, p.final),
        m11=p.v2_o * _m11_core(p, s),
        m40=m00 * h4_two(p),
        m04=m00 * h4_two(p, p.final),
        m31=p.v2_o * _m31_core(p, s, final=False),
        m13=p.v2_o * _m31_core(p, s, final=True),
        m22=m22_two_hybrid(p),
    )


def _asymptotic(p: TwoSpeciesParams) -> dict[str, float]:
    N1, N2, k0 = p.N1, p.N2, p.k0
    (m1, m2), (f1, f2) = (p.m1, p.m2), p.final
    V = p.v2_h
    pairs = [(a, b) for a in V for b in V]
    s_a = sum(V[i, j] * _t(N1, m1, i) * _t(N2, m2, j) for i, j in V)
    s_b = sum(V[i, j] * _t(N1, f1, i) * _t(N2, f2, j) for i, j in V)
    bm = _b(m2, k0)
    s_a, s_b = float(s_a), float(s_b)
    root = sqrt(s_a * s_b)
    x = float(sum(V[i, j] * _b(m2 - j, k0) * _t(N1, m1, i) * _t(N2, m2, j)
                  for i, j in V)) / (bm * root)
    k40 = float(sum(V[a] * V[b] * _f(N1, m1, a[0], b[0]) * _f(N2, m2, a[1], b[1])
                    for a, b in pairs)) / s_a ** 2 - 1
    k04 = float(sum(V[a] * V[b] * _f(N1, f1, a[0], b[0]) * _f(N2, f2, a[1], b[1])
                    for a, b in pairs)) / s_b ** 2 - 1
    k31 = float(sum(V[a] * V[b] * _b(m2 - a[1], k0) * _f(N1, m1, a[0], b[0])
                    * _f(N2, m2, a[1], b[1]) for a, b in pairs)) / (bm * s_a * root) - x
    k13 = float(sum(
        V[a] * V[b] * _b(m2 - b[1], k0) * _t(N1, m1, b[0]) * _t(N2, m2, b[1])
        * _b(N1, a[0]) * _b(f1 - b[0], a[0]) * _b(N2, a[1]) * _b(f2 - b[1], a[1])
        for a, b in pairs)) / (bm * s_b * root) - x
    k22 = float(sum(
        V[a] * V[b] * _b(m2 - a[1] - b[1], k0)
        * (_t(N1, m1, a[0]) * _t(N1, m1, b[0]) * _t(N2, m2, a[1]) * _t(N2, m2, b[1])
           + _f(N1, m1, a[0], b[0]) * _f(N2, m2, a[1], b[1]))
        for a, b in pairs)) / (bm * s_a * s_b) - 2 * x * x
    return {"xi": x, "k40": k40, "k04": k04, "k31": k31, "k13": k13, "k22": k22}


def _meta(p: TwoSpeciesParams, mode: str) -> dict:
    meta = {"scenario": "two-species", "mode": mode, "n1": p.N1, "m1": p.m1,
            "n2": p.N2, "m2": p.m2, "k": p.k, "k0": p.k0}
    if any(v != 1 for v in p.v2_h.values()):
        meta["v2_h"] = ";".join(f"{i},{j},{v}" for (i, j), v in sorted(p.v2_h.items()))
    return meta


def cumulants_two(p: TwoSpeciesParams, mode: str = "exact") -> CumulantSet:
    """Cumulants in ``"exact"`` (finite N, hybrid k22) or ``"asymptotic"`` mode.

    The asymptotic mode keeps the binom(N, i) weights of the dilute-limit
    sums, so it still depends on N1 and N2 through the partition weights.
    """
    if mode == "exact":
        return cumulants_from_moments(moments_two(p), "exact", _meta(p, mode))
    if mode == "asymptotic":
        if moments_two(p).degenerate:
            return cumulants_from_moments(moments_two(p))
        return CumulantSet(**_asymptotic(p), provenance="asymptotic", meta=_meta(p, mode))
    raise ArgumentOutOfRange(f"mode must be 'exact' or 'asymptotic', got {mode!r}")
