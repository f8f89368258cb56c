"""Moment and cumulant containers shared by the three scenarios."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from .errors import DegenerateScenario

HYBRID_M22 = "hybrid-asymptotic-third-term"

# (P, Q) labels of the stored even moments
MOMENT_KEYS = ("m00", "m20", "m02", "m11", "m40", "m04", "m31", "m13", "m22")


@dataclass(frozen=True)
class MomentSet:
    """Ensemble-averaged bivariate moments M_PQ with P + Q even and at most 4.

    ``M_PQ`` is the average of Tr[O^dag H_f^Q O H_i^P] / d_i.  Values are exact
    rationals that already include the V_H^(P+Q) V_O^2 scale.  Odd moments
    vanish and are not stored.
    """

    m00: Fraction
    m20: Fraction
    m02: Fraction
    m11: Fraction
    m40: Fraction
    m04: Fraction
    m31: Fraction
    m13: Fraction
    m22: Fraction
    m22_mode: str = HYBRID_M22
    degenerate: bool = False
    warnings: tuple[str, ...] = ()

    def get(self, p: int, q: int) -> Fraction:
        """Return M_pq, including the vanishing odd ones."""
        if (p + q) % 2:
            return Fraction(0)
        return getattr(self, f"m{p}{q}")

    def as_dict(self) -> dict[str, Fraction]:
        return {k: getattr(self, k) for k in MOMENT_KEYS}


@dataclass(frozen=True)
class CumulantSet:
    """Correlation coefficient and reduced fourth-order cumulants."""

    xi: float
    k40: float
    k04: float
    k31: float
    k13: float
    k22: float
    provenance: str = "exact"
    m22_mode: str = HYBRID_M22
    meta: dict = field(default_factory=dict, compare=False)

    def values(self) -> dict[str, float]:
        return {k: getattr(self, k) for k in ("xi", "k40", "k04", "k31", "k13", "k22")}

    def as_dict(self) -> dict:
        d = asdict(self)
        meta = d.pop("meta")
        return {**meta, **d}


def _fsqrt(x: Fraction) -> float:
    # float(Fraction) is correctly rounded, so this loses at most an ulp or two
    return math.sqrt(float(x))


def cumulants_from_moments(ms: MomentSet, provenance: str = "exact",
                           meta: dict | None = None) -> CumulantSet:
    """Reduce a :class:`MomentSet` to xi and k_rs.

    Scaled moments are mu_PQ = (M_PQ/M_00) / (sigma_i^P sigma_f^Q) with
    sigma^2 the normalized second moments.  The rational parts (k40, k04,
    k22) stay exact up to the final conversion; xi, k31 and k13 carry one
    square root.
    """
    if ms.degenerate or ms.m00 == 0 or ms.m20 == 0 or ms.m02 == 0:
        raise DegenerateScenario("all transition moments vanish for this scenario")
    r20 = ms.m20 / ms.m00
    r02 = ms.m02 / ms.m00
    r11 = ms.m11 / ms.m00
    s = _fsqrt(r20 * r02)
    xi = float(r11) / s
    k40 = ms.m40 / ms.m00 / r20 ** 2 - 3
    k04 = ms.m04 / ms.m00 / r02 ** 2 - 3
    k31 = float(ms.m31 / ms.m00 / r20 - 3 * r11) / s
    k13 = float(ms.m13 / ms.m00 / r02 - 3 * r11) / s
    k22 = ms.m22 / ms.m00 / (r20 * r02) - 2 * r11 ** 2 / (r20 * r02) - 1
    return CumulantSet(xi=xi, k40=float(k40), k04=float(k04), k31=k31, k13=k13,
                       k22=float(k22), provenance=provenance, m22_mode=ms.m22_mode,
                       meta=dict(meta or {}))
