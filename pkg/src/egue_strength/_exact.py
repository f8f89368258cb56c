from __future__ import annotations

from decimal import Decimal, localcontext
from fractions import Fraction

from .combinatorics import exact_sqrt


def sqrt_fraction(x: Fraction | int, digits: int = 60) -> Fraction:
    """Exact square root when x is a rational square, else a 60-digit rational."""
    try:
        return exact_sqrt(x)
    except ValueError:
        x = Fraction(x)
        if x < 0:
            raise
        with localcontext() as ctx:
            ctx.prec = digits
            root = (Decimal(x.numerator) / Decimal(x.denominator)).sqrt()
        return Fraction(root)
