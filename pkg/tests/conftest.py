import math
from fractions import Fraction


def gbinom(x: int, r: int) -> Fraction:
    """Binomial coefficient for any integer upper index (falling factorial / r!)."""
    if r < 0:
        return Fraction(0)
    num = 1
    for i in range(r):
        num *= x - i
    return Fraction(num, math.factorial(r))
