"""Bivariate Gaussian with Edgeworth corrections in standardized variables."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import IO

import numpy as np

from .errors import CorrelationOutOfRange, InvalidGrid
from .moments import CumulantSet

__all__ = [
    "EdgeworthParams",
    "DensityGrid",
    "hermite_biv",
    "hermite_table",
    "gaussian_biv",
    "edgeworth_density",
    "density_grid",
]

MAX_ORDER = 6


@dataclass(frozen=True)
class EdgeworthParams:
    """Correlation and reduced cumulants; third-order ones default to zero."""

    xi: float
    k40: float = 0.0
    k31: float = 0.0
    k22: float = 0.0
    k13: float = 0.0
    k04: float = 0.0
    k30: float = 0.0
    k21: float = 0.0
    k12: float = 0.0
    k03: float = 0.0

    def __post_init__(self):
        _check_xi(self.xi)

    @classmethod
    def from_cumulants(cls, c: CumulantSet) -> "EdgeworthParams":
        return cls(xi=c.xi, k40=c.k40, k31=c.k31, k22=c.k22, k13=c.k13, k04=c.k04)


def _check_xi(xi: float) -> None:
    if not (math.isfinite(xi) and abs(xi) < 1):
        raise CorrelationOutOfRange(f"correlation must satisfy |xi| < 1, got {xi}")


def hermite_table(max_order: int, x, y, xi: float) -> dict[tuple[int, int], np.ndarray]:
    """All He_{a,b}(x, y) with a + b <= max_order.

    Uses the x-raising recursion
        (1 - xi^2) He_{a+1,b} = (x - xi y) He_{a,b} - a He_{a-1,b} + b xi He_{a,b-1}
    and its mirror image for raising b.
    """
    _check_xi(xi)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    c = 1.0 - xi * xi
    u, v = x - xi * y, y - xi * x
    he: dict[tuple[int, int], np.ndarray] = {(0, 0): np.ones(np.broadcast(x, y).shape)}

    def get(a: int, b: int):
        return he[a, b] if a >= 0 and b >= 0 else 0.0

    for n in range(1, max_order + 1):
        for a in range(n + 1):
            b = n - a
            if a > 0:
                p = a - 1
                he[a, b] = (u * get(p, b) - p * get(p - 1, b) + b * xi * get(p, b - 1)) / c
            else:
                q = b - 1
                he[a, b] = (v * get(a, q) - q * get(a, q - 1) + a * xi * get(a - 1, q)) / c
    return he


def hermite_biv(m1: int, m2: int, x, y, xi: float):
    """Bivariate Hermite polynomial He_{m1,m2}(x, y) for correlation xi."""
    if m1 < 0 or m2 < 0:
        raise ValueError("Hermite orders must be non-negative")
    val = hermite_table(m1 + m2, x, y, xi)[m1, m2]
    return float(val) if np.ndim(val) == 0 else val


def gaussian_biv(x, y, xi: float):
    """Standard bivariate normal density with correlation xi."""
    _check_xi(xi)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    c = 1.0 - xi * xi
    val = np.exp(-(x * x - 2 * xi * x * y + y * y) / (2 * c)) / (2 * np.pi * np.sqrt(c))
    return float(val) if np.ndim(val) == 0 else val


def _terms(p: EdgeworthParams) -> list[tuple[float, int, int]]:
    k30, k21, k12, k03 = p.k30, p.k21, p.k12, p.k03
    terms = [
        (k30 / 6, 3, 0), (k21 / 2, 2, 1), (k12 / 2, 1, 2), (k03 / 6, 0, 3),
        (p.k40 / 24, 4, 0), (p.k31 / 6, 3, 1), (p.k22 / 4, 2, 2),
        (p.k13 / 6, 1, 3), (p.k04 / 24, 0, 4),
        # products of third-order cumulants
        (k30 * k30 / 72, 6, 0), (k30 * k21 / 12, 5, 1),
        (k21 * k21 / 8 + k30 * k12 / 12, 4, 2),
        (k30 * k03 / 36 + k12 * k21 / 4, 3, 3),
        (k12 * k12 / 8 + k21 * k03 / 12, 2, 4),
        (k12 * k03 / 12, 1, 5), (k03 * k03 / 72, 0, 6),
    ]
    return [t for t in terms if t[0] != 0.0]


def edgeworth_density(params: EdgeworthParams, x, y):
    """Edgeworth-corrected bivariate Gaussian through fourth order.

    Negative values can appear in the far tails for large cumulants; they
    are returned unchanged.
    """
    g = gaussian_biv(x, y, params.xi)
    terms = _terms(params)
    if not terms:
        return g
    he = hermite_table(max(a + b for _, a, b in terms), x, y, params.xi)
    corr = 1.0
    for coef, a, b in terms:
        corr = corr + coef * he[a, b]
    val = corr * g
    return float(val) if np.ndim(val) == 0 else val


@dataclass(frozen=True)
class DensityGrid:
    """Density samples ``values[i, j]`` at ``(x_points[i], y_points[j])``."""

    x_points: np.ndarray
    y_points: np.ndarray
    values: np.ndarray
    cell_area: float

    @property
    def min_value(self) -> float:
        return float(self.values.min())

    def mass(self) -> float:
        return float(self.values.sum() * self.cell_area)

    def write_csv(self, fh: IO[str]) -> None:
        """Columns x, y, density; x varies slowest; 9 significant digits."""
        fh.write("x,y,density\n")
        for i, xv in enumerate(self.x_points):
            row = self.values[i]
            fh.writelines(f"{xv:.9g},{yv:.9g},{dv:.9g}\n"
                          for yv, dv in zip(self.y_points, row))


def density_grid(params: EdgeworthParams, half_range: float, n: int,
                 threads: int = 1) -> DensityGrid:
    """Evaluate the density on an n x n grid over [-half_range, half_range]^2.

    Rows are evaluated independently, so the result does not depend on
    ``threads``.
    """
    if not (isinstance(n, (int, np.integer)) and n >= 11 and n % 2 == 1):
        raise InvalidGrid(f"grid size must be an odd integer >= 11, got {n}")
    if not (math.isfinite(half_range) and half_range > 0):
        raise InvalidGrid(f"half_range must be positive and finite, got {half_range}")
    pts = np.linspace(-half_range, half_range, n)
    pts[n // 2] = 0.0
    step = pts[1] - pts[0]

    def row(i: int) -> np.ndarray:
        return edgeworth_density(params, np.full(n, pts[i]), pts)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(row, range(n)))
    else:
        rows = [row(i) for i in range(n)]
    return DensityGrid(pts, pts.copy(), np.vstack(rows), float(step * step))
