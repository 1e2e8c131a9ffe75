"""Shared test fixtures: a manufactured solution for the 2D relaxation.

The grid is built so that y*(xi, eta) = exp(A sin(a xi) sin(a eta)) solves
the reduced field equation lap(y) = -n y^-(n+1) + S exactly, with the wave
number a chosen so y* = 1 on all four walls.  The required source follows
from lap(exp g) = exp(g) (|grad g|^2 + lap g) and lap g = -2 a^2 g.
"""

import math

import numpy as np

from chamneut import ChameleonParams, Grid2D
from chamneut.units import CONSTANTS, length_to_natural


def manufactured_grid(p: ChameleonParams, count: int, side_m: float = 1e-4,
                      amplitude: float = 1.2):
    """Return (grid, y_exact) for a `count` x `count` box of side `side_m`."""
    h_m = side_m / (count - 1)
    h_xi = length_to_natural(h_m) * p.lambda_ev
    a = math.pi / (h_xi * (count - 1))
    xi = np.arange(count) * h_xi
    sx = np.sin(a * xi)
    cx = np.cos(a * xi)
    g = amplitude * np.outer(sx, sx)
    gx = amplitude * a * np.outer(sx, cx)
    gy = amplitude * a * np.outer(cx, sx)
    y_exact = np.exp(g)
    lap = y_exact * (gx**2 + gy**2 - 2.0 * a**2 * g)
    s_scaled = lap + p.n * y_exact ** (-(p.n + 1.0))
    source_ev4 = s_scaled * CONSTANTS.planck_mass_ev * p.lambda_ev**3 / p.beta
    grid = Grid2D(nx=count, ny=count, spacing_m=h_m,
                  values=np.ones((count, count)), boundary_value=1.0,
                  source_ev4=source_ev4)
    return grid, y_exact


def manufactured_error(p: ChameleonParams, count: int, tol: float = 1e-10):
    """Max interior error of the relaxed field against the exact solution."""
    from chamneut import solve_box

    grid, y_exact = manufactured_grid(p, count)
    solved, report = solve_box(p, grid, tol=tol)
    assert report.converged
    return float(np.abs(solved.values - y_exact)[1:-1, 1:-1].max())
