"""2D nonlinear relaxation solver for the scalar field in a rectangular box.

The field obeys lap(phi) = V'(phi) + beta*rho/M_Pl with Dirichlet walls,
where V(phi) = Lambda^4 (1 + (Lambda/phi)^n) is the runaway potential.  In
the reduced variables y = phi/Lambda and xi = x * Lambda (natural-unit
coordinate times the dark-energy scale) the equation becomes

    lap_xi(y) = -n y^(-(n+1)) + S,     S = beta * rho / (M_Pl Lambda^3),

so a uniform source admits the exact constant solution y = min_field/Lambda.
The solver iterates in w = log(y), which keeps the field positive no matter
how hard the runaway term pushes, with per-node damped Newton updates swept
in Gauss-Seidel order (compiled kernel in _kernels).  Successive
over-relaxation accelerates the sweeps once the iterate is close enough to
the solution for the local linearization to be trustworthy.

Point nuclei are deposited as single-cell densities m/h^3 (one grid cell of
transverse depth h), which in 2D produces the expected logarithmic dent
around each nucleus cell.

Exports: CSV of (x_m, y_m, phi_over_lambda) node rows and a little-endian
binary dump with a (nx, ny, h, Lambda) header for plotting.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, replace

import numpy as np

from ._kernels import newton_gs_sweeps
from .bubble import CellGeometry, solve_y0
from .chameleon import ChameleonParams, min_field
from .units import CONSTANTS, length_to_natural

__all__ = [
    "Grid2D",
    "SolveReport",
    "add_nuclei",
    "export_binary",
    "export_csv",
    "make_box",
    "make_grid",
    "residual",
    "solve_box",
]

DEFAULT_WALL_VALUE = 1.0e-4
DEFAULT_TOL = 1.0e-8
DEFAULT_MAX_SWEEPS = 100_000
MAX_LOG_STEP = 0.5
WARMUP_SWEEPS = 128
SWEEP_CHUNK = 64
RESIDUAL_FLOOR = 1.0e-30


@dataclass(frozen=True)
class Grid2D:
    """Uniform rectangular grid holding the reduced field y = phi/Lambda.

    `values` has shape (ny, nx); node (i, j) sits at x = i*h, y = j*h with
    h = spacing_m.  The outermost ring is Dirichlet data pinned at
    `boundary_value`.  `source_ev4` is the matter density per node in eV^4.
    """

    nx: int
    ny: int
    spacing_m: float
    values: np.ndarray
    boundary_value: float = DEFAULT_WALL_VALUE
    source_ev4: np.ndarray | None = None

    def __post_init__(self):
        if self.nx < 3 or self.ny < 3:
            raise ValueError(f"grid needs at least 3 nodes per side, got {self.nx}x{self.ny}")
        if self.spacing_m <= 0.0:
            raise ValueError(f"grid spacing must be positive, got {self.spacing_m}")
        if self.boundary_value <= 0.0:
            raise ValueError("boundary value must be positive (log iterate)")
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.ny, self.nx):
            raise ValueError(f"values shape {vals.shape} != (ny, nx) = {(self.ny, self.nx)}")
        if not np.all(np.isfinite(vals)) or np.any(vals <= 0.0):
            raise ValueError("field values must be finite and positive")
        object.__setattr__(self, "values", vals)
        src = self.source_ev4
        src = np.zeros((self.ny, self.nx)) if src is None else np.asarray(src, dtype=float)
        if src.shape != (self.ny, self.nx):
            raise ValueError(f"source shape {src.shape} != (ny, nx) = {(self.ny, self.nx)}")
        if not np.all(np.isfinite(src)):
            raise ValueError("source field must be finite")
        object.__setattr__(self, "source_ev4", src)

    @property
    def spacing_natural(self) -> float:
        """Grid spacing in natural units, eV^-1."""
        return length_to_natural(self.spacing_m)

    def node_x_m(self) -> np.ndarray:
        return np.arange(self.nx) * self.spacing_m

    def node_y_m(self) -> np.ndarray:
        return np.arange(self.ny) * self.spacing_m


@dataclass(frozen=True)
class SolveReport:
    """Outcome of a relaxation run: sweep count, residual, convergence flag."""

    iterations: int
    final_residual: float
    converged: bool


def _scaled_source(p: ChameleonParams, grid: Grid2D) -> np.ndarray:
    """Dimensionless source S = beta*rho/(M_Pl Lambda^3) per node."""
    return p.beta * grid.source_ev4 / (CONSTANTS.planck_mass_ev * p.lambda_ev**3)


def _spacing_xi(p: ChameleonParams, grid: Grid2D) -> float:
    """Grid spacing in the reduced coordinate xi = x_natural * Lambda."""
    return grid.spacing_natural * p.lambda_ev


def make_grid(
    p: ChameleonParams,
    nx: int,
    ny: int,
    spacing_m: float,
    rho_ev4: float = 0.0,
    boundary_value: float = DEFAULT_WALL_VALUE,
) -> Grid2D:
    """Build a grid with uniform gas density and a flat-field initial guess.

    The interior starts at the 1D vacuum dome value for the narrow box
    dimension when no gas is present, or at min_field(rho) otherwise; both
    lie inside the basin of the unique positive solution.
    """
    if rho_ev4 < 0.0:
        raise ValueError(f"gas density must be nonnegative, got {rho_ev4}")
    half_width_m = 0.5 * (min(nx, ny) - 1) * spacing_m
    if rho_ev4 > 0.0 and p.beta > 0.0:
        y_init = min_field(p, rho_ev4) / p.lambda_ev
    else:
        geom = CellGeometry(half_width_m=half_width_m)
        y_init = solve_y0(p, geom, 0.0).y0
    values = np.full((ny, nx), y_init)
    values[0, :] = values[-1, :] = boundary_value
    values[:, 0] = values[:, -1] = boundary_value
    source = np.full((ny, nx), float(rho_ev4))
    return Grid2D(nx=nx, ny=ny, spacing_m=spacing_m, values=values,
                  boundary_value=boundary_value, source_ev4=source)


def make_box(
    p: ChameleonParams,
    side_m: float,
    count: int = 129,
    rho_ev4: float = 0.0,
    boundary_value: float = DEFAULT_WALL_VALUE,
) -> Grid2D:
    """Square box of physical side `side_m` with `count` nodes per side."""
    if side_m <= 0.0:
        raise ValueError(f"box side must be positive, got {side_m}")
    spacing = side_m / (count - 1)
    return make_grid(p, count, count, spacing, rho_ev4=rho_ev4,
                     boundary_value=boundary_value)


def add_nuclei(grid: Grid2D, positions_m, m_nucl_ev: float) -> Grid2D:
    """Deposit point nuclei into their containing cells as m/h^3 densities.

    Each position (x, y) in meters maps to its nearest node, which must be
    strictly interior.  The cell density increment is m_nucl / h^3 in
    natural units (eV^4), so the total deposited mass Sum(rho_cell * h^3)
    equals Sum(m_nucl) exactly.
    """
    if m_nucl_ev <= 0.0:
        raise ValueError(f"nucleus mass must be positive, got {m_nucl_ev}")
    h = grid.spacing_m
    cell_density = m_nucl_ev / grid.spacing_natural**3
    source = grid.source_ev4.copy()
    for pos in positions_m:
        x_m, y_m = float(pos[0]), float(pos[1])
        ix = int(round(x_m / h))
        iy = int(round(y_m / h))
        if not (1 <= ix <= grid.nx - 2 and 1 <= iy <= grid.ny - 2):
            raise ValueError(
                f"nucleus at ({x_m}, {y_m}) m maps to node ({ix}, {iy}), "
                f"not strictly interior to the {grid.nx}x{grid.ny} grid")
        source[iy, ix] += cell_density
    return replace(grid, source_ev4=source)


def _residual_arrays(p: ChameleonParams, values: np.ndarray,
                     source_scaled: np.ndarray, h_xi: float) -> np.ndarray:
    """Pointwise scaled residual over interior nodes.

    |lap(y) + n y^-(n+1) - S| / max(n y^-(n+1), |S|, floor): each term of
    the discrete equation is compared against the larger of the two force
    terms acting at that node, so the number is meaningful both deep in a
    gas (S dominates) and in vacuum (the runaway term dominates).
    """
    y = values
    lap = (y[:-2, 1:-1] + y[2:, 1:-1] + y[1:-1, :-2] + y[1:-1, 2:]
           - 4.0 * y[1:-1, 1:-1]) / h_xi**2
    runaway = p.n * y[1:-1, 1:-1] ** (-(p.n + 1.0))
    s = source_scaled[1:-1, 1:-1]
    scale = np.maximum(np.maximum(runaway, np.abs(s)), RESIDUAL_FLOOR)
    return np.abs(lap + runaway - s) / scale


def residual(p: ChameleonParams, grid: Grid2D) -> float:
    """Max-norm scaled residual of the discrete field equation."""
    return float(_residual_arrays(p, grid.values, _scaled_source(p, grid),
                                  _spacing_xi(p, grid)).max())


def solve_box(
    p: ChameleonParams,
    grid: Grid2D,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_SWEEPS,
) -> tuple[Grid2D, SolveReport]:
    """Relax the grid to the discrete field equation by Newton-Gauss-Seidel.

    Sweeps run in fixed row-major order (deterministic results).  The first
    WARMUP_SWEEPS use omega = 1 while the iterate is far from the solution;
    afterwards the standard over-relaxation factor for the grid size takes
    over, falling back toward 1 if the residual ever grows.  Non-convergence
    within max_iter returns the partial field with converged=False.
    """
    if tol <= 0.0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be at least 1, got {max_iter}")
    w = np.log(grid.values)
    src = _scaled_source(p, grid)
    h_xi = _spacing_xi(p, grid)
    omega_hi = min(2.0 / (1.0 + math.sin(math.pi / max(grid.nx, grid.ny))), 1.97)
    omega = 1.0
    sweeps_done = 0
    best = math.inf
    res = float(_residual_arrays(p, np.exp(w), src, h_xi).max())
    converged = res <= tol
    while not converged and sweeps_done < max_iter:
        n_sweeps = min(SWEEP_CHUNK, max_iter - sweeps_done)
        newton_gs_sweeps(w, src, h_xi**2, float(p.n), omega, MAX_LOG_STEP, n_sweeps)
        sweeps_done += n_sweeps
        res = float(_residual_arrays(p, np.exp(w), src, h_xi).max())
        converged = res <= tol
        if res > 10.0 * best and omega > 1.0:
            omega_hi = 1.0 + 0.5 * (omega_hi - 1.0)
        if sweeps_done >= WARMUP_SWEEPS:
            omega = omega_hi
        best = min(best, res)
    relaxed = replace(grid, values=np.exp(w))
    return relaxed, SolveReport(iterations=sweeps_done, final_residual=res,
                                converged=converged)


def export_csv(grid: Grid2D, path) -> None:
    """Write node rows (x_m, y_m, phi_over_lambda) with a header line."""
    xs = grid.node_x_m()
    ys = grid.node_y_m()
    with open(path, "w", encoding="ascii") as fh:
        fh.write("x_m,y_m,phi_over_lambda\n")
        for j in range(grid.ny):
            for i in range(grid.nx):
                fh.write(f"{xs[i]:.12g},{ys[j]:.12g},{grid.values[j, i]:.12g}\n")


def export_binary(grid: Grid2D, path, lambda_ev: float = CONSTANTS.dark_energy_scale_ev) -> None:
    """Write the grid as little-endian binary.

    Layout: int32 nx, int32 ny, float64 spacing_m, float64 lambda_ev,
    then ny*nx float64 field values (phi/Lambda) in row-major order
    (y varies slowest).
    """
    header = struct.pack("<iidd", grid.nx, grid.ny, grid.spacing_m, lambda_ev)
    body = grid.values.astype("<f8").tobytes(order="C")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(body)


def read_binary(path) -> tuple[Grid2D, float]:
    """Read back an export_binary dump; returns (grid, lambda_ev)."""
    with open(path, "rb") as fh:
        raw = fh.read()
    nx, ny, spacing_m, lambda_ev = struct.unpack_from("<iidd", raw, 0)
    offset = struct.calcsize("<iidd")
    vals = np.frombuffer(raw, dtype="<f8", count=nx * ny, offset=offset)
    values = vals.reshape(ny, nx).copy()
    grid = Grid2D(nx=nx, ny=ny, spacing_m=spacing_m, values=values,
                  boundary_value=float(values[0, 0]))
    return grid, lambda_ev
