"""Chameleon dark-energy fields probed with slow neutrons.

Library layout:

- units: physical constants, natural-unit conversions, gas specifications
- chameleon: runaway potential, in-medium minimum, effective mass
- bouncer: gravitational quantum states of ultracold neutrons on a mirror
- bubble: 1D field dome in a plane-parallel cell, line integrals, profiles
- microstructure: homogeneous/heterogeneous/self-coupled gas regimes
- interferometry: phase shifts, pressure sweeps, coupling reach
- pde: 2D nonlinear relaxation in a box with optional point nuclei
- cli: command-line front end (entry point `chamneut`)
"""

from .bouncer import (
    BOUNCER_SCALES,
    BouncerPotentialSpec,
    BouncerScales,
    BouncerSpectrum,
    coupling_bound,
    find_level,
    overlap,
    perturbative_shift,
    solve_spectrum,
    transition_shift,
)
from .bubble import (
    BubbleSolution,
    CellGeometry,
    bubble_line_integral,
    high_pressure_line_integral,
    ivanov_profile,
    j_integral,
    k_integral,
    profile_samples,
    solve_y0,
    vacuum_line_integral,
)
from .chameleon import ChameleonParams, effective_potential, mass_at_min, min_field, potential
from .errors import ReachOutsideWindow, SolverError
from .interferometry import (
    BeamSpec,
    PhaseResult,
    SweepRow,
    coupling_reach,
    heterogeneous_line_integral,
    phase_shift,
    pressure_sweep,
)
from .microstructure import (
    HETEROGENEOUS,
    HOMOGENEOUS_PERTURBATIVE,
    STRONGLY_SELF_COUPLED,
    NucleusSpec,
    RegimeReport,
    StarShell,
    classify,
    coulomb_tail,
    phi_D,
    r_star,
    regime_grid,
    rho_pert,
    rho_screen,
    universal_profile,
)
from .pde import Grid2D, SolveReport, add_nuclei, make_box, make_grid, residual, solve_box
from .units import CONSTANTS, GasSpec, PhysicalConstants, Quantity, Unit, UnitError, helium

__version__ = "0.1.0"
