"""Neutron interferometric phase of a chameleon bubble.

A neutron of wavenumber k crossing a cell of width 2R picks up

    delta_phi = (m / (hbar^2 k)) (beta m / M_Pl) int phi dx,

a pure number once everything is expressed in natural units.  The line
integral comes from the 1D bubble solver when the gas is homogeneous enough,
and from the inter-nucleus bubble estimate 2 R phi_D when the nuclei are
individually screened (heterogeneous regime).  In the strongly self-coupled
regime no controlled description exists; the heterogeneous estimate is
reported with an out-of-validity flag rather than silently trusted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .bubble import CellGeometry, bubble_line_integral, vacuum_line_integral
from .chameleon import ChameleonParams
from .errors import ReachOutsideWindow
from .microstructure import (HETEROGENEOUS, HOMOGENEOUS_PERTURBATIVE,
                             STRONGLY_SELF_COUPLED, NucleusSpec, classify,
                             phi_D)
from .units import CONSTANTS, GasSpec

__all__ = [
    "BeamSpec",
    "PhaseResult",
    "SweepRow",
    "coupling_reach",
    "heterogeneous_line_integral",
    "phase_per_unit_integral",
    "phase_shift",
    "pressure_sweep",
]

DEFAULT_WAVENUMBER_INV_NM = 23.0
DEFAULT_SENSITIVITY_RAD = 17e-3


@dataclass(frozen=True)
class BeamSpec:
    """Interferometer beam: neutron wavenumber and the phase sensitivity
    used as the detectability threshold."""

    wavenumber_inv_nm: float = DEFAULT_WAVENUMBER_INV_NM
    phase_sensitivity_rad: float = DEFAULT_SENSITIVITY_RAD

    def __post_init__(self) -> None:
        if self.wavenumber_inv_nm <= 0.0:
            raise ValueError("wavenumber must be positive")
        if self.phase_sensitivity_rad <= 0.0:
            raise ValueError("phase sensitivity must be positive")

    @property
    def wavenumber_natural(self) -> float:
        """k in eV (natural units): k[nm^-1] * hbar c [eV nm]."""
        return self.wavenumber_inv_nm * CONSTANTS.hbar_c_ev_nm


@dataclass(frozen=True)
class PhaseResult:
    """Phase shift with the medium description that produced it.

    suppression_factor is the heterogeneous line integral over the vacuum
    one (1 when the homogeneous solver was used); out_of_validity marks
    strongly self-coupled points where the value is only a nearest-regime
    estimate.
    """

    delta_phi_rad: float
    regime_used: str
    suppression_factor: float
    line_integral: float
    out_of_validity: bool = False


@dataclass(frozen=True)
class SweepRow:
    pressure_mbar: float
    delta_phi_rad: float
    regime: str
    out_of_validity: bool


def phase_per_unit_integral(p: ChameleonParams, beam: BeamSpec) -> float:
    """Radians of phase per unit natural line integral: beta m^2 / (k M_Pl)."""
    m = CONSTANTS.neutron_mass_ev
    return p.beta * m * m / (beam.wavenumber_natural * CONSTANTS.planck_mass_ev)


def heterogeneous_line_integral(p: ChameleonParams, gas: GasSpec,
                                geom: CellGeometry) -> float:
    """Line integral 2 R phi_D across a cell of screened nuclei.

    The field saturates at the inter-nucleus bubble value phi_D everywhere,
    so the cell-scale bubble is replaced by a plateau; valid when the half
    spacing D is far below the cell half width R.
    """
    d_m = gas.interatomic_half_distance_m
    if d_m >= geom.half_width_m:
        raise ValueError("interatomic half spacing exceeds the cell half "
                         "width: not a gas-dominated cell")
    return 2.0 * geom.half_width_natural * phi_D(p, d_m)


def phase_shift(p: ChameleonParams, gas: GasSpec, geom: CellGeometry,
                beam: BeamSpec) -> PhaseResult:
    """Interferometric phase of the chameleon bubble in a gas-filled cell.

    The gas state is classified first: a homogeneous gas feeds the 1D
    bubble solver, a heterogeneous one the plateau estimate.  Strongly
    self-coupled points reuse the plateau estimate but carry
    out_of_validity=True.
    """
    coeff = phase_per_unit_integral(p, beam)
    rho = gas.mass_density_ev4
    if rho == 0.0 or p.beta == 0.0:
        line = bubble_line_integral(p, geom, 0.0)
        return PhaseResult(delta_phi_rad=coeff * line,
                           regime_used=HOMOGENEOUS_PERTURBATIVE,
                           suppression_factor=1.0, line_integral=line)
    report = classify(p, gas)
    if report.regime == HOMOGENEOUS_PERTURBATIVE:
        line = bubble_line_integral(p, geom, rho)
        return PhaseResult(delta_phi_rad=coeff * line,
                           regime_used=HOMOGENEOUS_PERTURBATIVE,
                           suppression_factor=1.0, line_integral=line)
    line = heterogeneous_line_integral(p, gas, geom)
    suppression = min(1.0, line / vacuum_line_integral(p, geom))
    return PhaseResult(delta_phi_rad=coeff * line,
                       regime_used=HETEROGENEOUS,
                       suppression_factor=suppression,
                       line_integral=line,
                       out_of_validity=report.regime == STRONGLY_SELF_COUPLED)


def pressure_sweep(p: ChameleonParams, gas: GasSpec, geom: CellGeometry,
                   beam: BeamSpec, pressures_mbar) -> list:
    """Phase shift along a pressure ladder; rows carry per-row regime flags."""
    prev = -math.inf
    for pres in pressures_mbar:
        if pres < 0.0 or pres < prev:
            raise ValueError("pressures must be nonnegative and sorted")
        prev = pres
    rows = []
    for pres in pressures_mbar:
        result = phase_shift(p, gas.with_pressure(float(pres)), geom, beam)
        rows.append(SweepRow(pressure_mbar=float(pres),
                             delta_phi_rad=result.delta_phi_rad,
                             regime=result.regime_used,
                             out_of_validity=result.out_of_validity))
    return rows


def coupling_reach(n: int, gas: GasSpec, geom: CellGeometry, beam: BeamSpec,
                   lambda_ev: float = CONSTANTS.dark_energy_scale_ev,
                   beta_window: tuple = (1e4, 1e14)) -> float:
    """Smallest coupling beta the interferometer can detect.

    At zero pressure the bubble is coupling-independent, so the threshold
    beta is the closed-form sensitivity / (phase per unit beta); in a gas
    the phase is still monotone in beta (the explicit beta factor wins over
    screening) and a log-space bisection locates the crossing.
    """
    if gas.pressure_mbar == 0.0:
        p_unit = ChameleonParams(n=n, beta=1.0, lambda_ev=lambda_ev)
        phase_at_unit_beta = phase_per_unit_integral(p_unit, beam) \
            * vacuum_line_integral(p_unit, geom)
        return beam.phase_sensitivity_rad / phase_at_unit_beta

    def phase_of(beta: float) -> float:
        p = ChameleonParams(n=n, beta=beta, lambda_ev=lambda_ev)
        return phase_shift(p, gas, geom, beam).delta_phi_rad

    lo, hi = math.log10(beta_window[0]), math.log10(beta_window[1])
    target = beam.phase_sensitivity_rad
    f_lo, f_hi = phase_of(10.0**lo), phase_of(10.0**hi)
    if f_lo >= target or f_hi < target:
        raise ReachOutsideWindow(
            f"detectability threshold not bracketed in beta window "
            f"[{beta_window[0]:g}, {beta_window[1]:g}]",
            beta_lo=beta_window[0], beta_hi=beta_window[1])
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if phase_of(10.0**mid) >= target:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-12:
            break
    return 10.0 ** (0.5 * (lo + hi))
