"""Gas microstructure for the chameleon: when is a gas homogeneous?

A chameleon in a gas sees either a smooth medium or a collection of discrete
nuclei, depending on the coupling and the density.  Two threshold densities
organize the map:

  rho_pert   = n Lambda^3 M_Pl / beta: above it the homogeneous minimum
               drops below Lambda and the field is strongly self-coupled.
  rho_screen = (n Lambda^(4+n) / M_Pl^n) / (beta (2 beta Phi_N)^(n+1)):
               above it individual nuclei develop thin shells and the gas
               must be treated as heterogeneous.

Equivalently, the homogeneous minimum evaluated at each threshold returns
2 beta M_Pl Phi_N and Lambda respectively, with Phi_N the Newtonian surface
potential of a nucleus.  Around a screened nucleus the field grows through a
Coulomb-like zone, then follows a universal radial profile out to the
inter-nucleus bubble value phi_D at half the atomic spacing D.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .bubble import j_integral
from .chameleon import ChameleonParams, mass_at_min, min_field
from .units import CONSTANTS, GasSpec, length_to_natural

__all__ = [
    "HETEROGENEOUS",
    "HOMOGENEOUS_PERTURBATIVE",
    "NucleusSpec",
    "RegimeReport",
    "STRONGLY_SELF_COUPLED",
    "StarShell",
    "classify",
    "coulomb_tail",
    "phi_D",
    "r_star",
    "regime_grid",
    "rho_pert",
    "rho_screen",
    "screening_threshold_field",
    "universal_profile",
]

HOMOGENEOUS_PERTURBATIVE = "homogeneous_perturbative"
HETEROGENEOUS = "heterogeneous"
STRONGLY_SELF_COUPLED = "strongly_self_coupled"

REGIME_CODES = {HOMOGENEOUS_PERTURBATIVE: 0, HETEROGENEOUS: 1,
                STRONGLY_SELF_COUPLED: 2}


@dataclass(frozen=True)
class NucleusSpec:
    """A nucleus as the chameleon sees it: mass, hard radius, and the
    Newtonian potential at its surface, Phi_N = m / (8 pi M_Pl^2 R)."""

    mass_ev: float
    radius_m: float
    newtonian_surface_potential: float

    def __post_init__(self) -> None:
        if self.mass_ev <= 0.0 or self.radius_m <= 0.0:
            raise ValueError("nucleus mass and radius must be positive")
        expected = self.mass_ev / (8.0 * math.pi * CONSTANTS.planck_mass_ev**2
                                   * length_to_natural(self.radius_m))
        if abs(self.newtonian_surface_potential - expected) > 1e-12 * expected:
            raise ValueError("stored surface potential is inconsistent with "
                             "mass and radius")

    @classmethod
    def from_mass_radius(cls, mass_ev: float, radius_m: float) -> "NucleusSpec":
        phi_n = mass_ev / (8.0 * math.pi * CONSTANTS.planck_mass_ev**2
                           * length_to_natural(radius_m))
        return cls(mass_ev=mass_ev, radius_m=radius_m,
                   newtonian_surface_potential=phi_n)

    @classmethod
    def from_gas(cls, gas: GasSpec) -> "NucleusSpec":
        return cls.from_mass_radius(gas.nucleus_mass_ev, gas.nucleus_radius_m)


@dataclass(frozen=True)
class RegimeReport:
    """Outcome of classifying a gas state: which description applies and
    where the thresholds sit.  md_product is M(rho) D, the in-medium mass
    times the half spacing; the heterogeneous formulas assume it is small
    and classify() warns when it is not."""

    regime: str
    rho_ev4: float
    rho_pert_ev4: float
    rho_screen_ev4: float
    md_product: float


@dataclass(frozen=True)
class StarShell:
    """Free-field shell around a screened nucleus: its outer radius, the
    dimensionless Coulomb coefficient C, and the matching field value
    phi_star ~ C / R_nucl at the inner edge."""

    r_star_m: float
    coefficient: float
    phi_star_ev: float


def rho_pert(p: ChameleonParams) -> float:
    """Density above which the homogeneous minimum falls below Lambda."""
    if p.beta == 0.0:
        return math.inf
    return p.n * p.lambda_ev**3 * CONSTANTS.planck_mass_ev / p.beta


def screening_threshold_field(p: ChameleonParams, nuc: NucleusSpec) -> float:
    """Field deficit 2 beta M_Pl Phi_N a screened nucleus carves out (eV)."""
    return 2.0 * p.beta * CONSTANTS.planck_mass_ev \
        * nuc.newtonian_surface_potential


def rho_screen(p: ChameleonParams, nuc: NucleusSpec) -> float:
    """Density above which nuclei are individually screened.

    Closed form (n Lambda^(4+n) / M_Pl^n) / (beta (2 beta Phi_N)^(n+1));
    equivalently the density where the homogeneous minimum equals the
    thin-shell threshold 2 beta M_Pl Phi_N.
    """
    if nuc.newtonian_surface_potential <= 0.0:
        raise ValueError("surface potential must be positive")
    n, beta = p.n, p.beta
    if beta == 0.0:
        return math.inf
    return (n * p.lambda_ev ** (4 + n) / CONSTANTS.planck_mass_ev**n) \
        / (beta * (2.0 * beta * nuc.newtonian_surface_potential) ** (n + 1))


def classify(p: ChameleonParams, gas: GasSpec,
             nuc: NucleusSpec | None = None) -> RegimeReport:
    """Place a gas state on the regime map.

    Partition: strongly self-coupled above rho_pert, heterogeneous between
    rho_screen and rho_pert, homogeneous-perturbative below both.  Boundary
    ties resolve toward the less-homogeneous label.
    """
    if nuc is None:
        nuc = NucleusSpec.from_gas(gas)
    rho = gas.mass_density_ev4
    r_pert = rho_pert(p)
    r_screen = rho_screen(p, nuc)
    if rho >= r_pert:
        regime = STRONGLY_SELF_COUPLED
    elif rho >= r_screen:
        regime = HETEROGENEOUS
    else:
        regime = HOMOGENEOUS_PERTURBATIVE
    if rho > 0.0 and p.beta > 0.0:
        md = mass_at_min(p, rho) \
            * length_to_natural(gas.interatomic_half_distance_m)
    else:
        md = 0.0
    if regime == HETEROGENEOUS and md >= 1.0:
        warnings.warn("in-medium mass times half spacing M(rho) D >= 1: the "
                      "heterogeneous formulas drop the mass term",
                      stacklevel=2)
    return RegimeReport(regime=regime, rho_ev4=rho, rho_pert_ev4=r_pert,
                        rho_screen_ev4=r_screen, md_product=md)


def phi_D(p: ChameleonParams, half_spacing_m: float) -> float:
    """Inter-nucleus bubble maximum (eV) at half the atomic spacing D.

    Same closed form as the evacuated plate cell with R -> D:
    phi_D = (sqrt(2) D Lambda^((4+n)/2) / J_n(0))^(2/(n+2)).
    """
    if half_spacing_m <= 0.0:
        raise ValueError("half spacing must be positive")
    d_nat = length_to_natural(half_spacing_m)
    lam = p.lambda_ev
    return lam * (math.sqrt(2.0) * d_nat * lam / j_integral(p.n, 0.0)) \
        ** (2.0 / (p.n + 2.0))


def universal_profile(p: ChameleonParams, r_m) -> float:
    """Coupling-independent radial profile between R_star and D:
    phi(r) = Lambda ((2+n) Lambda r / sqrt 2)^(2/(2+n))."""
    r_nat = length_to_natural(r_m)
    lam = p.lambda_ev
    return lam * ((p.n + 2.0) * lam * r_nat / math.sqrt(2.0)) \
        ** (2.0 / (p.n + 2.0))


def r_star(p: ChameleonParams, nuc: NucleusSpec,
           half_spacing_m: float) -> StarShell:
    """Radius where the Coulomb-like zone of a screened nucleus hands over
    to the universal profile.

    Substituting C = R_star^2 sqrt(2 Lambda^(4+n) / phi_D^n) into
    R_star^3 = 2 C^(n+2) / (n R_nucl^(n+1) Lambda^(4+n)) gives the exact
    power relation R_star^(2n+1) = n R_nucl^(n+1) phi_D^(n(n+2)/2)
    / (2^((n+4)/2) Lambda^(n(4+n)/2)), so R_star ~ D (R_nucl/D)^((n+1)/(2n+1)).
    """
    if half_spacing_m <= nuc.radius_m:
        raise ValueError("half spacing must exceed the nucleus radius")
    n = p.n
    lam = p.lambda_ev
    r_nucl = length_to_natural(nuc.radius_m)
    phid = phi_D(p, half_spacing_m)
    rs_pow = n * r_nucl ** (n + 1) * phid ** (0.5 * n * (n + 2)) \
        / (2.0 ** (0.5 * (n + 4)) * lam ** (0.5 * n * (4 + n)))
    rs = rs_pow ** (1.0 / (2 * n + 1))
    coeff = rs**2 * math.sqrt(2.0 * lam ** (4 + n) / phid**n)
    return StarShell(r_star_m=rs / length_to_natural(1.0),
                     coefficient=coeff,
                     phi_star_ev=coeff / r_nucl)


def coulomb_tail(p: ChameleonParams, nuc: NucleusSpec, r_m: float,
                 ambient_ev: float) -> float:
    """Field near an unscreened nucleus: ambient - beta m / (4 pi M_Pl r).

    Only meaningful while the deficit stays below the ambient field; when
    the surface deficit 2 beta M_Pl Phi_N exceeds it the nucleus is screened
    and the linear tail is extrapolation, so a warning is issued.
    """
    if r_m <= nuc.radius_m:
        raise ValueError("r must exceed the nucleus radius")
    if ambient_ev <= 0.0:
        raise ValueError("ambient field must be positive")
    if screening_threshold_field(p, nuc) >= ambient_ev:
        warnings.warn("nucleus is screened at this ambient field: the "
                      "Coulomb tail is not valid down to the surface",
                      stacklevel=2)
    deficit = p.beta * nuc.mass_ev \
        / (4.0 * math.pi * CONSTANTS.planck_mass_ev * length_to_natural(r_m))
    return ambient_ev - deficit


def regime_grid(p_template: ChameleonParams, gas: GasSpec, betas,
                pressures_mbar) -> list:
    """Regime label for every (beta, pressure) pair, row-major over betas.

    Returns rows (beta, pressure_mbar, regime); used to draw the regime map.
    """
    rows = []
    for beta in betas:
        p = ChameleonParams(n=p_template.n, beta=float(beta),
                            lambda_ev=p_template.lambda_ev)
        nuc = NucleusSpec.from_gas(gas)
        for pres in pressures_mbar:
            report = classify(p, gas.with_pressure(float(pres)), nuc)
            rows.append((float(beta), float(pres), report.regime))
    return rows
