"""Chameleon scalar field: potential, matter coupling and the density-dependent
minimum.

The self-interaction is the inverse power law V(phi) = Lambda^4 (1 +
(Lambda/phi)^n) with Lambda the dark energy scale, and matter couples through
beta phi rho / M_Pl.  In a medium of density rho the effective potential has a
minimum whose position and curvature follow in closed form; everything in this
module is expressed in natural units (eV-based).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .units import CONSTANTS

__all__ = [
    "ChameleonParams",
    "effective_potential",
    "mass_at_min",
    "min_field",
    "potential",
]


@dataclass(frozen=True)
class ChameleonParams:
    """Ratra-Peebles exponent n, matter coupling beta, energy scale Lambda (eV)."""

    n: int
    beta: float
    lambda_ev: float = CONSTANTS.dark_energy_scale_ev

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")
        if self.beta < 0.0:
            raise ValueError(f"beta must be nonnegative, got {self.beta}")
        if self.lambda_ev <= 0.0:
            raise ValueError(f"lambda_ev must be positive, got {self.lambda_ev}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def beta9(self) -> float:
        """Coupling in units of 10^9."""
        return self.beta * 1e-9


def potential(p: ChameleonParams, phi):
    """Self-interaction V(phi) = Lambda^4 + Lambda^(4+n)/phi^n, in eV^4.

    phi may be a scalar or array of field values in eV; phi <= 0 is rejected
    because the inverse power law is only defined on the positive branch.
    """
    phi = np.asarray(phi, dtype=float)
    if np.any(phi <= 0.0):
        raise ValueError("potential requires phi > 0")
    lam = p.lambda_ev
    out = lam**4 * (1.0 + (lam / phi) ** p.n)
    return out if out.ndim else float(out)


def effective_potential(p: ChameleonParams, phi, rho_ev4: float):
    """V_eff(phi) = V(phi) + beta phi rho / M_Pl, in eV^4."""
    if rho_ev4 < 0.0:
        raise ValueError("rho must be nonnegative")
    phi_arr = np.asarray(phi, dtype=float)
    out = np.asarray(potential(p, phi_arr)) + p.beta * phi_arr * rho_ev4 / CONSTANTS.planck_mass_ev
    return out if out.ndim else float(out)


def min_field(p: ChameleonParams, rho_ev4: float) -> float:
    """Field value minimizing V_eff in a medium of density rho (eV^4) -> eV.

    phi_min = Lambda (n Lambda^3 M_Pl / (beta rho))^(1/(n+1)); diverges as
    rho -> 0, so zero density is rejected.
    """
    if rho_ev4 <= 0.0:
        raise ValueError("min_field requires rho > 0; the vacuum has no minimum")
    if p.beta == 0.0:
        raise ValueError("min_field requires beta > 0; an uncoupled field "
                         "has no in-medium minimum")
    lam = p.lambda_ev
    ratio = p.n * lam**3 * CONSTANTS.planck_mass_ev / (p.beta * rho_ev4)
    return lam * ratio ** (1.0 / (p.n + 1))


def mass_at_min(p: ChameleonParams, rho_ev4: float) -> float:
    """Chameleon mass at the in-medium minimum, M = sqrt(V_eff''), in eV."""
    phi = min_field(p, rho_ev4)
    m2 = p.n * (p.n + 1) * p.lambda_ev ** (p.n + 4) / phi ** (p.n + 2)
    return float(np.sqrt(m2))
