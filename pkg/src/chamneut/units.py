"""Physical constants and unit conversions for chameleon-neutron calculations.

Everything downstream works in natural units (hbar = c = 1): energies in eV,
lengths in 1/eV, mass densities in eV^4.  The laboratory side speaks meters,
kilograms per cubic meter, millibars and kelvins, so this module owns the
conversion factors and a tiny tagged-quantity wrapper that refuses to mix
dimensions silently.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

__all__ = [
    "CONSTANTS",
    "GasSpec",
    "PhysicalConstants",
    "Quantity",
    "Unit",
    "UnitError",
    "density_from_natural",
    "density_to_natural",
    "energy_ev_to_pev",
    "energy_pev_to_ev",
    "helium",
    "length_from_natural",
    "length_to_natural",
    "pressure_mbar_to_pa",
    "pressure_to_mass_density",
]


class UnitError(ValueError):
    """Raised when quantities with different unit tags are combined."""


class Unit(enum.Enum):
    ENERGY_EV = "eV"
    LENGTH_M = "m"
    INVERSE_EV = "1/eV"
    DENSITY_KG_M3 = "kg/m^3"
    DENSITY_EV4 = "eV^4"
    PRESSURE_MBAR = "mbar"
    TEMPERATURE_K = "K"
    ANGLE_RAD = "rad"
    DIMENSIONLESS = "1"


@dataclass(frozen=True)
class Quantity:
    """Scalar with a unit tag.  Addition and comparison demand matching tags.

    This is deliberately not a unit-algebra system: multiplication is only
    defined against bare numbers, and conversions go through the explicit
    functions below.
    """

    value: float
    unit: Unit

    def _require_same(self, other: "Quantity") -> None:
        if not isinstance(other, Quantity):
            raise UnitError(f"cannot combine Quantity with {type(other).__name__}")
        if self.unit is not other.unit:
            raise UnitError(f"unit mismatch: {self.unit.value} vs {other.unit.value}")

    def __add__(self, other: "Quantity") -> "Quantity":
        self._require_same(other)
        return Quantity(self.value + other.value, self.unit)

    def __sub__(self, other: "Quantity") -> "Quantity":
        self._require_same(other)
        return Quantity(self.value - other.value, self.unit)

    def __mul__(self, factor: float) -> "Quantity":
        if isinstance(factor, Quantity):
            raise UnitError("Quantity * Quantity is not defined; convert explicitly")
        return Quantity(self.value * float(factor), self.unit)

    __rmul__ = __mul__

    def __truediv__(self, factor: float) -> "Quantity":
        if isinstance(factor, Quantity):
            raise UnitError("Quantity / Quantity is not defined; convert explicitly")
        return Quantity(self.value / float(factor), self.unit)

    def __lt__(self, other: "Quantity") -> bool:
        self._require_same(other)
        return self.value < other.value

    def __le__(self, other: "Quantity") -> bool:
        self._require_same(other)
        return self.value <= other.value


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA-2018 style constants plus the conventions fixed for this package."""

    hbar_c_ev_nm: float = 197.3269804        # hbar*c, eV nm
    speed_of_light_m_s: float = 299792458.0  # exact
    ev_joule: float = 1.602176634e-19        # exact
    boltzmann_ev_k: float = 8.617333262e-5   # eV/K
    atomic_mass_kg: float = 1.66053906660e-27
    gravity_m_s2: float = 9.806              # conventional lab value, exact here
    neutron_mass_ev: float = 939.5654e6
    planck_mass_ev: float = 2.44e27          # reduced Planck mass
    dark_energy_scale_ev: float = 2.4e-3     # Lambda, dark energy scale

    @property
    def hbar_c_ev_m(self) -> float:
        return self.hbar_c_ev_nm * 1e-9

    @property
    def kg_m3_to_ev4(self) -> float:
        # rho[eV^4] = rho[kg/m^3] * c^2/e * (hbar c)^3; the mass-energy factor
        # c^2/e turns kg into eV, the (hbar c)^3 factor turns 1/m^3 into eV^3.
        ev_per_kg = self.speed_of_light_m_s**2 / self.ev_joule
        return ev_per_kg * self.hbar_c_ev_m**3

    @property
    def gravity_natural_ev(self) -> float:
        # g/c^2 is an inverse length; times hbar*c it becomes an energy.
        return self.gravity_m_s2 / self.speed_of_light_m_s**2 * self.hbar_c_ev_m


CONSTANTS = PhysicalConstants()


# ---------------------------------------------------------------------------
# conversions
# ---------------------------------------------------------------------------

def length_to_natural(length_m: float) -> float:
    """Meters -> natural length in 1/eV."""
    return length_m / CONSTANTS.hbar_c_ev_m


def length_from_natural(length_inv_ev: float) -> float:
    """Natural length in 1/eV -> meters."""
    return length_inv_ev * CONSTANTS.hbar_c_ev_m


def density_to_natural(rho_kg_m3: float) -> float:
    """Mass density kg/m^3 -> eV^4."""
    return rho_kg_m3 * CONSTANTS.kg_m3_to_ev4


def density_from_natural(rho_ev4: float) -> float:
    """Mass density eV^4 -> kg/m^3."""
    return rho_ev4 / CONSTANTS.kg_m3_to_ev4


def pressure_mbar_to_pa(p_mbar: float) -> float:
    return p_mbar * 100.0


def energy_ev_to_pev(e_ev: float) -> float:
    return e_ev * 1e12


def energy_pev_to_ev(e_pev: float) -> float:
    return e_pev * 1e-12


# ---------------------------------------------------------------------------
# gas environment
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GasSpec:
    """Monatomic gas filling the experimental cell.

    The nucleus mass and radius feed the screening analysis; pressure and
    temperature set the mean mass density through the ideal gas law, and the
    mean interatomic distance is defined by 2*d = (number density)^(-1/3).
    """

    name: str
    mass_number: float
    nucleus_mass_ev: float
    nucleus_radius_m: float
    pressure_mbar: float
    temperature_k: float

    def __post_init__(self) -> None:
        if self.pressure_mbar < 0.0:
            raise ValueError("pressure must be nonnegative")
        if self.temperature_k <= 0.0:
            raise ValueError("temperature must be positive")

    @property
    def atom_mass_kg(self) -> float:
        return self.mass_number * CONSTANTS.atomic_mass_kg

    @property
    def number_density_m3(self) -> float:
        if self.pressure_mbar == 0.0:
            return 0.0
        kb_j = CONSTANTS.boltzmann_ev_k * CONSTANTS.ev_joule
        return pressure_mbar_to_pa(self.pressure_mbar) / (kb_j * self.temperature_k)

    @property
    def mass_density_kg_m3(self) -> float:
        return self.number_density_m3 * self.atom_mass_kg

    @property
    def mass_density_ev4(self) -> float:
        return density_to_natural(self.mass_density_kg_m3)

    @property
    def interatomic_half_distance_m(self) -> float:
        """Half distance d between neighbouring atoms, 2*d = n^(-1/3)."""
        n = self.number_density_m3
        if n == 0.0:
            raise ValueError("interatomic distance undefined at zero pressure")
        return 0.5 * n ** (-1.0 / 3.0)

    def with_pressure(self, p_mbar: float) -> "GasSpec":
        return GasSpec(self.name, self.mass_number, self.nucleus_mass_ev,
                       self.nucleus_radius_m, p_mbar, self.temperature_k)


def helium(pressure_mbar: float = 1.0, temperature_k: float = 293.0) -> GasSpec:
    """Helium-4 cell filling; nucleus mass 3.7274 GeV, charge radius 1.9 fm."""
    return GasSpec(
        name="helium",
        mass_number=4.002602,
        nucleus_mass_ev=3.7274e9,
        nucleus_radius_m=1.9e-15,
        pressure_mbar=pressure_mbar,
        temperature_k=temperature_k,
    )


def pressure_to_mass_density(gas: GasSpec, p_mbar: float, temperature_k: float) -> float:
    """Ideal-gas mass density in kg/m^3 at the given pressure and temperature."""
    kb_j = CONSTANTS.boltzmann_ev_k * CONSTANTS.ev_joule
    return pressure_mbar_to_pa(p_mbar) * gas.atom_mass_kg / (kb_j * temperature_k)
