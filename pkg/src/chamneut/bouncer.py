"""Quantum bouncer: ultracold neutron levels above a horizontal mirror.

Gravity alone confines the neutron to the Airy spectrum E_k = eps_k * E0,
with z0 = (hbar^2 / (2 m^2 g))^(1/3) about 5.87 um and E0 = m g z0 about
0.6 peV.  A chameleon field sourced by the mirror adds a fractional-power
term, so the full one-dimensional potential is

    Phi(z) = m g z + beta V_n (Lambda z)^alpha_n,     alpha_n = 2/(2+n).

Levels are found by Numerov shooting from the mirror and a dichotomy on the
energy: counting extrema and sign changes of the trace decides whether a
trial energy sits below or above level k without ever needing the norm of
the wavefunction.  Airy machinery is deliberately absent; the beta = 0 run
of the same solver supplies reference states wherever they are needed
(overlaps, perturbative shifts), so the chameleon results are regression
tested against the solver itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._kernels import numerov_events
from .chameleon import ChameleonParams
from .errors import ReachOutsideWindow, SolverError
from .units import CONSTANTS, length_from_natural, length_to_natural

__all__ = [
    "BOUNCER_SCALES",
    "BouncerPotentialSpec",
    "BouncerScales",
    "BouncerSpectrum",
    "Classification",
    "WaveTrace",
    "classify_trace",
    "coupling_bound",
    "find_level",
    "numerov_integrate",
    "overlap",
    "perturbative_shift",
    "solve_spectrum",
    "transition_shift",
]

DEFAULT_STEP_UM = 0.01
DEFAULT_ZMAX_UM = 100.0
MIN_DECAY_EFOLDS = 10.0


@dataclass(frozen=True)
class BouncerScales:
    """Gravitational length and energy scales of the bouncer."""

    z0_m: float
    e0_ev: float

    @classmethod
    def from_constants(cls) -> "BouncerScales":
        m = CONSTANTS.neutron_mass_ev
        g = CONSTANTS.gravity_natural_ev
        z0_nat = (2.0 * m * m * g) ** (-1.0 / 3.0)
        return cls(z0_m=length_from_natural(z0_nat), e0_ev=m * g * z0_nat)

    @property
    def z0_um(self) -> float:
        return self.z0_m * 1e6

    @property
    def z0_natural(self) -> float:
        return length_to_natural(self.z0_m)

    @property
    def e0_pev(self) -> float:
        return self.e0_ev * 1e12


BOUNCER_SCALES = BouncerScales.from_constants()


@dataclass(frozen=True)
class BouncerPotentialSpec:
    """Mirror potential: gravity plus an optional chameleon term.

    v_n_ev is the chameleon prefactor V_n = (m/M_Pl) Lambda ((2+n)/sqrt(2))
    ^(2/(2+n)) in eV and alpha_n = 2/(2+n); with params None the potential is
    pure gravity.
    """

    params: ChameleonParams | None
    v_n_ev: float
    alpha_n: float

    @classmethod
    def pure_gravity(cls) -> "BouncerPotentialSpec":
        return cls(params=None, v_n_ev=0.0, alpha_n=1.0)

    @classmethod
    def from_params(cls, p: ChameleonParams) -> "BouncerPotentialSpec":
        alpha = 2.0 / (2.0 + p.n)
        v_n = (CONSTANTS.neutron_mass_ev / CONSTANTS.planck_mass_ev) \
            * p.lambda_ev * ((2.0 + p.n) / math.sqrt(2.0)) ** alpha
        return cls(params=p, v_n_ev=v_n, alpha_n=alpha)

    @property
    def weight(self) -> float:
        """Dimensionless chameleon strength beta V_n (Lambda z0)^alpha / E0."""
        if self.params is None or self.v_n_ev == 0.0:
            return 0.0
        lam_z0 = self.params.lambda_ev * BOUNCER_SCALES.z0_natural
        return self.params.beta * self.v_n_ev * lam_z0 ** self.alpha_n \
            / BOUNCER_SCALES.e0_ev

    def energy_pev(self, z_um) -> np.ndarray:
        """Potential energy Phi(z) in peV for z in micrometers."""
        zeta = np.asarray(z_um, dtype=float) / BOUNCER_SCALES.z0_um
        if np.any(zeta < 0.0):
            raise ValueError("z must be nonnegative")
        v = zeta + self.weight * zeta ** self.alpha_n
        return v * BOUNCER_SCALES.e0_pev


class Classification:
    """Outcome of the extrema/sign-change dichotomy for a trial energy."""

    BELOW = "below"
    AT = "at"
    ABOVE = "above"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class WaveTrace:
    """Shooting solution psi(z) with its recorded turning-point events.

    psi carries the arbitrary normalization psi'(0) = 1; terminal_behavior is
    one of converged / diverged_positive / diverged_negative.
    """

    grid_um: np.ndarray
    psi: np.ndarray
    energy_pev: float
    extrema_count: int
    terminal_behavior: str
    extrema_indices: np.ndarray
    crossing_indices: np.ndarray


@dataclass(frozen=True)
class BouncerSpectrum:
    levels_pev: tuple[tuple[int, float], ...]
    method: str


def _airy_zero_estimate(k: int) -> float:
    """Asymptotic estimate of the k-th Airy zero, good enough for bracketing."""
    return (3.0 * math.pi * (4.0 * k - 1.0) / 8.0) ** (2.0 / 3.0)


def _dimensionless_grid(step_um: float, zmax_um: float):
    if step_um <= 0.0 or zmax_um <= step_um:
        raise ValueError("need 0 < step < zmax")
    h = step_um / BOUNCER_SCALES.z0_um
    npts = int(round(zmax_um / step_um)) + 1
    zeta = np.arange(npts) * h
    return zeta, h


def _potential_values(pot: BouncerPotentialSpec, zeta: np.ndarray) -> np.ndarray:
    w = pot.weight
    if w == 0.0:
        return zeta.copy()
    return zeta + w * zeta ** pot.alpha_n


def _classify_events(n_ext, ext_idx, n_cross, cross_idx, terminal,
                     tail_decaying, k: int) -> str:
    if k < 1:
        raise ValueError("level index k must be >= 1")
    if n_ext >= k:
        i_k = ext_idx[k - 1]
        if n_cross > 0 and cross_idx[n_cross - 1] >= i_k:
            return Classification.ABOVE
        if n_ext >= k + 1:
            return Classification.BELOW
        if terminal != 0:
            return Classification.BELOW
        if tail_decaying:
            return Classification.AT
        return Classification.INDETERMINATE
    if terminal != 0:
        return Classification.BELOW
    return Classification.INDETERMINATE


def _tail_decaying(psi: np.ndarray, stop: int) -> bool:
    back = max(2, stop // 20)
    if stop - back < 0:
        return False
    return abs(psi[stop]) <= abs(psi[stop - back])


def numerov_integrate(pot: BouncerPotentialSpec, energy_pev: float,
                      step_um: float = DEFAULT_STEP_UM,
                      zmax_um: float = DEFAULT_ZMAX_UM) -> WaveTrace:
    """Shoot psi'' = 2m(Phi - E)psi/hbar^2 from the mirror at z = 0.

    Integration runs to zmax or stops early once |psi| exceeds 10^12 times
    the largest extremum magnitude (reported as a signed divergence, never an
    overflow error).
    """
    zeta, h = _dimensionless_grid(step_um, zmax_um)
    eps = energy_pev / BOUNCER_SCALES.e0_pev
    f = _potential_values(pot, zeta) - eps
    psi, stop, ext_idx, n_ext, cross_idx, n_cross, terminal = \
        numerov_events(f, h, -1)
    if terminal > 0:
        behavior = "diverged_positive"
    elif terminal < 0:
        behavior = "diverged_negative"
    elif _tail_decaying(psi, stop):
        behavior = "converged"
    else:
        behavior = "diverged_positive" if psi[stop] > 0.0 else "diverged_negative"
    return WaveTrace(
        grid_um=zeta[:stop + 1] * BOUNCER_SCALES.z0_um,
        psi=psi,
        energy_pev=energy_pev,
        extrema_count=int(n_ext),
        terminal_behavior=behavior,
        extrema_indices=np.asarray(ext_idx),
        crossing_indices=np.asarray(cross_idx),
    )


def classify_trace(trace: WaveTrace, k: int) -> str:
    """Dichotomy: is trace.energy below, at, or above level k?

    Rules: fewer than k extrema -> below; an extra extremum with no sign
    change after the k-th -> below; a sign change after the k-th extremum ->
    above; exactly k extrema with a decaying tail -> at; anything undecided
    on a too-short grid -> indeterminate.
    """
    terminal = 0
    if trace.terminal_behavior == "diverged_positive":
        terminal = 1
    elif trace.terminal_behavior == "diverged_negative":
        terminal = -1
    tail_decaying = trace.terminal_behavior == "converged"
    return _classify_events(trace.extrema_count, trace.extrema_indices,
                            len(trace.crossing_indices), trace.crossing_indices,
                            terminal, tail_decaying, k)


def _decay_efolds(v: np.ndarray, zeta: np.ndarray, eps: float) -> float:
    kappa = np.sqrt(np.clip(v - eps, 0.0, None))
    mask = zeta > 0.0
    i_turn = np.argmax(v >= eps) if np.any(v >= eps) else len(v)
    del mask
    if i_turn >= len(v) - 1:
        return 0.0
    return float(np.trapezoid(kappa[i_turn:], zeta[i_turn:]))


def find_level(pot: BouncerPotentialSpec, k: int,
               tol_pev: float | None = None,
               step_um: float = DEFAULT_STEP_UM,
               zmax_um: float = DEFAULT_ZMAX_UM) -> float:
    """Energy of level k in peV by bisection on the trace classification.

    The z-range self-extends until the forbidden region past the turning
    point holds at least 10 e-folds of decay, so divergence versus decay is
    always distinguishable at the requested tolerance.
    """
    if k < 1:
        raise ValueError("level index k must be >= 1")
    if tol_pev is None:
        tol_pev = 1e-6 * BOUNCER_SCALES.e0_pev
    tol_eps = tol_pev / BOUNCER_SCALES.e0_pev
    if tol_eps <= 0.0:
        raise ValueError("tolerance must be positive")

    w = pot.weight
    eps_seed = _airy_zero_estimate(k)
    eps_guess = eps_seed + w * max(eps_seed, 1.0) ** pot.alpha_n

    zmax = zmax_um
    zeta, h = _dimensionless_grid(step_um, zmax)
    v = _potential_values(pot, zeta)
    for _ in range(40):
        if _decay_efolds(v, zeta, eps_guess) >= MIN_DECAY_EFOLDS:
            break
        zmax *= 1.3
        zeta, h = _dimensionless_grid(step_um, zmax)
        v = _potential_values(pot, zeta)
    else:
        raise SolverError("could not build a grid with enough decay room")

    def classify(eps: float) -> str:
        psi, stop, ext_idx, n_ext, cross_idx, n_cross, terminal = \
            numerov_events(v - eps, h, k)
        return _classify_events(n_ext, ext_idx, n_cross, cross_idx, terminal,
                                terminal == 0 and _tail_decaying(psi, stop), k)

    lo = 0.0
    hi = eps_seed + w * (zeta[-1] ** pot.alpha_n) + 10.0
    for _ in range(80):
        c = classify(hi)
        if c == Classification.ABOVE:
            break
        if c == Classification.INDETERMINATE:
            zmax *= 1.5
            zeta, h = _dimensionless_grid(step_um, zmax)
            v = _potential_values(pot, zeta)
            continue
        hi *= 2.0
    else:
        raise SolverError(f"failed to bracket level {k} from above")

    extensions = 0
    while hi - lo > tol_eps:
        mid = 0.5 * (lo + hi)
        c = classify(mid)
        if c == Classification.BELOW:
            lo = mid
        elif c == Classification.ABOVE:
            hi = mid
        elif c == Classification.AT:
            return mid * BOUNCER_SCALES.e0_pev
        else:
            extensions += 1
            if extensions > 12:
                raise SolverError("trace classification stayed indeterminate")
            zmax *= 1.5
            zeta, h = _dimensionless_grid(step_um, zmax)
            v = _potential_values(pot, zeta)
    return 0.5 * (lo + hi) * BOUNCER_SCALES.e0_pev


@lru_cache(maxsize=256)
def _gravity_eps(k: int, step_um: float, zmax_um: float) -> float:
    pot = BouncerPotentialSpec.pure_gravity()
    return find_level(pot, k, tol_pev=1e-7 * BOUNCER_SCALES.e0_pev,
                      step_um=step_um, zmax_um=zmax_um) / BOUNCER_SCALES.e0_pev


@lru_cache(maxsize=1024)
def overlap(k: int, alpha: float,
            step_um: float = DEFAULT_STEP_UM,
            zmax_um: float = DEFAULT_ZMAX_UM) -> float:
    """Matrix element <psi_k| (z/z0)^alpha |psi_k> of the gravity eigenstates.

    The state comes from the beta = 0 shooting solution at the bisected level
    energy; the trace is truncated where the admixed growing solution takes
    over (the |psi| minimum past the last extremum), which leaves a relative
    error far below the 0.01 resolution of the tabulated values.
    """
    if alpha < 0.0:
        raise ValueError("alpha must be nonnegative")
    eps = _gravity_eps(k, step_um, zmax_um)
    pot = BouncerPotentialSpec.pure_gravity()
    zeta, h = _dimensionless_grid(step_um, zmax_um)
    v = _potential_values(pot, zeta)
    psi, stop, ext_idx, n_ext, cross_idx, n_cross, terminal = \
        numerov_events(v - eps, h, -1)
    if n_ext < k:
        raise SolverError(f"gravity trace for level {k} lost extrema")
    last = ext_idx[n_ext - 1]
    cut = last + int(np.argmin(np.abs(psi[last:stop + 1])))
    w2 = psi[:cut + 1] ** 2
    zz = zeta[:cut + 1]
    return float(np.trapezoid(w2 * zz ** alpha, zz) / np.trapezoid(w2, zz))


def perturbative_shift(pot: BouncerPotentialSpec, k: int,
                       step_um: float = DEFAULT_STEP_UM,
                       zmax_um: float = DEFAULT_ZMAX_UM) -> float:
    """First-order level shift beta V_n (Lambda z0)^alpha O_k(alpha) in peV."""
    if pot.params is None:
        return 0.0
    return pot.weight * overlap(k, pot.alpha_n, step_um, zmax_um) \
        * BOUNCER_SCALES.e0_pev


def transition_shift(pot: BouncerPotentialSpec, k_upper: int = 3,
                     k_lower: int = 1, exact: bool = False,
                     step_um: float = DEFAULT_STEP_UM,
                     zmax_um: float = DEFAULT_ZMAX_UM) -> float:
    """Chameleon-induced change of the k_upper -> k_lower transition energy, peV."""
    if k_upper <= k_lower:
        raise ValueError("need k_upper > k_lower")
    if exact:
        e0 = BOUNCER_SCALES.e0_pev
        up = find_level(pot, k_upper, step_um=step_um, zmax_um=zmax_um) \
            - _gravity_eps(k_upper, step_um, zmax_um) * e0
        lo = find_level(pot, k_lower, step_um=step_um, zmax_um=zmax_um) \
            - _gravity_eps(k_lower, step_um, zmax_um) * e0
        return up - lo
    return perturbative_shift(pot, k_upper, step_um, zmax_um) \
        - perturbative_shift(pot, k_lower, step_um, zmax_um)


def coupling_bound(n: int, sensitivity_pev: float,
                   lambda_ev: float = CONSTANTS.dark_energy_scale_ev,
                   exact: bool = False, k_upper: int = 3, k_lower: int = 1,
                   beta_window: tuple[float, float] = (1e2, 1e12),
                   step_um: float = DEFAULT_STEP_UM,
                   zmax_um: float = DEFAULT_ZMAX_UM) -> float:
    """Coupling beta at which the transition shift reaches the sensitivity.

    Log-space bisection over beta_window; a shift curve that never crosses
    the sensitivity inside the window raises ReachOutsideWindow.
    """
    if sensitivity_pev <= 0.0:
        raise ValueError("sensitivity must be positive")
    b_lo, b_hi = beta_window
    if not 0.0 < b_lo < b_hi:
        raise ValueError("invalid beta window")

    def excess(beta: float) -> float:
        pot = BouncerPotentialSpec.from_params(
            ChameleonParams(n=n, beta=beta, lambda_ev=lambda_ev))
        return transition_shift(pot, k_upper, k_lower, exact,
                                step_um, zmax_um) - sensitivity_pev

    if excess(b_lo) > 0.0:
        raise ReachOutsideWindow(
            f"shift already exceeds sensitivity at beta = {b_lo:g}", b_lo, b_hi)
    if excess(b_hi) < 0.0:
        raise ReachOutsideWindow(
            f"shift below sensitivity across the whole window", b_lo, b_hi)

    lo, hi = math.log(b_lo), math.log(b_hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if excess(math.exp(mid)) > 0.0:
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-10:
            break
    return math.exp(0.5 * (lo + hi))


def solve_spectrum(pot: BouncerPotentialSpec, k_max: int = 6,
                   method: str = "exact",
                   step_um: float = DEFAULT_STEP_UM,
                   zmax_um: float = DEFAULT_ZMAX_UM) -> BouncerSpectrum:
    """Levels 1..k_max in peV, exact (shooting) or gravity + first-order shift."""
    if method not in ("exact", "perturbative"):
        raise ValueError("method must be 'exact' or 'perturbative'")
    levels = []
    e0 = BOUNCER_SCALES.e0_pev
    for k in range(1, k_max + 1):
        if method == "exact":
            e = find_level(pot, k, step_um=step_um, zmax_um=zmax_um)
        else:
            e = _gravity_eps(k, step_um, zmax_um) * e0 \
                + perturbative_shift(pot, k, step_um, zmax_um)
        levels.append((k, e))
    return BouncerSpectrum(levels_pev=tuple(levels), method=method)
