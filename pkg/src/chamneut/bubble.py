"""Chameleon bubble between the walls of a neutron interferometry cell.

Between two plates a distance 2R apart the field climbs from (nearly) zero at
the walls to a central value phi_0 = y0 * Lambda.  The first integral of the
static 1D equation turns everything into two one-dimensional quadratures

    J_n(a) = int_0^1 u^(n/2)   du / sqrt(1 - u^n + n a u^n (u - 1))
    K_n(a) = int_0^1 u^(1+n/2) du / sqrt(1 - u^n + n a u^n (u - 1)),

with a = beta rho y0^(n+1) / (M_Pl Lambda^3 n) in [0, 1).  The central value
solves sqrt(2) R Lambda = y0^(n/2+1) J_n(a), and the line integral of the
field across the cell is sqrt(2) y0^(n/2+2) K_n(a) (a pure number in natural
units).  The integrable inverse-square-root endpoint at u = 1 is removed by
substituting u = 1 - t^2 before handing the integrand to the quadrature.

In a dense gas a -> 1 and J_n diverges logarithmically: the quadrature root
leaves the representable a-range once M(rho) R exceeds roughly ln(1/(1-a)),
so the solver switches to the asymptotic branch y0 -> phi_min/Lambda with
line integral 2 R Lambda ybar (1 - (J_n - K_n)(1) / J_n*), which matches the
quadrature branch smoothly and tends to the plain high-pressure closed form
2 R phi_min from below.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .chameleon import ChameleonParams, min_field
from .errors import SolverError
from .units import length_to_natural

__all__ = [
    "BubbleSolution",
    "CellGeometry",
    "bubble_line_integral",
    "high_pressure_line_integral",
    "ivanov_profile",
    "j_integral",
    "k_integral",
    "profile_samples",
    "solve_y0",
    "vacuum_line_integral",
]

Q_FLOOR = 1e-70
RESIDUAL_TOL = 1e-8
MAX_BISECT = 200
QUAD_OPTS = dict(epsabs=0.0, epsrel=1e-11, limit=400)


@dataclass(frozen=True)
class CellGeometry:
    """Cell of full width 2R between the two walls."""

    half_width_m: float

    def __post_init__(self) -> None:
        if self.half_width_m <= 0.0:
            raise ValueError("cell half-width must be positive")

    @classmethod
    def from_cell_cm(cls, full_width_cm: float) -> "CellGeometry":
        return cls(half_width_m=0.5 * full_width_cm * 1e-2)

    @property
    def half_width_natural(self) -> float:
        return length_to_natural(self.half_width_m)


@dataclass(frozen=True)
class BubbleSolution:
    """Central field and line integral of one bubble solve.

    y0 is phi(0)/Lambda, alpha_complement is 1 - alpha where alpha in [0, 1)
    is the bubble-shape argument (stored as the complement because the
    screened regime drives alpha within machine epsilon of one),
    line_integral the dimensionless natural-units value of int phi dx, and
    branch one of vacuum / quadrature / high_pressure.
    """

    y0: float
    alpha_complement: float
    line_integral: float
    branch: str
    residual: float

    @property
    def alpha_arg(self) -> float:
        return 1.0 - self.alpha_complement


@lru_cache(maxsize=None)
def _wall_poly_coeffs(n: int) -> tuple:
    """1 - (1-d)^n (1 + n d) = sum_{j=2}^{n+1} b_j d^j, exact integers."""
    return tuple((-1) ** (j + 1) * (math.comb(n, j) - n * math.comb(n, j - 1))
                 for j in range(2, n + 2))


def _sqrt_bracket_q(t: float, n: int, q: float) -> float:
    """sqrt(1 - u^n + n alpha u^n (u - 1)) at u = 1 - t^2 and q = 1 - alpha.

    Split as [1 - u^n (1 + n (1-u))] + n q (1-u) u^n: both pieces are
    nonnegative, and the first is a polynomial in 1-u with no constant or
    linear term, so the near-wall limit n q t^2 + n (n+1)/2 t^4 keeps full
    relative accuracy however small q gets (the naive alpha form cancels
    catastrophically once q drops near machine epsilon).
    """
    delta = t * t
    if delta < 0.25:
        acc = 0.0
        for b in reversed(_wall_poly_coeffs(n)):
            acc = acc * delta + b
        screened = acc * delta * delta
    else:
        screened = 1.0 - (1.0 - delta) ** n * (1.0 + n * delta)
    return math.sqrt(screened + n * q * delta * (1.0 - delta) ** n)


def _checked_quad(f, a: float, b: float):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        return quad(f, a, b, **QUAD_OPTS)


def _singular_quad_q(n: int, q: float, extra_power: float) -> float:
    """int_0^1 u^(n/2+extra) / sqrt(bracket) du with u = 1 - t^2 substituted.

    For small q the integrand is a plateau of height 1/sqrt(n q) out to the
    knee t ~ sqrt(q), then a 1/t stretch up to t ~ 1 (the log divergence of
    the screened limit).  The plateau is integrated directly and the stretch
    in log t, so the cost stays at three quadratures however small q is.
    """

    def f(t: float) -> float:
        u = 1.0 - t * t
        return 2.0 * t * u ** (0.5 * n + extra_power) / _sqrt_bracket_q(t, n, q)

    if q >= 0.01:
        total, err = _checked_quad(f, 0.0, 1.0)
    else:
        knee = math.sqrt(q)
        v1, e1 = _checked_quad(f, 0.0, knee)
        v2, e2 = _checked_quad(lambda v: math.exp(v) * f(math.exp(v)),
                               math.log(knee), math.log(0.3))
        v3, e3 = _checked_quad(f, 0.3, 1.0)
        total, err = v1 + v2 + v3, e1 + e2 + e3
    if not math.isfinite(total) or err > 1e-7 * max(abs(total), 1e-3):
        raise SolverError("bubble quadrature failed to converge")
    return total


def _check_args(n: int, alpha: float) -> None:
    if int(n) != n or n < 1:
        raise ValueError("n must be a positive integer")
    if not 0.0 <= alpha < 1.0:
        raise ValueError("alpha must lie in [0, 1)")


def j_integral(n: int, alpha: float) -> float:
    """Wall-to-center shape integral J_n(alpha); increasing in alpha."""
    _check_args(n, alpha)
    return _singular_quad_q(n, 1.0 - alpha, 0.0)


def k_integral(n: int, alpha: float) -> float:
    """Line-integral shape factor K_n(alpha); K_n < J_n pointwise."""
    _check_args(n, alpha)
    return _singular_quad_q(n, 1.0 - alpha, 1.0)


def _jk_deficit_at_unity(n: int) -> float:
    """(J_n - K_n) at alpha = 1: the extra u factor removes the divergence."""

    def f(t: float) -> float:
        u = 1.0 - t * t
        return 2.0 * t**3 * u ** (0.5 * n) / _sqrt_bracket_q(t, n, 0.0)

    val, err = _checked_quad(f, 0.0, 1.0)
    if not math.isfinite(val) or err > 1e-7 * max(abs(val), 1e-3):
        raise SolverError("deficit quadrature failed to converge")
    return val


def _vacuum_y0(p: ChameleonParams, geom: CellGeometry) -> float:
    target = math.sqrt(2.0) * geom.half_width_natural * p.lambda_ev
    return (target / j_integral(p.n, 0.0)) ** (2.0 / (p.n + 2.0))


def vacuum_line_integral(p: ChameleonParams, geom: CellGeometry) -> float:
    """Closed-form int phi dx for an evacuated cell (natural units)."""
    y0 = _vacuum_y0(p, geom)
    return math.sqrt(2.0) * y0 ** (0.5 * p.n + 2.0) * k_integral(p.n, 0.0)


def high_pressure_line_integral(p: ChameleonParams, geom: CellGeometry,
                                rho_ev4: float) -> float:
    """Dense-gas closed form 2 R phi_min(rho), an upper bound on the integral."""
    if rho_ev4 <= 0.0:
        raise ValueError("high-pressure form needs rho > 0")
    return 2.0 * geom.half_width_natural * min_field(p, rho_ev4)


def solve_y0(p: ChameleonParams, geom: CellGeometry, rho_ev4: float) -> BubbleSolution:
    """Central field of the bubble at gas density rho (eV^4).

    Monotone log-space bisection of y0^(n/2+1) J_n(a(y0)) = sqrt(2) R Lambda,
    with a(y0) = (y0/ybar)^(n+1) clamped below 1.  When the clamped range
    cannot reach the target (deep screening, M(rho) R >~ 28) the solution has
    settled at the in-medium minimum and the asymptotic branch takes over.
    """
    if rho_ev4 < 0.0:
        raise ValueError("rho must be nonnegative")
    n = p.n
    lam = p.lambda_ev
    target = math.sqrt(2.0) * geom.half_width_natural * lam
    power = 0.5 * n + 1.0

    if rho_ev4 == 0.0 or p.beta == 0.0:
        # an uncoupled field does not see the gas either
        y0 = (target / j_integral(n, 0.0)) ** (1.0 / power)
        line = math.sqrt(2.0) * y0 ** (power + 1.0) * k_integral(n, 0.0)
        return BubbleSolution(y0=y0, alpha_complement=1.0, line_integral=line,
                              branch="vacuum", residual=0.0)

    ybar = min_field(p, rho_ev4) / lam

    # The implicit equation is monotone in alpha (both y and J_n grow with
    # it), and the root can sit within machine epsilon of either alpha = 0
    # (dilute gas) or alpha = 1 (screened), so bisect on the logit of alpha,
    # carrying alpha and its complement q = 1 - alpha as an exact pair.
    def implicit(a: float, q: float) -> float:
        return (ybar * a ** (1.0 / (n + 1.0))) ** power \
            * _singular_quad_q(n, q, 0.0) - target

    if implicit(1.0 - Q_FLOOR, Q_FLOOR) < 0.0:
        # Screened regime: y0 is exponentially close to ybar and the needed
        # alpha is beyond the quadrature range; expand around alpha = 1.
        j_star = target / ybar**power
        line = 2.0 * geom.half_width_natural * lam * ybar \
            * (1.0 - _jk_deficit_at_unity(n) / j_star)
        return BubbleSolution(y0=ybar, alpha_complement=Q_FLOOR,
                              line_integral=line, branch="high_pressure",
                              residual=0.0)

    # y exceeds (target / J(q_floor))^(1/power) at the root, so an alpha a
    # factor ~2^(n+1) below that maps to a guaranteed negative residual
    y_floor = (target / _singular_quad_q(n, Q_FLOOR, 0.0)) ** (1.0 / power)
    a_lo = max(min((0.5 * y_floor / ybar) ** (n + 1.0), 0.5), 1e-290)
    if implicit(a_lo, 1.0 - a_lo) >= 0.0:
        raise SolverError("failed to bracket the bubble central field")
    lo = math.log(a_lo / (1.0 - a_lo))
    hi = math.log((1.0 - Q_FLOOR) / Q_FLOOR)
    a_mid, q_mid = 1.0 - Q_FLOOR, Q_FLOOR
    for _ in range(MAX_BISECT):
        mid = 0.5 * (lo + hi)
        a_mid = 1.0 / (1.0 + math.exp(-mid))
        q_mid = 1.0 / (1.0 + math.exp(mid))
        g = implicit(a_mid, q_mid)
        if abs(g) <= RESIDUAL_TOL * target:
            break
        if g > 0.0:
            hi = mid
        else:
            lo = mid
    else:
        raise SolverError("bubble bisection did not reach residual tolerance")

    y0 = ybar * a_mid ** (1.0 / (n + 1.0))
    line = math.sqrt(2.0) * y0 ** (power + 1.0) * _singular_quad_q(n, q_mid, 1.0)
    return BubbleSolution(y0=y0, alpha_complement=q_mid, line_integral=line,
                          branch="quadrature",
                          residual=abs(implicit(a_mid, q_mid)) / target)


def bubble_line_integral(p: ChameleonParams, geom: CellGeometry,
                         rho_ev4: float) -> float:
    """int phi dx across the cell, natural units (eV * eV^-1)."""
    return solve_y0(p, geom, rho_ev4).line_integral


def ivanov_profile(p: ChameleonParams, geom: CellGeometry, x_m) -> np.ndarray:
    """Closed-form vacuum bubble phi(x), exact for n = 2 and a few percent
    off for larger n:

        phi(x) = Lambda (R Lambda)^(2/(n+2))
                 ((n+2)/(2 sqrt 2) (1 - (x/R)^2))^(2/(n+2)).
    """
    x = np.asarray(x_m, dtype=float)
    r_m = geom.half_width_m
    if np.any(np.abs(x) > r_m * (1.0 + 1e-12)):
        raise ValueError("profile points must satisfy |x| <= R")
    lam = p.lambda_ev
    rl = geom.half_width_natural * lam
    shape = (p.n + 2.0) / (2.0 * math.sqrt(2.0)) * np.clip(1.0 - (x / r_m) ** 2, 0.0, None)
    out = lam * rl ** (2.0 / (p.n + 2.0)) * shape ** (2.0 / (p.n + 2.0))
    return out if out.ndim else float(out)


def _cumulative_positions(n: int, q: float, s_grid: np.ndarray) -> np.ndarray:
    """x-offsets from the center: T(s) = int_0^s 2 t u^(n/2)/sqrt(bracket) dt
    accumulated interval by interval along the sample grid (q = 1 - alpha).
    Decade points around the knee t ~ sqrt(q) are inserted so no single
    piece straddles the plateau-to-1/t turnover."""

    def f(t: float) -> float:
        u = 1.0 - t * t
        return 2.0 * t * u ** (0.5 * n) / _sqrt_bracket_q(t, n, q)

    interior = []
    if q < 0.01:
        b = math.sqrt(q)
        while b < 0.5:
            if s_grid[0] < b < s_grid[-1]:
                interior.append(b)
            b *= 10.0
    refined = np.unique(np.concatenate([s_grid, interior]))
    pieces = np.zeros(len(refined))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        for i in range(1, len(refined)):
            val, _ = quad(f, refined[i - 1], refined[i],
                          epsabs=0.0, epsrel=1e-10, limit=200)
            pieces[i] = val
    cumulative = np.cumsum(pieces)
    return cumulative[np.searchsorted(refined, s_grid)]


def profile_samples(p: ChameleonParams, geom: CellGeometry, rho_ev4: float,
                    count: int = 2001):
    """Semi-analytic bubble profile: (x in meters, phi in eV), wall to wall.

    Positions follow from inverting the first integral, x(phi) = int dphi /
    sqrt(2 (V_eff(phi) - V_eff(phi_0))); samples are symmetric about x = 0,
    monotone in |x|, and pinned to phi = 0 at x = +-R.  In the screened
    branch the profile is a flat core at phi_min with thin wall layers.
    """
    if count < 9:
        raise ValueError("count too small for a usable profile")
    sol = solve_y0(p, geom, rho_ev4)
    n = p.n
    lam = p.lambda_ev
    r_nat = geom.half_width_natural
    phi0 = sol.y0 * lam
    scale = sol.y0 ** (0.5 * n + 1.0) / (math.sqrt(2.0) * lam)

    m = count // 2 + 1
    if sol.branch in ("vacuum", "quadrature"):
        # phi/phi0 = 1 - s^2: uniform s gives uniform x near the center and
        # geometric clustering of x toward the wall singularity
        s = np.linspace(0.0, 1.0, m)
        x_nat = scale * _cumulative_positions(n, sol.alpha_complement, s)
        phi = phi0 * (1.0 - s**2)
    else:
        w_edge = 1.0 - 1e-6
        s_edge = math.sqrt(1.0 - w_edge)
        m_layer = max(m // 2, 8)
        m_core = m - m_layer
        s_layer = np.linspace(s_edge, 1.0, m_layer)
        x_layer = scale * _cumulative_positions(n, sol.alpha_complement, s_layer)
        x_wall_side = x_layer[-1]
        if x_wall_side >= r_nat:
            raise SolverError("wall layer thicker than the half cell")
        # flat core at the in-medium minimum, then the wall layer offsets
        # measured inward from the wall
        x_core = np.linspace(0.0, r_nat - x_wall_side, m_core, endpoint=False)
        x_nat = np.concatenate([x_core, r_nat - x_wall_side + x_layer])
        phi = np.concatenate([np.full(m_core, phi0),
                              phi0 * (1.0 - s_layer**2)])

    x_nat[-1] = r_nat  # analytic endpoint: J-integral residual <= 1e-8
    phi[-1] = 0.0
    x_m = x_nat / length_to_natural(1.0)
    x_full = np.concatenate([-x_m[:0:-1], x_m])
    phi_full = np.concatenate([phi[:0:-1], phi])
    return x_full, phi_full
