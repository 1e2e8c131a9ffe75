"""Compiled inner loops: Numerov shooting and Newton-Gauss-Seidel sweeps.

Both recurrences are inherently sequential, so they live here as numba
kernels; all surrounding logic (grids, units, convergence control) stays in
plain Python.  Sweep order and arithmetic are fixed, which keeps results
bit-reproducible run to run.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# |psi| beyond this multiple of the largest extremum magnitude counts as a
# divergence; the absolute ceiling catches runaway growth before any extremum
# has been seen (it would overflow doubles otherwise, never fail).
DIVERGENCE_FACTOR = 1.0e12
OVERFLOW_GUARD = 1.0e250


@njit(cache=True)
def numerov_events(f, h, k_stop):
    """Integrate psi'' = f(x) psi from psi(0)=0, psi'(0)=1 on a uniform grid.

    Records turning-point events along the way: indices of extrema of psi and
    indices of sign changes.  With k_stop > 0 the loop exits as soon as the
    dichotomic classification against level k_stop is decided (a sign change
    after the k_stop-th extremum, one extremum too many, or divergence);
    k_stop <= 0 integrates to the end of the grid unless psi diverges.

    Returns (psi, stop, ext_idx, n_ext, cross_idx, n_cross, terminal) where
    terminal is +1/-1 for divergence with that sign of psi and 0 when the end
    of the grid was reached.
    """
    n = f.size
    psi = np.zeros(n)
    ext_idx = np.zeros(n, np.int64)
    cross_idx = np.zeros(n, np.int64)
    n_ext = 0
    n_cross = 0
    terminal = 0
    stop = n - 1
    if n < 3:
        return psi, 0, ext_idx[:0], 0, cross_idx[:0], 0, terminal

    h2 = h * h
    psi[1] = h
    max_ext_mag = 0.0
    i_k = -1          # grid index of the k_stop-th extremum
    d_prev = psi[1]   # last nonzero forward difference (plateau guard)

    for i in range(1, n - 1):
        num = 2.0 * psi[i] * (1.0 + 5.0 * h2 * f[i] / 12.0) \
            - psi[i - 1] * (1.0 - h2 * f[i - 1] / 12.0)
        psi[i + 1] = num / (1.0 - h2 * f[i + 1] / 12.0)

        d_next = psi[i + 1] - psi[i]
        decided = False

        # extremum at i: slope changes sign (zero slopes inherit the last
        # nonzero direction so flat stretches do not double count)
        if d_next != 0.0:
            if d_prev * d_next < 0.0:
                ext_idx[n_ext] = i
                n_ext += 1
                mag = abs(psi[i])
                if mag > max_ext_mag:
                    max_ext_mag = mag
                if k_stop > 0:
                    if n_ext == k_stop:
                        i_k = i
                    elif n_ext == k_stop + 1:
                        decided = True
            d_prev = d_next

        # sign change between i and i+1
        if psi[i] != 0.0 and psi[i] * psi[i + 1] < 0.0:
            cross_idx[n_cross] = i
            n_cross += 1
            if k_stop > 0 and i_k >= 0:
                decided = True

        # divergence guards
        mag = abs(psi[i + 1])
        if (max_ext_mag > 0.0 and mag > DIVERGENCE_FACTOR * max_ext_mag) \
                or mag > OVERFLOW_GUARD:
            terminal = 1 if psi[i + 1] > 0.0 else -1
            stop = i + 1
            break

        if decided:
            stop = i + 1
            break

    return psi[:stop + 1], stop, ext_idx[:n_ext], n_ext, cross_idx[:n_cross], n_cross, terminal


@njit(cache=True)
def newton_gs_sweeps(w, src, h2, n_exp, omega, max_step, sweeps):
    """Damped Newton-Gauss-Seidel sweeps for lap(y) = -n y^-(n+1) + S, y = exp(w).

    w holds the log-field on an (ny, nx) grid; boundary entries are Dirichlet
    data and never touched.  Each interior node gets one scalar Newton update
    of the local residual, relaxed by omega and clamped to |dw| <= max_step.
    Runs `sweeps` sweeps in a fixed row-major order; returns the largest |dw|
    of the final sweep.
    """
    ny, nx = w.shape
    last_max = 0.0
    for s in range(sweeps):
        last_max = 0.0
        for j in range(1, ny - 1):
            for i in range(1, nx - 1):
                yc = np.exp(w[j, i])
                nb = np.exp(w[j - 1, i]) + np.exp(w[j + 1, i]) \
                    + np.exp(w[j, i - 1]) + np.exp(w[j, i + 1])
                ym = yc ** (-(n_exp + 1.0))
                resid = (nb - 4.0 * yc) / h2 + n_exp * ym - src[j, i]
                # d(resid)/dw at fixed neighbours, with y = exp(w)
                slope = (-4.0 / h2 - n_exp * (n_exp + 1.0) * ym / yc) * yc
                dw = -omega * resid / slope
                if dw > max_step:
                    dw = max_step
                elif dw < -max_step:
                    dw = -max_step
                w[j, i] += dw
                adw = abs(dw)
                if adw > last_max:
                    last_max = adw
    return last_max
