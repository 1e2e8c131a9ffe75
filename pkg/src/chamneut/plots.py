"""Matplotlib renderings of the command-line outputs.

Each helper takes already-computed rows or grids and writes one PNG next to
the delimited output.  Matplotlib runs on the Agg backend so the CLI works
headless; figures are closed after saving to keep long sweeps memory-flat.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

__all__ = [
    "save_field_map",
    "save_integral_sweep_plot",
    "save_levels_plot",
    "save_phase_plot",
    "save_profile_plot",
    "save_reach_plot",
    "save_regime_map",
    "save_shift_sweep_plot",
]

_REGIME_COLORS = {0: "#4878cf", 1: "#e8a33d", 2: "#c44e52"}
_REGIME_NAMES = {0: "homogeneous", 1: "heterogeneous", 2: "strongly self-coupled"}


def _finish(fig, path) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_levels_plot(rows, path) -> None:
    """Energy-level diagram: exact and perturbative levels side by side."""
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    for k, e_exact, e_pert, _delta in rows:
        ax.hlines(e_exact, 0.1, 0.45, color="#4878cf")
        ax.hlines(e_pert, 0.55, 0.9, color="#e8a33d", linestyle="--")
        ax.annotate(f"k={int(k)}", (0.02, e_exact), fontsize=8, va="center")
    ax.hlines([], [], [], color="#4878cf", label="shooting solver")
    ax.hlines([], [], [], color="#e8a33d", linestyle="--", label="first-order shift")
    ax.set_xlim(0, 1)
    ax.set_xticks([])
    ax.set_ylabel("level energy [peV]")
    ax.set_title("Neutron bouncer levels")
    ax.legend(loc="lower right", fontsize=8)
    _finish(fig, path)


def save_shift_sweep_plot(rows, path) -> None:
    """Transition-energy shift versus coupling, log-log."""
    betas = [r[0] for r in rows]
    shifts = [r[1] for r in rows]
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    ax.loglog(betas, shifts, color="#4878cf")
    ax.set_xlabel(r"coupling $\beta$")
    ax.set_ylabel("transition shift [peV]")
    ax.set_title("Chameleon shift of the 3-1 bouncer transition")
    ax.grid(True, which="both", alpha=0.3)
    _finish(fig, path)


def save_profile_plot(x_m, phi_over_lambda, path) -> None:
    """Field dome across the cell."""
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    ax.plot(np.asarray(x_m) * 1e2, phi_over_lambda, color="#4878cf")
    ax.set_xlabel("x [cm]")
    ax.set_ylabel(r"$\varphi/\Lambda$")
    ax.set_title("Field profile across the cell")
    ax.grid(True, alpha=0.3)
    _finish(fig, path)


def save_integral_sweep_plot(rows, path) -> None:
    """Line integral versus gas pressure, log-log."""
    pressures = [r[0] for r in rows]
    integrals = [r[1] for r in rows]
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    ax.loglog(pressures, integrals, color="#4878cf")
    ax.set_xlabel("helium pressure [mbar]")
    ax.set_ylabel(r"$\int \varphi\, dx$ (natural units)")
    ax.set_title("Bubble line integral vs pressure")
    ax.grid(True, which="both", alpha=0.3)
    _finish(fig, path)


def save_phase_plot(rows, sensitivity_rad, path) -> None:
    """Interferometric phase versus pressure with the sensitivity line."""
    pressures = [r[0] for r in rows]
    phases = [r[1] for r in rows]
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    if len(rows) > 1:
        ax.loglog(pressures, phases, color="#4878cf")
    else:
        ax.scatter(pressures, phases, color="#4878cf")
        if min(pressures) > 0.0:
            ax.set_xscale("log")
        if min(phases) > 0.0:
            ax.set_yscale("log")
    ax.axhline(sensitivity_rad, color="#c44e52", linestyle=":",
               label=f"sensitivity {sensitivity_rad * 1e3:.0f} mrad")
    ax.set_xlabel("helium pressure [mbar]")
    ax.set_ylabel(r"phase shift $\delta\phi$ [rad]")
    ax.set_title("Interferometric phase vs pressure")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    _finish(fig, path)


def save_regime_map(betas, pressures, codes, path) -> None:
    """Gas-regime partition over the (pressure, coupling) plane."""
    from matplotlib.colors import BoundaryNorm, ListedColormap
    from matplotlib.patches import Patch

    cmap = ListedColormap([_REGIME_COLORS[i] for i in range(3)])
    norm = BoundaryNorm([-0.5, 0.5, 1.5, 2.5], cmap.N)
    fig, ax = plt.subplots(figsize=(5.8, 4.2))
    ax.pcolormesh(pressures, betas, codes, cmap=cmap, norm=norm, shading="nearest")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("helium pressure [mbar]")
    ax.set_ylabel(r"coupling $\beta$")
    ax.set_title("Gas regimes for the scalar field")
    handles = [Patch(color=_REGIME_COLORS[i], label=_REGIME_NAMES[i]) for i in range(3)]
    ax.legend(handles=handles, fontsize=8, loc="upper left")
    _finish(fig, path)


def save_field_map(values, side_m, path) -> None:
    """2D field map phi/Lambda over the box."""
    fig, ax = plt.subplots(figsize=(5.5, 4.6))
    extent_um = [0.0, side_m * 1e6, 0.0, side_m * 1e6]
    im = ax.imshow(values, origin="lower", extent=extent_um, cmap="viridis")
    fig.colorbar(im, ax=ax, label=r"$\varphi/\Lambda$")
    ax.set_xlabel(r"x [$\mu$m]")
    ax.set_ylabel(r"y [$\mu$m]")
    ax.set_title("Relaxed 2D field")
    _finish(fig, path)


def save_reach_plot(rows, path) -> None:
    """Experimental coupling reach versus potential index."""
    ns = [r[0] for r in rows]
    bouncer = [r[1] for r in rows]
    interf = [r[2] for r in rows]
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    ax.semilogy(ns, bouncer, "o-", color="#4878cf", label="bouncer spectroscopy")
    ax.semilogy(ns, interf, "s-", color="#e8a33d", label="interferometry")
    ax.set_xlabel("potential index n")
    ax.set_ylabel(r"reachable coupling $\beta$")
    ax.set_title("Coupling reach by experiment")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    _finish(fig, path)
