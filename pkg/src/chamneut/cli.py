"""Command-line front end: every computation as a subcommand.

Subcommands: bouncer, bubble, phase, regimes, pde, exclusion.  Each writes
one delimited file (CSV with a versioned header comment, or JSON) plus a
rendered PNG figure next to it; the pde subcommand also dumps the raw grid
as little-endian binary.  Options come from flags, which override a
key=value config file, which overrides built-in defaults.  Identical
effective options produce byte-identical delimited output.

Exit codes: 0 success, 2 option/config validation failure, 3 solver failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, fields

import numpy as np

from . import bouncer as bnc
from . import interferometry as itf
from . import microstructure as mst
from . import pde
from .bubble import CellGeometry, profile_samples, solve_y0
from .chameleon import ChameleonParams
from .errors import SolverError
from .units import CONSTANTS, UnitError, helium

__all__ = ["RunConfig", "main"]

CSV_SCHEMA = "chamneut-csv v1"
JSON_SCHEMA = "chamneut-json v1"

# Illustrative heavy nucleus for the point-source runs (xenon mass); the
# single-cell deposition only uses the mass, not the nuclear radius.
NUCLEUS_MASS_EV = 131.293 * 0.93149410372e9

# Fractional (x, y) box positions per nucleus count: center, pair, triangle,
# four corners, quincunx.
NUCLEI_LAYOUTS = {
    0: (),
    1: ((0.5, 0.5),),
    2: ((0.3, 0.5), (0.7, 0.5)),
    3: ((0.3, 0.3), (0.7, 0.3), (0.5, 0.7)),
    4: ((0.3, 0.3), (0.3, 0.7), (0.7, 0.3), (0.7, 0.7)),
    5: ((0.3, 0.3), (0.3, 0.7), (0.7, 0.3), (0.7, 0.7), (0.5, 0.5)),
}

SWEEP_PRESSURES_MBAR = np.logspace(-4.0, 2.0, 61)
SWEEP_BETAS = np.logspace(6.0, 11.0, 26)
REGIME_BETA_WINDOW = (1e4, 1e14)
REGIME_PRESSURE_WINDOW = (1e-4, 1e2)
BOUNCER_SENSITIVITY_PEV = 0.01

_OPTION_TYPES = {
    "n": int,
    "beta": float,
    "lambda-ev": float,
    "pressure-mbar": float,
    "temperature-k": float,
    "cell-cm": float,
    "wavenumber-inv-nm": float,
    "step-um": float,
    "zmax-um": float,
    "grid": int,
    "tol": float,
    "format": str,
    "out": str,
    "sweep": bool,
    "nuclei": int,
    "no-plot": bool,
}

_DEFAULTS = {
    "n": 2,
    "beta": 1.0e9,
    "lambda_ev": CONSTANTS.dark_energy_scale_ev,
    "pressure_mbar": 0.0,
    "temperature_k": 293.0,
    "cell_cm": 1.0,
    "wavenumber_inv_nm": itf.DEFAULT_WAVENUMBER_INV_NM,
    "step_um": 0.01,
    "zmax_um": 100.0,
    "grid": None,
    "tol": None,
    "format": "csv",
    "out": None,
    "sweep": False,
    "nuclei": 0,
    "no_plot": False,
}


class OptionError(ValueError):
    """Invalid option or config-file entry."""


@dataclass
class RunConfig:
    """Validated effective options for one subcommand run."""

    command: str
    explicit: frozenset
    n: int
    beta: float
    lambda_ev: float
    pressure_mbar: float
    temperature_k: float
    cell_cm: float
    wavenumber_inv_nm: float
    step_um: float
    zmax_um: float
    grid: int | None
    tol: float | None
    format: str
    out: str | None
    sweep: bool
    nuclei: int
    no_plot: bool

    def validate(self) -> None:
        if self.n < 1:
            raise OptionError(f"n must be a positive integer, got {self.n}")
        if self.beta < 0.0:
            raise OptionError(f"beta must be nonnegative, got {self.beta}")
        if self.lambda_ev <= 0.0:
            raise OptionError(f"lambda-ev must be positive, got {self.lambda_ev}")
        if self.pressure_mbar < 0.0:
            raise OptionError(f"pressure-mbar must be nonnegative, got {self.pressure_mbar}")
        if self.temperature_k <= 0.0:
            raise OptionError(f"temperature-k must be positive, got {self.temperature_k}")
        if self.cell_cm <= 0.0:
            raise OptionError(f"cell-cm must be positive, got {self.cell_cm}")
        if self.wavenumber_inv_nm <= 0.0:
            raise OptionError(f"wavenumber-inv-nm must be positive, got {self.wavenumber_inv_nm}")
        if self.step_um <= 0.0:
            raise OptionError(f"step-um must be positive, got {self.step_um}")
        if self.zmax_um <= self.step_um:
            raise OptionError(f"zmax-um must exceed step-um, got {self.zmax_um}")
        if self.grid is not None and self.grid < 3:
            raise OptionError(f"grid must be at least 3, got {self.grid}")
        if self.tol is not None and self.tol <= 0.0:
            raise OptionError(f"tol must be positive, got {self.tol}")
        if self.format not in ("csv", "json"):
            raise OptionError(f"format must be csv or json, got {self.format}")
        if self.nuclei not in NUCLEI_LAYOUTS:
            raise OptionError(
                f"nuclei must be one of {sorted(NUCLEI_LAYOUTS)}, got {self.nuclei}")

    @property
    def params(self) -> ChameleonParams:
        return ChameleonParams(n=self.n, beta=self.beta, lambda_ev=self.lambda_ev)

    @property
    def gas(self):
        return helium(self.pressure_mbar, self.temperature_k)

    @property
    def geometry(self) -> CellGeometry:
        return CellGeometry.from_cell_cm(self.cell_cm)

    @property
    def beam(self) -> itf.BeamSpec:
        return itf.BeamSpec(wavenumber_inv_nm=self.wavenumber_inv_nm)

    def out_path(self) -> str:
        return self.out or f"chamneut_{self.command}.{self.format}"

    def sibling_path(self, extension: str) -> str:
        return os.path.splitext(self.out_path())[0] + extension

    def public_items(self) -> list[tuple[str, object]]:
        skip = {"command", "explicit", "format", "out", "no_plot"}
        items = []
        for f in fields(self):
            if f.name in skip:
                continue
            value = getattr(self, f.name)
            if value is not None:
                items.append((f.name, value))
        return items


def _parse_config_file(path: str) -> dict:
    """Read key=value lines; '#' starts a comment; unknown keys rejected."""
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise OptionError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise OptionError(f"{path}:{lineno}: expected key = value, got {line!r}")
        key, _, text = line.partition("=")
        key = key.strip().lower().replace("_", "-")
        text = text.strip()
        if key not in _OPTION_TYPES:
            raise OptionError(f"{path}:{lineno}: unknown config key {key!r}")
        caster = _OPTION_TYPES[key]
        if caster is bool:
            low = text.lower()
            if low in ("true", "1", "yes", "on"):
                value = True
            elif low in ("false", "0", "no", "off"):
                value = False
            else:
                raise OptionError(f"{path}:{lineno}: {key} expects true/false, got {text!r}")
        else:
            try:
                value = caster(text)
            except ValueError as exc:
                raise OptionError(
                    f"{path}:{lineno}: bad value for {key}: {text!r}") from exc
        values[key.replace("-", "_")] = value
    return values


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chamneut",
        description="Scalar dark-energy fields probed with slow neutrons: "
                    "bouncer spectra, cell field profiles, interferometric "
                    "phases, gas regime maps, 2D field relaxation.")
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("model and experiment options")
    g.add_argument("--n", type=int, default=None,
                   help="potential index n (default 2)")
    g.add_argument("--beta", type=float, default=None,
                   help="matter coupling beta (default 1e9)")
    g.add_argument("--lambda-ev", type=float, default=None,
                   help="dark-energy scale Lambda in eV (default 2.4e-3)")
    g.add_argument("--pressure-mbar", type=float, default=None,
                   help="helium pressure in mbar (default 0, vacuum)")
    g.add_argument("--temperature-k", type=float, default=None,
                   help="gas temperature in K (default 293)")
    g.add_argument("--cell-cm", type=float, default=None,
                   help="full cell width 2R in cm (default 1); also the pde "
                        "box side (pde with --nuclei defaults to 2e-5 cm)")
    g.add_argument("--wavenumber-inv-nm", type=float, default=None,
                   help="neutron wavenumber in 1/nm (default 23)")
    g.add_argument("--step-um", type=float, default=None,
                   help="bouncer integration step in um (default 0.01)")
    g.add_argument("--zmax-um", type=float, default=None,
                   help="bouncer integration range in um (default 100)")
    g.add_argument("--grid", type=int, default=None,
                   help="node count: pde nodes per side (129, or 257 with "
                        "--nuclei), regimes axis length (50), bubble profile "
                        "samples (2001)")
    g.add_argument("--tol", type=float, default=None,
                   help="solver tolerance: peV for bouncer levels, scaled "
                        "residual for pde (module defaults when omitted)")
    g.add_argument("--sweep", action="store_true", default=None,
                   help="sweep the natural axis: coupling for bouncer, "
                        "pressure for bubble and phase")
    g.add_argument("--nuclei", type=int, default=None,
                   help="pde: number of point nuclei to deposit (0-5, "
                        "default 0)")
    o = common.add_argument_group("input/output options")
    o.add_argument("--config", type=str, default=None,
                   help="key = value options file; flags override it")
    o.add_argument("--format", choices=("csv", "json"), default=None,
                   help="delimited output format (default csv)")
    o.add_argument("--out", type=str, default=None,
                   help="output path (default chamneut_<command>.<format>)")
    o.add_argument("--no-plot", action="store_true", default=None,
                   help="skip rendering the PNG figure")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("bouncer", parents=[common],
                   help="neutron bouncer energy levels, exact vs first-order; "
                        "--sweep scans the transition shift over beta")
    sub.add_parser("bubble", parents=[common],
                   help="1D field profile across the cell and its line "
                        "integral; --sweep scans the integral over pressure")
    sub.add_parser("phase", parents=[common],
                   help="interferometric phase shift of the cell field; "
                        "--sweep scans pressure; json adds reach per n")
    sub.add_parser("regimes", parents=[common],
                   help="gas regime partition over the (beta, pressure) plane")
    sub.add_parser("pde", parents=[common],
                   help="relax the 2D field in a box, optionally with point "
                        "nuclei; also writes a binary grid dump")
    sub.add_parser("exclusion", parents=[common],
                   help="coupling reach per potential index for bouncer "
                        "spectroscopy and interferometry")
    return parser


def _merge_config(args: argparse.Namespace) -> RunConfig:
    effective = dict(_DEFAULTS)
    explicit = set()
    if args.config is not None:
        file_values = _parse_config_file(args.config)
        effective.update(file_values)
        explicit.update(file_values)
    for key in effective:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            effective[key] = flag_value
            explicit.add(key)
    cfg = RunConfig(command=args.command, explicit=frozenset(explicit), **effective)
    cfg.validate()
    return cfg


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.12g}"
    return str(value)


def _jsonable(value):
    if isinstance(value, bool):
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    return value


def _write_csv(path: str, command: str, comments, header, rows) -> None:
    lines = [f"# {CSV_SCHEMA} {command}"]
    lines.extend(f"# {key} = {_fmt(value)}" for key, value in comments)
    lines.append(",".join(header))
    lines.extend(",".join(_fmt(cell) for cell in row) for row in rows)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _write_json(path: str, command: str, comments, header, rows, extras=None) -> None:
    payload = {
        "schema": JSON_SCHEMA,
        "command": command,
        "params": {key: _jsonable(value) for key, value in comments},
        "columns": list(header),
        "rows": [[_jsonable(cell) for cell in row] for row in rows],
    }
    if extras:
        payload.update(extras)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _emit(cfg: RunConfig, comments, header, rows, extras=None) -> None:
    path = cfg.out_path()
    if cfg.format == "csv":
        _write_csv(path, cfg.command, comments, header, rows)
    else:
        _write_json(path, cfg.command, comments, header, rows, extras)


def _cmd_bouncer(cfg: RunConfig) -> int:
    from . import plots
    pot = (bnc.BouncerPotentialSpec.pure_gravity() if cfg.beta == 0.0
           else bnc.BouncerPotentialSpec.from_params(cfg.params))
    comments = cfg.public_items()
    if cfg.sweep:
        rows = []
        for beta in SWEEP_BETAS:
            pot_b = bnc.BouncerPotentialSpec.from_params(
                ChameleonParams(n=cfg.n, beta=float(beta), lambda_ev=cfg.lambda_ev))
            shift = bnc.transition_shift(pot_b, step_um=cfg.step_um,
                                         zmax_um=cfg.zmax_um)
            rows.append((float(beta), shift))
        _emit(cfg, comments, ("beta", "transition_shift_pev"), rows)
        if not cfg.no_plot:
            plots.save_shift_sweep_plot(rows, cfg.sibling_path(".png"))
        return 0
    exact = bnc.solve_spectrum(pot, method="exact", step_um=cfg.step_um,
                               zmax_um=cfg.zmax_um)
    pert = bnc.solve_spectrum(pot, method="perturbative", step_um=cfg.step_um,
                              zmax_um=cfg.zmax_um)
    rows = [(k, e, ep, e - ep)
            for (k, e), (_, ep) in zip(exact.levels_pev, pert.levels_pev)]
    header = ("k", "energy_exact_pev", "energy_perturbative_pev", "delta_pev")
    _emit(cfg, comments, header, rows)
    if not cfg.no_plot:
        plots.save_levels_plot(rows, cfg.sibling_path(".png"))
    return 0


def _cmd_bubble(cfg: RunConfig) -> int:
    from . import plots
    p, geom = cfg.params, cfg.geometry
    base_gas = cfg.gas
    comments = cfg.public_items()
    if cfg.sweep:
        rows = []
        for pres in SWEEP_PRESSURES_MBAR:
            gas = base_gas.with_pressure(float(pres))
            sol = solve_y0(p, geom, gas.mass_density_ev4)
            report = mst.classify(p, gas)
            rows.append((float(pres), sol.line_integral, sol.y0, sol.branch,
                         report.regime,
                         report.regime == mst.HOMOGENEOUS_PERTURBATIVE))
        header = ("pressure_mbar", "line_integral_natural", "y0", "branch",
                  "regime", "model_valid")
        _emit(cfg, comments, header, rows)
        if not cfg.no_plot:
            plots.save_integral_sweep_plot(rows, cfg.sibling_path(".png"))
        return 0
    rho = base_gas.mass_density_ev4
    sol = solve_y0(p, geom, rho)
    report = mst.classify(p, base_gas)
    count = cfg.grid or 2001
    x_m, phi_ev = profile_samples(p, geom, rho, count=count)
    comments = comments + [
        ("line_integral_natural", sol.line_integral),
        ("y0", sol.y0),
        ("branch", sol.branch),
        ("regime", report.regime),
    ]
    rows = [(x, phi, phi / p.lambda_ev) for x, phi in zip(x_m, phi_ev)]
    header = ("x_m", "phi_ev", "phi_over_lambda")
    _emit(cfg, comments, header, rows)
    if not cfg.no_plot:
        plots.save_profile_plot(x_m, phi_ev / p.lambda_ev, cfg.sibling_path(".png"))
    return 0


def _cmd_phase(cfg: RunConfig) -> int:
    from . import plots
    p, geom, beam = cfg.params, cfg.geometry, cfg.beam
    base_gas = cfg.gas
    comments = cfg.public_items()
    header = ("pressure_mbar", "delta_phi_rad", "regime", "suppression_factor",
              "out_of_validity")
    if cfg.sweep:
        sweep = itf.pressure_sweep(p, base_gas, geom, beam, SWEEP_PRESSURES_MBAR)
        rows = []
        for row in sweep:
            res = itf.phase_shift(p, base_gas.with_pressure(row.pressure_mbar),
                                  geom, beam)
            rows.append((row.pressure_mbar, row.delta_phi_rad, row.regime,
                         res.suppression_factor, row.out_of_validity))
    else:
        res = itf.phase_shift(p, base_gas, geom, beam)
        rows = [(cfg.pressure_mbar, res.delta_phi_rad, res.regime_used,
                 res.suppression_factor, res.out_of_validity)]
    extras = None
    if cfg.format == "json":
        reach = {}
        for n in range(1, 7):
            reach[str(n)] = itf.coupling_reach(n, base_gas, geom, beam,
                                               lambda_ev=cfg.lambda_ev)
        extras = {"reach_per_n": reach,
                  "sensitivity_rad": beam.phase_sensitivity_rad}
    _emit(cfg, comments, header, rows, extras)
    if not cfg.no_plot:
        plots.save_phase_plot(rows, beam.phase_sensitivity_rad,
                              cfg.sibling_path(".png"))
    return 0


def _cmd_regimes(cfg: RunConfig) -> int:
    from . import plots
    count = cfg.grid or 50
    betas = np.logspace(np.log10(REGIME_BETA_WINDOW[0]),
                        np.log10(REGIME_BETA_WINDOW[1]), count)
    pressures = np.logspace(np.log10(REGIME_PRESSURE_WINDOW[0]),
                            np.log10(REGIME_PRESSURE_WINDOW[1]), count)
    gas = cfg.gas
    grid_rows = mst.regime_grid(cfg.params, gas, betas, pressures)
    rows = [(beta, pres, mst.REGIME_CODES[regime], regime)
            for beta, pres, regime in grid_rows]
    header = ("beta", "pressure_mbar", "regime_code", "regime")
    _emit(cfg, cfg.public_items(), header, rows)
    if not cfg.no_plot:
        codes = np.array([r[2] for r in rows], dtype=int).reshape(count, count)
        plots.save_regime_map(betas, pressures, codes, cfg.sibling_path(".png"))
    return 0


def _cmd_pde(cfg: RunConfig) -> int:
    from . import plots
    p = cfg.params
    if cfg.nuclei > 0 and "cell_cm" not in cfg.explicit:
        side_m = 200e-9
    else:
        side_m = cfg.cell_cm * 1e-2
    count = cfg.grid or (257 if cfg.nuclei > 0 else 129)
    rho = cfg.gas.mass_density_ev4 if cfg.pressure_mbar > 0.0 else 0.0
    grid = pde.make_box(p, side_m, count, rho_ev4=rho)
    if cfg.nuclei > 0:
        positions = [(fx * side_m, fy * side_m)
                     for fx, fy in NUCLEI_LAYOUTS[cfg.nuclei]]
        grid = pde.add_nuclei(grid, positions, NUCLEUS_MASS_EV)
    tol = cfg.tol if cfg.tol is not None else pde.DEFAULT_TOL
    solved, report = pde.solve_box(p, grid, tol=tol)
    comments = cfg.public_items() + [
        ("side_m", side_m),
        ("count", count),
        ("spacing_m", solved.spacing_m),
        ("iterations", report.iterations),
        ("final_residual", report.final_residual),
        ("converged", report.converged),
    ]
    xs = solved.node_x_m()
    ys = solved.node_y_m()
    rows = ((xs[i], ys[j], solved.values[j, i])
            for j in range(count) for i in range(count))
    header = ("x_m", "y_m", "phi_over_lambda")
    _emit(cfg, comments, header, rows)
    pde.export_binary(solved, cfg.sibling_path(".bin"), lambda_ev=cfg.lambda_ev)
    if not cfg.no_plot:
        plots.save_field_map(solved.values, side_m, cfg.sibling_path(".png"))
    if not report.converged:
        raise SolverError(
            f"relaxation stopped at residual {report.final_residual:.3e} after "
            f"{report.iterations} sweeps (partial field written)")
    return 0


def _cmd_exclusion(cfg: RunConfig) -> int:
    from . import plots
    geom, beam, base_gas = cfg.geometry, cfg.beam, cfg.gas
    rows = []
    for n in range(1, 7):
        b_bounce = bnc.coupling_bound(n, BOUNCER_SENSITIVITY_PEV,
                                      lambda_ev=cfg.lambda_ev,
                                      step_um=cfg.step_um, zmax_um=cfg.zmax_um)
        b_interf = itf.coupling_reach(n, base_gas, geom, beam,
                                      lambda_ev=cfg.lambda_ev)
        rows.append((n, b_bounce, b_interf))
    header = ("n", "bouncer_reach_beta", "interferometry_reach_beta")
    comments = cfg.public_items() + [
        ("bouncer_sensitivity_pev", BOUNCER_SENSITIVITY_PEV),
        ("phase_sensitivity_rad", beam.phase_sensitivity_rad),
    ]
    _emit(cfg, comments, header, rows)
    if not cfg.no_plot:
        plots.save_reach_plot(rows, cfg.sibling_path(".png"))
    return 0


_COMMANDS = {
    "bouncer": _cmd_bouncer,
    "bubble": _cmd_bubble,
    "phase": _cmd_phase,
    "regimes": _cmd_regimes,
    "pde": _cmd_pde,
    "exclusion": _cmd_exclusion,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _merge_config(args)
    except (OptionError, ValueError, UnitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        return _COMMANDS[cfg.command](cfg)
    except (OptionError, ValueError, UnitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
