"""Command-line interface tests: every subcommand end to end, both output
formats, config-file handling, option validation and exit codes."""

import json
import shutil
import subprocess
import sys

import numpy as np
import pytest
from scipy.special import ai_zeros

from chamneut import BOUNCER_SCALES
from chamneut.cli import main


def run(tmp_path, *argv, name="out.csv"):
    """Invoke main() with --out into tmp_path; return (exit code, path)."""
    out = tmp_path / name
    code = main([*argv, "--out", str(out)])
    return code, out


def read_csv(path):
    """Split a delimited output file into (schema line, comments, header, rows)."""
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# ")
    comments = {}
    i = 1
    while lines[i].startswith("# "):
        key, _, value = lines[i][2:].partition(" = ")
        comments[key] = value
        i += 1
    header = lines[i].split(",")
    rows = [line.split(",") for line in lines[i + 1:]]
    return lines[0], comments, header, rows


class TestBouncerCommand:
    def test_csv_output(self, tmp_path):
        code, out = run(tmp_path, "bouncer", "--no-plot")
        assert code == 0
        schema, comments, header, rows = read_csv(out)
        assert schema == "# chamneut-csv v1 bouncer"
        assert header == ["k", "energy_exact_pev", "energy_perturbative_pev",
                          "delta_pev"]
        assert len(rows) == 6
        assert comments["n"] == "2"
        assert comments["beta"] == "1000000000"

    def test_gravity_levels_match_airy(self, tmp_path):
        code, out = run(tmp_path, "bouncer", "--beta", "0", "--no-plot")
        assert code == 0
        _, _, _, rows = read_csv(out)
        eps = -ai_zeros(6)[0]
        for row, eps_k in zip(rows, eps):
            assert float(row[1]) == pytest.approx(
                eps_k * BOUNCER_SCALES.e0_pev, rel=1e-5
            )

    def test_deterministic_bytes(self, tmp_path):
        _, a = run(tmp_path, "bouncer", "--no-plot", name="a.csv")
        _, b = run(tmp_path, "bouncer", "--no-plot", name="b.csv")
        assert a.read_bytes() == b.read_bytes()

    def test_plot_rendered_next_to_output(self, tmp_path):
        code, out = run(tmp_path, "bouncer")
        assert code == 0
        png = out.with_suffix(".png")
        assert png.exists()
        assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"

    def test_sweep_rows(self, tmp_path):
        code, out = run(tmp_path, "bouncer", "--sweep", "--no-plot")
        assert code == 0
        _, _, header, rows = read_csv(out)
        assert header == ["beta", "transition_shift_pev"]
        shifts = [float(r[1]) for r in rows]
        assert all(a < b for a, b in zip(shifts, shifts[1:]))


class TestBubbleCommand:
    def test_profile_output(self, tmp_path):
        code, out = run(tmp_path, "bubble", "--no-plot", "--grid", "201")
        assert code == 0
        _, comments, header, rows = read_csv(out)
        assert header == ["x_m", "phi_ev", "phi_over_lambda"]
        assert comments["branch"] == "vacuum"
        assert len(rows) == 201
        assert float(rows[0][1]) == 0.0 and float(rows[-1][1]) == 0.0
        mid = float(rows[len(rows) // 2][2])
        assert mid == pytest.approx(float(comments["y0"]), rel=1e-12)

    def test_pressure_selects_screened_branch(self, tmp_path):
        code, out = run(tmp_path, "bubble", "--pressure-mbar", "1", "--no-plot",
                        "--grid", "101")
        assert code == 0
        _, comments, _, _ = read_csv(out)
        assert comments["branch"] == "high_pressure"

    def test_sweep_has_regime_column(self, tmp_path):
        code, out = run(tmp_path, "bubble", "--sweep", "--no-plot")
        assert code == 0
        _, _, header, rows = read_csv(out)
        assert header == ["pressure_mbar", "line_integral_natural", "y0",
                          "branch", "regime", "model_valid"]
        assert {r[5] for r in rows} == {"true", "false"}


class TestPhaseCommand:
    def test_single_point_csv(self, tmp_path):
        code, out = run(tmp_path, "phase", "--no-plot")
        assert code == 0
        _, _, header, rows = read_csv(out)
        assert header == ["pressure_mbar", "delta_phi_rad", "regime",
                          "suppression_factor", "out_of_validity"]
        assert len(rows) == 1
        assert float(rows[0][1]) == pytest.approx(70.6187e-3, rel=1e-4)
        assert rows[0][4] == "false"

    def test_json_carries_reach_per_n(self, tmp_path):
        code, out = run(tmp_path, "phase", "--format", "json", "--no-plot",
                        name="out.json")
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["schema"] == "chamneut-json v1"
        assert payload["command"] == "phase"
        assert set(payload["reach_per_n"]) == {"1", "2", "3", "4", "5", "6"}
        assert payload["reach_per_n"]["2"] == pytest.approx(2.4073e8, rel=1e-4)
        assert payload["sensitivity_rad"] == pytest.approx(17e-3)
        assert all(len(r) == len(payload["columns"]) for r in payload["rows"])

    def test_sweep_monotone_suppression(self, tmp_path):
        code, out = run(tmp_path, "phase", "--sweep", "--no-plot")
        assert code == 0
        _, _, _, rows = read_csv(out)
        assert len(rows) == 61
        phases = [float(r[1]) for r in rows]
        assert all(a >= b for a, b in zip(phases, phases[1:]))
        assert {r[2] for r in rows} >= {"homogeneous_perturbative",
                                        "heterogeneous"}


class TestRegimesCommand:
    def test_grid_totality(self, tmp_path):
        code, out = run(tmp_path, "regimes", "--grid", "6", "--no-plot")
        assert code == 0
        _, _, header, rows = read_csv(out)
        assert header == ["beta", "pressure_mbar", "regime_code", "regime"]
        assert len(rows) == 36
        assert all(r[2] in {"0", "1", "2"} for r in rows)


class TestPdeCommand:
    def test_vacuum_box(self, tmp_path):
        code, out = run(tmp_path, "pde", "--grid", "17", "--cell-cm", "0.02",
                        "--no-plot")
        assert code == 0
        _, comments, header, rows = read_csv(out)
        assert header == ["x_m", "y_m", "phi_over_lambda"]
        assert comments["converged"] == "true"
        assert comments["side_m"] == "0.0002"
        assert len(rows) == 17 * 17
        bin_path = out.with_suffix(".bin")
        assert bin_path.exists()
        from chamneut.pde import read_binary
        grid, lam = read_binary(bin_path)
        assert grid.nx == 17
        assert lam == pytest.approx(2.4e-3)
        # binary field matches the delimited rows
        vals = np.array([float(r[2]) for r in rows]).reshape(17, 17)
        assert grid.values == pytest.approx(vals, rel=1e-11)

    def test_nuclei_default_to_nanobox(self, tmp_path):
        code, out = run(tmp_path, "pde", "--nuclei", "1", "--grid", "33",
                        "--no-plot")
        assert code == 0
        _, comments, _, _ = read_csv(out)
        assert float(comments["side_m"]) == pytest.approx(200e-9)

    def test_unconverged_solve_exits_3_with_partial_output(self, tmp_path, capsys):
        out = tmp_path / "out.csv"
        code = main(["pde", "--grid", "9", "--cell-cm", "0.02", "--tol", "1e-30",
                     "--no-plot", "--out", str(out)])
        assert code == 3
        assert "solver failure:" in capsys.readouterr().err
        _, comments, _, rows = read_csv(out)
        assert comments["converged"] == "false"
        assert len(rows) == 81
        assert out.with_suffix(".bin").exists()


class TestExclusionCommand:
    def test_reach_table(self, tmp_path):
        code, out = run(tmp_path, "exclusion", "--no-plot")
        assert code == 0
        _, comments, header, rows = read_csv(out)
        assert header == ["n", "bouncer_reach_beta", "interferometry_reach_beta"]
        assert [int(r[0]) for r in rows] == [1, 2, 3, 4, 5, 6]
        assert comments["bouncer_sensitivity_pev"] == "0.01"
        for r in rows:
            # the interferometer reaches weaker couplings than the bouncer
            assert float(r[1]) < float(r[2])


class TestOptionsAndConfig:
    def test_invalid_value_exits_2(self, tmp_path, capsys):
        code = main(["bouncer", "--n", "-1", "--no-plot",
                     "--out", str(tmp_path / "x.csv")])
        assert code == 2
        assert "n must be a positive integer" in capsys.readouterr().err

    def test_unknown_config_key_exits_2(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("banana = 3\n")
        code = main(["bouncer", "--config", str(cfg), "--no-plot",
                     "--out", str(tmp_path / "x.csv")])
        assert code == 2
        err = capsys.readouterr().err
        assert "unknown config key 'banana'" in err
        assert f"{cfg}:1" in err

    def test_config_file_applies_and_flags_win(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# comment line\nn = 3\nbeta = 2e9\n")
        _, out1 = run(tmp_path, "bouncer", "--config", str(cfg), "--no-plot",
                      name="a.csv")
        _, c1, _, _ = read_csv(out1)
        assert c1["n"] == "3" and c1["beta"] == "2000000000"
        _, out2 = run(tmp_path, "bouncer", "--config", str(cfg), "--n", "4",
                      "--no-plot", name="b.csv")
        _, c2, _, _ = read_csv(out2)
        assert c2["n"] == "4" and c2["beta"] == "2000000000"

    def test_missing_config_file_exits_2(self, tmp_path, capsys):
        code = main(["bouncer", "--config", str(tmp_path / "absent.cfg"),
                     "--no-plot", "--out", str(tmp_path / "x.csv")])
        assert code == 2
        assert "cannot read config file" in capsys.readouterr().err

    def test_default_output_name(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        assert main(["regimes", "--grid", "4", "--no-plot"]) == 0
        assert (tmp_path / "chamneut_regimes.csv").exists()

    def test_bad_config_value_exits_2(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("beta = fast\n")
        code = main(["bouncer", "--config", str(cfg), "--no-plot",
                     "--out", str(tmp_path / "x.csv")])
        assert code == 2
        assert "bad value for beta" in capsys.readouterr().err


class TestEntryPoints:
    def test_module_invocation(self):
        proc = subprocess.run([sys.executable, "-m", "chamneut", "--help"],
                              capture_output=True, text=True, timeout=120)
        assert proc.returncode == 0
        assert "usage: chamneut" in proc.stdout

    def test_console_script_installed(self):
        exe = shutil.which("chamneut")
        assert exe is not None
        proc = subprocess.run([exe, "bouncer", "--help"],
                              capture_output=True, text=True, timeout=120)
        assert proc.returncode == 0
        assert "--beta" in proc.stdout

    def test_help_exits_zero_in_process(self):
        with pytest.raises(SystemExit) as exc:
            main(["--help"])
        assert exc.value.code == 0
