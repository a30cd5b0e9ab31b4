import json
import math

import pytest

from heliosense import cli, config
from heliosense.errors import ConfigError


GOOD_CONFIG = """
[parameters]
i_dc_A = 0.5
h_um = 5.0
v_bias_V = 0.1
omega_12_rad_per_s = 100.0

[noise]
seed = 41
current_ppm = 0.5
ripplon_ppm = 4.0

[echo]
shots = 50
free_time_s = 4.0
"""


class TestConfigParsing:
    def test_defaults_without_file(self):
        cfg = config.parse_config(None)
        assert cfg.parameters.i_dc == 0.5
        assert cfg.noise.kind == "quasi-static"
        assert cfg.sensitivity.theta_min_rad == pytest.approx(math.pi / 10)

    def test_good_file(self, tmp_path):
        path = tmp_path / "run.ini"
        path.write_text(GOOD_CONFIG)
        cfg = config.parse_config(str(path))
        assert cfg.parameters.h == pytest.approx(5e-6)
        assert cfg.noise.seed == 41
        assert cfg.noise.sigma_ripplon == pytest.approx(4e-6)
        assert cfg.echo.shots == 50

    def test_missing_file(self):
        with pytest.raises(ConfigError):
            config.parse_config("/nonexistent/run.ini")

    def test_unknown_section(self, tmp_path):
        path = tmp_path / "run.ini"
        path.write_text(GOOD_CONFIG + "\n[mystery]\nx = 1\n")
        with pytest.raises(ConfigError, match="mystery"):
            config.parse_config(str(path))

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "run.ini"
        path.write_text(GOOD_CONFIG + "\n[trap]\nwarp_factor = 9\n")
        with pytest.raises(ConfigError, match="warp_factor"):
            config.parse_config(str(path))

    def test_missing_required_key(self, tmp_path):
        path = tmp_path / "run.ini"
        path.write_text("[parameters]\ni_dc_A = 0.5\nh_um = 5.0\n")
        with pytest.raises(ConfigError, match="v_bias_V"):
            config.parse_config(str(path))

    def test_bad_value_type(self, tmp_path):
        path = tmp_path / "run.ini"
        path.write_text("[parameters]\ni_dc_A = half\nh_um = 5.0\nv_bias_V = 0.1\n")
        with pytest.raises(ConfigError, match="i_dc_A"):
            config.parse_config(str(path))

    def test_malformed_geometry_value(self, tmp_path):
        path = tmp_path / "run.ini"
        path.write_text(GOOD_CONFIG + "\n[trap]\nwire_plane = diagonal\n")
        with pytest.raises(ConfigError, match="wire_plane"):
            config.parse_config(str(path))


class TestCliExitCodes:
    def test_derive_params(self, tmp_path, capsys):
        code = cli.main(["derive-params", "--out", str(tmp_path)])
        assert code == 0
        assert (tmp_path / "params_provenance.csv").exists()
        payload = json.loads((tmp_path / "params_provenance.json").read_text())
        assert payload["schema_version"] == 1
        assert all(flag["ok"] for flag in payload["regime_flags"].values())

    def test_derive_params_json_stdout(self, tmp_path, capsys):
        code = cli.main(["derive-params", "--json", "--out", str(tmp_path)])
        assert code == 0
        parsed = json.loads(capsys.readouterr().out)
        names = [row["quantity"] for row in parsed["provenance"]]
        assert "Delta_s" in names

    def test_config_error_exit_two(self, tmp_path):
        bad = tmp_path / "bad.ini"
        bad.write_text("[parameters]\ni_dc_A = 0.5\n")
        assert cli.main(["derive-params", "--config", str(bad)]) == 2

    def test_malformed_geometry_exit_two(self, tmp_path):
        bad = tmp_path / "bad.ini"
        bad.write_text(GOOD_CONFIG + "\n[trap]\nwire_plane = diagonal\n")
        assert cli.main(["solve-trap", "--config", str(bad)]) == 2

    def test_solve_hydrogen_reports_zero_field(self, tmp_path, capsys):
        code = cli.main(["solve-hydrogen", "--out", str(tmp_path)])
        assert code == 0
        out = capsys.readouterr().out
        assert "118.4" in out  # zero-field transition, GHz
        scan = (tmp_path / "hydrogen_scan.csv").read_text().splitlines()
        assert scan[0] == "E_z[V/m],omega_a[rad/s],z11[m],z12[m],z22[m]"
        summary = json.loads((tmp_path / "hydrogen_summary.json").read_text())
        assert summary["field_for_160GHz"]["nearest_quoted_reading_V_per_cm"] == 56.9

    def test_simulate_echo_analytic_only(self, tmp_path):
        code = cli.main(["simulate-echo", "--shots", "0", "--out", str(tmp_path)])
        assert code == 0
        assert (tmp_path / "echo_fringe.csv").exists()
        assert not (tmp_path / "echo_shots.csv").exists()
        summary = json.loads((tmp_path / "echo_summary.json").read_text())
        assert summary["consistency_defect"] < 1e-6

    def test_simulate_echo_full_mode(self, tmp_path):
        cfg = tmp_path / "full.ini"
        cfg.write_text(GOOD_CONFIG + "\nnumeric_mode = full\n")
        code = cli.main(["simulate-echo", "--config", str(cfg), "--shots", "0",
                         "--out", str(tmp_path)])
        assert code == 0
        summary = json.loads((tmp_path / "echo_summary.json").read_text())
        # composite-space propagation sits within the 1% phase budget
        assert summary["consistency_defect"] < 1e-6

    def test_simulate_echo_deterministic_outputs(self, tmp_path):
        out_a = tmp_path / "a"
        out_b = tmp_path / "b"
        assert cli.main(["simulate-echo", "--shots", "64", "--seed", "9",
                         "--out", str(out_a)]) == 0
        assert cli.main(["simulate-echo", "--shots", "64", "--seed", "9",
                         "--out", str(out_b)]) == 0
        for name in ("echo_shots.csv", "echo_summary.json", "echo_fringe.csv"):
            assert (out_a / name).read_bytes() == (out_b / name).read_bytes()

    def test_sensitivity_showcase(self, tmp_path, capsys):
        code = cli.main(["sensitivity", "--preset", "showcase", "--out", str(tmp_path)])
        assert code == 0
        summary = json.loads((tmp_path / "sensitivity_summary.json").read_text())
        assert summary["showcase"]["E_w_nV_per_cm"] == pytest.approx(173.0, rel=0.05)
        assert summary["showcase"]["P_w_W_per_cm2"] == pytest.approx(7.9e-17, rel=0.10)
        assert summary["curve_monotonic"] is True
        names = [b["name"] for b in summary["benchmarks"]]
        assert "rydberg_detector_field" in names

    def test_sensitivity_curve_units_in_header(self, tmp_path):
        assert cli.main(["sensitivity", "--out", str(tmp_path)]) == 0
        header = (tmp_path / "sensitivity_curve.csv").read_text().splitlines()[0]
        assert header == "delta_t[s],omega_sz[rad/s],omega_12[rad/s],E_w[V/m],P_w[W/m^2]"

    def test_solve_trap_small_cell(self, tmp_path):
        cfg = tmp_path / "small.ini"
        cfg.write_text(
            "[parameters]\n"
            "i_dc_A = 0.5\nh_um = 2.0\nv_bias_V = 1.0\nl_um = 20.0\nd_um = 1.0\n"
            "[trap]\ngap_um = 1.0\ninsulator_um = 0.5\n"
            "fit_radius_um = 1.5\nfit_zhalf_um = 1.0\n"
        )
        code = cli.main(["solve-trap", "--config", str(cfg), "--out", str(tmp_path)])
        # the toy cell is not deep in the quadrupole regime; the command must
        # still write its outputs and report through the exit code
        assert code in (0, 1)
        summary = json.loads((tmp_path / "trap_fit.json").read_text())
        assert summary["Q_zz_V_per_m2_per_V"] < 0.0
        assert summary["schema_version"] == 1
        assert (tmp_path / "trap_fit.csv").exists()
