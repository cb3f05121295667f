import json
import math
import subprocess
import sys

import pytest

from fdnoma.cli import main
from fdnoma.runio import ConfigError, load_config, parse_span
from fdnoma.scenarios.rayleigh import analytic_ergodic_capacity


def run_cli(args):
    return main(list(args))


class TestParseSpan:
    def test_inclusive_grid(self):
        assert parse_span("0:40:5") == [0, 5, 10, 15, 20, 25, 30, 35, 40]

    def test_single_point(self):
        assert parse_span("7:7:1") == [7.0]

    @pytest.mark.parametrize("bad", ["1:2", "a:b:c", "0:10:0", "5:1:1"])
    def test_rejects_malformed(self, bad):
        with pytest.raises(ConfigError):
            parse_span(bad)


class TestLoadConfig:
    def test_empty_cooperative_defaults(self, tmp_path):
        p = tmp_path / "c.json"
        p.write_text("{}")
        cfg = load_config("coop", p)
        assert cfg.alloc.a1 == 0.05 and cfg.alloc.a2 == 0.95
        assert cfg.rho_r is None and cfg.forward_snr == cfg.rho_b / 2
        assert cfg.gain_bs_ue1 == 1.0
        assert cfg.gain_bs_relay == cfg.gain_relay_ue1 == cfg.gain_relay_ue2 == 0.5
        assert cfg.loop_gain == 0.3

    def test_uldl_default_self_interference(self, tmp_path):
        p = tmp_path / "u.json"
        p.write_text('{"cci_factor": 0.05}')
        cfg = load_config("uldl", p)
        assert cfg.sigma2_si == 0.1

    def test_invalid_allocation_rejected(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text('{"alloc": {"a1": 0.6, "a2": 0.4}}')
        with pytest.raises(ConfigError, match="a1"):
            load_config("coop", p)

    def test_unknown_keys_rejected(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text('{"bandwidth": 20}')
        with pytest.raises(ConfigError, match="bandwidth"):
            load_config("coop", p)

    def test_shipped_configs_validate(self):
        from pathlib import Path
        root = Path(__file__).resolve().parents[1] / "configs"
        for name, scenario in [("coop_fig4.json", "coop"),
                               ("uldl_singlecell.json", "uldl"),
                               ("uldl_multicell.json", "uldl"),
                               ("cognitive.json", "cognitive"),
                               ("scbf.json", "scbf")]:
            load_config(scenario, root / name)


class TestRunCommand:
    def test_sweep_row_count(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code = run_cli(["run", "--scenario", "coop", "--snr", "0:40:5",
                        "--trials", "300", "--seed", "7",
                        "--modes", "fd_relay,hd_relay", "--out", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "scenario,mode,x_name,x_value,metric,value,ci_half,trials,seed"
        assert len(lines) == 1 + 2 * 9

    def test_rerun_is_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["run", "--scenario", "coop", "--snr", "0:20:10", "--trials", "200",
                "--seed", "3", "--modes", "fd_relay"]
        assert run_cli(args + ["--out", str(a)]) == 0
        assert run_cli(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_csv_round_trip_exact(self, tmp_path):
        out = tmp_path / "sweep.csv"
        run_cli(["run", "--scenario", "coop", "--snr", "0:10:5", "--trials", "200",
                 "--seed", "3", "--modes", "fd_relay", "--out", str(out)])
        from fdnoma.sweep import snr_sweep
        from fdnoma.scenarios import CoopConfig
        res = snr_sweep("coop", CoopConfig(), [0.0, 5.0, 10.0], ["fd_relay"], 200, 3)
        rows = out.read_text().splitlines()[1:]
        for row, mean, ci in zip(rows, res.means["fd_relay"], res.ci_half["fd_relay"]):
            cols = row.split(",")
            assert float(cols[5]) == mean
            assert float(cols[6]) == ci

    def test_unknown_mode_exits_2(self, tmp_path, capsys):
        code = run_cli(["run", "--scenario", "coop", "--snr", "0:10:5",
                        "--trials", "10", "--modes", "warp",
                        "--out", str(tmp_path / "x.csv")])
        assert code == 2
        assert "unknown mode" in capsys.readouterr().err

    def test_manifest_written(self, tmp_path):
        out = tmp_path / "s.csv"
        run_cli(["run", "--scenario", "coop", "--snr", "0:0:1", "--trials", "50",
                 "--seed", "1", "--modes", "fd_relay", "--out", str(out)])
        manifest = json.loads((tmp_path / "s.manifest.json").read_text())
        assert manifest["scenario"] == "coop"
        assert manifest["seed"] == 1 and manifest["trials"] == 50
        assert manifest["config"]["alloc"]["a1"] == 0.05
        assert "timestamp" in manifest and "tool_version" in manifest

    def test_bad_config_exits_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"alloc": {"a1": 0.6, "a2": 0.4}}')
        code = run_cli(["run", "--scenario", "coop", "--config", str(bad),
                        "--snr", "0:0:1", "--trials", "10", "--modes", "fd_relay",
                        "--out", str(tmp_path / "x.csv")])
        assert code == 2

    def test_manifest_reproduces_csv(self, tmp_path):
        # the manifest's config snapshot plus seed regenerate the CSV bytes
        out = tmp_path / "orig.csv"
        run_cli(["run", "--scenario", "coop", "--snr", "5:15:5", "--trials", "150",
                 "--seed", "21", "--modes", "fd_relay,hd_user", "--out", str(out)])
        manifest = json.loads((tmp_path / "orig.manifest.json").read_text())
        cfg_json = tmp_path / "replay.json"
        replay_cfg = {k: v for k, v in manifest["config"].items()
                      if k not in ("variant",)}
        cfg_json.write_text(json.dumps(replay_cfg))
        out2 = tmp_path / "replay.csv"
        run_cli(["run", "--scenario", manifest["scenario"], "--config", str(cfg_json),
                 "--snr", manifest["command"]["snr"],
                 "--modes", ",".join(manifest["command"]["modes"]),
                 "--trials", str(manifest["trials"]), "--seed", str(manifest["seed"]),
                 "--out", str(out2)])
        assert out.read_bytes() == out2.read_bytes()


class TestRegionCommand:
    def test_scbf_region_with_tdm_rows(self, tmp_path):
        out = tmp_path / "region.csv"
        code = run_cli(["region", "--scenario", "scbf", "--alpha", "0.25",
                        "--power-db", "10", "--corr", "0.0",
                        "--targets", "0:1.5:0.5", "--trials", "1", "--seed", "0",
                        "--out", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "scenario,scheme,r2_target,r1_max,feasible,ith,trials,seed"
        schemes = [line.split(",")[1] for line in lines[1:]]
        assert schemes.count("scbf") == 4
        assert schemes.count("tdm") == 2
        # the zero-target point is the single-user corner
        first = lines[1].split(",")
        assert float(first[2]) == 0.0
        assert float(first[3]) == pytest.approx(math.log2(11.0), rel=1e-9)

    def test_cognitive_region_default_schemes(self, tmp_path):
        out = tmp_path / "cog.csv"
        code = run_cli(["region", "--scenario", "cognitive", "--ith-db", "0",
                        "--targets", "0:2:1", "--trials", "20", "--seed", "2",
                        "--out", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()[1:]
        schemes = {line.split(",")[1] for line in lines}
        assert schemes == {"optimum", "suboptimum"}
        iths = {line.split(",")[5] for line in lines}
        assert iths == {"1"}

    def test_infeasible_point_has_empty_rate(self, tmp_path):
        out = tmp_path / "r.csv"
        run_cli(["region", "--scenario", "scbf", "--alpha", "0.25", "--power-db", "10",
                 "--corr", "0.0", "--targets", "0:9:9", "--trials", "1", "--seed", "0",
                 "--out", str(out)])
        rows = [l.split(",") for l in out.read_text().splitlines()[1:]
                if l.split(",")[1] == "scbf"]
        infeasible = [r for r in rows if r[4] == "false"]
        assert infeasible and all(r[3] == "" for r in infeasible)

    def test_rerun_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["region", "--scenario", "cognitive", "--targets", "0:1:1",
                "--trials", "15", "--seed", "4"]
        run_cli(args + ["--out", str(a)])
        run_cli(args + ["--out", str(b)])
        assert a.read_bytes() == b.read_bytes()


class TestOracleCommand:
    def test_prints_analytic_value(self, capsys):
        assert run_cli(["oracle", "rayleigh", "--snr-db", "10"]) == 0
        printed = float(capsys.readouterr().out.strip())
        assert printed == analytic_ergodic_capacity(10.0)


class TestEntryPoint:
    def test_console_script(self, tmp_path):
        proc = subprocess.run([sys.executable, "-m", "fdnoma.cli", "oracle",
                               "rayleigh", "--snr-db", "0"],
                              capture_output=True, text=True)
        assert proc.returncode == 0
        assert float(proc.stdout.strip()) == pytest.approx(0.8603, abs=1e-4)

    def test_usage_error_exits_2(self):
        proc = subprocess.run([sys.executable, "-m", "fdnoma.cli", "run",
                               "--scenario", "bogus"],
                              capture_output=True, text=True)
        assert proc.returncode == 2
