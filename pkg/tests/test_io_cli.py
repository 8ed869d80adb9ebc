import json
import math

import numpy as np
import pytest

from crossdiff import ConfigError, FullState, GridSpec, SystemState, Field
from crossdiff.io_cli import (apply_overrides, config_to_dict, main, parse_config,
                              read_snapshot, write_snapshot)


def base_config(t_end=0.5, cells=50):
    return {
        "grid": {"dim": 1, "lengths": [10.0], "cells": [cells]},
        "params": {"beta": 0.5, "c": 1.0, "d0": 1.0, "scaling": "scaled"},
        "stepper": {"scheme": "explicit", "cfl_safety": 0.4},
        "initial": {
            "rho_a": {"kind": "gaussian_bump", "baseline": 0.5, "amplitude": 1.0,
                      "center": [1.0], "width": 1.0},
            "rho_b": {"kind": "gaussian_bump", "baseline": 0.1, "amplitude": 1.0,
                      "center": [-1.0], "width": 1.0},
        },
        "run": {"t_end": t_end, "output_every": 0.25, "snapshot_times": [t_end]},
    }


class TestConfigParsing:
    def test_round_trip_equality(self):
        cfg = parse_config(base_config())
        assert parse_config(config_to_dict(cfg)) == cfg

    def test_unknown_key_reports_dotted_path(self):
        data = base_config()
        data["params"]["bogus"] = 1
        with pytest.raises(ConfigError) as err:
            parse_config(data)
        assert "params.bogus" in str(err.value)

    def test_unknown_top_level_key(self):
        data = base_config()
        data["extra"] = {}
        with pytest.raises(ConfigError) as err:
            parse_config(data)
        assert "extra" in str(err.value)

    def test_missing_required_key(self):
        data = base_config()
        del data["run"]["t_end"]
        with pytest.raises(ConfigError) as err:
            parse_config(data)
        assert "t_end" in str(err.value)

    def test_bad_enum_rejected_with_path(self):
        data = base_config()
        data["stepper"]["scheme"] = "leapfrog"
        with pytest.raises(ConfigError) as err:
            parse_config(data)
        assert "stepper" in str(err.value)

    def test_grid_dim_cross_checked(self):
        data = base_config()
        data["grid"]["dim"] = 2
        with pytest.raises(ConfigError):
            parse_config(data)

    def test_full_model_block(self):
        data = base_config()
        data["full_model"] = {"enabled": True, "epsilon": 0.01}
        cfg = parse_config(data)
        assert cfg.full_model.enabled and cfg.full_model.epsilon == 0.01

    def test_overrides(self):
        data = apply_overrides(base_config(), ["params.scaling=physical",
                                               "params.beta=0.6",
                                               "params.d0=0.25",
                                               "run.snapshot_times=[0.25]"])
        cfg = parse_config(data)
        assert cfg.params.beta == 0.6 and cfg.params.scaling == "physical"
        assert cfg.params.d0 == 0.25
        assert cfg.snapshot_times == (0.25,)

    def test_override_violating_schema_caught(self):
        data = apply_overrides(base_config(), ["params.nope=3"])
        with pytest.raises(ConfigError):
            parse_config(data)


class TestSnapshotRoundTrip:
    def test_1d_bitwise(self, tmp_path):
        rng = np.random.default_rng(7)
        g = GridSpec((10.0,), (40,))
        st = SystemState(0.0, Field(g, rng.uniform(0.1, 1.0, 40)),
                         Field(g, rng.uniform(0.1, 1.0, 40)))
        path = tmp_path / "snapshot_t2.5.csv"
        write_snapshot(path, st)
        back = read_snapshot(path)
        assert back.t == 2.5
        assert np.array_equal(back.rho_a.values, st.rho_a.values)
        assert np.array_equal(back.rho_b.values, st.rho_b.values)
        assert back.grid.cells == (40,)
        assert math.isclose(back.grid.lengths[0], 10.0, rel_tol=1e-12)

    def test_2d_full_state_bitwise(self, tmp_path):
        rng = np.random.default_rng(8)
        g = GridSpec((6.0, 4.0), (8, 6))
        st = FullState(0.0, Field(g, rng.uniform(0.1, 1.0, (8, 6))),
                       Field(g, rng.uniform(0.1, 1.0, (8, 6))),
                       Field(g, rng.uniform(0.1, 1.0, (8, 6))),
                       Field(g, rng.uniform(0.1, 1.0, (8, 6))))
        path = tmp_path / "snapshot_t0.csv"
        write_snapshot(path, st)
        back = read_snapshot(path)
        assert isinstance(back, FullState)
        assert back.grid.cells == (8, 6)
        assert np.array_equal(back.g_b.values, st.g_b.values)

    def test_truncated_row_reports_line(self, tmp_path):
        g = GridSpec((10.0,), (5,))
        st = SystemState(0.0, Field.full(g, 1.0), Field.full(g, 1.0))
        path = tmp_path / "snapshot_t0.csv"
        write_snapshot(path, st)
        lines = path.read_text().splitlines()
        lines[3] = lines[3].rsplit(",", 1)[0]  # drop one field on data line 3
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(ConfigError) as err:
            read_snapshot(path)
        assert "line 4" in str(err.value)


class TestCliRun:
    def test_outputs_and_determinism(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(base_config()))
        assert main(["run", "--config", str(cfg_path), "--out", str(tmp_path / "a")]) == 0
        assert main(["run", "--config", str(cfg_path), "--out", str(tmp_path / "b")]) == 0
        for name in ("timeseries.csv", "snapshot_t0.csv", "snapshot_t0.5.csv",
                     "config_resolved.json"):
            assert (tmp_path / "a" / name).is_file()
            assert (tmp_path / "a" / name).read_bytes() == \
                   (tmp_path / "b" / name).read_bytes()

    def test_resolved_config_reruns_byte_identical(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(base_config()))
        main(["run", "--config", str(cfg_path), "--out", str(tmp_path / "a")])
        main(["run", "--config", str(tmp_path / "a" / "config_resolved.json"),
              "--out", str(tmp_path / "c")])
        assert (tmp_path / "a" / "timeseries.csv").read_bytes() == \
               (tmp_path / "c" / "timeseries.csv").read_bytes()

    def test_missing_config_exit_2_names_path(self, tmp_path, capsys):
        rc = main(["run", "--config", str(tmp_path / "nope.json"),
                   "--out", str(tmp_path / "o")])
        err = capsys.readouterr().err
        assert rc == 2
        assert "nope.json" in err and err.count("\n") == 1

    def test_solver_failure_exit_3_with_time(self, tmp_path, capsys):
        data = base_config(t_end=50.0)
        data["run"]["output_every"] = 10.0
        data["run"]["snapshot_times"] = []
        data["params"] = {"beta": 4.0, "c": 1.0, "d0": 1.0, "scaling": "physical"}
        data["initial"]["rho_b"]["baseline"] = 0.5
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(data))
        rc = main(["run", "--config", str(cfg_path), "--out", str(tmp_path / "o")])
        err = capsys.readouterr().err
        assert rc == 3
        assert "t=" in err and err.count("\n") == 1

    def test_uniform_ic_rows_identical(self, tmp_path):
        data = base_config()
        data["initial"] = {"rho_a": {"kind": "uniform", "baseline": 0.7},
                           "rho_b": {"kind": "uniform", "baseline": 0.2}}
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(data))
        main(["run", "--config", str(cfg_path), "--out", str(tmp_path / "o")])
        rows = (tmp_path / "o" / "timeseries.csv").read_text().splitlines()[1:]
        physics = {",".join(r.split(",")[1:]) for r in rows}
        assert len(physics) == 1

    def test_override_flag(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(base_config()))
        main(["run", "--config", str(cfg_path), "--out", str(tmp_path / "o"),
              "--override", "run.t_end=0.25", "--override", "run.snapshot_times=[]"])
        resolved = json.loads((tmp_path / "o" / "config_resolved.json").read_text())
        assert resolved["run"]["t_end"] == 0.25


class TestCliStability:
    def test_threshold_comment_and_rows(self, capsys):
        assert main(["stability", "--beta", "1.0", "--c", "1.0", "--rho-a", "1.0",
                     "--rho-b", "1.0", "--length", "10.0", "--n-max", "3"]) == 0
        out = capsys.readouterr().out.splitlines()
        assert out[0] == "k,alpha_plus,alpha_minus"
        assert out[-1] == "# threshold_beta_c=0.5"
        assert len(out) == 1 + 3 + 1  # header + modes + comment

    def test_zero_n_max_exit_2(self, capsys):
        rc = main(["stability", "--beta", "1.0", "--c", "1.0", "--rho-a", "1.0",
                   "--rho-b", "1.0", "--length", "10.0", "--n-max", "0"])
        assert rc == 2

    def test_row_values_match_formula(self, capsys):
        from crossdiff import ModelParams, growth_rates
        main(["stability", "--beta", "0.7", "--c", "1.1", "--rho-a", "0.9",
              "--rho-b", "1.3", "--length", "8.0", "--n-max", "2"])
        out = capsys.readouterr().out.splitlines()
        p = ModelParams(beta=0.7, c=1.1, d0=0.25)
        for row in out[1:-1]:
            k, ap, am = (float(x) for x in row.split(","))
            pt = growth_rates(k, (0.9, 1.3), p)
            assert ap == pt.alpha_plus and am == pt.alpha_minus


class TestCliEnergies:
    def test_round_trip_against_timeseries(self, tmp_path, capsys):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(base_config()))
        main(["run", "--config", str(cfg_path), "--out", str(tmp_path / "o")])
        rc = main(["energies", "--snapshot", str(tmp_path / "o" / "snapshot_t0.5.csv"),
                   "--beta", "0.5", "--c", "1.0", "--d0", "1.0"])
        out = capsys.readouterr().out.splitlines()
        assert rc == 0
        got = [float(x) for x in out[1].split(",")]
        rows = (tmp_path / "o" / "timeseries.csv").read_text().splitlines()
        want = [float(x) for x in rows[-1].split(",")]
        assert got[0] == want[0] == 0.5
        for g_val, w_val in zip(got[1:], want[1:]):
            assert math.isclose(g_val, w_val, rel_tol=1e-12, abs_tol=1e-12)

    def test_uniform_snapshot_values(self, tmp_path, capsys):
        g = GridSpec((10.0,), (50,))
        st = SystemState(0.0, Field.full(g, 1.0), Field.full(g, 1.0))
        path = tmp_path / "snapshot_t0.csv"
        write_snapshot(path, st)
        main(["energies", "--snapshot", str(path),
              "--beta", "0.5", "--c", "1.0", "--d0", "1.0"])
        out = capsys.readouterr().out.splitlines()
        vals = dict(zip(out[0].split(","), (float(x) for x in out[1].split(","))))
        assert math.isclose(vals["energy_h"], -10.0, rel_tol=1e-12)
        assert math.isclose(vals["energy_mb"], -20.0, rel_tol=1e-12)
        assert vals["diss_h"] == 0.0

    def test_malformed_snapshot_exit_2(self, tmp_path, capsys):
        path = tmp_path / "snapshot_t0.csv"
        path.write_text("x,rho_a,rho_b\n1.0,2.0\n")
        rc = main(["energies", "--snapshot", str(path),
                   "--beta", "0.5", "--c", "1.0", "--d0", "1.0"])
        err = capsys.readouterr().err
        assert rc == 2
        assert "line 2" in err
