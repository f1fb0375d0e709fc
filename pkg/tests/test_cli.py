import csv
import json
import math

import jsonschema
import pytest

from radial_blowup.cli import SUMMARY_SCHEMA, cmd_oracle, cmd_run, cmd_sweep, main
from radial_blowup.config import RunConfig, load_config, parse_config
from radial_blowup.errors import ConfigurationError


def _write(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


def _summary(out):
    summary = json.loads((out / "summary.json").read_text())
    jsonschema.validate(summary, SUMMARY_SCHEMA)
    return summary


def test_minimal_config_defaults():
    assert parse_config("{}") == RunConfig()


@pytest.mark.parametrize("doc,field", [
    ({"n_list": [-1]}, "n_list"),
    ({"n_list": []}, "n_list"),
    ({"n_list": [1, 1.0]}, "n_list"),
    ({"delta": 2}, "delta"),
    ({"bogus": 1}, "bogus"),
    ({"scheme": {"cfl": 2}}, "scheme.cfl"),
    ({"scheme": {"nope": 1}}, "scheme.nope"),
    ({"profile": {"colour": 1}}, "profile.colour"),
    ({"profiles": []}, "profiles"),
    ({"cells": 1.5}, "cells"),
    ({"N": 0}, "N"),
    ({"t_max": -1}, "t_max"),
])
def test_config_named_field_errors(doc, field):
    with pytest.raises(ConfigurationError) as exc:
        parse_config(json.dumps(doc))
    assert exc.value.field == field


def test_profile_grid_errors_name_the_entry():
    with pytest.raises(ConfigurationError) as exc:
        parse_config(json.dumps({"profiles": [{}, {"shape": 1}]}))
    assert exc.value.field.startswith("profiles[1]")


def test_malformed_json_has_location():
    with pytest.raises(ConfigurationError) as exc:
        parse_config('{"N": 3,\n "delta": }')
    assert "line 2" in str(exc.value)


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigurationError):
        load_config(tmp_path / "absent.json")


EQUILIBRIUM = {"profile": {"velocity_amplitude": 0}, "t_max": 0.2, "cells": 64,
               "snapshot_cadence": 0.05}
SINE = {"N": 3, "delta": 0, "profile": {"density_amplitude": 0.01}, "cells": 1024,
        "t_max": 1.0, "snapshot_cadence": 0.005}


def test_run_equilibrium_exit_zero(tmp_path):
    out = tmp_path / "eq"
    assert main(["run", "--config", str(_write(tmp_path, EQUILIBRIUM)), "--out-dir", str(out),
                 "--quiet"]) == 0
    summary = _summary(out)
    assert summary["bound_T"] == {"1": None}
    assert not summary["hypotheses"]["applicable"]
    with open(out / "series.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert all(float(r["H_1"]) == 0 for r in rows)
    assert (out / "series.dat").exists() and (out / "plot.gp").exists()


def test_run_sine_exit_zero(tmp_path):
    out = tmp_path / "sine"
    assert cmd_run(parse_config(json.dumps(SINE)), out_dir=out, quiet=True) == 0
    summary = _summary(out)
    assert summary["detected"]["time"] == pytest.approx(1 / math.pi, rel=0.05)
    assert summary["bound_T"]["1"] == pytest.approx(math.pi, rel=1e-4)
    assert summary["oracle_time"] == pytest.approx(1 / math.pi, rel=1e-3)
    assert summary["proxy_based"] is True


def test_series_columns_in_order(tmp_path):
    doc = dict(SINE, cells=64, n_list=[0.5, 2], t_max=0.05)
    out = tmp_path / "cols"
    cmd_run(parse_config(json.dumps(doc)), out_dir=out, quiet=True)
    header = (out / "series.csv").read_text().splitlines()[0].split(",")
    assert header == ["t", "H_0.5", "H_2", "mass", "max_abs_V", "max_grad_V", "max_rho",
                      "riccati_floor_0.5", "riccati_floor_2", "cs_slack_0.5", "cs_slack_2"]


def test_support_violation_exit_one(tmp_path, capsys):
    doc = {"profile": {"velocity": "tabulated", "table_r": [0, 1], "table_v": [0, 1]}}
    assert main(["run", "--config", str(_write(tmp_path, doc)), "--out-dir",
                 str(tmp_path / "x")]) == 1
    assert "error" in capsys.readouterr().err


def test_bad_config_exit_one(tmp_path):
    assert main(["run", "--config", str(_write(tmp_path, {"delta": 5}))]) == 1


def test_unwritable_output_exit_one(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert cmd_run(parse_config(json.dumps(EQUILIBRIUM)), out_dir=blocker / "sub", quiet=True) == 1


def test_blind_proxies_exit_two(tmp_path):
    # proxies that can never fire let the run outlive the bound for n = 3
    doc = {"delta": 1, "n_list": [3], "cells": 128, "t_max": 1.5, "snapshot_cadence": 0.05,
           "profile": {"density_amplitude": 0.01},
           "scheme": {"gradient_factor": 1e9, "jump_fraction": 1e9}}
    out = tmp_path / "blind"
    assert main(["run", "--config", str(_write(tmp_path, doc)), "--out-dir", str(out),
                 "--quiet"]) == 2
    assert _summary(out)["verdicts"]["detected_le_bound"] is False


def test_sweep_single_n_matches_run(tmp_path):
    doc = dict(SINE, cells=256, delta=1)
    config = parse_config(json.dumps(doc))
    cmd_run(config, out_dir=tmp_path / "single", quiet=True)
    assert cmd_sweep(config, out_dir=tmp_path / "sweep") == 0
    case = tmp_path / "sweep" / "case_000_n_1"
    assert (case / "series.csv").read_bytes() == (tmp_path / "single" / "series.csv").read_bytes()
    _summary(case)


def test_sweep_profile_grid_parallel(tmp_path):
    doc = dict(SINE, cells=128, delta=1, n_list=[0.5, 1, 2, 3],
               profiles=[{"density_amplitude": 0.01}, {"density_amplitude": 0.02}])
    config = parse_config(json.dumps(doc))
    assert cmd_sweep(config, out_dir=tmp_path / "s", jobs=2) == 0
    table = json.loads((tmp_path / "s" / "sweep_summary.json").read_text())
    assert len(table["cases"]) == 8
    assert [c["case"] for c in table["cases"]][:4] == [
        "case_000_n_0.5", "case_000_n_1", "case_000_n_2", "case_000_n_3"]
    for row in table["cases"]:
        assert row["detected"] <= row["T_n"] * 1.05 and row["verdict"] is True


def test_sweep_case_error_exit_one(tmp_path):
    doc = dict(SINE, cells=32, t_max=0.01,
               profiles=[{}, {"velocity": "tabulated", "table_r": [0, 1], "table_v": [0, 1]}])
    config = parse_config(json.dumps(doc))
    assert cmd_sweep(config, out_dir=tmp_path / "e") == 1
    table = json.loads((tmp_path / "e" / "sweep_summary.json").read_text())
    assert "error" in table["cases"][1]


def test_oracle_command(tmp_path, capsys):
    assert main(["oracle", "--config", str(_write(tmp_path, SINE))]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["first_crossing_time"] == pytest.approx(1 / math.pi, rel=1e-3)
    assert main(["oracle", "--config", str(_write(tmp_path, dict(SINE, K=1.0, gamma=2.0)))]) == 1


def test_config_echo_round_trips(tmp_path):
    config = parse_config(json.dumps(dict(SINE, cells=32, t_max=0.01)))
    cmd_run(config, out_dir=tmp_path / "r", quiet=True)
    echo = _summary(tmp_path / "r")["config_echo"]
    echo.pop("output_dir")
    assert parse_config(json.dumps(echo)).replace(output_dir=config.output_dir) == config
