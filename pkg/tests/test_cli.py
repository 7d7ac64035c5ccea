"""Command-line behavior: artifacts, exit codes, and error reporting."""

import pytest

from mesoped.cli import (DimensionMismatch, check_refinement, main,
                         parse_populations)
from mesoped.layout import parse_layout
from mesoped.scenario import ConfigError

CORRIDOR_LAYOUT = "1 3 1.0\n11 10 14\nsink 0 2 1\nsource 0 0\n"
CORRIDOR_SCENARIO = """
[run]
mode = meso
dt_s = 0.5
max_steps = 100
seed = 3

[layout]
path = corridor.layout

[spawn]
0,0 = 1@0
"""

GOLDEN_EVENTS = (
    "step,clock_s,agent_id,event,row,col\n"
    "0,0.0,0,spawn,0,0\n"
    "2,1.0,0,move,0,1\n"
    "4,2.0,0,move,0,2\n"
    "5,2.5,0,exit,0,2\n"
)


@pytest.fixture
def corridor_scenario(tmp_path):
    (tmp_path / "corridor.layout").write_text(CORRIDOR_LAYOUT)
    path = tmp_path / "corridor.scenario"
    path.write_text(CORRIDOR_SCENARIO)
    return path


def test_run_writes_artifacts(corridor_scenario, tmp_path, capsys):
    out = tmp_path / "artifacts"
    code = main(["run", str(corridor_scenario), "--out", str(out)])
    assert code == 0
    assert (out / "events.csv").read_text() == GOLDEN_EVENTS
    metrics = (out / "metrics.csv").read_text().splitlines()
    assert metrics[0] == "population,avg_travel_time_s,avg_distance_m,exit_0_2_count,completed"
    assert metrics[1] == "1,2.5,2.0,1,true"
    assert (out / "field.csv").read_text() == "64.0,80.0,100.0\n"
    assert not (out / "snapshots.txt").exists()
    assert "corridor: spawned 1, exited 1" in capsys.readouterr().out


def test_run_snapshots_flag(corridor_scenario, tmp_path):
    out = tmp_path / "artifacts"
    code = main(["run", str(corridor_scenario), "--out", str(out), "--snapshots"])
    assert code == 0
    art = (out / "snapshots.txt").read_text()
    assert "# step 0 clock 0.0" in art
    assert "# step 5 clock 2.5" in art
    assert "+" in art and "1" in art


def test_run_step_limit_reports_incomplete(corridor_scenario, tmp_path, capsys):
    out = tmp_path / "artifacts"
    code = main(["run", str(corridor_scenario), "--out", str(out), "--steps", "0"])
    assert code == 3
    lines = (out / "events.csv").read_text().splitlines()
    assert [ln.split(",")[3] for ln in lines[1:]] == ["spawn"]
    assert (out / "metrics.csv").read_text().splitlines()[1].endswith("false")


def test_run_defaults_to_env_out_dir(corridor_scenario, tmp_path, monkeypatch):
    monkeypatch.setenv("MESOPED_OUT", str(tmp_path / "envout"))
    code = main(["run", str(corridor_scenario)])
    assert code == 0
    assert (tmp_path / "envout" / "corridor-seed3" / "events.csv").exists()


def test_run_seed_override_names_out_dir(corridor_scenario, tmp_path, monkeypatch):
    monkeypatch.setenv("MESOPED_OUT", str(tmp_path / "envout"))
    code = main(["run", str(corridor_scenario), "--seed", "9"])
    assert code == 0
    assert (tmp_path / "envout" / "corridor-seed9" / "events.csv").exists()


def test_run_twice_is_byte_identical(corridor_scenario, tmp_path):
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    assert main(["run", str(corridor_scenario), "--out", str(out_a)]) == 0
    assert main(["run", str(corridor_scenario), "--out", str(out_b)]) == 0
    for name in ("events.csv", "metrics.csv", "field.csv"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()


def test_run_unknown_scenario_is_config_error(capsys):
    code = main(["run", "definitely_not_bundled"])
    assert code == 2
    assert capsys.readouterr().err.startswith("error:")


def test_export_field(corridor_scenario, tmp_path):
    out = tmp_path / "field.csv"
    code = main(["export-field", str(corridor_scenario), "--out", str(out)])
    assert code == 0
    assert out.read_text() == "64.0,80.0,100.0\n"


def test_sweep_writes_one_row_per_population(corridor_scenario, tmp_path):
    out = tmp_path / "sweep"
    code = main(["sweep", str(corridor_scenario), "--pop", "1,2",
                 "--seeds", "2", "--out", str(out)])
    assert code == 0
    lines = (out / "metrics.csv").read_text().splitlines()
    assert len(lines) == 3
    assert lines[1].startswith("1,") and lines[2].startswith("2,")


def test_compare_bundled_pair(tmp_path):
    out = tmp_path / "cmp"
    code = main(["compare", "compare_10x15", "compare_10x15_micro",
                 "--pop", "1", "--seeds", "1", "--out", str(out)])
    assert code == 0
    lines = (out / "comparison.csv").read_text().splitlines()
    assert lines[1] == "1,14.5,14.0,true,15.0,14.5,true"


def test_compare_rejects_mismatched_grids(capsys):
    code = main(["compare", "compare_10x15", "escalator_stair",
                 "--pop", "1", "--seeds", "1"])
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_check_refinement_wants_half_cells():
    meso = parse_layout(CORRIDOR_LAYOUT)
    stretched = parse_layout("2 6 1.0\n" + "11 10 10 10 10 10\n"
                             "11 10 10 10 10 10\n"
                             "sink 0 5 1\nsink 1 5 1\nsource 0 0\n")
    with pytest.raises(DimensionMismatch, match="cell size"):
        check_refinement(meso, stretched)


def test_bad_population_spec(capsys):
    code = main(["sweep", "compare_10x15", "--pop", "abc"])
    assert code == 2
    assert "population spec" in capsys.readouterr().err


def test_parse_populations_forms():
    assert parse_populations("25") == [25]
    assert parse_populations("1,5,10") == [1, 5, 10]
    assert parse_populations("1..4") == [1, 2, 3, 4]
    assert parse_populations(" 2 , 3 ") == [2, 3]
    for bad in ("abc", "5..3", "-1..2", "1..x"):
        with pytest.raises(ConfigError):
            parse_populations(bad)
