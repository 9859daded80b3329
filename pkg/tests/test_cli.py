import json
import subprocess
import sys

import numpy as np
import pytest

from tbr import SyntheticConfig
from tbr.cli import main


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """simulate -> build-baseline -> estimate once for the whole module."""
    root = tmp_path_factory.mktemp("cli")
    cfg = SyntheticConfig.random(
        seed=20, n_teams=30, balls_per_matchup=6, true_intercept=0.01,
        effect_sd=0.03, noise_sd=0.1, seasons=(2023, 2024),
        season_offsets={2023: 0.005, 2024: -0.005},
    )
    cfg_path = root / "cfg.json"
    cfg_path.write_text(json.dumps(cfg.as_dict()))
    assert main(["simulate", "--config", str(cfg_path),
                 "--out", str(root / "sim")]) == 0
    assert main(["build-baseline", str(root / "sim" / "events.csv"),
                 "--out", str(root / "grid.npz")]) == 0
    assert main(["estimate", str(root / "sim" / "events.csv"),
                 "--baseline", str(root / "grid.npz"),
                 "--out", str(root / "est"),
                 "--format", "csv,json,md"]) == 0
    return root


def test_simulate_writes_data_and_truth(workspace):
    assert (workspace / "sim" / "events.csv").exists()
    truth = json.loads((workspace / "sim" / "truth.json").read_text())
    assert "park" in truth["truth"]
    assert truth["meta"]["tool"] == "tbr"


def test_baseline_artifacts(workspace):
    assert (workspace / "grid.npz").exists()
    report = json.loads(
        (workspace / "grid_ingest_report.json").read_text())
    assert report["ingest"]["rows_kept"] == report["ingest"]["rows_total"]
    assert "config_hash" in report["meta"]


def test_estimate_outputs_per_season_and_wide(workspace):
    est = workspace / "est"
    for season in (2023, 2024):
        for name in (f"effects_{season}.json", f"effects_{season}.csv",
                     f"centered_{season}.csv", f"index_{season}.csv",
                     f"effects_{season}.md"):
            assert (est / name).exists(), name
    for name in ("park_effects_wide.csv", "defense_index_wide.md",
                 "residuals.npz", "run.json", "ingest_report.json"):
        assert (est / name).exists(), name


def test_estimate_json_contract(workspace):
    payload = json.loads(
        (workspace / "est" / "effects_2024.json").read_text())
    assert payload["season"] == 2024
    assert payload["park_effects"]["ATL"] == 0.0  # reference pinned
    assert payload["def_effects"]["ATL"] == 0.0
    assert len(payload["centered_park_effects"]) == 30
    centered_mean = np.mean(list(payload["centered_park_effects"].values()))
    assert abs(centered_mean) < 1e-12
    assert payload["sd_mode"] == "population"
    indices = [row["index"] for row in payload["park_index"]]
    assert np.mean(indices) == pytest.approx(100.0, abs=1e-9)
    assert np.std(indices) == pytest.approx(20.0, abs=1e-9)
    assert payload["meta"]["config_hash"]


def test_csv_outputs_embed_config(workspace):
    text = (workspace / "est" / "effects_2024.csv").read_text()
    assert text.startswith("# tool=tbr version=")
    assert "# config_hash=" in text
    assert "# config=" in text
    header = [l for l in text.splitlines() if not l.startswith("#")][0]
    assert header == "season,entity_type,entity,estimate"


def test_rerun_estimate_is_byte_identical(workspace):
    out2 = workspace / "est2"
    assert main(["estimate", str(workspace / "sim" / "events.csv"),
                 "--baseline", str(workspace / "grid.npz"),
                 "--out", str(out2), "--format", "csv,json,md"]) == 0
    for path in sorted((workspace / "est").iterdir()):
        twin = out2 / path.name
        assert twin.exists(), path.name
        assert path.read_bytes() == twin.read_bytes(), path.name


def test_rerun_baseline_is_byte_identical(workspace):
    out2 = workspace / "grid2.npz"
    assert main(["build-baseline", str(workspace / "sim" / "events.csv"),
                 "--out", str(out2)]) == 0
    assert out2.read_bytes() == (workspace / "grid.npz").read_bytes()


def test_diagnose_outputs(workspace):
    out = workspace / "diag"
    ref = workspace / "ref.csv"
    ref.write_text(
        "team,season,value\n"
        + "".join(f"{t},2024,{v}\n" for t, v in
                  [("ATL", 1.0), ("BOS", 4.0), ("CIN", 2.0), ("COL", 5.0),
                   ("DET", -3.0)])
    )
    assert main(["diagnose",
                 "--residuals", str(workspace / "est" / "residuals.npz"),
                 "--estimates", str(workspace / "est"),
                 "--out", str(out), "--svg",
                 "--reference", f"Def={ref}"]) == 0
    for name in ("home_away_2023.csv", "home_away_2024.csv",
                 "intercept_series.csv", "intercept_series.svg",
                 "stability_park_index.csv",
                 "reference_Def_side_by_side.csv",
                 "reference_Def_correlation.csv", "run.json"):
        assert (out / name).exists(), name
    svg = (out / "intercept_series.svg").read_text()
    assert svg.startswith("<svg") and "2024" in svg
    corr = (out / "reference_Def_correlation.csv").read_text()
    assert "2024" in corr


def test_simulate_check_reports_recovery(workspace, capsys):
    cfg = SyntheticConfig.random(seed=21, n_teams=8, balls_per_matchup=50,
                                 effect_sd=0.03, noise_sd=0.0)
    cfg_path = workspace / "cfg_check.json"
    cfg_path.write_text(json.dumps(cfg.as_dict()))
    out = workspace / "sim_check"
    assert main(["simulate", "--config", str(cfg_path), "--out", str(out),
                 "--mode", "residuals", "--check"]) == 0
    check = json.loads((out / "check.json").read_text())
    rec = check["recovery"]["2024"]
    assert rec["max_abs_park_error"] < 1e-9  # noise-free, residual mode
    assert rec["max_abs_defense_error"] < 1e-9
    captured = capsys.readouterr()
    assert "max_abs_park_error" in captured.out


def test_missing_column_exits_2_with_error_json(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("launch_speed,events\n100.0,single\n")
    grid = tmp_path / "g.npz"
    code = main(["build-baseline", str(bad), "--out", str(grid)])
    assert code == 2
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["error"]["type"] == "SchemaError"
    assert "launch_angle" in err["error"]["missing_columns"]


def test_nonexistent_input_exits_1(tmp_path, capsys):
    code = main(["build-baseline", str(tmp_path / "nope.csv"),
                 "--out", str(tmp_path / "g.npz")])
    assert code == 1
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert "do not exist" in err["error"]["message"]


def test_unknown_ref_team_exits_2(workspace, capsys):
    code = main(["estimate", str(workspace / "sim" / "events.csv"),
                 "--baseline", str(workspace / "grid.npz"),
                 "--out", str(workspace / "estx"),
                 "--ref-team", "ZZZ"])
    assert code == 2
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["error"]["type"] == "RosterError"


def test_out_dir_from_environment(workspace, monkeypatch, tmp_path):
    monkeypatch.setenv("TBR_OUT_DIR", str(tmp_path / "envout"))
    cfg = SyntheticConfig.random(seed=22, n_teams=4, balls_per_matchup=5)
    cfg_path = tmp_path / "c.json"
    cfg_path.write_text(json.dumps(cfg.as_dict()))
    assert main(["simulate", "--config", str(cfg_path)]) == 0
    assert (tmp_path / "envout" / "events.csv").exists()


def test_no_out_anywhere_exits_2(tmp_path, monkeypatch, capsys):
    monkeypatch.delenv("TBR_OUT_DIR", raising=False)
    cfg = SyntheticConfig.random(seed=23, n_teams=4, balls_per_matchup=5)
    cfg_path = tmp_path / "c.json"
    cfg_path.write_text(json.dumps(cfg.as_dict()))
    assert main(["simulate", "--config", str(cfg_path)]) == 2


def test_installed_entry_point_runs():
    proc = subprocess.run([sys.executable, "-m", "tbr.cli", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0


def test_underdetermined_data_exits_1(tmp_path, capsys):
    csv = tmp_path / "tiny.csv"
    rows = ["launch_speed,launch_angle,events,home_team,away_team,"
            "inning_topbot,game_date,game_year,game_type"]
    for k in range(40):
        rows.append(
            f"{90 + k % 5}.0,12.0,single,ATL,NYM,Top,2024-05-01,2024,R")
    csv.write_text("\n".join(rows) + "\n")
    grid = tmp_path / "g.npz"
    assert main(["build-baseline", str(csv), "--out", str(grid)]) == 0
    code = main(["estimate", str(csv), "--baseline", str(grid),
                 "--out", str(tmp_path / "est")])
    assert code == 1
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["error"]["type"] == "UnderdeterminedError"


def test_disconnected_data_exits_1_naming_components(tmp_path, capsys):
    from tbr.rosters import DEFAULT_TEAMS

    codes = [code for code, _ in DEFAULT_TEAMS]
    rows = ["launch_speed,launch_angle,events,home_team,away_team,"
            "inning_topbot,game_date,game_year,game_type"]
    # two internally crossed clusters of 15 teams that never meet
    for cluster in (codes[:15], codes[15:]):
        for home in cluster:
            for away in cluster:
                if home == away:
                    continue
                for half in ("Top", "Bot"):
                    rows.append(f"95.0,12.0,single,{home},{away},{half},"
                                f"2024-05-01,2024,R")
    csv = tmp_path / "split.csv"
    csv.write_text("\n".join(rows) + "\n")
    grid = tmp_path / "g.npz"
    assert main(["build-baseline", str(csv), "--out", str(grid)]) == 0
    code = main(["estimate", str(csv), "--baseline", str(grid),
                 "--out", str(tmp_path / "est")])
    assert code == 1
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["error"]["type"] == "IdentifiabilityError"
    assert "component 1" in err["error"]["message"]
    assert "component 2" in err["error"]["message"]
