import io

import pytest
import yaml

from matchnet import btmodel, cli
from matchnet.baselines import compute_apm, load_apm, load_pagerank
from matchnet.datamodel import ingest_path
from matchnet.embed import load_embedding
from matchnet.netbuild import build_network, load_edges
from matchnet.synth import load_abilities

FAST = ["--set", "walk.num_walks=60", "--set", "walk.walk_length=30", "--set", "embed.d=8", "-q"]


@pytest.fixture
def workspace(tmp_path):
    cfg = tmp_path / "run.yaml"
    cfg.write_text(yaml.safe_dump({"seed": 1, "output_dir": "out", "synth": {"seed": 3}}))
    assert cli.main(["synth", "-c", str(cfg), "-q"]) == 0
    data = tmp_path / "out" / "synth-3" / "matchups.csv"
    assert data.exists()
    return cfg, data, tmp_path / "out"


def run(cfg, data, *extra):
    return cli.main([*extra[:1], "-c", str(cfg), "--data", str(data), *FAST, *extra[1:]])


def test_evaluate_is_byte_identical(workspace):
    cfg, data, out = workspace
    assert run(cfg, data, "evaluate") == 0
    first = {p.name: p.read_bytes() for p in (out / "evaluate-1").iterdir()}
    assert run(cfg, data, "evaluate") == 0
    second = {p.name: p.read_bytes() for p in (out / "evaluate-1").iterdir()}
    assert first == second
    assert {"report_embedding.json", "report_pagerank.json", "report_apm.json",
            "calibration_apm.csv"} <= set(first)


def test_artifacts_round_trip(workspace):
    cfg, data, out = workspace
    ds = ingest_path(data)
    assert run(cfg, data, "build-net") == 0
    with open(out / "build-net-1" / "edges.txt") as fh:
        assert load_edges(fh) == build_network(ds)
    assert run(cfg, data, "fit") == 0
    fit_dir = out / "fit-1"
    with open(fit_dir / "embedding.txt") as fh:
        emb = load_embedding(fh)
    with open(fit_dir / "model.txt") as fh:
        model = btmodel.load_model(fh)
    assert model.d == emb.d == 8
    with open(fit_dir / "pagerank.csv") as fh:
        assert set(load_pagerank(fh).nodes) == set(build_network(ds).nodes)
    with open(fit_dir / "apm.csv") as fh:
        assert load_apm(fh).player_apm == compute_apm(ds).player_apm
    with open(out / "synth-3" / "abilities.csv") as fh:
        assert set(load_abilities(fh)) == set(ds.lineups)
    assert run(cfg, data, "ingest-check") == 0
    assert ingest_path(out / "ingest-check-1" / "matchups.csv") == ds


def test_predict_known_and_saved_model(workspace, capsys):
    cfg, data, out = workspace
    assert run(cfg, data, "fit") == 0
    capsys.readouterr()
    assert run(cfg, data, "predict", "--a", "1", "--b", "9", "--model-dir", str(out / "fit-1")) == 0
    first = capsys.readouterr().out
    assert run(cfg, data, "predict", "--a", "9", "--b", "1", "--model-dir", str(out / "fit-1")) == 0
    second = capsys.readouterr().out
    pa = float(first.rsplit("=", 1)[1])
    pb = float(second.rsplit("=", 1)[1])
    assert pa + pb == pytest.approx(1.0, abs=1e-4)


def test_predict_unknown_id_lists_known(workspace, capsys):
    cfg, data, _ = workspace
    assert run(cfg, data, "predict", "--a", "1", "--b", "9999") == 1
    err = capsys.readouterr().err
    assert "unknown lineup id 9999" in err and "known ids: 1, 2, 3" in err


def test_predict_unseen_roster_needs_team(workspace, capsys):
    cfg, data, _ = workspace
    assert run(cfg, data, "predict", "--a", "1", "--players-b", "x1|x2|x3|x4|x5") == 1
    assert "--team-b" in capsys.readouterr().err
    ds = ingest_path(data)
    team = ds.team_of[1]
    other = next(t for t in ds.team_of.values() if t != team)
    roster = "|".join(sorted(next(iter(ds.team_lineups(other))).players)[:4] + ["newcomer"])
    assert run(cfg, data, "predict", "--a", "1", "--players-b", roster, "--team-b", other) == 0
    assert "P(lineup 1 outperforms" in capsys.readouterr().out


def test_rate_teams_with_records(workspace, capsys):
    cfg, data, out = workspace
    ds = ingest_path(data)
    rec = out.parent / "records.csv"
    teams = sorted(set(ds.team_of.values()))
    rec.write_text("team,wins,losses\n" + "".join(f"{t},{k + 1},{10 - k}\n" for k, t in enumerate(teams)))
    assert run(cfg, data, "rate-teams", "--set", f"team_records={rec}") == 0
    assert "correlation with win percentage" in capsys.readouterr().out
    assert (out / "rate-teams-1" / "team_ratings.csv").read_text().startswith("team,rating\n")


def test_unknown_command_exits_2():
    with pytest.raises(SystemExit) as exc:
        cli.main(["frobnicate"])
    assert exc.value.code == 2


def test_missing_data_key(tmp_path, capsys):
    cfg = tmp_path / "run.yaml"
    cfg.write_text("seed: 0\n")
    assert cli.main(["evaluate", "-c", str(cfg)]) == 1
    assert "missing config key 'data'" in capsys.readouterr().err


def test_unknown_config_key(tmp_path, capsys):
    cfg = tmp_path / "run.yaml"
    cfg.write_text("walk:\n  steps: 3\n")
    assert cli.main(["embed", "-c", str(cfg)]) == 1
    assert "unknown config key 'walk.steps'" in capsys.readouterr().err


def test_bad_csv_reports_line(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("lineup_a_id,lineup_b_id,minutes,point_diff,players_a,players_b,team_a,team_b\n"
                   "1,2,abc,3,a|b|c|d|e,f|g|h|i|j,A,B\n")
    assert cli.main(["ingest-check", "--data", str(bad), "--out", str(tmp_path)]) == 1
    assert "line 2" in capsys.readouterr().err
