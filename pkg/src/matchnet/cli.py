"""Command-line driver: ``matchnet <command> --config run.yaml [--set key=value ...]``."""

from __future__ import annotations

import argparse
import csv
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import baselines, btmodel, datamodel, netbuild
from .config import ConfigError, RunConfig
from .datamodel import IngestError, Lineup
from .embed import dump_embedding, generate_walks, load_embedding, train_embedding
from .evaluation import pearson
from .pipeline import FittedEmbeddingModel, fit_embedding_model, rate_teams, run_evaluation
from .synth import bayes_accuracy, dump_abilities, generate

COMMANDS = ("ingest-check", "build-net", "embed", "fit", "evaluate", "predict", "synth", "rate-teams")


class CommandError(RuntimeError):
    pass


def _run_dir(cfg: RunConfig, command: str, seed: int) -> Path:
    path = Path(cfg["output_dir"]) / f"{command}-{seed}"
    path.mkdir(parents=True, exist_ok=True)
    return path


def _load_data(cfg: RunConfig) -> datamodel.SeasonDataset:
    path = cfg.require("data")
    try:
        return datamodel.ingest_path(path, min_minutes=float(cfg["min_minutes"]))
    except OSError as exc:
        raise CommandError(f"cannot read data file {path}: {exc.strerror}") from None


def _write(path: Path, writer) -> Path:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer(fh)
    return path


def cmd_ingest_check(cfg, args):
    ds = _load_data(cfg)
    out = _run_dir(cfg, "ingest-check", cfg.seed)
    _write(out / "matchups.csv", lambda fh: datamodel.serialize(ds, fh))
    ties = sum(r.point_diff == 0 for r in ds.matchups)
    teams = len(set(ds.team_of.values()))
    return (f"{len(ds.lineups)} lineups, {len(ds.matchups)} matchups ({ties} tied), "
            f"{teams} teams -> {out}")


def cmd_build_net(cfg, args):
    net = netbuild.build_network(_load_data(cfg))
    out = _run_dir(cfg, "build-net", cfg.seed)
    _write(out / "edges.txt", lambda fh: netbuild.dump_edges(net, fh))
    return f"{net.n_nodes} nodes, {net.n_edges} edges -> {out / 'edges.txt'}"


def cmd_embed(cfg, args):
    net = netbuild.build_network(_load_data(cfg))
    corpus = generate_walks(net, cfg.walk())
    emb = train_embedding(corpus, cfg.embed())
    out = _run_dir(cfg, "embed", cfg.seed)
    _write(out / "embedding.txt", lambda fh: dump_embedding(emb, fh))
    lengths = corpus.lengths
    diag = {
        "num_walks": int(len(lengths)),
        "mean_walk_nodes": float(lengths.mean()),
        "min_walk_nodes": int(lengths.min()),
        "max_walk_nodes": int(lengths.max()),
        "loss_first_decile": float(np.nanmean(emb.loss_curve[:10])),
        "loss_last_decile": float(np.nanmean(emb.loss_curve[-10:])),
    }
    _write(out / "walks.json", lambda fh: fh.write(json.dumps(diag, sort_keys=True, indent=2) + "\n"))
    return f"{len(emb.nodes)} vectors of dimension {emb.d}, mean walk {diag['mean_walk_nodes']:.1f} nodes -> {out}"


def cmd_fit(cfg, args):
    ds = _load_data(cfg)
    exp = cfg.experiment()
    fitted = fit_embedding_model(ds, exp)
    out = _run_dir(cfg, "fit", cfg.seed)
    _write(out / "embedding.txt", lambda fh: dump_embedding(fitted.embedding, fh))
    _write(out / "model.txt", lambda fh: btmodel.dump_model(fitted.model, fh))
    net = netbuild.build_network(ds)
    pr = baselines.pagerank(net, exp.alpha, weighted=exp.pagerank_weighted)
    _write(out / "pagerank.csv", lambda fh: baselines.dump_pagerank(pr, fh))
    apm = baselines.compute_apm(ds, exp.apm_ridge)
    _write(out / "apm.csv", lambda fh: baselines.dump_apm(apm, fh))
    return f"fitted {fitted.model.d}-dim model on {len(ds.matchups)} matchups -> {out}"


def cmd_evaluate(cfg, args):
    ds = _load_data(cfg)
    reports = run_evaluation(ds, cfg.experiment())
    out = _run_dir(cfg, "evaluate", cfg.seed)
    for name, rep in reports.items():
        _write(out / f"report_{name}.json", lambda fh, rep=rep: fh.write(rep.to_json() + "\n"))
        _write(out / f"calibration_{name}.csv", rep.bins_csv)
    summary = ", ".join(f"{n} acc={r.accuracy:.3f} brier={r.brier:.3f}" for n, r in reports.items())
    clim = next(iter(reports.values())).brier_climatology
    return f"{summary}, climatology brier={clim:.3f} -> {out}"


def _fitted_for_predict(cfg, args, ds) -> FittedEmbeddingModel:
    if args.model_dir:
        src = Path(args.model_dir)
        try:
            with open(src / "embedding.txt", encoding="utf-8") as fh:
                emb = load_embedding(fh)
            with open(src / "model.txt", encoding="utf-8") as fh:
                model = btmodel.load_model(fh)
        except OSError as exc:
            raise CommandError(f"cannot read fitted model from {src}: {exc.strerror}") from None
        return FittedEmbeddingModel(emb, model, ds)
    return fit_embedding_model(ds, cfg.experiment())


def _resolve_lineup(ds, lineup_id, players, team, side):
    """Return a lineup id present in ``ds`` (adding an unseen lineup if needed)."""
    if players:
        roster = frozenset(p.strip() for p in players.split("|"))
        for lu in ds.lineups.values():
            if lu.players == roster:
                return ds, lu.id
        if not team:
            raise CommandError(f"unseen lineup {side} needs --team-{side} for imputation")
        new_id = min(ds.lineups, default=0) - 1 if lineup_id is None else lineup_id
        if new_id in ds.lineups:
            raise CommandError(f"lineup id {new_id} already names a different player set")
        lineups = dict(ds.lineups)
        lineups[new_id] = Lineup(new_id, roster)
        team_of = dict(ds.team_of)
        team_of[new_id] = team
        return datamodel.SeasonDataset(lineups, ds.matchups, team_of), new_id
    if lineup_id is None:
        raise CommandError(f"give --{side} LINEUP_ID or --players-{side}")
    if lineup_id not in ds.lineups:
        known = sorted(ds.lineups)
        shown = ", ".join(map(str, known[:50])) + (" ..." if len(known) > 50 else "")
        raise CommandError(f"unknown lineup id {lineup_id}; known ids: {shown}")
    return ds, lineup_id


def cmd_predict(cfg, args):
    ds = _load_data(cfg)
    ds2, a = _resolve_lineup(ds, args.a, args.players_a, args.team_a, "a")
    ds2, b = _resolve_lineup(ds2, args.b, args.players_b, args.team_b, "b")
    if a == b:
        raise CommandError("the two lineups must differ")
    fitted = _fitted_for_predict(cfg, args, ds)
    fitted = FittedEmbeddingModel(fitted.embedding, fitted.model, ds2)
    prob = fitted.predict_pair(a, b)
    return f"P(lineup {a} outperforms lineup {b}) = {prob:.4f}"


def cmd_synth(cfg, args):
    scfg = cfg.synth()
    ds, ability = generate(scfg)
    out = _run_dir(cfg, "synth", scfg.seed)
    _write(out / "matchups.csv", lambda fh: datamodel.serialize(ds, fh))
    _write(out / "abilities.csv", lambda fh: dump_abilities(ability, fh))
    return (f"{len(ds.lineups)} lineups, {len(ds.matchups)} matchups, "
            f"ability-oracle accuracy {bayes_accuracy(ds, ability):.3f} -> {out}")


def _read_team_records(path) -> dict[str, float]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise CommandError(f"cannot read team records {path}: {exc.strerror}") from None
    try:
        return {r["team"]: int(r["wins"]) / (int(r["wins"]) + int(r["losses"])) for r in rows}
    except (KeyError, ValueError, ZeroDivisionError):
        raise CommandError(f"team records {path} must have columns team,wins,losses") from None


def cmd_rate_teams(cfg, args):
    ds = _load_data(cfg)
    ratings = rate_teams(ds, cfg.experiment())
    out = _run_dir(cfg, "rate-teams", cfg.seed)

    def write(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["team", "rating"])
        for r in ratings:
            w.writerow([r.team, repr(r.rating)])

    _write(out / "team_ratings.csv", write)
    msg = f"rated {len(ratings)} teams -> {out / 'team_ratings.csv'}"
    if cfg["team_records"]:
        pct = _read_team_records(cfg["team_records"])
        common = [r for r in ratings if r.team in pct]
        corr = pearson([r.rating for r in common], [pct[r.team] for r in common])
        msg += f"; correlation with win percentage: {'n/a' if corr is None else f'{corr:.3f}'}"
    return msg


HANDLERS = {
    "ingest-check": cmd_ingest_check,
    "build-net": cmd_build_net,
    "embed": cmd_embed,
    "fit": cmd_fit,
    "evaluate": cmd_evaluate,
    "predict": cmd_predict,
    "synth": cmd_synth,
    "rate-teams": cmd_rate_teams,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="matchnet", description="Lineup matchup prediction")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", "-c", help="YAML run configuration")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="override a config key, e.g. walk.num_walks=500")
    parser.add_argument("--data", help="season CSV (overrides config 'data')")
    parser.add_argument("--out", help="output directory (overrides config 'output_dir')")
    parser.add_argument("--a", type=int, help="predict: reference lineup id")
    parser.add_argument("--b", type=int, help="predict: opposing lineup id")
    parser.add_argument("--players-a", help="predict: '|'-separated players of lineup a")
    parser.add_argument("--players-b", help="predict: '|'-separated players of lineup b")
    parser.add_argument("--team-a", help="predict: team of an unseen lineup a")
    parser.add_argument("--team-b", help="predict: team of an unseen lineup b")
    parser.add_argument("--model-dir", help="predict: directory written by 'fit'")
    parser.add_argument("--quiet", "-q", action="store_true", help="suppress warnings")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = list(args.overrides)
    if args.data:
        overrides.append(f"data={args.data}")
    if args.out:
        overrides.append(f"output_dir={args.out}")
    try:
        with warnings.catch_warnings():
            if args.quiet:
                warnings.simplefilter("ignore")
            cfg = RunConfig.load(args.config, overrides)
            print(HANDLERS[args.command](cfg, args))
    except (ConfigError, IngestError, CommandError, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"matchnet {args.command}: error: {msg}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
