"""Acceptance criteria, one test each; every test also records a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines inline; they
are repeated in the terminal summary either way.
"""

import functools
import time

import numpy as np
import pytest
import yaml

from conftest import ACCEPTANCE_LINES
from test_baselines import pagerank_oracle_gap, random_net
from test_btmodel import antisymmetry_gap, bt_gradient_error
from test_skipgram import sgns_gradient_errors
from test_walks import first_order_check

from matchnet import btmodel, cli
from matchnet.baselines import pagerank
from matchnet.datamodel import Lineup, MatchupRecord
from matchnet.embed import EmbedConfig, Embedding, WalkConfig, embed_network, transition_distribution
from matchnet.evaluation import SplitSpec, accuracy, brier, calibration, climatology, labels_of, similarity_distance_diag, split
from matchnet.netbuild import build_network, from_edges
from matchnet.pipeline import ExperimentConfig, evaluate_apm, evaluate_embedding, evaluate_pagerank, fit_embedding_model
from matchnet.synth import SynthConfig, bayes_accuracy, generate

SPLIT_SEEDS = range(5)


def record(n, desc, ok, detail=""):
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {desc}" + (f" ({detail})" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def reference_config(seed):
    return ExperimentConfig(
        walk=WalkConfig(num_walks=500, walk_length=200, seed=seed),
        embed=EmbedConfig(d=32, seed=seed),
        split=SplitSpec(0.8, seed),
    )


@functools.lru_cache(maxsize=None)
def reference_season():
    return generate(SynthConfig(n_teams=8, lineups_per_team=6, ability_sd=1.0, noise_sd=0.5,
                                matchup_density=0.5, seed=7))


@functools.lru_cache(maxsize=None)
def synthetic_experiment():
    ds, ability = reference_season()
    t0 = time.perf_counter()
    runs = []
    for s in SPLIT_SEEDS:
        cfg = reference_config(s)
        train, test = split(ds, cfg.split)
        fitted = fit_embedding_model(train, cfg)
        runs.append({
            "train": train,
            "test": test,
            "fitted": fitted,
            "embedding": evaluate_embedding(train, test, cfg, fitted),
            "pagerank": evaluate_pagerank(train, test, cfg),
            "apm": evaluate_apm(train, test, cfg),
            "bayes": bayes_accuracy(test, ability),
        })
    return runs, time.perf_counter() - t0


def test_c1_pagerank_oracle():
    t0 = time.perf_counter()
    gap = pagerank_oracle_gap(50, seed=0)
    rng = np.random.default_rng(9)
    nets = [random_net(rng) for _ in range(5)]
    ones = all(
        np.array_equal(pagerank(net, 0.0, method=m).values, np.ones(net.n_nodes))
        for net in nets
        for m in ("iterative", "direct")
    )
    elapsed = time.perf_counter() - t0
    record(1, "PageRank iterative vs dense solve, alpha=0 gives ones",
           gap <= 1e-8 and ones and elapsed < 10,
           f"max gap {gap:.2e}, alpha=0 exact {ones}, {elapsed:.2f}s")


def _alpha_cases_exact():
    net = from_edges([0, 1, 2], [(0, 1, 1.0), (1, 0, 1.0), (1, 2, 1.0)])
    _, a = transition_distribution(net, 0, 1, 0.5, 3.0)
    net = from_edges(range(4), [(0, 1, 1.0), (0, 2, 1.0), (1, 0, 2.0), (1, 2, 1.0), (1, 3, 3.0)])
    _, b = transition_distribution(net, 0, 1, 0.5, 3.0)
    return (np.allclose(a, [6 / 7, 1 / 7], rtol=1e-15, atol=0)
            and np.allclose(b, [4 / 6, 1 / 6, 1 / 6], rtol=1e-15, atol=0))


def test_c2_walk_law():
    z = first_order_check(100_000, seed=11)
    exact = _alpha_cases_exact()
    record(2, "first-order walk law and bias cases", z <= 3.0 and exact,
           f"worst cell {z:.2f} SE, hand-enumerated cases exact {exact}")


def test_c3_gradients():
    sg = max(max(sgns_gradient_errors(s)) for s in range(10))
    bt = max(bt_gradient_error(s) for s in range(10))
    record(3, "analytic gradients vs central differences", sg <= 1e-4 and bt <= 1e-4,
           f"skip-gram {sg:.1e}, Bradley-Terry {bt:.1e}")


def test_c4_antisymmetry():
    gap = antisymmetry_gap(10_000, seed=0)
    runs, _ = synthetic_experiment()
    flip_ok = True
    for run in runs:
        fitted, test = run["fitted"], run["test"]
        y = labels_of(test)
        p = np.array([fitted.predict_pair(r.lineup_a, r.lineup_b) for r in test.matchups])
        p_flip = np.array([fitted.predict_pair(r.lineup_b, r.lineup_a) for r in test.matchups])
        flip_ok &= bool(np.array_equal(p_flip, 1 - p))
        flip_ok &= accuracy(p, y) == accuracy(p_flip, 1 - y)
        flip_ok &= brier(p, y) == brier(p_flip, 1 - y)
    dyadic = np.arange(0, 65) / 64
    yy = (np.arange(65) % 3 == 0).astype(float)
    sym = brier(dyadic, yy) == brier(1 - dyadic, 1 - yy)
    record(4, "prediction antisymmetry and evaluation invariants", gap <= 1e-12 and flip_ok and sym,
           f"max |p_ij + p_ji - 1| = {gap:.1e}, flip identity {flip_ok}, Brier symmetry {sym}")


def test_c5_climatology():
    y = np.array([1.0, 0.0] * 50)
    b = brier(np.full(100, 0.5), y)
    _, clim = climatology(y)
    record(5, "constant 0.5 on balanced labels", b == 0.25 and clim == 0.25, f"Brier {b!r}")


def test_c6_synthetic_experiment():
    runs, elapsed = synthetic_experiment()
    acc = {m: float(np.mean([r[m].accuracy for r in runs])) for m in ("embedding", "pagerank", "apm")}
    brr = {m: float(np.mean([r[m].brier for r in runs])) for m in ("embedding", "pagerank", "apm")}
    clim = float(np.mean([r["embedding"].brier_climatology for r in runs]))
    bayes = float(np.mean([r["bayes"] for r in runs]))
    ok = (
        acc["embedding"] - acc["pagerank"] >= 0.03
        and acc["embedding"] - acc["apm"] >= 0.03
        and acc["embedding"] - 0.5 >= 0.10
        and brr["embedding"] < 0.25
        and max(brr["pagerank"], brr["apm"]) < clim
        and elapsed < 300
    )
    detail = (", ".join(f"{m} acc {acc[m]:.3f} brier {brr[m]:.3f}" for m in acc)
              + f", climatology brier {clim:.3f}, ability-oracle acc {bayes:.3f}, {elapsed:.1f}s")
    record(6, "synthetic season: embedding model beats both baselines by 3 points", ok, detail)


def test_c7_calibration():
    runs, _ = synthetic_experiment()
    preds = np.concatenate([[p["prob"] for p in r["embedding"].predictions] for r in runs])
    labels = np.concatenate([[p["label"] for p in r["embedding"].predictions] for r in runs])
    cal = calibration(preds, labels)
    ok = cal.slope is not None and 0.7 <= cal.slope <= 1.15 and -0.1 <= cal.intercept <= 0.2
    record(7, "pooled calibration line", ok, f"slope {cal.slope:.3f}, intercept {cal.intercept:.3f}")


def _holdout_accuracy(seed):
    ds, _ = reference_season()
    rng = np.random.default_rng(seed)
    held = set()
    for team in sorted(set(ds.team_of.values())):
        ids = [lu.id for lu in ds.team_lineups(team)]
        held.add(int(rng.choice(ids)))
    train = ds.with_matchups([r for r in ds.matchups if not held & set(r.pair)])
    test = ds.with_matchups([r for r in ds.matchups if held & set(r.pair) and r.point_diff != 0])
    cfg = reference_config(seed)
    fitted = fit_embedding_model(train, cfg)
    assert not any(h in fitted.embedding for h in held)
    y = labels_of(test)
    p = np.array([fitted.predict_pair(r.lineup_a, r.lineup_b) for r in test.matchups])
    return accuracy(p, y), max(y.mean(), 1 - y.mean()), len(y)


def test_c8_imputation():
    results = [_holdout_accuracy(s) for s in SPLIT_SEEDS]
    acc = float(np.mean([a for a, _, _ in results]))
    clim = float(np.mean([c for _, c, _ in results]))
    v1, v2 = np.array([1.0, 0.0, 3.0]), np.array([0.0, 2.0, -3.0])
    emb = Embedding((1, 2), np.stack([v1, v2]))
    fresh = Lineup(99, frozenset({"p1", "p2", "p3", "p4", "p5"}))
    team = [Lineup(1, frozenset({"p1", "p2", "p3", "p4", "x1"})),
            Lineup(2, frozenset({"p1", "p2", "y1", "y2", "y3"}))]
    exact = np.array_equal(btmodel.impute_unseen(emb, team, fresh), (4 * v1 + 2 * v2) / 6)
    record(8, "held-out lineups via imputation vs climatology", acc >= clim and exact,
           f"accuracy {acc:.3f} vs climatology {clim:.3f} over {sum(n for *_, n in results)} pairs, "
           f"two-candidate arithmetic exact {exact}")


def test_c9_similarity_diagnostic():
    ds, _ = reference_season()
    emb = embed_network(build_network(ds), WalkConfig(num_walks=500, walk_length=200, seed=0),
                        EmbedConfig(d=32, seed=0))
    corr = {t: similarity_distance_diag(emb, ds.team_lineups(t)) for t in sorted(set(ds.team_of.values()))}
    neg = sum(c is not None and c < 0 for c in corr.values())
    share = neg / len(corr)
    record(9, "overlap vs distance correlation negative for most teams", share >= 0.75,
           f"{neg}/{len(corr)} teams negative; " + ", ".join(
               f"{t} {'n/a' if c is None else f'{c:.2f}'}" for t, c in corr.items()))


def test_c10_determinism(tmp_path):
    cfg = tmp_path / "run.yaml"
    cfg.write_text(yaml.safe_dump({
        "seed": 0, "output_dir": "runs",
        "walk": {"num_walks": 500, "walk_length": 200}, "embed": {"d": 32},
        "synth": {"seed": 7},
    }))
    assert cli.main(["synth", "-c", str(cfg), "-q"]) == 0
    data = str(tmp_path / "runs" / "synth-7" / "matchups.csv")
    outputs = []
    for k in range(2):
        out = tmp_path / f"out{k}"
        assert cli.main(["evaluate", "-c", str(cfg), "--data", data, "--out", str(out), "-q"]) == 0
        outputs.append({p.name: p.read_bytes() for p in sorted((out / "evaluate-0").glob("*.json"))})
    same = outputs[0] == outputs[1] and len(outputs[0]) == 3
    record(10, "two evaluate runs give byte-identical report JSON", same,
           f"{len(outputs[0])} reports compared")
