import csv
import shutil

import pytest
import yaml

from longchain import harness as hx
from longchain.cli import main
from longchain.errors import ConfigError

BASE = {
    "leader": {"f": 0.3, "alpha": 1.0, "honest_population": 4},
    "delay": {"kind": "constant", "value": 0},
    "policy": "null",
    "s": 5,
    "k": 10,
    "horizon": 60,
    "mu": 0.5,
    "trials": 1,
    "seed": 9,
}

SWEEP = {
    "leader": {"f": 0.2, "alpha": 0.6, "honest_population": 6},
    "delay": {"kind": "geometric", "q": 0.5},
    "policy": "max_delay_balance",
    "s": 20,
    "k": 10,
    "horizon": 200,
    "mu": 0.5,
    "trials": 24,
    "seed": 3,
    "checks": {"invariants": True, "snapshots": 5},
}


def write_config(tmp_path, d, name="c.yaml"):
    p = tmp_path / name
    p.write_text(yaml.safe_dump(d))
    return str(p)


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_null_single_trial_report(tmp_path):
    cfg = hx.experiment_from_mapping(BASE)
    rep = hx.run_experiment(cfg, out_dir=tmp_path)
    assert rep.passed and not rep.contradictions
    rows = {r.property: r for r in rep.rows}
    assert rows["settlement"].violations == 0 and rows["settlement"].trials == 1
    assert rows["chain_quality"].violations == 0
    trials = read_csv(tmp_path / "trials.csv")
    assert len(trials) == 1 and trials[0]["contradiction"] == ""
    assert {r["property"] for r in read_csv(tmp_path / "experiment.csv")} >= {"settlement", "chain_quality"}


def test_config_overrides_and_auto_fields():
    cfg = hx.experiment_from_mapping({**BASE, "alpha": 0.9}, seed=5, trials=3)
    assert (cfg.seed, cfg.trials) == (5, 3)
    d = {**BASE, "leader": {"f": 0.05, "alpha": 0.95}, "delay": {"kind": "geometric", "q": 0.5},
         "k": "auto", "horizon": "auto", "mu": "half_eps"}
    cfg = hx.experiment_from_mapping(d)
    assert cfg.horizon == cfg.s + 10 * cfg.k
    assert cfg.mu == pytest.approx(cfg.security.eps / 2)


@pytest.mark.parametrize("patch", [
    {"policy": "bogus"}, {"s": 0}, {"k": -1}, {"horizon": 3}, {"trials": 0}, {"mu": 1.5}, {"s": "x"},
    {"leader": {"f": 0.05, "alpha": 0.3}, "mu": "half_eps"},
])
def test_bad_experiment_configs(patch):
    with pytest.raises(ConfigError):
        hx.experiment_from_mapping({**BASE, **patch})


def test_missing_key():
    d = dict(BASE)
    del d["policy"]
    with pytest.raises(ConfigError):
        hx.experiment_from_mapping(d)


def test_results_do_not_depend_on_workers(tmp_path):
    cfg = hx.experiment_from_mapping(SWEEP)
    a, b = tmp_path / "a", tmp_path / "b"
    a.mkdir()
    b.mkdir()
    hx.run_experiment(cfg, workers=1, out_dir=a)
    hx.run_experiment(cfg, workers=2, out_dir=b)
    for name in ("experiment.csv", "trials.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_sweep_trials_are_consistent():
    rep = hx.run_experiment(hx.experiment_from_mapping(SWEEP))
    assert not rep.contradictions and not rep.invariant_failures
    assert any(t.settlement_violated for t in rep.trials)


def test_trial_seeds_are_distinct():
    seeds = {hx.trial_seed(7, t) for t in range(1000)}
    assert len(seeds) == 1000 and all(0 <= s < 2 ** 63 for s in seeds)


def test_wilson_interval():
    lo, hi = hx.wilson_interval(0, 100)
    assert lo == 0 and 0 < hi < 0.05
    lo, hi = hx.wilson_interval(50, 100)
    assert lo < 0.5 < hi and hi - 0.5 == pytest.approx(0.5 - lo)


def test_oracle_smallest_sweep():
    res = hx.run_oracle_suite(1, 0)
    assert res.strings == 3 and res.passed


def test_oracle_catches_shifted_case():
    res = hx.run_oracle_suite(3, 0, step=hx.shifted_third_case(1), stop_after=1)
    assert not res.passed and res.mismatches[0].w == "010"
    res = hx.run_oracle_suite(3, 0, step=hx.shifted_third_case(-1), stop_after=1)
    assert not res.passed


def test_oracle_size_limit():
    with pytest.raises(ConfigError):
        hx.run_oracle_suite(8, 0)


def test_stat_check_sides():
    assert hx.stat_check("x", "", hx.UPPER, 0, 100, 0.5).passed
    assert not hx.stat_check("x", "", hx.LOWER, 0, 100, 0.5).passed
    assert not hx.stat_check("x", "", hx.EQUAL, 100, 100, 0.5).passed
    # a bound of zero is only met by zero hits
    assert hx.stat_check("x", "", hx.UPPER, 0, 100, 0.0).passed
    assert not hx.stat_check("x", "", hx.UPPER, 1, 100, 0.0).passed


def test_stats_config_rejects_unknown_keys():
    with pytest.raises(ConfigError):
        hx.StatsConfig.from_mapping({"sample": 10})
    assert hx.StatsConfig.from_mapping({"samples": "10"}).samples == 10


def test_walk_group_small():
    rep = hx.statistical_suite(hx.StatsConfig(samples=2000, walk_horizon=1000), ["walk"])
    assert rep.passed
    down = [c for c in rep.checks if c.parameter.startswith("eps=1,")][0]
    assert down.estimate == 0.0


def test_unknown_group():
    with pytest.raises(ConfigError):
        hx.statistical_suite(hx.StatsConfig(samples=10), ["nope"])


# -- command line ----------------------------------------------------------

def test_cli_simulate_and_replay(tmp_path, capsys):
    path = write_config(tmp_path, SWEEP)
    out = tmp_path / "run"
    assert main(["simulate", "--config", path, "--out", str(out), "--trials", "6"]) == 0
    assert main(["replay", "--config", path, "--out", str(out), "--trials", "6", "--workers", "2"]) == 0
    assert "identical" in capsys.readouterr().out
    assert main(["replay", "--config", path, "--out", str(out), "--trials", "6", "--seed", "4"]) == 1
    assert main(["replay", "--config", path, "--out", str(out), "--trial", "2"]) == 0
    assert (out / "trace_2.tsv").read_text().startswith("#\tseed=")


def test_cli_trace_export_is_reproducible(tmp_path):
    path = write_config(tmp_path, SWEEP)
    for d in ("x", "y"):
        assert main(["replay", "--config", path, "--out", str(tmp_path / d), "--trial", "1"]) == 0
    assert (tmp_path / "x" / "trace_1.tsv").read_bytes() == (tmp_path / "y" / "trace_1.tsv").read_bytes()


def test_cli_config_errors(tmp_path, capsys):
    assert main(["simulate"]) == 3
    assert main(["simulate", "--config", str(tmp_path / "missing.yaml")]) == 3
    bad = tmp_path / "bad.yaml"
    bad.write_text("leader: [1, 2\n")
    assert main(["simulate", "--config", str(bad)]) == 3
    assert main(["simulate", "--config", write_config(tmp_path, {**BASE, "policy": "x"})]) == 3
    assert main(["replay", "--config", write_config(tmp_path, BASE)]) == 3
    assert "config error" in capsys.readouterr().err


def test_cli_rejects_bad_seed():
    with pytest.raises(SystemExit):
        main(["simulate", "--seed", str(2 ** 64)])


def test_cli_bounds_and_figure(tmp_path, capsys):
    d = {**BASE, "leader": {"f": 0.05, "alpha": 0.95}, "delay": {"kind": "geometric", "q": 0.5}}
    path = write_config(tmp_path, d)
    assert main(["bounds", "--config", path, "--out", str(tmp_path)]) == 0
    rows = {r["quantity"]: r for r in read_csv(tmp_path / "bounds.csv")}
    assert float(rows["p"]["raw"]) == pytest.approx(0.9047619047619048)
    assert main(["figure1", "--out", str(tmp_path)]) == 0
    assert len(read_csv(tmp_path / "figure1.csv")) > 10


def test_cli_oracle(tmp_path, capsys):
    assert main(["oracle", "--max-symbols", "2", "--max-empty", "1", "--out", str(tmp_path)]) == 0
    assert "0 mismatches" in capsys.readouterr().out
    assert main(["oracle", "--max-symbols", "9"]) == 3


def test_cli_stats(tmp_path):
    cfg = tmp_path / "s.yaml"
    cfg.write_text(yaml.safe_dump({"stats": {"samples": 500}}))
    assert main(["stats", "--config", str(cfg), "--group", "walk", "--out", str(tmp_path)]) == 0
    assert read_csv(tmp_path / "stats.csv")[0]["check"] == "random_walk"
    cfg.write_text(yaml.safe_dump({"stats": {"bogus": 1}}))
    assert main(["stats", "--config", str(cfg)]) == 3


def test_cli_contradiction_exit(tmp_path, monkeypatch):
    def broken(*a, **k):
        from longchain.errors import TheoryContradiction
        raise TheoryContradiction("forced", 0, 1)
    monkeypatch.setattr(hx, "run_oracle_suite", broken)
    assert main(["oracle"]) == 2


def test_console_script_installed():
    assert shutil.which("longchain") is not None
