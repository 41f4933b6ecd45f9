"""Command line entry point.

Exit codes: 0 pass, 1 statistical failure or replay mismatch, 2 theory
contradiction (a necessary condition, an invariant or the fork oracle
disagreed), 3 configuration error.
"""

from __future__ import annotations

import argparse
import filecmp
import logging
import sys
import tempfile
from pathlib import Path

from . import bounds as bnd
from . import harness as hx
from .adversaries import make_policy
from .errors import ConfigError, DomainError, TheoryContradiction
from .protocol_sim import run_execution

EXIT_PASS, EXIT_STAT_FAIL, EXIT_CONTRADICTION, EXIT_CONFIG = 0, 1, 2, 3
U64 = (1 << 64) - 1

log = logging.getLogger("longchain")


def _u64(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text}") from None
    if not 0 <= v <= U64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _experiment(args) -> hx.ExperimentConfig:
    if args.config is None:
        raise ConfigError("--config is required")
    return hx.load_experiment(args.config, seed=args.seed, trials=args.trials)


def _out(args, default: str) -> Path:
    p = Path(args.out or default)
    p.mkdir(parents=True, exist_ok=True)
    return p


def cmd_simulate(args) -> int:
    cfg = _experiment(args)
    out = _out(args, "out")
    report = hx.run_experiment(cfg, workers=args.workers, out_dir=out)
    log.info("%d trials in %.1fs", cfg.trials, report.runtime)
    for r in report.rows:
        print(f"{r.property}: {r.violations}/{r.trials} = {r.frequency:.4g} "
              f"[{r.wilson_low:.4g}, {r.wilson_high:.4g}] bound {r.bound_clamped:.4g} "
              f"{'pass' if r.passed else 'FAIL'}")
    print(f"necessary-condition checks: settlement {report.settlement_checked} trials, "
          f"chain quality {report.cq_checked} trials")
    if report.invariant_failures:
        t = report.invariant_failures[0]
        print(f"invariant failure in trial {t.trial} (seed {t.seed}): {t.invariant_failures[0]}", file=sys.stderr)
        return EXIT_CONTRADICTION
    if report.contradictions:
        t = report.contradictions[0]
        print(f"contradiction in trial {t.trial} (seed {t.seed}): {t.contradiction}", file=sys.stderr)
        return EXIT_CONTRADICTION
    return EXIT_PASS if report.passed else EXIT_STAT_FAIL


def cmd_bounds(args) -> int:
    cfg = _experiment(args)
    sec = cfg.security
    out = _out(args, "out")
    rows = hx.bounds_table(sec.f, sec.alpha, cfg.sim.delay, cfg.k, len(cfg.parties), cfg.mu, cfg.horizon)
    hx.write_rows(out / "bounds.csv", ["quantity", "raw", "clamped"], rows)
    for name, raw, clamped in rows:
        print(f"{name}: {raw:.6g} (clamped {clamped:.6g})")
    if not sec.applicable:
        print("bounds inapplicable: eps <= 0")
    return EXIT_PASS


def cmd_figure1(args) -> int:
    out = _out(args, "out")
    hx.write_rows(out / "figure1.csv", ["x", "random_exp", "sync_delta1", "sync_delta4", "sync_delta16"],
                  bnd.figure1_dataset())
    print(f"wrote {out / 'figure1.csv'}")
    return EXIT_PASS


def cmd_oracle(args) -> int:
    res = hx.run_oracle_suite(args.max_symbols, args.max_empty)
    print(f"{res.strings} strings, {res.comparisons} comparisons, {len(res.mismatches)} mismatches")
    if res.mismatches:
        out = _out(args, "out")
        hx.write_mismatches(out / "oracle_mismatches.csv", res.mismatches)
        return EXIT_CONTRADICTION
    return EXIT_PASS


def cmd_stats(args) -> int:
    section = {}
    if args.config is not None:
        section = hx.load_yaml(args.config).get("stats", {})
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.trials is not None:
        overrides["samples"] = args.trials
    cfg = hx.StatsConfig.from_mapping({**section, **overrides})
    report = hx.statistical_suite(cfg, args.group or None)
    out = _out(args, "out")
    report.write(out / "stats.csv")
    log.info("statistical suite in %.1fs", report.runtime)
    for c in report.checks:
        print(f"{c.check} {c.parameter} {c.kind}: {c.estimate:.5g} vs {c.reference:.5g} "
              f"z={c.z:.2f} {'pass' if c.passed else 'FAIL'}")
    return EXIT_PASS if report.passed else EXIT_STAT_FAIL


def cmd_replay(args) -> int:
    cfg = _experiment(args)
    if args.trial is not None:
        out = _out(args, "out")
        seed = hx.trial_seed(cfg.seed, args.trial)
        tr = run_execution(cfg.sim, make_policy(cfg.policy, cfg.s, cfg.k), cfg.horizon, seed)
        path = out / f"trace_{args.trial}.tsv"
        path.write_text("\n".join(tr.export_lines()) + "\n")
        print(f"wrote {path} (seed {seed})")
        return EXIT_PASS
    if args.out is None:
        raise ConfigError("replay needs --out pointing at an earlier simulate output")
    previous = Path(args.out)
    with tempfile.TemporaryDirectory() as tmp:
        hx.run_experiment(cfg, workers=args.workers, out_dir=tmp)
        same = True
        for name in ("experiment.csv", "trials.csv"):
            old = previous / name
            if not old.exists() or not filecmp.cmp(old, Path(tmp) / name, shallow=False):
                print(f"{name} differs")
                same = False
    print("identical" if same else "replay mismatch")
    return EXIT_PASS if same else EXIT_STAT_FAIL


COMMANDS = {
    "simulate": cmd_simulate,
    "bounds": cmd_bounds,
    "figure1": cmd_figure1,
    "oracle": cmd_oracle,
    "stats": cmd_stats,
    "replay": cmd_replay,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML experiment file")
    common.add_argument("--seed", type=_u64, help="base seed, overrides the config")
    common.add_argument("--trials", type=_positive, help="trial (or sample) count, overrides the config")
    common.add_argument("--workers", type=_positive, default=1, help="worker processes")
    common.add_argument("--out", help="output directory")
    common.add_argument("-v", "--verbose", action="store_true")
    parser = argparse.ArgumentParser(prog="longchain", description="Longest-chain security experiments.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="run trials and compare with the bounds")
    sub.add_parser("bounds", parents=[common], help="evaluate the analytical bounds for a config")
    sub.add_parser("figure1", parents=[common], help="write the security-region curves")
    p = sub.add_parser("oracle", parents=[common], help="compare recursions with fork enumeration")
    p.add_argument("--max-symbols", type=int, default=6)
    p.add_argument("--max-empty", type=int, default=2)
    p = sub.add_parser("stats", parents=[common], help="run the distributional checks")
    p.add_argument("--group", action="append", choices=sorted(hx.STAT_GROUPS))
    p = sub.add_parser("replay", parents=[common], help="rerun an experiment and compare outputs")
    p.add_argument("--trial", type=int, help="export the trace of one trial instead")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TheoryContradiction as exc:
        print(f"contradiction: {exc}", file=sys.stderr)
        return EXIT_CONTRADICTION
