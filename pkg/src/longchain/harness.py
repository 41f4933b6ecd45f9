"""Experiment configuration, the trial runner and the check suites.

Trials are independent and seeded from ``(base seed, trial index)``, so a
run's outputs do not depend on how many workers execute it.  Output files
contain no timing information for the same reason.
"""

from __future__ import annotations

import csv
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np
import yaml
from scipy.stats import binomtest

from . import bounds as bnd
from . import checks
from .adversaries import POLICIES, make_policy
from .charstring import TriString
from .delay_model import DelayDistribution, from_config as delay_from_config, geometric
from .errors import ConfigError, DomainError, TheoryContradiction
from .fork_calculus import MarginStep, margin, margin_step, reach
from .fork_oracle import brute_force_reach_margin, padded_strings
from .leader_election import from_config as leader_from_config, params as leader_params
from .montecarlo import (CompressedLabels, GapLabels, ReachAt, RenewalConfig, compressed_unheard_path,
                         renewal_steps, unheard_at_slot, walk_excursions)
from .protocol_sim import SimConfig, run_execution
from .streams import stream_key

SIGMAS = 3.0


# -- configuration -----------------------------------------------------------

@dataclass(frozen=True)
class ExperimentConfig:
    sim: SimConfig
    policy: str
    s: int
    k: int
    horizon: int
    trials: int
    seed: int
    mu: float | None = None
    T: int | None = None
    check_invariants: bool = False
    check_necessary: bool = True
    snapshots: int = 20

    def __post_init__(self):
        if self.policy not in POLICIES:
            raise ConfigError(f"unknown policy {self.policy!r}; choose from {', '.join(POLICIES)}")
        if self.s < 1 or self.k < 0:
            raise ConfigError("need s >= 1 and k >= 0")
        if self.horizon < self.s + self.k:
            raise ConfigError(f"horizon {self.horizon} is below s + k = {self.s + self.k}")
        if self.trials < 1:
            raise ConfigError("trial count must be at least 1")
        if self.mu is not None and not 0 < self.mu < 1:
            raise ConfigError("mu must lie in (0, 1)")

    @property
    def parties(self) -> tuple[int, ...]:
        return self.sim.observed_parties

    @property
    def security(self) -> bnd.SecurityParams:
        f, alpha = leader_params(self.sim.leader)
        return bnd.compute_params(f, alpha, self.sim.delay)


def load_yaml(path) -> dict:
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path} is not valid YAML: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must be a mapping")
    return data


def _int(d: Mapping, key: str, default=None):
    v = d.get(key, default)
    if v is None:
        return None
    try:
        return int(v)
    except (TypeError, ValueError):
        raise ConfigError(f"{key} must be an integer, got {v!r}") from None


def experiment_from_mapping(d: Mapping, **overrides) -> ExperimentConfig:
    """Build a config.  ``k`` may be ``auto`` (smallest k whose settlement
    bound is at most ``k_target``); ``horizon`` may be ``auto`` (``s`` plus
    ``horizon_k_multiple`` times ``k``); ``mu`` may be ``half_eps``."""
    d = {**d, **{k: v for k, v in overrides.items() if v is not None}}
    for key in ("leader", "delay", "policy", "s", "k"):
        if key not in d:
            raise ConfigError(f"config is missing {key!r}")
    leader = leader_from_config(d["leader"])
    delay = delay_from_config(d["delay"])
    observed = d.get("observed")
    sim = SimConfig(leader, delay, tuple(int(x) for x in observed) if observed is not None else None,
                    _int(d, "negative_cutoff", 10_000))
    f, alpha = leader_params(leader)
    sec = None

    def security():
        nonlocal sec
        if sec is None:
            sec = bnd.compute_params(f, alpha, delay)
        return sec

    s = _int(d, "s")
    if d["k"] == "auto":
        try:
            k = bnd.k_for_target(security(), float(d.get("k_target", 0.2)), len(sim.observed_parties))
        except DomainError as exc:
            raise ConfigError(f"cannot choose k: {exc}") from None
    else:
        k = _int(d, "k")
    horizon = d.get("horizon", "auto")
    if horizon == "auto":
        horizon = s + _int(d, "horizon_k_multiple", 10) * k
    else:
        horizon = _int(d, "horizon")
    mu = d.get("mu")
    if mu == "half_eps":
        if not security().applicable:
            raise ConfigError("mu = half_eps needs eps > 0")
        mu = security().eps / 2.0
    elif mu is not None:
        mu = float(mu)
    checks_cfg = d.get("checks", {}) or {}
    return ExperimentConfig(
        sim=sim, policy=str(d["policy"]), s=s, k=k, horizon=horizon,
        trials=_int(d, "trials", 1), seed=_int(d, "seed", 0), mu=mu, T=_int(d, "T"),
        check_invariants=bool(checks_cfg.get("invariants", False)),
        check_necessary=bool(checks_cfg.get("necessary", True)),
        snapshots=_int(checks_cfg, "snapshots", 20),
    )


def load_experiment(path, **overrides) -> ExperimentConfig:
    return experiment_from_mapping(load_yaml(path), **overrides)


def trial_seed(base: int, trial: int) -> int:
    return stream_key(base, trial) >> 1


# -- trials ------------------------------------------------------------------

@dataclass(frozen=True)
class TrialResult:
    trial: int
    seed: int
    settlement_violated: bool
    first_violation: int
    cq_violated: bool
    cq_special_violated: bool
    common_prefix_violated: bool
    settlement_checked: int
    settlement_min_slack: float
    cq_checked: int
    cq_min_slack: float
    adversarial_blocks: int
    early_deliveries: int
    invariant_failures: tuple[str, ...] = ()
    contradiction: str = ""


CSV_NAN = float("nan")


def run_trial(cfg: ExperimentConfig, trial: int) -> TrialResult:
    seed = trial_seed(cfg.seed, trial)
    policy = make_policy(cfg.policy, cfg.s, cfg.k)
    tr = run_execution(cfg.sim, policy, cfg.horizon, seed)
    parties = cfg.parties
    settle = checks.check_settlement(tr, cfg.s, cfg.k, parties)
    cq = cq_special = False
    if cfg.mu is not None:
        cq = not checks.check_chain_quality(tr, cfg.mu, cfg.s, cfg.k, parties, checks.HONEST_MODE)
        cq_special = not checks.check_chain_quality(tr, cfg.mu, cfg.s, cfg.k, parties, checks.SPECIAL_MODE)
    cp = False
    if cfg.T is not None:
        cp = not checks.check_common_prefix(tr, cfg.T, cfg.k, parties)
    s_checked, s_slack, c_checked, c_slack = 0, CSV_NAN, 0, CSV_NAN
    contradiction = ""
    if cfg.check_necessary:
        try:
            r = checks.assert_settlement_necessary(tr, cfg.s, cfg.k, parties)
            s_checked, s_slack = r.checked, CSV_NAN if r.min_slack is None else r.min_slack
            if cfg.mu is not None:
                r = checks.assert_cq_necessary(tr, cfg.mu, cfg.s, cfg.k, parties)
                c_checked, c_slack = r.checked, CSV_NAN if r.min_slack is None else r.min_slack
        except TheoryContradiction as exc:
            contradiction = str(exc)
    failures: tuple[str, ...] = ()
    if cfg.check_invariants:
        rep = checks.check_invariants(tr, cfg.snapshots)
        failures = tuple(rep.failures)
    adv_blocks = int((tr.proposer[1:] < 0).sum())
    early = int((tr.messages.actual < tr.messages.scheduled).sum())
    return TrialResult(trial, seed, not settle, -1 if settle else int(settle.first_violation), cq, cq_special, cp,
                       s_checked, s_slack, c_checked, c_slack, adv_blocks, early, failures, contradiction)


def _run_chunk(args) -> list[TrialResult]:
    cfg, trials = args
    return [run_trial(cfg, t) for t in trials]


def run_trials(cfg: ExperimentConfig, workers: int = 1, chunk: int = 50) -> list[TrialResult]:
    indices = list(range(cfg.trials))
    if workers <= 1:
        results = [run_trial(cfg, t) for t in indices]
    else:
        chunks = [(cfg, indices[i:i + chunk]) for i in range(0, len(indices), chunk)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = [r for part in pool.map(_run_chunk, chunks) for r in part]
    return sorted(results, key=lambda r: r.trial)


# -- reporting ---------------------------------------------------------------

def wilson_interval(successes: int, n: int) -> tuple[float, float]:
    ci = binomtest(successes, n).proportion_ci(confidence_level=0.95, method="wilson")
    return float(ci.low), float(ci.high)


def bound_z(estimate: float, bound: float, n: int) -> tuple[float, float]:
    """Standard error at the bound and the z-score of the estimate above it."""
    b = min(max(bound, 0.0), 1.0)
    se = math.sqrt(b * (1.0 - b) / n)
    if se == 0.0:
        return 0.0, (math.inf if estimate > b else 0.0)
    return se, (estimate - b) / se


@dataclass(frozen=True)
class PropertyRow:
    property: str
    trials: int
    violations: int
    frequency: float
    wilson_low: float
    wilson_high: float
    bound_raw: float
    bound_clamped: float
    se: float
    z: float
    passed: bool


def property_row(name: str, violations: int, n: int, bound: bnd.BoundTerms | None) -> PropertyRow:
    freq = violations / n
    lo, hi = wilson_interval(violations, n)
    if bound is None:
        return PropertyRow(name, n, violations, freq, lo, hi, CSV_NAN, CSV_NAN, CSV_NAN, CSV_NAN, True)
    se, z = bound_z(freq, bound.clamped, n)
    return PropertyRow(name, n, violations, freq, lo, hi, bound.total, bound.clamped, se, z,
                       freq <= bound.clamped + SIGMAS * se)


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    rows: list[PropertyRow]
    trials: list[TrialResult]
    runtime: float = 0.0

    @property
    def contradictions(self) -> list[TrialResult]:
        return [t for t in self.trials if t.contradiction]

    @property
    def invariant_failures(self) -> list[TrialResult]:
        return [t for t in self.trials if t.invariant_failures]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    @property
    def settlement_checked(self) -> int:
        return sum(t.settlement_checked > 0 for t in self.trials)

    @property
    def cq_checked(self) -> int:
        return sum(t.cq_checked > 0 for t in self.trials)

    def write(self, out_dir) -> list[Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        rows_path = out / "experiment.csv"
        with open(rows_path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([f.name for f in fields(PropertyRow)])
            for r in self.rows:
                w.writerow([_fmt(getattr(r, f.name)) for f in fields(PropertyRow)])
        trials_path = out / "trials.csv"
        cols = [f.name for f in fields(TrialResult)]
        with open(trials_path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(cols)
            for t in self.trials:
                w.writerow([_fmt(getattr(t, c)) for c in cols])
        return [rows_path, trials_path]


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple):
        return "|".join(v)
    return str(v)


def experiment_bounds(cfg: ExperimentConfig):
    """Settlement and chain quality bounds, ``None`` where they do not apply."""
    sec = cfg.security
    if not sec.applicable:
        return None, None
    n = len(cfg.parties)
    settle = bnd.settlement_bound(sec, cfg.k, n)
    cq = None
    if cfg.mu is not None and cfg.mu < sec.eps:
        cq = bnd.chain_quality_bound(sec, cfg.k, cfg.mu, n)
    return settle, cq


def summarize(cfg: ExperimentConfig, results: Sequence[TrialResult], runtime: float = 0.0) -> ExperimentReport:
    n = len(results)
    settle_b, cq_b = experiment_bounds(cfg)
    rows = [property_row("settlement", sum(r.settlement_violated for r in results), n, settle_b)]
    if cfg.mu is not None:
        rows.append(property_row("chain_quality", sum(r.cq_violated for r in results), n, cq_b))
        rows.append(property_row("chain_quality_special", sum(r.cq_special_violated for r in results), n, cq_b))
    if cfg.T is not None:
        cp_b = None
        if settle_b is not None:
            cp_b = bnd.BoundTerms(cfg.T * settle_b.main, cfg.T * settle_b.unheard, settle_b.parties)
        rows.append(property_row("common_prefix", sum(r.common_prefix_violated for r in results), n, cp_b))
    return ExperimentReport(cfg, rows, list(results), runtime)


def run_experiment(cfg: ExperimentConfig, workers: int = 1, out_dir=None) -> ExperimentReport:
    t0 = time.perf_counter()
    results = run_trials(cfg, workers)
    report = summarize(cfg, results, time.perf_counter() - t0)
    if out_dir is not None:
        report.write(out_dir)
    return report


def raise_first_contradiction(report: ExperimentReport) -> None:
    bad = report.contradictions
    if bad:
        t = bad[0]
        raise TheoryContradiction("trial", t.seed, t.first_violation, f"trial {t.trial}: {t.contradiction}")


# -- oracle sweep --------------------------------------------------------------

@dataclass(frozen=True)
class OracleMismatch:
    w: str
    s: int
    recursion: tuple[int, int]
    oracle: tuple[int, int]


@dataclass
class OracleSuiteResult:
    strings: int = 0
    comparisons: int = 0
    mismatches: list[OracleMismatch] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.mismatches


def shifted_third_case(delta: int) -> MarginStep:
    """Margin step whose ``0 with reach > margin == 0`` case is off by ``delta``;
    used to confirm the oracle sweep catches such mistakes."""
    def step(r: int, m: int, symbol: int) -> int:
        out = margin_step(r, m, symbol)
        if symbol == 0 and r > m == 0:
            out += delta
        return out
    return step


def run_oracle_suite(max_symbols: int = 6, max_empty: int = 2, step: MarginStep = margin_step,
                     stop_after: int | None = None) -> OracleSuiteResult:
    """Compare the reach and margin recursions with exhaustive fork
    enumeration on every padded string, for every ``s <= |w|``."""
    if not 0 <= max_symbols <= 7:
        raise ConfigError("max_symbols must be between 0 and 7")
    res = OracleSuiteResult()
    for text in padded_strings(max_symbols, max_empty):
        w = TriString.parse(text)
        res.strings += 1
        oracle = brute_force_reach_margin(w, max_symbols=max_symbols)
        r = reach(w)
        for s in range(1, len(w) + 1):
            m = margin(w, s, step)
            res.comparisons += 1
            if r != oracle.reach or m != oracle.margin_at(s):
                res.mismatches.append(OracleMismatch(text, s, (r, m), (oracle.reach, oracle.margin_at(s))))
                if stop_after is not None and len(res.mismatches) >= stop_after:
                    return res
    return res


def write_mismatches(path, mismatches: Sequence[OracleMismatch]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["w", "s", "recursion_reach", "recursion_margin", "oracle_reach", "oracle_margin"])
        for m in mismatches:
            w.writerow([m.w, m.s, *m.recursion, *m.oracle])


# -- distributional checks ---------------------------------------------------

UPPER, LOWER, EQUAL = "upper", "lower", "equal"


@dataclass(frozen=True)
class StatCheck:
    check: str
    parameter: str
    kind: str
    estimate: float
    reference: float
    n: int
    se: float
    z: float
    passed: bool


def stat_check(check: str, parameter: str, kind: str, hits: int, n: int, reference: float,
               se: float | None = None) -> StatCheck:
    """One-sided (``upper``/``lower``) or two-sided (``equal``) test of a
    frequency against a reference probability.  The standard error defaults
    to the binomial one at the reference value."""
    est = hits / n
    ref = min(max(reference, 0.0), 1.0)
    if se is None:
        se = math.sqrt(ref * (1.0 - ref) / n)
    diff = est - ref
    if se == 0.0:
        z = 0.0 if diff == 0 else math.copysign(math.inf, diff)
    else:
        z = diff / se
    if kind == UPPER:
        ok = z <= SIGMAS
    elif kind == LOWER:
        ok = z >= -SIGMAS
    else:
        ok = abs(z) <= SIGMAS
    return StatCheck(check, parameter, kind, est, reference, n, se, z, ok)


@dataclass(frozen=True)
class StatsConfig:
    samples: int = 100_000
    seed: int = 1
    # Unheard checks
    unheard_f: float = 0.2
    unheard_alpha: float = 0.9
    unheard_q0: float = 0.1
    unheard_slot: int = 200
    compressed_s: int = 20
    compressed_j: int = 5
    line_k_prime: int = 5
    line_B: float = 8.0
    line_c: float = 1.0
    line_span: int = 60
    # Reach and label checks
    reach_f: float = 0.2
    reach_alpha: float = 0.84
    reach_q0: float = 0.5
    reach_slot: int = 5000
    reach_levels: int = 8
    label_max_gap: int = 10
    label_s: int = 50
    window_k: int = 100
    window_r: float = 0.5
    # random walk
    walk_eps: float = 0.3
    walk_c: float = 0.15
    walk_k: int = 200
    walk_horizon: int = 5000

    @classmethod
    def from_mapping(cls, d: Mapping | None) -> "StatsConfig":
        d = dict(d or {})
        known = {f.name: f.type for f in fields(cls)}
        unknown = set(d) - set(known)
        if unknown:
            raise ConfigError(f"unknown stats settings: {', '.join(sorted(unknown))}")
        out = {}
        for k, v in d.items():
            default = getattr(cls, k)
            out[k] = type(default)(v)
        return cls(**out)


def _unheard_checks(cfg: StatsConfig) -> list[StatCheck]:
    rc = RenewalConfig(cfg.unheard_f, cfg.unheard_alpha, geometric(cfg.unheard_q0))
    q = bnd.compute_params(rc.f, rc.alpha, rc.delay).q
    n = cfg.samples
    out = []
    u = unheard_at_slot(rc, n, cfg.unheard_slot, cfg.seed)
    for a in range(0, 11):
        out.append(stat_check("unheard_tail", f"i={cfg.unheard_slot},a={a}", UPPER,
                              int((u > a).sum()), n, bnd.unheard_tail_bound(q, a)))
    last = cfg.line_k_prime + cfg.line_span
    path = compressed_unheard_path(rc, n, cfg.compressed_s, max(last, cfg.compressed_j), cfg.seed + 1)
    cu = path[:, cfg.compressed_j - 1]
    for a in range(0, 11):
        out.append(stat_check("compressed_unheard_tail", f"s={cfg.compressed_s},j={cfg.compressed_j},a={a}",
                              UPPER, int((cu > a).sum()), n, bnd.unheard_tail_bound(q, a)))
    j = np.arange(cfg.line_k_prime, last + 1)
    line = cfg.line_B + cfg.line_c * (j - cfg.line_k_prime)
    hit = (path[:, j - 1] >= line[None, :]).any(axis=1)
    out.append(stat_check("unheard_line", f"k'={cfg.line_k_prime},B={cfg.line_B},c={cfg.line_c}", UPPER,
                          int(hit.sum()), n, bnd.unheard_line_bound(q, cfg.line_B, cfg.line_c)))
    return out


class _WindowCount:
    def __init__(self, n, s, k):
        self.s, self.k = s, k
        self.count = np.zeros(n, dtype=np.int64)

    def update(self, st):
        self.count += (st.slot > self.s) & (st.slot <= self.s + self.k)


def _renewal_checks(cfg: StatsConfig) -> list[StatCheck]:
    rc = RenewalConfig(cfg.reach_f, cfg.reach_alpha, geometric(cfg.reach_q0))
    sec = bnd.compute_params(rc.f, rc.alpha, rc.delay)
    n = cfg.samples
    reach_c = ReachAt(n, cfg.reach_slot)
    gaps = GapLabels(n, cfg.reach_slot, cfg.label_max_gap)
    labels = CompressedLabels(n, cfg.label_s, 2)
    window = _WindowCount(n, cfg.label_s, cfg.window_k)
    for st in renewal_steps(rc, n, cfg.reach_slot, cfg.seed + 2):
        reach_c.update(st)
        gaps.update(st)
        labels.update(st)
        window.update(st)
    out = []
    for a in range(1, cfg.reach_levels + 1):
        out.append(stat_check("reach_tail", f"i={cfg.reach_slot},a={a}", UPPER,
                              int((reach_c.value >= a).sum()), n, bnd.reach_tail_bound(sec.p, a)))
    totals, zeros = gaps.total, gaps.zeros
    for g in range(1, cfg.label_max_gap + 1):
        if totals[g]:
            ref = rc.alpha * rc.delay.prob_less(g)
            out.append(stat_check("label_law", f"gap={g}", LOWER, int(zeros[g]), int(totals[g]), ref,
                                  gaps.clustered_se(g, ref)))
    first, second = labels.labels[:, 0], labels.labels[:, 1]
    out.append(stat_check("compressed_label", f"s={cfg.label_s},j=1", LOWER, int((first == 0).sum()), n, sec.p))
    out.append(stat_check("compressed_label", f"s={cfg.label_s},j=2", LOWER, int((second == 0).sum()), n, sec.p))
    kp = math.ceil(cfg.window_r * cfg.window_k * rc.f)
    out.append(stat_check("time_scale", f"k={cfg.window_k},r={cfg.window_r}", UPPER,
                          int((window.count <= kp - 1).sum()), n,
                          bnd.time_scale_bound(cfg.window_k, rc.f, cfg.window_r)))
    return out


def _walk_checks(cfg: StatsConfig) -> list[StatCheck]:
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 3]))
    n = cfg.samples
    hit = walk_excursions(rng, n, cfg.walk_eps, cfg.walk_c, cfg.walk_k, cfg.walk_horizon)
    out = [stat_check("random_walk", f"eps={cfg.walk_eps},c={cfg.walk_c},k={cfg.walk_k}", UPPER,
                      int(hit.sum()), n, bnd.random_walk_bound(cfg.walk_k, cfg.walk_eps, cfg.walk_c))]
    down = walk_excursions(rng, min(n, 1000), 1.0, 0.5, 10, 200)
    out.append(stat_check("random_walk", "eps=1,c=0.5,k=10", UPPER, int(down.sum()), len(down),
                          bnd.random_walk_bound(10, 1.0, 0.5)))
    return out


@dataclass
class StatsReport:
    checks: list[StatCheck]
    runtime: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def write(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([f.name for f in fields(StatCheck)])
            for c in self.checks:
                w.writerow([_fmt(getattr(c, f.name)) for f in fields(StatCheck)])


STAT_GROUPS: dict[str, Callable[[StatsConfig], list[StatCheck]]] = {
    "unheard": _unheard_checks,
    "renewal": _renewal_checks,
    "walk": _walk_checks,
}


def statistical_suite(cfg: StatsConfig | None = None, groups: Sequence[str] | None = None) -> StatsReport:
    cfg = cfg or StatsConfig()
    t0 = time.perf_counter()
    out = []
    for name in groups or STAT_GROUPS:
        if name not in STAT_GROUPS:
            raise ConfigError(f"unknown check group {name!r}")
        out.extend(STAT_GROUPS[name](cfg))
    return StatsReport(out, time.perf_counter() - t0)


# -- bounds and figure data -------------------------------------------------

def bounds_table(f: float, alpha: float, delay: DelayDistribution, k: int, parties: int, mu: float | None,
                 horizon: int) -> list[tuple[str, float, float]]:
    sec = bnd.compute_params(f, alpha, delay)
    rows = [("p", sec.p, sec.p), ("eps", sec.eps, sec.eps), ("q", sec.q, sec.q)]
    if not sec.applicable:
        return rows + [("bounds", math.nan, math.nan)]
    mu = sec.eps / 2.0 if mu is None else mu
    rep = bnd.corollary_bounds(sec, horizon, k, parties, mu)
    return rows + list(rep.rows())


def write_rows(path, header: Sequence[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(float(x)) if isinstance(x, (float, np.floating)) else x for x in r])


def default_workers() -> int:
    return max(1, os.cpu_count() or 1)
