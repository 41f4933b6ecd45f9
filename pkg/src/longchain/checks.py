"""Property checks on execution traces.

Settlement, common prefix and chain quality are evaluated slot by slot up
to the trace horizon.  The necessary-condition checks turn every violation
into a claim about the characteristic string and the unheard counts; a
failed claim raises :class:`TheoryContradiction`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .charstring import HONEST, ADVERSARIAL
from .errors import ConfigError, TheoryContradiction
from .fork_calculus import margin_series, reach_series, validate_fork
from .leader_election import ADVERSARY
from .protocol_sim import ExecutionTrace
from .unheard import ACTUAL, SCHEDULED, NEG_INF

HONEST_MODE = "honest"
SPECIAL_MODE = "special"


@dataclass(frozen=True)
class PropertyCheck:
    holds: bool
    first_violation: int | None = None
    violations: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    def __bool__(self):
        return self.holds


@dataclass(frozen=True)
class NecessaryCheck:
    checked: int
    min_slack: float | None

    @property
    def vacuous(self) -> bool:
        return self.checked == 0


def _parties(trace: ExecutionTrace, parties) -> tuple[int, ...]:
    parties = trace.observed if parties is None else tuple(parties)
    if not parties:
        raise ConfigError("empty party set")
    unknown = set(parties) - set(trace.history)
    if unknown:
        raise ConfigError(f"parties {sorted(unknown)} are not tracked in this trace")
    return parties


def _need_horizon(trace: ExecutionTrace, last: int):
    if trace.horizon < last:
        raise ConfigError(f"horizon {trace.horizon} is shorter than s + k = {last}")


def _result(bad: np.ndarray, offset: int) -> PropertyCheck:
    slots = np.flatnonzero(bad) + offset
    if len(slots) == 0:
        return PropertyCheck(True)
    return PropertyCheck(False, int(slots[0]), slots)


def settlement_violations(trace: ExecutionTrace, s: int, k: int, parties=None) -> np.ndarray:
    """Boolean array over slots ``s+k..horizon``: parties disagree on the
    prefix up to ``s`` at slot ``i``, or some party's prefix changes between
    ``i`` and ``i+1``.  The second test is skipped at the horizon."""
    parties = _parties(trace, parties)
    lo = s + k
    _need_horizon(trace, lo)
    cut = trace.cut_table(s)[trace.tip_matrix(parties)]
    win = cut[:, lo:]
    bad = (win != win[0]).any(axis=0)
    bad[:-1] |= (win[:, :-1] != win[:, 1:]).any(axis=0)
    return bad


def check_settlement(trace: ExecutionTrace, s: int, k: int, parties=None) -> PropertyCheck:
    return _result(settlement_violations(trace, s, k, parties), s + k)


def check_common_prefix(trace: ExecutionTrace, T: int, k: int, parties=None) -> PropertyCheck:
    """Settlement for every ``s <= T``; ``first_violation`` is the smallest
    offending ``s``."""
    bad = [s for s in range(1, T + 1) if s + k <= trace.horizon and not check_settlement(trace, s, k, parties)]
    if not bad:
        return PropertyCheck(True)
    return PropertyCheck(False, bad[0], np.array(bad, dtype=np.int64))


def _qualifying(trace: ExecutionTrace, mode: str) -> np.ndarray:
    honest = trace.proposer != ADVERSARY
    honest[0] = False
    if mode == HONEST_MODE:
        return honest
    if mode != SPECIAL_MODE:
        raise ConfigError(f"unknown chain quality mode {mode!r}")
    out = np.zeros(len(trace.parent), dtype=bool)
    for b in trace.special_block.values():
        out[b] = True
    return out


def window_counts(trace: ExecutionTrace, s: int, k: int, mode: str = HONEST_MODE) -> np.ndarray:
    """Per block, qualifying blocks on its chain with timestamp in ``s+1..s+k``."""
    ts = trace.timestamp
    q = _qualifying(trace, mode) & (ts >= s + 1) & (ts <= s + k)
    par = trace.parent
    cnt = np.zeros(len(par), dtype=np.int64)
    ql = q.tolist()
    pl = par.tolist()
    for b in range(1, len(pl)):
        cnt[b] = cnt[pl[b]] + ql[b]
    return cnt


def chain_quality_violations(trace: ExecutionTrace, mu: float, s: int, k: int, parties=None,
                             mode: str = HONEST_MODE) -> np.ndarray:
    parties = _parties(trace, parties)
    lo = s + k
    _need_horizon(trace, lo)
    need = k * trace.f * mu
    counts = window_counts(trace, s, k, mode)[trace.tip_matrix(parties)[:, lo:]]
    return (counts <= need).any(axis=0)


def check_chain_quality(trace: ExecutionTrace, mu: float, s: int, k: int, parties=None,
                        mode: str = HONEST_MODE) -> PropertyCheck:
    return _result(chain_quality_violations(trace, mu, s, k, parties, mode), s + k)


# -- necessary conditions ---------------------------------------------------

def settlement_slack(trace: ExecutionTrace, s: int, parties=None, mode: str = SCHEDULED) -> np.ndarray:
    """``Margin_s(w[1:i]) + Unheard[i]`` for ``i = 0..horizon``."""
    parties = _parties(trace, parties)
    return margin_series(trace.char, s) + trace.unheard_set(parties, mode).unheard


def advantage_series(trace: ExecutionTrace, s: int, k: int, mu: float) -> np.ndarray:
    """``N_1(w[s+1:i]) - N_0(w[s+1:i]) + k f mu + Reach(w[1:s])`` for ``i = 0..horizon``."""
    codes = trace.char.codes
    step = np.where(codes == ADVERSARIAL, 1, np.where(codes == HONEST, -1, 0))
    walk = np.concatenate(([0], np.cumsum(step)))
    reach_s = reach_series(trace.char)[min(s, trace.horizon)]
    base = walk[min(s, trace.horizon)]
    return (walk - base) + k * trace.f * mu + reach_s


def cq_slack(trace: ExecutionTrace, s: int, k: int, mu: float, parties=None, mode: str = SCHEDULED) -> np.ndarray:
    parties = _parties(trace, parties)
    return advantage_series(trace, s, k, mu) + trace.unheard_set(parties, mode).unheard


def assert_settlement_necessary(trace: ExecutionTrace, s: int, k: int, parties=None) -> NecessaryCheck:
    """Every settlement-violating slot ``i`` must have a non-negative
    ``Margin_s(w[1:i]) + Unheard[i]``."""
    bad = settlement_violations(trace, s, k, parties)
    slots = np.flatnonzero(bad) + s + k
    if len(slots) == 0:
        return NecessaryCheck(0, None)
    slack = settlement_slack(trace, s, parties)[slots]
    fails = np.flatnonzero(slack < 0)
    if len(fails):
        i = int(slots[fails[0]])
        raise TheoryContradiction("settlement_necessary", trace.seed, i,
                                  f"margin + unheard = {int(slack[fails[0]])} with s={s}, k={k}")
    return NecessaryCheck(len(slots), float(slack.min()))


def assert_cq_necessary(trace: ExecutionTrace, mu: float, s: int, k: int, parties=None) -> NecessaryCheck:
    """For every special-mode chain quality violation at slot ``i``, some
    ``i'`` in ``s+k..i`` must have a non-negative ``Advantage_s + Unheard``."""
    bad = chain_quality_violations(trace, mu, s, k, parties, SPECIAL_MODE)
    slots = np.flatnonzero(bad) + s + k
    if len(slots) == 0:
        return NecessaryCheck(0, None)
    slack = cq_slack(trace, s, k, mu, parties)
    best = np.maximum.accumulate(slack[s + k:])
    witnessed = best[slots - s - k]
    fails = np.flatnonzero(witnessed < 0)
    if len(fails):
        i = int(slots[fails[0]])
        raise TheoryContradiction("cq_necessary", trace.seed, i,
                                  f"advantage + unheard stays below 0 (max {witnessed[fails[0]]:.3f}) "
                                  f"with s={s}, k={k}, mu={mu}")
    return NecessaryCheck(len(slots), float(witnessed.min()))


# -- trace invariants ---------------------------------------------------------

@dataclass
class InvariantReport:
    failures: list[str] = field(default_factory=list)
    snapshots: int = 0

    @property
    def ok(self) -> bool:
        return not self.failures


def snapshot_slots(trace: ExecutionTrace, count: int = 20, rng: np.random.Generator | None = None) -> list[int]:
    """Evenly spaced slots plus the horizon, optionally jittered."""
    n = trace.horizon
    grid = np.linspace(1, n, num=min(count, n), dtype=np.int64)
    if rng is not None:
        grid = np.clip(grid + rng.integers(-2, 3, size=len(grid)), 1, n)
    return sorted(set(grid.tolist()) | {n})


def check_fork_validity(trace: ExecutionTrace, slots: Sequence[int]) -> list[str]:
    out = []
    for i in slots:
        res = validate_fork(trace.fork_at(i), trace.char.prefix(i))
        if not res:
            out.append(f"slot {i}: {res.violated} ({res.detail})")
    return out


def check_chain_monotone(trace: ExecutionTrace) -> list[str]:
    out = []
    for h, (slots, tips) in trace.history.items():
        d = trace.depth[tips]
        if (np.diff(d) <= 0).any():
            out.append(f"party {h} switched to a chain that is not longer")
    return out


def check_special_growth(trace: ExecutionTrace) -> list[str]:
    slots, depths = trace.special_depths()
    if (np.diff(depths) <= 0).any():
        return ["special blocks do not have strictly increasing lengths"]
    return []


def special_depth_table(trace: ExecutionTrace) -> np.ndarray:
    """Index ``i``: length of the chain ending at the last special block with slot ``<= i``."""
    out = np.zeros(trace.horizon + 1, dtype=np.int64)
    slots, depths = trace.special_depths()
    out[slots] = depths
    return np.maximum.accumulate(out)


def check_prefix_bound(trace: ExecutionTrace, s_values: Sequence[int], parties=None) -> list[str]:
    """``|C^h_i[1:s]| <= |C*_s| + Reach[s]`` for every party and slot ``i >= s``."""
    parties = _parties(trace, parties)
    special = special_depth_table(trace)
    reach = reach_series(trace.char)
    tips = trace.tip_matrix(parties)
    out = []
    for s in s_values:
        cut = trace.cut_table(s)
        lengths = trace.depth[cut[tips[:, s:]]]
        limit = special[s] + reach[s]
        if (lengths > limit).any():
            out.append(f"s={s}: a prefix has length {int(lengths.max())} above {int(limit)}")
    return out


def check_viability(trace: ExecutionTrace, parties=None) -> list[str]:
    """Each party's chain is at least as long as every special block it has heard of."""
    parties = _parties(trace, parties)
    special = special_depth_table(trace)
    tips = trace.tip_matrix(parties)
    out = []
    for r, h in enumerate(parties):
        lh = trace.unheard(h, ACTUAL).latest_heard
        need = np.where(lh == NEG_INF, 0, special[np.maximum(lh, 0).astype(np.int64)])
        if (trace.depth[tips[r]] < need).any():
            out.append(f"party {h} holds a chain shorter than a special block it heard")
    return out


def check_delivery_legality(trace: ExecutionTrace) -> list[str]:
    bad = [r for r in trace.log.records if r.actual > r.scheduled or r.actual < r.sender_slot]
    return [f"{len(bad)} messages delivered outside their window"] if bad else []


def check_special_heard(trace: ExecutionTrace) -> list[str]:
    """The leader of each special slot had the previous special block in time."""
    out = []
    for sp in trace.charstring.specials:
        if sp.previous < 1 or sp.previous_leader == sp.leader:
            continue
        if trace.log.heard_at(sp.previous, sp.leader, ACTUAL) > sp.slot - 1:
            out.append(f"special slot {sp.slot} leader had not heard slot {sp.previous}")
    return out


def check_invariants(trace: ExecutionTrace, snapshot_count: int = 20, prefix_samples: int = 5,
                     rng: np.random.Generator | None = None) -> InvariantReport:
    rep = InvariantReport()
    slots = snapshot_slots(trace, snapshot_count, rng)
    rep.snapshots = len(slots)
    rep.failures += check_fork_validity(trace, slots)
    rep.failures += check_chain_monotone(trace)
    rep.failures += check_special_growth(trace)
    s_values = snapshot_slots(trace, prefix_samples, rng)
    rep.failures += check_prefix_bound(trace, s_values)
    rep.failures += check_viability(trace)
    rep.failures += check_delivery_legality(trace)
    rep.failures += check_special_heard(trace)
    return rep
