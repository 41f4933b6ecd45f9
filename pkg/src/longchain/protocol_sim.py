"""Slot-by-slot longest-chain execution with random message delays.

Each slot runs five phases: leader election, honest send, adversarial send,
deliver, adopt.  Honest leaders extend the chain they hold and broadcast it;
every point-to-point message gets its own delay.  The adversary sees the
current slot's messages and their delays, mints blocks for slots it led,
sends them to whomever it likes, may deliver honest messages early and
breaks ties in the adopt phase.  Honest parties switch only to a strictly
longer chain.

Slots where nothing can happen are skipped; state is unchanged across them.
"""

from __future__ import annotations

import bisect
import heapq
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .charstring import (HONEST, CharStringResult, TriString, VIRTUAL_SENDER, mark_special,
                         negative_time_extension)
from .delay_model import NEVER, DelayDistribution, KeyedStream, check_model_compatibility, residuals_array
from .errors import ConfigError, PolicyViolation
from .fork_calculus import Fork
from .leader_election import ADVERSARY, ElectionRecord, LeaderConfig, draw_slots, params
from .streams import stream_key, stream_key_array
from .unheard import ACTUAL, SCHEDULED, DeliveryLog, DeliveryRecord, UnheardSeries, series_from_heard_times, set_series

GENESIS = 0
ALL = "all"


@dataclass(frozen=True)
class SimConfig:
    leader: LeaderConfig
    delay: DelayDistribution
    # parties whose chains the properties are checked on; default: every tracked party
    observed: tuple[int, ...] | None = None
    negative_cutoff: int = 10_000

    def __post_init__(self):
        check_model_compatibility(self.delay, self.leader.model)
        tracked = set(self.leader.tracked_parties())
        if self.observed is not None:
            if not self.observed:
                raise ConfigError("the observed party set is empty")
            if not set(self.observed) <= tracked:
                raise ConfigError("observed parties must be tracked honest parties")
        elif not tracked:
            raise ConfigError("no honest party is tracked; add observers to the one-time model")

    @property
    def observed_parties(self) -> tuple[int, ...]:
        if self.observed is not None:
            return tuple(self.observed)
        return tuple(self.leader.tracked_parties())


def message_key(seed: int, sender_slot: int, sender: int, recipient: int) -> int:
    return stream_key(seed, sender_slot, sender, recipient)


def trial_rng(seed: int, purpose: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed & ((1 << 64) - 1), purpose]))


RNG_LEADERS = 1
RNG_NEGATIVE = 2


@dataclass
class MessageTable:
    """One row per point-to-point honest message, plus each leader's
    pretend message to itself.  Times are slots; ``inf`` means never."""

    sender_slot: np.ndarray
    sender: np.ndarray
    recipient: np.ndarray
    scheduled: np.ndarray
    actual: np.ndarray

    def __len__(self):
        return len(self.sender_slot)

    def to_log(self) -> DeliveryLog:
        log = DeliveryLog()
        for row in zip(self.sender_slot.tolist(), self.sender.tolist(), self.recipient.tolist(),
                       self.scheduled.tolist(), self.actual.tolist()):
            log.add(DeliveryRecord(*row))
        return log

    def heard_times(self, party: int, slots: np.ndarray, mode: str = SCHEDULED) -> np.ndarray:
        """When ``party`` got the (first) broadcast of each of ``slots``."""
        rows = np.flatnonzero(self.recipient == party)
        sent = self.sender_slot[rows]
        order = np.argsort(sent, kind="stable")
        rows, sent = rows[order], sent[order]
        pos = np.searchsorted(sent, slots)
        found = pos < len(sent)
        found[found] = sent[pos[found]] == slots[found]
        if not found.all():
            raise KeyError(f"no message to party {party} for slot {int(slots[~found][0])}")
        times = self.scheduled if mode == SCHEDULED else self.actual
        return times[rows[pos]]


@dataclass
class ExecutionTrace:
    seed: int
    horizon: int
    config: SimConfig
    policy_name: str
    record: ElectionRecord
    charstring: CharStringResult
    parent: np.ndarray
    timestamp: np.ndarray
    depth: np.ndarray
    proposer: np.ndarray
    created: np.ndarray
    # per tracked party: slots where its chain changed and the new tip
    history: dict[int, tuple[np.ndarray, np.ndarray]]
    messages: MessageTable
    special_block: dict[int, int]
    adversary_sends: list[tuple[int, int, object]] = field(default_factory=list)

    _log: DeliveryLog | None = field(default=None, repr=False)

    @property
    def log(self) -> DeliveryLog:
        if self._log is None:
            self._log = self.messages.to_log()
        return self._log

    @property
    def char(self) -> TriString:
        return self.charstring.char

    @property
    def f(self) -> float:
        return params(self.config.leader)[0]

    @property
    def observed(self) -> tuple[int, ...]:
        return self.config.observed_parties

    def tip(self, party: int, slot: int) -> int:
        slots, tips = self.history[party]
        k = int(np.searchsorted(slots, slot, side="right")) - 1
        return int(tips[k])

    def tip_matrix(self, parties: Sequence[int]) -> np.ndarray:
        """``out[r, i]`` is the tip held by ``parties[r]`` at the end of slot ``i``."""
        out = np.empty((len(parties), self.horizon + 1), dtype=np.int64)
        for r, h in enumerate(parties):
            slots, tips = self.history[h]
            lengths = np.diff(np.append(slots, self.horizon + 1))
            out[r] = np.repeat(tips, lengths)
        return out

    def chain(self, block: int) -> list[int]:
        out = []
        while block >= 0:
            out.append(block)
            block = int(self.parent[block])
        return out[::-1]

    def cut_table(self, s: int) -> np.ndarray:
        """For every block, its last ancestor (itself included) with timestamp <= s."""
        n = len(self.parent)
        cut = np.empty(n, dtype=np.int64)
        ts, par = self.timestamp, self.parent
        for b in range(n):
            cut[b] = b if ts[b] <= s else cut[par[b]]
        return cut

    def fork_at(self, slot: int) -> Fork:
        """Blocktree as it stood at the end of ``slot``."""
        m = int(np.searchsorted(self.created, slot, side="right"))
        return Fork(self.parent[:m].tolist(), self.timestamp[:m].tolist())

    def special_depths(self) -> tuple[np.ndarray, np.ndarray]:
        slots = np.array(sorted(self.special_block), dtype=np.int64)
        depths = np.array([self.depth[self.special_block[s]] for s in slots.tolist()], dtype=np.int64)
        return slots, depths

    def unheard(self, party: int, mode: str = SCHEDULED) -> UnheardSeries:
        char = self.char
        specials = char.slots_of(HONEST)
        heard = self.messages.heard_times(party, specials, mode)
        return series_from_heard_times(char, specials, heard)

    def unheard_set(self, parties: Iterable[int] | None = None, mode: str = SCHEDULED) -> UnheardSeries:
        parties = self.observed if parties is None else parties
        return set_series([self.unheard(h, mode) for h in parties])

    def export_lines(self) -> list[str]:
        """Line-oriented, deterministic record of the execution."""
        lines = [f"#\tseed={self.seed}\thorizon={self.horizon}\tpolicy={self.policy_name}"]
        events = []
        for slot, ids in self.record.honest_ids.items():
            events.append((slot, 0, f"{slot}\tleaders\thonest={','.join(map(str, ids))}"
                                    f"\tadversary={int(self.record.adversarial[slot])}"))
        for slot in np.flatnonzero(self.record.adversarial).tolist():
            if slot not in self.record.honest_ids:
                events.append((slot, 0, f"{slot}\tleaders\thonest=\tadversary=1"))
        for b in range(1, len(self.parent)):
            who = "A" if self.proposer[b] == ADVERSARY else str(int(self.proposer[b]))
            events.append((int(self.created[b]), 1,
                           f"{int(self.created[b])}\tblock\tid={b}\tparent={int(self.parent[b])}"
                           f"\tts={int(self.timestamp[b])}\tby={who}"))
        for slot, block, to in self.adversary_sends:
            dest = to if to == ALL else ",".join(map(str, to))
            events.append((slot, 2, f"{slot}\tsend\tblock={block}\tto={dest}"))
        for rec in self.log.records:
            if rec.sender == rec.recipient:
                continue
            sched = "never" if rec.scheduled == float("inf") else int(rec.scheduled)
            actual = "never" if rec.actual == float("inf") else int(rec.actual)
            events.append((rec.sender_slot, 3, f"{rec.sender_slot}\tmessage\tfrom={rec.sender}"
                                               f"\tto={rec.recipient}\tscheduled={sched}\tactual={actual}"))
        for h in sorted(self.history):
            slots, tips = self.history[h]
            for s, t in zip(slots.tolist()[1:], tips.tolist()[1:]):
                events.append((s, 4, f"{s}\tadopt\tparty={h}\ttip={t}\tlength={int(self.depth[t])}"))
        events.sort(key=lambda e: (e[0], e[1]))
        lines.extend(e[2] for e in events)
        lines.append(f"charstring\t{self.char}")
        return lines


class AdversaryView:
    """What the adversary may see and do during a slot.

    It exposes the full past, the current slot's election and messages with
    their delays, but not future elections or delays.
    """

    def __init__(self, engine: "Engine"):
        self._e = engine
        self.slot = 0
        self.elected = False
        self.new_blocks: list[int] = []
        self.new_messages: list[int] = []
        self._sends: list[tuple[int, object]] = []
        self._accelerated: list[int] = []

    # -- reading ---------------------------------------------------------
    @property
    def parties(self) -> tuple[int, ...]:
        return self._e.tracked

    @property
    def observed(self) -> tuple[int, ...]:
        return self._e.cfg.observed_parties

    @property
    def adversary_slots(self) -> list[int]:
        """Slots up to now where the adversary was elected."""
        return self._e.adv_slots_so_far

    @property
    def tips(self) -> dict[int, int]:
        """Current tip per party; read only."""
        return self._e.tips

    @property
    def depths(self) -> list[int]:
        """Chain length per block id; read only."""
        return self._e.depth

    def tip(self, party: int) -> int:
        return self._e.tips[party]

    def depth(self, block: int) -> int:
        return self._e.depth[block]

    def timestamp(self, block: int) -> int:
        return self._e.ts[block]

    def parent(self, block: int) -> int:
        return self._e.parent[block]

    def proposer(self, block: int) -> int:
        return self._e.proposer[block]

    def is_ancestor(self, a: int, b: int) -> bool:
        par, depth = self._e.parent, self._e.depth
        while depth[b] > depth[a]:
            b = par[b]
        return a == b

    def cut(self, block: int, s: int) -> int:
        """Last block on ``block``'s chain with timestamp at most ``s``."""
        ts, par = self._e.ts, self._e.parent
        while ts[block] > s:
            block = par[block]
        return block

    @property
    def max_honest_depth(self) -> int:
        return self._e.max_honest_depth

    def message(self, msg: int) -> tuple[int, int, int]:
        """``(recipient, block, scheduled_slot)`` of an honest message sent so far."""
        e = self._e
        return e.msg_recipient[msg], e.block_of[e.msg_bcast[msg]], e.msg_sched[msg]

    def deliveries_now(self) -> list[tuple[int, int]]:
        """``(recipient, block)`` for honest messages due in the current slot."""
        e = self._e
        return [(e.msg_recipient[m], e.block_of[e.msg_bcast[m]])
                for m in e.deliveries_at.get(self.slot, ()) if m not in e.early]

    def pending(self) -> list[int]:
        """Honest messages already sent but not yet delivered."""
        e = self._e
        return [m for m in range(len(e.msg_recipient))
                if e.block_of[e.msg_bcast[m]] is not None and m not in e.early and e.msg_sched[m] > self.slot]

    # -- acting ----------------------------------------------------------
    def mint(self, parent: int, timestamp: int) -> int:
        e = self._e
        if not 0 <= parent < len(e.parent):
            raise PolicyViolation(self.slot, f"unknown parent block {parent}")
        if timestamp > self.slot or not e.record.adversarial[timestamp] or timestamp < 1:
            raise PolicyViolation(self.slot, f"adversary was not elected in slot {timestamp}")
        if timestamp <= e.ts[parent]:
            raise PolicyViolation(self.slot, "timestamps must increase along a chain")
        return e.new_block(parent, timestamp, ADVERSARY, self.slot)

    def send(self, block: int, recipients=ALL) -> None:
        e = self._e
        if not 0 <= block < len(e.parent):
            raise PolicyViolation(self.slot, f"unknown block {block}")
        if recipients != ALL:
            recipients = tuple(recipients)
            for r in recipients:
                if r not in e.tracked_set:
                    raise PolicyViolation(self.slot, f"party {r} is not an honest party")
        self._sends.append((block, recipients))

    def accelerate(self, msg: int) -> None:
        e = self._e
        if not 0 <= msg < len(e.msg_recipient) or e.block_of[e.msg_bcast[msg]] is None:
            raise PolicyViolation(self.slot, f"message {msg} has not been sent")
        if msg in e.early or e.msg_sched[msg] < self.slot:
            raise PolicyViolation(self.slot, f"message {msg} was already delivered")
        self._accelerated.append(msg)

    def wake_at(self, slot: int) -> None:
        """Ask to be consulted at ``slot`` even if nothing else happens then."""
        if slot > self.slot:
            heapq.heappush(self._e.wakeups, slot)

    def _reset(self, slot: int, elected: bool):
        self.slot = slot
        self.elected = elected
        self.new_blocks = []
        self.new_messages = []
        self._sends = []
        self._accelerated = []


class AdversaryPolicy:
    name = "null"
    # False lets the engine skip consulting the policy in slots that only
    # carry scheduled deliveries
    reacts_to_deliveries = True

    def start(self, view: AdversaryView) -> None:
        pass

    def act(self, view: AdversaryView) -> None:
        pass

    def tie_break(self, party: int, candidates: list[int], view: AdversaryView) -> int:
        return candidates[0]


class Engine:
    def __init__(self, cfg: SimConfig, policy: AdversaryPolicy, horizon: int, seed: int):
        if horizon < 1:
            raise ConfigError("horizon must be at least 1")
        self.cfg = cfg
        self.policy = policy
        self.horizon = horizon
        self.seed = seed
        lc = cfg.leader
        self.model = lc.model
        self.tracked = tuple(lc.tracked_parties())
        self.tracked_set = frozenset(self.tracked)
        self.record = draw_slots(lc, horizon, trial_rng(seed, RNG_LEADERS))
        f, alpha = params(lc)
        self.extension = negative_time_extension(trial_rng(seed, RNG_NEGATIVE), f, alpha, cfg.delay,
                                                 cfg.negative_cutoff)
        rates = cfg.delay.failure_rate()
        self.rates = rates

        def streams(sender_slot, sender, recipient):
            return KeyedStream(message_key(seed, sender_slot, sender, recipient))

        def batch(sender_slots, senders, recipients, offsets):
            d = residuals_array(rates, stream_key_array(seed, sender_slots, senders, recipients), offsets)
            return np.where(d >= NEVER, np.inf, d.astype(np.float64))

        self.charstring = mark_special(self.model, self.record, cfg.delay, streams, self.extension, batch)
        self.special_slots = {s.slot: s for s in self.charstring.specials}

        # blocktree
        self.parent = [-1]
        self.ts = [0]
        self.depth = [0]
        self.proposer = [ADVERSARY]
        self.created = [0]
        self.max_honest_depth = 0

        self.tips = {h: GENESIS for h in self.tracked}
        self.history = {h: ([0], [GENESIS]) for h in self.tracked}

        # honest broadcasts and their point-to-point messages, fixed up front
        bc_slot, bc_sender = [], []
        for slot, ids in self.record.honest_ids.items():
            for h in ids:
                bc_slot.append(slot)
                bc_sender.append(h)
        self.bc_slot = bc_slot
        self.bc_sender = bc_sender
        self.block_of: list[int | None] = [None] * len(bc_slot)
        self.bc_at: dict[int, list[int]] = {}
        for b, slot in enumerate(bc_slot):
            self.bc_at.setdefault(slot, []).append(b)

        n_bc, n_tr = len(bc_slot), len(self.tracked)
        mb = np.repeat(np.arange(n_bc, dtype=np.int64), n_tr)
        mr = np.tile(np.array(self.tracked, dtype=np.int64), n_bc)
        bs, bh = np.array(bc_slot, dtype=np.int64), np.array(bc_sender, dtype=np.int64)
        keep = mr != bh[mb]
        mb, mr = mb[keep], mr[keep]
        delays = residuals_array(rates, stream_key_array(seed, bs[mb], bh[mb], mr), 0)
        sched = np.where(delays >= NEVER, NEVER, bs[mb] + delays)
        self.msg_bcast = mb.tolist()
        self.msg_recipient = mr.tolist()
        self.msg_sched = sched.tolist()
        # messages the adversary delivered ahead of schedule, with the slot
        self.early: dict[int, int] = {}
        self.deliveries_at: dict[int, list[int]] = {}
        due = np.flatnonzero(sched <= horizon)
        due = due[np.argsort(sched[due], kind="stable")]
        if len(due):
            cuts = np.flatnonzero(np.diff(sched[due])) + 1
            for group in np.split(due, cuts):
                self.deliveries_at[int(sched[group[0]])] = group.tolist()

        self.adv_slots = np.flatnonzero(self.record.adversarial).tolist()
        self.adv_slots_so_far: list[int] = []
        self.adv_sends: list[tuple[int, int, object]] = []
        # one-time model: adversarial broadcasts that future miners will see
        self.public_adv: list[tuple[int, int]] = []
        self.extra_log: list[DeliveryRecord] = []
        self.wakeups: list[int] = []

    # -- blocktree -----------------------------------------------------------
    def new_block(self, parent: int, ts: int, proposer: int, slot: int) -> int:
        b = len(self.parent)
        self.parent.append(parent)
        self.ts.append(ts)
        d = self.depth[parent] + 1
        self.depth.append(d)
        self.proposer.append(proposer)
        self.created.append(slot)
        if proposer != ADVERSARY and d > self.max_honest_depth:
            self.max_honest_depth = d
        return b

    def _set_tip(self, party: int, block: int, slot: int):
        self.tips[party] = block
        slots, tips = self.history[party]
        if slots[-1] == slot:
            tips[-1] = block
        else:
            slots.append(slot)
            tips.append(block)

    # -- one-time miners -----------------------------------------------------
    def _miner_chain(self, miner: int, slot: int) -> int:
        """Chain held by a fresh miner at the end of ``slot - 1``."""
        n = bisect.bisect_left(self.bc_slot, slot)
        best, best_key = GENESIS, (0, 0, 0)
        if n:
            senders = np.array(self.bc_sender[:n])
            sent = np.array(self.bc_slot[:n])
            keys = stream_key_array(self.seed, sent, senders, miner)
            arrive = sent + residuals_array(self.rates, keys, 0)
            for b in np.flatnonzero(arrive <= slot - 1).tolist():
                blk = self.block_of[b]
                key = (self.depth[blk], -int(arrive[b]), -b)
                if key > best_key:
                    best, best_key = blk, key
            special = self.special_slots.get(slot)
            if special is not None and special.previous >= 1:
                j = self.bc_at[special.previous][0]
                t = float(arrive[j])
                self.extra_log.append(DeliveryRecord(special.previous, self.bc_sender[j], miner, t, t))
        for t, blk in self.public_adv:
            if t <= slot - 1:
                key = (self.depth[blk], -t, 1)
                if key > best_key:
                    best, best_key = blk, key
        return best

    # -- main loop -------------------------------------------------------------
    def run(self) -> ExecutionTrace:
        view = AdversaryView(self)
        policy = self.policy
        policy.start(view)
        busy = set(self.record.nonempty_slots().tolist())
        static = set(busy)
        static.update(self.deliveries_at)
        passive = not policy.reacts_to_deliveries
        static = sorted(s for s in static if 1 <= s <= self.horizon)
        adv = self.record.adversarial
        nxt_adv = 0
        wake = self.wakeups
        i_static = 0
        while True:
            while wake and wake[0] <= view.slot:
                heapq.heappop(wake)
            cand = []
            if i_static < len(static):
                cand.append(static[i_static])
            if wake:
                cand.append(wake[0])
            if not cand:
                break
            slot = min(cand)
            if slot > self.horizon:
                break
            woken = bool(wake) and wake[0] == slot
            if i_static < len(static) and static[i_static] == slot:
                i_static += 1
            if passive and not woken and slot not in busy:
                self._deliver_only(slot)
                continue
            while nxt_adv < len(self.adv_slots) and self.adv_slots[nxt_adv] <= slot:
                self.adv_slots_so_far.append(self.adv_slots[nxt_adv])
                nxt_adv += 1
            view._reset(slot, bool(adv[slot]))
            self._slot(slot, view)
        return self._trace()

    def _deliver_only(self, slot: int):
        """Deliver and adopt when nothing else happens in ``slot``."""
        depth, tips, early = self.depth, self.tips, self.early
        for m in self.deliveries_at[slot]:
            if m in early:
                continue
            r = self.msg_recipient[m]
            b = self.block_of[self.msg_bcast[m]]
            if depth[b] > depth[tips[r]]:
                self._set_tip(r, b, slot)

    def _slot(self, slot: int, view: AdversaryView):
        # honest send
        for b in self.bc_at.get(slot, ()):
            h = self.bc_sender[b]
            if self.model == "iid":
                parent = self.tips[h]
            else:
                parent = self._miner_chain(h, slot)
            blk = self.new_block(parent, slot, h, slot)
            self.block_of[b] = blk
            view.new_blocks.append(blk)
            if h in self.tracked_set:
                self._set_tip(h, blk, slot)
        # adversarial send
        self.policy.act(view)
        # deliver
        inbox: dict[int, list[int]] = {}
        early = self.early
        for m in self.deliveries_at.get(slot, ()):
            if m not in early:
                inbox.setdefault(self.msg_recipient[m], []).append(self.block_of[self.msg_bcast[m]])
        for m in view._accelerated:
            if m not in early and self.msg_sched[m] > slot:
                early[m] = slot
                inbox.setdefault(self.msg_recipient[m], []).append(self.block_of[self.msg_bcast[m]])
        for blk, to in view._sends:
            self.adv_sends.append((slot, blk, to))
            targets = self.tracked if to == ALL else to
            if to == ALL and self.model == "one_time":
                self.public_adv.append((slot, blk))
            for r in targets:
                inbox.setdefault(r, []).append(blk)
        # adopt
        depth = self.depth
        for r in sorted(inbox):
            cands = inbox[r]
            best = max(depth[b] for b in cands)
            if best <= depth[self.tips[r]]:
                continue
            ties = [b for b in cands if depth[b] == best]
            choice = ties[0]
            if len(ties) > 1 and len(set(ties)) > 1:
                choice = self.policy.tie_break(r, ties, view)
                if choice not in ties:
                    raise PolicyViolation(slot, "tie-break chose a chain outside the longest candidates")
            self._set_tip(r, choice, slot)

    def _trace(self) -> ExecutionTrace:
        n_sent = sum(b is not None for b in self.block_of)
        mb = np.array(self.msg_bcast, dtype=np.int64)
        bc_slot = np.array(self.bc_slot, dtype=np.int64)
        bc_sender = np.array(self.bc_sender, dtype=np.int64)
        sent = np.array([b is not None for b in self.block_of], dtype=bool)
        keep = sent[mb] if len(mb) else np.zeros(0, dtype=bool)
        sched = np.array(self.msg_sched, dtype=np.float64)
        sched[sched >= NEVER] = np.inf
        actual = sched.copy()
        for m, t in self.early.items():
            actual[m] = t
        cols = [[bc_slot[mb][keep]], [bc_sender[mb][keep]], [np.array(self.msg_recipient, dtype=np.int64)[keep]],
                [sched[keep]], [actual[keep]]]
        # pretend messages from a leader to itself
        selfs = np.flatnonzero(np.isin(bc_sender, list(self.tracked)) & sent) if n_sent else np.zeros(0, np.int64)
        if len(selfs):
            d = residuals_array(self.rates, stream_key_array(self.seed, bc_slot[selfs], bc_sender[selfs],
                                                             bc_sender[selfs]), 0)
            t = np.where(d >= NEVER, np.inf, bc_slot[selfs] + d).astype(np.float64)
            for c, v in zip(cols, (bc_slot[selfs], bc_sender[selfs], bc_sender[selfs], t, t)):
                c.append(v)
        for rec in self.extra_log:
            for c, v in zip(cols, (rec.sender_slot, rec.sender, rec.recipient, rec.scheduled, rec.actual)):
                c.append(np.array([v]))
        table = MessageTable(*(np.concatenate(c) for c in cols))
        special_block = {}
        for slot in self.special_slots:
            special_block[slot] = self.block_of[self.bc_at[slot][0]]
        history = {h: (np.array(s, dtype=np.int64), np.array(t, dtype=np.int64))
                   for h, (s, t) in self.history.items()}
        return ExecutionTrace(
            seed=self.seed, horizon=self.horizon, config=self.cfg, policy_name=self.policy.name,
            record=self.record, charstring=self.charstring,
            parent=np.array(self.parent, dtype=np.int64), timestamp=np.array(self.ts, dtype=np.int64),
            depth=np.array(self.depth, dtype=np.int64), proposer=np.array(self.proposer, dtype=np.int64),
            created=np.array(self.created, dtype=np.int64), history=history, messages=table,
            special_block=special_block, adversary_sends=self.adv_sends,
        )


def run_execution(cfg: SimConfig, policy: AdversaryPolicy | None, horizon: int, seed: int) -> ExecutionTrace:
    return Engine(cfg, policy or AdversaryPolicy(), horizon, seed).run()
