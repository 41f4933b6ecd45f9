"""Adversary strategies for the execution engine."""

from __future__ import annotations

import bisect

from .errors import ConfigError
from .protocol_sim import ALL, GENESIS, AdversaryPolicy, AdversaryView


class NullAdversary(AdversaryPolicy):
    """Never mints, sends or accelerates; ties go to the first received chain."""

    name = "null"
    reacts_to_deliveries = False


class PrivateChain(AdversaryPolicy):
    """Withhold a chain that forks off before slot ``s`` and publish it to
    every party once it is longer than any honest chain, no earlier than
    slot ``s + k + 1``."""

    name = "private_chain"
    reacts_to_deliveries = False

    def __init__(self, s: int, k: int):
        if s < 1 or k < 0:
            raise ConfigError("private_chain needs s >= 1 and k >= 0")
        self.s = s
        self.k = k
        self.tip = None
        self.released = False

    def start(self, view: AdversaryView) -> None:
        view.wake_at(self.s)
        view.wake_at(self.s + self.k + 1)

    def _fork_point(self, view: AdversaryView) -> int:
        best = max(view.parties, key=lambda h: view.depth(view.tip(h)))
        tip = view.tip(best)
        for b in view.new_blocks:
            if view.depth(b) > view.depth(tip):
                tip = b
        cut = view.cut(tip, self.s)
        return GENESIS if cut == GENESIS else view.parent(cut)

    def act(self, view: AdversaryView) -> None:
        if self.released or view.slot < self.s:
            return
        if self.tip is None:
            self.tip = self._fork_point(view)
            base_ts = view.timestamp(self.tip)
            for t in view.adversary_slots:
                if t > base_ts:
                    self.tip = view.mint(self.tip, t)
        elif view.elected:
            self.tip = view.mint(self.tip, view.slot)
        if view.slot > self.s + self.k and view.depth(self.tip) > view.max_honest_depth:
            view.send(self.tip, ALL)
            self.released = True


def _common_depth(view: AdversaryView, a: int, b: int) -> int:
    while view.depth(a) > view.depth(b):
        a = view.parent(a)
    while view.depth(b) > view.depth(a):
        b = view.parent(b)
    while a != b:
        a, b = view.parent(a), view.parent(b)
    return view.depth(a)


class MaxDelayBalance(AdversaryPolicy):
    """Keep the parties split into two halves holding different chains.

    Elected slots are banked.  When both halves hold the same chain, one
    banked slot extends it for the second half only.  When an honest chain
    is about to reach a half and would displace its chain, banked slots
    extend that half's chain to the same length and the tie-break keeps it.
    Deliveries are never accelerated.
    """

    name = "max_delay_balance"

    def __init__(self):
        self.bank: list[int] = []
        self.sides = None

    def start(self, view: AdversaryView) -> None:
        parties = list(view.observed) or list(view.parties)
        rest = [h for h in view.parties if h not in parties]
        mid = (len(parties) + 1) // 2
        x, y = parties[:mid] + rest, parties[mid:]
        self.sides = ((x, frozenset(x)), (y, frozenset(y))) if x and y else None

    def _take(self, after: int, count: int):
        """The ``count`` smallest banked slots above ``after``, or None."""
        i = bisect.bisect_right(self.bank, after)
        if len(self.bank) - i < count:
            return None
        used = self.bank[i:i + count]
        del self.bank[i:i + count]
        return used

    def _extend(self, view, tip, count, side):
        slots = self._take(view.timestamp(tip), count)
        if slots is None:
            return False
        for t in slots:
            tip = view.mint(tip, t)
        view.send(tip, side)
        return True

    def act(self, view: AdversaryView) -> None:
        if view.elected:
            self.bank.append(view.slot)
        if self.sides is None or not self.bank:
            return
        tips, depth = view.tips, view.depths
        deepest = []
        for side, _ in self.sides:
            best = tips[side[0]]
            for h in side[1:]:
                if depth[tips[h]] > depth[best]:
                    best = tips[h]
            deepest.append(best)
        acted = False
        incoming = view.deliveries_now()
        if incoming:
            for (side, members), tip in zip(self.sides, deepest):
                d = depth[tip]
                threat = max((depth[b] for r, b in incoming
                              if r in members and depth[b] > d and not view.is_ancestor(tip, b)), default=-1)
                if threat > d:
                    acted |= self._extend(view, tip, threat - d, side)
        if acted:
            return
        tx, ty = deepest
        if view.is_ancestor(tx, ty) or view.is_ancestor(ty, tx):
            base = ty if depth[ty] >= depth[tx] else tx
            self._extend(view, base, 1, self.sides[1][0])

    def tie_break(self, party: int, candidates: list[int], view: AdversaryView) -> int:
        own = view.tip(party)
        return max(candidates, key=lambda b: _common_depth(view, own, b))


POLICIES = ("null", "private_chain", "max_delay_balance")


def make_policy(name: str, s: int = 1, k: int = 0) -> AdversaryPolicy:
    if name == "null":
        return NullAdversary()
    if name == "private_chain":
        return PrivateChain(s, k)
    if name == "max_delay_balance":
        return MaxDelayBalance()
    raise ConfigError(f"unknown adversary policy {name!r}")
