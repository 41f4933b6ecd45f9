"""Strings over {empty, 0, 1}: LeaderString, CharString and compressed time.

A slot is ``EMPTY`` if nobody leads it, ``HONEST`` (0) if exactly one honest
party leads it and no adversary does, and ``ADVERSARIAL`` (1) otherwise.
The characteristic string keeps the same empty slots but only keeps a 0 for
"special" uniquely honest slots, whose leader is guaranteed to have heard
the previous special slot's block in time.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .delay_model import (DelayDistribution, InternalRepresentation, refreshed_residual,
                          check_model_compatibility)
from .errors import ConfigError, HorizonError
from .leader_election import ElectionRecord

HONEST = 0
ADVERSARIAL = 1
EMPTY = 2

# sender id for the virtual special slot produced by the negative-time extension
VIRTUAL_SENDER = -2

_TO_CHAR = {HONEST: "0", ADVERSARIAL: "1", EMPTY: "."}
_FROM_CHAR = {"0": HONEST, "1": ADVERSARIAL, ".": EMPTY, "⊥": EMPTY, "_": EMPTY}


class TriString:
    """Symbols for slots ``1..n``.  Slot arguments are 1-based and windows
    are inclusive on both ends, matching slot numbering."""

    __slots__ = ("codes", "_c0", "_c1")

    def __init__(self, codes):
        self.codes = np.asarray(codes, dtype=np.int8)
        if self.codes.ndim != 1 or (self.codes.size and (self.codes.min() < 0 or self.codes.max() > 2)):
            raise ValueError("symbols must be 0, 1 or EMPTY")
        self._c0 = None
        self._c1 = None

    @classmethod
    def parse(cls, text: str) -> "TriString":
        try:
            return cls([_FROM_CHAR[c] for c in text])
        except KeyError as exc:
            raise ValueError(f"unknown symbol {exc}") from None

    @classmethod
    def coerce(cls, w) -> "TriString":
        if isinstance(w, TriString):
            return w
        if isinstance(w, str):
            return cls.parse(w)
        return cls(w)

    def __str__(self) -> str:
        return "".join(_TO_CHAR[int(c)] for c in self.codes)

    def __repr__(self) -> str:
        return f"TriString({str(self)!r})"

    def __len__(self) -> int:
        return int(self.codes.size)

    def __eq__(self, other) -> bool:
        return isinstance(other, TriString) and np.array_equal(self.codes, other.codes)

    def __hash__(self):
        return hash(self.codes.tobytes())

    def __getitem__(self, slot: int) -> int:
        # 1-based like slot numbers
        return self.symbol(slot)

    def symbol(self, slot: int) -> int:
        if not 1 <= slot <= len(self):
            raise HorizonError(f"slot {slot} outside 1..{len(self)}")
        return int(self.codes[slot - 1])

    def prefix(self, i: int) -> "TriString":
        """``w[1:i]``."""
        return TriString(self.codes[:max(0, i)])

    def window(self, lo: int, hi: int) -> "TriString":
        """``w[lo:hi]`` inclusive; empty when ``hi < lo``."""
        lo = max(lo, 1)
        return TriString(self.codes[lo - 1:max(lo - 1, hi)])

    def _counts(self):
        if self._c0 is None:
            self._c0 = np.concatenate(([0], np.cumsum(self.codes == HONEST)))
            self._c1 = np.concatenate(([0], np.cumsum(self.codes == ADVERSARIAL)))
        return self._c0, self._c1

    def _span(self, lo, hi):
        n = len(self)
        lo = max(lo, 1)
        hi = min(hi, n)
        return lo, hi

    def n0(self, lo: int = 1, hi: int | None = None) -> int:
        c0, _ = self._counts()
        lo, hi = self._span(lo, len(self) if hi is None else hi)
        return int(c0[hi] - c0[lo - 1]) if hi >= lo else 0

    def n1(self, lo: int = 1, hi: int | None = None) -> int:
        _, c1 = self._counts()
        lo, hi = self._span(lo, len(self) if hi is None else hi)
        return int(c1[hi] - c1[lo - 1]) if hi >= lo else 0

    def n(self, lo: int = 1, hi: int | None = None) -> int:
        return self.n0(lo, hi) + self.n1(lo, hi)

    def nonempty_slots(self) -> np.ndarray:
        return np.flatnonzero(self.codes != EMPTY) + 1

    def slots_of(self, symbol: int) -> np.ndarray:
        return np.flatnonzero(self.codes == symbol) + 1


def leader_symbol(honest_count: int, adversarial: bool) -> int:
    if honest_count == 0 and not adversarial:
        return EMPTY
    if honest_count == 1 and not adversarial:
        return HONEST
    return ADVERSARIAL


def leader_string(record: ElectionRecord) -> TriString:
    n = record.honest_count[1:]
    a = record.adversarial[1:]
    codes = np.full(n.shape, ADVERSARIAL, dtype=np.int8)
    codes[(n == 0) & ~a] = EMPTY
    codes[(n == 1) & ~a] = HONEST
    return TriString(codes)


@dataclass(frozen=True)
class RenewalIndex:
    """Increasing non-empty slots of a LeaderString."""

    slots: np.ndarray

    @classmethod
    def of(cls, w: TriString) -> "RenewalIndex":
        return cls(w.nonempty_slots())

    def offset(self, s: int, j: int) -> int:
        """``T^s_j``: distance from ``s`` to the ``j``-th non-empty slot after ``s``."""
        if j == 0:
            return 0
        start = int(np.searchsorted(self.slots, s, side="right"))
        k = start + j - 1
        if k >= len(self.slots):
            raise HorizonError(f"only {len(self.slots) - start} renewals after slot {s}")
        return int(self.slots[k]) - s

    def count_after(self, s: int) -> int:
        return len(self.slots) - int(np.searchsorted(self.slots, s, side="right"))


def compress(process, s: int, renewals: RenewalIndex, count: int | None = None) -> list:
    """``out[0] = process[s]``, ``out[j] = process[s + T^s_j]`` for ``j <= count``."""
    available = renewals.count_after(s)
    if count is None:
        count = available
    if count > available:
        raise HorizonError(f"requested {count} renewals after slot {s}, have {available}")
    out = [process[s]]
    for j in range(1, count + 1):
        out.append(process[s + renewals.offset(s, j)])
    return out


@dataclass(frozen=True)
class NegativeExtension:
    """Pre-genesis part of the stationary construction.

    ``last_nonempty`` is T_0 (at most 0) and ``last_special`` the most recent
    special slot at or before it.  ``labels`` lists ``(slot, symbol)`` from
    T_0 backwards until the special slot.
    """

    last_nonempty: int
    last_special: int
    labels: tuple[tuple[int, int], ...] = ()
    truncated: bool = False


def negative_time_extension(rng: np.random.Generator, f: float, alpha: float,
                            dist: DelayDistribution, cutoff: int = 10_000) -> NegativeExtension:
    """Sample T_0 and the last special slot before genesis.

    Going backwards from T_0, each renewal is labelled 0 with probability
    ``alpha * P(delay < gap)`` where ``gap`` is its distance to the previous
    renewal.  If ``cutoff`` renewals pass without a 0, T_0 is taken as special.
    """
    t0 = 1 - int(rng.geometric(f))
    t = t0
    labels = []
    for _ in range(cutoff):
        gap = int(rng.geometric(f))
        special = rng.random() < alpha * dist.prob_less(gap)
        labels.append((t, HONEST if special else ADVERSARIAL))
        if special:
            return NegativeExtension(t0, t, tuple(labels))
        t -= gap
    return NegativeExtension(t0, t0, tuple(labels), truncated=True)


@dataclass(frozen=True)
class SpecialSlot:
    slot: int
    leader: int
    previous: int
    previous_leader: int
    residual: float


@dataclass
class CharStringResult:
    char: TriString
    specials: list[SpecialSlot] = field(default_factory=list)
    extension: NegativeExtension | None = None
    # special status per uniquely honest slot; residual draws for all of them
    residuals: dict[int, float] = field(default_factory=dict)

    def __str__(self):
        return str(self.char)


StreamFactory = Callable[[int, int, int], Callable[[int], float]]
# (sender_slots, senders, recipients, offsets) -> refreshed residuals, inf for never
BatchResiduals = Callable[[np.ndarray, np.ndarray, np.ndarray, np.ndarray], np.ndarray]


def _guesses(ls: TriString, record: ElectionRecord, extension: NegativeExtension, refresh: bool,
             batch: BatchResiduals) -> dict[int, tuple[int, int, float]]:
    """Residual for each uniquely honest slot, assuming the previous uniquely
    honest slot (or the pre-genesis special slot) was special."""
    nonempty = ls.nonempty_slots()
    prev_nonempty = np.concatenate(([extension.last_nonempty], nonempty[:-1]))
    unique = ls.codes[nonempty - 1] == HONEST
    slots = nonempty[unique]
    if len(slots) == 0:
        return {}
    t_prev = prev_nonempty[unique]
    t_star = np.concatenate(([extension.last_special], slots[:-1]))
    leaders = np.array([record.honest_ids[t][0] for t in slots.tolist()], dtype=np.int64)
    h_star = np.concatenate(([VIRTUAL_SENDER], leaders[:-1]))
    offsets = t_prev - t_star if refresh else np.zeros(len(slots), dtype=np.int64)
    res = batch(t_star, h_star, leaders, offsets)
    return {t: (ts, hs, r) for t, ts, hs, r in zip(slots.tolist(), t_star.tolist(), h_star.tolist(), res.tolist())}


def _mark(record: ElectionRecord, dist: DelayDistribution, streams: StreamFactory,
          extension: NegativeExtension, refresh: bool, batch: BatchResiduals | None = None) -> CharStringResult:
    ls = leader_string(record)
    codes = ls.codes.copy()
    codes[codes == HONEST] = ADVERSARIAL
    rates = dist.failure_rate()
    guess = _guesses(ls, record, extension, refresh, batch) if batch is not None else {}
    t_prev = extension.last_nonempty
    t_star, h_star = extension.last_special, VIRTUAL_SENDER
    specials, residuals = [], {}
    for t in ls.nonempty_slots().tolist():
        if ls.codes[t - 1] == HONEST:
            h = record.honest_ids[t][0]
            g = guess.get(t)
            if g is not None and g[0] == t_star and g[1] == h_star:
                r = g[2]
            else:
                rep = InternalRepresentation(rates, streams(t_star, h_star, h))
                elapsed = t_prev - t_star if refresh else 0
                r = refreshed_residual(rep, elapsed)
            residuals[t] = r
            if r < t - t_prev:
                codes[t - 1] = HONEST
                specials.append(SpecialSlot(t, h, t_star, h_star, r))
                t_star, h_star = t, h
        t_prev = t
    return CharStringResult(TriString(codes), specials, extension, residuals)


def mark_special_one_time(record: ElectionRecord, dist: DelayDistribution, streams: StreamFactory,
                          extension: NegativeExtension, batch: BatchResiduals | None = None) -> CharStringResult:
    """``streams(sender_slot, sender, recipient)`` must return the uniform
    stream of that message's delay.  ``batch``, if given, must agree with
    ``streams`` and only serves to speed things up."""
    return _mark(record, dist, streams, extension, refresh=False, batch=batch)


def mark_special_iid(record: ElectionRecord, dist: DelayDistribution, streams: StreamFactory,
                     extension: NegativeExtension, batch: BatchResiduals | None = None) -> CharStringResult:
    if not dist.has_nondecreasing_failure_rate():
        raise ConfigError("special-slot marking in the i.i.d. model needs a non-decreasing failure rate")
    return _mark(record, dist, streams, extension, refresh=True, batch=batch)


def mark_special(model: str, record, dist, streams, extension, batch: BatchResiduals | None = None) -> CharStringResult:
    check_model_compatibility(dist, model)
    if model == "iid":
        return mark_special_iid(record, dist, streams, extension, batch)
    return mark_special_one_time(record, dist, streams, extension, batch)
