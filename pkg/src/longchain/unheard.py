"""Which special slots a party has heard about, and how many it has not.

``latest_heard(h, i)`` is the most recent special slot whose block reached
``h`` by slot ``i``; ``unheard(h, i)`` counts the special slots after it, up
to ``i``.  Deliveries can be read either as scheduled (the worst case, with
no early delivery) or as they actually happened in a trace.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .charstring import HONEST, RenewalIndex, TriString, compress

SCHEDULED = "scheduled"
ACTUAL = "actual"
NEG_INF = -math.inf


@dataclass(frozen=True)
class DeliveryRecord:
    sender_slot: int
    sender: int
    recipient: int
    scheduled: float
    actual: float

    def heard(self, mode: str) -> float:
        return self.scheduled if mode == SCHEDULED else self.actual


@dataclass
class DeliveryLog:
    """Delivery times of honest broadcasts, including each leader's
    pretend message to itself."""

    records: list[DeliveryRecord] = field(default_factory=list)
    _index: dict = field(default_factory=dict, repr=False)

    def add(self, rec: DeliveryRecord) -> None:
        if rec.actual > rec.scheduled:
            raise ValueError("a message cannot arrive after its scheduled slot")
        if rec.actual < rec.sender_slot:
            raise ValueError("a message cannot arrive before it was sent")
        self.records.append(rec)
        self._index.setdefault((rec.sender_slot, rec.recipient), rec)

    def extend(self, recs: Iterable[DeliveryRecord]) -> None:
        for r in recs:
            self.add(r)

    def lookup(self, sender_slot: int, recipient: int) -> DeliveryRecord:
        return self._index[(sender_slot, recipient)]

    def heard_at(self, sender_slot: int, recipient: int, mode: str = SCHEDULED) -> float:
        return self._index[(sender_slot, recipient)].heard(mode)

    @classmethod
    def from_delays(cls, char, delays: Sequence[float], recipient: int = 0) -> "DeliveryLog":
        """Log where the ``k``-th special slot of ``char`` reaches ``recipient``
        after ``delays[k]`` slots."""
        char = TriString.coerce(char)
        log = cls()
        for slot, d in zip(char.slots_of(HONEST).tolist(), delays):
            log.add(DeliveryRecord(slot, -1, recipient, slot + d, slot + d))
        return log


def latest_heard(log: DeliveryLog, char, h: int, i: int, mode: str = SCHEDULED) -> float:
    """Latest special slot ``<= i`` whose block ``h`` has by slot ``i``, or ``-inf``."""
    char = TriString.coerce(char)
    best = NEG_INF
    for slot in char.slots_of(HONEST).tolist():
        if slot > i:
            break
        if log.heard_at(slot, h, mode) <= i:
            best = slot
    return best


def unheard(log: DeliveryLog, char, h: int, i: int, mode: str = SCHEDULED) -> int:
    char = TriString.coerce(char)
    lh = latest_heard(log, char, h, i, mode)
    return char.n0(max(0, lh) + 1, i) if lh != NEG_INF else char.n0(1, i)


@dataclass
class UnheardSeries:
    """Index ``i`` holds the value after slot ``i`` (``i = 0..n``)."""

    latest_heard: np.ndarray
    unheard: np.ndarray

    def __len__(self):
        return len(self.unheard)


def _heard_times(log: DeliveryLog, specials: np.ndarray, h: int, mode: str) -> np.ndarray:
    return np.array([log.heard_at(s, h, mode) for s in specials.tolist()], dtype=np.float64)


def series_from_heard_times(char: TriString, specials: np.ndarray, heard: np.ndarray) -> UnheardSeries:
    n = len(char)
    lh = np.full(n + 1, NEG_INF)
    ok = heard <= n
    if ok.any():
        np.maximum.at(lh, np.ceil(heard[ok]).astype(np.int64), specials[ok].astype(np.float64))
    lh = np.maximum.accumulate(lh)
    zeros = np.concatenate(([0], np.cumsum(char.codes == HONEST)))
    base = np.where(np.isfinite(lh), np.maximum(lh, 0), 0).astype(np.int64)
    return UnheardSeries(lh, zeros - zeros[base])


def unheard_series(log: DeliveryLog, char, h: int, mode: str = SCHEDULED) -> UnheardSeries:
    char = TriString.coerce(char)
    specials = char.slots_of(HONEST)
    return series_from_heard_times(char, specials, _heard_times(log, specials, h, mode))


def set_series(per_party: Sequence[UnheardSeries]) -> UnheardSeries:
    """Aggregate over a set of parties: earliest latest-heard, largest unheard."""
    lh = np.min(np.stack([s.latest_heard for s in per_party]), axis=0)
    un = np.max(np.stack([s.unheard for s in per_party]), axis=0)
    return UnheardSeries(lh, un)


def unheard_set_series(log: DeliveryLog, char, parties: Iterable[int], mode: str = SCHEDULED) -> UnheardSeries:
    return set_series([unheard_series(log, char, h, mode) for h in parties])


def compressed_unheard(series: UnheardSeries, s: int, renewals: RenewalIndex, count: int | None = None) -> list[int]:
    return [int(x) for x in compress(series.unheard, s, renewals, count)]


def write_unheard_csv(path, rows: Iterable[tuple]) -> None:
    """Rows are ``(trial, slot, party, latest_heard, unheard)``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["trial", "slot", "party", "latest_heard", "unheard"])
        for trial, slot, party, lh, un in rows:
            w.writerow([trial, slot, party, "-inf" if lh == NEG_INF else int(lh), int(un)])


def series_rows(trial: int, party: int, series: UnheardSeries):
    for slot in range(1, len(series)):
        yield trial, slot, party, series.latest_heard[slot], series.unheard[slot]
