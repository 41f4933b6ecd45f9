import math

import numpy as np
from hypothesis import given, strategies as st

from longchain import delay_model as dm
from longchain.bounds import compute_params
from longchain.charstring import HONEST, RenewalIndex, TriString
from longchain.montecarlo import OBSERVER, RenewalConfig, UnheardTracker, renewal_steps, unheard_at_slot
from longchain.unheard import (NEG_INF, DeliveryLog, DeliveryRecord, compressed_unheard, latest_heard,
                               set_series, unheard, unheard_series, unheard_set_series)


def test_zero_delays_hear_everything():
    w = "0.00.0"
    log = DeliveryLog.from_delays(w, [0, 0, 0, 0])
    for i in range(1, 7):
        assert unheard(log, w, 0, i) == 0
        if w[i - 1] == "0":
            assert latest_heard(log, w, 0, i) == i


def test_nothing_heard_is_minus_infinity():
    log = DeliveryLog.from_delays("00", [5, 5])
    assert latest_heard(log, "00", 0, 2) == NEG_INF
    assert unheard(log, "00", 0, 2) == 2


def test_latest_of_heard_slots():
    log = DeliveryLog.from_delays("0.0", [2, 0])
    assert latest_heard(log, "0.0", 0, 3) == 3
    assert unheard(log, "0.0", 0, 3) == 0
    assert unheard(log, "0.0", 0, 2) == 1


@given(st.text(alphabet=".01", max_size=30), st.data())
def test_series_matches_pointwise(w, data):
    t = TriString.coerce(w)
    k = t.n0()
    delays = data.draw(st.lists(st.one_of(st.integers(0, 6), st.just(math.inf)), min_size=k, max_size=k))
    log = DeliveryLog.from_delays(t, delays)
    series = unheard_series(log, t, 0)
    for i in range(1, len(t) + 1):
        assert series.unheard[i] == unheard(log, t, 0, i)
        assert series.latest_heard[i] == latest_heard(log, t, 0, i)
    # shape: falls or holds between special slots, rises by at most one at them
    steps = np.diff(series.unheard)
    specials = set(t.slots_of(HONEST).tolist())
    for i, d in enumerate(steps.tolist(), start=1):
        assert d <= (1 if i in specials else 0)


def test_singleton_and_dominance():
    w = TriString.coerce("0.0.00.0")
    log = DeliveryLog()
    for slot in w.slots_of(HONEST).tolist():
        log.add(DeliveryRecord(slot, -1, 0, slot, slot))
        log.add(DeliveryRecord(slot, -1, 1, slot + 50, slot + 50))
    fast, slow = unheard_series(log, w, 0), unheard_series(log, w, 1)
    single = unheard_set_series(log, w, [1])
    assert np.array_equal(single.unheard, slow.unheard)
    both = set_series([fast, slow])
    assert np.array_equal(both.unheard, slow.unheard)
    assert both.unheard[-1] == 5 and fast.unheard[-1] == 0
    renewals = RenewalIndex.of(w)
    assert compressed_unheard(slow, 0, renewals) == [0, 1, 2, 3, 4, 5]


def test_log_rejects_impossible_deliveries():
    log = DeliveryLog()
    try:
        log.add(DeliveryRecord(5, 0, 1, 7, 8))
    except ValueError:
        pass
    else:
        raise AssertionError("late delivery accepted")


def test_tracker_matches_scalar_definition():
    cfg = RenewalConfig(0.3, 0.8, dm.geometric(0.3))
    n, horizon = 40, 300
    tracker = UnheardTracker(n, size=64)
    slots, special, heard = [], [], []
    for st_ in renewal_steps(cfg, n, horizon, seed=3):
        live = st_.slot <= horizon
        tracker.add(st_, live)
        slots.append(st_.slot.copy())
        special.append(st_.special & live)
        heard.append(st_.heard.copy())
    got = tracker.unheard_at(horizon)
    for k in range(n):
        codes = ["."] * horizon
        log = DeliveryLog()
        for sl, sp, hd in zip(slots, special, heard):
            if sp[k]:
                codes[sl[k] - 1] = "0"
                log.add(DeliveryRecord(int(sl[k]), 0, OBSERVER, hd[k], hd[k]))
        assert got[k] == unheard(log, "".join(codes), OBSERVER, horizon)


def test_unheard_tail_monte_carlo():
    cfg = RenewalConfig(0.2, 0.9, dm.geometric(0.1))
    q = compute_params(cfg.f, cfg.alpha, cfg.delay).q
    n = 20_000
    u = unheard_at_slot(cfg, n, 150, seed=9)
    for a in range(6):
        bound = (1 - q) ** a
        est = float((u > a).mean())
        assert est <= bound + 3 * math.sqrt(bound * (1 - bound) / n)
