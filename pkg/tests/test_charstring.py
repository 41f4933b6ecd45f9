import math

import numpy as np
import pytest

from longchain import delay_model as dm
from longchain import leader_election as le
from longchain.charstring import (ADVERSARIAL, EMPTY, HONEST, VIRTUAL_SENDER, NegativeExtension, RenewalIndex,
                                  TriString, compress, leader_string, leader_symbol, mark_special,
                                  mark_special_iid, mark_special_one_time, negative_time_extension)
from longchain.errors import ConfigError, HorizonError
from longchain.streams import stream_key, stream_key_array


def keyed(seed):
    return lambda a, b, c: dm.KeyedStream(stream_key(seed, a, b, c))


def batch_for(seed, dist):
    rates = dist.failure_rate()

    def batch(ts, hs, hr, offsets):
        d = dm.residuals_array(rates, stream_key_array(seed, ts, hs, hr), offsets)
        return np.where(d >= dm.NEVER, np.inf, d.astype(np.float64))
    return batch


def record(symbols: str, leaders=None):
    """Record from a string over '.', '0' (one honest leader), '1' (adversary)."""
    n = len(symbols)
    hc = np.zeros(n + 1, dtype=np.int64)
    adv = np.zeros(n + 1, dtype=bool)
    ids = {}
    for i, c in enumerate(symbols, start=1):
        if c == "0":
            hc[i] = 1
            ids[i] = ((leaders or {}).get(i, i),)
        elif c == "1":
            adv[i] = True
    return le.ElectionRecord(hc, adv, ids)


def test_leader_symbols():
    assert leader_symbol(0, False) == EMPTY
    assert leader_symbol(1, False) == HONEST
    assert leader_symbol(2, False) == ADVERSARIAL
    assert leader_symbol(1, True) == ADVERSARIAL
    assert leader_symbol(0, True) == ADVERSARIAL


def test_tristring_basics():
    w = TriString.parse("0.1⊥0")
    assert str(w) == "0.1.0"
    assert w.n0() == 2 and w.n1() == 1 and w.n(2, 3) == 1
    assert str(w.window(2, 4)) == ".1."
    assert str(w.prefix(0)) == ""
    with pytest.raises(HorizonError):
        w.symbol(6)
    with pytest.raises(ValueError):
        TriString.parse("02")


def test_first_slot_special_when_residual_short():
    ext = NegativeExtension(last_nonempty=0, last_special=0)
    rec = record(".0")
    fast = mark_special_one_time(rec, dm.constant(1), keyed(1), ext)
    assert str(fast) == ".0"
    assert fast.specials[0].previous == 0 and fast.specials[0].previous_leader == VIRTUAL_SENDER
    slow = mark_special_one_time(rec, dm.constant(2), keyed(1), ext)
    assert str(slow) == ".1"


def test_unheard_honest_slot_becomes_adversarial():
    ext = NegativeExtension(0, 0)
    # slot 1 special (delay 0 < gap 1); slot 2 has gap 1 and residual 3
    res = mark_special_one_time(record("00"), dm.constant(3), keyed(1), NegativeExtension(-5, -5))
    assert str(res) == "01"
    res = mark_special_one_time(record("0..0"), dm.constant(2), keyed(1), ext)
    assert str(res) == "1..0"
    assert res.residuals == {1: 2, 4: 2}


def test_zero_delay_marks_every_unique_honest_slot():
    cfg = le.LeaderConfig(le.bernoulli_law(4, 0.1, 0.1), honest_population=4)
    rec = le.draw_slots(cfg, 300, np.random.default_rng(3))
    ext = negative_time_extension(np.random.default_rng(4), *le.params(cfg), dm.constant(0))
    iid = mark_special_iid(rec, dm.constant(0), keyed(5), ext)
    one = mark_special_one_time(rec, dm.constant(0), keyed(5), ext)
    assert iid.char == one.char == leader_string(rec)


def naive_marking(rec, dist, seed, ext, refresh):
    """Direct restatement of the special-slot rule, one slot at a time."""
    out = []
    t_prev, t_star, h_star = ext.last_nonempty, ext.last_special, VIRTUAL_SENDER
    for t in range(1, rec.horizon + 1):
        n, a = int(rec.honest_count[t]), bool(rec.adversarial[t])
        if n == 0 and not a:
            out.append(".")
            continue
        if n == 1 and not a:
            h = rec.honest_ids[t][0]
            u = dm.KeyedStream(stream_key(seed, t_star, h_star, h))
            d = t_prev - t_star if refresh else 0
            rates, i = dist.failure_rate(), 0
            while rates[i] < 1.0 and u(i + d) > rates[i]:
                i += 1
                if i > rates.stationary_from and rates.tail_rate == 0.0:
                    i = math.inf
                    break
            if i < t - t_prev:
                out.append("0")
                t_star, h_star = t, h
            else:
                out.append("1")
        else:
            out.append("1")
        t_prev = t
    return "".join(out)


def test_seeded_hand_trace():
    cfg = le.LeaderConfig(le.simple_law(0.5, 0.8), honest_population=3)
    rec = le.draw_slots(cfg, 20, np.random.default_rng(11))
    dist = dm.geometric(0.5)
    ext = negative_time_extension(np.random.default_rng(12), 0.5, 0.8, dist)
    res = mark_special_iid(rec, dist, keyed(13), ext)
    assert str(res) == naive_marking(rec, dist, 13, ext, refresh=True)
    # frozen from this seeded instance
    assert str(leader_string(rec)) == GOLDEN_LEADERS
    assert str(res) == GOLDEN_CHAR


GOLDEN_LEADERS = "..0..1..10.00..00000"
GOLDEN_CHAR = "..0..1..10.01..01011"


@pytest.mark.parametrize("model,dist", [
    ("iid", dm.geometric(0.3)), ("iid", dm.constant(2)), ("iid", dm.discrete_exponential(3.0)),
    ("one_time", dm.mixture_inf(dm.constant(2), 0.8)), ("one_time", dm.table([0.2, 0.5, 0.1, 0.2])),
])
def test_marking_matches_naive_rule(model, dist):
    cfg = le.LeaderConfig(le.bernoulli_law(3, 0.15, 0.1), model=model, honest_population=3, observers=2)
    f, alpha = le.params(cfg)
    for seed in range(15):
        rec = le.draw_slots(cfg, 120, np.random.default_rng(seed))
        ext = negative_time_extension(np.random.default_rng(seed + 100), f, alpha, dist)
        res = mark_special(model, rec, dist, keyed(seed), ext)
        assert str(res) == naive_marking(rec, dist, seed, ext, refresh=model == "iid")
        fast = mark_special(model, rec, dist, keyed(seed), ext, batch_for(seed, dist))
        assert fast.char == res.char and fast.residuals == res.residuals


def test_decreasing_rate_rejected_in_iid():
    rec = record("0")
    with pytest.raises(ConfigError):
        mark_special("iid", rec, dm.table([0.5, 0.1, 0.4]), keyed(0), NegativeExtension(0, 0))
    with pytest.raises(ConfigError):
        mark_special("iid", rec, dm.mixture_inf(dm.constant(1), 0.5), keyed(0), NegativeExtension(0, 0))


def test_label_law_gap_one():
    # f = 1 makes every gap 1
    rng = np.random.default_rng(5)
    n = 20_000
    firsts = [negative_time_extension(rng, 1.0, 0.7, dm.constant(0)).labels[0][1] for _ in range(n)]
    est = np.mean(np.array(firsts) == HONEST)
    assert abs(est - 0.7) <= 3 * math.sqrt(0.21 / n)
    ext = negative_time_extension(rng, 1.0, 0.7, dm.constant(2), cutoff=500)
    assert ext.truncated and all(lab == ADVERSARIAL for _, lab in ext.labels)
    assert ext.last_special == ext.last_nonempty


def test_negative_label_frequency_is_p():
    f, alpha, dist = 0.3, 0.9, dm.geometric(0.4)
    p = alpha * sum(f * (1 - f) ** (g - 1) * dist.prob_less(g) for g in range(1, 400))
    rng = np.random.default_rng(6)
    zeros = total = 0
    while total < 100_000:
        ext = negative_time_extension(rng, f, alpha, dist)
        total += len(ext.labels)
        zeros += sum(lab == HONEST for _, lab in ext.labels)
    assert abs(zeros / total - p) <= 3 * math.sqrt(p * (1 - p) / total)


def test_compress_identity_process():
    renewals = RenewalIndex(np.array([3, 5, 9]))
    assert compress(list(range(12)), 0, renewals) == [0, 3, 5, 9]
    assert compress(list(range(12)), 4, renewals) == [4, 5, 9]
    assert renewals.offset(4, 2) == 5
    with pytest.raises(HorizonError):
        compress(list(range(12)), 0, renewals, 4)


def test_compressed_leader_string_is_bernoulli_alpha():
    cfg = le.LeaderConfig(le.simple_law(0.2, 0.75), honest_population=3)
    w = leader_string(le.draw_slots(cfg, 400_000, np.random.default_rng(8)))
    comp = compress([EMPTY] + w.codes.tolist(), 1000, RenewalIndex.of(w))[1:]
    est = np.mean(np.array(comp) == HONEST)
    assert abs(est - 0.75) <= 3 * math.sqrt(0.75 * 0.25 / len(comp))
