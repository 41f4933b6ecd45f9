import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from longchain import leader_election as le
from longchain.charstring import EMPTY, HONEST, ADVERSARIAL, leader_string
from longchain.errors import ConfigError


def test_all_uniquely_honest_law():
    cfg = le.LeaderConfig(((1, 0, 1.0),))
    assert le.params(cfg) == (1.0, 1.0)
    rec = le.draw_slots(cfg, 50, np.random.default_rng(0))
    assert str(leader_string(rec)) == "0" * 50


def test_direct_summation():
    cfg = le.LeaderConfig(((0, 0, 0.9), (1, 0, 0.08), (0, 1, 0.02)))
    f, alpha = le.params(cfg)
    assert f == pytest.approx(0.1)
    assert alpha == pytest.approx(0.8)


def test_adversary_only_leaders():
    cfg = le.LeaderConfig(((0, 1, 0.3), (0, 0, 0.7)))
    assert le.params(cfg) == pytest.approx((0.3, 0.0))


@given(st.integers(1, 8), st.floats(0.01, 0.5), st.floats(0.0, 0.5))
def test_bernoulli_mining_summation(n, rho, beta):
    law = le.bernoulli_law(n, rho, beta)
    f, alpha = le.params(le.LeaderConfig(law, honest_population=n))
    empty = (1 - rho) ** n * (1 - beta)
    assert f == pytest.approx(1 - empty)
    assert alpha == pytest.approx(n * rho * (1 - rho) ** (n - 1) * (1 - beta) / (1 - empty))


def test_one_time_trace_shape():
    # {h1}, {}, {A}, {h2,h3}, {}, {h4,A}
    rec = le.ElectionRecord(np.array([0, 1, 0, 0, 2, 0, 1]),
                            np.array([False, False, False, True, False, False, True]),
                            {1: (1,), 4: (2, 3), 6: (4,)})
    assert str(leader_string(rec)) == "0.11.1"
    assert rec.at(6).honest == (4,) and rec.at(6).adversarial
    assert rec.at(2).empty
    assert rec.nonempty_slots().tolist() == [1, 3, 4, 6]


def test_one_time_ids_are_fresh():
    cfg = le.LeaderConfig(le.bernoulli_law(3, 0.3, 0.1), model="one_time", observers=2)
    rec = le.draw_slots(cfg, 500, np.random.default_rng(1))
    ids = [h for s in sorted(rec.honest_ids) for h in rec.honest_ids[s]]
    assert ids == list(range(2, 2 + len(ids)))


def test_frequencies_match_law():
    cfg = le.LeaderConfig(le.simple_law(0.3, 0.7), honest_population=4)
    rec = le.draw_slots(cfg, 200_000, np.random.default_rng(2))
    ls = leader_string(rec).codes
    n = len(ls)
    for sym, prob in ((EMPTY, 0.7), (HONEST, 0.21), (ADVERSARIAL, 0.09)):
        est = float((ls == sym).mean())
        assert abs(est - prob) <= 3 * math.sqrt(prob * (1 - prob) / n)


def test_bad_configs():
    with pytest.raises(ConfigError):
        le.LeaderConfig(((1, 0, 0.5),))
    with pytest.raises(ConfigError):
        le.LeaderConfig(((3, 0, 1.0),), honest_population=2)
    with pytest.raises(ConfigError):
        le.LeaderConfig(((1, 0, 1.0),), model="poisson")
    with pytest.raises(ConfigError):
        le.from_config({"alpha": 0.5})
    with pytest.raises(ConfigError):
        le.params(le.LeaderConfig(((0, 0, 1.0),)))


def test_from_config():
    cfg = le.from_config({"f": 0.2, "alpha": 0.9, "model": "one_time", "observers": 3})
    assert le.params(cfg) == pytest.approx((0.2, 0.9))
    assert cfg.tracked_parties() == [0, 1, 2]
    cfg = le.from_config({"law": [[0, 0, 0.5], [2, 0, 0.5]], "honest_population": 4})
    assert le.params(cfg) == pytest.approx((0.5, 0.0))
