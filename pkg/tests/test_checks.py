import numpy as np
import pytest

from longchain import checks
from longchain import delay_model as dm
from longchain.adversaries import make_policy
from longchain.errors import ConfigError
from longchain.leader_election import ADVERSARY
from longchain.protocol_sim import run_execution
from scenarios import Release, sim


def released(seed, to, at=10, fork=2, horizon=30):
    return run_execution(sim(), Release(at, fork, to), horizon, seed)


def honest_in(tr, block, lo, hi):
    """Whether ``block``'s chain has an honest block with timestamp in ``(lo, hi]``."""
    return any(tr.proposer[b] >= 0 and lo < tr.timestamp[b] <= hi for b in tr.chain(block))


def find(pred, make):
    for seed in range(200):
        tr = make(seed)
        if pred(tr):
            return tr
    raise AssertionError("no seed met the scenario precondition")


def longer_release(tr):
    # the released chain won and dropped an honest block from slots 3..5
    return tr.proposer[tr.tip(0, 10)] == ADVERSARY and honest_in(tr, tr.tip(0, 9), 2, 5)


def test_single_chain_settles():
    tr = run_execution(sim(f=0.3, alpha=1.0), None, 200, 1)
    for s, k in ((1, 0), (5, 3), (50, 100), (100, 100)):
        assert checks.check_settlement(tr, s, k)


def test_release_to_half_violates_at_release_slot():
    tr = find(longer_release, lambda seed: released(seed, [0, 1]))
    res = checks.check_settlement(tr, 5, 5)
    assert not res and res.first_violation == 10
    nec = checks.assert_settlement_necessary(tr, 5, 5)
    assert nec.checked > 0 and nec.min_slack >= 0


def test_zero_depth_disagreement():
    from longchain import leader_election as le
    from longchain.protocol_sim import SimConfig
    cfg = SimConfig(le.LeaderConfig(((2, 0, 1.0),), honest_population=2), dm.constant(5))
    tr = run_execution(cfg, None, 10, 1)
    res = checks.check_settlement(tr, 1, 0)
    assert not res and res.first_violation == 1


def test_common_prefix_can_fail_while_last_settlement_holds():
    tr = find(longer_release, lambda seed: released(seed, "all"))
    assert not checks.check_settlement(tr, 5, 3)
    assert checks.check_settlement(tr, 10, 3)
    cp = checks.check_common_prefix(tr, 10, 3)
    assert not cp and cp.first_violation <= 5
    assert checks.check_common_prefix(tr, 0, 3)


def test_common_prefix_follows_from_settlement():
    tr = run_execution(sim(f=0.3, alpha=1.0), None, 200, 2)
    assert checks.check_common_prefix(tr, 150, 20)


def test_honest_only_chain_quality():
    tr = run_execution(sim(f=1.0, alpha=1.0), None, 300, 3)
    for mu in (0.1, 0.5, 0.99):
        for mode in (checks.HONEST_MODE, checks.SPECIAL_MODE):
            assert checks.check_chain_quality(tr, mu, 20, 100, mode=mode)


def test_adversarial_window_violates_chain_quality():
    def ok(tr):
        tip = tr.tip(0, 15)
        return tr.proposer[tip] == ADVERSARY
    tr = find(ok, lambda seed: run_execution(sim(), Release(15, 5), 40, seed))
    res = checks.check_chain_quality(tr, 0.5, 5, 10)
    assert not res and res.first_violation == 15
    nec = checks.assert_cq_necessary(tr, 0.5, 5, 10)
    assert nec.checked > 0 and nec.min_slack >= 0


def test_special_mode_is_stricter():
    cfg = sim(f=0.3, alpha=0.7, delay=dm.geometric(0.3))
    for seed in range(10):
        tr = run_execution(cfg, make_policy("max_delay_balance"), 300, seed)
        honest = checks.chain_quality_violations(tr, 0.5, 20, 30)
        special = checks.chain_quality_violations(tr, 0.5, 20, 30, mode=checks.SPECIAL_MODE)
        assert not (honest & ~special).any()


def test_vacuous_necessary_checks():
    tr = run_execution(sim(f=0.3, alpha=1.0), None, 200, 4)
    assert checks.assert_settlement_necessary(tr, 10, 10).vacuous
    assert checks.assert_cq_necessary(tr, 0.0, 10, 10).vacuous


@pytest.mark.parametrize("policy", ["private_chain", "max_delay_balance"])
def test_seeded_attacks_respect_necessary_conditions(policy):
    cfg = sim(f=0.2, alpha=0.6, parties=6, delay=dm.geometric(0.5))
    settle = cq = 0
    for seed in range(60):
        tr = run_execution(cfg, make_policy(policy, 20, 10), 300, seed)
        settle += checks.assert_settlement_necessary(tr, 20, 10).checked > 0
        cq += checks.assert_cq_necessary(tr, 0.5, 20, 10).checked > 0
    assert settle > 0 and cq > 0


def test_slack_series_formulas():
    tr = run_execution(sim(f=0.3, alpha=0.7, delay=dm.geometric(0.3)), make_policy("private_chain", 10, 5), 120, 6)
    from longchain.fork_calculus import advantage, margin
    s, k, mu = 10, 5, 0.4
    adv = checks.advantage_series(tr, s, k, mu)
    slack = checks.settlement_slack(tr, s)
    unheard = tr.unheard_set().unheard
    for i in range(s + 1, 121, 7):
        assert adv[i] == pytest.approx(advantage(tr.char.prefix(i), s, k, tr.f, mu))
        assert slack[i] == margin(tr.char.prefix(i), s) + unheard[i]


def test_party_and_horizon_errors():
    tr = run_execution(sim(), None, 20, 1)
    with pytest.raises(ConfigError):
        checks.check_settlement(tr, 10, 15)
    with pytest.raises(ConfigError):
        checks.check_settlement(tr, 1, 1, parties=[9])
    with pytest.raises(ConfigError):
        checks.check_chain_quality(tr, 0.5, 1, 1, mode="bogus")
