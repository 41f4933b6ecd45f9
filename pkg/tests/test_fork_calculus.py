import csv
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from longchain import fork_calculus as fc
from longchain.charstring import TriString
from longchain.fork_oracle import (TooLongForOracle, brute_force_balanced, brute_force_reach_margin,
                                   enumerate_closed_forks, padded_strings)

GOLDEN = Path(__file__).parent / "data" / "oracle_golden.csv"

strings = st.text(alphabet=".01", max_size=40)
short = st.text(alphabet=".01", max_size=9).filter(lambda w: sum(c != "." for c in w) <= 5)


def chain(labels):
    F = fc.Fork()
    F.add_path(0, labels)
    return F


# -- axioms -------------------------------------------------------------------

def test_root_alone_is_valid():
    assert fc.validate_fork(fc.Fork(), ".")


def test_duplicate_honest_label_rejected():
    F = fc.Fork()
    F.add(0, 1)
    F.add(0, 1)
    res = fc.validate_fork(F, "0")
    assert not res and res.violated == fc.UNIQUE_HONEST


def test_equal_depth_special_blocks_rejected():
    F = fc.Fork()
    F.add(0, 1)
    F.add(0, 2)
    res = fc.validate_fork(F, "00")
    assert not res and res.violated == fc.DEPTH_MONOTONE


def test_other_axioms():
    assert fc.validate_fork(fc.Fork([-1, 0], [0, 2]), "01").violated == fc.UNIQUE_HONEST
    assert fc.validate_fork(fc.Fork([-1, 0], [0, 2]), "10")
    assert fc.validate_fork(fc.Fork([-1, 0], [0, 2]), "0.").violated == fc.LABEL_RANGE
    assert fc.validate_fork(fc.Fork([-1, 0, 1], [0, 2, 1]), "11").violated == fc.INCREASING_LABELS
    assert fc.validate_fork(fc.Fork([-1, 2, 1], [0, 1, 2]), "11").violated == fc.ROOTED_TREE
    assert fc.validate_fork(fc.Fork([-1], [3]), "1").violated == fc.ROOT_LABEL
    assert fc.validate_fork(fc.Fork(), "0").violated == fc.UNIQUE_HONEST
    assert fc.validate_fork(chain([1, 2, 3]), "101")


# -- closure ------------------------------------------------------------------

def test_closure_without_adversarial_vertices_is_identity():
    F = chain([1, 2])
    G = fc.closure(F, "00")
    assert (G.parent, G.label) == (F.parent, F.label)


def test_closure_drops_adversarial_tail():
    G = fc.closure(chain([1, 2]), "11")
    assert len(G) == 1


def test_closure_hand_trim():
    F = fc.Fork()
    v = F.add(0, 1)
    F.add_path(v, [2, 3])
    F.add(0, 2)
    G = fc.closure(F, "011")
    assert (G.parent, G.label) == ([-1, 0], [0, 1])
    assert fc.is_closed(G, "011")


# -- gap, reserve, reach --------------------------------------------------------

def test_longest_tine_metrics():
    F = chain([1, 2])
    assert fc.tine_metrics(F, "00", 2) == fc.TineMetrics(0, 0, 0)


def test_special_tine_of_01():
    assert fc.tine_metrics(chain([1]), "01", 1) == fc.TineMetrics(0, 1, 1)


def test_root_tine_reach_negative():
    assert fc.tine_metrics(chain([1, 2]), "001", 0) == fc.TineMetrics(2, 1, -1)


def test_metrics_need_closed_fork():
    with pytest.raises(ValueError):
        fc.tine_metrics(chain([1]), "1", 0)


# -- recursions -----------------------------------------------------------------

def test_reach_examples():
    assert fc.reach("") == 0
    assert fc.reach("11") == 2
    assert fc.reach_recursion("10100") == [1, 0, 1, 0, 0]


def test_margin_third_and_fourth_cases():
    from longchain.charstring import HONEST
    assert fc.margin_step(3, 0, HONEST) == 0
    assert fc.margin_step(0, 0, HONEST) == -1
    assert fc.margin_step(2, 1, HONEST) == 0
    assert fc.margin_step(2, 1, 1) == 2
    assert fc.margin_step(2, 1, 2) == 1


@given(strings, st.integers(1, 45))
def test_margin_equals_reach_before_s(w, s):
    r = fc.reach_recursion(w)
    m = fc.margin_recursion(w, s)
    assert m[:s - 1] == r[:s - 1]
    assert all(a <= b for a, b in zip(m, r))


@given(strings, st.data())
def test_observer_transform_reach(w, data):
    n = len(w)
    l = data.draw(st.integers(0, n))
    i = data.draw(st.integers(l, n))
    t = TriString.coerce(w)
    o = fc.observer_transform(t, l)
    assert fc.reach(o.prefix(i)) == fc.reach(t.prefix(l)) + t.n1(l + 1, i)


def test_observer_transform_examples():
    assert str(fc.observer_transform("0101", 4)) == "0101"
    assert str(fc.observer_transform("0101", 2)) == "01.1"


def test_advantage_formula():
    w = "0110.0101"
    # after slot 3: "0.0101" has two 1s and three 0s; Reach("011") = 2
    assert fc.advantage(w, 3, 10, 0.2, 0.5) == pytest.approx(2 - 3 + 1.0 + 2)


# -- exhaustive oracle ------------------------------------------------------------

def test_single_special_slot():
    res = brute_force_reach_margin("0")
    assert res.reach == 0
    # two tines are s-disjoint when their common vertex is labelled below s,
    # which is the convention the margin recursion follows
    assert res.margin_at(1) == -1 == fc.margin("0", 1)
    # under the strict reading the lone special tine is 1-disjoint from itself
    assert brute_force_reach_margin("0", strict=True).margin_at(1) == 0


def test_single_adversarial_slot():
    assert brute_force_reach_margin("1").reach == 1 == fc.reach("1")


def test_balanced_examples():
    assert brute_force_balanced("0..", 1, 3) == fc.balanced_fork_exists("0..", 1, 3)
    assert brute_force_balanced("00", 2, 2) == fc.balanced_fork_exists("00", 2, 2)
    for w in ("", "0", "01", "0.0", "1.0"):
        assert fc.balanced_fork_exists(w, len(w) + 1, len(w))
        assert brute_force_balanced(w, len(w) + 1, len(w))


@given(short, st.data())
def test_balanced_agrees_with_enumeration(w, data):
    n = len(w)
    s = data.draw(st.integers(1, n + 1))
    l = data.draw(st.integers(0, n))
    assert brute_force_balanced(w, s, l) == fc.balanced_fork_exists(w, s, l)


@given(short)
def test_enumerated_forks_are_valid_and_closed(w):
    best = None
    for F in enumerate_closed_forks(w, max_symbols=5):
        assert fc.validate_fork(F, w)
        assert fc.is_closed(F, w)
        r = fc.fork_reach(F, w)
        best = r if best is None else max(best, r)
    assert best == fc.reach(w)


@given(st.text(alphabet=".01", max_size=7).filter(lambda w: sum(c != "." for c in w) <= 4), st.data())
def test_margin_of_each_fork_bounded(w, data):
    s = data.draw(st.integers(1, len(w) + 1))
    top = max(fc.fork_margin(F, w, s) for F in enumerate_closed_forks(w, max_symbols=4))
    assert top == brute_force_reach_margin(w).margin_at(s) == (fc.margin(w, s) if s <= len(w) else fc.reach(w))


def test_oracle_size_cap():
    with pytest.raises(TooLongForOracle):
        brute_force_reach_margin("0" * 8)


def test_padded_string_count():
    assert list(padded_strings(1, 0)) == ["", "0", "1"]
    assert len(list(padded_strings(2, 1))) == 2 + 2 * 3 + 4 * 4


def test_golden_oracle_table():
    with open(GOLDEN) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) > 100
    for row in rows:
        w, s = row["w"], int(row["s"])
        assert fc.reach(w) == int(row["reach"])
        assert fc.margin(w, s) == int(row["margin"])
