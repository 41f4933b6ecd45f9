"""Exhaustive enumeration of forks for short strings.

This is the reference the recursions are compared against, so it works
directly from the fork axioms and never consults the recursions.

Every closed fork is produced by placing the honest vertices in label
order: each one hangs below some existing vertex ``u`` through a fresh
chain of adversarial vertices whose labels are an increasing subset of the
adversarial indices strictly between ``u``'s label and its own, subject to
its depth exceeding that of the previous honest vertex.  Isomorphic copies
may be produced more than once; that does not affect maxima.

Reach and margin of a tine both subtract the height of the fork, which in
a closed fork is the depth of the last honest vertex, so the enumeration
tracks ``reserve + depth`` per vertex and subtracts the height at the end.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from itertools import combinations
from typing import Iterator

from .charstring import ADVERSARIAL, EMPTY, HONEST, TriString
from .fork_calculus import Fork

DEFAULT_MAX_SYMBOLS = 7


class TooLongForOracle(ValueError):
    pass


def _check_size(w: TriString, cap: int):
    if w.n() > cap:
        raise TooLongForOracle(f"{w.n()} non-empty symbols exceeds the oracle cap of {cap}")


def _subsets(items):
    for r in range(len(items) + 1):
        yield from combinations(items, r)


def enumerate_closed_forks(w, max_symbols: int = DEFAULT_MAX_SYMBOLS) -> Iterator[Fork]:
    """Yield every closed fork for ``w`` (possibly with isomorphic repeats)."""
    w = TriString.coerce(w)
    _check_size(w, max_symbols)
    honest = w.slots_of(HONEST).tolist()
    adv = w.slots_of(ADVERSARIAL).tolist()
    parent, label, depth = [-1], [0], [0]

    def place(j, last_depth):
        if j == len(honest):
            yield Fork(list(parent), list(label))
            return
        h = honest[j]
        for u in range(len(parent)):
            lu = label[u]
            if lu >= h:
                continue
            between = [a for a in adv if lu < a < h]
            for chain in _subsets(between):
                d = depth[u] + len(chain) + 1
                if d <= last_depth:
                    continue
                mark = len(parent)
                prev = u
                for a in chain + (h,):
                    parent.append(prev)
                    label.append(a)
                    depth.append(depth[prev] + 1)
                    prev = len(parent) - 1
                yield from place(j + 1, d)
                del parent[mark:], label[mark:], depth[mark:]

    yield from place(0, 0)


@dataclass(frozen=True)
class OracleResult:
    reach: int
    # margin[s] for s = 1..|w|+1 (index 0 unused)
    margin: tuple[int, ...]
    forks: int

    def margin_at(self, s: int) -> int:
        if s >= len(self.margin):
            return self.reach
        return self.margin[s]


def brute_force_reach_margin(w, max_symbols: int = DEFAULT_MAX_SYMBOLS,
                             strict: bool = False) -> OracleResult:
    """Maximum reach and, for every reference slot ``s``, maximum margin
    over all closed forks of ``w``.

    Two tines are ``s``-disjoint when their deepest common vertex has label
    below ``s`` (at most ``s`` with ``strict``).
    """
    w = TriString.coerce(w)
    _check_size(w, max_symbols)
    n = len(w)
    honest = w.slots_of(HONEST).tolist()
    adv = w.slots_of(ADVERSARIAL).tolist()
    # reserve after label x: adversarial indices greater than x
    reserve = [sum(1 for a in adv if a > x) for x in range(n + 1)]

    parent, label, depth, value, path = [-1], [0], [0], [reserve[0]], [(0,)]
    # best_pair[x] = max over pairs whose common ancestor has label x of min value
    NEG = -10 ** 9
    best_reach = NEG
    best_margin = [NEG] * (n + 2)
    forks = 0

    def lca_label(pu, pv):
        k = 0
        m = min(len(pu), len(pv))
        while k < m and pu[k] == pv[k]:
            k += 1
        return label[pu[k - 1]]

    def push(prev, lab, pairs):
        v = len(parent)
        parent.append(prev)
        label.append(lab)
        depth.append(depth[prev] + 1)
        value.append(reserve[lab] + depth[-1])
        path.append(path[prev] + (v,))
        pairs = list(pairs)
        pv = path[v]
        for u in range(v + 1):
            x = lca_label(path[u], pv)
            m = min(value[u], value[v])
            if m > pairs[x]:
                pairs[x] = m
        return pairs

    def finish(pairs, height):
        nonlocal best_reach, forks
        forks += 1
        r = max(value) - height
        if r > best_reach:
            best_reach = r
        run, x = NEG, 0
        for s in range(1, n + 2):
            limit = min(s if strict else s - 1, n)
            while x <= limit:
                run = max(run, pairs[x])
                x += 1
            m = run - height
            if m > best_margin[s]:
                best_margin[s] = m

    def place(j, last_depth, pairs):
        if j == len(honest):
            finish(pairs, last_depth)
            return
        h = honest[j]
        for u in range(len(parent)):
            lu = label[u]
            if lu >= h:
                continue
            between = [a for a in adv if lu < a < h]
            for chain in _subsets(between):
                d = depth[u] + len(chain) + 1
                if d <= last_depth:
                    continue
                mark = len(parent)
                prev, p = u, pairs
                for a in chain + (h,):
                    p = push(prev, a, p)
                    prev = len(parent) - 1
                place(j + 1, d, p)
                del parent[mark:], label[mark:], depth[mark:], value[mark:], path[mark:]

    root_pairs = [NEG] * (n + 1)
    root_pairs[0] = value[0]
    place(0, 0, root_pairs)
    return OracleResult(best_reach, tuple([0] + best_margin[1:]), forks)


def _all_forks_with_extras(w: TriString, max_symbols: int, extra_chains: int) -> Iterator[Fork]:
    """Closed forks plus up to ``extra_chains`` hanging adversarial chains."""
    adv = w.slots_of(ADVERSARIAL).tolist()

    def extend(F: Fork, left: int):
        yield F
        if left == 0:
            return
        for u in range(len(F)):
            above = [a for a in adv if a > F.label[u]]
            for chain in _subsets(above):
                if not chain:
                    continue
                G = Fork(list(F.parent), list(F.label))
                G.add_path(u, chain)
                yield from extend(G, left - 1)

    for F in enumerate_closed_forks(w, max_symbols):
        yield from extend(F, extra_chains)


def brute_force_balanced(w, s: int, l: int, max_symbols: int = 5, strict: bool = False) -> bool:
    """Whether some fork for ``w`` has two ``s``-disjoint tines that are both
    at least as long as every honest vertex labelled at most ``l``.

    Any witness keeps the honest paths plus the two tines; the tines leave
    the honest part through adversarial chains, so closed forks with up to
    two extra chains cover every case.
    """
    w = TriString.coerce(w)
    _check_size(w, max_symbols)
    for F in _all_forks_with_extras(w, max_symbols, 2):
        depth = F.depths()
        need = 0
        for v in range(1, len(F)):
            lab = F.label[v]
            if lab <= l and w.codes[lab - 1] == HONEST:
                need = max(need, depth[v])
        viable = [v for v in range(len(F)) if depth[v] >= need]
        for i, u in enumerate(viable):
            for v in viable[i:]:
                lab = F.label[F.lca(u, v)]
                if (lab <= s) if strict else (lab < s):
                    return True
    return False


def padded_strings(max_symbols: int, max_empty: int) -> Iterator[str]:
    """Every string with at most ``max_symbols`` symbols from {0, 1} and at
    most ``max_empty`` empty slots, in a fixed order."""
    from itertools import product

    for k in range(max_symbols + 1):
        for core in product("01", repeat=k):
            for e in range(max_empty + 1):
                for spots in combinations(range(k + e), e):
                    out, it = [], iter(core)
                    for pos in range(k + e):
                        out.append("." if pos in spots else next(it))
                    yield "".join(out)


def write_oracle_csv(path, rows) -> None:
    """Rows are ``(w, s, reach, margin)``."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["w", "s", "reach", "margin"])
        for row in rows:
            writer.writerow(row)
