"""Forks over characteristic strings and the reach/margin calculus.

A fork is a rooted tree of blocks whose vertex labels are slot indices.
Against a string ``w`` it must satisfy five axioms (see ``AXIOMS``).  The
quantities reach and margin measure how far the adversary is from
presenting a chain that honest parties would accept.  Their maxima over all
closed forks obey simple one-pass recursions, implemented here; the
exhaustive check of those recursions lives in :mod:`longchain.fork_oracle`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .charstring import ADVERSARIAL, EMPTY, HONEST, TriString

ROOTED_TREE = "rooted_tree"
ROOT_LABEL = "root_label"
LABEL_RANGE = "label_range"
INCREASING_LABELS = "increasing_labels"
UNIQUE_HONEST = "unique_honest"
DEPTH_MONOTONE = "depth_monotone"
AXIOMS = (ROOTED_TREE, ROOT_LABEL, LABEL_RANGE, INCREASING_LABELS, UNIQUE_HONEST, DEPTH_MONOTONE)


@dataclass
class Fork:
    """Vertex 0 is the root.  ``parent[v]`` is -1 only for the root."""

    parent: list[int] = field(default_factory=lambda: [-1])
    label: list[int] = field(default_factory=lambda: [0])

    def __post_init__(self):
        if len(self.parent) != len(self.label):
            raise ValueError("parent and label lists differ in length")

    def __len__(self):
        return len(self.parent)

    def add(self, parent: int, label: int) -> int:
        self.parent.append(parent)
        self.label.append(label)
        return len(self.parent) - 1

    def add_path(self, parent: int, labels: Sequence[int]) -> int:
        v = parent
        for lab in labels:
            v = self.add(v, lab)
        return v

    def depths(self) -> list[int]:
        """Edge count from the root; assumes a valid rooted tree."""
        depth = [-1] * len(self)
        depth[0] = 0
        for v in range(len(self)):
            stack = []
            u = v
            while depth[u] < 0:
                stack.append(u)
                u = self.parent[u]
            d = depth[u]
            for x in reversed(stack):
                d += 1
                depth[x] = d
        return depth

    def depth(self, v: int) -> int:
        d = 0
        while self.parent[v] >= 0:
            v = self.parent[v]
            d += 1
        return d

    def path(self, v: int) -> list[int]:
        out = [v]
        while self.parent[v] >= 0:
            v = self.parent[v]
            out.append(v)
        return out[::-1]

    def height(self) -> int:
        return max(self.depths())

    def children(self) -> list[list[int]]:
        kids = [[] for _ in range(len(self))]
        for v, p in enumerate(self.parent):
            if p >= 0:
                kids[p].append(v)
        return kids

    def leaves(self) -> list[int]:
        kids = self.children()
        return [v for v in range(len(self)) if not kids[v]]

    def lca(self, u: int, v: int) -> int:
        pu, pv = self.path(u), self.path(v)
        k = 0
        while k < min(len(pu), len(pv)) and pu[k] == pv[k]:
            k += 1
        return pu[k - 1]


@dataclass(frozen=True)
class Tine:
    fork: Fork
    vertex: int

    @property
    def length(self) -> int:
        return self.fork.depth(self.vertex)

    @property
    def label(self) -> int:
        return self.fork.label[self.vertex]


@dataclass(frozen=True)
class ForkCheck:
    ok: bool
    violated: str | None = None
    detail: str = ""

    def __bool__(self):
        return self.ok


def validate_fork(F: Fork, w) -> ForkCheck:
    """Check the fork axioms in a fixed order and report the first failure."""
    w = TriString.coerce(w)
    n = len(F)
    if n == 0 or F.parent[0] != -1:
        return ForkCheck(False, ROOTED_TREE, "vertex 0 must be the root")
    for v in range(1, n):
        p = F.parent[v]
        if not 0 <= p < n or p == v:
            return ForkCheck(False, ROOTED_TREE, f"vertex {v} has parent {p}")
    # every vertex must reach the root without revisiting anything
    state = [0] * n
    state[0] = 2
    for v in range(n):
        trail = []
        u = v
        while state[u] == 0:
            state[u] = 1
            trail.append(u)
            u = F.parent[u]
        if state[u] == 1:
            return ForkCheck(False, ROOTED_TREE, f"cycle through vertex {u}")
        for x in trail:
            state[x] = 2
    if F.label[0] != 0:
        return ForkCheck(False, ROOT_LABEL, f"root label {F.label[0]}")
    codes = w.codes
    for v in range(1, n):
        lab = F.label[v]
        if not 1 <= lab <= len(w) or codes[lab - 1] == EMPTY:
            return ForkCheck(False, LABEL_RANGE, f"vertex {v} label {lab}")
    for v in range(1, n):
        if F.label[v] <= F.label[F.parent[v]]:
            return ForkCheck(False, INCREASING_LABELS, f"vertex {v}")
    honest = w.slots_of(HONEST).tolist()
    owner: dict[int, int] = {}
    for v in range(1, n):
        lab = F.label[v]
        if codes[lab - 1] == HONEST:
            if lab in owner:
                return ForkCheck(False, UNIQUE_HONEST, f"index {lab} labels two vertices")
            owner[lab] = v
    for lab in honest:
        if lab not in owner:
            return ForkCheck(False, UNIQUE_HONEST, f"index {lab} labels no vertex")
    depth = F.depths()
    prev = -1
    for lab in honest:
        d = depth[owner[lab]]
        if d <= prev:
            return ForkCheck(False, DEPTH_MONOTONE, f"honest index {lab} at depth {d}")
        prev = d
    return ForkCheck(True)


def _honest_labels(F: Fork, w: TriString) -> list[bool]:
    return [v > 0 and w.codes[F.label[v] - 1] == HONEST for v in range(len(F))]


def is_closed(F: Fork, w) -> bool:
    w = TriString.coerce(w)
    honest = _honest_labels(F, w)
    if len(F) == 1:
        return True
    return all(honest[v] for v in F.leaves())


def closure(F: Fork, w) -> Fork:
    """Drop every vertex with no honest vertex at or below it (root kept)."""
    w = TriString.coerce(w)
    honest = _honest_labels(F, w)
    keep = [False] * len(F)
    keep[0] = True
    for v in range(len(F)):
        if honest[v]:
            u = v
            while u >= 0 and not keep[u]:
                keep[u] = True
                u = F.parent[u]
    index = {}
    out = Fork()
    index[0] = 0
    order = sorted((v for v in range(1, len(F)) if keep[v]), key=F.depth)
    for v in order:
        index[v] = out.add(index[F.parent[v]], F.label[v])
    return out


@dataclass(frozen=True)
class TineMetrics:
    gap: int
    reserve: int
    reach: int


def tine_metrics(F: Fork, w, vertex: int) -> TineMetrics:
    w = TriString.coerce(w)
    if not is_closed(F, w):
        raise ValueError("tine metrics are defined on closed forks only")
    depths = F.depths()
    gap = max(depths) - depths[vertex]
    reserve = w.n1(F.label[vertex] + 1, len(w))
    return TineMetrics(gap, reserve, reserve - gap)


def disjoint(F: Fork, u: int, v: int, s: int, strict: bool = False) -> bool:
    """Tines ending at ``u`` and ``v`` share no vertex labelled ``>= s``
    (``> s`` with ``strict``)."""
    lab = F.label[F.lca(u, v)]
    return lab <= s if strict else lab < s


def fork_reach(F: Fork, w) -> int:
    w = TriString.coerce(w)
    return max(tine_metrics(F, w, v).reach for v in range(len(F)))


def fork_margin(F: Fork, w, s: int, strict: bool = False) -> int:
    w = TriString.coerce(w)
    reach = [tine_metrics(F, w, v).reach for v in range(len(F))]
    best = None
    for u in range(len(F)):
        for v in range(u, len(F)):
            if disjoint(F, u, v, s, strict):
                m = min(reach[u], reach[v])
                best = m if best is None else max(best, m)
    return best


# -- recursions -----------------------------------------------------------

def reach_step(reach: int, symbol: int) -> int:
    if symbol == ADVERSARIAL:
        return reach + 1
    if symbol == HONEST:
        return max(reach - 1, 0)
    return reach


def margin_step(reach: int, margin: int, symbol: int) -> int:
    """Margin update at a position at or after the reference slot, given the
    reach and margin of the previous prefix."""
    if symbol == ADVERSARIAL:
        return margin + 1
    if symbol == HONEST:
        if reach > margin == 0:
            return 0
        return margin - 1
    return margin


MarginStep = Callable[[int, int, int], int]


def reach_recursion(w) -> list[int]:
    """``Reach(w[1:i])`` for ``i = 1..|w|``."""
    w = TriString.coerce(w)
    r = 0
    out = []
    for c in w.codes.tolist():
        r = reach_step(r, c)
        out.append(r)
    return out


def margin_recursion(w, s: int, step: MarginStep = margin_step) -> list[int]:
    """``Margin_s(w[1:i])`` for ``i = 1..|w|``."""
    if s < 1:
        raise ValueError("reference slot must be at least 1")
    w = TriString.coerce(w)
    r = m = 0
    out = []
    for i, c in enumerate(w.codes.tolist(), start=1):
        m = step(r, m, c) if i >= s else reach_step(r, c)
        r = reach_step(r, c)
        out.append(m)
    return out


def reach(w) -> int:
    trace = reach_recursion(w)
    return trace[-1] if trace else 0


def margin(w, s: int, step: MarginStep = margin_step) -> int:
    trace = margin_recursion(w, s, step)
    return trace[-1] if trace else 0


def reach_series(w) -> np.ndarray:
    """Reach of every prefix, index ``i`` holding ``Reach(w[1:i])`` (``i = 0..|w|``)."""
    return np.array([0] + reach_recursion(w), dtype=np.int64)


def margin_series(w, s: int) -> np.ndarray:
    return np.array([0] + margin_recursion(w, s), dtype=np.int64)


def observer_transform(w, l: int) -> TriString:
    """Replace every 0 after position ``l`` by an empty slot."""
    w = TriString.coerce(w)
    if not 0 <= l <= len(w):
        raise ValueError(f"l={l} outside 0..{len(w)}")
    codes = w.codes.copy()
    tail = codes[l:]
    tail[tail == HONEST] = EMPTY
    return TriString(codes)


def balanced_fork_exists(w, s: int, l: int) -> bool:
    """Whether some fork has two ``s``-disjoint ``l``-viable tines."""
    w = TriString.coerce(w)
    return margin(observer_transform(w, l), s) >= 0


def advantage(w, s: int, k: int, f: float, mu: float) -> float:
    """Adversarial advantage over the window after ``s`` used for chain quality:
    ``N_1(w[s+1:]) - N_0(w[s+1:]) + k f mu + Reach(w[1:s])``."""
    w = TriString.coerce(w)
    return w.n1(s + 1) - w.n0(s + 1) + k * f * mu + reach(w.prefix(s))
