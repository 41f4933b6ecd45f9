"""Slot leader election.

Each slot independently draws ``(honest_count, adversarial)`` from a joint
law.  Under the ``iid`` model the honest leaders are distinct parties picked
uniformly from a finite population and may lead again later.  Under the
``one_time`` model honest leaders are fresh miners taken in index order,
each elected at most once; a separate block of observer ids is never elected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import ConfigError

MODELS = ("iid", "one_time")
ADVERSARY = -1


@dataclass(frozen=True)
class LeaderConfig:
    """``joint_law`` lists ``(honest_count, adversarial, probability)`` triples."""

    joint_law: tuple[tuple[int, int, float], ...]
    model: str = "iid"
    honest_population: int = 5
    observers: int = 0

    def __post_init__(self):
        law = tuple((int(n), int(a), float(p)) for n, a, p in self.joint_law)
        object.__setattr__(self, "joint_law", law)
        if self.model not in MODELS:
            raise ConfigError(f"unknown leader model {self.model!r}")
        if not law:
            raise ConfigError("leader law is empty")
        for n, a, p in law:
            if n < 0 or a not in (0, 1):
                raise ConfigError(f"bad leader outcome ({n}, {a})")
            if p < 0 or not math.isfinite(p):
                raise ConfigError("leader probabilities must be non-negative")
        total = math.fsum(p for _, _, p in law)
        if abs(total - 1.0) > 1e-9:
            raise ConfigError(f"leader probabilities sum to {total!r}, expected 1")
        if self.model == "iid":
            if self.honest_population < 1:
                raise ConfigError("the i.i.d. model needs at least one honest party")
            if max(n for n, _, p in law if p > 0) > self.honest_population:
                raise ConfigError("more honest leaders per slot than honest parties")
        if self.observers < 0:
            raise ConfigError("observer count must be non-negative")

    @property
    def first_miner(self) -> int:
        """Identity of the first one-time miner (observers come first)."""
        return self.observers

    def tracked_parties(self) -> list[int]:
        """Honest parties whose state persists across slots."""
        if self.model == "iid":
            return list(range(self.honest_population))
        return list(range(self.observers))


def simple_law(f: float, alpha: float) -> tuple[tuple[int, int, float], ...]:
    """A slot is non-empty w.p. ``f``; then it has one honest leader w.p.
    ``alpha`` and one adversarial leader otherwise."""
    if not (0.0 <= f <= 1.0 and 0.0 <= alpha <= 1.0):
        raise ConfigError("f and alpha must lie in [0, 1]")
    law = [(0, 0, 1.0 - f), (1, 0, f * alpha), (0, 1, f * (1.0 - alpha))]
    return tuple(x for x in law if x[2] > 0)


def bernoulli_law(parties: int, honest_rate: float, adversarial_rate: float):
    """Each of ``parties`` honest parties leads w.p. ``honest_rate``; the
    adversary leads w.p. ``adversarial_rate``, independently."""
    from math import comb

    law = []
    for n in range(parties + 1):
        pn = comb(parties, n) * honest_rate ** n * (1 - honest_rate) ** (parties - n)
        for a, pa in ((0, 1 - adversarial_rate), (1, adversarial_rate)):
            if pn * pa > 0:
                law.append((n, a, pn * pa))
    return tuple(law)


def params(cfg: LeaderConfig) -> tuple[float, float]:
    """Return ``(f, alpha)``: the non-empty probability and the probability
    that a non-empty slot is uniquely honest."""
    law = [(n, a, p) for n, a, p in cfg.joint_law if p > 0]
    if not law:
        raise ConfigError("leader law has empty support")
    f = math.fsum(p for n, a, p in law if n + a > 0)
    if f <= 0:
        raise ConfigError("no slot is ever non-empty")
    unique = math.fsum(p for n, a, p in law if n == 1 and a == 0)
    return f, unique / f


@dataclass(frozen=True)
class SlotLeaders:
    slot: int
    honest: tuple[int, ...]
    adversarial: bool

    @property
    def empty(self) -> bool:
        return not self.honest and not self.adversarial


@dataclass
class ElectionRecord:
    """Election outcomes for slots ``1..horizon`` (index 0 unused)."""

    honest_count: np.ndarray
    adversarial: np.ndarray
    honest_ids: dict[int, tuple[int, ...]] = field(default_factory=dict)

    @property
    def horizon(self) -> int:
        return len(self.honest_count) - 1

    def at(self, slot: int) -> SlotLeaders:
        return SlotLeaders(slot, self.honest_ids.get(slot, ()), bool(self.adversarial[slot]))

    def nonempty_slots(self) -> np.ndarray:
        mask = (self.honest_count > 0) | self.adversarial
        mask[0] = False
        return np.flatnonzero(mask)


def _outcome_arrays(cfg: LeaderConfig):
    law = [(n, a, p) for n, a, p in cfg.joint_law if p > 0]
    ns = np.array([n for n, _, _ in law], dtype=np.int64)
    As = np.array([a for _, a, _ in law], dtype=bool)
    ps = np.array([p for _, _, p in law], dtype=np.float64)
    return ns, As, ps / ps.sum()


def draw_slots(cfg: LeaderConfig, horizon: int, rng: np.random.Generator,
               first_miner: int | None = None) -> ElectionRecord:
    """Draw slots ``1..horizon``."""
    ns, As, ps = _outcome_arrays(cfg)
    idx = rng.choice(len(ps), size=horizon, p=ps) if len(ps) > 1 else np.zeros(horizon, dtype=np.int64)
    honest_count = np.zeros(horizon + 1, dtype=np.int64)
    adversarial = np.zeros(horizon + 1, dtype=bool)
    honest_count[1:] = ns[idx]
    adversarial[1:] = As[idx]
    ids: dict[int, tuple[int, ...]] = {}
    slots = np.flatnonzero(honest_count)
    if cfg.model == "iid":
        pop = cfg.honest_population
        singles = slots[honest_count[slots] == 1]
        picks = rng.integers(0, pop, size=len(singles))
        for s, h in zip(singles.tolist(), picks.tolist()):
            ids[s] = (h,)
        for s in slots[honest_count[slots] > 1].tolist():
            ids[s] = tuple(sorted(rng.choice(pop, size=int(honest_count[s]), replace=False).tolist()))
        ids = dict(sorted(ids.items()))
    else:
        nxt = cfg.first_miner if first_miner is None else first_miner
        for s in slots.tolist():
            c = int(honest_count[s])
            ids[s] = tuple(range(nxt, nxt + c))
            nxt += c
    return ElectionRecord(honest_count, adversarial, ids)


def draw_slot(cfg: LeaderConfig, slot: int, rng: np.random.Generator,
              next_miner: int | None = None) -> SlotLeaders:
    """Draw a single slot.  For the one-time model pass the next unused miner id."""
    ns, As, ps = _outcome_arrays(cfg)
    k = int(rng.choice(len(ps), p=ps))
    n, a = int(ns[k]), bool(As[k])
    if cfg.model == "iid":
        honest = tuple(sorted(rng.choice(cfg.honest_population, size=n, replace=False).tolist()))
    else:
        start = cfg.first_miner if next_miner is None else next_miner
        honest = tuple(range(start, start + n))
    return SlotLeaders(slot, honest, a)


def from_config(cfg: Mapping) -> LeaderConfig:
    try:
        if "law" in cfg:
            law = tuple(tuple(x) for x in cfg["law"])
        else:
            law = simple_law(float(cfg["f"]), float(cfg["alpha"]))
    except KeyError as exc:
        raise ConfigError(f"leader config is missing {exc}") from None
    return LeaderConfig(
        joint_law=law,
        model=cfg.get("model", "iid"),
        honest_population=int(cfg.get("honest_population", 5)),
        observers=int(cfg.get("observers", 0)),
    )
