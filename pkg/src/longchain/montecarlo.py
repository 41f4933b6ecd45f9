"""Vectorised samplers for the distributional checks.

``renewal_steps`` builds many independent characteristic strings at once,
one renewal (non-empty slot) per step, using the same special-slot rule as
:mod:`longchain.charstring`: a uniquely honest slot is special when the
refreshed residual delay from the previous special slot is shorter than the
gap since the previous non-empty slot.  Each step also reports when one
fixed observer hears the new slot's block.  Consumers fold steps into
statistics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .charstring import ADVERSARIAL, HONEST, VIRTUAL_SENDER
from .delay_model import NEVER, DelayDistribution, residuals_array
from .streams import stream_key_array

OBSERVER = 0


@dataclass(frozen=True)
class RenewalConfig:
    f: float
    alpha: float
    delay: DelayDistribution
    parties: int = 5
    negative_cutoff: int = 10_000


@dataclass
class RenewalStep:
    index: int            # renewal number, starting at 1
    slot: np.ndarray      # T_j per sample
    gap: np.ndarray       # T_j - T_{j-1}
    uniquely_honest: np.ndarray
    special: np.ndarray
    leader: np.ndarray
    heard: np.ndarray     # slot the observer has the block, inf if never


@dataclass
class Extension:
    last_nonempty: np.ndarray
    last_special: np.ndarray
    truncated: np.ndarray


def negative_extension_batch(rng: np.random.Generator, cfg: RenewalConfig, n: int) -> Extension:
    """Vectorised counterpart of :func:`longchain.charstring.negative_time_extension`."""
    t0 = 1 - rng.geometric(cfg.f, n)
    t = t0.copy()
    last = t0.copy()
    open_ = np.ones(n, dtype=bool)
    for _ in range(cfg.negative_cutoff):
        idx = np.flatnonzero(open_)
        if not len(idx):
            break
        gap = rng.geometric(cfg.f, len(idx))
        less = _prob_less(cfg.delay, gap)
        hit = rng.random(len(idx)) < cfg.alpha * less
        last[idx[hit]] = t[idx[hit]]
        open_[idx[hit]] = False
        t[idx[~hit]] -= gap[~hit]
    return Extension(t0, np.where(open_, t0, last), open_.copy())


def _prob_less(dist: DelayDistribution, gaps: np.ndarray) -> np.ndarray:
    top = int(gaps.max()) if len(gaps) else 1
    cdf = dist.cdf_array(top)
    return cdf[gaps - 1]


def renewal_steps(cfg: RenewalConfig, n: int, horizon: int, seed: int):
    """Yield :class:`RenewalStep` until every sample has passed ``horizon``."""
    rng = np.random.default_rng(np.random.SeedSequence([seed & ((1 << 64) - 1), 17]))
    ext = negative_extension_batch(rng, cfg, n)
    rates = cfg.delay.failure_rate()
    ids = np.arange(n, dtype=np.int64)
    t_prev = ext.last_nonempty.copy()
    t_star = ext.last_special.copy()
    h_star = np.full(n, VIRTUAL_SENDER, dtype=np.int64)
    j = 0
    while (t_prev <= horizon).any():
        j += 1
        if j == 1:
            t = rng.geometric(cfg.f, n).astype(np.int64)
        else:
            t = t_prev + rng.geometric(cfg.f, n)
        gap = t - t_prev
        uh = rng.random(n) < cfg.alpha
        h = rng.integers(0, cfg.parties, n)
        keys = stream_key_array(seed, ids, t_star, h_star, h)
        r = residuals_array(rates, keys, t_prev - t_star)
        special = uh & (r < gap)
        d = residuals_array(rates, stream_key_array(seed, ids, t, h, OBSERVER), 0)
        heard = np.where(d >= NEVER, np.inf, t + d.astype(np.float64))
        yield RenewalStep(j, t, gap, uh, special, h, heard)
        t_star = np.where(special, t, t_star)
        h_star = np.where(special, h, h_star)
        t_prev = t


def step_keys(seed: int, sample: int):
    """Key function matching ``renewal_steps`` for one sample, for cross-checks."""
    from .streams import stream_key

    return lambda a, b, c: stream_key(seed, sample, a, b, c)


# -- consumers -------------------------------------------------------------

class ReachAt:
    """Reach of ``CharString[1:slot]`` per sample."""

    def __init__(self, n: int, slot: int):
        self.slot = slot
        self.value = np.zeros(n, dtype=np.int64)

    def update(self, st: RenewalStep):
        live = st.slot <= self.slot
        up = live & ~st.special
        down = live & st.special
        self.value[up] += 1
        self.value[down] = np.maximum(self.value[down] - 1, 0)


class GapLabels:
    """Counts of renewals and of 0-labels per gap length, up to ``max_gap``.

    Labels within one sample share the delay of the latest special block and
    are correlated, so counts are also kept per sample for a clustered
    standard error.
    """

    def __init__(self, n: int, horizon: int, max_gap: int):
        self.horizon = horizon
        self.sample_total = np.zeros((n, max_gap + 1), dtype=np.int64)
        self.sample_zeros = np.zeros((n, max_gap + 1), dtype=np.int64)

    @property
    def total(self) -> np.ndarray:
        return self.sample_total.sum(axis=0)

    @property
    def zeros(self) -> np.ndarray:
        return self.sample_zeros.sum(axis=0)

    def update(self, st: RenewalStep):
        live = np.flatnonzero((st.slot <= self.horizon) & (st.gap < self.sample_total.shape[1]))
        g = st.gap[live]
        # one observation per sample per step, so the index pairs are distinct
        self.sample_total[live, g] += 1
        z = st.special[live]
        self.sample_zeros[live[z], g[z]] += 1

    def clustered_se(self, gap: int, reference: float) -> float:
        """Standard error of the pooled 0-frequency at ``gap`` when the true
        probability is ``reference``, treating samples as independent clusters."""
        t = self.sample_total[:, gap].astype(np.float64)
        z = self.sample_zeros[:, gap].astype(np.float64)
        return float(np.sqrt(np.sum((z - reference * t) ** 2)) / t.sum())


class CompressedLabels:
    """Labels of the first ``count`` renewals strictly after slot ``s``."""

    def __init__(self, n: int, s: int, count: int):
        self.s = s
        self.labels = np.full((n, count), -1, dtype=np.int8)
        self.seen = np.zeros(n, dtype=np.int64)

    def update(self, st: RenewalStep):
        after = (st.slot > self.s) & (self.seen < self.labels.shape[1])
        idx = np.flatnonzero(after)
        self.labels[idx, self.seen[idx]] = np.where(st.special[idx], HONEST, ADVERSARIAL)
        self.seen[idx] += 1


class UnheardTracker:
    """Ring buffer of heard times for each sample's most recent special slots.

    ``unheard_at(t)`` counts buffered special slots after the latest one heard
    by ``t``.  A sample whose whole buffer is unheard reports at least the
    buffer size, which is exact for any threshold below it.
    """

    def __init__(self, n: int, size: int = 48):
        self.size = size
        self.heard = np.full((n, size), np.inf)
        self.count = np.zeros(n, dtype=np.int64)
        self._pos = np.arange(size, dtype=np.int64)

    def add(self, st: RenewalStep, mask: np.ndarray | None = None):
        new = st.special if mask is None else st.special & mask
        idx = np.flatnonzero(new)
        self.heard[idx, self.count[idx] % self.size] = st.heard[idx]
        self.count[idx] += 1

    def unheard_at(self, t) -> np.ndarray:
        t = np.broadcast_to(np.asarray(t, dtype=np.float64), self.count.shape)
        last = (self.count - 1)[:, None]
        absolute = last - ((last - self._pos[None, :]) % self.size)
        valid = absolute >= np.maximum(0, self.count[:, None] - self.size)
        heard = valid & (self.heard <= t[:, None])
        latest = np.where(heard, absolute, -1).max(axis=1)
        return self.count - 1 - latest


def unheard_at_slot(cfg: RenewalConfig, n: int, slot: int, seed: int, size: int = 48) -> np.ndarray:
    """``Unheard_h[slot]`` for the observer, per sample."""
    tr = UnheardTracker(n, size)
    for st in renewal_steps(cfg, n, slot, seed):
        tr.add(st, st.slot <= slot)
    return tr.unheard_at(slot)


def compressed_unheard_path(cfg: RenewalConfig, n: int, s: int, last_j: int, seed: int,
                            size: int = 48) -> np.ndarray:
    """``CompressedUnheard_{h,s}[j]`` for ``j = 1..last_j``, shape ``(n, last_j)``.

    Runs until every sample has ``last_j`` renewals after ``s``.
    """
    tr = UnheardTracker(n, size)
    out = np.zeros((n, last_j), dtype=np.int64)
    seen = np.zeros(n, dtype=np.int64)
    rng_horizon = np.iinfo(np.int64).max // 8
    for st in renewal_steps(cfg, n, rng_horizon, seed):
        tr.add(st)
        after = (st.slot > s) & (seen < last_j)
        if after.any():
            idx = np.flatnonzero(after)
            u = tr.unheard_at(st.slot)
            out[idx, seen[idx]] = u[idx]
            seen[idx] += 1
        if (seen >= last_j).all():
            break
    return out


def walk_excursions(rng: np.random.Generator, n: int, eps: float, c: float, k: int, horizon: int,
                    chunk: int = 500) -> np.ndarray:
    """Per walk, whether ``W[j] >= -c j`` for some ``k <= j <= horizon``.

    Steps are +1 with probability ``(1 - eps) / 2`` and -1 otherwise.
    """
    up = (1.0 - eps) / 2.0
    pos = np.zeros(n, dtype=np.int64)
    hit = np.zeros(n, dtype=bool)
    done = 0
    while done < horizon:
        m = min(chunk, horizon - done)
        steps = np.where(rng.random((m, n)) < up, 1, -1).astype(np.int64)
        path = pos[None, :] + np.cumsum(steps, axis=0)
        j = np.arange(done + 1, done + m + 1)[:, None]
        ok = j >= k
        if ok.any():
            hit |= ((path >= -c * j) & ok).any(axis=0)
        pos = path[-1]
        done += m
    return hit
