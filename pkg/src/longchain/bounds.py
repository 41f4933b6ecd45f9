"""Closed-form security bounds and threshold curves.

Conventions: the renewal gap ``G`` is geometric on {1, 2, ...} with
``P(G = g) = f (1 - f)^(g - 1)``; delays live on {0, 1, ...}.  Bound values
are kept raw (they can exceed 1) and clamped only when presented.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .delay_model import DelayDistribution
from .errors import DomainError

SERIES_TAIL = 1e-12


@dataclass(frozen=True)
class SecurityParams:
    f: float
    alpha: float
    # P(delay < G) and P(delay <= G)
    prob_heard_strict: float
    q: float

    @property
    def p(self) -> float:
        return self.alpha * self.prob_heard_strict

    @property
    def eps(self) -> float:
        return 2.0 * self.p - 1.0

    @property
    def applicable(self) -> bool:
        """Whether the honest-majority condition needed by the bounds holds."""
        return self.eps > 0


def _gap_series(f: float, dist: DelayDistribution):
    # number of terms until the geometric tail drops below SERIES_TAIL
    if f >= 1.0:
        m = 1
    else:
        m = int(math.ceil(math.log(SERIES_TAIL) / math.log1p(-f))) + 1
    g = np.arange(1, m + 1, dtype=np.float64)
    weights = f * np.exp((g - 1) * math.log1p(-f)) if f < 1.0 else np.ones(1)
    cdf = dist.cdf_array(m + 1)
    # mass of G beyond m is folded in at the last cdf value
    rest = 0.0 if f >= 1.0 else math.exp(m * math.log1p(-f))
    less = math.fsum(weights * cdf[:m]) + rest * cdf[m]      # P(delay <= g - 1)
    at_most = math.fsum(weights * cdf[1:m + 1]) + rest * cdf[m]
    return less, at_most


def compute_params(f: float, alpha: float, dist: DelayDistribution) -> SecurityParams:
    if not 0.0 < f <= 1.0:
        raise DomainError(f"f={f} outside (0, 1]")
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"alpha={alpha} outside (0, 1]")
    less, at_most = _gap_series(f, dist)
    return SecurityParams(float(f), float(alpha), float(less), float(at_most))


def _require_eps(params: SecurityParams):
    if not params.applicable:
        raise DomainError(f"eps={params.eps:.6g} <= 0: bounds inapplicable")


def _unheard_prefactor(eps: float) -> float:
    return 2.0 / -math.expm1(math.log(0.5) * eps / 2.0)


def clamp(x: float) -> float:
    return min(1.0, max(0.0, x))


@dataclass(frozen=True)
class BoundTerms:
    """One intensive bound: a margin-type term plus a per-party unheard term."""

    main: float
    unheard: float
    parties: int

    @property
    def total(self) -> float:
        return self.main + self.parties * self.unheard

    @property
    def clamped(self) -> float:
        return clamp(self.total)


def settlement_bound(params: SecurityParams, k: int, parties: int) -> BoundTerms:
    _require_eps(params)
    e, kf = params.eps, k * params.f
    main = math.exp(-kf * e ** 3 / 12.0) + 3.0 * math.exp(-kf * e ** 2 / 32.0)
    unheard = _unheard_prefactor(e) * math.exp(-kf * e / 16.0)
    return BoundTerms(main, unheard, parties)


def chain_quality_bound(params: SecurityParams, k: int, mu: float, parties: int) -> BoundTerms:
    _require_eps(params)
    e, kf = params.eps, k * params.f
    if not mu < e:
        raise DomainError(f"mu={mu} must be below eps={e:.6g}")
    main = 4.0 * math.exp(-kf * (e - mu) ** 2 / 48.0)
    unheard = _unheard_prefactor(e) * math.exp(-kf * (e - mu) / 8.0)
    return BoundTerms(main, unheard, parties)


def theorem1_settlement_bound(params: SecurityParams, k: int, parties: int):
    """``(p_settlement, p_unheard, total)`` with raw values."""
    b = settlement_bound(params, k, parties)
    return b.main, b.unheard, b.total


def theorem1_cq_bound(params: SecurityParams, k: int, mu: float, parties: int):
    b = chain_quality_bound(params, k, mu, parties)
    return b.main, b.unheard, b.total


@dataclass(frozen=True)
class BoundsReport:
    k: int
    parties: int
    mu: float
    horizon: int
    p_settlement: float
    p_unheard: float
    p_cq: float
    p_unheard_tilde: float

    @property
    def settlement_total(self) -> float:
        return self.p_settlement + self.parties * self.p_unheard

    @property
    def cq_total(self) -> float:
        return self.p_cq + self.parties * self.p_unheard_tilde

    @property
    def common_prefix_total(self) -> float:
        return self.horizon * self.settlement_total

    @property
    def extensive_cq_total(self) -> float:
        return self.horizon * self.cq_total

    def rows(self):
        """``(name, raw, clamped)`` triples."""
        for name in ("p_settlement", "p_unheard", "settlement_total", "p_cq", "p_unheard_tilde",
                     "cq_total", "common_prefix_total", "extensive_cq_total"):
            raw = getattr(self, name)
            yield name, raw, clamp(raw)


def corollary_bounds(params: SecurityParams, horizon: int, k: int, parties: int, mu: float) -> BoundsReport:
    s = settlement_bound(params, k, parties)
    c = chain_quality_bound(params, k, mu, parties)
    return BoundsReport(k, parties, mu, horizon, s.main, s.unheard, c.main, c.unheard)


def k_for_target(params: SecurityParams, target: float, parties: int, mu: float | None = None) -> int:
    """Smallest ``k`` whose settlement total (chain-quality total when ``mu``
    is given) is at most ``target``."""
    def total(k):
        if mu is None:
            return settlement_bound(params, k, parties).total
        return chain_quality_bound(params, k, mu, parties).total

    hi = 1
    while total(hi) > target:
        hi *= 2
        if hi > 1 << 40:
            raise DomainError("target not reachable")
    lo = hi // 2
    while lo + 1 < hi:
        mid = (lo + hi) // 2
        if total(mid) > target:
            lo = mid
        else:
            hi = mid
    return hi


# -- constants and intermediate bounds used inside the proofs --------------

@dataclass(frozen=True)
class SettlementConstants:
    c: float
    r: float
    k_prime: int


@dataclass(frozen=True)
class ChainQualityConstants:
    gamma: float
    c: float
    r: float
    k_prime: int


def settlement_constants(params: SecurityParams, k: int) -> SettlementConstants:
    return SettlementConstants(params.eps / 2.0, 0.75, math.ceil(3 * k * params.f / 4))


def chain_quality_constants(params: SecurityParams, k: int, mu: float) -> ChainQualityConstants:
    e = params.eps
    gamma = (e - mu) / 4.0
    c = e - gamma
    cr = e - 2.0 * gamma
    r = cr / c
    return ChainQualityConstants(gamma, c, r, math.ceil(r * k * params.f))


def settlement_sufficient(params: SecurityParams, k: int) -> tuple[float, float]:
    """The sharper pair of expressions the settlement bound is derived from,
    evaluated with the actual ``q`` and the integer ``k'``."""
    _require_eps(params)
    e, q, kf = params.eps, params.q, k * params.f
    cst = settlement_constants(params, k)
    kp, c = cst.k_prime, cst.c
    main = math.exp(-kf / 32.0) + math.exp(-kp * e ** 3 / 6.0) + 2.0 * math.exp(-kp * (e - c) ** 2 / 6.0)
    unheard = unheard_line_bound(q, 0.0, c) * math.exp(-kp * c * q / 2.0)
    return main, unheard


def chain_quality_sufficient(params: SecurityParams, k: int, mu: float) -> tuple[float, float]:
    _require_eps(params)
    e, q, kf = params.eps, params.q, k * params.f
    cst = chain_quality_constants(params, k, mu)
    g, c, r, kp = cst.gamma, cst.c, cst.r, cst.k_prime
    main = (time_scale_bound(k, params.f, r) + random_walk_bound(kp, e, c)
            + math.exp(-2.0 * kf * e * g))
    unheard = unheard_line_bound(q, kf * (c * r - g - mu), c)
    return main, unheard


# -- individual tail bounds --------------------------------------------------

def time_scale_bound(k: int, f: float, r: float) -> float:
    """Bound on the chance that fewer than ``ceil(r k f)`` renewals fit in ``k`` slots."""
    return math.exp(-k * f * (1.0 - r) ** 2 / 2.0)


def reach_tail_bound(p: float, a: float) -> float:
    return ((1.0 - p) / p) ** a


def random_walk_bound(k: float, eps: float, c: float) -> float:
    """Bound on a walk with steps +1 w.p. (1-eps)/2, -1 otherwise ever
    reaching ``-c j`` at some ``j >= k``."""
    return 2.0 * math.exp(-k * (eps - c) ** 2 / 3.0)


def margin_tail_bound(k: float, eps: float) -> float:
    return math.exp(-k * eps ** 3 / 3.0)


def unheard_tail_bound(q: float, a: float) -> float:
    return (1.0 - q) ** a


def unheard_line_bound(q: float, B: float, c: float) -> float:
    """Bound on compressed unheard ever reaching ``B + c (j - k')`` for ``j >= k'``."""
    if q >= 1.0:
        return 0.0
    return math.exp(-B * q) / ((1.0 - q) * -math.expm1(c * math.log1p(-q)))


# -- security threshold curves -----------------------------------------------

def synchronous_threshold(x: float) -> float:
    """Largest adversarial fraction tolerated with constant delay, as a
    function of ``x = f * delay``: smaller root of ``x b^2 - (2 + x) b + 1``."""
    if x < 0:
        raise DomainError("f * delay must be non-negative")
    # rationalised root; equals 1/2 at x = 0 without a special case
    return 2.0 / ((2.0 + x) + math.sqrt((2.0 + x) ** 2 - 4.0 * x))


def exponential_boundary(x: float) -> float:
    """Adversarial fraction tolerated with exponential delays of mean
    ``eta``, as a function of ``x = f * eta``; zero once ``x > 1``."""
    if x < 0:
        raise DomainError("f * eta must be non-negative")
    if x > 1.0:
        return 0.0
    return (1.0 - x) / 2.0


FIGURE1_COLUMNS = ("f_eta", "beta_random_exp", "beta_const_eta", "beta_const_4eta", "beta_const_16eta")


def figure1_dataset(grid=None) -> list[tuple[float, float, float, float, float]]:
    if grid is None:
        grid = [round(0.01 * i, 2) for i in range(101)]
    rows = []
    for x in grid:
        if not 0.0 <= x <= 1.0:
            raise DomainError("grid must lie within [0, 1]")
        rows.append((x, exponential_boundary(x), synchronous_threshold(x),
                     synchronous_threshold(4 * x), synchronous_threshold(16 * x)))
    return rows
