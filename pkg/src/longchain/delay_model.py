"""Message delay distributions and their failure-rate representation.

A delay is a value in {0, 1, 2, ...} or infinity.  Each delay is realised
from a stream of uniforms ``U[0], U[1], ...`` as the first index ``i`` with
``U[i] <= rate[i]``, where ``rate`` is the failure rate of the law.  Reading
the same stream from an offset ``d`` gives the refreshed residual used to
decouple a delay from what was already observed about it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import ConfigError
from .streams import uniform, uniform_array

INFINITE = math.inf
# integer stand-in for an infinite delay inside numpy arrays
NEVER = np.iinfo(np.int64).max // 4

_SUM_TOL = 1e-12


@dataclass(frozen=True)
class DelayDistribution:
    """Law of a single message delay.

    ``head[i]`` is ``P(delay = i)`` for ``i < len(head)``.  When
    ``geometric_tail`` is set, the finite mass not in ``head`` continues
    geometrically from ``len(head)`` with that success probability.
    """

    head: tuple[float, ...] = ()
    geometric_tail: float | None = None
    mass_at_infinity: float = 0.0
    label: str = "table"
    _rates: "FailureRateView | None" = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        head = tuple(float(x) for x in self.head)
        object.__setattr__(self, "head", head)
        if any(x < 0 or not math.isfinite(x) for x in head):
            raise ConfigError("delay probabilities must be finite and non-negative")
        if not 0.0 <= self.mass_at_infinity <= 1.0:
            raise ConfigError("mass at infinity must lie in [0, 1]")
        total = math.fsum(head) + self.mass_at_infinity
        if self.geometric_tail is None:
            if abs(total - 1.0) > _SUM_TOL:
                raise ConfigError(f"delay probabilities sum to {total!r}, expected 1")
        else:
            q = self.geometric_tail
            if not 0.0 < q <= 1.0:
                raise ConfigError("geometric tail parameter must lie in (0, 1]")
            if self.mass_at_infinity > 0:
                raise ConfigError("a geometric tail cannot be mixed with an infinite delay")
            if total > 1.0 + _SUM_TOL:
                raise ConfigError(f"delay probabilities sum to {total!r} > 1")
        object.__setattr__(self, "_rates", FailureRateView(self))

    @property
    def tail_mass(self) -> float:
        """Finite mass carried by the geometric tail."""
        if self.geometric_tail is None:
            return 0.0
        return max(0.0, 1.0 - math.fsum(self.head) - self.mass_at_infinity)

    def pmf(self, i: int) -> float:
        n = len(self.head)
        if i < 0:
            return 0.0
        if i < n:
            return self.head[i]
        if self.geometric_tail is None:
            return 0.0
        q = self.geometric_tail
        return self.tail_mass * q * (1.0 - q) ** (i - n)

    def survival(self, i: int) -> float:
        """P(delay >= i), counting the mass at infinity."""
        n = len(self.head)
        if i <= 0:
            return 1.0
        if i < n:
            rest = math.fsum(self.head[i:])
            return rest + self.tail_mass + self.mass_at_infinity
        if self.geometric_tail is None:
            return self.mass_at_infinity
        return self.tail_mass * (1.0 - self.geometric_tail) ** (i - n)

    def cdf(self, i: int) -> float:
        """P(delay <= i) for a finite ``i``."""
        return max(0.0, 1.0 - self.survival(i + 1))

    def cdf_array(self, m: int) -> np.ndarray:
        """``P(delay <= i)`` for ``i = 0..m-1``."""
        out = np.empty(m, dtype=np.float64)
        n = min(len(self.head), m)
        head_cdf = np.cumsum(np.array(self.head, dtype=np.float64))
        out[:n] = head_cdf[:n]
        if m > n:
            base = float(head_cdf[-1]) if len(self.head) else 0.0
            if self.geometric_tail is None:
                out[n:] = base
            else:
                i = np.arange(n, m, dtype=np.float64)
                q = self.geometric_tail
                out[n:] = base + self.tail_mass * -np.expm1((i - len(self.head) + 1) * np.log1p(-q)) \
                    if q < 1 else base + self.tail_mass
        return np.minimum(out, 1.0)

    def prob_less(self, g: int) -> float:
        """P(delay < g)."""
        return self.cdf(g - 1)

    def mean(self) -> float:
        if self.mass_at_infinity > 0:
            return INFINITE
        total = math.fsum(i * x for i, x in enumerate(self.head))
        if self.geometric_tail is not None:
            n, q = len(self.head), self.geometric_tail
            total += self.tail_mass * (n + (1.0 - q) / q)
        return total

    @property
    def support_end(self) -> int | None:
        """Largest finite value with positive mass, or None for an unbounded law."""
        if self.geometric_tail is not None and self.tail_mass > 0:
            return None
        nz = [i for i, x in enumerate(self.head) if x > 0]
        return nz[-1] if nz else -1

    def failure_rate(self) -> "FailureRateView":
        return self._rates

    def has_nondecreasing_failure_rate(self) -> bool:
        rates = self._rates
        end = rates.stationary_from
        prev = rates[0]
        for i in range(1, end + 1):
            r = rates[i]
            if r < prev - 1e-12:
                return False
            prev = r
        return True

    def to_config(self) -> dict:
        cfg = {"kind": "table", "pmf": list(self.head)}
        if self.geometric_tail is not None:
            cfg["geometric_tail"] = self.geometric_tail
        if self.mass_at_infinity:
            cfg["infinity"] = self.mass_at_infinity
        return cfg


class FailureRateView:
    """Lazily materialised ``rate[i] = P(delay = i | delay >= i)``.

    Beyond ``stationary_from`` the rate is constant (``tail_rate``); a tail
    rate of zero means the remaining mass sits at infinity.
    """

    def __init__(self, dist: DelayDistribution):
        self._dist = dist
        self._cache: list[float] = []
        n = len(dist.head)
        if dist.geometric_tail is not None and dist.tail_mass > 0:
            self.stationary_from = n
            self.tail_rate = dist.geometric_tail
        else:
            end = dist.support_end
            self.stationary_from = end + 1
            self.tail_rate = 0.0 if dist.mass_at_infinity > 0 else 1.0

    def _compute(self, i: int) -> float:
        if i >= self.stationary_from:
            return self.tail_rate
        s = self._dist.survival(i)
        if s <= 0.0:
            return 1.0
        return min(1.0, self._dist.pmf(i) / s)

    def __getitem__(self, i: int) -> float:
        if i < 0:
            raise IndexError(i)
        if i >= self.stationary_from:
            return self.tail_rate
        while len(self._cache) <= i:
            self._cache.append(self._compute(len(self._cache)))
        return self._cache[i]

    def array(self, n: int) -> np.ndarray:
        return np.array([self[i] for i in range(n)], dtype=np.float64)


class KeyedStream:
    """Uniform stream addressed by a 64-bit key."""

    __slots__ = ("key",)

    def __init__(self, key: int):
        self.key = key

    def __call__(self, position: int) -> float:
        return uniform(self.key, position)


class FixedStream:
    """Explicit uniforms, mostly for tests; reading past the end is an error."""

    def __init__(self, values: Sequence[float]):
        self.values = list(values)

    def __call__(self, position: int) -> float:
        return self.values[position]


@dataclass(frozen=True)
class InternalRepresentation:
    rates: FailureRateView
    stream: Callable[[int], float]


def failure_rate(dist: DelayDistribution) -> FailureRateView:
    return dist.failure_rate()


def refreshed_residual(rep: InternalRepresentation, d: int):
    """First ``i`` with ``U[i + d] <= rate[i]``; ``INFINITE`` if none exists."""
    rates, stream = rep.rates, rep.stream
    stop, tail = rates.stationary_from, rates.tail_rate
    i = 0
    while True:
        if i >= stop and tail == 0.0:
            return INFINITE
        r = rates[i]
        if r >= 1.0 or stream(i + d) <= r:
            return i
        i += 1


def sample_delay(rep: InternalRepresentation):
    return refreshed_residual(rep, 0)


def residuals_array(rates: FailureRateView, keys: np.ndarray, offsets) -> np.ndarray:
    """Vectorised :func:`refreshed_residual` over many keyed streams.

    Returns int64 with ``NEVER`` standing in for an infinite delay.
    """
    keys = np.atleast_1d(np.asarray(keys))
    offsets = np.broadcast_to(np.asarray(offsets, dtype=np.int64), keys.shape)
    out = np.full(keys.shape, NEVER, dtype=np.int64)
    active = np.arange(keys.size)
    flat_keys, flat_off = keys.reshape(-1), offsets.reshape(-1)
    flat_out = out.reshape(-1)
    i = 0
    while active.size:
        if i >= rates.stationary_from and rates.tail_rate == 0.0:
            break
        r = rates[i]
        if r >= 1.0:
            flat_out[active] = i
            break
        u = uniform_array(flat_keys[active], flat_off[active] + i)
        hit = u <= r
        flat_out[active[hit]] = i
        active = active[~hit]
        i += 1
    return out


def to_array_delay(value) -> int:
    return NEVER if value == INFINITE else int(value)


def constant(c: int) -> DelayDistribution:
    if c < 0:
        raise ConfigError("constant delay must be non-negative")
    return DelayDistribution(head=(0.0,) * c + (1.0,), label=f"constant({c})")


def geometric(q: float) -> DelayDistribution:
    """P(delay = i) = q (1 - q)^i for i >= 0."""
    return DelayDistribution(geometric_tail=q, label=f"geometric({q})")


def discrete_exponential(mean: float, cap: int | None = None) -> DelayDistribution:
    """Floor of an exponential with the given mean, optionally capped.

    With a cap, all mass at or above ``cap`` is moved onto ``cap``.
    """
    if mean <= 0:
        raise ConfigError("exponential mean must be positive")
    q = -math.expm1(-1.0 / mean)
    if cap is None:
        return DelayDistribution(geometric_tail=q, label=f"exponential({mean})")
    if cap < 0:
        raise ConfigError("cap must be non-negative")
    head = [q * (1.0 - q) ** i for i in range(cap)]
    head.append((1.0 - q) ** cap)
    return DelayDistribution(head=tuple(head), label=f"exponential({mean},cap={cap})")


def table(pmf: Sequence[float], mass_at_infinity: float = 0.0) -> DelayDistribution:
    return DelayDistribution(head=tuple(pmf), mass_at_infinity=mass_at_infinity)


def mixture_inf(base: DelayDistribution, weight: float) -> DelayDistribution:
    """``base`` with probability ``weight``, infinity otherwise."""
    if not 0.0 <= weight <= 1.0:
        raise ConfigError("mixture weight must lie in [0, 1]")
    if base.geometric_tail is not None and base.tail_mass > 0:
        raise ConfigError("mixture with infinity needs a finitely supported base law")
    head = tuple(weight * x for x in base.head)
    inf = 1.0 - math.fsum(head)
    return DelayDistribution(head=head, mass_at_infinity=max(0.0, inf),
                             label=f"mixture_inf({base.label},{weight})")


def from_config(cfg: Mapping) -> DelayDistribution:
    """Build a law from a tagged record such as ``{"kind": "geometric", "q": 0.5}``."""
    if not isinstance(cfg, Mapping) or "kind" not in cfg:
        raise ConfigError("delay config must be a mapping with a 'kind' field")
    kind = cfg["kind"]
    try:
        if kind == "constant":
            return constant(int(cfg["value"]))
        if kind == "geometric":
            return geometric(float(cfg["q"]))
        if kind in ("exponential", "discrete_exponential"):
            cap = cfg.get("cap")
            return discrete_exponential(float(cfg["mean"]), None if cap is None else int(cap))
        if kind == "table":
            dist = DelayDistribution(head=tuple(cfg["pmf"]),
                                     geometric_tail=cfg.get("geometric_tail"),
                                     mass_at_infinity=float(cfg.get("infinity", 0.0)))
            return dist
        if kind == "mixture_inf":
            # either the weight of the finite part or the mass at infinity
            if "infinity" in cfg:
                if "weight" in cfg:
                    raise ConfigError("give either weight or infinity for mixture_inf, not both")
                return mixture_inf(from_config(cfg["base"]), 1.0 - float(cfg["infinity"]))
            return mixture_inf(from_config(cfg["base"]), float(cfg["weight"]))
    except KeyError as exc:
        raise ConfigError(f"delay config of kind {kind!r} is missing {exc}") from None
    raise ConfigError(f"unknown delay kind {kind!r}")


def check_model_compatibility(dist: DelayDistribution, model: str) -> None:
    """Reject laws the chosen leader model cannot support."""
    if dist.mass_at_infinity > 0 and model != "one_time":
        raise ConfigError("a delay with mass at infinity needs the one-time leader model")
    if model == "iid" and not dist.has_nondecreasing_failure_rate():
        raise ConfigError("the i.i.d. leader model needs a non-decreasing failure rate")
