class ConfigError(ValueError):
    """Invalid or unsupported configuration."""


class DomainError(ValueError):
    """Parameters outside the region where a bound is defined."""


class HorizonError(IndexError):
    """A request that needs more of a trace than was generated."""


class PolicyViolation(RuntimeError):
    """An adversary policy attempted an action the model forbids."""

    def __init__(self, slot: int, reason: str):
        super().__init__(f"slot {slot}: {reason}")
        self.slot = slot
        self.reason = reason


class TheoryContradiction(AssertionError):
    """A deterministic inequality that must hold on every execution failed."""

    def __init__(self, check: str, seed: int, slot: int, detail: str = ""):
        super().__init__(f"{check} failed at slot {slot} (seed {seed}) {detail}".rstrip())
        self.check = check
        self.seed = seed
        self.slot = slot
        self.detail = detail
