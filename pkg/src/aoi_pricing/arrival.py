"""Two-state Markov chain of driver arrivals at the gateway."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True)
class ArrivalChain:
    """``alpha``: P(arrival | no arrival last slot); ``beta``: P(no arrival | arrival last slot)."""

    alpha: float
    beta: float

    def __post_init__(self):
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise DomainError(f"{name} must lie in [0, 1], got {v}")

    @property
    def stationary_arrival_rate(self) -> float:
        total = self.alpha + self.beta
        return self.alpha / total if total > 0 else 0.0


def _check_bit(s_prev):
    if s_prev not in (0, 1):
        raise DomainError(f"s_prev must be 0 or 1, got {s_prev!r}")


def expected_arrival(chain: ArrivalChain, s_prev: int) -> float:
    _check_bit(s_prev)
    return (1.0 - chain.beta) if s_prev else chain.alpha


def step(chain: ArrivalChain, s_prev: int, rand: float) -> int:
    """Next arrival bit; ``rand`` is a caller-drawn uniform variate in [0, 1)."""
    return 1 if rand < expected_arrival(chain, s_prev) else 0
