"""JSON experiment config shared by the single- and multi-path commands.

A scalar ``delays`` gives a single-path problem; a list gives a multi-path
problem (a one-element list is still multi-path). ``initial_aoi`` is the
actual AoI ``A(0)`` per path.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .arrival import ArrivalChain
from .cost_dist import CostDistribution
from .errors import DomainError
from .multi_path import MultiPathProblem
from .single_path import SinglePathProblem

REQUIRED = ("horizon", "delays", "rho", "alpha", "beta", "distribution")
KNOWN = REQUIRED + ("eps", "initial_aoi")


class ConfigError(DomainError):
    def __init__(self, field: str, message: str):
        super().__init__(f"config field '{field}': {message}")
        self.field = field


@dataclass(frozen=True)
class ExperimentConfig:
    problem: SinglePathProblem | MultiPathProblem
    initial_aoi: tuple[float, ...]
    raw: dict

    @property
    def is_multi(self) -> bool:
        return isinstance(self.problem, MultiPathProblem)

    @property
    def delays(self) -> tuple[int, ...]:
        return self.problem.delays if self.is_multi else (self.problem.D,)

    @property
    def initial_foreseen(self) -> tuple[float, ...]:
        return tuple(a + d for a, d in zip(self.initial_aoi, self.delays))


def _number(raw, field, lo=None, hi=None, open_lo=False, open_hi=False, integer=False):
    v = raw[field]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(field, f"expected a number, got {v!r}")
    if integer and int(v) != v:
        raise ConfigError(field, f"expected an integer, got {v!r}")
    if lo is not None and (v < lo or (open_lo and v == lo)):
        raise ConfigError(field, f"must be {'>' if open_lo else '>='} {lo}, got {v}")
    if hi is not None and (v > hi or (open_hi and v == hi)):
        raise ConfigError(field, f"must be {'<' if open_hi else '<='} {hi}, got {v}")
    return int(v) if integer else float(v)


def parse_config(raw: dict) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "expected a JSON object")
    for key in REQUIRED:
        if key not in raw:
            raise ConfigError(key, "missing")
    unknown = set(raw) - set(KNOWN)
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown key")

    T = _number(raw, "horizon", lo=1, integer=True)
    delays_raw = raw["delays"]
    multi = isinstance(delays_raw, list)
    delays = delays_raw if multi else [delays_raw]
    if not delays:
        raise ConfigError("delays", "must name at least one path")
    for d in delays:
        if isinstance(d, bool) or not isinstance(d, (int, float)) or int(d) != d or d < 1:
            raise ConfigError("delays", f"entries must be positive integers, got {d!r}")
    delays = [int(d) for d in delays]
    if max(delays) >= T:
        raise ConfigError("delays", f"max delay {max(delays)} must be smaller than horizon {T}")
    rho = _number(raw, "rho", lo=0.0, hi=1.0, open_lo=True, open_hi=True)
    alpha = _number(raw, "alpha", lo=0.0, hi=1.0)
    beta = _number(raw, "beta", lo=0.0, hi=1.0)
    eps = None
    if raw.get("eps") is not None:
        eps = _number(raw, "eps", lo=0.0, open_lo=True)

    try:
        dist = CostDistribution.from_config(raw["distribution"])
    except (DomainError, KeyError, TypeError, ValueError) as exc:
        raise ConfigError("distribution", str(exc)) from None

    a0 = raw.get("initial_aoi", 1)
    a0 = a0 if isinstance(a0, list) else [a0] * len(delays)
    if len(a0) != len(delays):
        raise ConfigError("initial_aoi", f"has {len(a0)} entries, delays has {len(delays)}")
    for a in a0:
        if isinstance(a, bool) or not isinstance(a, (int, float)) or a < 0:
            raise ConfigError("initial_aoi", f"entries must be nonnegative numbers, got {a!r}")

    chain = ArrivalChain(alpha, beta)
    try:
        if multi:
            problem = MultiPathProblem(tuple(delays), T, rho, chain, dist, eps)
        else:
            problem = SinglePathProblem(T, delays[0], rho, chain, dist, eps)
    except DomainError as exc:
        raise ConfigError("distribution", str(exc)) from None
    return ExperimentConfig(problem, tuple(float(a) for a in a0), dict(raw))


def load_config(path) -> ExperimentConfig:
    """Raises ``OSError`` for unreadable files and ``ConfigError`` for bad content."""
    text = Path(path).read_text()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("<root>", f"invalid JSON: {exc}") from None
    return parse_config(raw)
