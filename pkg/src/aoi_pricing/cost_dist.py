"""Driver cost-sensitivity distributions on [0, 1].

Every distribution is the untruncated law renormalised to the unit interval,
``F(x) = (G(x) - G(0)) / (G(1) - G(0))``. The pricing layer only needs the
CDF, the density and the hazard ``H(x) = x + F(x) / F'(x)``, whose
monotonicity makes the first-order pricing condition uniquely solvable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .errors import DomainError, SingularityError

KINDS = ("uniform", "truncated-normal", "truncated-logistic", "truncated-exponential")
_PARAM_NAMES = {"uniform": (), "truncated-normal": ("mean", "variance"),
                "truncated-logistic": ("loc", "scale"), "truncated-exponential": ("rate",)}

_SQRT_2PI = math.sqrt(2.0 * math.pi)
# Slack for "nondecreasing" on a float grid.
_MONOTONE_SLACK = 1e-12


@dataclass(frozen=True)
class CostDistribution:
    """Cost-sensitivity law of a driver, supported on [0, 1].

    ``params`` depends on ``kind``:

    * ``uniform``: ``()``
    * ``truncated-normal``: ``(mean, variance)`` of the untruncated normal
    * ``truncated-logistic``: ``(location, scale)``
    * ``truncated-exponential``: ``(rate,)``
    """

    kind: str
    params: tuple[float, ...] = ()
    _g0: float = field(init=False, repr=False, compare=False)
    _mass: float = field(init=False, repr=False, compare=False)
    _h1: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown distribution kind {self.kind!r}; expected one of {KINDS}")
        params = tuple(float(p) for p in self.params)
        object.__setattr__(self, "params", params)
        expected = len(_PARAM_NAMES[self.kind])
        if len(params) != expected:
            raise DomainError(f"{self.kind} takes {expected} parameters, got {len(params)}")
        if self.kind == "truncated-normal" and not params[1] > 0:
            raise DomainError("truncated-normal variance must be positive")
        if self.kind == "truncated-logistic" and not params[1] > 0:
            raise DomainError("truncated-logistic scale must be positive")
        if self.kind == "truncated-exponential" and not params[0] > 0:
            raise DomainError("truncated-exponential rate must be positive")

        g0 = float(self._base_cdf(0.0))
        mass = float(self._base_cdf(1.0)) - g0
        if not mass > 0:
            raise DomainError(f"{self.kind}{params} puts no mass on [0, 1]")
        object.__setattr__(self, "_g0", g0)
        object.__setattr__(self, "_mass", mass)
        dens1 = float(self._density(1.0))
        if not dens1 > 0:
            raise SingularityError(f"{self.kind}{params} has zero density at x=1; hazard undefined")
        object.__setattr__(self, "_h1", 1.0 + 1.0 / dens1)

    # -- constructors ---------------------------------------------------

    @classmethod
    def uniform(cls) -> CostDistribution:
        return cls("uniform")

    @classmethod
    def truncated_normal(cls, mean: float, variance: float) -> CostDistribution:
        return cls("truncated-normal", (mean, variance))

    @classmethod
    def truncated_logistic(cls, loc: float, scale: float) -> CostDistribution:
        return cls("truncated-logistic", (loc, scale))

    @classmethod
    def truncated_exponential(cls, rate: float) -> CostDistribution:
        return cls("truncated-exponential", (rate,))

    @classmethod
    def from_config(cls, spec: dict) -> CostDistribution:
        """Build from ``{"kind": ..., "params": {...}}``."""
        kind = spec.get("kind")
        p = spec.get("params", {}) or {}
        names = _PARAM_NAMES.get(kind)
        if names is None:
            raise DomainError(f"distribution.kind: unknown kind {kind!r}")
        missing = [n for n in names if n not in p]
        if missing:
            raise DomainError(f"distribution.params: missing {', '.join(missing)} for {kind}")
        return cls(kind, tuple(float(p[n]) for n in names))

    def to_config(self) -> dict:
        return {"kind": self.kind, "params": dict(zip(_PARAM_NAMES[self.kind], self.params))}

    # -- untruncated law ------------------------------------------------

    def _base_cdf(self, x):
        if self.kind == "uniform":
            return x
        if self.kind == "truncated-normal":
            mu, var = self.params
            return special.ndtr((x - mu) / math.sqrt(var))
        if self.kind == "truncated-logistic":
            mu, s = self.params
            return special.expit((x - mu) / s)
        (lam,) = self.params
        return -np.expm1(-lam * x)

    def _base_pdf(self, x):
        if self.kind == "uniform":
            return np.ones_like(x) if isinstance(x, np.ndarray) else 1.0
        if self.kind == "truncated-normal":
            mu, var = self.params
            sigma = math.sqrt(var)
            z = (x - mu) / sigma
            return np.exp(-0.5 * z * z) / (sigma * _SQRT_2PI)
        if self.kind == "truncated-logistic":
            mu, s = self.params
            e = special.expit((x - mu) / s)
            return e * (1.0 - e) / s
        (lam,) = self.params
        return lam * np.exp(-lam * x)

    def _density(self, x):
        if self.kind == "uniform":
            return self._base_pdf(x)
        return self._base_pdf(x) / self._mass

    # -- public evaluation (no domain checks; see module functions) -----

    def cdf(self, x):
        if self.kind == "uniform":
            return x
        return (self._base_cdf(x) - self._g0) / self._mass

    def pdf(self, x):
        return self._density(x)

    def hazard(self, x):
        """``x + F(x)/F'(x)``; exact zero at the origin."""
        return x + self.cdf(x) / self._density(x)

    @property
    def hazard_at_one(self) -> float:
        return self._h1

    def ppf(self, u):
        """Inverse CDF, used to draw sensitivities from one uniform variate."""
        if self.kind == "uniform":
            return u
        v = self._g0 + u * self._mass
        if self.kind == "truncated-normal":
            mu, var = self.params
            x = mu + math.sqrt(var) * special.ndtri(v)
        elif self.kind == "truncated-logistic":
            mu, s = self.params
            x = mu + s * special.logit(v)
        else:
            (lam,) = self.params
            x = -np.log1p(-v) / lam
        return np.clip(x, 0.0, 1.0) if isinstance(x, np.ndarray) else min(max(float(x), 0.0), 1.0)


@dataclass(frozen=True)
class RegularityReport:
    is_globally_regular: bool
    cutoff: float | None
    grid_step: float


def _check_unit(x, what="x"):
    arr = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError(f"{what} must lie in [0, 1]")


def _scalar_or_array(value, like):
    return float(value) if np.ndim(like) == 0 else np.asarray(value, dtype=float)


def cdf(d: CostDistribution, x):
    _check_unit(x)
    return _scalar_or_array(d.cdf(np.asarray(x, dtype=float) if np.ndim(x) else float(x)), x)


def pdf(d: CostDistribution, x):
    _check_unit(x)
    return _scalar_or_array(d.pdf(np.asarray(x, dtype=float) if np.ndim(x) else float(x)), x)


def hazard_h(d: CostDistribution, x):
    _check_unit(x)
    xv = np.asarray(x, dtype=float) if np.ndim(x) else float(x)
    dens = d.pdf(xv)
    if np.any(np.asarray(dens) <= 0.0):
        raise SingularityError("density vanishes; hazard undefined")
    return _scalar_or_array(d.hazard(xv), x)


def nondecreasing_tail_start(values: np.ndarray, slack: float = _MONOTONE_SLACK) -> int | None:
    """Smallest index ``k`` such that ``values[k:]`` is nondecreasing.

    Returns ``None`` when only the final point qualifies, i.e. the sequence
    drops on its last step.
    """
    values = np.asarray(values, dtype=float)
    tol = slack * np.maximum(1.0, np.abs(values[:-1]))
    drops = np.flatnonzero(np.diff(values) < -tol)
    if drops.size == 0:
        return 0
    start = int(drops[-1]) + 1
    return None if start >= values.size - 1 else start


def regularity_grid(grid_step: float) -> np.ndarray:
    n = int(math.floor(1.0 / grid_step + 1e-9))
    grid = np.arange(n + 1, dtype=float) * grid_step
    if grid[-1] < 1.0 - 1e-12:
        grid = np.append(grid, 1.0)
    grid[-1] = 1.0
    return grid


def check_regularity(d: CostDistribution, grid_step: float = 1e-4) -> RegularityReport:
    """Scan ``H`` on a uniform grid for the point after which it stops decreasing."""
    if not (0.0 < grid_step <= 0.1):
        raise DomainError("grid_step must lie in (0, 0.1]")
    grid = regularity_grid(grid_step)
    values = hazard_h(d, grid)
    start = nondecreasing_tail_start(values)
    cutoff = None if start is None else float(grid[start])
    return RegularityReport(is_globally_regular=(start == 0), cutoff=cutoff, grid_step=grid_step)


def invert_hazard(d: CostDistribution, c, cutoff: float = 0.0, tol: float = 1e-9):
    """Solve ``H(y) = c`` on ``[cutoff, 1]`` by bisection.

    Saturates to 1 when ``c >= H(1)`` and to ``cutoff`` when ``c`` is below
    ``H(cutoff)``. Works elementwise on arrays with a fixed iteration count,
    so the result is a monotone function of ``c``.
    """
    if not tol > 0:
        raise DomainError("tol must be positive")
    if not (0.0 <= cutoff < 1.0):
        raise DomainError("cutoff must lie in [0, 1)")
    h_lo = 0.0 if cutoff == 0.0 else float(d.hazard(cutoff))
    h_hi = d.hazard_at_one
    n_iter = max(1, math.ceil(math.log2((1.0 - cutoff) / tol)))

    if np.ndim(c) == 0:
        c = float(c)
        if c >= h_hi:
            return 1.0
        if c <= h_lo:
            return cutoff
        lo, hi = cutoff, 1.0
        hazard = d.hazard
        for _ in range(n_iter):
            mid = 0.5 * (lo + hi)
            if hazard(mid) < c:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    c = np.asarray(c, dtype=float)
    lo = np.full(c.shape, cutoff)
    hi = np.ones(c.shape)
    for _ in range(n_iter):
        mid = 0.5 * (lo + hi)
        below = d.hazard(mid) < c
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    y = 0.5 * (lo + hi)
    y = np.where(c <= h_lo, cutoff, y)
    return np.where(c >= h_hi, 1.0, y)
