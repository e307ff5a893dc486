"""Closed-form value and cost curves, derived times and scenario classification.

Everything here is a pure function of its arguments. A tracked node's
accumulated value follows ``2*m*t + c*sqrt(t)`` with the integration constant
fixed by ``k(t0) = k0``; the cost of maintaining attachments grows linearly as
``(alpha + m)*t``. Growth stops where the two curves meet.
"""

from __future__ import annotations

import enum
import math
import numbers
from dataclasses import asdict, dataclass
from typing import Optional

from .errors import DomainError

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class ModelParams:
    """Parameter tuple shared by the analytic layer and the simulator.

    ``n_nodes`` and ``m0`` only matter for simulation; the analytic curves
    depend on ``(m, k0, t0, alpha)``.
    """

    n_nodes: int
    m: int
    k0: float
    alpha: float
    m0: int = 0
    t0: float = 1.0

    def __post_init__(self):
        for name in ("n_nodes", "m", "m0"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, numbers.Integral):
                raise DomainError(f"{name} must be an integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        for name in ("k0", "alpha", "t0"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, numbers.Real):
                raise DomainError(f"{name} must be a real number, got {value!r}")
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.n_nodes < 2:
            raise DomainError(f"n_nodes must be >= 2, got {self.n_nodes}")
        if self.m < 1:
            raise DomainError(f"m must be >= 1, got {self.m}")
        if self.m > self.n_nodes:
            raise DomainError(f"m must be <= n_nodes ({self.n_nodes}), got {self.m}")
        if self.m0 < 0:
            raise DomainError(f"m0 must be >= 0, got {self.m0}")
        if self.k0 < 0:
            raise DomainError(f"k0 must be >= 0, got {self.k0}")
        if self.t0 <= 0:
            raise DomainError(f"t0 must be > 0, got {self.t0}")
        if self.alpha < 0:
            raise DomainError(f"alpha must be >= 0, got {self.alpha}")

    @property
    def c(self) -> float:
        return constant_c(self.k0, self.m, self.t0)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class DerivedConstants:
    c: float
    t_star: Optional[float]
    t_char: Optional[float]


class GrowthStatus(enum.Enum):
    GROWING = "Growing"
    NO_GROWTH = "NoGrowth"


class ScenarioKind(enum.Enum):
    FAILURE = "Failure"
    EVER_GROWING = "EverGrowing"
    TRADEOFF_EARLY_STOP = "TradeoffEarlyStop"
    TRADEOFF_LATE_STOP = "TradeoffLateStop"
    BOUNDARY = "Boundary"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Scenario:
    variant: ScenarioKind
    t_char: Optional[float] = None
    t_star: Optional[float] = None

    def describe(self) -> str:
        """One-line summary, e.g. ``TradeoffLateStop t*=2.25 t_char=9``."""
        parts = [self.variant.value]
        if self.variant is not ScenarioKind.EVER_GROWING and self.t_star is not None:
            parts.append(f"t*={self.t_star:.12g}")
        parts.append("t_char=inf" if self.t_char is None else f"t_char={self.t_char:.12g}")
        return " ".join(parts)


def _check_time(t):
    if t < 0:
        raise DomainError(f"time must be non-negative, got {t}")


def constant_c(k0: float, m: float, t0: float) -> float:
    """Integration constant fixing the value curve to pass through ``(t0, k0)``."""
    if not t0 > 0:
        raise DomainError(f"t0 must be > 0, got {t0}")
    return (k0 - 2 * m * t0) / math.sqrt(t0)


def value_curve(t: float, m: float, c: float) -> float:
    _check_time(t)
    return 2 * m * t + c * math.sqrt(t)


def cost_curve(t: float, m: float, alpha: float) -> float:
    _check_time(t)
    return (alpha + m) * t


def net_value(t: float, params: ModelParams) -> float:
    return value_curve(t, params.m, params.c) - cost_curve(t, params.m, params.alpha)


def growth_status(t: float, params: ModelParams) -> GrowthStatus:
    if net_value(t, params) > 0:
        return GrowthStatus.GROWING
    return GrowthStatus.NO_GROWTH


def crossover_time(c: float, m: float) -> Optional[float]:
    """Time where ``c*sqrt(t)`` and ``2*m*t`` contribute equally to the slope.

    Returns None when ``c <= 0``: without a positive square-root term there is
    no early regime to cross over from.
    """
    if not m > 0:
        raise DomainError(f"m must be positive, got {m}")
    if c <= 0:
        return None
    return c * c / (4 * m * m)


def characteristic_time(c: float, m: float, alpha: float) -> Optional[float]:
    """Positive time where the cost line meets the value curve, or None.

    The intersection requires ``sqrt(t) = c / (alpha - m) > 0``; when the signs
    of ``c`` and ``alpha - m`` differ (or either is zero) the curves never meet
    at positive time.
    """
    if not m > 0:
        raise DomainError(f"m must be positive, got {m}")
    if alpha < 0:
        raise DomainError(f"alpha must be >= 0, got {alpha}")
    slope_gap = alpha - m
    if c == 0 or slope_gap == 0 or (c > 0) != (slope_gap > 0):
        return None
    root = c / slope_gap
    return root * root


def derive_constants(params: ModelParams) -> DerivedConstants:
    c = params.c
    return DerivedConstants(
        c=c,
        t_star=crossover_time(c, params.m),
        t_char=characteristic_time(c, params.m, params.alpha),
    )


def classify_scenario(params: ModelParams, tol: float = DEFAULT_TOL) -> Scenario:
    """Classify the long-run fate of growth under ``params``.

    With ``c > 0``:

    * no intersection -> EverGrowing
    * ``|t_char - t*| <= tol * t*`` -> Boundary (``alpha = 3m``)
    * ``t_char < t*`` -> TradeoffEarlyStop, or Failure if the stop falls at
      or before ``t0`` (nothing observable ever grows)
    * ``t_char > t*`` -> TradeoffLateStop

    With ``c <= 0`` the value curve has no square-root head start. Net value is
    then never positive when ``alpha >= m`` (Failure) and eventually positive
    forever when ``alpha < m`` (EverGrowing). For ``c < 0`` the intersection in
    the latter case is the onset of growth rather than a stop, so it is not
    reported as a characteristic time.
    """
    if not isinstance(params, ModelParams):
        raise DomainError("classify_scenario expects ModelParams")
    if not tol > 0:
        raise DomainError(f"tol must be > 0, got {tol}")
    d = derive_constants(params)
    if d.c <= 0:
        if params.alpha >= params.m:
            return Scenario(ScenarioKind.FAILURE, t_char=None, t_star=None)
        return Scenario(ScenarioKind.EVER_GROWING, t_char=None, t_star=None)
    if d.t_char is None:
        return Scenario(ScenarioKind.EVER_GROWING, t_char=None, t_star=d.t_star)
    if abs(d.t_char - d.t_star) <= tol * d.t_star:
        kind = ScenarioKind.BOUNDARY
    elif d.t_char < d.t_star:
        kind = ScenarioKind.FAILURE if d.t_char <= params.t0 else ScenarioKind.TRADEOFF_EARLY_STOP
    else:
        kind = ScenarioKind.TRADEOFF_LATE_STOP
    return Scenario(kind, t_char=d.t_char, t_star=d.t_star)
