"""Numerical oracles, regime fits and phase-diagram sweeps.

The mean-field oracle integrates ``dk/dt = m + k/(2t)`` with classical RK4;
that is the one-node equation the closed-form value curve solves once the
total activity is replaced by ``2*m*t``. Sweeps return :class:`PhaseGrid`
objects with rows indexed by the y axis and columns by the x axis, ready for
contouring.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DomainError
from .model import (
    DEFAULT_TOL,
    ModelParams,
    ScenarioKind,
    characteristic_time,
    classify_scenario,
    constant_c,
    crossover_time,
    value_curve,
)

CROSSOVER_LEVELS = (600.0, 1200.0, 1800.0, 2400.0)
SLOPE_THRESHOLD = 0.75
SLOPE_WINDOW_DECADES = 1.0 / 3.0


# ---------------------------------------------------------------------------
# Mean-field ODE oracle
# ---------------------------------------------------------------------------

def rk4_fixed(f: Callable[[float, float], float], t_start: float, y_start: float,
              t_samples: Sequence[float], dt: float) -> np.ndarray:
    """Classical RK4 for a scalar ODE, sampled at increasing ``t_samples``.

    Each interval between consecutive samples is split into equal substeps no
    longer than ``dt``, so every sample is hit exactly.
    """
    t = float(t_start)
    y = float(y_start)
    out = np.empty(len(t_samples))
    for i, ts in enumerate(t_samples):
        gap = ts - t
        if gap < 0:
            raise DomainError("sample times must be non-decreasing and >= t_start")
        if gap > 0:
            n = max(1, math.ceil(gap / dt - 1e-12))
            h = gap / n
            for _ in range(n):
                a = f(t, y)
                b = f(t + 0.5 * h, y + 0.5 * h * a)
                c = f(t + 0.5 * h, y + 0.5 * h * b)
                d = f(t + h, y + h * c)
                y += h * (a + 2.0 * b + 2.0 * c + d) / 6.0
                t += h
            t = float(ts)
        out[i] = y
    return out


@dataclass
class SampledCurve:
    t: np.ndarray
    k: np.ndarray
    dt: float
    refinements: int


def integrate_meanfield(k_start: float, t_start: float, t_end: float, m: float, dt: float = 0.1,
                        samples=1000, rtol: float = 1e-8, max_halvings: int = 20) -> SampledCurve:
    """Integrate ``dk/dt = m + k/(2t)`` from ``(t_start, k_start)`` to ``t_end``.

    ``samples`` is a count of log-spaced output times or an explicit array.
    The step is halved until two successive solutions agree to ``rtol``
    (relative, at every sample); the finer solution is returned.
    """
    if not t_start > 0:
        raise DomainError(f"t_start must be > 0, got {t_start}")
    if not t_end > t_start:
        raise DomainError("t_end must exceed t_start")
    if not dt > 0 or dt >= t_end - t_start:
        raise DomainError(f"dt must lie in (0, t_end - t_start), got {dt}")
    if np.ndim(samples) == 0:
        t_samples = np.geomspace(t_start, t_end, int(samples))
    else:
        t_samples = np.asarray(samples, dtype=float)
        if t_samples[0] < t_start or t_samples[-1] > t_end or np.any(np.diff(t_samples) < 0):
            raise DomainError("explicit samples must be sorted and lie within [t_start, t_end]")

    def rhs(t, k):
        return m + k / (2.0 * t)

    k_prev = rk4_fixed(rhs, t_start, k_start, t_samples, dt)
    step = dt
    for halving in range(1, max_halvings + 1):
        step /= 2.0
        k_next = rk4_fixed(rhs, t_start, k_start, t_samples, step)
        scale = np.maximum(np.abs(k_next), np.finfo(float).tiny)
        if np.max(np.abs(k_next - k_prev) / scale) < rtol:
            return SampledCurve(t_samples, k_next, step, halving)
        k_prev = k_next
    raise DomainError(f"RK4 did not converge to rtol={rtol} within {max_halvings} halvings")


# ---------------------------------------------------------------------------
# Regime fitting and crossover detection
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RegimeFit:
    window: tuple
    beta: float
    r_squared: float
    n_samples: int


def _loglog_ols(lt: np.ndarray, lk: np.ndarray) -> tuple[float, float]:
    slope, intercept = np.polyfit(lt, lk, 1)
    resid = lk - (slope * lt + intercept)
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((lk - lk.mean()) ** 2))
    if ss_tot == 0.0:
        r2 = 1.0 if ss_res == 0.0 else 0.0
    else:
        r2 = min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    return float(slope), r2


def fit_power_law(t, k, window: tuple) -> RegimeFit:
    """Least-squares exponent of ``k ~ t**beta`` restricted to ``window``."""
    t = np.asarray(t, dtype=float)
    k = np.asarray(k, dtype=float)
    t_lo, t_hi = window
    if not t_lo < t_hi:
        raise DomainError("window must satisfy t_lo < t_hi")
    mask = (t >= t_lo) & (t <= t_hi)
    if mask.sum() < 8:
        raise DomainError(f"need at least 8 samples inside {window}, got {int(mask.sum())}")
    tw, kw = t[mask], k[mask]
    if np.any(tw <= 0) or np.any(kw <= 0):
        raise DomainError("power-law fit needs strictly positive t and k")
    beta, r2 = _loglog_ols(np.log(tw), np.log(kw))
    return RegimeFit(window=(float(t_lo), float(t_hi)), beta=beta, r_squared=r2, n_samples=int(mask.sum()))


@dataclass
class CrossoverEstimate:
    t_cross: Optional[float]
    metadata: dict = field(default_factory=dict)

    @property
    def detected(self) -> bool:
        return self.t_cross is not None


def local_slopes(t, k, window_decades: float = SLOPE_WINDOW_DECADES):
    """Sliding OLS slope of log k vs log t over windows ``window_decades`` wide.

    Only centres whose whole window lies inside the series are returned.
    """
    lt = np.log10(np.asarray(t, dtype=float))
    lk = np.log10(np.asarray(k, dtype=float))
    half = window_decades / 2.0
    centres, slopes = [], []
    for i in range(len(lt)):
        lo, hi = lt[i] - half, lt[i] + half
        if lo < lt[0] or hi > lt[-1]:
            continue
        sel = (lt >= lo) & (lt <= hi)
        if sel.sum() < 3:
            continue
        slope, _ = _loglog_ols(lt[sel], lk[sel])
        centres.append(lt[i])
        slopes.append(slope)
    return np.array(centres), np.array(slopes)


def detect_crossover(t, k, threshold: float = SLOPE_THRESHOLD,
                     window_decades: float = SLOPE_WINDOW_DECADES) -> CrossoverEstimate:
    """Empirical cross-over: first upward crossing of the local log-log slope through ``threshold``."""
    t = np.asarray(t, dtype=float)
    k = np.asarray(k, dtype=float)
    if len(t) != len(k) or len(t) < 3:
        raise DomainError("t and k must be equal-length with at least 3 samples")
    if np.any(t <= 0) or np.any(k <= 0):
        raise DomainError("crossover detection needs strictly positive t and k")
    if np.any(np.diff(t) <= 0):
        raise DomainError("t must be strictly increasing")
    if math.log10(t[-1] / t[0]) < 2.0:
        raise DomainError("series must span at least two decades in t")
    metadata = {
        "estimator": "sliding-window OLS slope of log10 k vs log10 t",
        "window_decades": window_decades,
        "threshold": threshold,
        "crossing": "first upward crossing, log-linear interpolation",
    }
    centres, slopes = local_slopes(t, k, window_decades)
    below = slopes < threshold
    for i in range(len(slopes) - 1):
        if below[i] and not below[i + 1]:
            s0, s1 = slopes[i], slopes[i + 1]
            frac = (threshold - s0) / (s1 - s0)
            log_t = centres[i] + frac * (centres[i + 1] - centres[i])
            return CrossoverEstimate(float(10.0**log_t), metadata)
    metadata["result"] = "no crossover detected"
    return CrossoverEstimate(None, metadata)


# ---------------------------------------------------------------------------
# Phase grids
# ---------------------------------------------------------------------------

@dataclass
class PhaseGrid:
    """Values on a rectangular grid; ``values[i, j]`` belongs to ``(x[j], y[i])``."""

    x_label: str
    y_label: str
    x: np.ndarray
    y: np.ndarray
    values: np.ndarray
    quantity: str
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        if self.values.shape != (len(self.y), len(self.x)):
            raise DomainError(
                f"values shape {self.values.shape} does not match axes ({len(self.y)}, {len(self.x)})"
            )

    def cells(self):
        for i, yv in enumerate(self.y):
            for j, xv in enumerate(self.x):
                yield float(xv), float(yv), self.values[i, j]


def grid_axis(lo: float, hi: float, resolution: int, open_lower: bool = False) -> np.ndarray:
    """``resolution`` evenly spaced points on ``[lo, hi]`` (or ``(lo, hi]``).

    Points are rounded to 12 decimals so nominal values such as 0.5 or 1.0
    are hit exactly; the degenerate lines ``c = 0`` and ``alpha = m`` are
    otherwise smeared by one-ulp cancellation.
    """
    if resolution < 2:
        raise DomainError("resolution must be >= 2 per axis")
    if not hi > lo:
        raise DomainError("axis range must satisfy lo < hi")
    if open_lower:
        axis = np.linspace(lo, hi, resolution + 1)[1:]
    else:
        axis = np.linspace(lo, hi, resolution)
    return np.round(axis, 12)


def sweep_crossover(k0_values, m_values, t0: float = 1.0) -> PhaseGrid:
    """Grid of cross-over times over ``(m, k0)``; NaN where ``c <= 0``.

    ``m`` is swept as a continuous coordinate so contours can be drawn.
    """
    k0_values = np.asarray(k0_values, dtype=float)
    m_values = np.asarray(m_values, dtype=float)
    if np.any(m_values <= 0) or np.any(k0_values < 0):
        raise DomainError("m values must be positive and k0 values non-negative")
    values = np.full((len(k0_values), len(m_values)), np.nan)
    for i, k0 in enumerate(k0_values):
        for j, m in enumerate(m_values):
            t_star = crossover_time(constant_c(k0, m, t0), m)
            if t_star is not None:
                values[i, j] = t_star
    return PhaseGrid(
        x_label="m", y_label="k0", x=m_values, y=k0_values, values=values, quantity="t_star",
        metadata={"t0": t0, "sentinel": "nan marks c <= 0 (no cross-over)"},
    )


def extract_contours(grid: PhaseGrid, levels: Sequence[float] = CROSSOVER_LEVELS) -> dict:
    """Marching-squares level sets of ``grid``: level -> list of (n, 2) arrays of (x, y)."""
    import contourpy

    z = np.ma.masked_invalid(np.asarray(grid.values, dtype=float))
    gen = contourpy.contour_generator(grid.x, grid.y, z, line_type=contourpy.LineType.Separate)
    return {float(level): [np.asarray(seg) for seg in gen.lines(level)] for level in levels}


COORDINATE_SYSTEMS = {
    "A": ("alpha/k0", "m/k0"),
    "B": ("alpha/m", "k0/m"),
}


def _unscale(coords: str, x: float, y: float, scale: float) -> tuple[float, float, float]:
    """Absolute ``(k0, m, alpha)`` for a cell; ``scale`` is k0 in system A and m in system B."""
    if coords == "A":
        return scale, y * scale, x * scale
    return y * scale, scale, x * scale


def sweep_characteristic(coords: str, x_values, y_values, scale: float = 1.0, t0: float = 1.0) -> PhaseGrid:
    """``ln(t_char)`` over scaled coordinates; ``+inf`` where the curves never meet.

    ``coords`` is ``"A"`` for ``(alpha/k0, m/k0)`` or ``"B"`` for
    ``(alpha/m, k0/m)``.
    """
    if coords not in COORDINATE_SYSTEMS:
        raise DomainError(f"coords must be 'A' or 'B', got {coords!r}")
    x_values = np.asarray(x_values, dtype=float)
    y_values = np.asarray(y_values, dtype=float)
    if len(x_values) < 2 or len(y_values) < 2:
        raise DomainError("resolution must be >= 2 per axis")
    if np.any(x_values < 0) or np.any(y_values <= 0):
        raise DomainError("alpha ratio must be >= 0 and the other ratio > 0")
    values = np.full((len(y_values), len(x_values)), np.inf)
    for i, yv in enumerate(y_values):
        for j, xv in enumerate(x_values):
            k0, m, alpha = _unscale(coords, xv, yv, scale)
            t_char = characteristic_time(constant_c(k0, m, t0), m, alpha)
            if t_char is not None:
                values[i, j] = math.log(t_char)
    x_label, y_label = COORDINATE_SYSTEMS[coords]
    return PhaseGrid(
        x_label=x_label, y_label=y_label, x=x_values, y=y_values, values=values, quantity="ln_t_char",
        metadata={"coords": coords, "scale": scale, "t0": t0, "sentinel": "inf marks no intersection"},
    )


def scenario_map(x_values, y_values, tol: float = DEFAULT_TOL, m: int = 1, t0: float = 1.0) -> PhaseGrid:
    """Scenario per cell over ``(alpha/m, k0/m)``; values are :class:`ScenarioKind` members."""
    x_values = np.asarray(x_values, dtype=float)
    y_values = np.asarray(y_values, dtype=float)
    if np.any(x_values < 0) or np.any(y_values < 0):
        raise DomainError("scenario map ratios must be non-negative")
    values = np.empty((len(y_values), len(x_values)), dtype=object)
    for i, yv in enumerate(y_values):
        for j, xv in enumerate(x_values):
            params = ModelParams(n_nodes=max(2, m), m=m, k0=yv * m, alpha=xv * m, t0=t0)
            values[i, j] = classify_scenario(params, tol).variant
    return PhaseGrid(
        x_label="alpha/m", y_label="k0/m", x=x_values, y=y_values, values=values, quantity="scenario",
        metadata={"m": m, "t0": t0, "tol": tol, "variants": [k.value for k in ScenarioKind]},
    )


def scenario_counts(grid: PhaseGrid) -> dict:
    counts = {k.value: 0 for k in ScenarioKind}
    for kind in grid.values.ravel():
        counts[kind.value] += 1
    return counts


# ---------------------------------------------------------------------------
# Simulation vs mean field
# ---------------------------------------------------------------------------

NORMALIZATION_NOTE = (
    "The one-node rate m + m*k/sum_{j!=i} k_j has no 1/N on the uniform-source "
    "term, whereas the simulated process picks each node as a source with "
    "probability m/N per step. The closed-form value curve therefore describes "
    "a tracked node that receives every step's m source links; simulated node "
    "trajectories are compared against it descriptively, and against the "
    "microscopic closure dk/dt = m/N + m*k/(W0 + 2*m*s) with W0 the initial "
    "total activity."
)


@dataclass
class MeanFieldReport:
    params: ModelParams
    n_runs: int
    times: np.ndarray
    total_activity_exact: bool
    max_total_activity_deviation: float
    total_links_exact: bool
    mean_gain_per_step: float
    node_mean_activity: np.ndarray
    node_mean_slope: float
    highlighted: list
    highlighted_mean: dict
    highlighted_beats_median: dict
    microscopic_prediction: dict
    value_curve_tracked: np.ndarray
    note: str = NORMALIZATION_NOTE

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "n_runs": self.n_runs,
            "times": self.times.tolist(),
            "total_activity_exact": self.total_activity_exact,
            "max_total_activity_deviation": self.max_total_activity_deviation,
            "total_links_exact": self.total_links_exact,
            "mean_gain_per_step": self.mean_gain_per_step,
            "node_mean_activity": self.node_mean_activity.tolist(),
            "node_mean_slope": self.node_mean_slope,
            "highlighted_nodes": self.highlighted,
            "highlighted_mean": {str(k): v.tolist() for k, v in self.highlighted_mean.items()},
            "highlighted_beats_median_fraction": {str(k): v for k, v in self.highlighted_beats_median.items()},
            "microscopic_prediction": {str(k): v.tolist() for k, v in self.microscopic_prediction.items()},
            "value_curve_tracked": self.value_curve_tracked.tolist(),
            "note": self.note,
        }


def compare_sim_to_meanfield(ensemble: list, params: ModelParams) -> MeanFieldReport:
    """Summarise an ensemble against the exact accounting and the mean-field curves.

    Highlighted nodes are those whose initial activity differs from ``k0``.
    """
    if not ensemble:
        raise DomainError("ensemble must be non-empty")
    times = np.asarray(ensemble[0].times)
    for series in ensemble:
        if series.params != params:
            raise DomainError("ensemble mixes runs with different parameters")
        if not np.array_equal(series.times, times):
            raise DomainError("ensemble mixes runs with different recording times")
    initial = ensemble[0].per_node[:, 0] if times[0] == 0 else np.full(params.n_nodes, params.k0)
    for series in ensemble:
        if times[0] == 0 and not np.array_equal(series.per_node[:, 0], initial):
            raise DomainError("ensemble mixes runs with different initial activities")
    initial_total = math.fsum(initial)

    deviations = []
    links_exact = True
    for series in ensemble:
        totals = np.array([math.fsum(col) for col in series.per_node.T])
        deviations.append(np.max(np.abs(totals - (initial_total + 2 * params.m * times))))
        links_exact &= bool(np.array_equal(series.total_links, params.m0 + params.m * times))
    max_dev = float(max(deviations))

    stack = np.stack([s.per_node for s in ensemble])  # runs x nodes x times
    span = times[-1] - times[0]
    gains = [(math.fsum(s.per_node[:, -1]) - math.fsum(s.per_node[:, 0])) / span for s in ensemble] if span else [0.0]
    node_mean = stack.mean(axis=(0, 1))
    slope = float(np.polyfit(times, node_mean, 1)[0]) if len(times) > 1 else 0.0

    highlighted = [int(i) for i in np.flatnonzero(initial != params.k0)]
    others = np.setdiff1d(np.arange(params.n_nodes), highlighted)
    highlighted_mean, beats, micro = {}, {}, {}
    m, n = params.m, params.n_nodes
    steps = times.astype(float)

    def micro_rhs(s, k):
        return m / n + m * k / (initial_total + 2 * m * s)

    for node in highlighted:
        highlighted_mean[node] = stack[:, node, :].mean(axis=0)
        if len(others):
            wins = [s.per_node[node, -1] > np.median(s.per_node[others, -1]) for s in ensemble]
            beats[node] = float(np.mean(wins))
        if len(steps) > 1:
            micro[node] = rk4_fixed(micro_rhs, steps[0], float(initial[node]), steps, dt=1.0)
    c = constant_c(params.k0, m, params.t0)
    tracked = np.array([value_curve(params.t0 + s, m, c) for s in steps])
    return MeanFieldReport(
        params=params,
        n_runs=len(ensemble),
        times=times,
        total_activity_exact=max_dev == 0.0,
        max_total_activity_deviation=max_dev,
        total_links_exact=links_exact,
        mean_gain_per_step=float(np.mean(gains)),
        node_mean_activity=node_mean,
        node_mean_slope=slope,
        highlighted=highlighted,
        highlighted_mean=highlighted_mean,
        highlighted_beats_median=beats,
        microscopic_prediction=micro,
        value_curve_tracked=tracked,
    )
