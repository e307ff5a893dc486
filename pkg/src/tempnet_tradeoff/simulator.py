"""Stochastic growth engine: uniform sources, activity-preferential destinations.

At every step ``m`` distinct source nodes are drawn uniformly; each one links
to a destination chosen with probability proportional to node activity
(excluding itself). Both endpoints of a new link gain one unit of activity.
Node count is fixed and links are never removed, so the graph is a growing
multigraph whose only tracked observable is per-node activity.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import CapacityError, DomainError, InvariantViolation
from .model import ModelParams

RNG_ALGORITHM = "numpy.random.PCG64 seeded via SeedSequence(master_seed, spawn_key=(run,))"
DEFAULT_MEMORY_BUDGET = 2 * 1024**3


@dataclass(frozen=True)
class EnsembleSpec:
    runs: int = 1
    master_seed: int = 0
    steps: int = 1000
    record_every: int = 1

    def __post_init__(self):
        for name in ("runs", "steps", "record_every"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
                raise DomainError(f"{name} must be a positive integer, got {value!r}")
        seed = self.master_seed
        if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or not 0 <= seed < 2**64:
            raise DomainError(f"master_seed must be an unsigned 64-bit integer, got {seed!r}")

    def record_steps(self) -> np.ndarray:
        times = np.arange(0, self.steps + 1, self.record_every, dtype=np.int64)
        if times[-1] != self.steps:
            times = np.append(times, self.steps)
        return times


@dataclass
class NetworkState:
    """Mutable state of one growing network.

    Activity is stored as ``initial + gains`` with integer gains so the link
    accounting stays exact for any real ``k0``.
    """

    initial: np.ndarray
    gains: np.ndarray
    total_links: int
    step: int = 0
    edge_log: Optional[list] = None
    # Sampler bookkeeping: cumulative initial weights and one entry per link
    # endpoint, so a destination draw costs O(log N) instead of O(N).
    _initial_cum: np.ndarray = field(default=None, repr=False)
    _endpoints: np.ndarray = field(default=None, repr=False)
    _n_endpoints: int = field(default=0, repr=False)

    @property
    def activities(self) -> np.ndarray:
        return self.initial + self.gains

    @property
    def n_nodes(self) -> int:
        return len(self.initial)


def validate_initial(params: ModelParams, initial_activities=None) -> np.ndarray:
    if initial_activities is None:
        return np.full(params.n_nodes, params.k0, dtype=float)
    initial = np.asarray(initial_activities, dtype=float)
    if initial.shape != (params.n_nodes,):
        raise DomainError(
            f"initial_activities must have length n_nodes={params.n_nodes}, got shape {initial.shape}"
        )
    if not np.all(np.isfinite(initial)) or np.any(initial < 0):
        raise DomainError("initial_activities must be finite and non-negative")
    return initial.copy()


def init_network(params: ModelParams, initial_activities=None, keep_edges: bool = False) -> NetworkState:
    """Fresh network: every node at ``k0`` (or the given vector), ``m0`` links, step 0."""
    initial = validate_initial(params, initial_activities)
    state = NetworkState(
        initial=initial,
        gains=np.zeros(params.n_nodes, dtype=np.int64),
        total_links=params.m0,
        step=0,
        edge_log=[] if keep_edges else None,
    )
    state._initial_cum = np.cumsum(initial)
    state._endpoints = np.empty(1024, dtype=np.int64)
    state._n_endpoints = 0
    return state


def preferential_select(activities, rng: np.random.Generator, exclude: Optional[int] = None, size=None):
    """Draw node indices with probability proportional to activity.

    ``exclude`` removes one node from the selectable set. If every selectable
    node has zero activity the draw is uniform over the selectable nodes.
    Returns an int, or an array of ints when ``size`` is given.
    """
    weights = np.asarray(activities, dtype=float)
    if weights.ndim != 1:
        raise DomainError("activities must be a 1-D vector")
    if np.any(weights < 0) or not np.all(np.isfinite(weights)):
        raise DomainError("activities must be finite and non-negative")
    selectable = np.ones(len(weights), dtype=bool)
    if exclude is not None:
        if not 0 <= exclude < len(weights):
            raise DomainError(f"exclude index {exclude} out of range")
        selectable[exclude] = False
    if not selectable.any():
        raise DomainError("no selectable node")
    weights = np.where(selectable, weights, 0.0)
    total = weights.sum()
    if total <= 0:
        weights = selectable.astype(float)
        total = weights.sum()
    cum = np.cumsum(weights)
    u = rng.random(size) * cum[-1]
    idx = np.searchsorted(cum, u, side="right")
    idx = np.minimum(idx, len(weights) - 1)
    if size is None:
        return int(idx)
    return idx


def _draw_destination(state: NetworkState, source: int, weight_total: float, rng: np.random.Generator) -> int:
    n = state.n_nodes
    source_weight = state.initial[source] + state.gains[source]
    if weight_total - source_weight <= 0:
        # every other node has zero activity: uniform fallback
        j = int(rng.integers(n - 1))
        return j if j < source else j + 1
    base_total = state._initial_cum[-1]
    n_endpoints = state._n_endpoints
    while True:
        x = rng.random() * weight_total
        if x < base_total:
            j = int(np.searchsorted(state._initial_cum, x, side="right"))
            if j >= n:
                j = n - 1
        else:
            pos = int(x - base_total)
            j = int(state._endpoints[pos if pos < n_endpoints else n_endpoints - 1])
        if j != source:
            return j


def step_network(state: NetworkState, params: ModelParams, rng: np.random.Generator) -> NetworkState:
    """Advance ``state`` in place by one step of ``m`` links and return it.

    All destinations in a step are drawn against the activities at the start
    of the step.
    """
    n = state.n_nodes
    if n < 2:
        raise DomainError("need at least two nodes to place a link")
    m = params.m
    if m > n:
        raise DomainError(f"cannot choose {m} distinct sources among {n} nodes")
    sources = rng.choice(n, size=m, replace=False)
    weight_total = float(state._initial_cum[-1]) + state._n_endpoints
    new_endpoints = np.empty(2 * m, dtype=np.int64)
    step_index = state.step + 1
    for i, s in enumerate(sources):
        s = int(s)
        d = _draw_destination(state, s, weight_total, rng)
        new_endpoints[2 * i] = s
        new_endpoints[2 * i + 1] = d
        if state.edge_log is not None:
            state.edge_log.append((step_index, s, d))
    np.add.at(state.gains, new_endpoints, 1)
    start = state._n_endpoints
    if start + 2 * m > len(state._endpoints):
        grown = np.empty(max(2 * len(state._endpoints), start + 2 * m), dtype=np.int64)
        grown[:start] = state._endpoints[:start]
        state._endpoints = grown
    state._endpoints[start:start + 2 * m] = new_endpoints
    state._n_endpoints = start + 2 * m
    state.total_links += m
    state.step = step_index
    return state


@dataclass
class ActivitySeries:
    """Activity trajectories of one run, sampled at ``times``.

    ``per_node`` has shape ``(n_nodes, len(times))``. ``seed`` alone rebuilds
    the run's generator: ``np.random.Generator(np.random.PCG64(seed))``.
    """

    times: np.ndarray
    per_node: np.ndarray
    tracked_mean: np.ndarray
    total_links: np.ndarray
    seed: int
    run_index: int
    params: ModelParams
    edges: Optional[list] = None

    @property
    def n_nodes(self) -> int:
        return self.per_node.shape[0]

    @property
    def total_activity(self) -> np.ndarray:
        return self.per_node.sum(axis=0)

    def final(self) -> np.ndarray:
        return self.per_node[:, -1]


def derive_run_seed(master_seed: int, run_index: int) -> int:
    ss = np.random.SeedSequence(master_seed, spawn_key=(run_index,))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def estimate_bytes(params: ModelParams, spec: EnsembleSpec) -> int:
    n_rec = len(spec.record_steps())
    per_run = params.n_nodes * n_rec * 8 + 2 * params.m * spec.steps * 8
    return spec.runs * per_run


def simulate_run(
    params: ModelParams,
    steps: int,
    record_steps: Sequence[int],
    seed: int,
    run_index: int = 0,
    initial_activities=None,
    keep_edges: bool = False,
) -> ActivitySeries:
    rng = make_rng(seed)
    state = init_network(params, initial_activities, keep_edges=keep_edges)
    record_steps = np.asarray(record_steps, dtype=np.int64)
    per_node = np.empty((params.n_nodes, len(record_steps)), dtype=float)
    links = np.empty(len(record_steps), dtype=np.int64)
    col = 0
    if record_steps[0] == 0:
        per_node[:, 0] = state.activities
        links[0] = state.total_links
        col = 1
    for _ in range(steps):
        step_network(state, params, rng)
        if col < len(record_steps) and state.step == record_steps[col]:
            per_node[:, col] = state.activities
            links[col] = state.total_links
            col += 1
    check_conservation(state, params)
    return ActivitySeries(
        times=record_steps.copy(),
        per_node=per_node,
        tracked_mean=per_node.mean(axis=0),
        total_links=links,
        seed=seed,
        run_index=run_index,
        params=params,
        edges=state.edge_log,
    )


def check_conservation(state: NetworkState, params: ModelParams) -> None:
    expected_links = params.m0 + params.m * state.step
    if state.total_links != expected_links:
        raise InvariantViolation(f"total_links={state.total_links}, expected {expected_links}")
    gained = int(state.gains.sum())
    if gained != 2 * (state.total_links - params.m0):
        raise InvariantViolation(
            f"activity gain {gained} != 2*(total_links - m0) = {2 * (state.total_links - params.m0)}"
        )
    if np.any(state.gains < 0):
        raise InvariantViolation("negative activity gain")


def _run_job(args):
    return simulate_run(*args)


def run_simulation(
    params: ModelParams,
    spec: EnsembleSpec,
    *,
    initial_activities=None,
    keep_edges: bool = False,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
    workers: int = 1,
) -> list[ActivitySeries]:
    """Run ``spec.runs`` independent realisations, ordered by run index.

    Run ``r`` is seeded from ``(spec.master_seed, r)`` only, so results do not
    depend on ``workers``.
    """
    needed = estimate_bytes(params, spec)
    if needed > memory_budget:
        raise CapacityError(
            f"run needs about {needed / 1e6:.1f} MB of trajectory storage "
            f"(runs={spec.runs}, n_nodes={params.n_nodes}, records={len(spec.record_steps())}), "
            f"budget is {memory_budget / 1e6:.1f} MB; raise record_every or the budget"
        )
    initial = validate_initial(params, initial_activities)
    record_steps = spec.record_steps()
    jobs = [
        (params, spec.steps, record_steps, derive_run_seed(spec.master_seed, r), r, initial, keep_edges)
        for r in range(spec.runs)
    ]
    if workers > 1 and spec.runs > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_job, jobs))
    return [_run_job(job) for job in jobs]


def seeded_initial(params: ModelParams, boosted: dict) -> np.ndarray:
    """Initial activities at ``k0`` except the nodes in ``boosted`` (index -> activity)."""
    initial = np.full(params.n_nodes, params.k0, dtype=float)
    for node, value in boosted.items():
        initial[int(node)] = float(value)
    return initial


def expected_total_activity(initial_total: float, m: int, step) -> float:
    return initial_total + 2 * m * np.asarray(step)


__all__ = [
    "ActivitySeries",
    "EnsembleSpec",
    "NetworkState",
    "RNG_ALGORITHM",
    "derive_run_seed",
    "init_network",
    "make_rng",
    "preferential_select",
    "run_simulation",
    "seeded_initial",
    "simulate_run",
    "step_network",
]
