import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from tempnet_tradeoff import CapacityError, DomainError, ModelParams
from tempnet_tradeoff.simulator import (
    EnsembleSpec,
    derive_run_seed,
    init_network,
    make_rng,
    preferential_select,
    run_simulation,
    seeded_initial,
    simulate_run,
    step_network,
)


def params(n_nodes=100, m=2, k0=1.0, alpha=0.0, m0=0):
    return ModelParams(n_nodes=n_nodes, m=m, k0=k0, alpha=alpha, m0=m0)


def test_init_network():
    s = init_network(params(n_nodes=4, k0=1, m0=0))
    assert s.activities.tolist() == [1, 1, 1, 1]
    assert s.total_links == 0 and s.step == 0
    s = init_network(params(n_nodes=2, m=1, k0=0, m0=5))
    assert s.activities.tolist() == [0, 0] and s.total_links == 5
    assert init_network(params(n_nodes=1000, k0=10)).activities.sum() == 10000


def test_preferential_select_frequencies():
    rng = make_rng(12345)
    draws = preferential_select([1, 2, 3, 4], rng, size=10**6)
    freq = np.bincount(draws, minlength=4) / 10**6
    assert np.all(np.abs(freq - [0.1, 0.2, 0.3, 0.4]) <= 0.005)


def test_preferential_select_zero_weights_uniform():
    draws = preferential_select([0, 0, 0], make_rng(7), size=30000)
    freq = np.bincount(draws, minlength=3) / 30000
    assert np.allclose(freq, 1 / 3, atol=0.01)


def test_preferential_select_exclude():
    rng = make_rng(0)
    assert all(preferential_select([5, 5], rng, exclude=0) == 1 for _ in range(100))
    draws = preferential_select([1, 0, 3], rng, exclude=2, size=1000)
    assert set(draws.tolist()) == {0}
    # zero weight outside the excluded node falls back to uniform over the rest
    draws = preferential_select([0, 0, 9], rng, exclude=2, size=10000)
    assert set(draws.tolist()) == {0, 1}


def test_preferential_select_errors():
    rng = make_rng(0)
    with pytest.raises(DomainError):
        preferential_select([3], rng, exclude=0)
    with pytest.raises(DomainError):
        preferential_select([1, -1], rng)
    with pytest.raises(DomainError):
        preferential_select([], rng)


def test_step_sampler_matches_kernel():
    # frozen state: heterogeneous initial weights plus accumulated endpoints
    p = params(n_nodes=5, m=1, k0=1.0)
    state = init_network(p, initial_activities=[1.0, 2.0, 0.5, 0.0, 3.0])
    rng = make_rng(99)
    for _ in range(20):
        step_network(state, p, rng)
    activities = state.activities
    from tempnet_tradeoff.simulator import _draw_destination

    weight_total = state._initial_cum[-1] + state._n_endpoints
    source = 1
    draws = np.array([_draw_destination(state, source, weight_total, rng) for _ in range(200_000)])
    observed = np.bincount(draws, minlength=5)
    assert observed[source] == 0
    w = activities.copy()
    w[source] = 0
    expected = w / w.sum() * len(draws)
    keep = expected > 0
    assert observed[~keep].sum() == 0
    assert stats.chisquare(observed[keep], expected[keep]).pvalue > 0.01


def test_step_links_and_conservation():
    p = params(n_nodes=50, m=3, k0=2.0)
    state = init_network(p)
    rng = make_rng(1)
    for _ in range(100):
        before = state.activities.copy()
        step_network(state, p, rng)
        assert np.all(state.activities >= before)
        assert state.gains.sum() - (before - p.k0).sum() == 2 * p.m
    assert state.total_links == 300
    assert state.activities.sum() - 50 * 2.0 == 2 * 3 * 100


def test_two_node_network_is_forced():
    p = params(n_nodes=2, m=1, k0=1.0)
    state = init_network(p, keep_edges=True)
    rng = make_rng(3)
    for t in range(1, 11):
        step_network(state, p, rng)
        assert state.activities.tolist() == [1 + t, 1 + t]
    assert all({s, d} == {0, 1} for _, s, d in state.edge_log)


def test_sources_distinct_and_no_self_loops():
    p = params(n_nodes=6, m=6, k0=1.0)
    state = init_network(p, keep_edges=True)
    rng = make_rng(5)
    for _ in range(50):
        step_network(state, p, rng)
    by_step = {}
    for step, s, d in state.edge_log:
        assert s != d
        by_step.setdefault(step, []).append(s)
    assert all(sorted(v) == list(range(6)) for v in by_step.values())


def test_zero_activity_bootstrap():
    p = params(n_nodes=10, m=2, k0=0.0)
    state = init_network(p)
    rng = make_rng(8)
    for _ in range(20):
        step_network(state, p, rng)
    assert state.activities.sum() == 80


def test_record_times():
    series = run_simulation(params(), EnsembleSpec(runs=1, steps=10, record_every=1))
    assert series[0].times.tolist() == list(range(11))
    series = run_simulation(params(), EnsembleSpec(runs=1, steps=10, record_every=4))
    assert series[0].times.tolist() == [0, 4, 8, 10]


def test_determinism_and_run_seeding():
    p = params()
    spec = EnsembleSpec(runs=3, master_seed=42, steps=200, record_every=20)
    a = run_simulation(p, spec)
    b = run_simulation(p, spec)
    for x, y in zip(a, b):
        assert np.array_equal(x.per_node, y.per_node)
        assert x.seed == y.seed
    assert len({s.seed for s in a}) == 3
    assert not np.array_equal(a[0].per_node, a[1].per_node)
    # a run is reproducible from its recorded seed alone
    alone = simulate_run(p, 200, a[1].times, a[1].seed, run_index=1)
    assert np.array_equal(alone.per_node, a[1].per_node)
    assert a[2].seed == derive_run_seed(42, 2)


def test_parallel_matches_serial():
    p = params(n_nodes=30)
    spec = EnsembleSpec(runs=3, master_seed=5, steps=100, record_every=10)
    serial = run_simulation(p, spec)
    parallel = run_simulation(p, spec, workers=2)
    assert [s.run_index for s in parallel] == [0, 1, 2]
    for x, y in zip(serial, parallel):
        assert np.array_equal(x.per_node, y.per_node)


def test_total_links_zero_variance():
    p = params(m=3, m0=7)
    series = run_simulation(p, EnsembleSpec(runs=5, steps=50, record_every=10))
    finals = [s.total_links[-1] for s in series]
    assert finals == [7 + 3 * 50] * 5


def test_capacity_error():
    with pytest.raises(CapacityError, match="budget"):
        run_simulation(params(n_nodes=1000), EnsembleSpec(runs=10, steps=1000), memory_budget=10**6)


def test_series_monotone():
    series = run_simulation(params(), EnsembleSpec(runs=1, steps=300, record_every=7))[0]
    assert np.all(np.diff(series.per_node, axis=1) >= 0)
    assert np.all(np.diff(series.times) > 0)


def test_spec_validation():
    for kwargs in (dict(runs=0), dict(steps=0), dict(record_every=0), dict(master_seed=-1)):
        with pytest.raises(DomainError):
            EnsembleSpec(**kwargs)


@settings(max_examples=25, deadline=None)
@given(
    st.integers(2, 60),
    st.integers(1, 6),
    st.sampled_from([0.0, 0.25, 1.0, 3.5]),
    st.integers(0, 20),
    st.integers(0, 2**32),
)
def test_conservation_every_step(n, m, k0, m0, seed):
    m = min(m, n)
    p = ModelParams(n_nodes=n, m=m, k0=k0, alpha=0.0, m0=m0)
    state = init_network(p)
    rng = make_rng(seed)
    for _ in range(40):
        step_network(state, p, rng)
        assert state.activities.sum() - n * k0 - 2 * (state.total_links - m0) == 0
        assert state.total_links == m0 + m * state.step


@pytest.mark.slow
def test_rich_get_richer_direction():
    p = params(n_nodes=100, m=2, k0=1.0)
    initial = seeded_initial(p, {0: 10.0})
    series = run_simulation(p, EnsembleSpec(runs=200, master_seed=11, steps=1000, record_every=1000),
                            initial_activities=initial)
    seeded = np.mean([s.final()[0] for s in series])
    others = np.mean([s.final()[1:].mean() for s in series])
    assert seeded > others
