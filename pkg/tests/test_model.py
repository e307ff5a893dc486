import math

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from tempnet_tradeoff import (
    DomainError,
    GrowthStatus,
    ModelParams,
    ScenarioKind,
    characteristic_time,
    classify_scenario,
    constant_c,
    cost_curve,
    crossover_time,
    derive_constants,
    growth_status,
    net_value,
    value_curve,
)


def params(k0=10.0, m=2, alpha=4.0, t0=1.0, n_nodes=100, m0=0):
    return ModelParams(n_nodes=n_nodes, m=m, k0=k0, alpha=alpha, t0=t0, m0=m0)


@pytest.mark.parametrize("k0, m, t0, expected", [(10, 2, 1, 6), (4, 2, 1, 0), (50, 1, 4, 21)])
def test_constant_c(k0, m, t0, expected):
    assert constant_c(k0, m, t0) == expected


@pytest.mark.parametrize("t0", [0, -1.0])
def test_constant_c_rejects_non_positive_t0(t0):
    with pytest.raises(DomainError):
        constant_c(10, 2, t0)


def test_value_curve_examples():
    assert value_curve(1, 2, constant_c(10, 2, 1)) == 10
    assert value_curve(4, 2, 6) == 28
    assert value_curve(10, 3, 0) == 60


def test_cost_curve_examples():
    assert cost_curve(0, 2, 4) == 0
    assert cost_curve(5, 2, 4) == 30
    assert cost_curve(9, 2, 4) == 54 == value_curve(9, 2, 6)


@pytest.mark.parametrize("fn", [lambda t: value_curve(t, 2, 6), lambda t: cost_curve(t, 2, 4)])
def test_curves_reject_negative_time(fn):
    with pytest.raises(DomainError):
        fn(-0.5)


@pytest.mark.parametrize("t, net, status", [
    (1, 4.0, GrowthStatus.GROWING),  # 4 + 6 - 6
    (9, 0.0, GrowthStatus.NO_GROWTH),
    (16, -8.0, GrowthStatus.NO_GROWTH),
])
def test_net_value_and_status(t, net, status):
    p = params()
    assert net_value(t, p) == net
    assert growth_status(t, p) is status


def test_crossover_time():
    assert crossover_time(6, 2) == 2.25
    assert crossover_time(0, 3) is None
    assert crossover_time(-1, 3) is None


def test_crossover_fig1_level():
    # k0 = 2m(1 + sqrt(600)) puts (m=1, t0=1) on the t* = 600 contour
    k0 = 2 * (1 + math.sqrt(600))
    assert k0 == pytest.approx(50.99, abs=0.005)
    assert crossover_time(constant_c(k0, 1, 1), 1) == pytest.approx(600, rel=1e-12)


def test_characteristic_time():
    assert characteristic_time(6, 2, 4) == 9
    assert characteristic_time(6, 2, 6) == 2.25 == crossover_time(6, 2)
    assert characteristic_time(6, 2, 1) is None
    assert characteristic_time(6, 2, 2) is None
    assert characteristic_time(0, 2, 5) is None
    # c < 0 pairs with alpha < m
    assert characteristic_time(-2, 2, 1) == 4


def test_derive_constants():
    d = derive_constants(params())
    assert (d.c, d.t_star, d.t_char) == (6, 2.25, 9)


@pytest.mark.parametrize("kwargs, kind", [
    (dict(k0=10, m=1, alpha=100), ScenarioKind.FAILURE),
    (dict(k0=10, m=2, alpha=2), ScenarioKind.EVER_GROWING),
    (dict(k0=10, m=2, alpha=4), ScenarioKind.TRADEOFF_LATE_STOP),
    (dict(k0=10, m=2, alpha=6), ScenarioKind.BOUNDARY),
    (dict(k0=50, m=1, alpha=5), ScenarioKind.TRADEOFF_EARLY_STOP),
    (dict(k0=10, m=2, alpha=0.5), ScenarioKind.EVER_GROWING),
    # no square-root head start
    (dict(k0=4, m=2, alpha=3), ScenarioKind.FAILURE),
    (dict(k0=4, m=2, alpha=1), ScenarioKind.EVER_GROWING),
    (dict(k0=0, m=2, alpha=1), ScenarioKind.EVER_GROWING),
])
def test_classify_examples(kwargs, kind):
    assert classify_scenario(params(**kwargs)).variant is kind


def test_classify_failure_details():
    s = classify_scenario(params(k0=10, m=1, alpha=100))
    assert s.t_char == pytest.approx((8 / 99) ** 2)
    assert s.t_char <= 1


def test_scenario_describe():
    assert classify_scenario(params()).describe() == "TradeoffLateStop t*=2.25 t_char=9"
    assert classify_scenario(params(alpha=2)).describe() == "EverGrowing t_char=inf"


def test_classify_rejects_bad_tol():
    with pytest.raises(DomainError):
        classify_scenario(params(), tol=0)


@pytest.mark.parametrize("kwargs", [
    dict(n_nodes=1, m=1), dict(m=0), dict(m=101), dict(t0=0), dict(alpha=-1), dict(k0=-1),
    dict(m0=-1), dict(m=2.0), dict(n_nodes=True), dict(k0=float("nan")),
])
def test_params_invariants(kwargs):
    base = dict(n_nodes=100, m=2, k0=10.0, alpha=4.0)
    base.update(kwargs)
    with pytest.raises(DomainError):
        ModelParams(**base)


valid = st.builds(
    lambda m, k0, t0, alpha: ModelParams(n_nodes=max(2, m), m=m, k0=k0, alpha=alpha, t0=t0),
    st.integers(1, 50),
    st.floats(0, 1e4),
    st.floats(1e-3, 1e3),
    st.floats(0, 500),
)


@given(valid)
def test_boundary_condition(p):
    assert value_curve(p.t0, p.m, p.c) == pytest.approx(p.k0, rel=1e-12, abs=1e-9)


nonzero_c = st.floats(1e-6, 1e3) | st.floats(-1e3, -1e-6)


@given(nonzero_c, st.integers(1, 50), st.floats(0, 500))
def test_intersection_property(c, m, alpha):
    # |c| floored away from zero: t_char ~ c^2 would otherwise sink into subnormals
    t_char = characteristic_time(c, m, alpha)
    assume(t_char is not None)
    kc = cost_curve(t_char, m, alpha)
    assert abs(value_curve(t_char, m, c) - kc) <= 1e-9 * kc


@given(st.floats(0.1, 1e3), st.integers(1, 20), st.floats(0, 200), st.integers(1, 10))
def test_scale_invariance(k0, m, alpha, lam):
    t_char = characteristic_time(constant_c(k0, m, 1), m, alpha)
    scaled = characteristic_time(constant_c(lam * k0, lam * m, 1), lam * m, lam * alpha)
    assert (t_char is None) == (scaled is None)
    if t_char is not None:
        assert scaled == pytest.approx(t_char, rel=1e-10)
    t_star = crossover_time(constant_c(k0, m, 1), m)
    scaled_star = crossover_time(constant_c(lam * k0, lam * m, 1), lam * m)
    assert (t_star is None) == (scaled_star is None)
    if t_star is not None:
        assert scaled_star == pytest.approx(t_star, rel=1e-10)


@given(st.floats(1e-3, 1e3), st.integers(1, 50))
def test_tradeoff_boundary_is_alpha_3m(c, m):
    # t_char = t* <=> (c/(alpha-m))^2 = c^2/(4m^2) <=> alpha - m = +-2m; alpha >= 0 keeps 3m only
    roots = [a for a in (3 * m, -m) if a >= 0]
    assert roots == [3 * m]
    assert characteristic_time(c, m, 3 * m) == pytest.approx(crossover_time(c, m), rel=1e-12)
    below = classify_scenario(ModelParams(n_nodes=max(2, m), m=m, k0=2 * m + c, alpha=3 * m * (1 - 1e-3)))
    above = classify_scenario(ModelParams(n_nodes=max(2, m), m=m, k0=2 * m + c, alpha=3 * m * (1 + 1e-3)))
    assert below.variant is ScenarioKind.TRADEOFF_LATE_STOP
    assert above.variant in (ScenarioKind.TRADEOFF_EARLY_STOP, ScenarioKind.FAILURE)


@settings(max_examples=300)
@given(st.integers(1, 50), st.floats(1e-3, 1e3), st.floats(1.0, 20.0, exclude_min=True), st.floats(0.01, 100))
def test_classifier_agrees_with_inequalities(m, c_ratio, alpha_ratio, t0):
    assume(abs(alpha_ratio - 3) > 1e-6)
    k0 = 2 * m * t0 + c_ratio * m * math.sqrt(t0)
    p = ModelParams(n_nodes=max(2, m), m=m, k0=k0, alpha=alpha_ratio * m, t0=t0)
    assume(p.c > 0)
    s = classify_scenario(p)
    if p.alpha < 3 * p.m:
        assert s.variant is ScenarioKind.TRADEOFF_LATE_STOP
        assert s.t_char > s.t_star
    else:
        assert s.variant in (ScenarioKind.TRADEOFF_EARLY_STOP, ScenarioKind.FAILURE)
        assert s.t_char < s.t_star


@given(valid)
def test_scenario_invariants(p):
    s = classify_scenario(p)
    if s.variant is ScenarioKind.EVER_GROWING:
        assert s.t_char is None
    if s.variant is ScenarioKind.TRADEOFF_EARLY_STOP:
        assert s.t_char < s.t_star and s.t_char > p.t0
    if s.variant is ScenarioKind.TRADEOFF_LATE_STOP:
        assert s.t_char > s.t_star
    if s.t_char is not None:
        assert s.t_char > 0
