import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from planktonmap.invariant import (
    SetKind,
    contains,
    converges_to_E1,
    invariance_preconditions,
    make_invariant_set,
    psi,
    psi_min,
    verify_step_stays,
)
from planktonmap.model import ModelParams, PlanktonState, step, step_uv

ADMISSIBLE = [
    (SetKind.M1, ModelParams(0.5, 0.4, 0.6, 1)),
    (SetKind.M1, ModelParams(0.9, 0.2, 0.5, 1)),
    (SetKind.M2, ModelParams(0.5, 1.5, 1.0, 1)),
    (SetKind.M2, ModelParams(0.8, 3.0, 2.5, 1)),
    (SetKind.M3, ModelParams(0.5, 0.75, 0.8, 1)),
    (SetKind.N1, ModelParams(0.5, 2.0, 1.2, 2)),
    (SetKind.N1, ModelParams(0.7, 6.75, 4.0, 2)),
    (SetKind.N2, ModelParams(0.5, 10.0, 5.0, 2)),
    (SetKind.N2, ModelParams(0.9, 8.0, 7.0, 2)),
]


def sample(spec, n, rng):
    u = rng.uniform(0, 1, n)
    top = spec.upper_bound(u)
    top = np.where(np.isfinite(top), top, 1e3)
    return u, rng.uniform(0, 1, n) * top


def test_psi_min_oracle():
    x, val = psi_min(8.0)
    assert x == pytest.approx(0.5, abs=1e-12)
    assert val == pytest.approx(9.0, abs=1e-12)
    with pytest.raises(ValueError):
        psi_min(27 / 4)


@given(st.floats(6.8, 200.0))
def test_psi_min_is_a_local_minimum(c):
    x, val = psi_min(c)
    assert 0 < x < 2 / 3
    assert abs(c * x ** 3 - c * x ** 2 + 1) < 1e-10
    assert psi(x * 0.99, c) >= val and psi(min(x * 1.01, 1), c) >= val


def test_psi_is_infinite_at_zero():
    assert psi(0.0, 1.0) == np.inf


@pytest.mark.parametrize("kind, params", ADMISSIBLE)
def test_sets_are_invariant(kind, params):
    assert invariance_preconditions(params)
    spec = make_invariant_set(kind, params)
    u, v = sample(spec, 20_000, np.random.default_rng(1))
    assert contains(spec, (u, v)).all()
    assert verify_step_stays(spec, (u, v)).all()


@pytest.mark.parametrize("kind, params", ADMISSIBLE)
def test_single_step_lowers_predator(kind, params):
    spec = make_invariant_set(kind, params)
    u, v = sample(spec, 5000, np.random.default_rng(2))
    u1, v1 = step_uv(u, v, params.r, params.c, params.gamma, params.h)
    assert (v1 <= v + 1e-12).all()


def test_axes_are_invariant():
    p = ModelParams(0.5, 1.0, 1.4, 1)
    axis_u = make_invariant_set(SetKind.AXIS_U, p)
    u = np.linspace(0, 2, 101)
    assert verify_step_stays(axis_u, (u, np.zeros_like(u))).all()
    axis_v = make_invariant_set(SetKind.AXIS_V, p)
    v = np.linspace(0, 50, 101)
    assert verify_step_stays(axis_v, (np.zeros_like(v), v)).all()
    with pytest.raises(ValueError):
        make_invariant_set(SetKind.AXIS_V, ModelParams(1.5, 1.0, 1.4, 1))


@pytest.mark.parametrize("kind, params", [
    (SetKind.M1, ModelParams(0.5, 0.6, 0.6, 1)),
    (SetKind.M2, ModelParams(0.5, 0.9, 0.6, 1)),
    (SetKind.M3, ModelParams(0.5, 1.0, 0.6, 1)),
    (SetKind.N1, ModelParams(0.5, 7.0, 0.6, 2)),
    (SetKind.N2, ModelParams(0.5, 6.0, 0.6, 2)),
    (SetKind.M1, ModelParams(0.5, 0.4, 0.6, 2)),
])
def test_inadmissible_sets_rejected(kind, params):
    with pytest.raises(ValueError):
        make_invariant_set(kind, params)
    assert not make_invariant_set(kind, params, check=False).admissible


def test_second_level_set_fails_below_eight():
    # for 27/4 < c < 8, psi(1) = 1 + c is below psi_min, so (1, psi_min) leaves through u
    c = 7.0
    p = ModelParams(0.5, c, 0.5 * (1 + c), 2)
    spec = make_invariant_set(SetKind.N2, p)
    assert spec.psi_min > 1 + c
    s = PlanktonState(1.0, spec.psi_min)
    assert contains(spec, s)
    assert not verify_step_stays(spec, s)
    assert step(p, s).u < 0


def test_rectangle_counterexample_for_large_c():
    p = ModelParams(0.5, 19.0, 10.0, 1)
    s = PlanktonState(0.1, 4.62)
    m2 = make_invariant_set(SetKind.M2, p, check=False)
    assert not contains(m2, s)
    m1_shape = make_invariant_set(SetKind.M1, p, check=False)
    assert contains(m1_shape, s)
    image = step(p, s)
    assert tuple(image) == pytest.approx((0.0307, 3.903), abs=1e-3)
    assert step(p, image).u < 0


@pytest.mark.parametrize("kind, params", ADMISSIBLE[:5])
def test_orbits_converge_to_prey_only_state(kind, params):
    spec = make_invariant_set(kind, params)
    u, v = sample(spec, 10, np.random.default_rng(5))
    for s in zip(np.maximum(u, 0.05), v):
        ok, n = converges_to_E1(params, PlanktonState(*s))
        assert ok, (s, n)


def test_converges_reports_failure_on_predator_axis():
    ok, n = converges_to_E1(ModelParams(0.5, 0.4, 0.6, 1), PlanktonState(0.0, 1.0), max_iter=50)
    assert not ok and n == 50


@settings(max_examples=50, deadline=None)
@given(st.floats(0.05, 1.0), st.floats(0.0, 1.0))
def test_predator_is_monotone_along_orbits(u0, frac):
    p = ModelParams(0.5, 0.4, 0.6, 1)
    spec = make_invariant_set(SetKind.M1, p)
    s = PlanktonState(u0, frac * spec.upper_bound(u0))
    for _ in range(500):
        nxt = step(p, s)
        assert nxt.v <= s.v + 1e-15
        assert contains(spec, nxt, atol=1e-12)
        s = nxt
