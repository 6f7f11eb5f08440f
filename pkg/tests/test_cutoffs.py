import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ballneedlets.cutoffs import (
    FLOOR_INTERVAL,
    TYPE_A,
    TYPE_B,
    eval_cutoff,
    make_bump_cutoff,
    make_pair,
    partition_of_unity_error,
    smooth_step,
)

PAIRS = ["self-dual", "pair:bump", "pair:complex", "pair:canonical"]


def test_smooth_step_endpoints():
    assert np.allclose(smooth_step(np.array([-1.0, 0.0, 1.0, 2.0])), [0, 0, 1, 1])
    assert smooth_step(np.array([0.5]))[0] == pytest.approx(0.5)


@given(st.floats(0, 1))
def test_smooth_step_symmetry(t):
    assert smooth_step(np.array([t]))[0] + smooth_step(np.array([1 - t]))[0] == pytest.approx(1.0)


def test_type_a_shape():
    a = make_bump_cutoff(TYPE_A)
    t = np.linspace(0, 3, 3001)
    v = a(t)
    assert np.all(v[t <= 1] == 1.0)
    assert np.all(v[t >= 2] == 0.0)
    assert np.all(np.diff(v) <= 1e-15)
    assert a.floor > 0


def test_type_b_shape_and_floor():
    a = make_bump_cutoff(TYPE_B)
    t = np.linspace(0, 3, 3001)
    v = a(t)
    assert np.all(v[(t <= 0.5) | (t >= 2)] == 0.0)
    assert np.all(v >= 0)
    lo, hi = FLOOR_INTERVAL
    assert np.min(a(np.linspace(lo, hi, 1001))) >= a.floor - 1e-12 > 0


@given(st.floats(0.5, 1.0))
def test_type_b_squares_pair_up(t):
    a = make_bump_cutoff(TYPE_B)
    assert a(t) ** 2 + a(2 * t) ** 2 == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("spec", PAIRS)
def test_partition_of_unity(spec):
    pair = make_pair(spec)
    t = np.geomspace(1, 4096, 20001)
    assert np.max(partition_of_unity_error(pair, t)) < 1e-13
    with pytest.raises(ValueError):
        partition_of_unity_error(pair, np.array([0.5]))


@pytest.mark.parametrize("spec", PAIRS)
def test_pair_cutoffs_are_admissible(spec):
    pair = make_pair(spec)
    for c in (pair.a_hat, pair.b_hat):
        assert c.support == (0.5, 2.0)
        assert c.floor > 0
        v = eval_cutoff(c, np.array([0.25, 0.5, 2.0, 3.0]))
        assert np.all(v == 0)


def test_self_dual_and_complex_flags():
    assert make_pair("self-dual").self_dual
    assert not make_pair("pair:bump").self_dual
    assert not make_pair("pair:complex").is_real
    assert make_pair("pair:bump").is_real


def test_unknown_specs():
    with pytest.raises(ValueError):
        make_pair("pair:nope")
    with pytest.raises(ValueError):
        make_pair("nonsense")
    with pytest.raises(ValueError):
        make_bump_cutoff("type_c")
