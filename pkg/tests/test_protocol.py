import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from alphacons.graph import fig6_graph, laplacian, path_graph, worst_case_graph
from alphacons.protocol import (
    ProtocolParams,
    local_disagreement,
    plan_update,
    t_star,
    time_optimal_control,
)

P = ProtocolParams(alpha=0.6, beta=1.0)


def test_local_disagreement_examples():
    assert local_disagreement([0, 5, 5], path_graph(3), 1) == -5
    assert local_disagreement([7, 2, 4, 3, 1, 5], fig6_graph(), 3) == 0
    for r in (1, 3, 6):
        g = worst_case_graph(10, r)
        assert local_disagreement([0] + [5] * 9, g, 1) == -5 * r


def test_t_star():
    assert t_star([7, 2, 4, 3, 1, 5], 1.0) == 3.0
    assert t_star([0] + [5] * 20, 1.0) == 2.5
    assert t_star([4.2] * 5, 0.3) == 0


@pytest.mark.parametrize(
    "z,n_i,duration,control",
    [
        (0.0, 3, 0.2, 0.0),
        (3.0, 1, 1.8, -1.0),   # (3 + 0.6) / 2
        (-2.0, 1, 1.3, 1.0),   # (2 + 0.6) / 2
        (0.6, 2, 0.3, -1.0),   # inclusive boundary: -(0.6 / 0.6) * 1
    ],
)
def test_plan_update_examples(z, n_i, duration, control):
    plan = plan_update(z, n_i, P)
    assert plan.duration == pytest.approx(duration, abs=1e-15)
    assert plan.control == pytest.approx(control, abs=1e-15)


def test_time_optimal_control():
    assert time_optimal_control(-10, 1) == 1
    assert time_optimal_control(0, 1) == 0
    assert time_optimal_control(4, 2) == -2


@pytest.mark.parametrize("kwargs", [dict(alpha=0, beta=1), dict(alpha=1, beta=-1), dict(alpha=1, beta=1, gamma=0.5),
                                    dict(alpha=math.nan, beta=1)])
def test_params_validation(kwargs):
    with pytest.raises(ValueError):
        ProtocolParams(**kwargs)


params = st.builds(
    ProtocolParams,
    alpha=st.floats(0.01, 10),
    beta=st.floats(0.01, 10),
    gamma=st.floats(1, 20),
)


@given(params, st.integers(1, 30), st.sampled_from([1.0, -1.0]))
def test_branches_agree_at_boundary(p, n_i, s):
    inside = plan_update(s * p.alpha, n_i, p)
    bt = p.effective_beta
    outside_duration = (p.alpha + p.alpha) / (2 * bt * n_i)
    assert abs(inside.duration - outside_duration) <= 1e-12 * outside_duration
    assert abs(inside.control - (-bt * s)) <= 1e-12 * bt


@given(params, st.integers(1, 30), st.floats(-100, 100))
def test_control_bounded(p, n_i, z):
    plan = plan_update(z, n_i, p)
    assert abs(plan.control) <= p.effective_beta + 1e-12
    assert plan.duration > 0


@given(st.floats(0.01, 10), st.floats(0.01, 10), st.floats(1, 20), st.integers(1, 30), st.floats(-100, 100))
def test_gamma_scaling(alpha, beta, gamma, n_i, z):
    base = plan_update(z, n_i, ProtocolParams(alpha, beta, 1.0))
    slow = plan_update(z, n_i, ProtocolParams(alpha, beta, gamma))
    assert slow.duration == pytest.approx(gamma * base.duration, rel=1e-12)
    assert slow.control == pytest.approx(base.control / gamma, rel=1e-12, abs=1e-300)


@given(st.lists(st.integers(-50, 50), min_size=6, max_size=6))
def test_disagreement_is_laplacian_row(x):
    g = fig6_graph()
    lx = laplacian(g) @ np.array(x)
    for i in range(1, 7):
        assert local_disagreement(x, g, i) == lx[i - 1]
