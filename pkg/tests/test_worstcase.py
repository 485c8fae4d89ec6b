import pytest
from hypothesis import given
from hypothesis import strategies as st

from alphacons.analysis import disagreement_trajectory
from alphacons.engine import run
from alphacons.worstcase import build_instance, hub_degree, n_mu_r, verify_tightness


@pytest.mark.parametrize("mu,r,expected", [(0.5, 6, 21), (1.0, 3, 11), (2.0, 1, 9)])
def test_n_mu_r_examples(mu, r, expected):
    assert n_mu_r(mu, r) == expected


@given(st.floats(0.05, 4.0), st.floats(0.05, 4.0), st.integers(1, 40))
def test_n_mu_r_shrinks_with_mu_and_dominates_hub(mu_a, mu_b, r):
    lo, hi = sorted((mu_a, mu_b))
    assert n_mu_r(hi, r) <= n_mu_r(lo, r)
    assert n_mu_r(lo, r) >= r + 2  # room for the hub's r neighbors plus at least one more


def test_n_mu_r_rejects_bad_input():
    with pytest.raises(ValueError):
        n_mu_r(0.0, 3)
    with pytest.raises(ValueError):
        n_mu_r(1.0, 0)


@pytest.mark.parametrize("eps,r,n", [(1.0, 6, 21), (2.0, 3, 11)])
def test_instance_shape(eps, r, n):
    inst = build_instance(eps)
    assert (inst.r, inst.n) == (r, n)
    assert hub_degree(eps) == r
    assert inst.graph.degree(1) == r
    assert all(inst.graph.degree(j) == n - 2 + (j <= r + 1) for j in range(2, n + 1))
    assert inst.t_star == 2.5
    assert inst.expected_upper == 5.0 and inst.expected_lower == 5.0 - eps


def test_hub_disagreement_at_start():
    inst = build_instance(1.0)
    r = run(inst.graph, inst.x0, inst.params, horizon=0.1)
    assert disagreement_trajectory(r, 1).values[0] == -5 * inst.r


@pytest.mark.parametrize("eps", [0.0, 5.0, -1.0, 7.0])
def test_build_instance_rejects_out_of_range(eps):
    with pytest.raises(ValueError):
        build_instance(eps)


def test_tightness_eps_2():
    outcome = verify_tightness(build_instance(2.0))
    assert outcome.passed, outcome


def test_tightness_eps_1():
    # Stated requirement: consensus time inside [4, 5] for the epsilon = 1 instance.
    outcome = verify_tightness(build_instance(1.0))
    assert outcome.passed, outcome
