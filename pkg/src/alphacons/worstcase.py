"""Hub-plus-clique instances whose consensus time approaches the ``2 T*`` bound.

Agent 1 starts at 0 and touches ``r`` members of a clique that starts at 5.
The sizing rules below are specific to that setting (``alpha = 3``,
``beta = 1``, levels 0 and 5) and are not meant to generalize.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .analysis import consensus_time
from .engine import run
from .graph import Graph, worst_case_graph
from .protocol import ProtocolParams, t_star

ALPHA = 3.0
BETA = 1.0
LOW, HIGH = 0.0, 5.0


def n_mu_r(mu: float, r: int) -> int:
    """Clique size that keeps agents ``2..n`` near 5 after time ``mu``.

    ``1 + 16 r / (5 r + 3)`` is not an integer in general and is rounded up
    before taking the maximum.
    """
    if mu <= 0:
        raise ValueError(f"mu must be positive, got {mu}")
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    half = mu / 2.0
    terms = (
        8,
        1 + math.ceil(4.0 / half),
        math.ceil(5.0 / (mu - half)),
        math.ceil(1 + 16 * r / (5 * r + 3)),
        3 * r - 7,
    )
    return max(terms) + 1


def hub_degree(epsilon: float) -> int:
    return max(math.ceil(2 * ALPHA / epsilon), math.ceil(ALPHA / (HIGH - epsilon)))


@dataclass(frozen=True)
class WorstCaseInstance:
    epsilon: float
    r: int
    n: int
    graph: Graph
    x0: tuple[float, ...]
    params: ProtocolParams

    @property
    def t_star(self) -> float:
        return t_star(self.x0, self.params.beta)

    @property
    def expected_lower(self) -> float:
        return 2 * self.t_star - self.epsilon

    @property
    def expected_upper(self) -> float:
        return 2 * self.t_star


def build_instance(epsilon: float) -> WorstCaseInstance:
    if not 0 < epsilon < HIGH - LOW:
        raise ValueError(f"epsilon must lie in (0, 5), got {epsilon}")
    r = hub_degree(epsilon)
    n = n_mu_r(epsilon / 2.0, r)
    return WorstCaseInstance(
        epsilon=epsilon,
        r=r,
        n=n,
        graph=worst_case_graph(n, r),
        x0=(LOW,) + (HIGH,) * (n - 1),
        params=ProtocolParams(alpha=ALPHA, beta=BETA, gamma=1.0),
    )


@dataclass(frozen=True)
class TightnessResult:
    passed: bool
    consensus_time: float | None
    lower: float
    upper: float


def verify_tightness(instance: WorstCaseInstance, margin: float = 0.5) -> TightnessResult:
    """Simulate the instance and test ``2T* - epsilon <= T <= 2T*`` (upper slack 1e-6)."""
    horizon = instance.expected_upper + margin
    result = run(instance.graph, instance.x0, instance.params, horizon=horizon)
    measured = consensus_time(result).consensus_time
    passed = (
        measured is not None
        and instance.expected_lower <= measured <= instance.expected_upper + 1e-6
    )
    return TightnessResult(
        passed=passed,
        consensus_time=measured,
        lower=instance.expected_lower,
        upper=instance.expected_upper,
    )
