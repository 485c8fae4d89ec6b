"""Self-triggered update rules for single-integrator α-consensus.

Every function here is pure. The time-stretched variant (``gamma > 1``) is
the same rule evaluated with the reduced input bound ``beta / gamma``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .graph import Graph


@dataclass(frozen=True)
class ProtocolParams:
    """Consensus bound, input bound and time-stretch factor.

    Args:
        alpha: Bound on every local disagreement once consensus is reached.
        beta: Magnitude bound on each agent's input.
        gamma: Deadline multiplier; inputs are bounded by ``beta / gamma``.
    """

    alpha: float
    beta: float
    gamma: float = 1.0

    def __post_init__(self) -> None:
        for name in ("alpha", "beta", "gamma"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.alpha <= 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if self.beta <= 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if self.gamma < 1:
            raise ValueError(f"gamma must be >= 1, got {self.gamma}")

    @property
    def effective_beta(self) -> float:
        return self.beta / self.gamma


@dataclass(frozen=True)
class UpdatePlan:
    """Time until the next update and the constant input applied meanwhile."""

    duration: float
    control: float


def local_disagreement(states: Sequence[float], g: Graph, i: int) -> float:
    """Sum of ``x_i - x_j`` over neighbors ``j`` of agent ``i`` (1-indexed)."""
    if len(states) != g.n:
        raise ValueError(f"expected {g.n} states, got {len(states)}")
    xi = states[i - 1]
    return sum(xi - states[j - 1] for j in g.neighbors_of(i))


def t_star(x0: Sequence[float], beta: float) -> float:
    """Minimum consensus time under continuous communication."""
    if len(x0) == 0:
        raise ValueError("x0 must be nonempty")
    return (max(x0) - min(x0)) / (2.0 * beta)


def sign(value: float) -> float:
    if value > 0:
        return 1.0
    if value < 0:
        return -1.0
    return 0.0


def time_optimal_control(z: float, beta: float) -> float:
    return -beta * sign(z)


def plan_update(z: float, n_i: int, params: ProtocolParams) -> UpdatePlan:
    """Next inter-update duration and input for an agent with ``n_i`` neighbors.

    Inside the band (``|z| <= alpha``) the agent steers to its neighbors'
    average over a fixed period ``alpha / (beta~ n_i)``. Outside it pushes at
    full effort for as long as no neighbor behavior can overshoot the far
    side of the band. The two branches coincide at ``|z| == alpha``.
    """
    if n_i < 1:
        raise ValueError(f"agent must have at least one neighbor, got n_i={n_i}")
    alpha = params.alpha
    bt = params.effective_beta
    if abs(z) <= alpha:
        return UpdatePlan(duration=alpha / (bt * n_i), control=-(z / alpha) * bt)
    return UpdatePlan(duration=(abs(z) + alpha) / (2.0 * bt * n_i), control=-bt * sign(z))
