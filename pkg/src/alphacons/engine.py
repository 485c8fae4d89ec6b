"""Deterministic discrete-event execution of the self-triggered protocol.

Each agent holds a constant input between its own update instants, so every
state trajectory is piecewise linear and is stored exactly as breakpoints,
values and slopes. The event queue is keyed by ``(time, agent)``; ties at one
timestamp run in ascending agent order.

Event times come from repeated floating-point addition and drift by a few
ulps. Comparisons against a horizon or a counting window therefore treat any
time within ``TIME_RTOL * max(1, |bound|)`` of the bound as being at the bound.
"""

from __future__ import annotations

import bisect
import csv
import heapq
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Iterator, Sequence

import numpy as np

from .graph import Graph, is_connected, laplacian
from .protocol import ProtocolParams, UpdatePlan, plan_update, t_star

TIME_RTOL = 1e-9


class SimulationError(ValueError):
    """The engine refused its inputs (disconnected graph, bad x0, bad horizon)."""


def time_tolerance(bound: float) -> float:
    return TIME_RTOL * max(1.0, abs(bound))


def is_before(t: float, bound: float) -> bool:
    """``t < bound`` with float drift near ``bound`` counted as reaching it."""
    return t < bound - time_tolerance(bound)


@dataclass(frozen=True)
class BroadcastRecord:
    agent: int
    time: float
    state: float
    control: float


@dataclass(frozen=True)
class UpdateEvent:
    """One executed update: agent ``agent`` at its ``k``-th instant (k from 1)."""

    time: float
    agent: int
    k: int
    z: float
    plan: UpdatePlan


@dataclass(frozen=True)
class PiecewiseLinearTrajectory:
    """Continuous piecewise-linear function on ``[breakpoints[0], breakpoints[-1]]``.

    ``slopes[k]`` is the derivative on ``[breakpoints[k], breakpoints[k + 1])``.
    """

    breakpoints: tuple[float, ...]
    values: tuple[float, ...]
    slopes: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.values) != len(self.breakpoints):
            raise ValueError("values and breakpoints differ in length")
        if len(self.slopes) != max(len(self.breakpoints) - 1, 0):
            raise ValueError("need exactly one slope per segment")

    @property
    def start(self) -> float:
        return self.breakpoints[0]

    @property
    def end(self) -> float:
        return self.breakpoints[-1]

    def segment_index(self, t: float) -> int:
        k = bisect.bisect_right(self.breakpoints, t) - 1
        return min(max(k, 0), max(len(self.slopes) - 1, 0))

    def value_at(self, t: float) -> float:
        if not self.slopes:
            return self.values[0]
        k = self.segment_index(t)
        if t == self.breakpoints[k]:
            return self.values[k]
        if t == self.breakpoints[k + 1]:
            return self.values[k + 1]
        return self.values[k] + self.slopes[k] * (t - self.breakpoints[k])

    def slope_at(self, t: float) -> float:
        """Right derivative at ``t``."""
        return self.slopes[self.segment_index(t)] if self.slopes else 0.0

    def sample(self, times: np.ndarray) -> np.ndarray:
        return np.interp(times, self.breakpoints, self.values)


class BroadcastLog(Sequence[BroadcastRecord]):
    """Time-ordered broadcast records, indexed per agent for lookups."""

    def __init__(self, records: Iterable[BroadcastRecord]):
        self._records = tuple(records)
        self._by_agent: dict[int, list[BroadcastRecord]] = {}
        for rec in self._records:
            self._by_agent.setdefault(rec.agent, []).append(rec)
        self._times = {a: [r.time for r in recs] for a, recs in self._by_agent.items()}

    def __getitem__(self, index):  # type: ignore[override]
        return self._records[index]

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self) -> Iterator[BroadcastRecord]:
        return iter(self._records)

    def for_agent(self, agent: int) -> tuple[BroadcastRecord, ...]:
        return tuple(self._by_agent.get(agent, ()))

    def latest(self, agent: int, t: float) -> BroadcastRecord | None:
        """Most recent broadcast of ``agent`` at a time ``<= t``."""
        times = self._times.get(agent)
        if not times:
            return None
        k = bisect.bisect_right(times, t) - 1
        return self._by_agent[agent][k] if k >= 0 else None


@dataclass(frozen=True)
class SimulationResult:
    graph: Graph
    params: ProtocolParams
    x0: tuple[float, ...]
    horizon: float
    trajectories: tuple[PiecewiseLinearTrajectory, ...]
    events: tuple[UpdateEvent, ...]
    broadcasts: BroadcastLog

    def trajectory(self, agent: int) -> PiecewiseLinearTrajectory:
        self.graph._check_node(agent)
        return self.trajectories[agent - 1]

    def events_of(self, agent: int) -> list[UpdateEvent]:
        return [e for e in self.events if e.agent == agent]


def default_horizon(x0: Sequence[float], g: Graph, params: ProtocolParams) -> float:
    """``2 gamma T*``; for an already-agreed start, one full period of the slowest agent."""
    horizon = 2.0 * params.gamma * t_star(x0, params.beta)
    if horizon > 0:
        return horizon
    return params.alpha / (params.effective_beta * min(g.degrees))


def run(
    g: Graph,
    x0: Sequence[float],
    params: ProtocolParams,
    horizon: float | None = None,
) -> SimulationResult:
    """Execute the protocol on ``g`` from ``x0`` over ``[0, horizon)``.

    Args:
        g: Connected graph with at least two nodes.
        x0: Initial state of agent ``i`` at index ``i - 1``.
        params: Protocol parameters; ``gamma > 1`` gives the time-stretched variant.
        horizon: End of the run. Defaults to :func:`default_horizon`.

    Raises:
        SimulationError: On a disconnected graph, non-finite or mis-sized ``x0``,
            or a non-positive horizon.
    """
    n = g.n
    if n < 2:
        raise SimulationError("need at least two agents")
    if not is_connected(g):
        raise SimulationError("communication graph is not connected")
    x0 = tuple(float(v) for v in x0)
    if len(x0) != n:
        raise SimulationError(f"x0 has {len(x0)} entries, graph has {n} nodes")
    if not all(math.isfinite(v) for v in x0):
        raise SimulationError("x0 contains non-finite entries")
    if horizon is None:
        horizon = default_horizon(x0, g, params)
    horizon = float(horizon)
    if not (math.isfinite(horizon) and horizon > 0):
        raise SimulationError(f"horizon must be positive and finite, got {horizon}")

    # state of agent i (0-based) is last_x[i] + last_u[i] * (t - last_t[i])
    last_t = [0.0] * n
    last_x = list(x0)
    last_u = [0.0] * n
    bps: list[list[float]] = [[] for _ in range(n)]
    vals: list[list[float]] = [[] for _ in range(n)]
    slopes: list[list[float]] = [[] for _ in range(n)]
    counts = [0] * n
    events: list[UpdateEvent] = []
    broadcasts: list[BroadcastRecord] = []

    queue = [(0.0, agent) for agent in range(1, n + 1)]
    heapq.heapify(queue)
    cutoff = horizon - time_tolerance(horizon)

    while queue:
        t, agent = heapq.heappop(queue)
        if t >= cutoff:
            break
        i = agent - 1
        xi = last_x[i] + last_u[i] * (t - last_t[i])
        z = 0.0
        for j in g.neighbors[i]:
            z += xi - (last_x[j - 1] + last_u[j - 1] * (t - last_t[j - 1]))
        plan = plan_update(z, len(g.neighbors[i]), params)
        t_next = t + plan.duration
        if not t_next > t:
            raise RuntimeError(f"agent {agent} made no progress at t={t!r}")

        if bps[i]:
            slopes[i].append(last_u[i])
        bps[i].append(t)
        vals[i].append(xi)
        last_t[i], last_x[i], last_u[i] = t, xi, plan.control
        counts[i] += 1
        events.append(UpdateEvent(time=t, agent=agent, k=counts[i], z=z, plan=plan))
        broadcasts.append(BroadcastRecord(agent=agent, time=t, state=xi, control=plan.control))
        heapq.heappush(queue, (t_next, agent))

    trajectories = []
    for i in range(n):
        end_value = last_x[i] + last_u[i] * (horizon - last_t[i])
        trajectories.append(
            PiecewiseLinearTrajectory(
                breakpoints=tuple(bps[i]) + (horizon,),
                values=tuple(vals[i]) + (end_value,),
                slopes=tuple(slopes[i]) + (last_u[i],),
            )
        )
    return SimulationResult(
        graph=g,
        params=params,
        x0=x0,
        horizon=horizon,
        trajectories=tuple(trajectories),
        events=tuple(events),
        broadcasts=BroadcastLog(broadcasts),
    )


def reconstruct_neighbor_state(
    broadcasts: BroadcastLog | Iterable[BroadcastRecord], j: int, t: float
) -> float:
    """State of agent ``j`` at ``t`` as a neighbor infers it from ``j``'s broadcasts.

    Uses the latest broadcast at or before ``t`` and extrapolates with the
    control it announced.
    """
    if not isinstance(broadcasts, BroadcastLog):
        broadcasts = BroadcastLog(broadcasts)
    rec = broadcasts.latest(j, t)
    if rec is None:
        raise ValueError(f"agent {j} has no broadcast at or before t={t}")
    if rec.time == t:
        return rec.state
    return rec.state + rec.control * (t - rec.time)


def communication_cost(result: SimulationResult, window_end: float) -> tuple[list[int], int]:
    """Per-agent update counts over ``[0, window_end)`` and their sum."""
    if window_end > result.horizon + time_tolerance(result.horizon):
        raise ValueError(f"window_end {window_end} exceeds horizon {result.horizon}")
    counts = [0] * result.graph.n
    for e in result.events:
        if is_before(e.time, window_end):
            counts[e.agent - 1] += 1
    return counts, sum(counts)


def state_at(result: SimulationResult, i: int, t: float) -> float:
    if not 0.0 <= t <= result.horizon:
        raise ValueError(f"t={t} outside [0, {result.horizon}]")
    return result.trajectory(i).value_at(t)


# -- CSV export --------------------------------------------------------------

def _open_text(dest: str | Path | IO[str]):
    if isinstance(dest, (str, Path)):
        return open(dest, "w", newline=""), True
    return dest, False


def all_breakpoints(result: SimulationResult) -> np.ndarray:
    return np.unique(np.concatenate([np.asarray(tr.breakpoints) for tr in result.trajectories]))


def write_trajectory_csv(result: SimulationResult, dest: str | Path | IO[str]) -> None:
    """Rows ``time,agent,x,z`` on the union of all agents' breakpoints."""
    times = all_breakpoints(result)
    states = np.vstack([tr.sample(times) for tr in result.trajectories])
    disagreements = laplacian(result.graph) @ states
    fh, owned = _open_text(dest)
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["time", "agent", "x", "z"])
        for col, t in enumerate(times):
            for i in range(result.graph.n):
                writer.writerow([
                    f"{t:.12g}", i + 1, repr(float(states[i, col])),
                    repr(float(disagreements[i, col])),
                ])
    finally:
        if owned:
            fh.close()


def write_event_csv(result: SimulationResult, dest: str | Path | IO[str]) -> None:
    fh, owned = _open_text(dest)
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["agent", "k", "time", "z", "control", "duration"])
        for e in result.events:
            writer.writerow([
                e.agent, e.k, repr(e.time), repr(e.z), repr(e.plan.control), repr(e.plan.duration),
            ])
    finally:
        if owned:
            fh.close()


def event_csv_text(result: SimulationResult) -> str:
    buf = io.StringIO()
    write_event_csv(result, buf)
    return buf.getvalue()
