"""Post-hoc analysis of simulation runs.

Covers exact local-disagreement trajectories, α-consensus time, the
invariant suite every protocol run must satisfy, and a brute-force search
that checks the closed-form inter-update durations against an adversary.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .engine import (
    PiecewiseLinearTrajectory,
    SimulationResult,
    reconstruct_neighbor_state,
    state_at,
)
from .protocol import ProtocolParams, sign, t_star

BAND_ATOL = 1e-9
"""Absolute slack on ``|z| <= alpha`` and on state-range checks."""


def _evaluate(tr: PiecewiseLinearTrajectory, times: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Exact values and right-slopes of ``tr`` at sorted ``times``."""
    bps = np.asarray(tr.breakpoints)
    vals = np.asarray(tr.values)
    slopes = np.asarray(tr.slopes)
    k = np.clip(np.searchsorted(bps, times, side="right") - 1, 0, len(slopes) - 1)
    out = vals[k] + slopes[k] * (times - bps[k])
    exact = bps[k] == times
    out[exact] = vals[k][exact]
    return out, slopes[k]


@dataclass(frozen=True)
class DisagreementTrajectory:
    """Piecewise-linear local disagreement ``z_i`` of one agent."""

    agent: int
    breakpoints: np.ndarray
    values: np.ndarray
    slopes: np.ndarray = field(repr=False)

    def value_at(self, t: float) -> float:
        return float(np.interp(t, self.breakpoints, self.values))


def disagreement_trajectory(result: SimulationResult, i: int) -> DisagreementTrajectory:
    own = result.trajectory(i)
    nbrs = result.graph.neighbors_of(i)
    times = np.unique(np.concatenate(
        [np.asarray(own.breakpoints)]
        + [np.asarray(result.trajectory(j).breakpoints) for j in nbrs]
    ))
    xi, si = _evaluate(own, times)
    z = np.zeros_like(times)
    dz = len(nbrs) * si
    for j in nbrs:
        xj, sj = _evaluate(result.trajectory(j), times)
        z += xi - xj
        dz -= sj
    return DisagreementTrajectory(agent=i, breakpoints=times, values=z, slopes=dz[:-1])


def _last_exit(traj: DisagreementTrajectory, alpha: float) -> float | None:
    """Supremum of times with ``|z| > alpha + BAND_ATOL``; None if still outside at the end."""
    thr = alpha + BAND_ATOL
    v = traj.values
    outside = np.flatnonzero(np.abs(v) > thr)
    if outside.size == 0:
        return 0.0
    k = int(outside[-1])
    if k == len(v) - 1:
        return None
    t = traj.breakpoints
    bound = math.copysign(thr, v[k])
    frac = (v[k] - bound) / (v[k] - v[k + 1])
    return float(t[k] + frac * (t[k + 1] - t[k]))


@dataclass(frozen=True)
class ConsensusReport:
    """α-consensus time of a run against the ``2 gamma T*`` deadline.

    ``consensus_time`` is None when some agent is still outside the band at
    the horizon.
    """

    consensus_time: float | None
    entry_times: tuple[float | None, ...]
    bound: float

    @property
    def achieved(self) -> bool:
        return self.consensus_time is not None

    @property
    def satisfied(self) -> bool:
        return self.achieved and self.consensus_time <= self.bound + BAND_ATOL

    def to_lines(self) -> list[str]:
        shown = "not_achieved" if self.consensus_time is None else f"{self.consensus_time:.12g}"
        status = "pass" if self.satisfied else "fail"
        return [f"check=consensus_time status={status} detail=time={shown},bound={self.bound:.12g}"]


def consensus_time(result: SimulationResult) -> ConsensusReport:
    alpha = result.params.alpha
    entries = tuple(
        _last_exit(disagreement_trajectory(result, i), alpha) for i in range(1, result.graph.n + 1)
    )
    overall = None if any(e is None for e in entries) else max(entries)
    bound = 2.0 * result.params.gamma * t_star(result.x0, result.params.beta)
    return ConsensusReport(consensus_time=overall, entry_times=entries, bound=bound)


# -- invariant suite ---------------------------------------------------------

@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    agent: int | None = None
    time: float | None = None

    def to_line(self) -> str:
        status = "pass" if self.passed else "fail"
        detail = self.detail or "ok"
        if self.agent is not None:
            detail += f",agent={self.agent},time={self.time!r}"
        return f"check={self.name} status={status} detail={detail}"


@dataclass(frozen=True)
class InvariantReport:
    checks: tuple[CheckResult, ...]

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def __getitem__(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_lines(self) -> list[str]:
        return [c.to_line() for c in self.checks]


def _fail(name: str, detail: str, agent: int, t: float) -> CheckResult:
    return CheckResult(name, False, detail, agent, float(t))


def _check_first_update(result: SimulationResult) -> CheckResult:
    for i in range(1, result.graph.n + 1):
        if result.trajectory(i).breakpoints[0] != 0.0:
            return _fail("first_update_at_zero", "first update after 0", i, result.trajectory(i).start)
    return CheckResult("first_update_at_zero", True)


def _check_event_spacing(result: SimulationResult) -> CheckResult:
    prev: dict[int, tuple[float, float]] = {}
    for e in result.events:
        if e.agent in prev:
            t, d = prev[e.agent]
            if abs(e.time - (t + d)) > 1e-12 * max(1.0, abs(e.time)):
                return _fail("event_spacing", f"gap {e.time - t!r} != planned {d!r}", e.agent, e.time)
        prev[e.agent] = (e.time, e.plan.duration)
    return CheckResult("event_spacing", True)


def _check_slope_bound(result: SimulationResult) -> CheckResult:
    limit = result.params.effective_beta + 1e-12
    for i, tr in enumerate(result.trajectories, start=1):
        for k, s in enumerate(tr.slopes):
            if abs(s) > limit:
                return _fail("slope_bound", f"|slope|={abs(s)!r}>{limit!r}", i, tr.breakpoints[k])
    for b in result.broadcasts:
        if abs(b.control) > limit:
            return _fail("slope_bound", f"|control|={abs(b.control)!r}", b.agent, b.time)
    return CheckResult("slope_bound", True)


def _check_continuity(result: SimulationResult) -> CheckResult:
    for i, tr in enumerate(result.trajectories, start=1):
        for k, s in enumerate(tr.slopes):
            expected = tr.values[k] + s * (tr.breakpoints[k + 1] - tr.breakpoints[k])
            if abs(tr.values[k + 1] - expected) > 1e-12 * max(1.0, abs(expected)):
                return _fail("continuity", "value jump", i, tr.breakpoints[k + 1])
    return CheckResult("continuity", True)


def _check_containment(result: SimulationResult) -> CheckResult:
    lo = min(result.x0) - BAND_ATOL
    hi = max(result.x0) + BAND_ATOL
    for i, tr in enumerate(result.trajectories, start=1):
        for t, v in zip(tr.breakpoints, tr.values):
            if not lo <= v <= hi:
                return _fail("containment", f"x={v!r} outside [{lo!r},{hi!r}]", i, t)
    return CheckResult("containment", True)


def _check_neighbor_averaging(result: SimulationResult) -> CheckResult:
    alpha = result.params.alpha
    for e in result.events:
        if abs(e.z) > alpha:
            continue
        t_next = e.time + e.plan.duration
        if t_next > result.horizon:
            continue
        nbrs = result.graph.neighbors_of(e.agent)
        mean = sum(state_at(result, j, e.time) for j in nbrs) / len(nbrs)
        got = state_at(result, e.agent, t_next)
        if abs(got - mean) > BAND_ATOL:
            return _fail("neighbor_averaging", f"x={got!r} vs mean {mean!r}", e.agent, e.time)
    return CheckResult("neighbor_averaging", True)


def _check_absorption(result: SimulationResult, zs: Sequence[DisagreementTrajectory]) -> CheckResult:
    alpha = result.params.alpha
    for zt in zs:
        v = zt.values
        entry = None
        if abs(v[0]) <= alpha:
            entry = 0
        else:
            for k in range(len(v) - 1):
                if (v[k] > alpha and v[k + 1] <= alpha) or (v[k] < -alpha and v[k + 1] >= -alpha):
                    entry = k + 1
                    break
        if entry is None:
            continue
        after = np.abs(v[entry:]) > alpha + BAND_ATOL
        if after.any():
            m = entry + int(np.argmax(after))
            return _fail("absorption", f"|z|={abs(v[m])!r} after entry", zt.agent, zt.breakpoints[m])
    return CheckResult("absorption", True)


def _check_outside_monotonicity(
    result: SimulationResult, zs: Sequence[DisagreementTrajectory]
) -> CheckResult:
    alpha = result.params.alpha
    for e in result.events:
        if abs(e.z) <= alpha:
            continue
        zt = zs[e.agent - 1]
        t_end = min(e.time + e.plan.duration, result.horizon)
        a = int(np.searchsorted(zt.breakpoints, e.time, side="left"))
        b = int(np.searchsorted(zt.breakpoints, t_end, side="right"))
        steps = np.diff(zt.values[a:b]) * sign(e.z)
        if steps.size and steps.max() > BAND_ATOL:
            m = a + int(np.argmax(steps))
            return _fail("outside_monotonicity", "z moved away from band", e.agent, zt.breakpoints[m])
    return CheckResult("outside_monotonicity", True)


def _check_reconstruction(result: SimulationResult) -> CheckResult:
    for e in result.events:
        xi = state_at(result, e.agent, e.time)
        z = 0.0
        for j in result.graph.neighbors_of(e.agent):
            rebuilt = reconstruct_neighbor_state(result.broadcasts, j, e.time)
            actual = state_at(result, j, e.time)
            if abs(rebuilt - actual) > 1e-12:
                return _fail("reconstruction", f"neighbor {j}: {rebuilt!r} vs {actual!r}", e.agent, e.time)
            z += xi - rebuilt
        if abs(z - e.z) > BAND_ATOL:
            return _fail("reconstruction", f"z={z!r} vs logged {e.z!r}", e.agent, e.time)
    return CheckResult("reconstruction", True)


def check_invariants(result: SimulationResult) -> InvariantReport:
    """Run every structural invariant on ``result``; failures carry a counterexample."""
    zs = [disagreement_trajectory(result, i) for i in range(1, result.graph.n + 1)]
    return InvariantReport(checks=(
        _check_first_update(result),
        _check_event_spacing(result),
        _check_slope_bound(result),
        _check_continuity(result),
        _check_containment(result),
        _check_neighbor_averaging(result),
        _check_absorption(result, zs),
        _check_outside_monotonicity(result, zs),
        _check_reconstruction(result),
    ))


# -- max-min oracle ----------------------------------------------------------

def adversarial_duration_oracle(
    z0: float,
    n_i: int,
    params: ProtocolParams,
    pieces: int = 4,
    grid: int = 9,
    tol: float = 1e-6,
) -> float:
    """Longest inter-update duration no discretized adversary can break.

    The neighbors act only through their summed input, which ranges over
    ``[-n_i beta~, n_i beta~]``. The adversary picks one of ``grid`` evenly
    spaced levels on each of ``pieces`` equal subintervals and every such
    sequence is enumerated. Inside the band the ego agent also tries every
    constant input on a ``grid``-level lattice of ``[-beta~, beta~]``; outside
    it pushes at full effort toward the band.

    Constraint: inside, ``|z|`` must stay within ``alpha``; outside with
    ``z0 < -alpha`` the disagreement must not exceed ``alpha`` (mirrored for
    ``z0 > alpha``). Durations are located by bisection to ``tol``.
    """
    if pieces < 1 or grid < 3:
        raise ValueError(f"need pieces >= 1 and grid >= 3, got pieces={pieces}, grid={grid}")
    if n_i < 1:
        raise ValueError(f"n_i must be positive, got {n_i}")
    alpha = params.alpha
    bt = params.effective_beta
    levels = np.linspace(-n_i * bt, n_i * bt, grid)
    seqs = np.array(list(itertools.product(levels, repeat=pieces)))
    cum = np.hstack([np.zeros((len(seqs), 1)), np.cumsum(seqs, axis=1)])
    fractions = np.arange(pieces + 1) / pieces
    slack = 1e-12 * max(1.0, abs(z0), alpha)

    inside = abs(z0) <= alpha
    if inside:
        egos = sorted(set(np.linspace(-bt, bt, grid).tolist()) | {-(z0 / alpha) * bt})
    else:
        egos = [-bt * sign(z0)]

    def feasible(u: float, duration: float) -> bool:
        z = z0 + n_i * u * duration * fractions - (duration / pieces) * cum
        if inside:
            return bool(np.all(np.abs(z) <= alpha + slack))
        if z0 < 0:
            return bool(np.all(z <= alpha + slack))
        return bool(np.all(z >= -alpha - slack))

    best = 0.0
    scale = (abs(z0) + alpha) / (n_i * bt)
    for u in egos:
        lo, hi = 0.0, scale
        doublings = 0
        while feasible(u, hi):
            lo, hi = hi, 2.0 * hi
            doublings += 1
            if doublings > 60:
                raise RuntimeError("adversary cannot bound the duration")
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if feasible(u, mid):
                lo = mid
            else:
                hi = mid
        best = max(best, lo)
    return best
