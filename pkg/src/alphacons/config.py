"""Flat ``key = value`` run configuration.

Recognized keys::

    graph        fig6 | path:<n> | complete:<n> | worstcase:<n>:<r>
                 | edges:<n>:<i-j>,<i-j>,... | <edge-list file>
    x0           initial states, whitespace or comma separated
    alpha, beta  positive reals
    gamma        real >= 1 (default 1)
    horizon      auto (= 2 gamma T*) or seconds
    trajectories optional CSV output path
    events       optional CSV output path
    seed         integer (default 0)

Blank lines and ``#`` comments are ignored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from .graph import (
    Graph,
    GraphError,
    build_graph,
    complete_graph,
    fig6_graph,
    path_graph,
    read_edge_list,
    worst_case_graph,
)
from .protocol import ProtocolParams


class ConfigError(ValueError):
    pass


KEYS = ("graph", "x0", "alpha", "beta", "gamma", "horizon", "trajectories", "events", "seed")
REQUIRED = ("graph", "x0", "alpha", "beta")


@dataclass(frozen=True)
class RunConfig:
    graph: str
    x0: tuple[float, ...]
    alpha: float
    beta: float
    gamma: float = 1.0
    horizon: float | None = None
    trajectories: str | None = None
    events: str | None = None
    seed: int = 0

    @property
    def params(self) -> ProtocolParams:
        return ProtocolParams(alpha=self.alpha, beta=self.beta, gamma=self.gamma)


def resolve_graph(spec: str, base_dir: Path | None = None) -> Graph:
    """Turn a graph spec into a :class:`Graph`; unknown specs are read as files."""
    head, _, rest = spec.partition(":")
    try:
        if spec == "fig6":
            return fig6_graph()
        if head == "path":
            return path_graph(int(rest))
        if head == "complete":
            return complete_graph(int(rest))
        if head == "worstcase":
            n, r = rest.split(":")
            return worst_case_graph(int(n), int(r))
        if head == "edges":
            n, _, body = rest.partition(":")
            pairs = [p.split("-") for p in body.split(",") if p]
            return build_graph(int(n), [(int(a), int(b)) for a, b in pairs])
    except (ValueError, GraphError) as exc:
        raise ConfigError(f"bad graph spec {spec!r}: {exc}") from None
    path = Path(spec)
    if not path.is_absolute() and base_dir is not None:
        path = base_dir / path
    if not path.exists():
        raise ConfigError(f"unknown graph {spec!r} (not a builtin and no such file)")
    try:
        return read_edge_list(path)
    except GraphError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def graph_spec(g: Graph) -> str:
    return f"edges:{g.n}:" + ",".join(f"{i}-{j}" for i, j in g.edges)


def _float(key: str, text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"{key}: not a number: {text!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"{key}: must be finite")
    return value


def parse_config(text: str) -> RunConfig:
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        if key not in KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value
    missing = [k for k in REQUIRED if k not in raw]
    if missing:
        raise ConfigError(f"missing keys: {', '.join(missing)}")

    x0 = tuple(_float("x0", v) for v in raw["x0"].replace(",", " ").split())
    if not x0:
        raise ConfigError("x0 is empty")
    horizon_text = raw.get("horizon", "auto")
    horizon = None if horizon_text == "auto" else _float("horizon", horizon_text)
    if horizon is not None and horizon <= 0:
        raise ConfigError("horizon must be positive")
    try:
        seed = int(raw.get("seed", "0"))
    except ValueError:
        raise ConfigError(f"seed: not an integer: {raw['seed']!r}") from None

    cfg = RunConfig(
        graph=raw["graph"],
        x0=x0,
        alpha=_float("alpha", raw["alpha"]),
        beta=_float("beta", raw["beta"]),
        gamma=_float("gamma", raw.get("gamma", "1")),
        horizon=horizon,
        trajectories=raw.get("trajectories") or None,
        events=raw.get("events") or None,
        seed=seed,
    )
    try:
        cfg.params
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def format_config(cfg: RunConfig) -> str:
    lines = [
        f"graph = {cfg.graph}",
        "x0 = " + " ".join(repr(v) for v in cfg.x0),
        f"alpha = {cfg.alpha!r}",
        f"beta = {cfg.beta!r}",
        f"gamma = {cfg.gamma!r}",
        f"horizon = {'auto' if cfg.horizon is None else repr(cfg.horizon)}",
    ]
    if cfg.trajectories:
        lines.append(f"trajectories = {cfg.trajectories}")
    if cfg.events:
        lines.append(f"events = {cfg.events}")
    lines.append(f"seed = {cfg.seed}")
    return "\n".join(lines) + "\n"
