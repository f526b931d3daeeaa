"""Consensus kernels: weighted-average and min-consensus iterations.

The weighted-average update is
    x_i(k+1) = x_i(k) + (eps / w_i) * sum_{j in N_i} (x_j(k) - x_i(k)),
with all updates reading round-k values (Jacobi contract). Neighbor
accumulation runs in ascending neighbor-id order; the simulation harness
reuses `wac_step_value` so its traces are bit-identical to `wac_run`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

from . import graph as graphmod
from .graph import DisconnectedGraphError, Graph


class IsolatedNodeError(ValueError):
    """An operation needs every node to have at least one neighbor."""


class ConfigurationError(ValueError):
    """Invalid consensus configuration (step size, tolerances, lengths)."""


@dataclass(frozen=True)
class ConsensusConfig:
    """Step-size policy and stopping control for one consensus run.

    If `epsilon` is set it is used directly (must lie in (0, Delta) with
    Delta = min_i w_i/d_i, unless `allow_unstable_epsilon`); otherwise
    `epsilon_fraction` of Delta is used.
    """

    epsilon: float | None = None
    epsilon_fraction: float = 0.9
    step_tolerance: float = 1e-12
    spread_tolerance: float = 1e-10
    max_iterations: int = 10**6
    record_trace: bool = False
    allow_unstable_epsilon: bool = False

    def __post_init__(self):
        if not (0.0 < self.epsilon_fraction < 1.0):
            raise ConfigurationError("epsilon_fraction must lie in (0, 1)")
        if self.step_tolerance <= 0 or self.spread_tolerance <= 0:
            raise ConfigurationError("tolerances must be positive")
        if self.max_iterations < 1:
            raise ConfigurationError("max_iterations must be >= 1")

    def with_epsilon(self, epsilon: float) -> "ConsensusConfig":
        return replace(self, epsilon=epsilon)


@dataclass
class ConsensusRun:
    """Outcome of one weighted-average-consensus iteration."""

    final_states: list[float]
    iterations_used: int
    converged: bool
    consensus_value: float
    epsilon: float
    max_step_bound: float
    trace: list[list[float]] | None = None
    residual_trace: list[float] = field(default_factory=list)


def validate_positive(values: Sequence[float], name: str) -> None:
    for i, v in enumerate(values):
        if not v > 0:
            raise ValueError(f"{name}[{i}] = {v} must be positive")


def max_step_size(w: Sequence[float], g: Graph) -> float:
    """Stability bound Delta = min_i w_i / d_i."""
    if any(d == 0 for d in g.degrees):
        raise IsolatedNodeError("graph has an isolated node")
    validate_positive(w, "w")
    if len(w) != g.node_count:
        raise ConfigurationError("weight vector length mismatch")
    return min(wi / di for wi, di in zip(w, g.degrees))


def neighbor_weight_sums(g: Graph, y: Sequence[float], k: int) -> list[float]:
    """w_i = sum over neighbors j of y_j**k, in ascending neighbor order."""
    if k < 0:
        raise ValueError("exponent k must be >= 0")
    validate_positive(y, "y")
    if any(d == 0 for d in g.degrees):
        raise IsolatedNodeError("neighbor weight sum undefined for isolated node")
    out = []
    for nbrs in g.adjacency:
        acc = 0.0
        for j in nbrs:
            acc += y[j] ** k
        out.append(acc)
    return out


def exact_consensus_target(x0: Sequence[float], w: Sequence[float]) -> float:
    """Closed-form weighted average sum(w_i x_i(0)) / sum(w_i)."""
    validate_positive(w, "w")
    return math.fsum(wi * xi for wi, xi in zip(w, x0)) / math.fsum(w)


def wac_step_value(x_i: float, neighbor_states: Sequence[float], scale: float) -> float:
    """One node update; `scale` = eps / w_i. Shared with the sim harness."""
    acc = 0.0
    for xj in neighbor_states:
        acc += xj - x_i
    return x_i + scale * acc


def _spread(x: list[float]) -> float:
    return max(x) - min(x)


def resolve_epsilon(cfg: ConsensusConfig, delta: float) -> float:
    if cfg.epsilon is None:
        return cfg.epsilon_fraction * delta
    eps = cfg.epsilon
    if not (0.0 < eps < delta) and not cfg.allow_unstable_epsilon:
        raise ConfigurationError(
            f"epsilon {eps} outside stable range (0, {delta}); "
            "pass allow_unstable_epsilon to experiment beyond the bound"
        )
    if eps <= 0:
        raise ConfigurationError("epsilon must be positive")
    return eps


def wac_run(
    g: Graph,
    x0: Sequence[float],
    w: Sequence[float],
    cfg: ConsensusConfig | None = None,
) -> ConsensusRun:
    """Run the weighted-average-consensus iteration to the stopping rule.

    Stops when the max per-node step drops below `step_tolerance`, the
    state spread drops below `spread_tolerance`, or `max_iterations` is
    hit (converged=False). Runs that blow up to non-finite values abort
    early as unconverged.
    """
    cfg = cfg or ConsensusConfig()
    if len(x0) != g.node_count or len(w) != g.node_count:
        raise ConfigurationError("x0/w length must equal node count")
    if not graphmod.is_connected(g):
        raise DisconnectedGraphError("wac_run requires a connected graph")
    delta = max_step_size(w, g)
    eps = resolve_epsilon(cfg, delta)

    n = g.node_count
    adj = g.adjacency
    x = [float(v) for v in x0]
    scale = [eps / wi for wi in w]
    trace: list[list[float]] | None = [list(x)] if cfg.record_trace else None
    residuals: list[float] = []

    iterations = 0
    converged = _spread(x) <= cfg.spread_tolerance
    while not converged and iterations < cfg.max_iterations:
        new = [0.0] * n
        resid = 0.0
        for i in range(n):
            xi = x[i]
            acc = 0.0
            for j in adj[i]:
                acc += x[j] - xi
            v = xi + scale[i] * acc
            new[i] = v
            step = v - xi
            if step < 0.0:
                step = -step
            if step > resid:
                resid = step
        x = new
        iterations += 1
        residuals.append(resid)
        if trace is not None:
            trace.append(list(x))
        if not math.isfinite(resid):
            converged = False
            break
        converged = resid <= cfg.step_tolerance or _spread(x) <= cfg.spread_tolerance

    value = math.fsum(x) / n if all(map(math.isfinite, x)) else math.nan
    return ConsensusRun(
        final_states=x,
        iterations_used=iterations,
        converged=converged,
        consensus_value=value,
        epsilon=eps,
        max_step_bound=delta,
        trace=trace,
        residual_trace=residuals,
    )


def min_consensus(
    g: Graph, x0: Sequence[float], max_rounds: int
) -> tuple[list[float], int]:
    """Iterate x_i <- min over closed neighborhood until nothing changes.

    Returns (final states, rounds that produced a change). One extra
    verification round beyond `max_rounds` is allowed for the no-change
    detection itself.
    """
    if not graphmod.is_connected(g):
        raise DisconnectedGraphError("min_consensus requires a connected graph")
    if max_rounds < 1:
        raise ValueError("max_rounds must be >= 1")
    x = [float(v) for v in x0]
    for r in range(max_rounds + 1):
        new = []
        for i, nbrs in enumerate(g.adjacency):
            m = x[i]
            for j in nbrs:
                if x[j] < m:
                    m = x[j]
            new.append(m)
        if new == x:
            return x, r
        x = new
    raise RuntimeError(
        f"min_consensus did not stabilize within {max_rounds} rounds; "
        "this should be impossible on a connected graph with max_rounds >= diameter"
    )


def distributed_delta1(g: Graph, y: Sequence[float]) -> float:
    """WAC1 step bound via min-consensus over local neighbor averages."""
    validate_positive(y, "y")
    return distributed_step_bound(g, y, 1)


def distributed_step_bound(g: Graph, y: Sequence[float], k: int) -> float:
    """min_i (sum_{j in N_i} y_j**k) / d_i, agreed via min-consensus."""
    sums = neighbor_weight_sums(g, y, k)
    x0 = [s / d for s, d in zip(sums, g.degrees)]
    rounds = max(1, graphmod.diameter(g))
    states, _ = min_consensus(g, x0, rounds)
    return states[0]
