#!/usr/bin/env python3
"""
Exact stochastic simulation (direct method) and empirical transient laws.

Every replicate draws from its own counter-based Philox stream keyed by
(seed, replicate index), and per-block results are merged with integer
additions, so a run is bit-for-bit identical for any number of workers.
"""

import json
from collections import Counter, deque
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import structlog
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .exceptions import ExplosionGuardError, ResourceGuardError, UsageError
from .kinetics import as_state
from .network import ReactionNetwork
from .parallel import run_chunks, split_range
from .settings import CRNSettings

logger = structlog.get_logger("crnmix.simulation")

State = Tuple[int, ...]


class SimulationConfig(BaseModel):
    """Randomness and guard settings shared by every Monte-Carlo operation."""

    model_config = ConfigDict(frozen=True)

    seed: int = Field(default=20240101, ge=0, lt=2**64)
    replicates: int = Field(default=100_000, ge=1)
    max_events: int = Field(default=10_000_000, ge=1)
    explosion_tolerance: float = Field(default=0.001, ge=0.0, lt=1.0)
    threads: int = Field(default=1, ge=1)

    @classmethod
    def from_settings(cls, settings: CRNSettings, **overrides) -> "SimulationConfig":
        values = {
            "seed": settings.seed,
            "replicates": settings.replicates,
            "max_events": settings.max_events,
            "explosion_tolerance": settings.explosion_tolerance,
            "threads": settings.threads,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


def replicate_rng(seed: int, replicate: int) -> np.random.Generator:
    """Independent stream for one replicate, keyed only by (seed, replicate)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(replicate,))))


class _Channels:
    """Plain-Python reaction tables; per-event work stays out of numpy."""

    def __init__(self, network: ReactionNetwork):
        self.rates = [r.rate_constant for r in network.reactions]
        self.needs = [
            [(i, y) for i, y in enumerate(r.source.coefficients) if y] for r in network.reactions
        ]
        self.changes = [[(i, v) for i, v in enumerate(r.net_change) if v] for r in network.reactions]

    def propensities(self, x: List[int]) -> List[float]:
        out = []
        for rate, needs in zip(self.rates, self.needs):
            value = rate
            for i, y in needs:
                n = x[i]
                if n < y:
                    value = 0.0
                    break
                for k in range(y):
                    value *= n - k
            out.append(value)
        return out


def _observe(
    channels: _Channels,
    x0: State,
    times: Sequence[float],
    rng: np.random.Generator,
    max_events: int,
) -> List[State]:
    """States at each of the (sorted) observation times along one trajectory."""
    x = list(x0)
    now = 0.0
    events = 0
    observed: List[State] = []

    propensities = channels.propensities(x)
    total = sum(propensities)
    next_jump = now + rng.exponential(1.0 / total) if total > 0 else np.inf

    for horizon in times:
        while next_jump <= horizon:
            events += 1
            if events > max_events:
                raise ExplosionGuardError(x0, horizon, events - 1)
            threshold = rng.random() * total
            channel = 0
            cumulative = propensities[0]
            while cumulative <= threshold and channel < len(propensities) - 1:
                channel += 1
                cumulative += propensities[channel]
            while propensities[channel] == 0.0:
                channel -= 1
            for i, v in channels.changes[channel]:
                x[i] += v
            now = next_jump
            propensities = channels.propensities(x)
            total = sum(propensities)
            next_jump = now + rng.exponential(1.0 / total) if total > 0 else np.inf
        observed.append(tuple(x))
    return observed


def simulate_until(
    network: ReactionNetwork,
    x0: Sequence[int],
    t: float,
    rng: np.random.Generator,
    max_events: int = 10_000_000,
) -> State:
    """One exact sample of X(t) given X(0) = x0."""
    if t < 0:
        raise UsageError(f"time must be non-negative, got {t}")
    state = as_state(x0, network.dimension)
    return _observe(_Channels(network), state, [float(t)], rng, max_events)[0]


class TransientDistribution(BaseModel):
    """Empirical P^t(x0, .) restricted to [0, N]^d."""

    model_config = ConfigDict(frozen=True)

    species: List[str]
    origin: Tuple[int, ...]
    time: float
    box_radius: int
    replicates: int
    exploded: int = 0
    out_of_box_mass: float
    mean: List[float]
    variance: List[float]
    table: Dict[Tuple[int, ...], float] = Field(default_factory=dict, exclude=True)

    @field_validator("time")
    @classmethod
    def _non_negative(cls, value: float) -> float:
        if value < 0:
            raise ValueError("time must be non-negative")
        return value

    def probability(self, state: Sequence[int]) -> float:
        return self.table.get(tuple(state), 0.0)

    def to_frame(self) -> pd.DataFrame:
        rows = sorted(self.table.items())
        frame = pd.DataFrame([state for state, _ in rows], columns=self.species)
        frame["frequency"] = [p for _, p in rows]
        return frame

    def to_csv(self, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame().to_csv(path, index=False, float_format="%.12g")
        return path

    def summary(self) -> Dict:
        return self.model_dump(mode="json")

    def summary_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True)


_BlockResult = Tuple[List[Counter], List[int], List[List[int]], List[List[int]], int, Optional[tuple]]


def _simulate_block(task) -> _BlockResult:
    network, x0, times, seed, replicates, max_events, box_radius = task
    channels = _Channels(network)
    d = network.dimension
    tables = [Counter() for _ in times]
    outside = [0] * len(times)
    sums = [[0] * d for _ in times]
    squares = [[0] * d for _ in times]
    exploded = 0
    first_explosion = None

    for replicate in replicates:
        rng = replicate_rng(seed, replicate)
        try:
            states = _observe(channels, x0, times, rng, max_events)
        except ExplosionGuardError as exc:
            exploded += 1
            if first_explosion is None:
                first_explosion = (exc.t, exc.events)
            continue
        for k, state in enumerate(states):
            if max(state, default=0) <= box_radius:
                tables[k][state] += 1
            else:
                outside[k] += 1
            for i, v in enumerate(state):
                sums[k][i] += v
                squares[k][i] += v * v
    return tables, outside, sums, squares, exploded, first_explosion


def transient_distributions(
    network: ReactionNetwork,
    x0: Sequence[int],
    times: Sequence[float],
    config: SimulationConfig,
    box_radius: int = 200,
) -> List[TransientDistribution]:
    """
    Empirical laws of X(t) for every t in times from the same trajectories.

    Each replicate is simulated once and observed at every grid time.
    Replicates that hit the event cap are excluded; if their share exceeds
    config.explosion_tolerance the first explosion is raised.
    """
    state = as_state(x0, network.dimension)
    grid = [float(t) for t in times]
    if any(t < 0 for t in grid):
        raise UsageError("observation times must be non-negative")
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise UsageError("observation times must be non-decreasing")
    if box_radius < 0:
        raise UsageError(f"box radius must be non-negative, got {box_radius}")

    log = logger.bind(component="transient", x0=list(state))
    log.info("simulation_started", replicates=config.replicates, times=len(grid), seed=config.seed)

    blocks = split_range(config.replicates, config.threads * 4)
    tasks = [
        (network, state, grid, config.seed, block, config.max_events, box_radius) for block in blocks
    ]
    results = run_chunks(_simulate_block, tasks, config.threads)

    d = network.dimension
    tables = [Counter() for _ in grid]
    outside = [0] * len(grid)
    sums = [[0] * d for _ in grid]
    squares = [[0] * d for _ in grid]
    exploded = 0
    first_explosion = None
    for block_tables, block_outside, block_sums, block_squares, block_exploded, block_first in results:
        exploded += block_exploded
        if first_explosion is None and block_first is not None:
            first_explosion = block_first
        for k in range(len(grid)):
            tables[k].update(block_tables[k])
            outside[k] += block_outside[k]
            for i in range(d):
                sums[k][i] += block_sums[k][i]
                squares[k][i] += block_squares[k][i]

    if exploded:
        log.warning("trajectories_exploded", exploded=exploded, replicates=config.replicates)
        if exploded > config.explosion_tolerance * config.replicates or exploded == config.replicates:
            t, events = first_explosion
            raise ExplosionGuardError(state, t, events)

    valid = config.replicates - exploded
    distributions = []
    for k, t in enumerate(grid):
        mean = [s / valid for s in sums[k]]
        variance = [max(q / valid - m * m, 0.0) for q, m in zip(squares[k], mean)]
        distributions.append(
            TransientDistribution(
                species=network.species_names,
                origin=state,
                time=t,
                box_radius=box_radius,
                replicates=valid,
                exploded=exploded,
                out_of_box_mass=outside[k] / valid,
                mean=mean,
                variance=variance,
                table={s: c / valid for s, c in sorted(tables[k].items())},
            )
        )
    log.info("simulation_completed", replicates=valid, exploded=exploded)
    return distributions


def transient_distribution(
    network: ReactionNetwork,
    x0: Sequence[int],
    t: float,
    config: SimulationConfig,
    box_radius: int = 200,
) -> TransientDistribution:
    return transient_distributions(network, x0, [t], config, box_radius)[0]


def _reachable(network: ReactionNetwork, start: State, box_radius: int) -> set:
    changes = [r.net_change for r in network.reactions]
    sources = [r.source.coefficients for r in network.reactions]
    seen = {start}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for need, change in zip(sources, changes):
            if any(a < b for a, b in zip(x, need)):
                continue
            y = tuple(a + b for a, b in zip(x, change))
            if max(y, default=0) <= box_radius and y not in seen:
                seen.add(y)
                queue.append(y)
    return seen


def irreducibility_probe(
    network: ReactionNetwork, x0: Sequence[int], box_radius: int, max_states: int = 5_000_000
) -> bool:
    """
    True iff x0 reaches the origin and the origin reaches x0 using jumps
    that stay inside [0, N]^d. Evidence only, not a proof of irreducibility.
    """
    state = as_state(x0, network.dimension)
    if max(state, default=0) > box_radius:
        raise UsageError(f"x0={state} lies outside the box of radius {box_radius}")
    total = (box_radius + 1) ** network.dimension
    if total > max_states:
        raise ResourceGuardError(total, max_states, what="reachability box")
    origin = (0,) * network.dimension
    if state == origin:
        return True
    forward = origin in _reachable(network, state, box_radius)
    backward = state in _reachable(network, origin, box_radius)
    logger.debug("irreducibility_probe", x0=list(state), to_origin=forward, from_origin=backward)
    return forward and backward
