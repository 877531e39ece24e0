#!/usr/bin/env python3
"""
Mass-action intensities, the generator of the counting process, the
Lyapunov functions V and W, and exhaustive drift scans over lattice boxes.
"""

import math
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import structlog
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .exceptions import NetworkError, ResourceGuardError, UsageError
from .network import Reaction, ReactionNetwork
from .parallel import run_chunks

logger = structlog.get_logger("crnmix.kinetics")

LOG_V = "log-V"
LINEAR_W = "linear-W"
ALLOWED_DELTAS = (0.0, 0.5)


class LatticeState(BaseModel):
    """A state x of the counting process."""

    model_config = ConfigDict(frozen=True)

    counts: Tuple[int, ...]

    @field_validator("counts")
    @classmethod
    def _non_negative(cls, value: Tuple[int, ...]) -> Tuple[int, ...]:
        if any(c < 0 for c in value):
            raise ValueError("lattice states have non-negative entries")
        return value


def as_state(x: Sequence[int], dimension: Optional[int] = None) -> Tuple[int, ...]:
    """Validate a state given as any integer sequence and return it as a tuple."""
    state = tuple(int(v) for v in x)
    if dimension is not None and len(state) != dimension:
        raise NetworkError(f"state {state} has {len(state)} entries, network has {dimension} species")
    if any(v < 0 for v in state):
        raise NetworkError(f"state {state} has a negative entry")
    return state


class CompiledNetwork:
    """Reaction data of a network packed into integer/float arrays."""

    def __init__(self, network: ReactionNetwork):
        self.network = network
        self.dimension = network.dimension
        self.sources = np.array(
            [r.source.coefficients for r in network.reactions], dtype=np.int64
        ).reshape(len(network.reactions), network.dimension)
        self.products = np.array(
            [r.product.coefficients for r in network.reactions], dtype=np.int64
        ).reshape(len(network.reactions), network.dimension)
        self.changes = self.products - self.sources
        self.rates = np.array([r.rate_constant for r in network.reactions], dtype=float)

    def __len__(self) -> int:
        return len(self.rates)

    def intensities(self, states: np.ndarray) -> np.ndarray:
        """lambda_r(x) for an (n, d) array of states; returns (n, R)."""
        states = np.asarray(states, dtype=float)
        out = np.empty((states.shape[0], len(self)), dtype=float)
        for r in range(len(self)):
            column = np.full(states.shape[0], self.rates[r])
            for i in np.nonzero(self.sources[r])[0]:
                for k in range(self.sources[r, i]):
                    column = column * (states[:, i] - k)
            # x_i < y_i makes one factor exactly zero; clamp to drop signed zeros
            out[:, r] = np.maximum(column, 0.0)
        return out


def _falling(n: int, k: int) -> int:
    return math.perm(n, k) if n >= k else 0


def intensity(network: ReactionNetwork, reaction: Reaction, x: Sequence[int]) -> float:
    """kappa * prod_i x_i! / (x_i - y_i)!, zero when any x_i < y_i."""
    state = as_state(x, network.dimension)
    value = reaction.rate_constant
    for count, need in zip(state, reaction.source.coefficients):
        if need:
            value *= _falling(count, need)
    return float(value)


def apply_generator(
    network: ReactionNetwork, f: Callable[[Tuple[int, ...]], float], x: Sequence[int]
) -> float:
    """Af(x) = sum over reactions of lambda(x) * (f(x + y' - y) - f(x))."""
    state = as_state(x, network.dimension)
    fx = f(state)
    total = 0.0
    for reaction in network.reactions:
        rate = intensity(network, reaction, state)
        if rate == 0.0:
            continue
        target = tuple(a + b for a, b in zip(state, reaction.net_change))
        total += rate * (f(target) - fx)
    return total


def lyapunov_V(x: Sequence[float]) -> float:
    """sum_i [x_i (ln x_i - 1) + 1], with the x_i = 0 term equal to 1."""
    total = 0.0
    for value in x:
        if value > 0:
            total += value * (math.log(value) - 1.0) + 1.0
        else:
            total += 1.0
    return total


def lyapunov_W(weights: Sequence[float], x: Sequence[float]) -> float:
    """W(x) = w . x"""
    return float(sum(w * v for w, v in zip(weights, x)))


def _v_array(states: np.ndarray) -> np.ndarray:
    positive = states > 0
    safe = np.where(positive, states, 1.0)
    terms = np.where(positive, states * (np.log(safe) - 1.0) + 1.0, 1.0)
    return terms.sum(axis=1)


def _lyapunov_array(states: np.ndarray, kind: str, weights: Optional[np.ndarray]) -> np.ndarray:
    if kind == LOG_V:
        return _v_array(states)
    return states @ weights


def generator_values(
    compiled: CompiledNetwork, states: np.ndarray, kind: str, weights: Optional[np.ndarray] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """Return (L(x), AL(x)) for L the chosen Lyapunov function over an (n, d) state array."""
    states = np.asarray(states, dtype=float)
    base = _lyapunov_array(states, kind, weights)
    rates = compiled.intensities(states)
    drift = np.zeros(states.shape[0])
    for r in range(len(compiled)):
        shifted = _lyapunov_array(states + compiled.changes[r], kind, weights)
        drift += rates[:, r] * (shifted - base)
    return base, drift


class DriftReport(BaseModel):
    """Empirical Foster-Lyapunov witness over the box [0, N]^d."""

    lyapunov_kind: str
    delta: float
    exponent: float
    a: float
    b: float
    argmax_state: List[int]
    argmax_interior: bool
    negative_on_shell: bool
    max_shell_drift: Optional[float]
    box_radius: int
    states_scanned: int
    weights: Optional[List[float]] = None
    note: str = Field(
        default="finite-box evidence only; not a proof of the drift inequality outside the box"
    )

    def to_json(self) -> str:
        return self.model_dump_json(indent=2)


def _check_scan_args(network: ReactionNetwork, kind: str, a: float, delta: float, box_radius: int, weights):
    if kind not in (LOG_V, LINEAR_W):
        raise UsageError(f"unknown Lyapunov kind {kind!r}; use {LOG_V} or {LINEAR_W}")
    if not a > 0:
        raise UsageError(f"a must be positive, got {a}")
    if delta not in ALLOWED_DELTAS:
        raise UsageError(f"delta must be 0 or 1/2, got {delta}")
    if box_radius < 2:
        raise UsageError(f"box radius must be >= 2, got {box_radius}")
    if kind == LINEAR_W:
        if weights is None or len(weights) != network.dimension:
            raise UsageError("linear-W scans need one positive weight per species")
        if any(w <= 0 for w in weights):
            raise UsageError("linear-W weights must be positive")


def _slab_states(dimension: int, first: int, radius: int) -> np.ndarray:
    """All states with x_0 == first, in lexicographic order."""
    if dimension == 1:
        return np.array([[first]], dtype=float)
    rest = np.indices((radius + 1,) * (dimension - 1)).reshape(dimension - 1, -1).T
    return np.hstack([np.full((rest.shape[0], 1), first), rest]).astype(float)


def _scan_slab(task) -> Tuple[float, Tuple[int, ...], bool, float]:
    """Max of g over one slab plus the shell statistics; pure so it can run in a worker."""
    network, kind, a, delta, radius, weights, first = task
    compiled = CompiledNetwork(network)
    states = _slab_states(network.dimension, first, radius)
    base, drift = generator_values(compiled, states, kind, weights)
    g = drift + a * np.power(np.maximum(base, 0.0), 1.0 + delta)
    best = int(np.argmax(g))
    shell = (states == radius).any(axis=1)
    shell_negative = bool(np.all(drift[shell] < 0)) if shell.any() else True
    shell_max = float(drift[shell].max()) if shell.any() else -math.inf
    return float(g[best]), tuple(int(v) for v in states[best]), shell_negative, shell_max


def drift_scan(
    network: ReactionNetwork,
    lyapunov_kind: str = LOG_V,
    a: float = 0.05,
    delta: float = 0.0,
    box_radius: int = 60,
    weights: Optional[Sequence[float]] = None,
    max_states: int = 5_000_000,
    threads: int = 1,
) -> DriftReport:
    """
    Evaluate g(x) = AL(x) + a L(x)^(1+delta) on every x in [0, N]^d.

    b is the maximum of g with ties resolved to the lexicographically smallest
    state. negative_on_shell reports whether AL < 0 on every state with some
    coordinate equal to N.
    """
    _check_scan_args(network, lyapunov_kind, a, delta, box_radius, weights)
    d = network.dimension
    if d == 0:
        raise UsageError("cannot scan a network without species")
    states = (box_radius + 1) ** d
    if states > max_states:
        raise ResourceGuardError(states, max_states, what="drift box")

    weight_array = np.asarray(weights, dtype=float) if weights is not None else None
    log = logger.bind(component="drift_scan", kind=lyapunov_kind, box=box_radius)
    log.info("drift_scan_started", states=states, a=a, delta=delta)

    tasks = [
        (network, lyapunov_kind, a, delta, box_radius, weight_array, first)
        for first in range(box_radius + 1)
    ]
    results = run_chunks(_scan_slab, tasks, threads)

    best_value, best_state = -math.inf, None
    negative_on_shell = True
    shell_max = -math.inf
    for value, state, shell_negative, slab_shell_max in results:
        # slabs arrive in x_0 order, so strict > keeps the lexicographically smallest argmax
        if value > best_value:
            best_value, best_state = value, state
        negative_on_shell = negative_on_shell and shell_negative
        shell_max = max(shell_max, slab_shell_max)

    report = DriftReport(
        lyapunov_kind=lyapunov_kind,
        delta=delta,
        exponent=1.0 + delta,
        a=a,
        b=best_value,
        argmax_state=list(best_state),
        argmax_interior=max(best_state) < box_radius,
        negative_on_shell=negative_on_shell,
        max_shell_drift=shell_max if shell_max > -math.inf else None,
        box_radius=box_radius,
        states_scanned=states,
        weights=list(weight_array) if weight_array is not None else None,
    )
    log.info(
        "drift_scan_completed",
        b=report.b,
        argmax=report.argmax_state,
        negative_on_shell=report.negative_on_shell,
    )
    return report


def drift_slice(
    network: ReactionNetwork,
    lyapunov_kind: str = LOG_V,
    a: float = 0.05,
    delta: float = 0.0,
    box_radius: int = 60,
    axes: Tuple[int, int] = (0, 1),
    fixed: Optional[Sequence[int]] = None,
    weights: Optional[Sequence[float]] = None,
) -> pd.DataFrame:
    """g(x) over a 2-D slice of the box; other coordinates held at fixed."""
    _check_scan_args(network, lyapunov_kind, a, delta, box_radius, weights)
    d = network.dimension
    if d < 2 or axes[0] == axes[1] or not all(0 <= ax < d for ax in axes):
        raise UsageError(f"invalid slice axes {axes} for {d} species")
    base_state = np.array(fixed if fixed is not None else [0] * d, dtype=float)
    grid = np.indices((box_radius + 1, box_radius + 1)).reshape(2, -1).T
    states = np.tile(base_state, (grid.shape[0], 1))
    states[:, axes[0]] = grid[:, 0]
    states[:, axes[1]] = grid[:, 1]

    weight_array = np.asarray(weights, dtype=float) if weights is not None else None
    value, drift = generator_values(CompiledNetwork(network), states, lyapunov_kind, weight_array)
    names = network.species_names
    return pd.DataFrame(
        {
            names[axes[0]]: grid[:, 0],
            names[axes[1]]: grid[:, 1],
            "lyapunov": value,
            "drift": drift,
            "g": drift + a * np.power(np.maximum(value, 0.0), 1.0 + delta),
        }
    )


def linear_drift_closed_form(network: ReactionNetwork, weights: Sequence[float], x: Sequence[int]) -> float:
    """-sum kappa_{S_i->0} w_i x_i + sum kappa_{0->S_i} w_i; equals AW(x) when the core conserves w."""
    state = as_state(x, network.dimension)
    total = 0.0
    for reaction in network.reactions:
        if reaction.is_outflow:
            i = reaction.source.species_index()
            total -= reaction.rate_constant * weights[i] * state[i]
        elif reaction.is_inflow:
            i = reaction.product.species_index()
            total += reaction.rate_constant * weights[i]
    return total


def linear_drift_constants(network: ReactionNetwork, weights: Sequence[float]) -> Tuple[float, float]:
    """(a, b) with AW <= -a W + b: a is the smallest out-flow rate, b the weighted in-flow."""
    outflow_rates = {}
    inflow_total = 0.0
    for reaction in network.reactions:
        if reaction.is_outflow:
            outflow_rates[reaction.source.species_index()] = reaction.rate_constant
        elif reaction.is_inflow:
            inflow_total += reaction.rate_constant * weights[reaction.product.species_index()]
    if len(outflow_rates) != network.dimension:
        raise NetworkError("linear drift constants need an out-flow for every species")
    return min(outflow_rates.values()), inflow_total
