#!/usr/bin/env python3
"""
Deterministic equilibria, complex balance, and the stationary distribution
used as the mixing target (product-form Poisson or a long-run SSA estimate).
"""

import json
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict, Field
from scipy.stats import poisson

from .exceptions import ConvergenceError, ResourceGuardError, SingularJacobianError, UsageError
from .kinetics import CompiledNetwork, as_state
from .network import ReactionNetwork
from .simulation import SimulationConfig, irreducibility_probe, transient_distribution

logger = structlog.get_logger("crnmix.equilibrium")

PRODUCT_POISSON = "product-poisson"
EMPIRICAL = "empirical"

# beyond this condition number the Newton step is not trusted
_CONDITION_LIMIT = 1e14


def _monomials(compiled: CompiledNetwork, c: np.ndarray) -> np.ndarray:
    """c^y for every reaction source."""
    return np.prod(np.power(c[np.newaxis, :], compiled.sources), axis=1)


def mass_action_field(network: ReactionNetwork, c: Sequence[float]) -> np.ndarray:
    """F(c) = sum_r kappa_r c^y_r (y'_r - y_r)"""
    compiled = CompiledNetwork(network)
    return _field(compiled, np.asarray(c, dtype=float))


def _field(compiled: CompiledNetwork, c: np.ndarray) -> np.ndarray:
    flux = compiled.rates * _monomials(compiled, c)
    return compiled.changes.T.astype(float) @ flux


def _jacobian(compiled: CompiledNetwork, c: np.ndarray) -> np.ndarray:
    flux = compiled.rates * _monomials(compiled, c)
    # d(c^y)/dc_j = y_j c^y / c_j for c > 0
    sensitivity = compiled.sources * flux[:, np.newaxis] / c[np.newaxis, :]
    return compiled.changes.T.astype(float) @ sensitivity


def find_equilibrium(
    network: ReactionNetwork,
    initial_guess: Sequence[float],
    tolerance: float = 1e-12,
    max_iterations: int = 200,
) -> np.ndarray:
    """Damped Newton iteration for F(c) = 0 that keeps every iterate strictly positive."""
    c = np.asarray(initial_guess, dtype=float)
    if c.shape != (network.dimension,):
        raise UsageError(f"initial guess must have {network.dimension} entries")
    if np.any(c <= 0):
        raise UsageError("initial guess must be strictly positive")

    compiled = CompiledNetwork(network)
    residual = np.abs(_field(compiled, c)).max(initial=0.0)
    for iteration in range(max_iterations):
        if residual <= tolerance:
            logger.debug("equilibrium_found", iterations=iteration, residual=residual)
            return c
        jac = _jacobian(compiled, c)
        if np.linalg.matrix_rank(jac) < network.dimension or np.linalg.cond(jac) > _CONDITION_LIMIT:
            raise SingularJacobianError(c)
        step = np.linalg.solve(jac, -_field(compiled, c))

        scale = 1.0
        while np.any(c + scale * step <= 0):
            scale /= 2.0
        candidate = c + scale * step
        candidate_residual = np.abs(_field(compiled, candidate)).max(initial=0.0)
        while candidate_residual > residual and scale > 1e-10:
            scale /= 2.0
            candidate = c + scale * step
            candidate_residual = np.abs(_field(compiled, candidate)).max(initial=0.0)
        c, residual = candidate, candidate_residual

    if residual <= tolerance:
        return c
    raise ConvergenceError(max_iterations, float(residual))


def complex_balance_residuals(network: ReactionNetwork, c: Sequence[float]) -> Dict[str, Tuple[float, float]]:
    """Per complex: (inflow, outflow) of c^y-weighted flux."""
    c = np.asarray(c, dtype=float)
    flows: Dict[str, List[float]] = {network.complex_name(y): [0.0, 0.0] for y in network.complexes}
    for reaction in network.reactions:
        flux = reaction.rate_constant * float(np.prod(np.power(c, reaction.source.coefficients)))
        flows[network.complex_name(reaction.product)][0] += flux
        flows[network.complex_name(reaction.source)][1] += flux
    return {name: (inflow, outflow) for name, (inflow, outflow) in flows.items()}


def is_complex_balanced(network: ReactionNetwork, c: Sequence[float], tolerance: float = 1e-9) -> bool:
    """Every complex balances its in- and out-flux to a relative tolerance."""
    if np.any(np.asarray(c, dtype=float) <= 0):
        raise UsageError("complex balance is checked at strictly positive points")
    return all(
        abs(inflow - outflow) <= tolerance * (1.0 + max(inflow, outflow))
        for inflow, outflow in complex_balance_residuals(network, c).values()
    )


class StationaryDistribution(BaseModel):
    """Product-form Poisson law, or an empirical table on a truncated box."""

    model_config = ConfigDict(frozen=True)

    kind: str
    means: Optional[List[float]] = None
    box_radius: Optional[int] = None
    out_of_box_mass: float = 0.0
    table: Dict[Tuple[int, ...], float] = Field(default_factory=dict, exclude=True)

    @property
    def dimension(self) -> int:
        if self.means is not None:
            return len(self.means)
        return len(next(iter(self.table))) if self.table else 0

    def pmf(self, z: Sequence[int]) -> float:
        if self.kind == PRODUCT_POISSON:
            return float(np.prod(poisson.pmf(np.asarray(z), np.asarray(self.means))))
        return self.table.get(tuple(z), 0.0)

    def marginals(self, box_radius: int) -> List[np.ndarray]:
        """Per-species Poisson pmf over 0..N (product-form only)."""
        if self.kind != PRODUCT_POISSON:
            raise UsageError("marginals are only available for the product-form law")
        support = np.arange(box_radius + 1)
        return [poisson.pmf(support, mean) for mean in self.means]

    def box_mass(self, box_radius: int) -> float:
        if self.kind == PRODUCT_POISSON:
            return float(np.prod([poisson.cdf(box_radius, mean) for mean in self.means]))
        return float(sum(p for z, p in self.table.items() if max(z, default=0) <= box_radius))

    def dense(self, box_radius: int, max_states: int = 5_000_000) -> np.ndarray:
        """pmf on [0, N]^d as a d-dimensional array."""
        states = (box_radius + 1) ** self.dimension
        if states > max_states:
            raise ResourceGuardError(states, max_states, what="distribution box")
        if self.kind == PRODUCT_POISSON:
            out = np.ones(())
            for marginal in self.marginals(box_radius):
                out = np.multiply.outer(out, marginal)
            return out
        out = np.zeros((box_radius + 1,) * self.dimension)
        for z, p in self.table.items():
            if max(z, default=0) <= box_radius:
                out[z] = p
        return out


def product_poisson(c: Sequence[float]) -> StationaryDistribution:
    means = [float(v) for v in c]
    if any(m <= 0 for m in means):
        raise UsageError("Poisson means must be strictly positive")
    return StationaryDistribution(kind=PRODUCT_POISSON, means=means)


def empirical_stationary(
    network: ReactionNetwork,
    x0: Sequence[int],
    t_burn: float,
    config: SimulationConfig,
    box_radius: int = 200,
) -> StationaryDistribution:
    """Law of X(t_burn) from x0, used when no product form is available."""
    sample = transient_distribution(network, x0, t_burn, config, box_radius)
    return StationaryDistribution(
        kind=EMPIRICAL,
        box_radius=box_radius,
        out_of_box_mass=sample.out_of_box_mass,
        table=dict(sample.table),
    )


class StationaryReport(BaseModel):
    equilibrium: Optional[List[float]] = None
    residual: Optional[float] = None
    complex_balanced: bool = False
    balance: Dict[str, Tuple[float, float]] = Field(default_factory=dict)
    irreducible_probe: Optional[bool] = None
    pi_kind: str
    caveats: List[str] = Field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), indent=2)


def stationary_for(
    network: ReactionNetwork,
    x0: Sequence[int],
    config: Optional[SimulationConfig] = None,
    initial_guess: Optional[Sequence[float]] = None,
    box_radius: int = 200,
    reach_radius: int = 20,
    t_burn: float = 50.0,
    newton_tolerance: float = 1e-12,
    newton_max_iterations: int = 200,
    balance_tolerance: float = 1e-9,
    empirical_fallback: bool = True,
) -> Tuple[Optional[StationaryDistribution], StationaryReport]:
    """
    Pick the stationary law for mixing experiments.

    Product-form Poisson is used when a positive complex-balanced equilibrium
    exists and `irreducibility_probe` from x0 passes; otherwise the law is
    estimated by simulating to t_burn (skipped when empirical_fallback is off).
    """
    state = as_state(x0, network.dimension)
    guess = initial_guess if initial_guess is not None else [1.0] * network.dimension
    caveats: List[str] = []
    equilibrium = None
    residual = None
    balanced = False
    balance: Dict[str, Tuple[float, float]] = {}

    try:
        c = find_equilibrium(network, guess, newton_tolerance, newton_max_iterations)
        equilibrium = [float(v) for v in c]
        residual = float(np.abs(mass_action_field(network, c)).max(initial=0.0))
        balance = complex_balance_residuals(network, c)
        balanced = is_complex_balanced(network, c, balance_tolerance)
        if not balanced:
            caveats.append("equilibrium is not complex balanced; product form does not apply")
    except (ConvergenceError, SingularJacobianError) as exc:
        caveats.append(f"no positive equilibrium found: {exc.message}")

    irreducible = None
    if balanced:
        radius = max(reach_radius, max(state, default=0))
        irreducible = irreducibility_probe(network, state, radius)
        if not irreducible:
            caveats.append("state space may be reducible from x0; product form not used")

    if balanced and irreducible:
        pi = product_poisson(equilibrium)
        kind = PRODUCT_POISSON
    elif empirical_fallback:
        pi = empirical_stationary(network, state, t_burn, config or SimulationConfig(), box_radius)
        kind = EMPIRICAL
    else:
        pi, kind = None, "unavailable"

    report = StationaryReport(
        equilibrium=equilibrium,
        residual=residual,
        complex_balanced=balanced,
        balance=balance,
        irreducible_probe=irreducible,
        pi_kind=kind,
        caveats=caveats,
    )
    logger.info("stationary_selected", kind=kind, complex_balanced=balanced, irreducible=irreducible)
    return pi, report
