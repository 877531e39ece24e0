#!/usr/bin/env python3
"""
Total-variation distance on a truncated box and mixing-time estimation.

Two values are reported for every comparison: the truncated distance
(half the l1 difference over in-box states) and the conservative one, which
adds half of each side's out-of-box mass.
"""

from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
import structlog
from pydantic import BaseModel

from .equilibrium import PRODUCT_POISSON, StationaryDistribution
from .exceptions import DistributionMismatchError, ResourceGuardError, UsageError
from .network import ReactionNetwork
from .simulation import SimulationConfig, TransientDistribution, transient_distributions

logger = structlog.get_logger("crnmix.mixing")

Distribution = Union[TransientDistribution, StationaryDistribution]

CURVE_COLUMNS = ["t", "tv", "tv_conservative", "m", "replicates"]
SUMMARY_COLUMNS = ["m", "tau", "epsilon", "not_reached"]

# Poisson marginal entries below this are dropped before enumerating a product law
_NEGLIGIBLE_PMF = 1e-18


class _Sparse:
    """In-box table plus everything that falls outside the box."""

    def __init__(self, table: Dict[Tuple[int, ...], float], outside: float):
        self.table = table
        self.outside = outside


def _is_product(dist: Distribution) -> bool:
    return isinstance(dist, StationaryDistribution) and dist.kind == PRODUCT_POISSON


def _dimension(dist: Distribution) -> int:
    if isinstance(dist, TransientDistribution):
        return len(dist.origin)
    return dist.dimension


def _restrict(dist: Distribution, box_radius: int) -> _Sparse:
    source_radius = dist.box_radius
    if source_radius is not None and source_radius < box_radius:
        raise DistributionMismatchError(
            f"distribution is tabulated on a box of radius {source_radius}, cannot compare on {box_radius}",
            {"tabulated": source_radius, "requested": box_radius},
        )
    inside: Dict[Tuple[int, ...], float] = {}
    outside = dist.out_of_box_mass
    for state, p in dist.table.items():
        if max(state, default=0) <= box_radius:
            inside[state] = p
        else:
            outside += p
    return _Sparse(inside, outside)


def _sparse_vs_sparse(p: _Sparse, q: _Sparse) -> float:
    total = 0.0
    for state in sorted(set(p.table) | set(q.table)):
        total += abs(p.table.get(state, 0.0) - q.table.get(state, 0.0))
    return total


def _sparse_vs_product(p: _Sparse, q: StationaryDistribution, box_radius: int) -> float:
    """sum_box |p - q| = sum_{supp p} |p - q| + (Q(box) - sum_{supp p} q)"""
    covered = 0.0
    total = 0.0
    for state in sorted(p.table):
        qz = q.pmf(state)
        total += abs(p.table[state] - qz)
        covered += qz
    return total + max(q.box_mass(box_radius) - covered, 0.0)


def _product_vs_product(
    p: StationaryDistribution, q: StationaryDistribution, box_radius: int, max_states: int
) -> float:
    p_marginals = p.marginals(box_radius)
    q_marginals = q.marginals(box_radius)
    lengths = []
    for pm, qm in zip(p_marginals, q_marginals):
        significant = np.nonzero(np.maximum(pm, qm) >= _NEGLIGIBLE_PMF)[0]
        lengths.append(int(significant[-1]) + 1 if significant.size else 1)
    states = int(np.prod(lengths))
    if states > max_states:
        raise ResourceGuardError(states, max_states, what="product enumeration")
    dense_p = np.ones(())
    dense_q = np.ones(())
    for pm, qm, k in zip(p_marginals, q_marginals, lengths):
        dense_p = np.multiply.outer(dense_p, pm[:k])
        dense_q = np.multiply.outer(dense_q, qm[:k])
    return float(np.abs(dense_p - dense_q).sum())


class TVEstimate(BaseModel):
    truncated: float
    conservative: float
    out_of_box_p: float
    out_of_box_q: float


def tv_estimate(p: Distribution, q: Distribution, box_radius: int, max_states: int = 5_000_000) -> TVEstimate:
    """Both TV conventions for p and q restricted to [0, N]^d."""
    if _dimension(p) != _dimension(q):
        raise DistributionMismatchError(
            f"distributions live in {_dimension(p)} and {_dimension(q)} dimensions"
        )
    if _is_product(p) and _is_product(q):
        l1 = _product_vs_product(p, q, box_radius, max_states)
        out_p = 1.0 - p.box_mass(box_radius)
        out_q = 1.0 - q.box_mass(box_radius)
    elif _is_product(q) or _is_product(p):
        sparse, product = (p, q) if _is_product(q) else (q, p)
        restricted = _restrict(sparse, box_radius)
        l1 = _sparse_vs_product(restricted, product, box_radius)
        out_sparse, out_product = restricted.outside, 1.0 - product.box_mass(box_radius)
        out_p, out_q = (out_sparse, out_product) if sparse is p else (out_product, out_sparse)
    else:
        rp, rq = _restrict(p, box_radius), _restrict(q, box_radius)
        l1 = _sparse_vs_sparse(rp, rq)
        out_p, out_q = rp.outside, rq.outside

    truncated = min(max(0.5 * l1, 0.0), 1.0)
    conservative = min(truncated + 0.5 * (max(out_p, 0.0) + max(out_q, 0.0)), 1.0)
    return TVEstimate(truncated=truncated, conservative=conservative, out_of_box_p=out_p, out_of_box_q=out_q)


def tv_distance(p: Distribution, q: Distribution, box_radius: int, max_states: int = 5_000_000) -> float:
    """Conservative truncated TV distance in [0, 1]."""
    return tv_estimate(p, q, box_radius, max_states).conservative


def monte_carlo_bias_bound(pi: StationaryDistribution, replicates: int, box_radius: int) -> float:
    """1.5 * 1/2 * sum_z sqrt(pi(z) / R): the expected TV of an R-sample empirical law from pi."""
    if _is_product(pi):
        total = float(np.prod([np.sqrt(m).sum() for m in pi.marginals(box_radius)]))
    else:
        total = float(sum(np.sqrt(p) for z, p in pi.table.items() if max(z, default=0) <= box_radius))
    return 1.5 * 0.5 * total / np.sqrt(replicates)


class MixingTimeEstimate(BaseModel):
    """First grid time at which the conservative TV estimate drops to epsilon."""

    origin: List[int]
    m: int
    epsilon: float
    tau: Optional[float]
    not_reached: bool
    t_grid: List[float]
    tv_curve: List[float]
    tv_conservative_curve: List[float]
    replicates: int
    box_radius: int
    seed: Optional[int] = None

    def to_json(self) -> str:
        return self.model_dump_json(indent=2)


def parse_t_grid(text: str) -> List[float]:
    """'start:stop:step' (stop inclusive) into an explicit grid."""
    try:
        start, stop, step = (float(part) for part in text.split(":"))
    except ValueError:
        raise UsageError(f"t-grid must look like start:stop:step, got {text!r}") from None
    if step <= 0 or stop < start or start < 0:
        raise UsageError(f"invalid t-grid {text!r}")
    count = int(round((stop - start) / step)) + 1
    return [round(start + k * step, 12) for k in range(count)]


def estimate_mixing_time(
    network: ReactionNetwork,
    x0: Sequence[int],
    pi: StationaryDistribution,
    epsilon: float,
    t_grid: Sequence[float],
    config: SimulationConfig,
    box_radius: int = 200,
    m: Optional[int] = None,
) -> MixingTimeEstimate:
    if not 0.0 < epsilon < 0.5:
        raise UsageError(f"epsilon must lie in (0, 1/2), got {epsilon}")
    grid = [float(t) for t in t_grid]
    if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
        raise UsageError("t-grid must be non-empty and strictly increasing")

    samples = transient_distributions(network, x0, grid, config, box_radius)
    truncated, conservative = [], []
    for sample in samples:
        estimate = tv_estimate(sample, pi, box_radius)
        truncated.append(estimate.truncated)
        conservative.append(estimate.conservative)

    tau = next((t for t, tv in zip(grid, conservative) if tv <= epsilon), None)
    origin = [int(v) for v in x0]
    result = MixingTimeEstimate(
        origin=origin,
        m=m if m is not None else max(origin, default=0),
        epsilon=epsilon,
        tau=tau,
        not_reached=tau is None,
        t_grid=grid,
        tv_curve=truncated,
        tv_conservative_curve=conservative,
        replicates=samples[0].replicates,
        box_radius=box_radius,
        seed=config.seed,
    )
    logger.info("mixing_time_estimated", x0=origin, tau=tau, epsilon=epsilon)
    return result


def curve_frame(estimates: Sequence[MixingTimeEstimate]) -> pd.DataFrame:
    rows = [
        {"t": t, "tv": tv, "tv_conservative": tvc, "m": e.m, "replicates": e.replicates}
        for e in sorted(estimates, key=lambda e: e.m)
        for t, tv, tvc in zip(e.t_grid, e.tv_curve, e.tv_conservative_curve)
    ]
    return pd.DataFrame(rows, columns=CURVE_COLUMNS)


def summary_frame(estimates: Sequence[MixingTimeEstimate]) -> pd.DataFrame:
    rows = [
        {"m": e.m, "tau": e.tau, "epsilon": e.epsilon, "not_reached": e.not_reached}
        for e in sorted(estimates, key=lambda e: e.m)
    ]
    return pd.DataFrame(rows, columns=SUMMARY_COLUMNS)


def emit_curves(estimates: Sequence[MixingTimeEstimate]) -> Tuple[str, str]:
    """(curve CSV, summary CSV) text for a list of estimates, rows ordered by m."""
    return (
        curve_frame(estimates).to_csv(index=False, float_format="%.12g"),
        summary_frame(estimates).to_csv(index=False, float_format="%.12g"),
    )


def write_curves(estimates: Sequence[MixingTimeEstimate], out_dir: Path) -> Tuple[Path, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    curves, summary = emit_curves(estimates)
    curve_path = out_dir / "tv_curves.csv"
    summary_path = out_dir / "mixing_summary.csv"
    curve_path.write_text(curves, encoding="utf-8")
    summary_path.write_text(summary, encoding="utf-8")
    return curve_path, summary_path


def mixing_sweep(
    network: ReactionNetwork,
    m_list: Sequence[int],
    pi: StationaryDistribution,
    epsilon: float,
    t_grid: Sequence[float],
    config: SimulationConfig,
    box_radius: int = 200,
) -> List[MixingTimeEstimate]:
    """Estimates from x_m = (m, ..., m) for each m."""
    return [
        estimate_mixing_time(
            network, [m] * network.dimension, pi, epsilon, t_grid, config, box_radius, m=m
        )
        for m in sorted(m_list)
    ]
