"""
Exact search for a strictly positive conservation vector.

The left kernel of the net-change matrix is computed over the rationals with
sympy; a point with every entry >= 1 is then found by exact simplex. The
returned vertex minimises sum(w) and is scaled to coprime integers, so the
witness is canonical for a given reaction set.
"""

from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Optional, Sequence, Tuple

import structlog
import sympy
from pydantic import BaseModel, ConfigDict, field_validator
from sympy.solvers.simplex import InfeasibleLPError, lpmin

from .network import Reaction

logger = structlog.get_logger("crnmix.conservation")


class ConservationVector(BaseModel):
    """Strictly positive integer weights w with w . (y' - y) = 0 on its reaction set."""

    model_config = ConfigDict(frozen=True)

    weights: Tuple[int, ...]

    @field_validator("weights")
    @classmethod
    def _positive(cls, value: Tuple[int, ...]) -> Tuple[int, ...]:
        if any(w <= 0 for w in value):
            raise ValueError("conservation weights must be strictly positive")
        return value

    def dot(self, vector: Sequence[int]) -> Fraction:
        return sum((Fraction(w) * v for w, v in zip(self.weights, vector)), Fraction(0))

    def conserves(self, reactions: Sequence[Reaction]) -> bool:
        return all(self.dot(r.net_change) == 0 for r in reactions)


def _kernel_basis(reactions: Sequence[Reaction], dimension: int) -> list:
    if not reactions:
        return [sympy.eye(dimension).col(i) for i in range(dimension)]
    # rows are net changes, so the nullspace is {w : Gamma^T w = 0}
    gamma_t = sympy.Matrix([[sympy.Integer(v) for v in r.net_change] for r in reactions])
    return gamma_t.nullspace()


def _to_coprime_integers(values: Sequence[sympy.Rational]) -> Tuple[int, ...]:
    fractions = [Fraction(int(v.p), int(v.q)) for v in values]
    denominator = reduce(lambda a, b: a * b // gcd(a, b), (f.denominator for f in fractions), 1)
    integers = [int(f * denominator) for f in fractions]
    divisor = reduce(gcd, integers, 0) or 1
    return tuple(i // divisor for i in integers)


def find_conservation_vector(reactions: Sequence[Reaction], dimension: int) -> Optional[ConservationVector]:
    """Return a canonical positive conservation vector for the reactions, or None."""
    if dimension == 0:
        return ConservationVector(weights=())

    basis = _kernel_basis(reactions, dimension)
    if not basis:
        logger.debug("conservation_kernel_empty", reactions=len(reactions))
        return None

    # free coefficients t = t_plus - t_minus keep the LP in standard non-negative form
    t_plus = sympy.symbols(f"tp0:{len(basis)}")
    t_minus = sympy.symbols(f"tn0:{len(basis)}")
    weights = [
        sum((vector[i] * (tp - tn) for vector, tp, tn in zip(basis, t_plus, t_minus)), sympy.Integer(0))
        for i in range(dimension)
    ]
    if any(w == 0 for w in weights):
        return None
    constraints = [w >= 1 for w in weights]
    constraints += [s >= 0 for s in (*t_plus, *t_minus)]

    try:
        _, solution = lpmin(sum(weights), constraints)
    except InfeasibleLPError:
        logger.debug("conservation_infeasible", reactions=len(reactions), kernel_dim=len(basis))
        return None

    assignment = {s: solution.get(s, sympy.Integer(0)) for s in (*t_plus, *t_minus)}
    values = [sympy.Rational(w.subs(assignment)) for w in weights]
    vector = ConservationVector(weights=_to_coprime_integers(values))
    logger.debug("conservation_found", weights=list(vector.weights))
    return vector
