"""
Tier partitions of the complex set along monomial growth profiles.

A profile fixes, per species, either x_{n,i} = c_i n^alpha_i + lower order or
x_{n,i} -> l_i. Along such a sequence (x_n v 1)^y grows like n^E(y) with
E(y) = sum over unbounded i of y_i alpha_i, so complexes with equal E share a
tier and tiers are ordered by decreasing E. All comparisons use Fraction.
"""

import math
import re
from fractions import Fraction
from typing import Dict, List, Literal, Optional, Sequence, Tuple

import structlog
from pydantic import BaseModel, ConfigDict, model_validator

from .exceptions import NetworkError
from .network import Complex, Reaction, ReactionNetwork

logger = structlog.get_logger("crnmix.tiers")

SUCCEEDS = "succeeds"
EQUIVALENT = "equivalent"
PRECEDES = "precedes"


class SpeciesGrowth(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: Literal["unbounded", "bounded"]
    alpha: Optional[Fraction] = None
    scale: Optional[Fraction] = None
    limit: Optional[int] = None

    @model_validator(mode="after")
    def _shape(self) -> "SpeciesGrowth":
        if self.kind == "unbounded":
            if self.alpha is None or self.alpha <= 0:
                raise ValueError("unbounded growth needs a positive exponent")
            if self.scale is None or self.scale <= 0:
                raise ValueError("unbounded growth needs a positive scale")
        elif self.limit is None or self.limit < 0:
            raise ValueError("bounded growth needs a non-negative integer limit")
        return self

    @classmethod
    def unbounded(cls, alpha=1, scale=1) -> "SpeciesGrowth":
        return cls(kind="unbounded", alpha=Fraction(alpha), scale=Fraction(scale))

    @classmethod
    def bounded(cls, limit: int) -> "SpeciesGrowth":
        return cls(kind="bounded", limit=int(limit))

    @property
    def is_unbounded(self) -> bool:
        return self.kind == "unbounded"

    def describe(self) -> str:
        if not self.is_unbounded:
            return str(self.limit)
        scale = "" if self.scale == 1 else f"{self.scale}*"
        power = "" if self.alpha == 1 else f"^({self.alpha})"
        return f"{scale}n{power}"


class GrowthProfile(BaseModel):
    """Monomial D-type tier-sequence, one SpeciesGrowth per species."""

    model_config = ConfigDict(frozen=True)

    entries: Tuple[SpeciesGrowth, ...]

    @model_validator(mode="after")
    def _diverges(self) -> "GrowthProfile":
        if not any(e.is_unbounded for e in self.entries):
            raise ValueError("at least one species must grow without bound")
        return self

    @property
    def dimension(self) -> int:
        return len(self.entries)

    def exponent(self, complex_: Complex) -> Fraction:
        """E(y): the growth exponent of (x_n v 1)^y."""
        return sum(
            (y * e.alpha for y, e in zip(complex_.coefficients, self.entries) if e.is_unbounded and y),
            Fraction(0),
        )

    def constant(self, complex_: Complex) -> Fraction:
        """K(y): the leading constant of (x_n v 1)^y."""
        value = Fraction(1)
        for y, e in zip(complex_.coefficients, self.entries):
            if not y:
                continue
            base = e.scale if e.is_unbounded else Fraction(max(e.limit, 1))
            value *= base**y
        return value

    def sample(self, n: float) -> List[float]:
        """x_n without the lower-order terms."""
        return [
            float(e.scale) * n ** float(e.alpha) if e.is_unbounded else float(e.limit)
            for e in self.entries
        ]

    def describe(self, names: Sequence[str]) -> str:
        return ", ".join(f"{name}:{e.describe()}" for name, e in zip(names, self.entries))


_NUMBER = r"[0-9]+(?:\.[0-9]+)?(?:/[0-9]+)?"
_MONOMIAL = re.compile(rf"(?P<c>{_NUMBER})?n(?:\^\(?(?P<a>{_NUMBER})\)?)?")


def _term(text: str, entry: str) -> Tuple[Fraction, Fraction]:
    """(alpha, scale) of one product term such as 3*n^2, n^(1/2), 2n, 5."""
    alpha, scale = Fraction(0), Fraction(1)
    for factor in text.split("*"):
        factor = factor.strip()
        match = _MONOMIAL.fullmatch(factor)
        try:
            if match:
                scale *= Fraction(match.group("c") or 1)
                alpha += Fraction(match.group("a") or 1)
            else:
                scale *= Fraction(factor)
        except (ValueError, ZeroDivisionError):
            raise NetworkError(f"cannot read growth term {factor!r} in {entry!r}") from None
    return alpha, scale


def _growth(expression: str, entry: str) -> SpeciesGrowth:
    expression = expression.replace(" ", "")
    if not expression or expression.startswith("-"):
        raise NetworkError(f"invalid growth expression in {entry!r}")
    monomials = []
    for signed in re.findall(r"[+-]?[^+-]+", expression):
        alpha, scale = _term(signed.lstrip("+-"), entry)
        monomials.append((alpha, -scale if signed.startswith("-") else scale))
    top = max(alpha for alpha, _ in monomials)
    scale = sum((s for a, s in monomials if a == top), Fraction(0))
    if top == 0:
        if scale.denominator != 1 or scale < 0:
            raise NetworkError(f"bounded limits must be non-negative integers in {entry!r}")
        return SpeciesGrowth.bounded(int(scale))
    if scale <= 0:
        raise NetworkError(f"leading coefficient must be positive in {entry!r}")
    return SpeciesGrowth.unbounded(top, scale)


def parse_profile(text: str, network: ReactionNetwork) -> GrowthProfile:
    """Parse "A:n, B:0, C:n^2*3" into a GrowthProfile for network's species."""
    given: Dict[str, SpeciesGrowth] = {}
    for raw in text.split(","):
        entry = raw.strip()
        if not entry:
            continue
        if ":" not in entry:
            raise NetworkError(f"profile entry {entry!r} must look like NAME:EXPR")
        name, expression = (part.strip() for part in entry.split(":", 1))
        if name not in network.species_names:
            raise NetworkError(f"unknown species {name!r} in profile", {"species": network.species_names})
        if name in given:
            raise NetworkError(f"species {name!r} given twice in profile")
        given[name] = _growth(expression, entry)

    missing = [n for n in network.species_names if n not in given]
    if missing:
        raise NetworkError(f"profile is missing species {', '.join(missing)}")
    try:
        return GrowthProfile(entries=tuple(given[n] for n in network.species_names))
    except ValueError as exc:
        raise NetworkError(f"invalid profile {text!r}: at least one species must grow without bound") from exc


class TierPartition(BaseModel):
    """Complexes grouped by growth exponent, tier 1 first."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    tiers: Tuple[Tuple[Complex, ...], ...]
    exponents: Tuple[Fraction, ...]

    @property
    def tier_index(self) -> Dict[Complex, int]:
        return {y: k for k, tier in enumerate(self.tiers, start=1) for y in tier}

    def index(self, complex_: Complex) -> int:
        try:
            return self.tier_index[complex_]
        except KeyError:
            raise NetworkError(f"complex {complex_.coefficients} is not in the partition") from None

    def named(self, network: ReactionNetwork) -> List[List[str]]:
        return [[network.complex_name(y) for y in tier] for tier in self.tiers]


def tier_partition(network: ReactionNetwork, profile: GrowthProfile) -> TierPartition:
    if profile.dimension != network.dimension:
        raise NetworkError(
            f"profile has {profile.dimension} entries, network has {network.dimension} species"
        )
    groups: Dict[Fraction, List[Complex]] = {}
    for y in network.complexes:
        groups.setdefault(profile.exponent(y), []).append(y)
    ordered = sorted(groups, reverse=True)
    partition = TierPartition(
        tiers=tuple(tuple(sorted(groups[e], key=Complex.sort_key, reverse=True)) for e in ordered),
        exponents=tuple(ordered),
    )
    logger.debug("tier_partition_computed", tiers=len(partition.tiers))
    return partition


def dominance(partition: TierPartition, y: Complex, y_prime: Complex) -> str:
    """succeeds if y is in a strictly higher tier than y', precedes if lower."""
    i, j = partition.index(y), partition.index(y_prime)
    if i < j:
        return SUCCEEDS
    if i > j:
        return PRECEDES
    return EQUIVALENT


def intensity_ratio_limit(network: ReactionNetwork, reaction: Reaction, profile: GrowthProfile) -> float:
    """lim lambda(x_n) / (x_n v 1)^y along the profile."""
    if profile.dimension != network.dimension:
        raise NetworkError("profile and network dimensions differ")
    value = Fraction(1)
    for need, growth in zip(reaction.source.coefficients, profile.entries):
        if not need or growth.is_unbounded:
            continue
        if growth.limit < need:
            return 0.0
        value *= Fraction(math.perm(growth.limit, need), max(growth.limit, 1) ** need)
    return float(value) * reaction.rate_constant


def complex_ratio(profile: GrowthProfile, y: Complex, y_prime: Complex, n: float) -> float:
    """(x_n v 1)^y / (x_n v 1)^y' evaluated at a finite n, in log space."""
    log_ratio = 0.0
    for a, b, value in zip(y.coefficients, y_prime.coefficients, profile.sample(n)):
        if a != b:
            log_ratio += (a - b) * math.log(max(value, 1.0))
    return math.exp(log_ratio)


def top_tier_witness(network: ReactionNetwork, profile: GrowthProfile) -> Optional[Reaction]:
    """First reaction whose source is in tier 1, dominates its product, and has a positive ratio limit."""
    partition = tier_partition(network, profile)
    for reaction in network.reactions:
        if partition.index(reaction.source) != 1:
            continue
        if dominance(partition, reaction.source, reaction.product) != SUCCEEDS:
            continue
        if intensity_ratio_limit(network, reaction, profile) > 0:
            return reaction
    return None


def maximal_species(profile: GrowthProfile) -> List[int]:
    """Species whose coordinate is not o(x_{n,j}) for any other species j."""
    top = max(e.alpha for e in profile.entries if e.is_unbounded)
    return [i for i, e in enumerate(profile.entries) if e.is_unbounded and e.alpha == top]
