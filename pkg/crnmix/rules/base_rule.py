"""
Base Rule Class - inherit from this to add an ergodicity class to the certifier
"""

from abc import ABC, abstractmethod
from functools import cached_property
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from ..conservation import ConservationVector, find_conservation_vector
from ..graph import (
    FlowDecomposition,
    flow_decomposition,
    is_weakly_reversible,
    linkage_classes,
    path_to_low_order,
)
from ..network import Complex, ReactionNetwork, is_binary

POINT_MASS_CAVEAT = "stationary distribution may be a point mass (some species has no inflow)"
REDUCIBLE_CAVEAT = (
    "state space may be reducible; the bound holds from states in a closed communicating class"
)

LOG_BOUND = "C(|x|+1)ln(|x|+2)"
LINEAR_BOUND = "C(|x|+1)"
UNIFORM_BOUND = "C"

LOG_MIXING = "O(log|x|)"
UNIFORM_MIXING = "O(1)"
UNKNOWN_MIXING = "unknown"


class RuleWitnesses(BaseModel):
    """Structural evidence collected while a rule checks its hypotheses."""

    paths: Dict[str, List[str]] = Field(default_factory=dict)
    unary_chains: Dict[str, List[str]] = Field(default_factory=dict)
    linkage_classes: Optional[List[List[str]]] = None
    species_partition: Optional[Dict[str, List[str]]] = None


class RuleOutcome(BaseModel):
    model_config = ConfigDict(frozen=True)

    label: str
    name: str = ""
    matched: bool
    uniform: bool = False
    failed_hypothesis: Optional[str] = None
    witnesses: RuleWitnesses = Field(default_factory=RuleWitnesses)
    caveats: List[str] = Field(default_factory=list)


class RuleContext:
    """
    Per-network facts shared by every rule.

    Each property is computed once on first use, so a certification run pays
    for the sympy conservation search at most once.
    """

    def __init__(self, network: ReactionNetwork):
        self.network = network

    def name(self, complex_: Complex) -> str:
        return self.network.complex_name(complex_)

    def names(self, complexes: List[Complex]) -> List[str]:
        return [self.name(y) for y in complexes]

    def species_name(self, index: int) -> str:
        return self.network.species_names[index]

    @cached_property
    def flows(self) -> FlowDecomposition:
        return flow_decomposition(self.network)

    @cached_property
    def core(self) -> ReactionNetwork:
        return self.flows.core

    @cached_property
    def binary(self) -> bool:
        return is_binary(self.network)

    @cached_property
    def core_linkage_classes(self) -> List[List[Complex]]:
        return linkage_classes(self.core)

    @cached_property
    def core_weakly_reversible(self) -> bool:
        return is_weakly_reversible(self.core)

    @cached_property
    def core_conservation(self) -> Optional[ConservationVector]:
        return find_conservation_vector(self.core.reactions, self.core.dimension)

    @cached_property
    def missing_outflows(self) -> List[str]:
        present = set(self.flows.outflow_species)
        return [self.species_name(i) for i in range(self.network.dimension) if i not in present]

    @cached_property
    def missing_inflows(self) -> List[str]:
        present = set(self.flows.inflow_species)
        return [self.species_name(i) for i in range(self.network.dimension) if i not in present]

    @cached_property
    def binary_complex_paths(self) -> Tuple[Dict[str, List[str]], Optional[str]]:
        """Paths from every order-2 complex to order <= 1, and the first complex without one."""
        paths: Dict[str, List[str]] = {}
        binaries = sorted((y for y in self.network.complexes if y.order == 2), key=Complex.sort_key)
        for y in binaries:
            path = path_to_low_order(self.network, y)
            if path is None:
                return paths, self.name(y)
            paths[self.name(y)] = self.names(path)
        return paths, None

    def point_mass_caveats(self) -> List[str]:
        return [POINT_MASS_CAVEAT] if self.missing_inflows else []

    def not_binary_reason(self) -> Optional[str]:
        if self.binary:
            return None
        worst = max(self.network.complexes, key=lambda y: y.order)
        return f"network is not binary: complex {self.name(worst)} has order {worst.order}"

    def single_linkage_reason(self) -> Optional[str]:
        if not self.core_weakly_reversible:
            return "core network is not weakly reversible"
        count = len(self.core_linkage_classes)
        if count != 1:
            return f"core network has {count} linkage classes, expected 1"
        return None


class BaseRule(ABC):
    """
    Base class for certification rules.

    To add a rule:
    1. Create a new file named <something>_rule.py in crnmix/rules/
    2. Subclass BaseRule and set label, name, precedence and bound attributes
    3. Implement evaluate()
    The rule loader picks it up automatically.
    """

    label: str = ""
    name: str = ""
    precedence: int = 100
    uniform: bool = False
    description: str = ""

    @abstractmethod
    def evaluate(self, context: RuleContext) -> RuleOutcome:
        """Check the hypotheses of this class against the network in context."""

    def reject(self, reason: str) -> RuleOutcome:
        return RuleOutcome(
            label=self.label, name=self.name, matched=False, uniform=self.uniform, failed_hypothesis=reason
        )

    def accept(self, context: RuleContext, witnesses: RuleWitnesses, caveats: List[str] = ()) -> RuleOutcome:
        notes = list(caveats)
        if context.missing_inflows:
            notes.append(REDUCIBLE_CAVEAT)
        return RuleOutcome(
            label=self.label,
            name=self.name,
            matched=True,
            uniform=self.uniform,
            witnesses=witnesses,
            caveats=notes,
        )

    def get_info(self) -> Dict[str, str]:
        return {
            "label": self.label,
            "name": self.name,
            "precedence": str(self.precedence),
            "description": self.description,
        }
