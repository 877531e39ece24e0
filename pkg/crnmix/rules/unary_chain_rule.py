"""
One out-flow species, reached from every other species through unary reactions.
"""

from ..graph import unary_chain
from .base_rule import BaseRule, RuleContext, RuleOutcome, RuleWitnesses


class UnaryChainRule(BaseRule):
    label = "Cor6.3"
    name = "single-outflow-chain"
    precedence = 50
    description = (
        "exactly one out-flow species S_1; every S_i is a complex and reaches S_1 through "
        "unary complexes; every binary complex reaches order <= 1"
    )

    def evaluate(self, context: RuleContext) -> RuleOutcome:
        reason = context.not_binary_reason()
        if reason:
            return self.reject(reason)

        outflow_species = context.flows.outflow_species
        if len(outflow_species) != 1:
            return self.reject(f"expected exactly one outflow species, found {len(outflow_species)}")
        sink = outflow_species[0]

        network = context.network
        unary_present = {y.species_index() for y in context.core.complexes if y.is_unary}
        for i in range(network.dimension):
            if i not in unary_present:
                name = context.species_name(i)
                return self.reject(f"species {name} is not a unary complex of the core network")

        chains = {}
        for i in range(network.dimension):
            chain = unary_chain(network, i, sink)
            if chain is None:
                return self.reject(
                    f"no unary path from {context.species_name(i)} to {context.species_name(sink)}"
                )
            chains[context.species_name(i)] = context.names(chain)

        paths, stuck = context.binary_complex_paths
        if stuck:
            return self.reject(f"no directed path from {stuck} to a complex of order <= 1")

        witnesses = RuleWitnesses(paths=paths, unary_chains=chains)
        return self.accept(context, witnesses, context.point_mass_caveats())
