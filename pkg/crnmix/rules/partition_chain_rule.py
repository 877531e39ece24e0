"""
Species split into out-flow species S_e and the rest S_p, each S_p member
draining into S_e through unary reactions.

The partition is greedy: S_e is every species with an out-flow, S_p the rest.
"""

from ..graph import unary_chain_to_set
from .base_rule import BaseRule, RuleContext, RuleOutcome, RuleWitnesses


class PartitionChainRule(BaseRule):
    label = "Cor6.4"
    name = "partitioned-outflow-chain"
    precedence = 60
    description = (
        "out-flows on a non-empty S_e; every species of S_p reaches S_e through unary complexes; "
        "every binary complex reaches order <= 1"
    )

    def evaluate(self, context: RuleContext) -> RuleOutcome:
        reason = context.not_binary_reason()
        if reason:
            return self.reject(reason)

        exits = set(context.flows.outflow_species)
        if not exits:
            return self.reject("no outflow species")
        network = context.network
        persistent = [i for i in range(network.dimension) if i not in exits]

        chains = {}
        for i in persistent:
            chain = unary_chain_to_set(network, i, exits)
            if chain is None:
                return self.reject(f"no unary path from {context.species_name(i)} to an outflow species")
            chains[context.species_name(i)] = context.names(chain)

        paths, stuck = context.binary_complex_paths
        if stuck:
            return self.reject(f"no directed path from {stuck} to a complex of order <= 1")

        partition = {
            "s_p": [context.species_name(i) for i in persistent],
            "s_e": [context.species_name(i) for i in sorted(exits)],
        }
        witnesses = RuleWitnesses(paths=paths, unary_chains=chains, species_partition=partition)
        return self.accept(context, witnesses, context.point_mass_caveats())
